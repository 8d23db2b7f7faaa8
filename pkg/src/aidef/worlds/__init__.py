"""World registry: ``ttt-eye`` and ``tm:<seed>:<max_states>``."""

from __future__ import annotations

from ..protocol import World
from .tictactoe import TicTacToeWorld
from .turing import TuringWorld


class UnknownWorld(KeyError):
    pass


def make_world(world_id: str) -> World:
    if world_id == TicTacToeWorld.id:
        return TicTacToeWorld()
    if world_id.startswith("tm:"):
        try:
            _, seed, max_states = world_id.split(":")
            return TuringWorld.random(int(seed), int(max_states))
        except ValueError as exc:
            raise UnknownWorld(f"bad TM world id {world_id!r}, want tm:<seed>:<max_states>") from exc
    raise UnknownWorld(world_id)


__all__ = ["TicTacToeWorld", "TuringWorld", "UnknownWorld", "make_world"]
