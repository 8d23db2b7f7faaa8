"""Tic-Tac-Toe seen through a single-cell eye.

The device plays X. It sees only the cell under its eye and acts with four
simultaneous sub-actions: move the eye vertically, move it horizontally, put
an X under the eye, request a new game. A move is correct only if every
sub-action is. The world itself plays O, uniformly at random over empty cells,
right after each X that does not end the game.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, replace

from ..protocol import Capabilities, World
from ..signals import (
    BOOL,
    NOTHING,
    VectorSchema,
    finite,
    input_signal,
    output_signal,
    reward_signal,
)

EMPTY, X, O = 0, 1, 2
STAY, UP, DOWN = 0, 1, 2
LEFT, RIGHT = 1, 2

IN_PLAY = 0
# terminal phases double as the reward they pay
LOSS, DRAW, VICTORY = 1, 2, 3
_PHASE_REWARD = {LOSS: 0, DRAW: 1, VICTORY: 2}

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)

SCHEMA = VectorSchema(
    inputs=(input_signal("cell", finite(3)),),
    outputs=(
        output_signal("vertical", finite(3)),
        output_signal("horizontal", finite(3)),
        output_signal("put_cross", BOOL),
        output_signal("new_game", BOOL),
    ),
    rewards=(reward_signal("reward", 2),),
)


@dataclass(frozen=True)
class TttState:
    board: tuple = (EMPTY,) * 9  # row-major
    eye: tuple = (1, 1)
    phase: int = IN_PLAY
    rng_seed: int = 0  # opponent PRNG state, advanced on every O move
    pending_reward: object = NOTHING

    @property
    def eye_cell(self) -> int:
        return self.board[3 * self.eye[0] + self.eye[1]]


def winner(board: tuple) -> int:
    for a, b, c in LINES:
        if board[a] != EMPTY and board[a] == board[b] == board[c]:
            return board[a]
    return EMPTY


def ttt_initial(seed: int) -> TttState:
    return TttState(rng_seed=seed % 2**64)


def ttt_view(state: TttState) -> tuple:
    return (state.eye_cell,)


def ttt_correct(state: TttState, out: tuple) -> tuple[bool, str]:
    vertical, horizontal, put_cross, _new_game = out
    if put_cross:
        if state.phase != IN_PLAY:
            return False, "put_cross: game is over"
        if state.eye_cell != EMPTY:
            return False, "put_cross: cell is not empty"
    row, col = state.eye
    if (vertical == UP and row == 0) or (vertical == DOWN and row == 2):
        return False, "vertical: eye at the edge"
    if (horizontal == LEFT and col == 0) or (horizontal == RIGHT and col == 2):
        return False, "horizontal: eye at the edge"
    return True, ""


def _opponent_move(board: list, seed: int) -> int:
    rng = random.Random(seed)
    empties = [i for i, c in enumerate(board) if c == EMPTY]
    board[rng.choice(empties)] = O
    return rng.getrandbits(64)


def ttt_transition(state: TttState, out: tuple) -> tuple[TttState, tuple]:
    """Put X first, let O answer, then move the eye, then maybe reset."""
    vertical, horizontal, put_cross, new_game = out
    board = list(state.board)
    phase, seed, pending = state.phase, state.rng_seed, NOTHING
    row, col = state.eye

    if put_cross:
        board[3 * row + col] = X
        if winner(board) == X:
            phase = VICTORY
        elif EMPTY not in board:
            phase = DRAW
        else:
            seed = _opponent_move(board, seed)
            if winner(board) == O:
                phase = LOSS
            elif EMPTY not in board:
                phase = DRAW
        if phase != IN_PLAY:
            pending = _PHASE_REWARD[phase]

    row += {STAY: 0, UP: -1, DOWN: 1}[vertical]
    col += {STAY: 0, LEFT: -1, RIGHT: 1}[horizontal]

    if new_game:
        board = [EMPTY] * 9
        phase = IN_PLAY

    nxt = TttState(tuple(board), (row, col), phase, seed, pending)
    return nxt, (pending,)


def serialize(state: TttState) -> bytes:
    pending = 255 if state.pending_reward is NOTHING else state.pending_reward
    return bytes(state.board) + bytes((*state.eye, state.phase, pending)) + struct.pack(
        ">Q", state.rng_seed
    )


def deserialize(data: bytes) -> TttState:
    board = tuple(data[:9])
    row, col, phase, pending = data[9:13]
    (seed,) = struct.unpack(">Q", data[13:21])
    return TttState(board, (row, col), phase, seed, NOTHING if pending == 255 else pending)


class TicTacToeWorld(World):
    id = "ttt-eye"
    schema = SCHEMA
    capabilities = Capabilities(guarantees_nonempty_correct=True, guarantees_monotone_incorrect=True)

    def initial_state(self, seed: int) -> TttState:
        return ttt_initial(seed)

    def view(self, state: TttState) -> tuple:
        return ttt_view(state)

    def correct(self, state: TttState, output: tuple) -> bool:
        return ttt_correct(state, output)[0]

    def transition(self, state: TttState, output: tuple) -> tuple[TttState, tuple]:
        return ttt_transition(state, output)

    def serialize_state(self, state: TttState) -> bytes:
        return serialize(state)


def with_board(state: TttState, board: tuple, **kw) -> TttState:
    return replace(state, board=tuple(board), **kw)
