"""Device policies.

Every agent sees a :class:`~aidef.miner.Window` plus the set of moves already
refused in the current state, and must not propose one of those again.
"""

from __future__ import annotations

import random
from typing import Protocol, Sequence

from .miner import Implication, Window, predict_incorrect
from .protocol import output_space
from .signals import UNDEF, VectorSchema, nothing_vector


class NoUntriedMoves(RuntimeError):
    """Every move in the finite output space was refused: the device is dead."""


class Agent(Protocol):
    id: str
    seed: int

    def decide(self, window: Window, tried: frozenset) -> tuple: ...


class RandomAgent:
    """Starts with the all-Nothing move, then explores at random.

    With probability ``deviation_weight`` it samples among untried moves that
    differ from all-Nothing in exactly one coordinate; otherwise (or once
    those run out) uniformly among all untried moves.
    """

    id = "random"

    def __init__(self, schema: VectorSchema, seed: int = 0, deviation_weight: float = 0.5):
        self.seed = seed
        self.rng = random.Random(seed)
        self.deviation_weight = deviation_weight
        self.moves = list(output_space(schema))
        self.idle = nothing_vector(schema.outputs)
        self.single = [m for m in self.moves if sum(a != b for a, b in zip(m, self.idle)) == 1]
        self._born = False

    def decide(self, window: Window, tried: frozenset) -> tuple:
        if not self._born:
            self._born = True
            if self.idle not in tried:
                return self.idle
        if self.rng.random() < self.deviation_weight:
            single = [m for m in self.single if m not in tried]
            if single:
                return self.rng.choice(single)
        rest = [m for m in self.moves if m not in tried]
        if not rest:
            raise NoUntriedMoves(f"all {len(self.moves)} moves refused")
        return self.rng.choice(rest)


def random_agent(schema: VectorSchema, seed: int = 0, deviation_weight: float = 0.5) -> RandomAgent:
    return RandomAgent(schema, seed, deviation_weight)


class MinerGuidedAgent:
    """Skips moves that mined rules call incorrect for sure.

    Among the remaining moves it prefers those after which the rules leave the
    most moves open (a crude freedom score), then picks uniformly. With
    probability ``epsilon`` it deliberately tries a move the rules reject, to
    keep checking them. If the rules reject everything untried, it tries
    those anyway rather than give up.
    """

    id = "miner"

    def __init__(
        self,
        schema: VectorSchema,
        rules: Sequence[Implication],
        seed: int = 0,
        mobility_weight: float = 1.0,
        epsilon: float = 0.0,
    ):
        self.schema = schema
        self.seed = seed
        self.rng = random.Random(seed)
        self.rules = [r for r in rules if r.violations == 0 and r.consequent.signal == "bad_move"]
        self.mobility_weight = mobility_weight
        self.epsilon = epsilon
        self.moves = list(output_space(schema))
        self._fallback = RandomAgent(schema, seed) if not self.rules else None
        # rules that can still fire when the next input is unknown
        input_names = {s.name for s in schema.inputs}
        self._mobility_rules = [
            r for r in self.rules if not any(a.offset == 0 and a.signal in input_names for a in r.antecedent)
        ]

    def mobility(self, window: Window, move: tuple) -> int:
        """Moves not predicted incorrect one step after ``move``."""
        nxt = Window(
            self.schema,
            inputs=(UNDEF,) * len(self.schema.inputs),
            prev_inputs=window.inputs,
            prev_output=move,
        )
        return sum(not predict_incorrect(self._mobility_rules, nxt, m) for m in self.moves)

    def decide(self, window: Window, tried: frozenset) -> tuple:
        if self._fallback is not None:
            return self._fallback.decide(window, tried)
        untried = [m for m in self.moves if m not in tried]
        if not untried:
            raise NoUntriedMoves(f"all {len(self.moves)} moves refused")
        doomed = [m for m in untried if predict_incorrect(self.rules, window, m)]
        allowed = [m for m in untried if m not in set(doomed)]
        if doomed and (not allowed or self.rng.random() < self.epsilon):
            return self.rng.choice(doomed)
        if self.mobility_weight > 0 and self._mobility_rules:
            scores = [self.mobility(window, m) for m in allowed]
            best = max(scores)
            allowed = [m for m, s in zip(allowed, scores) if s == best]
        return self.rng.choice(allowed)


def miner_guided_agent(
    schema: VectorSchema,
    rules: Sequence[Implication],
    seed: int = 0,
    mobility_weight: float = 1.0,
    epsilon: float = 0.0,
) -> MinerGuidedAgent:
    return MinerGuidedAgent(schema, rules, seed, mobility_weight, epsilon)
