"""Scoring lives: per-priority means of rewards and their lexicographic order.

Means are computed with the arithmetic of the reward values themselves:
integer rewards give correctly rounded floats, ``Fraction`` rewards give exact
rationals. Either way two lives with the same true mean score identically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real
from typing import Sequence, Union

from .signals import INT, NOTHING, Role, SignalSpec, reward_signal


class PriorityMismatch(ValueError):
    pass


class SchemaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Exact:
    mean: Real

    @property
    def lo(self) -> Real:
        return self.mean

    @property
    def hi(self) -> Real:
        return self.mean

    def to_json(self) -> dict:
        return {"exact": float(self.mean)}


@dataclass(frozen=True)
class Interval:
    lo: Real
    hi: Real

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Real:
        return self.hi - self.lo

    def to_json(self) -> dict:
        return {"lo": float(self.lo), "hi": float(self.hi)}


Coordinate = Union[Exact, Interval]


@dataclass(frozen=True)
class SuccessValue:
    coords: tuple

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> Coordinate:
        return self.coords[i]

    def to_json(self) -> dict:
        return {"coords": [c.to_json() for c in self.coords]}

    @classmethod
    def from_json(cls, doc: dict) -> SuccessValue:
        coords = []
        for c in doc["coords"]:
            coords.append(Exact(c["exact"]) if "exact" in c else Interval(c["lo"], c["hi"]))
        return cls(tuple(coords))

    def __str__(self) -> str:
        parts = []
        for c in self.coords:
            if isinstance(c, Exact):
                parts.append(f"{float(c.mean):.6g}")
            else:
                parts.append(f"[{float(c.lo):.6g}, {float(c.hi):.6g}]")
        return "(" + ", ".join(parts) + ")"


class Comparison(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class RewardStream:
    """Reward vectors over time; ``specs`` may be empty for unbounded streams."""

    values: tuple
    specs: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(tuple(v) for v in self.values))
        object.__setattr__(self, "specs", tuple(self.specs))

    @property
    def priority_count(self) -> int:
        if self.specs:
            return len(self.specs)
        return len(self.values[0]) if self.values else 0

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def bounded(cls, values: Sequence[Sequence], tops: Sequence[int]) -> RewardStream:
        specs = tuple(reward_signal(f"r{i}", top) for i, top in enumerate(tops))
        return cls(tuple(values), specs)


def success_finite(stream: RewardStream, upto_t: int | None = None) -> SuccessValue:
    """Mean of the concrete rewards of each priority over steps ``0..upto_t-1``.

    Nothing never enters a mean; a priority that has seen no concrete reward
    scores zero, as does the empty life.
    """
    n = len(stream) if upto_t is None else upto_t
    if not 0 <= n <= len(stream):
        raise ValueError(f"upto_t={upto_t} outside 0..{len(stream)}")
    coords = []
    for i in range(stream.priority_count):
        seen = [v[i] for v in stream.values[:n] if v[i] is not NOTHING]
        coords.append(Exact(sum(seen) / len(seen)) if seen else Exact(0))
    return SuccessValue(tuple(coords))


def success_series(stream: RewardStream) -> list[SuccessValue]:
    """Success of every non-empty prefix; element ``t`` covers steps ``0..t``."""
    m = stream.priority_count
    totals = [0] * m
    counts = [0] * m
    out = []
    for vec in stream.values:
        for i, v in enumerate(vec):
            if v is not NOTHING:
                totals[i] += v
                counts[i] += 1
        out.append(
            SuccessValue(
                tuple(Exact(totals[i] / counts[i]) if counts[i] else Exact(0) for i in range(m))
            )
        )
    return out


def success_limit_estimate(
    series: Sequence[SuccessValue], tail_fraction: float = 0.5, epsilon: float = 1e-6
) -> SuccessValue:
    """Bracket the limit of a prefix-success sequence by its tail.

    Over the last ``ceil(tail_fraction * n)`` prefixes take the min and max of
    each coordinate. A band no wider than ``epsilon`` collapses to its
    midpoint; anything wider is reported as an interval (the finite stand-in
    for liminf/limsup).
    """
    if not series:
        raise ValueError("empty success series")
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = len(series)
    tail = series[n - max(1, math.ceil(tail_fraction * n)) :]
    coords = []
    for i in range(len(series[0])):
        lo = min(v[i].lo for v in tail)
        hi = max(v[i].hi for v in tail)
        coords.append(Exact((lo + hi) / 2) if hi - lo <= epsilon else Interval(lo, hi))
    return SuccessValue(tuple(coords))


def _bounds(c: Coordinate) -> tuple:
    return (c.lo, c.hi)


def compare_success(a: SuccessValue, b: SuccessValue) -> Comparison:
    """Lexicographic comparison, highest priority first.

    Coordinates with identical bounds tie and pass to the next priority. A
    coordinate lying strictly to the left of the other decides the order;
    overlapping (or touching) distinct coordinates make the lives
    incomparable.
    """
    if len(a) != len(b):
        raise PriorityMismatch(f"{len(a)} vs {len(b)} priority levels")
    for ca, cb in zip(a.coords, b.coords):
        (alo, ahi), (blo, bhi) = _bounds(ca), _bounds(cb)
        if alo == blo and ahi == bhi:
            continue
        if ahi < blo:
            return Comparison.LESS
        if bhi < alo:
            return Comparison.GREATER
        return Comparison.INCOMPARABLE
    return Comparison.EQUAL


def emulate_two_priorities(stream2: RewardStream) -> RewardStream:
    """Fold a two-priority stream into one unbounded reward signal.

    The low priority (index 1) passes through as 0/1. A positive high-priority
    reward (index 0) is emitted as ``2 * c`` where ``c`` counts the emitted
    non-Nothing values so far including this one, and from then on every
    emitted value is raised by 2. Without a positive high reward the folded
    success stays in ``[0, 1]``; after one it is at least 2.
    """
    if stream2.priority_count != 2 and len(stream2):
        raise SchemaMismatch(f"need exactly 2 priorities, got {stream2.priority_count}")
    if stream2.specs and len(stream2.specs) != 2:
        raise SchemaMismatch(f"need exactly 2 priorities, got {len(stream2.specs)}")
    out = []
    count = 0
    boost = 0
    for t, vec in enumerate(stream2.values):
        if len(vec) != 2:
            raise SchemaMismatch(f"t={t}: reward vector {vec!r} is not two-priority")
        high, low = vec
        for v in vec:
            if v is not NOTHING and v not in (0, 1):
                raise SchemaMismatch(f"t={t}: value {v!r} outside {{Nothing, 0, 1}}")
        if high is not NOTHING and high > 0:
            count += 1
            out.append((2 * count + boost,))
            boost = 2
        elif low is not NOTHING:
            count += 1
            out.append((low + boost,))
        elif high is not NOTHING:
            count += 1
            out.append((boost,))
        else:
            out.append((NOTHING,))
    spec = SignalSpec("emulated", INT, Role.REWARD, allows_nothing=True)
    return RewardStream(tuple(out), (spec,))

