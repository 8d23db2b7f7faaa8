"""The recorded history of one device in one world."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .signals import UNDEF, SignalError, VectorSchema, validate_value


@dataclass(frozen=True)
class Step:
    """One accepted move together with the attempts the world refused first.

    ``input`` is what the device saw at time ``t``; ``reward`` is what the
    accepted ``output`` earned. ``incorrect`` keeps attempt order.
    """

    t: int
    input: tuple
    incorrect: tuple
    output: tuple
    reward: tuple


@dataclass(frozen=True)
class Revision:
    """Late resolution of an input that was Undef when recorded."""

    t: int
    signal: str
    new: Any
    old: Any = UNDEF


@dataclass(frozen=True)
class DeathReport:
    t: int
    tried: int  # incorrect attempts made in the fatal state


@dataclass
class Life:
    schema: VectorSchema
    steps: list[Step] = field(default_factory=list)
    revisions: list[Revision] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    death: DeathReport | None = None

    def __len__(self) -> int:
        return len(self.steps)

    def append(self, step: Step) -> None:
        if step.t != len(self.steps):
            raise ValueError(f"step t={step.t} does not follow t={len(self.steps) - 1}")
        if len(set(step.incorrect)) != len(step.incorrect):
            raise ValueError(f"step t={step.t} repeats an incorrect attempt")
        self.steps.append(step)

    @property
    def rewards(self) -> list[tuple]:
        return [s.reward for s in self.steps]

    def revise(self, t: int, signal: str, new: Any) -> Revision:
        """Record that input ``signal`` at time ``t`` should have read ``new``."""
        names = [s.name for s in self.schema.inputs]
        if signal not in names:
            raise SignalError(f"{signal!r} is not an input signal")
        idx = names.index(signal)
        if not 0 <= t < len(self.steps):
            raise IndexError(f"no step at t={t}")
        if self.steps[t].input[idx] is not UNDEF:
            raise SignalError(f"{signal}({t}) was not Undef when recorded")
        spec = self.schema.inputs[idx]
        new = validate_value(spec, new)
        if new is UNDEF:
            raise SignalError("a revision must resolve to a concrete value")
        rev = Revision(t, signal, new)
        self.revisions.append(rev)
        return rev

    def resolved_inputs(self, t: int) -> tuple:
        """Input vector at ``t`` with revisions applied."""
        values = list(self.steps[t].input)
        names = [s.name for s in self.schema.inputs]
        for rev in self.revisions:
            if rev.t == t:
                values[names.index(rev.signal)] = rev.new
        return tuple(values)

