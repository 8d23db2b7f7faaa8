"""World interface and the session harness around it.

A world is a deterministic state machine with three pure functions on its
state (``view``, ``correct``, ``transition``) plus a canonical byte encoding
used to check that refused moves really leave it untouched.

The :class:`Session` enforces the incorrect-move contract: a refused move does
not change the state, does not advance time, and may not be retried until some
move is accepted.
"""

from __future__ import annotations

import abc
import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence, Union

from .life import Life, Step
from .signals import NOTHING, SignalError, VectorSchema, validate_vector

log = logging.getLogger(__name__)


class ProtocolError(RuntimeError):
    pass


class DuplicateIncorrectMove(ProtocolError):
    """The caller re-submitted a move that was already refused in this state."""


class SchemaViolation(ProtocolError):
    pass


class InfiniteOutputSpace(ProtocolError):
    pass


class LifeComplete(ProtocolError):
    """The world has no further steps to offer (e.g. all games played)."""


@dataclass(frozen=True)
class Capabilities:
    guarantees_nonempty_correct: bool = True
    guarantees_monotone_incorrect: bool = True


@dataclass(frozen=True)
class Accepted:
    observation: tuple
    reward: tuple
    time_advanced: bool = field(default=True, init=False)


@dataclass(frozen=True)
class Rejected:
    bad_move: int = field(default=1, init=False)
    time_advanced: bool = field(default=False, init=False)


StepOutcome = Union[Accepted, Rejected]


class World(abc.ABC):
    """In-process world plugin."""

    id: str = "world"
    schema: VectorSchema
    capabilities: Capabilities = Capabilities()

    @abc.abstractmethod
    def initial_state(self, seed: int) -> Any: ...

    @abc.abstractmethod
    def view(self, state: Any) -> tuple: ...

    @abc.abstractmethod
    def correct(self, state: Any, output: tuple) -> bool: ...

    @abc.abstractmethod
    def transition(self, state: Any, output: tuple) -> tuple[Any, tuple]:
        """Apply a correct move; return the next state and the reward vector."""

    @abc.abstractmethod
    def serialize_state(self, state: Any) -> bytes: ...

    def attempt(self, state: Any, output: tuple) -> tuple[Any, tuple | None]:
        """Raw move interface: ``(state, None)`` when the move is refused."""
        if not self.correct(state, output):
            return state, None
        return self.transition(state, output)

    def after_step(self, state: Any) -> tuple[Any, tuple | None]:
        """Hook run after each accepted step; may inject a reward vector."""
        return state, None

    def life_complete(self, state: Any) -> bool:
        return False


def output_space(schema: VectorSchema) -> Iterator[tuple]:
    """All output vectors, in lexicographic order of the schema's signals."""
    ranges = []
    for s in schema.outputs:
        if not s.kind.is_finite:
            raise InfiniteOutputSpace(f"output {s.name!r} has kind {s.kind}")
        ranges.append(s.kind.values())
    return itertools.product(*ranges)


def random_output(schema: VectorSchema, rng: random.Random) -> tuple:
    out = []
    for s in schema.outputs:
        if s.kind.is_finite:
            out.append(rng.randrange(s.kind.cardinality))
        elif s.kind.name == "int":
            out.append(rng.randint(-8, 8))
        else:
            out.append(rng.uniform(-1.0, 1.0))
    return tuple(out)


def legal_moves(world: World, state: Any) -> frozenset:
    return frozenset(o for o in output_space(world.schema) if world.correct(state, o))


def merge_rewards(reward: tuple, injected: tuple | None) -> tuple:
    """Fill Nothing coordinates of ``reward`` from ``injected``."""
    if injected is None:
        return reward
    merged = []
    for own, extra in zip(reward, injected):
        if extra is NOTHING:
            merged.append(own)
        elif own is NOTHING:
            merged.append(extra)
        else:
            raise ProtocolError(f"reward collision: world gave {own!r}, hook injected {extra!r}")
    return tuple(merged)


class Session:
    """One device living in one world.

    Attributes:
        t: number of accepted moves so far.
        observation: input vector currently shown to the device.
        life: the trace accumulated so far.
        complete: set once the world reports the life is over.
    """

    def __init__(self, world: World, seed: int = 0, metadata: dict | None = None):
        self.world = world
        self.seed = seed
        self.state = world.initial_state(seed)
        self.t = 0
        self.observation = world.view(self.state)
        self.last_reward: tuple = tuple(NOTHING for _ in world.schema.rewards)
        self.complete = False
        self._tried: list[tuple] = []
        self._tried_set: set[tuple] = set()
        meta = {"world": world.id, "world_seed": seed}
        meta.update(metadata or {})
        self.life = Life(world.schema, metadata=meta)

    @property
    def tried_incorrect(self) -> frozenset:
        return frozenset(self._tried_set)

    def exhausted(self) -> bool:
        """True when every output of a finite space has been refused here."""
        size = self.world.schema.output_space_size()
        return size is not None and len(self._tried_set) >= size

    def attempt(self, output: Sequence) -> StepOutcome:
        if self.complete:
            raise LifeComplete(f"life in {self.world.id} is over at t={self.t}")
        try:
            output = validate_vector(self.world.schema.outputs, output)
        except SignalError as exc:
            raise SchemaViolation(str(exc)) from exc
        if output in self._tried_set:
            raise DuplicateIncorrectMove(f"{output} already refused at t={self.t}")

        state, reward = self.world.attempt(self.state, output)
        if reward is None:
            self.state = state
            self._tried.append(output)
            self._tried_set.add(output)
            return Rejected()

        state, injected = self.world.after_step(state)
        try:
            reward = validate_vector(self.world.schema.rewards, merge_rewards(reward, injected))
        except SignalError as exc:
            raise SchemaViolation(f"world emitted bad reward: {exc}") from exc
        self.life.append(Step(self.t, self.observation, tuple(self._tried), output, reward))
        self.state = state
        self.t += 1
        self._tried.clear()
        self._tried_set.clear()
        self.observation = self.world.view(state)
        self.last_reward = reward
        if self.world.life_complete(state):
            self.complete = True
        return Accepted(self.observation, reward)


def session_attempt(session: Session, output: Sequence) -> StepOutcome:
    return session.attempt(output)


@dataclass
class AssumptionResult:
    assumption: int
    status: str = "pass"  # pass | fail | not_guaranteed
    counterexample: dict | None = None
    checked: int = 0
    note: str = ""

    def to_json(self) -> dict:
        return {
            "assumption": self.assumption,
            "status": self.status,
            "counterexample": self.counterexample,
        }


@dataclass
class AssumptionReport:
    world: str
    results: dict[int, AssumptionResult]
    attempts: int = 0
    incorrect: int = 0

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results.values())

    def to_json(self) -> list[dict]:
        return [self.results[a].to_json() for a in sorted(self.results)]


def _fail(result: AssumptionResult, state_bytes: bytes, output: tuple, **extra: Any) -> None:
    if result.status == "fail":
        return
    result.status = "fail"
    result.counterexample = {"state": state_bytes.hex(), "output": list(output), **extra}


def check_world_assumptions(
    world: World,
    seeds: Iterable[int] = (0,),
    trials: int = 1000,
    horizon: int = 200,
) -> AssumptionReport:
    """Fuzz the raw world interface against the incorrect-move assumptions.

    Assumption 1: a refused move leaves the serialized state byte-identical.
    Assumption 2: a refused move is still refused when re-queried.
    Assumption 4: every visited state has at least one correct move; worlds
    that may kill the device report ``not_guaranteed`` instead.

    ``trials`` attempts are split over ``seeds``; each random walk restarts
    from the initial state after ``horizon`` accepted moves.
    """
    seeds = list(seeds)
    a1, a2, a4 = AssumptionResult(1), AssumptionResult(2), AssumptionResult(4)
    finite = world.schema.output_space_size() is not None
    check_a4 = finite and world.capabilities.guarantees_nonempty_correct
    if not check_a4:
        a4.status = "not_guaranteed"
        a4.note = "world may reach states without correct moves" if finite else "infinite output space"
        log.warning("assumption 4 not checked for %s: %s", world.id, a4.note)
    report = AssumptionReport(world.id, {1: a1, 2: a2, 4: a4})
    per_seed = max(1, trials // max(1, len(seeds)))
    stuck_limit = 4 * (world.schema.output_space_size() or 64)

    for seed in seeds:
        rng = random.Random(seed)
        state = world.initial_state(seed)
        accepted = rejected_run = 0
        seen: set[bytes] = set()
        for _ in range(per_seed):
            before = world.serialize_state(state)
            if check_a4 and before not in seen:
                seen.add(before)
                a4.checked += 1
                if not legal_moves(world, state):
                    _fail(a4, before, ())
            out = random_output(world.schema, rng)
            report.attempts += 1
            new_state, reward = world.attempt(state, out)
            if reward is None:
                report.incorrect += 1
                rejected_run += 1
                a1.checked += 1
                after = world.serialize_state(new_state)
                if after != before or world.serialize_state(state) != before:
                    _fail(a1, before, out, after=after.hex())
                a2.checked += 1
                if world.correct(new_state, out):
                    _fail(a2, before, out)
                state = new_state
                if rejected_run > stuck_limit:
                    state, accepted, rejected_run = world.initial_state(seed), 0, 0
                continue
            rejected_run = 0
            state, _ = world.after_step(new_state)
            accepted += 1
            if accepted >= horizon or world.life_complete(state):
                state, accepted = world.initial_state(seed), 0
    return report
