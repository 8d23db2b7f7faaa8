"""Mining memoryless dependencies from a recorded life.

An implication reads like ``cell(t)!=0, put_cross(t)=1 => bad_move(t+1)=1``:
a conjunction of atoms over the current and previous step entails a
consequent. Every step of a life contributes one negative example for
``bad_move`` (the accepted output) and one positive example per refused
attempt, with the refused output standing in for the output signals at
offset 0.

Counting is done with Python ints as bitsets over the examples, so a
candidate antecedent costs one ``&`` and one ``bit_count`` per atom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .life import Life
from .signals import UNDEF, VectorSchema

EQ, NE = "=", "!="


class EmptyLife(ValueError):
    pass


class UnknownSignal(KeyError):
    pass


@dataclass(frozen=True, order=True)
class Atom:
    signal: str
    offset: int  # 0 (this step) or -1 (previous step)
    relation: str
    value: int | float

    def __post_init__(self) -> None:
        if self.offset not in (0, -1):
            raise ValueError(f"offset must be 0 or -1, got {self.offset}")
        if self.relation not in (EQ, NE):
            raise ValueError(f"relation must be '=' or '!=', got {self.relation!r}")

    def holds(self, x: object) -> bool:
        # an unknown value satisfies neither = nor !=
        if x is UNDEF:
            return False
        return x == self.value if self.relation == EQ else x != self.value

    def __str__(self) -> str:
        when = "t" if self.offset == 0 else "t-1"
        return f"{self.signal}({when}){self.relation}{self.value}"

    def to_json(self) -> dict:
        return {"sig": self.signal, "off": self.offset, "rel": self.relation, "val": self.value}


@dataclass(frozen=True, order=True)
class Literal:
    signal: str = "bad_move"
    offset: int = 1
    value: int | float = 1

    def __str__(self) -> str:
        return f"{self.signal}(t+{self.offset})={self.value}"

    def to_json(self) -> dict:
        return {"sig": self.signal, "off": self.offset, "val": self.value}


BAD_MOVE = Literal()


@dataclass(frozen=True)
class Implication:
    antecedent: frozenset
    consequent: Literal = BAD_MOVE
    support: int = 0
    violations: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", frozenset(self.antecedent))
        if not self.antecedent:
            raise ValueError("an implication needs at least one atom")
        if not self.support >= self.violations >= 0:
            raise ValueError(f"need support >= violations >= 0, got {self.support}, {self.violations}")

    @property
    def violation_rate(self) -> float:
        return self.violations / self.support if self.support else 0.0

    def atoms(self) -> list[Atom]:
        return sorted(self.antecedent)

    def __str__(self) -> str:
        lhs = ", ".join(str(a) for a in self.atoms())
        return f"{lhs} => {self.consequent}  [support={self.support}, violations={self.violations}]"

    def to_json(self) -> dict:
        return {
            "if": [a.to_json() for a in self.atoms()],
            "then": self.consequent.to_json(),
            "support": self.support,
            "violations": self.violations,
        }

    @classmethod
    def from_json(cls, doc: dict) -> Implication:
        atoms = frozenset(Atom(a["sig"], a["off"], a["rel"], a["val"]) for a in doc["if"])
        then = doc["then"]
        return cls(atoms, Literal(then["sig"], then["off"], then["val"]), doc["support"], doc["violations"])


@dataclass(frozen=True)
class Window:
    """What the device knows when choosing a move at time t."""

    schema: VectorSchema
    inputs: tuple
    prev_inputs: tuple | None = None
    prev_output: tuple | None = None
    prev_reward: tuple | None = None


def window_env(window: Window, candidate: tuple) -> dict:
    """Map ``(signal, offset)`` to its value for one (window, candidate) pair."""
    schema = window.schema
    env = {}
    for part, now, before in (
        (schema.inputs, window.inputs, window.prev_inputs),
        (schema.outputs, candidate, window.prev_output),
        (schema.rewards, None, window.prev_reward),
    ):
        for i, spec in enumerate(part):
            if now is not None:
                env[(spec.name, 0)] = now[i]
            env[(spec.name, -1)] = UNDEF if before is None else before[i]
    return env


def life_window(life: Life, t: int) -> Window:
    if t == 0:
        return Window(life.schema, life.resolved_inputs(0))
    prev = life.steps[t - 1]
    return Window(
        life.schema, life.resolved_inputs(t), life.resolved_inputs(t - 1), prev.output, prev.reward
    )


def _examples(life: Life) -> Iterator[tuple[int, dict, bool]]:
    """Yield ``(t, env, refused)`` for every accepted and refused output."""
    for step in life.steps:
        window = life_window(life, step.t)
        yield step.t, window_env(window, step.output), False
        for bad in step.incorrect:
            yield step.t, window_env(window, bad), True


def _check_signals(schema: VectorSchema, imp: Implication) -> None:
    known = {s.name for s in schema.all_signals}
    for atom in imp.antecedent:
        if atom.signal not in known:
            raise UnknownSignal(atom.signal)
    if imp.consequent.signal != "bad_move" and imp.consequent.signal not in known:
        raise UnknownSignal(imp.consequent.signal)


def evaluate_implication(imp: Implication, life: Life) -> tuple[int, int]:
    """Recount ``(support, violations)`` by scanning every example."""
    _check_signals(life.schema, imp)
    support = violations = 0
    if imp.consequent.signal == "bad_move":
        for _, env, refused in _examples(life):
            if all(a.holds(env[(a.signal, a.offset)]) for a in imp.antecedent):
                support += 1
                if refused != bool(imp.consequent.value):
                    violations += 1
        return support, violations
    # next-input consequent: accepted moves that have a following step
    idx = [s.name for s in life.schema.inputs].index(imp.consequent.signal)
    for step in life.steps[:-1]:
        env = window_env(life_window(life, step.t), step.output)
        if all(a.holds(env[(a.signal, a.offset)]) for a in imp.antecedent):
            support += 1
            if life.resolved_inputs(step.t + 1)[idx] != imp.consequent.value:
                violations += 1
    return support, violations


def candidate_atoms(life: Life, include_rewards: bool = False) -> list[Atom]:
    """Atom universe for ``life``: every signal, both offsets, both relations.

    Finite signals range over their whole kind; unbounded ones over values
    actually seen. Boolean signals only get ``=`` since ``!=`` duplicates it.
    """
    schema = life.schema
    parts = [(schema.inputs, (0, -1)), (schema.outputs, (0, -1))]
    if include_rewards:
        parts.append((schema.rewards, (-1,)))
    seen: dict[str, set] = {}
    for step in life.steps:
        for part, vec in ((schema.inputs, step.input), (schema.outputs, step.output), (schema.rewards, step.reward)):
            for spec, v in zip(part, vec):
                if isinstance(v, (int, float)):
                    seen.setdefault(spec.name, set()).add(v)
    atoms = []
    for specs, offsets in parts:
        for spec in specs:
            if spec.kind.is_finite:
                values = list(spec.kind.values())
            else:
                values = sorted(seen.get(spec.name, ()))
            relations = (EQ,) if spec.kind.cardinality == 2 else (EQ, NE)
            for off in offsets:
                for rel in relations:
                    atoms.extend(Atom(spec.name, off, rel, v) for v in values)
    return atoms


@dataclass
class _Target:
    consequent: Literal
    universe: int  # examples this consequent is judged on
    positive: int  # examples where it holds


def _popcount(x: int) -> int:
    return x.bit_count()


def mine_implications(
    life: Life,
    max_atoms: int = 2,
    min_support: int = 20,
    max_violation_rate: float = 0.0,
    include_rewards: bool = False,
    next_inputs: bool = False,
) -> list[Implication]:
    """Shortest implications predicting ``bad_move`` (and, experimentally,
    next-step input values) that meet the support and violation thresholds.

    Non-minimal rules, whose antecedent strictly contains another reported
    antecedent for the same consequent, are dropped. The result is sorted by
    atom count, violation rate, then descending support.
    """
    if not life.steps:
        raise EmptyLife("cannot mine an empty life")
    if max_atoms < 1:
        raise ValueError("max_atoms must be >= 1")

    atoms = candidate_atoms(life, include_rewards)
    keys = [(a.signal, a.offset) for a in atoms]
    masks = [0] * len(atoms)
    accepted_with_next = 0
    bad_universe = bad_positive = 0
    next_value: dict[tuple[str, object], int] = {}
    input_names = [s.name for s in life.schema.inputs]
    last_t = len(life.steps) - 1

    for bit_i, (t, env, refused) in enumerate(_examples(life)):
        bit = 1 << bit_i
        for j, atom in enumerate(atoms):
            if atom.holds(env[keys[j]]):
                masks[j] |= bit
        bad_universe |= bit
        if refused:
            bad_positive |= bit
        elif next_inputs and t < last_t:
            accepted_with_next |= bit
            for name, v in zip(input_names, life.resolved_inputs(t + 1)):
                if v is not UNDEF:
                    next_value[(name, v)] = next_value.get((name, v), 0) | bit

    targets = [_Target(BAD_MOVE, bad_universe, bad_positive)]
    for (name, v), mask in sorted(next_value.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        targets.append(_Target(Literal(name, 1, v), accepted_with_next, mask))

    found: list[Implication] = []
    for target in targets:
        survivors = []

        def extend(start: int, chosen: tuple, mask: int) -> None:
            for j in range(start, len(atoms)):
                m = mask & masks[j]
                support = _popcount(m)
                if support < min_support or support == 0:
                    continue  # supersets only shrink support
                combo = chosen + (j,)
                violations = support - _popcount(m & target.positive)
                if violations <= max_violation_rate * support:
                    survivors.append((combo, support, violations))
                if len(combo) < max_atoms:
                    extend(j + 1, combo, m)

        extend(0, (), target.universe)
        kept: list[frozenset] = []
        for combo, support, violations in sorted(survivors, key=lambda s: len(s[0])):
            ante = frozenset(atoms[j] for j in combo)
            if any(k < ante for k in kept):
                continue
            kept.append(ante)
            found.append(Implication(ante, target.consequent, support, violations))

    found.sort(
        key=lambda imp: (
            len(imp.antecedent),
            imp.violation_rate,
            -imp.support,
            str(imp.consequent),
            [str(a) for a in imp.atoms()],
        )
    )
    return found


def predict_incorrect(imps: Iterable[Implication], window: Window, candidate: tuple) -> bool:
    """True if some exception-free ``bad_move`` rule fires on this candidate."""
    env = None
    for imp in imps:
        if imp.violations or imp.consequent.signal != "bad_move" or not imp.consequent.value:
            continue
        if env is None:
            env = window_env(window, candidate)
        if all(a.holds(env.get((a.signal, a.offset), UNDEF)) for a in imp.antecedent):
            return True
    return False


def dump_rules(imps: Sequence[Implication]) -> str:
    return "".join(json.dumps(imp.to_json(), sort_keys=True) + "\n" for imp in imps)


def load_rules(text: str) -> list[Implication]:
    return [Implication.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]

