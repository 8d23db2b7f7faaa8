"""Scalar kinds, signal values and vector schemas.

Concrete values are plain Python ``int`` / ``float``. The two special symbols
are enum members so they can never compare equal to a number::

    >>> NOTHING == 0
    False

For non-reward signals Nothing is folded into zero on validation; for reward
signals it stays symbolic and is excluded from success means.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Any, Iterable, Sequence, Union

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class Special(enum.Enum):
    UNDEF = "Undef"
    NOTHING = "Nothing"

    def __repr__(self) -> str:
        return self.value


UNDEF = Special.UNDEF
NOTHING = Special.NOTHING

Value = Union[int, float, Special]
Vector = tuple  # tuple[Value, ...], ordered like the schema part it belongs to


class SignalError(ValueError):
    """Base class for value/schema conformance failures."""


class KindMismatch(SignalError):
    pass


class ForbiddenUndef(SignalError):
    pass


class ForbiddenNothing(SignalError):
    pass


class SchemaError(SignalError):
    pass


class Role(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    REWARD = "reward"
    INTERNAL = "internal"


@dataclass(frozen=True)
class ScalarKind:
    """Declared value domain of a signal.

    ``name`` is one of ``bool``, ``finite``, ``int``, ``real``; ``k`` is the
    cardinality for finite kinds (values ``0..k-1``) and ``None`` otherwise.
    """

    name: str
    k: int | None = None

    def __post_init__(self) -> None:
        if self.name not in ("bool", "finite", "int", "real"):
            raise SchemaError(f"unknown kind {self.name!r}")
        if self.name == "finite":
            if not isinstance(self.k, int) or self.k < 1:
                raise SchemaError(f"finite kind needs cardinality k >= 1, got {self.k!r}")
        elif self.k is not None:
            raise SchemaError(f"kind {self.name!r} takes no cardinality")

    @property
    def cardinality(self) -> int | None:
        if self.name == "bool":
            return 2
        return self.k if self.name == "finite" else None

    @property
    def is_finite(self) -> bool:
        return self.cardinality is not None

    def values(self) -> range:
        if not self.is_finite:
            raise KindMismatch(f"kind {self.name!r} has no finite value set")
        return range(self.cardinality)

    def __str__(self) -> str:
        return f"finite({self.k})" if self.name == "finite" else self.name


BOOL = ScalarKind("bool")
INT = ScalarKind("int")
REAL = ScalarKind("real")


def finite(k: int) -> ScalarKind:
    return ScalarKind("finite", k)


@dataclass(frozen=True)
class SignalSpec:
    name: str
    kind: ScalarKind
    role: Role
    allows_undef: bool = False
    allows_nothing: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "role", Role(self.role))
        if not self.name or not self.name.isidentifier():
            raise SchemaError(f"bad signal name {self.name!r}")
        if self.role is Role.OUTPUT and self.allows_undef:
            raise SchemaError(f"output signal {self.name!r} cannot allow Undef")
        if self.role is Role.REWARD:
            if not self.allows_nothing:
                raise SchemaError(f"reward signal {self.name!r} must allow Nothing")
            if self.allows_undef:
                # rewards are either Nothing or concrete
                raise SchemaError(f"reward signal {self.name!r} cannot allow Undef")

    @property
    def reward_max(self) -> int:
        """Top of the ``[0, k]`` success range for a reward signal."""
        if self.kind.cardinality is None:
            raise KindMismatch(f"{self.name!r} is not a bounded reward signal")
        return self.kind.cardinality - 1


def input_signal(name: str, kind: ScalarKind, **kw: Any) -> SignalSpec:
    return SignalSpec(name, kind, Role.INPUT, **kw)


def output_signal(name: str, kind: ScalarKind, **kw: Any) -> SignalSpec:
    return SignalSpec(name, kind, Role.OUTPUT, **kw)


def reward_signal(name: str, top: int) -> SignalSpec:
    """Reward signal over ``{Nothing, 0, ..., top}``."""
    return SignalSpec(name, finite(top + 1), Role.REWARD, allows_nothing=True)


def _check_concrete(spec: SignalSpec, value: Any) -> int | float:
    kind = spec.kind
    if kind.name == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise KindMismatch(f"{spec.name}: {value!r} is not a real")
        value = float(value)
        if math.isnan(value):
            raise KindMismatch(f"{spec.name}: NaN is not a signal value")
        return value
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int):
        raise KindMismatch(f"{spec.name}: {value!r} is not an integer")
    value = int(value)  # bool -> int
    if kind.name == "int":
        if not INT64_MIN <= value <= INT64_MAX:
            raise KindMismatch(f"{spec.name}: {value} overflows int64")
        return value
    if not 0 <= value < kind.cardinality:
        raise KindMismatch(f"{spec.name}: {value} outside 0..{kind.cardinality - 1}")
    return value


def validate_value(spec: SignalSpec, value: Any) -> Value:
    """Check ``value`` against ``spec`` and return its canonical form.

    Nothing becomes zero on non-reward signals. Booleans become ``0``/``1``.

    Raises:
        ForbiddenUndef: Undef on an output or reward signal, or on an input
            that does not allow it.
        ForbiddenNothing: Nothing where ``allows_nothing`` is false.
        KindMismatch: the scalar is outside the declared kind.
    """
    if value is UNDEF:
        if spec.role is Role.INTERNAL or spec.allows_undef:
            return UNDEF
        raise ForbiddenUndef(f"{spec.name}: Undef not allowed on {spec.role.value} signal")
    if value is NOTHING:
        if not spec.allows_nothing:
            raise ForbiddenNothing(f"{spec.name}: Nothing not allowed")
        if spec.role is Role.REWARD:
            return NOTHING
        return 0.0 if spec.kind.name == "real" else 0
    return _check_concrete(spec, value)


def validate_vector(specs: Sequence[SignalSpec], values: Iterable[Any]) -> tuple:
    values = tuple(values)
    if len(values) != len(specs):
        raise SchemaError(f"vector has {len(values)} coordinates, schema has {len(specs)}")
    return tuple(validate_value(s, v) for s, v in zip(specs, values))


def nothing_vector(specs: Sequence[SignalSpec]) -> tuple:
    return tuple(validate_value(s, NOTHING) for s in specs)


@dataclass(frozen=True)
class SignalSeries:
    spec: SignalSpec
    values: tuple

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", tuple(validate_value(self.spec, v) for v in self.values)
        )

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, t: int) -> Value:
        return self.values[t]


def shift_signal(series: SignalSeries, k: int) -> SignalSeries:
    """Memory of ``series``: the value it had ``k`` steps ago.

    Times before birth read as Undef.
    """
    if k < 1:
        raise ValueError(f"shift must be >= 1, got {k}")
    spec = replace(
        series.spec, name=f"{series.spec.name}_prev{k}", role=Role.INTERNAL, allows_undef=True
    )
    n = len(series.values)
    shifted = (UNDEF,) * min(k, n) + series.values[: max(n - k, 0)]
    return SignalSeries(spec, shifted)


@dataclass(frozen=True)
class VectorSchema:
    inputs: tuple[SignalSpec, ...] = ()
    outputs: tuple[SignalSpec, ...] = ()
    rewards: tuple[SignalSpec, ...] = ()  # index 0 = highest priority

    def __post_init__(self) -> None:
        for part, role in (("inputs", Role.INPUT), ("outputs", Role.OUTPUT), ("rewards", Role.REWARD)):
            specs = tuple(getattr(self, part))
            object.__setattr__(self, part, specs)
            for s in specs:
                if s.role is not role:
                    raise SchemaError(f"{s.name!r} has role {s.role.value}, listed under {part}")
        names = [s.name for s in self.all_signals]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise SchemaError(f"duplicate signal names: {sorted(dupes)}")

    @property
    def priority_count(self) -> int:
        return len(self.rewards)

    @property
    def all_signals(self) -> tuple[SignalSpec, ...]:
        return self.inputs + self.outputs + self.rewards

    def signal(self, name: str) -> SignalSpec:
        for s in self.all_signals:
            if s.name == name:
                return s
        raise KeyError(name)

    def output_space_size(self) -> int | None:
        size = 1
        for s in self.outputs:
            if not s.kind.is_finite:
                return None
            size *= s.kind.cardinality
        return size

    def to_json(self) -> dict:
        def spec_doc(s: SignalSpec) -> dict:
            doc = {"name": s.name, "kind": s.kind.name}
            if s.kind.name == "finite":
                doc["k"] = s.kind.k
            doc["allows_undef"] = s.allows_undef
            doc["allows_nothing"] = s.allows_nothing
            return doc

        return {
            "inputs": [spec_doc(s) for s in self.inputs],
            "outputs": [spec_doc(s) for s in self.outputs],
            "rewards": [spec_doc(s) for s in self.rewards],
        }

    @classmethod
    def from_json(cls, doc: dict) -> VectorSchema:
        def parse(items: list, role: Role) -> tuple[SignalSpec, ...]:
            specs = []
            for item in items:
                try:
                    kind = ScalarKind(item["kind"], item.get("k"))
                    specs.append(
                        SignalSpec(
                            item["name"],
                            kind,
                            role,
                            allows_undef=bool(item.get("allows_undef", False)),
                            allows_nothing=bool(item.get("allows_nothing", True)),
                        )
                    )
                except (KeyError, TypeError) as exc:
                    raise SchemaError(f"malformed signal entry {item!r}") from exc
            return tuple(specs)

        return cls(
            inputs=parse(doc.get("inputs", []), Role.INPUT),
            outputs=parse(doc.get("outputs", []), Role.OUTPUT),
            rewards=parse(doc.get("rewards", []), Role.REWARD),
        )
