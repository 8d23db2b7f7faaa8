"""JSON-lines life traces.

Line 1 is a header ``{"version", "schema", "metadata"}``. Then one line per
accepted step, then revision lines, an optional death line, and an end marker
carrying the step count so a file cut at a line boundary is still caught.
Keys are sorted and separators fixed, so equal lives give byte-identical
files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .life import DeathReport, Life, Revision, Step
from .signals import NOTHING, UNDEF, SignalError, VectorSchema, validate_vector

FORMAT_VERSION = 1


class TraceError(Exception):
    pass


class FormatVersionMismatch(TraceError):
    pass


class CorruptTrace(TraceError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


_NONFINITE = {"inf": math.inf, "-inf": -math.inf}


def encode_value(v: Any) -> Any:
    if v is UNDEF or v is NOTHING:
        return v.value
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def decode_value(v: Any) -> Any:
    if v == UNDEF.value:
        return UNDEF
    if v == NOTHING.value:
        return NOTHING
    if v in _NONFINITE:
        return _NONFINITE[v]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return v
    raise ValueError(f"not a signal value: {v!r}")


def _vec(values: tuple) -> list:
    return [encode_value(v) for v in values]


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def life_to_lines(life: Life) -> list[str]:
    lines = [
        _dumps({"version": FORMAT_VERSION, "schema": life.schema.to_json(), "metadata": life.metadata})
    ]
    for s in life.steps:
        lines.append(
            _dumps(
                {
                    "t": s.t,
                    "in": _vec(s.input),
                    "bad": [_vec(o) for o in s.incorrect],
                    "out": _vec(s.output),
                    "rew": _vec(s.reward),
                }
            )
        )
    for r in life.revisions:
        lines.append(
            _dumps({"revision": {"t": r.t, "signal": r.signal, "old": encode_value(r.old), "new": encode_value(r.new)}})
        )
    if life.death is not None:
        lines.append(_dumps({"death": True, "t": life.death.t, "tried": life.death.tried}))
    lines.append(_dumps({"end": True, "steps": len(life.steps), "revisions": len(life.revisions)}))
    return lines


def dumps_life(life: Life) -> str:
    return "".join(line + "\n" for line in life_to_lines(life))


def write_trace(life: Life, path: str | Path) -> None:
    Path(path).write_text(dumps_life(life), encoding="utf-8")


def loads_life(text: str) -> Life:
    lines = text.splitlines()
    if not lines:
        raise CorruptTrace(1, "empty trace")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptTrace(1, f"bad header: {exc}") from exc
    if not isinstance(header, dict) or "version" not in header:
        raise CorruptTrace(1, "header has no version")
    if header["version"] != FORMAT_VERSION:
        raise FormatVersionMismatch(f"trace version {header['version']!r}, reader knows {FORMAT_VERSION}")
    try:
        schema = VectorSchema.from_json(header["schema"])
    except (KeyError, SignalError, TypeError) as exc:
        raise CorruptTrace(1, f"bad schema: {exc}") from exc
    life = Life(schema, metadata=header.get("metadata", {}))

    ended = False
    for lineno, raw in enumerate(lines[1:], start=2):
        if ended:
            raise CorruptTrace(lineno, "content after end marker")
        try:
            doc = json.loads(raw)
            if "end" in doc:
                if doc["steps"] != len(life.steps) or doc["revisions"] != len(life.revisions):
                    raise ValueError(
                        f"end marker counts {doc['steps']} steps / {doc['revisions']} revisions, "
                        f"read {len(life.steps)} / {len(life.revisions)}"
                    )
                ended = True
            elif "revision" in doc:
                r = doc["revision"]
                life.revisions.append(
                    Revision(r["t"], r["signal"], decode_value(r["new"]), decode_value(r["old"]))
                )
            elif "death" in doc:
                life.death = DeathReport(doc["t"], doc.get("tried", 0))
            else:
                life.append(
                    Step(
                        doc["t"],
                        validate_vector(schema.inputs, map(decode_value, doc["in"])),
                        tuple(validate_vector(schema.outputs, map(decode_value, o)) for o in doc["bad"]),
                        validate_vector(schema.outputs, map(decode_value, doc["out"])),
                        validate_vector(schema.rewards, map(decode_value, doc["rew"])),
                    )
                )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptTrace(lineno, str(exc)) from exc
    if not ended:
        raise CorruptTrace(len(lines) + 1, "missing end marker (truncated trace)")
    return life


def read_trace(path: str | Path) -> Life:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptTrace(1, f"not UTF-8: {exc}") from exc
    return loads_life(text)
