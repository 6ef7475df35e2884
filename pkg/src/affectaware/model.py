"""Complex activity definitions: types, file parsing, validation.

A complex activity is a list of numbered steps. Each step pairs an atomic
activity with the context attribute it is performed on, and both carry a
weight. An occurrence counts as successful when its accumulated weight
reaches the activity's threshold.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

WEIGHT_TOL = 1e-6


class DefinitionError(ValueError):
    """Raised when a definition file cannot be parsed or fails validation."""

    def __init__(self, message: str, *, field: str | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column


@dataclass(frozen=True)
class AtomicActivityDef:
    id: int
    label: str
    weight: float


@dataclass(frozen=True)
class ContextAttributeDef:
    id: int
    label: str
    weight: float


@dataclass(frozen=True)
class ComplexActivityDef:
    name: str
    code: str
    threshold: float
    steps: tuple[tuple[AtomicActivityDef, ContextAttributeDef], ...]
    core_ids: frozenset[int]
    start_ids: frozenset[int]
    end_ids: frozenset[int]

    @property
    def step_ids(self) -> tuple[int, ...]:
        return tuple(a.id for a, _ in self.steps)

    def atomic_weight(self, step_id: int) -> float:
        return self._weights()[step_id][0]

    def context_weight(self, step_id: int) -> float:
        return self._weights()[step_id][1]

    def _weights(self) -> dict[int, tuple[float, float]]:
        # frozen dataclass: cache lazily through object.__setattr__
        cache = self.__dict__.get("_wcache")
        if cache is None:
            cache = {a.id: (a.weight, c.weight) for a, c in self.steps}
            object.__setattr__(self, "_wcache", cache)
        return cache


@dataclass(frozen=True)
class Violation:
    rule: str
    field: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


@dataclass(frozen=True)
class ValidationReport:
    code: str
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_definition(d: ComplexActivityDef) -> ValidationReport:
    """Check every structural invariant of a definition.

    Violations are returned as data; nothing is raised.
    """
    out: list[Violation] = []
    if not (0.0 < d.threshold <= 1.0):
        out.append(Violation("threshold must be in (0,1]", "threshold"))
    if not d.steps:
        out.append(Violation("at least one step required", "steps"))

    ids = [a.id for a, _ in d.steps]
    if len(set(ids)) != len(ids):
        out.append(Violation("step ids must be unique", "steps.id"))
    for a, c in d.steps:
        if a.id != c.id:
            out.append(Violation(f"step {a.id} atomic/context ids differ", "steps.id"))
        if a.id < 1:
            out.append(Violation(f"step id {a.id} must be >= 1", "steps.id"))
        if not (0.0 <= a.weight <= 1.0):
            out.append(Violation(f"step {a.id} weight must be in [0,1]", "steps.atomic_weight"))
        if not (0.0 <= c.weight <= 1.0):
            out.append(Violation(f"step {c.id} weight must be in [0,1]", "steps.context_weight"))

    if d.steps:
        aw = math.fsum(a.weight for a, _ in d.steps)
        cw = math.fsum(c.weight for _, c in d.steps)
        if abs(aw - 1.0) > WEIGHT_TOL:
            out.append(Violation(f"atomic weights must sum to 1 (got {aw:.6g})", "steps.atomic_weight"))
        if abs(cw - 1.0) > WEIGHT_TOL:
            out.append(Violation(f"context weights must sum to 1 (got {cw:.6g})", "steps.context_weight"))

    known = set(ids)
    for name, subset, label in (("core_ids", d.core_ids, "core"),
                                ("start_ids", d.start_ids, "start"),
                                ("end_ids", d.end_ids, "end")):
        if not subset:
            out.append(Violation(f"{label} set nonempty", name))
        elif not subset <= known:
            extra = ",".join(str(i) for i in sorted(subset - known))
            out.append(Violation(f"{label} set references unknown step ids {extra}", name))
    if d.start_ids & d.end_ids:
        out.append(Violation("start and end sets must be disjoint", "start_ids/end_ids"))
    return ValidationReport(d.code, tuple(out))


_TOP_KEYS = ("code", "name", "threshold", "steps", "core_ids", "start_ids", "end_ids")
_STEP_KEYS = ("id", "atomic_label", "atomic_weight", "context_label", "context_weight")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise DefinitionError(f"{where}: missing field {key!r}", field=key)
    return obj[key]


def _number(value, where: str, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DefinitionError(f"{where}: field {key!r} must be a number", field=key)
    return float(value)


def _id_list(value, where: str, key: str) -> frozenset[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise DefinitionError(f"{where}: field {key!r} must be a list of integers", field=key)
    return frozenset(value)


def definition_from_dict(obj: dict, where: str = "definition") -> ComplexActivityDef:
    if not isinstance(obj, dict):
        raise DefinitionError(f"{where}: expected an object")
    for key in _TOP_KEYS:
        _require(obj, key, where)
    code = obj["code"]
    if not isinstance(code, str) or not code:
        raise DefinitionError(f"{where}: field 'code' must be a nonempty string", field="code")
    where = f"definition {code}"
    if not isinstance(obj["name"], str):
        raise DefinitionError(f"{where}: field 'name' must be a string", field="name")
    if not isinstance(obj["steps"], list):
        raise DefinitionError(f"{where}: field 'steps' must be a list", field="steps")

    steps = []
    for k, s in enumerate(obj["steps"]):
        sw = f"{where} step #{k + 1}"
        if not isinstance(s, dict):
            raise DefinitionError(f"{sw}: expected an object", field="steps")
        for key in _STEP_KEYS:
            _require(s, key, sw)
        sid = s["id"]
        if not isinstance(sid, int) or isinstance(sid, bool):
            raise DefinitionError(f"{sw}: field 'id' must be an integer", field="id")
        steps.append((
            AtomicActivityDef(sid, str(s["atomic_label"]), _number(s["atomic_weight"], sw, "atomic_weight")),
            ContextAttributeDef(sid, str(s["context_label"]), _number(s["context_weight"], sw, "context_weight")),
        ))
    return ComplexActivityDef(
        name=obj["name"],
        code=code,
        threshold=_number(obj["threshold"], where, "threshold"),
        steps=tuple(steps),
        core_ids=_id_list(obj["core_ids"], where, "core_ids"),
        start_ids=_id_list(obj["start_ids"], where, "start_ids"),
        end_ids=_id_list(obj["end_ids"], where, "end_ids"),
    )


def parse_definitions(source: bytes | str, *, validate: bool = True) -> list[ComplexActivityDef]:
    """Parse a definition file (a JSON list of activity objects).

    With ``validate`` set, the first invariant violation is raised as a
    :class:`DefinitionError` naming the failing field.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise DefinitionError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}",
                              line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, list):
        raise DefinitionError("top level must be a list of definitions")
    defs = [definition_from_dict(obj, f"definition #{i + 1}") for i, obj in enumerate(doc)]
    if validate:
        for d in defs:
            report = validate_definition(d)
            if not report.ok:
                v = report.violations[0]
                raise DefinitionError(f"definition {d.code}: {v.rule}", field=v.field)
    return defs


def definition_to_dict(d: ComplexActivityDef) -> dict:
    return {
        "code": d.code,
        "name": d.name,
        "threshold": d.threshold,
        "steps": [
            {"id": a.id, "atomic_label": a.label, "atomic_weight": a.weight,
             "context_label": c.label, "context_weight": c.weight}
            for a, c in d.steps
        ],
        "core_ids": sorted(d.core_ids),
        "start_ids": sorted(d.start_ids),
        "end_ids": sorted(d.end_ids),
    }


def serialize_definitions(defs: Iterable[ComplexActivityDef]) -> str:
    return json.dumps([definition_to_dict(d) for d in defs], indent=2) + "\n"


BUNDLED = (
    "grooming", "desk_work", "socializing", "drinks", "shopping", "indoor_games",
    "making_meals", "cooking", "washing_machine", "office_work", "watching_tv",
    "making_breakfast",
)


def bundled_path(name: str):
    return resources.files("affectaware") / "data" / "definitions" / f"{name}.json"


def load_bundled(names: Iterable[str] = BUNDLED) -> list[ComplexActivityDef]:
    defs: list[ComplexActivityDef] = []
    for name in names:
        defs.extend(parse_definitions(bundled_path(name).read_bytes()))
    return defs


class Registry:
    """Code-indexed collection of definitions, in registration order."""

    def __init__(self, defs: Iterable[ComplexActivityDef] = ()):
        self._defs: dict[str, ComplexActivityDef] = {}
        for d in defs:
            self.add(d)

    def add(self, d: ComplexActivityDef) -> None:
        if d.code in self._defs:
            raise DefinitionError(f"duplicate activity code {d.code!r}", field="code")
        self._defs[d.code] = d

    def __getitem__(self, code: str) -> ComplexActivityDef:
        try:
            return self._defs[code]
        except KeyError:
            raise KeyError(f"unknown activity code {code!r}") from None

    def __contains__(self, code: object) -> bool:
        return code in self._defs

    def __iter__(self):
        return iter(self._defs.values())

    def __len__(self) -> int:
        return len(self._defs)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(self._defs)
