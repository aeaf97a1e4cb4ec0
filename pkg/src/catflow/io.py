"""JSON model files.

A model file is ``{"format_version": 1, "kind": ..., "body": ...}`` with an
optional ``"provenance"`` object. Diagram bodies mirror the table encoding:
one array per schema object, one row object per part, keyed by morphism
and attribute names, indices 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, Optional

from .acset import ACSet, Homomorphism, Schema, check_value
from .composition import OpenDiagram, promote
from .errors import ModelFormatError, SchemaError
from .schemas import INTERFACES, SCHEMAS, kind_of
from .semantics.ode import Scenario

FORMAT_VERSION = 1
DIAGRAM_KINDS = ("cld", "ssd", "sfd")
OPEN_KINDS = tuple("open-" + k for k in DIAGRAM_KINDS)
KINDS = DIAGRAM_KINDS + OPEN_KINDS + ("typing", "scenario")
_TOP_KEYS = {"format_version", "kind", "body", "provenance"}


@dataclass
class ModelFile:
    kind: str
    body: Any  # ACSet | OpenDiagram | dict of components | Scenario
    provenance: Optional[dict] = None


def _fail(msg):
    raise ModelFormatError(msg)


def _expect(obj, typ, where):
    if not isinstance(obj, typ):
        _fail(f"{where}: expected {typ.__name__}, got {type(obj).__name__}")
    return obj


def _check_keys(obj: dict, allowed, where, required=()):
    extra = set(obj) - set(allowed)
    if extra:
        _fail(f"{where}: unknown keys {sorted(extra)}")
    missing = [k for k in required if k not in obj]
    if missing:
        _fail(f"{where}: missing keys {missing}")


# -- instances -----------------------------------------------------------------

def instance_to_body(inst: ACSet) -> Dict[str, list]:
    schema = inst.schema
    body = {}
    for ob in schema.objects:
        cols = schema.columns(ob)
        body[ob] = [{c: inst._cols[c][i] for c in cols} for i in range(inst.nparts(ob))]
    return body


def body_to_instance(schema: Schema, body, where="body") -> ACSet:
    """Rebuild an instance. Index ranges are *not* checked here so that
    ``validate`` can report them; wrong value types are format errors."""
    _expect(body, dict, where)
    _check_keys(body, schema.objects, where)
    inst = ACSet(schema)
    for ob in schema.objects:
        rows = _expect(body.get(ob, []), list, f"{where}.{ob}")
        cols = schema.columns(ob)
        inst.add_parts(ob, len(rows))
        for i, row in enumerate(rows):
            rw = f"{where}.{ob}[{i + 1}]"
            _expect(row, dict, rw)
            _check_keys(row, cols, rw)
            for c, v in row.items():
                if v is None:
                    continue
                if schema.has_hom(c):
                    if isinstance(v, bool) or not isinstance(v, int):
                        _fail(f"{rw}.{c}: expected an integer index, got {v!r}")
                    inst._cols[c][i] = v
                else:
                    try:
                        inst._cols[c][i] = check_value(schema, c, v)
                    except SchemaError as exc:
                        _fail(f"{rw}: {exc}")
    return inst


def _components_to_json(h: Homomorphism, objects) -> Dict[str, list]:
    return {ob: list(h.components[ob]) for ob in objects}


def _components_from_json(obj, objects, where) -> Dict[str, tuple]:
    _expect(obj, dict, where)
    _check_keys(obj, objects, where)
    out = {}
    for ob in objects:
        vals = _expect(obj.get(ob, []), list, f"{where}.{ob}")
        for v in vals:
            if isinstance(v, bool) or not isinstance(v, int):
                _fail(f"{where}.{ob}: expected integer indices")
        out[ob] = tuple(vals)
    return out


# -- open diagrams -------------------------------------------------------------

def open_to_body(od: OpenDiagram) -> dict:
    return {
        "apex": instance_to_body(od.apex),
        "feet": [instance_to_body(f) for f in od.feet],
        "legs": [_components_to_json(l, f.schema.objects) for f, l in zip(od.feet, od.legs)],
    }


def body_to_open(kind: str, body) -> OpenDiagram:
    _expect(body, dict, "body")
    _check_keys(body, ("apex", "feet", "legs"), "body", required=("apex", "feet", "legs"))
    apex = body_to_instance(SCHEMAS[kind], body["apex"], "body.apex")
    feet_json = _expect(body["feet"], list, "body.feet")
    legs_json = _expect(body["legs"], list, "body.legs")
    if len(feet_json) != len(legs_json):
        _fail("body: one leg per foot is required")
    feet, legs = [], []
    for k, (fj, lj) in enumerate(zip(feet_json, legs_json)):
        foot = body_to_instance(INTERFACES[kind], fj, f"body.feet[{k}]")
        comps = _components_from_json(lj, foot.schema.objects, f"body.legs[{k}]")
        src = promote(foot, apex.schema)
        feet.append(foot)
        legs.append(Homomorphism(src, apex, comps))
    try:
        return OpenDiagram(apex, feet, legs)
    except SchemaError as exc:
        _fail(str(exc))


# -- files ---------------------------------------------------------------------

def model_kind(body) -> str:
    if isinstance(body, ACSet):
        return kind_of(body.schema)
    if isinstance(body, OpenDiagram):
        return "open-" + kind_of(body.apex.schema)
    if isinstance(body, Scenario):
        return "scenario"
    if isinstance(body, Homomorphism):
        return "typing"
    raise TypeError(f"cannot serialize {type(body).__name__}")


def to_json_obj(mf: ModelFile) -> dict:
    kind, body = mf.kind, mf.body
    if kind in DIAGRAM_KINDS:
        jbody = instance_to_body(body)
    elif kind in OPEN_KINDS:
        jbody = open_to_body(body)
    elif kind == "scenario":
        jbody = body.to_json()
    elif kind == "typing":
        comps = body.components if isinstance(body, Homomorphism) else body
        jbody = {"components": {ob: list(c) for ob, c in comps.items()}}
    else:
        raise ModelFormatError(f"unknown kind {kind!r}")
    out = {"format_version": FORMAT_VERSION, "kind": kind, "body": jbody}
    if mf.provenance is not None:
        out["provenance"] = mf.provenance
    return out


def dumps(mf: ModelFile) -> str:
    return json.dumps(to_json_obj(mf), indent=2, ensure_ascii=False) + "\n"


def _scenario_from_json(body) -> Scenario:
    _expect(body, dict, "body")
    _check_keys(body, ("stocks", "params", "t0", "tf", "dt"), "body", required=("stocks", "params", "t0", "tf", "dt"))
    for key in ("stocks", "params"):
        for name, v in _expect(body[key], dict, f"body.{key}").items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                _fail(f"body.{key}.{name}: expected a number")
    for key in ("t0", "tf", "dt"):
        if isinstance(body[key], bool) or not isinstance(body[key], (int, float)):
            _fail(f"body.{key}: expected a number")
    return Scenario.from_json(body)


def loads(text: str) -> ModelFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    _expect(obj, dict, "model file")
    _check_keys(obj, _TOP_KEYS, "model file", required=("format_version", "kind", "body"))
    if obj["format_version"] != FORMAT_VERSION:
        _fail(f"unsupported format_version {obj['format_version']!r}")
    kind = obj["kind"]
    if kind not in KINDS:
        _fail(f"unknown kind {kind!r}")
    body = obj["body"]
    if kind in DIAGRAM_KINDS:
        parsed = body_to_instance(SCHEMAS[kind], body)
    elif kind in OPEN_KINDS:
        parsed = body_to_open(kind[5:], body)
    elif kind == "scenario":
        parsed = _scenario_from_json(body)
    else:
        _expect(body, dict, "body")
        _check_keys(body, ("components",), "body", required=("components",))
        comps = _expect(body["components"], dict, "body.components")
        parsed = _components_from_json(comps, list(comps), "body.components")
    prov = obj.get("provenance")
    if prov is not None:
        _expect(prov, dict, "provenance")
    return ModelFile(kind, parsed, prov)


def load(path: str) -> ModelFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def save(mf: ModelFile, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(mf))


def save_model(body, path: str, provenance: Optional[dict] = None) -> None:
    save(ModelFile(model_kind(body), body, provenance), path)
