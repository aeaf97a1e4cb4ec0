"""Attributed C-sets: schemas, instances stored as dense 1-based tables,
validation, coproducts and CSV table export.

An instance is a functor from a free schema category into finite sets,
encoded the way a relational database would encode it: every object owns a
table of parts, every morphism ``m: X -> Y`` is a foreign-key column on
``X`` holding 1-based row indices into ``Y``, and every attribute is a value
column on its domain table.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInstanceError, SchemaError

SIGNS = ("+", "-")
OPERATORS = ("+", "-", "*", "/", "const")

# attribute type name -> python-level check
ATTRTYPE_KINDS = ("Name", "Sign", "Op", "Int", "Real")


class Part(NamedTuple):
    """Row identity: object name plus 1-based index."""

    ob: str
    idx: int

    def __str__(self):
        return f"{self.ob}#{self.idx}"


class Violation(NamedTuple):
    column: str
    row: int
    reason: str
    ob: str = ""

    def __str__(self):
        where = f"{self.ob} row {self.row}, column {self.column}" if self.ob else f"{self.column}[{self.row}]"
        return f"{where}: {self.reason}"


@dataclass(frozen=True)
class Schema:
    """Presentation of a free schema category with attributes.

    ``homs`` and ``attrs`` are ``(name, dom, cod)`` triples; for attributes
    the codomain is an attribute type, which must be one of
    :data:`ATTRTYPE_KINDS` or a name mapped onto one in ``attrtype_kinds``.
    """

    name: str
    objects: Tuple[str, ...]
    homs: Tuple[Tuple[str, str, str], ...] = ()
    attrtypes: Tuple[str, ...] = ()
    attrs: Tuple[Tuple[str, str, str], ...] = ()
    attrtype_kinds: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "homs", tuple(tuple(h) for h in self.homs))
        object.__setattr__(self, "attrtypes", tuple(self.attrtypes))
        object.__setattr__(self, "attrs", tuple(tuple(a) for a in self.attrs))
        object.__setattr__(self, "attrtype_kinds", tuple(tuple(k) for k in self.attrtype_kinds))
        for kind, names in (
            ("object", self.objects),
            ("morphism", [h[0] for h in self.homs]),
            ("attribute type", self.attrtypes),
            ("attribute", [a[0] for a in self.attrs]),
        ):
            if len(set(names)) != len(names):
                raise SchemaError(f"duplicate {kind} name in schema {self.name}")
        columns = [h[0] for h in self.homs] + [a[0] for a in self.attrs]
        if len(set(columns)) != len(columns):
            raise SchemaError(f"morphism and attribute names overlap in schema {self.name}")
        obs = set(self.objects)
        for name, dom, cod in self.homs:
            if dom not in obs or cod not in obs:
                raise SchemaError(f"morphism {name}: {dom}->{cod} refers to an undeclared object")
        kinds = dict(self.attrtype_kinds)
        for at in self.attrtypes:
            if kinds.get(at, at) not in ATTRTYPE_KINDS:
                raise SchemaError(f"attribute type {at} has no known value kind")
        for name, dom, at in self.attrs:
            if dom not in obs:
                raise SchemaError(f"attribute {name} on undeclared object {dom}")
            if at not in self.attrtypes:
                raise SchemaError(f"attribute {name} has undeclared type {at}")

    # -- lookups -------------------------------------------------------------
    def has_hom(self, name: str) -> bool:
        return any(h[0] == name for h in self.homs)

    def has_attr(self, name: str) -> bool:
        return any(a[0] == name for a in self.attrs)

    def dom(self, name: str) -> str:
        for n, d, _ in self.homs + self.attrs:
            if n == name:
                return d
        raise SchemaError(f"unknown morphism or attribute {name!r} in schema {self.name}")

    def cod(self, name: str) -> str:
        for n, _, c in self.homs + self.attrs:
            if n == name:
                return c
        raise SchemaError(f"unknown morphism or attribute {name!r} in schema {self.name}")

    def kind(self, attrtype: str) -> str:
        return dict(self.attrtype_kinds).get(attrtype, attrtype)

    def attr_kind(self, attr: str) -> str:
        return self.kind(self.cod(attr))

    def columns(self, ob: str) -> List[str]:
        """Outgoing morphisms then attributes of ``ob``, declaration order."""
        self.check_object(ob)
        return [h[0] for h in self.homs if h[1] == ob] + [a[0] for a in self.attrs if a[1] == ob]

    def check_object(self, ob: str) -> None:
        if ob not in self.objects:
            raise SchemaError(f"unknown object {ob!r} in schema {self.name}")

    @property
    def name_attrs(self) -> frozenset:
        return frozenset(a[0] for a in self.attrs if self.kind(a[2]) == "Name")

    def is_subschema_of(self, other: "Schema") -> bool:
        return (
            set(self.objects) <= set(other.objects)
            and set(self.homs) <= set(other.homs)
            and set(self.attrs) <= set(other.attrs)
        )


def check_value(schema: Schema, attr: str, value: Any) -> Any:
    """Coerce/check an attribute value against the attribute's type."""
    kind = schema.attr_kind(attr)
    if kind == "Name":
        if not isinstance(value, str):
            raise SchemaError(f"{attr}: expected text, got {value!r}")
        return value
    if kind == "Sign":
        if value not in SIGNS:
            raise SchemaError(f"{attr}: expected sign '+' or '-', got {value!r}")
        return value
    if kind == "Op":
        if value not in OPERATORS:
            raise SchemaError(f"{attr}: unsupported operator {value!r}")
        return value
    if kind == "Int":
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise SchemaError(f"{attr}: expected integer, got {value!r}")
        return int(value)
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise SchemaError(f"{attr}: expected real, got {value!r}")
    return float(value)


class ACSet:
    """Mutable instance of a :class:`Schema`.

    Morphism columns hold 1-based indices (``None`` while unset), attribute
    columns hold python values. Instances are only ever grown; operations
    that transform diagrams build new instances.
    """

    def __init__(self, schema: Schema):
        self.schema = schema
        self._nparts: Dict[str, int] = {ob: 0 for ob in schema.objects}
        self._cols: Dict[str, list] = {n: [] for n, _, _ in schema.homs + schema.attrs}

    # -- sizes ---------------------------------------------------------------
    def nparts(self, ob: str) -> int:
        self.schema.check_object(ob)
        return self._nparts[ob]

    def parts(self, ob: str) -> List[Part]:
        return [Part(ob, i) for i in range(1, self.nparts(ob) + 1)]

    def counts(self) -> Dict[str, int]:
        return dict(self._nparts)

    # -- construction --------------------------------------------------------
    def add_parts(self, ob: str, n: int) -> List[Part]:
        self.schema.check_object(ob)
        if n < 0:
            raise ValueError("cannot add a negative number of parts")
        start = self._nparts[ob]
        self._nparts[ob] = start + n
        for col in self.schema.columns(ob):
            self._cols[col].extend([None] * n)
        return [Part(ob, i) for i in range(start + 1, start + n + 1)]

    def add_part(self, ob: str, **values) -> Part:
        (part,) = self.add_parts(ob, 1)
        for name, value in values.items():
            self.set_subpart(part, name, value)
        return part

    def set_subpart(self, part: Part, name: str, value) -> None:
        schema = self.schema
        dom = schema.dom(name)
        ob, idx = part
        if ob != dom:
            raise SchemaError(f"{name} has domain {dom}, not {ob}")
        if not 1 <= idx <= self._nparts[ob]:
            raise SchemaError(f"part {Part(ob, idx)} does not exist")
        if schema.has_hom(name):
            cod = schema.cod(name)
            if isinstance(value, Part):
                if value.ob != cod:
                    raise SchemaError(f"{name} has codomain {cod}, not {value.ob}")
                value = value.idx
            elif isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise SchemaError(f"{name}: expected a part of {cod}, got {value!r}")
            self._cols[name][idx - 1] = int(value)
        else:
            self._cols[name][idx - 1] = check_value(schema, name, value)

    def subpart(self, part, name: str):
        """Value of column ``name`` at ``part`` (a Part or a bare index)."""
        idx = part.idx if isinstance(part, Part) else part
        return self._cols[name][idx - 1]

    def column(self, name: str) -> list:
        """Copy of a whole column."""
        if name not in self._cols:
            raise SchemaError(f"unknown column {name!r} in schema {self.schema.name}")
        return list(self._cols[name])

    def index_array(self, name: str) -> np.ndarray:
        """Morphism column as an int64 array (0 where unset)."""
        return np.array([0 if v is None else v for v in self._cols[name]], dtype=np.int64)

    def incident(self, name: str, target) -> List[int]:
        """Rows whose ``name`` column points at ``target`` (preimage)."""
        t = target.idx if isinstance(target, Part) else target
        return [i for i, v in enumerate(self._cols[name], start=1) if v == t]

    def find(self, attr: str, value) -> List[Part]:
        ob = self.schema.dom(attr)
        return [Part(ob, i) for i, v in enumerate(self._cols[attr], start=1) if v == value]

    def lookup(self, attr: str, value) -> Part:
        hits = self.find(attr, value)
        if len(hits) != 1:
            raise SchemaError(f"{len(hits)} parts have {attr} == {value!r}")
        return hits[0]

    # -- value semantics -----------------------------------------------------
    def copy(self) -> "ACSet":
        new = ACSet(self.schema)
        new._nparts = dict(self._nparts)
        new._cols = {k: list(v) for k, v in self._cols.items()}
        return new

    def __eq__(self, other):
        if not isinstance(other, ACSet):
            return NotImplemented
        return self.schema == other.schema and self._nparts == other._nparts and self._cols == other._cols

    def __repr__(self):
        sizes = ", ".join(f"{ob}={n}" for ob, n in self._nparts.items() if n)
        return f"<ACSet {self.schema.name}: {sizes or 'empty'}>"


def add_parts(inst: ACSet, ob: str, n: int) -> List[Part]:
    return inst.add_parts(ob, n)


def set_subpart(inst: ACSet, part: Part, name: str, value) -> None:
    inst.set_subpart(part, name, value)


def validate(inst: ACSet) -> List[Violation]:
    """Totality and range violations; an empty list means the instance is a functor."""
    schema = inst.schema
    out = []
    for name, dom, cod in schema.homs:
        ncod = inst.nparts(cod)
        for row, v in enumerate(inst._cols[name], start=1):
            if v is None:
                out.append(Violation(name, row, "unset", dom))
            elif not 1 <= v <= ncod:
                out.append(Violation(name, row, f"out of range: {v} not in 1..{ncod}", dom))
    for name, dom, _ in schema.attrs:
        for row, v in enumerate(inst._cols[name], start=1):
            if v is None:
                out.append(Violation(name, row, "unset", dom))
    return out


def require_valid(inst: ACSet, what: str = "instance") -> None:
    violations = validate(inst)
    if violations:
        shown = "; ".join(str(v) for v in violations[:5])
        raise InvalidInstanceError(f"invalid {what}: {shown}", violations)


@dataclass
class Homomorphism:
    """Per-object index maps ``source -> target`` (1-based, tuples)."""

    source: ACSet
    target: ACSet
    components: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.source.schema != self.target.schema:
            raise SchemaError("homomorphism source and target have different schemas")
        comps = {}
        for ob in self.source.schema.objects:
            comps[ob] = tuple(int(i) for i in self.components.get(ob, ()))
        self.components = comps

    def __call__(self, part: Part) -> Part:
        return Part(part.ob, self.components[part.ob][part.idx - 1])

    def __getitem__(self, ob: str) -> Tuple[int, ...]:
        return self.components[ob]

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """Composite ``other . self``."""
        comps = {ob: tuple(other.components[ob][i - 1] for i in c) for ob, c in self.components.items()}
        return Homomorphism(self.source, other.target, comps)

    def is_injective(self, ob: str) -> bool:
        c = self.components[ob]
        return len(set(c)) == len(c)

    def is_surjective(self, ob: str) -> bool:
        return set(self.components[ob]) == set(range(1, self.target.nparts(ob) + 1))

    def key(self) -> tuple:
        return tuple(self.components[ob] for ob in self.source.schema.objects)

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.components == other.components

    def __repr__(self):
        body = ", ".join(f"{ob}={list(c)}" for ob, c in self.components.items() if c)
        return f"Homomorphism({body})"


def identity(inst: ACSet) -> Homomorphism:
    return Homomorphism(inst, inst, {ob: tuple(range(1, inst.nparts(ob) + 1)) for ob in inst.schema.objects})


def coproduct(a: ACSet, b: ACSet):
    """Disjoint union ``a + b`` with its two injections."""
    if a.schema != b.schema:
        raise SchemaError("coproduct of instances on different schemas")
    schema = a.schema
    out = ACSet(schema)
    for ob in schema.objects:
        out._nparts[ob] = a._nparts[ob] + b._nparts[ob]
    for name, dom, cod in schema.homs:
        shift = a._nparts[cod]
        out._cols[name] = list(a._cols[name]) + [None if v is None else v + shift for v in b._cols[name]]
    for name, _, _ in schema.attrs:
        out._cols[name] = list(a._cols[name]) + list(b._cols[name])
    ia = Homomorphism(a, out, {ob: range(1, a._nparts[ob] + 1) for ob in schema.objects})
    ib = Homomorphism(
        b, out, {ob: range(a._nparts[ob] + 1, a._nparts[ob] + b._nparts[ob] + 1) for ob in schema.objects}
    )
    return out, ia, ib


# -- tables -------------------------------------------------------------------

@dataclass
class Table:
    columns: List[str]
    rows: List[tuple]


ID_COLUMN = "id"


def export_tables(inst: ACSet) -> Dict[str, Table]:
    """One table per object, rows = parts, columns in declaration order.

    Objects with no outgoing columns get a single ``id`` column so the row
    count survives a round trip.
    """
    require_valid(inst)
    tables = {}
    for ob in inst.schema.objects:
        cols = inst.schema.columns(ob)
        n = inst.nparts(ob)
        if cols:
            rows = [tuple(inst._cols[c][i] for c in cols) for i in range(n)]
        else:
            cols = [ID_COLUMN]
            rows = [(i,) for i in range(1, n + 1)]
        tables[ob] = Table(cols, rows)
    return tables


def import_tables(schema: Schema, tables: Dict[str, Table]) -> ACSet:
    inst = ACSet(schema)
    for ob in schema.objects:
        table = tables.get(ob, Table(schema.columns(ob) or [ID_COLUMN], []))
        cols = schema.columns(ob)
        if cols and list(table.columns) != cols:
            raise SchemaError(f"table {ob}: columns {table.columns} != {cols}")
        parts = inst.add_parts(ob, len(table.rows))
        if not cols:
            continue
        for part, row in zip(parts, table.rows):
            for c, v in zip(cols, row):
                if v is not None:
                    inst.set_subpart(part, c, v)
    return inst


def format_cell(schema: Schema, column: str, value) -> str:
    if column == ID_COLUMN or schema.has_hom(column):
        return str(int(value))
    kind = schema.attr_kind(column)
    if kind == "Real":
        return repr(float(value))
    return str(value)


def parse_cell(schema: Schema, column: str, text: str):
    if column == ID_COLUMN or schema.has_hom(column):
        return int(text)
    kind = schema.attr_kind(column)
    if kind == "Int":
        return int(text)
    if kind == "Real":
        v = float(text)
        if math.isnan(v):
            raise SchemaError(f"{column}: NaN is not a valid attribute value")
        return v
    return text


def table_to_csv(schema: Schema, table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_cell(schema, c, v) for c, v in zip(table.columns, row)])
    return buf.getvalue()


def write_tables(inst: ACSet, directory: str) -> List[str]:
    """Write ``<object>.csv`` for every object; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for ob, table in export_tables(inst).items():
        path = os.path.join(directory, f"{ob}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(table_to_csv(inst.schema, table))
        paths.append(path)
    return paths


def read_tables(schema: Schema, directory: str) -> ACSet:
    tables = {}
    for ob in schema.objects:
        path = os.path.join(directory, f"{ob}.csv")
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [tuple(parse_cell(schema, c, v) for c, v in zip(header, r)) for r in reader]
        tables[ob] = Table(header, rows)
    return import_tables(schema, tables)


def restrict(inst: ACSet, schema: Schema) -> ACSet:
    """Forget everything outside ``schema`` (a sub-presentation of inst.schema)."""
    if not schema.is_subschema_of(inst.schema):
        raise SchemaError(f"{schema.name} is not a sub-schema of {inst.schema.name}")
    out = ACSet(schema)
    for ob in schema.objects:
        out._nparts[ob] = inst._nparts[ob]
    for n, _, _ in schema.homs + schema.attrs:
        out._cols[n] = list(inst._cols[n])
    return out


def promote_instance(inst: ACSet, schema: Schema) -> ACSet:
    """Left-extend an instance of a sub-schema to ``schema`` by empty objects."""
    if not inst.schema.is_subschema_of(schema):
        raise SchemaError(f"{inst.schema.name} is not a sub-schema of {schema.name}")
    out = ACSet(schema)
    for ob in inst.schema.objects:
        out._nparts[ob] = inst._nparts[ob]
    for n, _, _ in inst.schema.homs + inst.schema.attrs:
        out._cols[n] = list(inst._cols[n])
    return out
