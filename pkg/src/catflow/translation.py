"""Functors between diagram kinds: SFD -> SSD (polarities from formulas),
SSD -> CLD (data migration), and their composite SFD -> CLD."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .acset import ACSet, Part, require_valid
from .errors import FormulaError, SchemaError
from .schemas import (
    NAME_ATTR,
    SFD_POSITION,
    SSD_POLARITY,
    SchCLD,
    SchSFD,
    SchSSD,
    add_signs,
    sign_part,
)

# (operator, argument position) -> sign, assuming positive-valued arguments
POLARITY_RULES = {
    ("-", 1): "+",
    ("-", 2): "-",
    ("/", 1): "+",
    ("/", 2): "-",
}
STRUCTURAL_SIGNS = {"LS": "+", "I": "+", "O": "-"}

# target variable column of each position-carrying link table
_LINK_TARGET = {"LV": "lvv", "LSV": "lsvv", "LVV": "lvtgt", "LPV": "lpvv"}


def link_polarity(op: str, position: int) -> str:
    if op in ("+", "*"):
        return "+"
    if op == "const":
        raise FormulaError("literal-constant variables take no incoming links")
    try:
        return POLARITY_RULES[(op, position)]
    except KeyError:
        raise FormulaError(f"no polarity rule for operator {op!r} at position {position}") from None


def _formula_signs(sfd: ACSet) -> Dict[str, List[str]]:
    """Sign of every row of every position-carrying link table."""
    out = {}
    for table, tgt in _LINK_TARGET.items():
        pos_attr = SFD_POSITION[table]
        signs = []
        for row in range(1, sfd.nparts(table) + 1):
            v = sfd.subpart(row, tgt)
            signs.append(link_polarity(sfd.subpart(v, "vop"), sfd.subpart(row, pos_attr)))
        out[table] = signs
    return out


def sfd_to_ssd(sfd: ACSet) -> ACSet:
    """Keep all structure index-for-index; derive link polarities; drop formulas."""
    if sfd.schema != SchSFD:
        raise SchemaError("sfd_to_ssd expects a stock & flow diagram")
    require_valid(sfd, "stock & flow diagram")
    signs = _formula_signs(sfd)
    ssd = ACSet(SchSSD)
    add_signs(ssd)
    for ob in SchSFD.objects:
        ssd.add_parts(ob, sfd.nparts(ob))
    for name, _, _ in SchSFD.homs:
        ssd._cols[name] = sfd.column(name)
    for attr in NAME_ATTR.values():
        ssd._cols[attr] = sfd.column(attr)
    for table, morph in SSD_POLARITY.items():
        n = sfd.nparts(table)
        if table in STRUCTURAL_SIGNS:
            col = [sign_part(STRUCTURAL_SIGNS[table]).idx] * n
        else:
            col = [sign_part(s).idx for s in signs[table]]
        ssd._cols[morph] = col
    return ssd


@dataclass
class MigrationWitness:
    """Origin ``(table, row)`` of every CLD vertex and link.

    ``flows`` maps each SSD/SFD flow row to the CLD vertex it was identified
    with (the vertex of its flow variable).
    """

    vertices: List[Tuple[str, int]] = field(default_factory=list)
    links: List[Tuple[str, int]] = field(default_factory=list)
    flows: List[Tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "links": [list(l) for l in self.links],
            "flows": [list(f) for f in self.flows],
        }

    @classmethod
    def from_json(cls, obj) -> "MigrationWitness":
        return cls(
            [tuple(v) for v in obj["vertices"]],
            [tuple(l) for l in obj["links"]],
            [tuple(f) for f in obj["flows"]],
        )


VERTEX_TABLES = ("S", "SV", "V", "P")
LINK_TABLES = ("LV", "LS", "LSV", "LPV", "LVV", "I", "O")
# src/tgt columns of each link table: a morphism name, or (fv, m) for fv . m
_SRC = {"LV": "lvs", "LS": "lss", "LSV": "lsvsv", "LPV": "lpvp", "LVV": "lvsrc", "I": ("fv", "ifn"), "O": ("fv", "ofn")}
_TGT = {"LV": "lvv", "LS": "lssv", "LSV": "lsvv", "LPV": "lpvv", "LVV": "lvtgt", "I": "is", "O": "os"}


def _vertex_offsets(inst: ACSet) -> Dict[str, int]:
    offs, acc = {}, 0
    for ob in VERTEX_TABLES:
        offs[ob] = acc
        acc += inst.nparts(ob)
    return offs


def _endpoint(inst: ACSet, spec, row: int) -> Part:
    if isinstance(spec, tuple):
        outer, inner = spec
        return Part("V", inst.subpart(inst.subpart(row, inner), outer))
    return Part(inst.schema.cod(spec), inst.subpart(row, spec))


def _migrate(inst: ACSet, link_sign) -> Tuple[ACSet, MigrationWitness]:
    """Shared SSD/SFD -> CLD migration; ``link_sign(table, row)`` gives the A index."""
    offs = _vertex_offsets(inst)
    cld = ACSet(SchCLD)
    add_signs(cld)
    wit = MigrationWitness()
    for ob in VERTEX_TABLES:
        for i in range(1, inst.nparts(ob) + 1):
            cld.add_part("V", vname=inst.subpart(i, NAME_ATTR[ob]))
            wit.vertices.append((ob, i))
    for table in LINK_TABLES:
        for row in range(1, inst.nparts(table) + 1):
            s = _endpoint(inst, _SRC[table], row)
            t = _endpoint(inst, _TGT[table], row)
            cld.add_part(
                "L",
                src=offs[s.ob] + s.idx,
                tgt=offs[t.ob] + t.idx,
                polarity=Part("A", link_sign(table, row)),
            )
            wit.links.append((table, row))
    for f in range(1, inst.nparts("F") + 1):
        wit.flows.append((f, offs["V"] + inst.subpart(f, "fv")))
    return cld, wit


def ssd_to_cld(ssd: ACSet) -> Tuple[ACSet, MigrationWitness]:
    """Data migration along V -> S+SV+V+P, L -> LV+LS+LSV+LPV+LVV+I+O."""
    if ssd.schema != SchSSD:
        raise SchemaError("ssd_to_cld expects a system structure diagram")
    require_valid(ssd, "system structure diagram")
    if ssd.column("sgn") != ["+", "-"]:
        raise SchemaError("SSD sign table must be exactly [+, -]")
    return _migrate(ssd, lambda table, row: ssd.subpart(row, SSD_POLARITY[table]))


def sfd_to_cld(sfd: ACSet) -> Tuple[ACSet, MigrationWitness]:
    """One-shot SFD -> CLD; agrees table-for-table with ``ssd_to_cld(sfd_to_ssd(sfd))``."""
    if sfd.schema != SchSFD:
        raise SchemaError("sfd_to_cld expects a stock & flow diagram")
    require_valid(sfd, "stock & flow diagram")
    signs = _formula_signs(sfd)

    def sign(table, row):
        s = STRUCTURAL_SIGNS.get(table) or signs[table][row - 1]
        return sign_part(s).idx

    return _migrate(sfd, sign)
