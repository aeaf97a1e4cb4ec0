"""The three System Dynamics diagram schemas, their composition-interface
schemas, and builders for CLD and SFD instances."""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from .acset import ACSet, Part, Schema, SchemaError, check_value

_KINDS = (("Name", "Name"), ("Sign", "Sign"), ("Op", "Op"), ("Position", "Int"), ("Real", "Real"))

SchCLD = Schema(
    "SchCLD",
    objects=("V", "L", "A"),
    homs=(("src", "L", "V"), ("tgt", "L", "V"), ("polarity", "L", "A")),
    attrtypes=("Name", "Sign"),
    attrs=(("vname", "V", "Name"), ("sgn", "A", "Sign")),
    attrtype_kinds=_KINDS[:2],
)

_SD_OBJECTS = ("S", "F", "I", "O", "V", "SV", "P", "LV", "LS", "LSV", "LPV", "LVV")
_SD_HOMS = (
    ("is", "I", "S"),
    ("ifn", "I", "F"),
    ("os", "O", "S"),
    ("ofn", "O", "F"),
    ("fv", "F", "V"),
    ("lvs", "LV", "S"),
    ("lvv", "LV", "V"),
    ("lss", "LS", "S"),
    ("lssv", "LS", "SV"),
    ("lsvsv", "LSV", "SV"),
    ("lsvv", "LSV", "V"),
    ("lpvp", "LPV", "P"),
    ("lpvv", "LPV", "V"),
    ("lvsrc", "LVV", "V"),
    ("lvtgt", "LVV", "V"),
)
_SD_NAMES = (
    ("sname", "S", "Name"),
    ("fname", "F", "Name"),
    ("vname", "V", "Name"),
    ("svname", "SV", "Name"),
    ("pname", "P", "Name"),
)
# polarity morphism per link/flow table, in schema order
SSD_POLARITY = {
    "LV": "polarityLV",
    "LS": "positiveLS",
    "LSV": "polarityLSV",
    "LPV": "polarityLPV",
    "LVV": "polarityLVV",
    "I": "positiveI",
    "O": "negativeO",
}

SchSSD = Schema(
    "SchSSD",
    objects=_SD_OBJECTS + ("A",),
    homs=_SD_HOMS + tuple((m, ob, "A") for ob, m in SSD_POLARITY.items()),
    attrtypes=("Name", "Sign"),
    attrs=_SD_NAMES + (("sgn", "A", "Sign"),),
    attrtype_kinds=_KINDS[:2],
)

# position attribute per link table feeding an auxiliary variable
SFD_POSITION = {"LV": "lvposition", "LSV": "lsvposition", "LVV": "lvvposition", "LPV": "lpvposition"}

SchSFD = Schema(
    "SchSFD",
    objects=_SD_OBJECTS,
    homs=_SD_HOMS,
    attrtypes=("Name", "Op", "Position", "Real"),
    attrs=_SD_NAMES
    + (("vop", "V", "Op"), ("vconst", "V", "Real"))
    + tuple((attr, ob, "Position") for ob, attr in SFD_POSITION.items()),
    attrtype_kinds=(_KINDS[0], _KINDS[2], _KINDS[3], _KINDS[4]),
)

InterfaceSFD = Schema(
    "InterfaceSFD",
    objects=("S", "SV", "LS"),
    homs=(("lss", "LS", "S"), ("lssv", "LS", "SV")),
    attrtypes=("Name",),
    attrs=(("sname", "S", "Name"), ("svname", "SV", "Name")),
    attrtype_kinds=_KINDS[:1],
)

InterfaceSSD = Schema(
    "InterfaceSSD",
    objects=("S", "SV", "LS", "A"),
    homs=(("lss", "LS", "S"), ("lssv", "LS", "SV"), ("positiveLS", "LS", "A")),
    attrtypes=("Name", "Sign"),
    attrs=(("sname", "S", "Name"), ("svname", "SV", "Name"), ("sgn", "A", "Sign")),
    attrtype_kinds=_KINDS[:2],
)

InterfaceCLD = SchCLD

SCHEMAS = {"cld": SchCLD, "ssd": SchSSD, "sfd": SchSFD}
INTERFACES = {"cld": InterfaceCLD, "ssd": InterfaceSSD, "sfd": InterfaceSFD}

# name attribute of each node-like table
NAME_ATTR = {"S": "sname", "F": "fname", "V": "vname", "SV": "svname", "P": "pname"}

# (table, source morphism, source object) feeding aux variables, per link table
SFD_LINKS = {
    "LV": ("lvs", "lvv", "S"),
    "LSV": ("lsvsv", "lsvv", "SV"),
    "LVV": ("lvsrc", "lvtgt", "V"),
    "LPV": ("lpvp", "lpvv", "P"),
}

ARITY = {"/": 2, "-": 2, "const": 0}  # '+' and '*' are n-ary (>= 1)


def kind_of(schema: Schema) -> str:
    for k, s in SCHEMAS.items():
        if s == schema:
            return k
    for k, s in INTERFACES.items():
        if s == schema:
            return k
    raise SchemaError(f"{schema.name} is not a diagram schema")


def add_signs(inst: ACSet) -> None:
    """Instantiate the two-element sign table A = {+, -}."""
    if inst.nparts("A"):
        raise SchemaError("sign table already populated")
    inst.add_part("A", sgn="+")
    inst.add_part("A", sgn="-")


def sign_part(sign: str) -> Part:
    if sign not in ("+", "-"):
        raise SchemaError(f"not a sign: {sign!r}")
    return Part("A", 1 if sign == "+" else 2)


def _unique(names, what):
    seen = set()
    for n in names:
        if n in seen:
            raise SchemaError(f"duplicate {what} name {n!r}")
        seen.add(n)


def build_cld(variables: Sequence[str], links: Iterable[Tuple[str, str, str]]) -> ACSet:
    """Causal loop diagram from variable names and ``(src, tgt, sign)`` links."""
    variables = list(variables)
    _unique(variables, "variable")
    inst = ACSet(SchCLD)
    add_signs(inst)
    index = {v: inst.add_part("V", vname=v) for v in variables}
    for src, tgt, sign in links:
        for end in (src, tgt):
            if end not in index:
                raise SchemaError(f"link endpoint {end!r} is not a declared variable")
        inst.add_part("L", src=index[src], tgt=index[tgt], polarity=sign_part(sign))
    return inst


def check_arity(op: str, nargs: int, where: str = "") -> None:
    if op in ARITY:
        if nargs != ARITY[op]:
            raise SchemaError(f"{where}operator {op!r} takes {ARITY[op]} arguments, got {nargs}")
    elif op in ("+", "*"):
        if nargs < 1:
            raise SchemaError(f"{where}operator {op!r} needs at least one argument")
    else:
        raise SchemaError(f"{where}unsupported operator {op!r}")


def build_sfd(
    stocks: Sequence[str] = (),
    sum_vars: Sequence[Tuple[str, Sequence[str]]] = (),
    params: Sequence[str] = (),
    aux_vars: Sequence[tuple] = (),
    flows: Sequence[Tuple[str, str, Optional[str], Optional[str]]] = (),
) -> ACSet:
    """Stock & flow diagram from name-level declarations.

    ``sum_vars``: ``(name, [stock, ...])`` -- one LS link per listed stock.
    ``aux_vars``: ``(name, op, [arg, ...])`` or ``(name, "const", value)``;
    args name stocks, sum variables, parameters or other aux variables and
    their list order becomes the position attribute.
    ``flows``: ``(name, aux_var, from_stock, to_stock)``; ``None`` for an
    open end (source or sink).
    """
    stocks = list(stocks)
    params = list(params)
    sum_names = [s[0] for s in sum_vars]
    aux_names = [v[0] for v in aux_vars]
    _unique(stocks + sum_names + params + aux_names, "node")
    _unique([f[0] for f in flows], "flow")

    inst = ACSet(SchSFD)
    S = {n: inst.add_part("S", sname=n) for n in stocks}
    SV = {n: inst.add_part("SV", svname=n) for n in sum_names}
    P = {n: inst.add_part("P", pname=n) for n in params}
    V = {}
    for decl in aux_vars:
        name, op = decl[0], decl[1]
        const = float(decl[2]) if op == "const" else 0.0
        V[name] = inst.add_part("V", vname=name, vop=check_value(SchSFD, "vop", op), vconst=const)

    for name, members in sum_vars:
        for st in members:
            if st not in S:
                raise SchemaError(f"sum variable {name!r} links unknown stock {st!r}")
            inst.add_part("LS", lss=S[st], lssv=SV[name])

    for name, op, *rest in aux_vars:
        args = [] if op == "const" else list(rest[0] if rest else [])
        check_arity(op, len(args), f"{name}: ")
        for pos, arg in enumerate(args, start=1):
            if arg in S:
                inst.add_part("LV", lvs=S[arg], lvv=V[name], lvposition=pos)
            elif arg in SV:
                inst.add_part("LSV", lsvsv=SV[arg], lsvv=V[name], lsvposition=pos)
            elif arg in V:
                inst.add_part("LVV", lvsrc=V[arg], lvtgt=V[name], lvvposition=pos)
            elif arg in P:
                inst.add_part("LPV", lpvp=P[arg], lpvv=V[name], lpvposition=pos)
            else:
                raise SchemaError(f"{name}: argument {arg!r} is not a declared node")

    inflows, outflows = [], []
    for fname, var, src, tgt in flows:
        if var not in V:
            raise SchemaError(f"flow {fname!r} names unknown variable {var!r}")
        f = inst.add_part("F", fname=fname, fv=V[var])
        for end in (src, tgt):
            if end is not None and end not in S:
                raise SchemaError(f"flow {fname!r} touches unknown stock {end!r}")
        if tgt is not None:
            inflows.append((f, S[tgt]))
        if src is not None:
            outflows.append((f, S[src]))
    for f, s in inflows:
        inst.add_part("I", ifn=f, **{"is": s})
    for f, s in outflows:
        inst.add_part("O", ofn=f, os=s)
    return inst


def build_foot(kind: str, stocks: Sequence[str] = (), sum_vars: Sequence[Tuple[str, Sequence[str]]] = ()) -> ACSet:
    """Interface instance for SFD/SSD composition: stocks, sum vars, stock->sum links."""
    schema = INTERFACES[kind]
    if kind == "cld":
        raise SchemaError("CLD feet are ordinary CLDs; use build_cld")
    inst = ACSet(schema)
    if kind == "ssd":
        add_signs(inst)
    S = {n: inst.add_part("S", sname=n) for n in stocks}
    for name, members in sum_vars:
        sv = inst.add_part("SV", svname=name)
        for st in members:
            extra = {"positiveLS": sign_part("+")} if kind == "ssd" else {}
            inst.add_part("LS", lss=S[st], lssv=sv, **extra)
    return inst


def node_name(inst: ACSet, part: Part) -> str:
    return inst.subpart(part, NAME_ATTR[part.ob])
