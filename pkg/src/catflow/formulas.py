"""Formula ASTs rebuilt from an SFD's operator and argument-position columns."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple, Union

from .acset import ACSet, Part
from .errors import FormulaError
from .schemas import ARITY, NAME_ATTR, SFD_LINKS, SFD_POSITION, SchSFD


@dataclass(frozen=True)
class Ref:
    part: Part
    name: str


@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class Op:
    op: str
    args: Tuple["Expr", ...]


Expr = Union[Ref, Literal, Op]


def render(expr: Expr) -> str:
    """Parenthesized infix, e.g. ``(I / N)``."""
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Literal):
        return repr(expr.value)
    return "(" + f" {expr.op} ".join(render(a) for a in expr.args) + ")"


def _as_part(ob: str, p) -> Part:
    if isinstance(p, Part):
        if p.ob != ob:
            raise FormulaError(f"expected a part of {ob}, got {p}")
        return p
    return Part(ob, int(p))


def _ref(sfd: ACSet, part: Part) -> Ref:
    return Ref(part, sfd.subpart(part, NAME_ATTR[part.ob]))


def incoming_args(sfd: ACSet, v: Part) -> List[Tuple[int, Part, str]]:
    """``(position, source part, link table)`` for every link into ``v``."""
    out = []
    for table, (src, tgt, src_ob) in SFD_LINKS.items():
        pos_attr = SFD_POSITION[table]
        for row in sfd.incident(tgt, v.idx):
            out.append((sfd.subpart(row, pos_attr), Part(src_ob, sfd.subpart(row, src)), table))
    return out


def _check_acyclic(sfd: ACSet, v: Part) -> None:
    """Fail if ``v`` reaches a cycle through variable->variable links."""
    color = {}

    def visit(i, trail):
        color[i] = 1
        for row in sfd.incident("lvtgt", i):
            j = sfd.subpart(row, "lvsrc")
            if color.get(j) == 1:
                names = [sfd.subpart(k, "vname") for k in trail + [j]]
                raise FormulaError("cyclic auxiliary variable dependency: " + " <- ".join(names))
            if j not in color:
                visit(j, trail + [j])
        color[i] = 2

    visit(v.idx, [v.idx])


def reconstruct_formula(sfd: ACSet, v) -> Expr:
    """One-level AST of auxiliary variable ``v``; aux-var leaves stay references."""
    if sfd.schema != SchSFD:
        raise FormulaError("formulas live on stock & flow diagrams")
    v = _as_part("V", v)
    op = sfd.subpart(v, "vop")
    name = sfd.subpart(v, "vname")
    args = incoming_args(sfd, v)
    if op == "const":
        if args:
            raise FormulaError(f"{name}: literal-constant variable has incoming links")
        return Literal(float(sfd.subpart(v, "vconst")))
    positions = sorted(p for p, _, _ in args)
    if len(set(positions)) != len(positions):
        raise FormulaError(f"{name}: duplicate argument position")
    if positions != list(range(1, len(positions) + 1)):
        raise FormulaError(f"{name}: argument positions {positions} are not 1..{len(positions)}")
    expected = ARITY.get(op)
    if (expected is not None and len(args) != expected) or (expected is None and not args):
        raise FormulaError(f"{name}: operator {op!r} got {len(args)} arguments")
    _check_acyclic(sfd, v)
    return Op(op, tuple(_ref(sfd, src) for _, src, _ in sorted(args, key=lambda a: a[0])))


def reconstruct_closure(sfd: ACSet, v) -> Expr:
    """AST of ``v`` with auxiliary-variable references expanded recursively."""
    memo: Dict[int, Expr] = {}

    def expand(expr):
        if isinstance(expr, Ref) and expr.part.ob == "V":
            i = expr.part.idx
            if i not in memo:
                memo[i] = expand(reconstruct_formula(sfd, expr.part))
            return memo[i]
        if isinstance(expr, Op):
            return Op(expr.op, tuple(expand(a) for a in expr.args))
        return expr

    return expand(reconstruct_formula(sfd, v))


def sum_var_formula(sfd: ACSet, sv) -> Expr:
    """Sum of all stocks linked into ``sv``, ordered by stock index."""
    sv = _as_part("SV", sv)
    stocks = sorted(sfd.subpart(row, "lss") for row in sfd.incident("lssv", sv.idx))
    if not stocks:
        return Literal(0.0)
    return Op("+", tuple(_ref(sfd, Part("S", s)) for s in stocks))


def evaluate(expr: Expr, env: Mapping[Part, float]) -> float:
    """Evaluate left to right; division by zero raises :class:`FormulaError`."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Ref):
        try:
            return float(env[expr.part])
        except KeyError:
            raise FormulaError(f"no value bound for {expr.name} ({expr.part})") from None
    vals = [evaluate(a, env) for a in expr.args]
    op = expr.op
    if op == "+":
        acc = vals[0]
        for x in vals[1:]:
            acc = acc + x
        return acc
    if op == "*":
        acc = vals[0]
        for x in vals[1:]:
            acc = acc * x
        return acc
    if op == "-":
        return vals[0] - vals[1]
    if op == "/":
        if vals[1] == 0.0:
            raise FormulaError(f"division by zero in {render(expr)}")
        return vals[0] / vals[1]
    raise FormulaError(f"unknown operator {op!r}")


def aux_order(sfd: ACSet) -> List[int]:
    """Auxiliary variables in dependency order (smallest index first among ready ones)."""
    n = sfd.nparts("V")
    indeg = [0] * (n + 1)
    succ = [[] for _ in range(n + 1)]
    for row in range(1, sfd.nparts("LVV") + 1):
        s, t = sfd.subpart(row, "lvsrc"), sfd.subpart(row, "lvtgt")
        succ[s].append(t)
        indeg[t] += 1
    heap = [i for i in range(1, n + 1) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for t in succ[i]:
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(heap, t)
    if len(order) != n:
        raise FormulaError("cyclic auxiliary variable dependency")
    return order
