"""Lowering of an SFD's formulas to the flat stack-machine form used by the
kernels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

import numpy as np

from ..acset import ACSet, Part, require_valid
from ..errors import SchemaError, SimulationError
from ..formulas import Expr, Literal, Op, Ref, aux_order, reconstruct_formula, sum_var_formula
from ..schemas import SchSFD
from . import _kernels as K


@dataclass
class Program:
    """Slot layout: stocks, params, sum variables, aux variables."""

    stock_names: List[str]
    param_names: List[str]
    sum_names: List[str]
    aux_names: List[str]
    flow_names: List[str]
    code: np.ndarray
    arg: np.ndarray
    cst: np.ndarray
    blk_target: np.ndarray
    blk_start: np.ndarray
    blk_end: np.ndarray
    flow_slot: np.ndarray
    in_flow: np.ndarray
    in_stock: np.ndarray
    out_flow: np.ndarray
    out_stock: np.ndarray

    @property
    def nslots(self) -> int:
        return len(self.stock_names) + len(self.param_names) + len(self.sum_names) + len(self.aux_names)

    def offset(self, ob: str) -> int:
        order = ["S", "P", "SV", "V"]
        sizes = [len(self.stock_names), len(self.param_names), len(self.sum_names), len(self.aux_names)]
        return sum(sizes[: order.index(ob)])

    def slot(self, part: Part) -> int:
        return self.offset(part.ob) + part.idx - 1

    def block_name(self, b: int) -> str:
        slot = int(self.blk_target[b])
        n_s, n_p = len(self.stock_names), len(self.param_names)
        if slot < n_s + n_p + len(self.sum_names):
            return self.sum_names[slot - n_s - n_p]
        return self.aux_names[slot - n_s - n_p - len(self.sum_names)]

    def base_values(self, params: Mapping) -> np.ndarray:
        vals = np.zeros(self.nslots)
        off = self.offset("P")
        for i, name in enumerate(self.param_names):
            vals[off + i] = params[name]
        return vals

    def kernel_args(self):
        return (self.code, self.arg, self.cst, self.blk_target, self.blk_start, self.blk_end)

    def incidence(self):
        return (self.flow_slot, self.in_flow, self.in_stock, self.out_flow, self.out_stock)

    def flow_deltas(self) -> np.ndarray:
        """Token change of every stock when each flow fires once."""
        d = np.zeros((len(self.flow_names), len(self.stock_names)))
        for f, s in zip(self.in_flow, self.in_stock):
            d[f, s] += 1.0
        for f, s in zip(self.out_flow, self.out_stock):
            d[f, s] -= 1.0
        return d


def _names(sfd: ACSet, attr: str) -> List[str]:
    return sfd.column(attr)


def compile_program(sfd: ACSet, sum_exprs: List[Expr], aux_exprs: List[Tuple[int, Expr]]) -> Program:
    stock_names = _names(sfd, "sname")
    for what, names in (("stock", stock_names), ("parameter", _names(sfd, "pname"))):
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate {what} names; simulation needs unique names")
    prog_names = dict(
        stock_names=stock_names,
        param_names=_names(sfd, "pname"),
        sum_names=_names(sfd, "svname"),
        aux_names=_names(sfd, "vname"),
        flow_names=_names(sfd, "fname"),
    )
    sizes = {
        "S": len(prog_names["stock_names"]),
        "P": len(prog_names["param_names"]),
        "SV": len(prog_names["sum_names"]),
        "V": len(prog_names["aux_names"]),
    }
    offs = {"S": 0, "P": sizes["S"], "SV": sizes["S"] + sizes["P"], "V": sizes["S"] + sizes["P"] + sizes["SV"]}

    code, arg, cst = [], [], []

    def emit(expr):
        if isinstance(expr, Ref):
            code.append(K.OP_LOAD)
            arg.append(offs[expr.part.ob] + expr.part.idx - 1)
            cst.append(0.0)
        elif isinstance(expr, Literal):
            code.append(K.OP_CONST)
            arg.append(0)
            cst.append(float(expr.value))
        else:
            for a in expr.args:
                emit(a)
            opcode = {"+": K.OP_ADD, "*": K.OP_MUL, "-": K.OP_SUB, "/": K.OP_DIV}[expr.op]
            code.append(opcode)
            arg.append(len(expr.args))
            cst.append(0.0)

    tgt, start, end = [], [], []
    blocks = [(offs["SV"] + i, e) for i, e in enumerate(sum_exprs)]
    blocks += [(offs["V"] + v - 1, e) for v, e in aux_exprs]
    for slot, expr in blocks:
        tgt.append(slot)
        start.append(len(code))
        emit(expr)
        end.append(len(code))

    i64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return Program(
        **prog_names,
        code=i64(code),
        arg=i64(arg),
        cst=np.asarray(cst, dtype=np.float64),
        blk_target=i64(tgt),
        blk_start=i64(start),
        blk_end=i64(end),
        flow_slot=i64([offs["V"] + v - 1 for v in sfd.column("fv")]),
        in_flow=i64([f - 1 for f in sfd.column("ifn")]),
        in_stock=i64([s - 1 for s in sfd.column("is")]),
        out_flow=i64([f - 1 for f in sfd.column("ofn")]),
        out_stock=i64([s - 1 for s in sfd.column("os")]),
    )


def lower(sfd: ACSet):
    """Reconstruct every formula and compile. Returns ``(sum_exprs, aux_exprs, program)``."""
    if sfd.schema != SchSFD:
        raise SchemaError("only stock & flow diagrams have executable semantics")
    require_valid(sfd, "stock & flow diagram")
    sum_exprs = [sum_var_formula(sfd, i) for i in range(1, sfd.nparts("SV") + 1)]
    aux_exprs = [(v, reconstruct_formula(sfd, v)) for v in aux_order(sfd)]
    return sum_exprs, aux_exprs, compile_program(sfd, sum_exprs, aux_exprs)
