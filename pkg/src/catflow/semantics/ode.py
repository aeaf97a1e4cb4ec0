"""ODE semantics: d(stock)/dt = sum of inflows - sum of outflows."""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..acset import ACSet, Part
from ..errors import SimulationError
from ..formulas import Expr, Literal, Op, Ref, evaluate, render
from . import _kernels as K
from .program import Program, lower


@dataclass
class Scenario:
    """Numeric binding kept apart from the diagram: initial stocks, parameters, time grid."""

    stocks: Dict[str, float]
    params: Dict[str, float]
    t0: float = 0.0
    tf: float = 1.0
    dt: float = 0.1

    def check(self, program: Program) -> None:
        missing = [s for s in program.stock_names if s not in self.stocks]
        missing += [p for p in program.param_names if p not in self.params]
        if missing:
            raise SimulationError(f"scenario does not bind: {', '.join(missing)}")
        extra = set(self.stocks) - set(program.stock_names)
        extra |= set(self.params) - set(program.param_names)
        if extra:
            raise SimulationError(f"scenario binds unknown names: {', '.join(sorted(extra))}")
        if not self.tf > self.t0:
            raise SimulationError("scenario needs tf > t0")
        if not self.dt > 0:
            raise SimulationError("scenario needs dt > 0")

    def to_json(self) -> dict:
        return {"stocks": dict(self.stocks), "params": dict(self.params), "t0": self.t0, "tf": self.tf, "dt": self.dt}

    @classmethod
    def from_json(cls, obj) -> "Scenario":
        return cls(
            {k: float(v) for k, v in obj["stocks"].items()},
            {k: float(v) for k, v in obj["params"].items()},
            float(obj["t0"]),
            float(obj["tf"]),
            float(obj["dt"]),
        )


@dataclass
class ODESystem:
    sfd: ACSet
    program: Program
    sum_formulas: List[Tuple[str, Expr]]
    aux_formulas: List[Tuple[str, Expr]]  # dependency order
    inflows: Dict[str, List[Ref]]
    outflows: Dict[str, List[Ref]]
    warnings: List[str] = field(default_factory=list)

    @property
    def stocks(self) -> List[str]:
        return self.program.stock_names

    def derivative_expr(self, stock: str) -> Expr:
        ins, outs = self.inflows[stock], self.outflows[stock]
        total_in = Op("+", tuple(ins)) if ins else Literal(0.0)
        total_out = Op("+", tuple(outs)) if outs else Literal(0.0)
        return Op("-", (total_in, total_out))

    def equation(self, stock: str) -> str:
        """Readable right-hand side, e.g. ``dI/dt = v_newInfections - v_newRecovery``."""
        terms = [r.name for r in self.inflows[stock]]
        rhs = " + ".join(terms)
        for r in self.outflows[stock]:
            rhs = f"{rhs} - {r.name}" if rhs else f"-{r.name}"
        return f"d{stock}/dt = {rhs or '0'}"

    def rates(self, state: Mapping[str, float], params: Mapping[str, float]) -> Dict[str, float]:
        """Derivatives at one state through the formula engine (not the kernels)."""
        env: Dict[Part, float] = {}
        for i, s in enumerate(self.program.stock_names, start=1):
            env[Part("S", i)] = float(state[s])
        for i, p in enumerate(self.program.param_names, start=1):
            env[Part("P", i)] = float(params[p])
        sfd = self.sfd
        for i, (_, e) in enumerate(self.sum_formulas, start=1):
            env[Part("SV", i)] = evaluate(e, env)
        for name, e in self.aux_formulas:
            env[sfd.lookup("vname", name)] = evaluate(e, env)
        return {s: evaluate(self.derivative_expr(s), env) for s in self.stocks}


def compile_odes(sfd: ACSet) -> ODESystem:
    """One equation per stock from the inflow/outflow wiring."""
    sum_exprs, aux_exprs, program = lower(sfd)
    fv = sfd.column("fv")
    vnames = sfd.column("vname")
    flow_ref = lambda f: Ref(Part("V", fv[f - 1]), vnames[fv[f - 1] - 1])
    inflows = {s: [] for s in program.stock_names}
    outflows = {s: [] for s in program.stock_names}
    wired = set()
    for f, s in zip(sfd.column("ifn"), sfd.column("is")):
        inflows[program.stock_names[s - 1]].append(flow_ref(f))
        wired.add(f)
    for f, s in zip(sfd.column("ofn"), sfd.column("os")):
        outflows[program.stock_names[s - 1]].append(flow_ref(f))
        wired.add(f)
    notes = []
    for f, name in enumerate(sfd.column("fname"), start=1):
        if f not in wired:
            notes.append(f"flow {name!r} has neither inflow nor outflow wiring")
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    return ODESystem(
        sfd=sfd,
        program=program,
        sum_formulas=list(zip(program.sum_names, sum_exprs)),
        aux_formulas=[(vnames[v - 1], e) for v, e in aux_exprs],
        inflows=inflows,
        outflows=outflows,
        warnings=notes,
    )


@dataclass
class Trajectory:
    times: np.ndarray
    columns: List[str]
    values: np.ndarray  # (len(times), len(columns))
    n_stocks: int = 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    @property
    def stock_columns(self) -> List[str]:
        return self.columns[: self.n_stocks]

    def final(self) -> Dict[str, float]:
        return {c: float(self.values[-1, i]) for i, c in enumerate(self.columns)}

    def to_csv(self, prefix_cols: Optional[List[Tuple[str, object]]] = None) -> str:
        prefix_cols = prefix_cols or []
        buf = io.StringIO()
        header = [k for k, _ in prefix_cols] + ["t"] + self.columns
        buf.write(",".join(_csv_field(h) for h in header) + "\n")
        pre = [str(v) for _, v in prefix_cols]
        for t, row in zip(self.times, self.values):
            cells = pre + [_fmt(t)] + [_fmt(v) for v in row]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _csv_field(s: str) -> str:
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def time_grid(t0: float, tf: float, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """Output times and step lengths; the last step is shortened to land on tf."""
    span = tf - t0
    n = int(math.floor(span / dt + 1e-9))
    steps = np.full(n, dt)
    times = t0 + dt * np.arange(n + 1)
    rest = tf - times[-1]
    if rest > 1e-9 * max(1.0, abs(tf)):
        steps = np.append(steps, rest)
        times = np.append(times, tf)
    else:
        times[-1] = tf
    return times, steps


def _integrate(method: int, sys: ODESystem, scen: Scenario) -> Trajectory:
    prog = sys.program
    scen.check(prog)
    times, steps = time_grid(scen.t0, scen.tf, scen.dt)
    y0 = np.array([float(scen.stocks[s]) for s in prog.stock_names])
    vals = prog.base_values(scen.params)
    out_y = np.zeros((len(times), len(y0)))
    out_vals = np.zeros((len(times), prog.nslots))
    status, step = K.integrate(method, y0, vals, steps, *prog.kernel_args(), *prog.incidence(), out_y, out_vals)
    if status == 1:
        raise SimulationError(f"division by zero at t={times[step]!r}", times[step])
    if status == 2:
        raise SimulationError(f"non-finite state at t={times[step]!r}", times[step])
    n_s, n_p = len(prog.stock_names), len(prog.param_names)
    cols = prog.stock_names + prog.sum_names + prog.aux_names
    values = np.hstack([out_y, out_vals[:, n_s + n_p :]])
    return Trajectory(times, cols, values, n_stocks=n_s)


def integrate_rk4(sys: ODESystem, scen: Scenario) -> Trajectory:
    """Classic fixed-step fourth-order Runge-Kutta from t0 to tf."""
    return _integrate(1, sys, scen)


def integrate_euler(sys: ODESystem, scen: Scenario) -> Trajectory:
    return _integrate(0, sys, scen)
