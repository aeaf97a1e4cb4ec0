"""Stochastic token semantics: each flow fires one token at a time as a
Poisson process whose rate is the flow's formula (Gillespie direct method)."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from ..acset import ACSet
from ..errors import SimulationError
from . import _kernels as K
from .ode import Trajectory, _csv_field, _fmt
from .program import lower

RNG_ALGORITHM = "numpy.PCG64/random-double"
_UNIFORM_BLOCK = 8192
_EVENT_BLOCK = 4096


@dataclass
class DiscreteState:
    counts: Dict[str, int]
    params: Dict[str, float]
    time: float = 0.0

    def __post_init__(self):
        for name, c in self.counts.items():
            if int(c) != c or c < 0:
                raise SimulationError(f"stock {name!r} needs a non-negative integer count, got {c!r}")


@dataclass
class EventLog:
    stock_names: List[str]
    flow_names: List[str]
    initial: np.ndarray
    t0: float
    tmax: float
    seed: int
    times: np.ndarray
    flows: np.ndarray
    states: np.ndarray  # (n_events, n_stocks) after each firing
    algorithm: str = RNG_ALGORITHM

    def __len__(self):
        return len(self.times)

    def final(self) -> Dict[str, int]:
        last = self.states[-1] if len(self.times) else self.initial
        return {s: int(v) for s, v in zip(self.stock_names, last)}

    def same_as(self, other: "EventLog") -> bool:
        return (
            self.stock_names == other.stock_names
            and self.seed == other.seed
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.flows, other.flows)
            and np.array_equal(self.states, other.states)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# rng={self.algorithm} seed={self.seed}\n")
        buf.write(",".join(["t", "flow_name"] + [_csv_field(s) for s in self.stock_names]) + "\n")
        buf.write(",".join([_fmt(self.t0), ""] + [str(int(v)) for v in self.initial]) + "\n")
        for t, f, row in zip(self.times, self.flows, self.states):
            cells = [_fmt(t), _csv_field(self.flow_names[f])] + [str(int(v)) for v in row]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def simulate_ssa(sfd: ACSet, init: DiscreteState, tmax: float, seed: int, program=None) -> EventLog:
    """Run one realisation until absorption (total hazard 0) or ``tmax``."""
    if program is None:
        _, _, program = lower(sfd)
    missing = [s for s in program.stock_names if s not in init.counts]
    missing += [p for p in program.param_names if p not in init.params]
    if missing:
        raise SimulationError(f"initial state does not bind: {', '.join(missing)}")
    counts = np.array([float(init.counts[s]) for s in program.stock_names])
    initial = counts.copy()
    vals = program.base_values(init.params)
    delta = program.flow_deltas()
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random(_UNIFORM_BLOCK)
    upos = 0
    ns = len(counts)
    out_t = np.empty(_EVENT_BLOCK)
    out_f = np.empty(_EVENT_BLOCK, dtype=np.int64)
    out_s = np.empty((_EVENT_BLOCK, ns))
    t_parts, f_parts, s_parts = [], [], []
    t = float(init.time)
    while True:
        status, t, upos, nout, bad = K.ssa_run(
            counts, vals, t, float(tmax), *program.kernel_args(), program.flow_slot, delta,
            uniforms, upos, out_t, out_f, out_s, 0,
        )
        t_parts.append(out_t[:nout].copy())
        f_parts.append(out_f[:nout].copy())
        s_parts.append(out_s[:nout].copy())
        if status == K.SSA_DONE:
            break
        if status == K.SSA_NEED_UNIFORMS:
            uniforms = np.concatenate([uniforms[upos:], rng.random(_UNIFORM_BLOCK)])
            upos = 0
        elif status == K.SSA_NEED_SPACE:
            continue
        elif status == K.SSA_DIV_ZERO:
            raise SimulationError(f"division by zero evaluating {program.block_name(bad)} at t={t!r}", t)
        else:
            state = {s: int(c) for s, c in zip(program.stock_names, counts)}
            raise SimulationError(
                f"flow {program.flow_names[bad]!r} has a negative or non-finite hazard at t={t!r}, state {state}", t
            )
    return EventLog(
        stock_names=list(program.stock_names),
        flow_names=list(program.flow_names),
        initial=initial,
        t0=float(init.time),
        tmax=float(tmax),
        seed=int(seed),
        times=np.concatenate(t_parts),
        flows=np.concatenate(f_parts),
        states=np.concatenate(s_parts).reshape(-1, ns),
    )


def simulate_replicates(sfd: ACSet, init: DiscreteState, tmax: float, seed: int, n: int, threads: int = 1) -> List[EventLog]:
    """``n`` runs with seeds ``seed + k``; results do not depend on ``threads``."""
    _, _, program = lower(sfd)
    job = lambda k: simulate_ssa(sfd, init, tmax, seed + k, program=program)
    if threads <= 1:
        return [job(k) for k in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, range(n)))


def ssa_to_trajectory(log: EventLog, sample_dt: float) -> Trajectory:
    """Right-continuous step function of the counts on a uniform grid."""
    if not sample_dt > 0:
        raise SimulationError("sample_dt must be positive")
    n = int(np.floor((log.tmax - log.t0) / sample_dt + 1e-9))
    grid = log.t0 + sample_dt * np.arange(n + 1)
    states = np.vstack([log.initial[None, :], log.states]) if len(log.times) else log.initial[None, :]
    # index of the last event at or before each grid time (0 = initial state)
    idx = np.searchsorted(log.times, grid, side="right")
    return Trajectory(grid, list(log.stock_names), states[idx], n_stocks=len(log.stock_names))
