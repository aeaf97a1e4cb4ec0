"""Time the compiled kernels against their interpreted bodies.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The interpreted body is what runs under CATFLOW_DISABLE_NUMBA=1. Both
variants are checked to produce identical output before timing.
"""

import argparse
import time

import numpy as np

from catflow._jit import NUMBA_ENABLED, python_version
from catflow.models import SIR_SCENARIO, sir_sfd
from catflow.semantics import _kernels as K
from catflow.semantics.ode import Scenario, time_grid
from catflow.semantics.program import lower


def integrate_case(tf):
    _, _, prog = lower(sir_sfd())
    scen = Scenario.from_json(SIR_SCENARIO)
    times, steps = time_grid(0.0, tf, 0.1)
    y0 = np.array([scen.stocks[s] for s in prog.stock_names])
    args = (prog.base_values(scen.params), steps, *prog.kernel_args(), *prog.incidence())

    def run(fn):
        out_y = np.zeros((len(times), len(y0)))
        out_v = np.zeros((len(times), prog.nslots))
        fn(0, y0, *args, out_y, out_v)
        return out_y

    return run


def ssa_case(n_pop):
    _, _, prog = lower(sir_sfd())
    vals = prog.base_values({"beta": 0.05, "c": 10.0, "tRec": 5.0})
    counts = np.array([n_pop - 10.0, 10.0, 0.0])
    u = np.random.Generator(np.random.PCG64(1)).random(4 * n_pop + 10)
    cap = 2 * n_pop + 10

    def run(fn):
        out_t, out_f, out_s = np.empty(cap), np.empty(cap, dtype=np.int64), np.empty((cap, 3))
        res = fn(counts.copy(), vals, 0.0, 1e9, *prog.kernel_args(), prog.flow_slot, prog.flow_deltas(),
                 u, 0, out_t, out_f, out_s, 0)
        return out_t[: res[3]]

    return run


def best_of(run, fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        run(fn)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not NUMBA_ENABLED:
        print("numba is disabled (CATFLOW_DISABLE_NUMBA); both columns time the interpreted code")
    cases = [
        ("integrate rk4, SIR, 1000 steps", integrate_case(100.0), K.integrate),
        ("integrate rk4, SIR, 10000 steps", integrate_case(1000.0), K.integrate),
        ("ssa_run, SIR, N=1000", ssa_case(1000), K.ssa_run),
        ("ssa_run, SIR, N=10000", ssa_case(10_000), K.ssa_run),
    ]
    print(f"{'kernel':36s} {'numba s':>10s} {'python s':>10s} {'speedup':>8s}")
    for label, run, kernel in cases:
        slow = python_version(kernel)
        assert np.array_equal(run(kernel), run(slow)), label  # also warms the JIT
        fast_t = best_of(run, kernel, args.repeat)
        slow_t = best_of(run, slow, max(1, args.repeat // 2))
        print(f"{label:36s} {fast_t:10.5f} {slow_t:10.5f} {slow_t / fast_t:8.1f}x")


if __name__ == "__main__":
    main()
