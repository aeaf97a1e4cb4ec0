"""Hot loops: a small stack machine evaluating compiled formulas, fixed-step
integrators and the Gillespie direct method.

Every function here takes only numpy arrays and scalars so it compiles
under numba in nopython mode; with numba disabled the same code runs
interpreted and produces bit-identical results.
"""

import math

import numpy as np

from .._jit import njit

OP_LOAD = 0
OP_CONST = 1
OP_ADD = 2
OP_MUL = 3
OP_SUB = 4
OP_DIV = 5

OK = -1


@njit
def eval_program(vals, code, arg, cst, blk_target, blk_start, blk_end, stack):
    """Fill computed slots of ``vals`` block by block.

    Returns ``OK`` or the index of the block that divided by zero.
    """
    for b in range(blk_target.shape[0]):
        sp = 0
        for pc in range(blk_start[b], blk_end[b]):
            c = code[pc]
            if c == OP_LOAD:
                stack[sp] = vals[arg[pc]]
                sp += 1
            elif c == OP_CONST:
                stack[sp] = cst[pc]
                sp += 1
            elif c == OP_ADD:
                n = arg[pc]
                acc = stack[sp - n]
                for k in range(sp - n + 1, sp):
                    acc = acc + stack[k]
                sp -= n
                stack[sp] = acc
                sp += 1
            elif c == OP_MUL:
                n = arg[pc]
                acc = stack[sp - n]
                for k in range(sp - n + 1, sp):
                    acc = acc * stack[k]
                sp -= n
                stack[sp] = acc
                sp += 1
            elif c == OP_SUB:
                stack[sp - 2] = stack[sp - 2] - stack[sp - 1]
                sp -= 1
            else:
                if stack[sp - 1] == 0.0:
                    return b
                stack[sp - 2] = stack[sp - 2] / stack[sp - 1]
                sp -= 1
        vals[blk_target[b]] = stack[0]
    return OK


@njit
def derivatives(y, vals, out, code, arg, cst, blk_target, blk_start, blk_end, stack,
                flow_slot, in_flow, in_stock, out_flow, out_stock, inflow_acc, outflow_acc):
    """``out[s] = sum(inflows) - sum(outflows)``; returns eval status."""
    ns = y.shape[0]
    for s in range(ns):
        vals[s] = y[s]
    status = eval_program(vals, code, arg, cst, blk_target, blk_start, blk_end, stack)
    if status != OK:
        return status
    for s in range(ns):
        inflow_acc[s] = 0.0
        outflow_acc[s] = 0.0
    for r in range(in_flow.shape[0]):
        inflow_acc[in_stock[r]] += vals[flow_slot[in_flow[r]]]
    for r in range(out_flow.shape[0]):
        outflow_acc[out_stock[r]] += vals[flow_slot[out_flow[r]]]
    for s in range(ns):
        out[s] = inflow_acc[s] - outflow_acc[s]
    return OK


@njit
def integrate(method, y0, vals, steps, code, arg, cst, blk_target, blk_start, blk_end,
              flow_slot, in_flow, in_stock, out_flow, out_stock, out_y, out_vals):
    """Fixed-step Euler (``method == 0``) or classic RK4 (``method == 1``).

    ``steps[k]`` is the length of step k; row k of ``out_y``/``out_vals``
    holds the state and every slot after k steps. Returns
    ``(status, step)``: status 0 ok, 1 division by zero, 2 non-finite state.
    """
    ns = y0.shape[0]
    stack = np.empty(code.shape[0] + 1)
    k1 = np.empty(ns)
    k2 = np.empty(ns)
    k3 = np.empty(ns)
    k4 = np.empty(ns)
    tmp = np.empty(ns)
    acc_in = np.empty(ns)
    acc_out = np.empty(ns)
    y = y0.copy()
    st = derivatives(y, vals, k1, code, arg, cst, blk_target, blk_start, blk_end, stack,
                     flow_slot, in_flow, in_stock, out_flow, out_stock, acc_in, acc_out)
    if st != OK:
        return 1, 0
    out_y[0, :] = y
    out_vals[0, :] = vals
    for n in range(steps.shape[0]):
        h = steps[n]
        st = derivatives(y, vals, k1, code, arg, cst, blk_target, blk_start, blk_end, stack,
                         flow_slot, in_flow, in_stock, out_flow, out_stock, acc_in, acc_out)
        if st != OK:
            return 1, n
        if method == 0:
            for s in range(ns):
                y[s] = y[s] + h * k1[s]
        else:
            for s in range(ns):
                tmp[s] = y[s] + 0.5 * h * k1[s]
            st = derivatives(tmp, vals, k2, code, arg, cst, blk_target, blk_start, blk_end, stack,
                             flow_slot, in_flow, in_stock, out_flow, out_stock, acc_in, acc_out)
            if st != OK:
                return 1, n
            for s in range(ns):
                tmp[s] = y[s] + 0.5 * h * k2[s]
            st = derivatives(tmp, vals, k3, code, arg, cst, blk_target, blk_start, blk_end, stack,
                             flow_slot, in_flow, in_stock, out_flow, out_stock, acc_in, acc_out)
            if st != OK:
                return 1, n
            for s in range(ns):
                tmp[s] = y[s] + h * k3[s]
            st = derivatives(tmp, vals, k4, code, arg, cst, blk_target, blk_start, blk_end, stack,
                             flow_slot, in_flow, in_stock, out_flow, out_stock, acc_in, acc_out)
            if st != OK:
                return 1, n
            for s in range(ns):
                y[s] = y[s] + (h / 6.0) * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s])
        for s in range(ns):
            if not math.isfinite(y[s]):
                return 2, n + 1
        # record the new state together with its auxiliaries
        for s in range(ns):
            vals[s] = y[s]
        st = eval_program(vals, code, arg, cst, blk_target, blk_start, blk_end, stack)
        if st != OK:
            return 1, n + 1
        out_y[n + 1, :] = y
        out_vals[n + 1, :] = vals
    return 0, steps.shape[0]


SSA_DONE = 0
SSA_NEED_UNIFORMS = 1
SSA_NEED_SPACE = 2
SSA_DIV_ZERO = -1
SSA_BAD_HAZARD = -2


@njit
def ssa_run(counts, vals, t, tmax, code, arg, cst, blk_target, blk_start, blk_end,
            flow_slot, delta, uniforms, upos, out_t, out_f, out_state, nout):
    """Gillespie direct method with guarded firing, resumable.

    Runs until absorption, ``t > tmax``, or a buffer runs out. Returns
    ``(status, t, upos, nout, flow)``; ``flow`` names the offending flow
    for ``SSA_BAD_HAZARD``.
    """
    ns = counts.shape[0]
    nf = flow_slot.shape[0]
    stack = np.empty(code.shape[0] + 1)
    hz = np.empty(nf)
    while True:
        for s in range(ns):
            vals[s] = counts[s]
        st = eval_program(vals, code, arg, cst, blk_target, blk_start, blk_end, stack)
        if st != OK:
            return SSA_DIV_ZERO, t, upos, nout, st
        total = 0.0
        for f in range(nf):
            h = vals[flow_slot[f]]
            if not (h >= 0.0) or not math.isfinite(h):
                return SSA_BAD_HAZARD, t, upos, nout, f
            for s in range(ns):
                if counts[s] + delta[f, s] < 0.0:
                    h = 0.0
                    break
            hz[f] = h
            total += h
        if total == 0.0:
            return SSA_DONE, t, upos, nout, -1
        if upos + 2 > uniforms.shape[0]:
            return SSA_NEED_UNIFORMS, t, upos, nout, -1
        u1 = uniforms[upos]
        u2 = uniforms[upos + 1]
        upos += 2
        tnew = t - math.log(1.0 - u1) / total
        if tnew > tmax:
            return SSA_DONE, tmax, upos, nout, -1
        target = u2 * total
        chosen = -1
        cum = 0.0
        for f in range(nf):
            if hz[f] > 0.0:
                chosen = f
                cum += hz[f]
                if target < cum:
                    break
        t = tnew
        for s in range(ns):
            counts[s] += delta[chosen, s]
        out_t[nout] = t
        out_f[nout] = chosen
        out_state[nout, :] = counts
        nout += 1
        if nout == out_t.shape[0]:
            return SSA_NEED_SPACE, t, upos, nout, -1
