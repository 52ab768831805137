"""Numba-compiled closed-loop integration kernels.

Mirrors :mod:`phformation._kernels_np` exactly; the two paths are selected
through :mod:`phformation.backend` and cross-checked in the test suite.
Compiled artifacts are cached on disk, so the first call in a fresh
environment pays a one-time JIT cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._status import OK, BARRIER_ABORT, LOG_FULL, STEP_BUDGET

BACKEND_NAME = "numba"


@njit(cache=True)
def _eval_field(q, p, dq, dp, mass, diss, vstar, dvel, tails, heads,
                gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on):
    # Returns -1 on success, else the 0-based edge index whose barrier
    # argument fell below the guard margin.
    count, dim = q.shape
    for i in range(count):
        m = mass[i]
        for d in range(dim):
            dq[i, d] = p[i, d] / m
    for i in range(count):
        m = mass[i]
        for d in range(dim):
            acc = 0.0
            for d2 in range(dim):
                acc -= diss[i, d, d2] * p[i, d2] / m
            dp[i, d] = acc
    if vel_on == 1:
        for i in range(count):
            m = mass[i]
            for d in range(dim):
                feedforward = 0.0
                feedback = 0.0
                for d2 in range(dim):
                    feedforward += diss[i, d, d2] * vstar[d2]
                    feedback += dvel[i, d, d2] * (p[i, d2] - m * vstar[d2])
                dp[i, d] += feedforward - feedback / (m * m)
    if edge_mode > 0:
        edges = tails.shape[0]
        for k in range(edges):
            ti = tails[k]
            hi = heads[k]
            sq = 0.0
            for d in range(dim):
                rd = q[ti, d] - q[hi, d]
                sq += rd * rd
            if edge_mode == 1:
                gap = sq - ds2
                if gap < guard:
                    return k
                effort = -0.5 * gain[k] * (1.0 / gap - 1.0 / span[k]) / (gap * gap)
            else:
                effort = 0.5 * gain[k] * (sq - target2[k])
            rate = 0.0
            for d in range(dim):
                rate += (q[ti, d] - q[hi, d]) * (p[ti, d] / mass[ti] - p[hi, d] / mass[hi])
            rate *= 2.0
            effort += edge_damp[k] * rate
            for d in range(dim):
                f = (q[ti, d] - q[hi, d]) * effort
                dp[ti, d] -= f
                dp[hi, d] += f
    return -1


@njit(cache=True)
def _min_gap_edge(q, tails, heads, ds2, guard):
    # First edge whose barrier argument is below guard, or -1.
    edges = tails.shape[0]
    dim = q.shape[1]
    for k in range(edges):
        sq = 0.0
        for d in range(dim):
            rd = q[tails[k], d] - q[heads[k], d]
            sq += rd * rd
        if sq - ds2 < guard:
            return k
    return -1


@njit(cache=True)
def advance(q0, p0, t0, mass, diss, vstar, dvel, tails, heads,
            gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on,
            dt_base, t_end, max_halvings, stride, max_steps,
            t_log, q_log, p_log):
    """Integrate the closed loop from t0 to t_end with the step guard.

    Classical fixed-step RK4; any trial step whose stage or end state puts
    a barrier argument below ``guard`` is rejected and retried at half the
    step, recovering toward ``dt_base`` by doubling after clean steps.
    Logs (t, q, p) every ``stride`` accepted steps into the preallocated
    arrays.  Returns (status, rows_logged, steps_taken, fail_edge, fail_time).
    """
    count, dim = q0.shape
    q = q0.copy()
    p = p0.copy()
    k1q = np.empty((count, dim)); k1p = np.empty((count, dim))
    k2q = np.empty((count, dim)); k2p = np.empty((count, dim))
    k3q = np.empty((count, dim)); k3p = np.empty((count, dim))
    k4q = np.empty((count, dim)); k4p = np.empty((count, dim))
    sq_ = np.empty((count, dim)); sp_ = np.empty((count, dim))
    nq = np.empty((count, dim)); npp = np.empty((count, dim))
    capacity = t_log.shape[0]
    nlog = 0
    if nlog >= capacity:
        return LOG_FULL, nlog, 0, -1, t0
    t_log[nlog] = t0
    q_log[nlog] = q
    p_log[nlog] = p
    nlog += 1
    t = t0
    h = dt_base
    steps = 0
    while t_end - t > 1e-9 * dt_base:
        if steps >= max_steps:
            return STEP_BUDGET, nlog, steps, -1, t
        h_eff = h
        if t + h_eff > t_end:
            h_eff = t_end - t
        halvings = 0
        while True:
            bad = _eval_field(q, p, k1q, k1p, mass, diss, vstar, dvel, tails, heads,
                              gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on)
            if bad < 0:
                for i in range(count):
                    for d in range(dim):
                        sq_[i, d] = q[i, d] + 0.5 * h_eff * k1q[i, d]
                        sp_[i, d] = p[i, d] + 0.5 * h_eff * k1p[i, d]
                bad = _eval_field(sq_, sp_, k2q, k2p, mass, diss, vstar, dvel, tails, heads,
                                  gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on)
            if bad < 0:
                for i in range(count):
                    for d in range(dim):
                        sq_[i, d] = q[i, d] + 0.5 * h_eff * k2q[i, d]
                        sp_[i, d] = p[i, d] + 0.5 * h_eff * k2p[i, d]
                bad = _eval_field(sq_, sp_, k3q, k3p, mass, diss, vstar, dvel, tails, heads,
                                  gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on)
            if bad < 0:
                for i in range(count):
                    for d in range(dim):
                        sq_[i, d] = q[i, d] + h_eff * k3q[i, d]
                        sp_[i, d] = p[i, d] + h_eff * k3p[i, d]
                bad = _eval_field(sq_, sp_, k4q, k4p, mass, diss, vstar, dvel, tails, heads,
                                  gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on)
            if bad < 0:
                for i in range(count):
                    for d in range(dim):
                        nq[i, d] = q[i, d] + h_eff / 6.0 * (
                            k1q[i, d] + 2.0 * k2q[i, d] + 2.0 * k3q[i, d] + k4q[i, d])
                        npp[i, d] = p[i, d] + h_eff / 6.0 * (
                            k1p[i, d] + 2.0 * k2p[i, d] + 2.0 * k3p[i, d] + k4p[i, d])
                if edge_mode == 1:
                    bad = _min_gap_edge(nq, tails, heads, ds2, guard)
            if bad < 0:
                break
            halvings += 1
            if halvings > max_halvings:
                return BARRIER_ABORT, nlog, steps, bad, t
            h_eff *= 0.5
            h = h_eff
        for i in range(count):
            for d in range(dim):
                q[i, d] = nq[i, d]
                p[i, d] = npp[i, d]
        t += h_eff
        steps += 1
        if halvings == 0:
            h2 = 2.0 * h
            h = h2 if h2 < dt_base else dt_base
        if steps % stride == 0:
            if nlog >= capacity:
                return LOG_FULL, nlog, steps, -1, t
            t_log[nlog] = t
            q_log[nlog] = q
            p_log[nlog] = p
            nlog += 1
    if steps % stride != 0:
        if nlog >= capacity:
            return LOG_FULL, nlog, steps, -1, t
        t_log[nlog] = t
        q_log[nlog] = q
        p_log[nlog] = p
        nlog += 1
    return OK, nlog, steps, -1, t
