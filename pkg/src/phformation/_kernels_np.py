"""Pure-numpy fallback integration kernels.

Vectorized over agents and edges instead of JIT-compiled loops; selected by
setting ``PHFORMATION_BACKEND=numpy`` or when numba is unavailable.  Slower
by two to three orders of magnitude on long runs but algorithmically
identical to :mod:`phformation._kernels_nb`.
"""

from __future__ import annotations

import numpy as np

from ._status import OK, BARRIER_ABORT, LOG_FULL, STEP_BUDGET

BACKEND_NAME = "numpy"


def _eval_field(q, p, mass, diss, vstar, dvel, tails, heads,
                gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on):
    """Closed-loop derivative at (q, p); returns (dq, dp, bad_edge)."""
    velocity = p / mass[:, None]
    dp = -np.einsum("ijk,ik->ij", diss, velocity)
    if vel_on == 1:
        momentum_error = p - mass[:, None] * vstar
        dp += diss @ vstar - np.einsum("ijk,ik->ij", dvel, momentum_error) / (
            mass[:, None] ** 2
        )
    if edge_mode > 0:
        rel = q[tails] - q[heads]
        sq = (rel * rel).sum(axis=1)
        if edge_mode == 1:
            gap = sq - ds2
            low = gap < guard
            if low.any():
                return velocity, dp, int(np.argmax(low))
            effort = -0.5 * gain * (1.0 / gap - 1.0 / span) / (gap * gap)
        else:
            effort = 0.5 * gain * (sq - target2)
        vrel = velocity[tails] - velocity[heads]
        rate = 2.0 * (rel * vrel).sum(axis=1)
        force = rel * (effort + edge_damp * rate)[:, None]
        for k in range(tails.shape[0]):
            dp[tails[k]] -= force[k]
            dp[heads[k]] += force[k]
    return velocity, dp, -1


def _min_gap_edge(q, tails, heads, ds2, guard):
    rel = q[tails] - q[heads]
    gap = (rel * rel).sum(axis=1) - ds2
    low = gap < guard
    return int(np.argmax(low)) if low.any() else -1


def advance(q0, p0, t0, mass, diss, vstar, dvel, tails, heads,
            gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on,
            dt_base, t_end, max_halvings, stride, max_steps,
            t_log, q_log, p_log):
    """Same contract as :func:`phformation._kernels_nb.advance`."""
    q = q0.copy()
    p = p0.copy()
    field_args = (mass, diss, vstar, dvel, tails, heads,
                  gain, target2, span, edge_damp, ds2, guard, edge_mode, vel_on)
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
            k1q, k1p, bad = _eval_field(q, p, *field_args)
            if bad < 0:
                k2q, k2p, bad = _eval_field(
                    q + 0.5 * h_eff * k1q, p + 0.5 * h_eff * k1p, *field_args
                )
            if bad < 0:
                k3q, k3p, bad = _eval_field(
                    q + 0.5 * h_eff * k2q, p + 0.5 * h_eff * k2p, *field_args
                )
            if bad < 0:
                k4q, k4p, bad = _eval_field(
                    q + h_eff * k3q, p + h_eff * k3p, *field_args
                )
            if bad < 0:
                new_q = q + h_eff / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
                new_p = p + h_eff / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
                if edge_mode == 1:
                    bad = _min_gap_edge(new_q, tails, heads, ds2, guard)
            if bad < 0:
                break
            halvings += 1
            if halvings > max_halvings:
                return BARRIER_ABORT, nlog, steps, bad, t
            h_eff *= 0.5
            h = h_eff
        q = new_q
        p = new_p
        t += h_eff
        steps += 1
        if halvings == 0:
            h = min(2.0 * h, dt_base)
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
