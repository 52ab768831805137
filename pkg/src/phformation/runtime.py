"""Array bundles consumed by the integration kernels, plus derived series.

A :class:`RunArrays` is the flattened, validated form of a scenario for one
specific controller choice: plain float64/int64 arrays the kernels can use
directly.  The helpers below recompute per-edge and energy series from
logged (t, q, p) samples so that everything reported about a trajectory is
a pure function of the logged states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# edge_mode values
EDGES_OFF = 0
EDGES_BARRIER = 1
EDGES_QUADRATIC = 2

__all__ = [
    "RunArrays",
    "EDGES_OFF",
    "EDGES_BARRIER",
    "EDGES_QUADRATIC",
    "edge_series",
    "energy_series",
    "momentum_error_series",
    "input_series",
    "pairwise_distance_series",
]


@dataclass
class RunArrays:
    """Kernel-ready arrays for one run.

    edge_mode selects the spring law (off, barrier, quadratic); vel_on
    enables the velocity-tracking term.  ``gain`` and ``edge_damp`` already
    correspond to the selected spring law.
    """

    controller: str
    q0: np.ndarray  # (N, n)
    p0: np.ndarray  # (N, n)
    mass: np.ndarray  # (N,)
    diss: np.ndarray  # (N, n, n)
    vstar: np.ndarray  # (n,)
    dvel: np.ndarray  # (N, n, n)
    tails: np.ndarray  # (M,) int64, 0-based
    heads: np.ndarray  # (M,) int64, 0-based
    gain: np.ndarray  # (M,)
    target2: np.ndarray  # (M,) squared target distances
    span: np.ndarray  # (M,) target2 - safe2
    edge_damp: np.ndarray  # (M,)
    safe_distance: float
    edge_mode: int
    vel_on: int

    @property
    def agent_count(self) -> int:
        return self.q0.shape[0]

    @property
    def dimension(self) -> int:
        return self.q0.shape[1]

    @property
    def edge_count(self) -> int:
        return self.tails.shape[0]

    @property
    def safe2(self) -> float:
        return self.safe_distance * self.safe_distance


def edge_series(arrays: RunArrays, qs: np.ndarray):
    """Per-edge squared errors and distances along logged positions.

    Parameters
    ----------
    qs : ndarray, shape (T, N, n)

    Returns
    -------
    errors, distances : ndarray, shape (T, M)
    """
    rel = qs[:, arrays.tails] - qs[:, arrays.heads]
    sq = (rel * rel).sum(axis=-1)
    return sq - arrays.target2, np.sqrt(sq)


def momentum_error_series(arrays: RunArrays, ps: np.ndarray) -> np.ndarray:
    """Norm of each agent's momentum error versus the target velocity, (T, N)."""
    deviation = ps - arrays.mass[None, :, None] * arrays.vstar[None, None, :]
    return np.sqrt((deviation * deviation).sum(axis=-1))


def energy_series(arrays: RunArrays, qs: np.ndarray, ps: np.ndarray):
    """(velocity energy, spring energy, total) along logged states.

    The spring energy follows the active edge mode: barrier potential for
    the proposed law, quadratic potential for the baseline, zero when the
    edges are off.
    """
    deviation = (
        ps - arrays.mass[None, :, None] * arrays.vstar[None, None, :]
    ) / arrays.mass[None, :, None]
    velocity_energy = 0.5 * (deviation * deviation).sum(axis=(1, 2))
    if arrays.edge_mode == EDGES_BARRIER:
        rel = qs[:, arrays.tails] - qs[:, arrays.heads]
        gap = (rel * rel).sum(axis=-1) - arrays.safe2
        spring = (0.25 * arrays.gain * (1.0 / gap - 1.0 / arrays.span) ** 2).sum(axis=-1)
    elif arrays.edge_mode == EDGES_QUADRATIC:
        errors, _ = edge_series(arrays, qs)
        spring = (0.25 * arrays.gain * errors**2).sum(axis=-1)
    else:
        spring = np.zeros(qs.shape[0])
    return velocity_energy, spring, velocity_energy + spring


def input_series(arrays: RunArrays, qs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Control input at every logged state, shape (T, N, n)."""
    steps = qs.shape[0]
    u = np.zeros((steps, arrays.agent_count, arrays.dimension))
    if arrays.vel_on == 1:
        momentum_error = ps - arrays.mass[None, :, None] * arrays.vstar[None, None, :]
        u += (arrays.diss @ arrays.vstar)[None, :, :]
        u -= np.einsum("ijk,tik->tij", arrays.dvel, momentum_error) / (
            arrays.mass[None, :, None] ** 2
        )
    if arrays.edge_mode != EDGES_OFF:
        rel = qs[:, arrays.tails] - qs[:, arrays.heads]
        sq = (rel * rel).sum(axis=-1)
        if arrays.edge_mode == EDGES_BARRIER:
            gap = sq - arrays.safe2
            effort = -0.5 * arrays.gain * (1.0 / gap - 1.0 / arrays.span) / gap**2
        else:
            effort = 0.5 * arrays.gain * (sq - arrays.target2)
        velocity = ps / arrays.mass[None, :, None]
        vrel = velocity[:, arrays.tails] - velocity[:, arrays.heads]
        rate = 2.0 * (rel * vrel).sum(axis=-1)
        force = rel * (effort + arrays.edge_damp * rate)[..., None]
        for k in range(arrays.edge_count):
            u[:, arrays.tails[k]] -= force[:, k]
            u[:, arrays.heads[k]] += force[:, k]
    return u


def pairwise_distance_series(qs: np.ndarray) -> np.ndarray:
    """Minimum distance over all unordered agent pairs at each logged state."""
    count = qs.shape[1]
    minimum = np.full(qs.shape[0], np.inf)
    for i in range(count):
        for j in range(i + 1, count):
            d = np.sqrt(((qs[:, i] - qs[:, j]) ** 2).sum(axis=-1))
            minimum = np.minimum(minimum, d)
    return minimum
