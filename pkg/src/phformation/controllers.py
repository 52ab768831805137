"""Velocity-tracking and barrier formation control laws.

The formation law hangs a virtual spring-damper on every graph edge.  The
spring potential for an edge with squared-distance error
``e = |q_rel|^2 - target^2`` is

    (gain / 4) * (1/gap - 1/span)^2

with ``gap = |q_rel|^2 - safe^2`` and ``span = target^2 - safe^2``.  It is
zero exactly at the target distance and blows up as the pair approaches the
safety distance, so the force field is attraction-only yet keeps the safe
set forward invariant.  Per edge the applied force is
``-q_rel * (dP/de + damping * de/dt)``, which equals half the spatial
gradient of the potential; the factor is a positive rescaling absorbed by
the gains and shared by the quadratic baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import AgentParams, SystemState, _check_psd
from .graph import FormationGraph

__all__ = [
    "CONTROLLERS",
    "BarrierViolation",
    "VelocityTrackingGains",
    "EdgeGains",
    "SafetyParams",
    "EdgeError",
    "velocity_tracking_input",
    "edge_error",
    "barrier_potential",
    "barrier_gradient",
    "edge_error_rate",
    "formation_input",
    "baseline_quadratic_input",
    "combined_input",
    "closed_loop_hamiltonian",
]

CONTROLLERS = ("proposed", "baseline", "velocity_only", "none")


class BarrierViolation(RuntimeError):
    """Raised when a barrier term is evaluated at or past its singularity."""

    def __init__(self, gap: float, edge: int | None = None):
        self.gap = gap
        self.edge = edge
        where = f" on edge {edge}" if edge is not None else ""
        super().__init__(
            f"barrier evaluated outside the safe set{where}: "
            f"squared distance minus squared safety distance is {gap:.3e}"
        )


@dataclass(frozen=True)
class VelocityTrackingGains:
    """Target common velocity and the damping-injection matrix of one agent."""

    target_velocity: np.ndarray
    damping: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.target_velocity, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("target_velocity must be a vector")
        object.__setattr__(self, "target_velocity", v)
        object.__setattr__(self, "damping", _check_psd(self.damping, "velocity damping"))


@dataclass(frozen=True)
class EdgeGains:
    """Spring weight, target distance and damper coefficient of one edge."""

    gain: float
    target_distance: float
    damping: float = 1.0

    def __post_init__(self) -> None:
        if not self.gain > 0:
            raise ValueError(f"edge gain must be > 0, got {self.gain}")
        if not self.target_distance > 0:
            raise ValueError(
                f"target distance must be > 0, got {self.target_distance}"
            )
        # damping = 0 is accepted here so the spring term can be tested in
        # isolation; scenario validation enforces strictly positive dampers.
        if self.damping < 0:
            raise ValueError(f"edge damping must be >= 0, got {self.damping}")


@dataclass(frozen=True)
class SafetyParams:
    safe_distance: float

    def __post_init__(self) -> None:
        if not self.safe_distance > 0:
            raise ValueError(f"safe_distance must be > 0, got {self.safe_distance}")


@dataclass(frozen=True)
class EdgeError:
    """Squared-distance coordinates of one edge.

    error: |q_rel|^2 - target^2, zero exactly at the target distance.
    gap:   |q_rel|^2 - safe^2, positive on the safe set.
    span:  target^2 - safe^2, the gap value at the target (a constant).
    """

    error: float
    gap: float
    span: float


def velocity_tracking_input(
    momentum: np.ndarray, params: AgentParams, gains: VelocityTrackingGains
) -> np.ndarray:
    """Damping-injection input driving one agent to the target velocity.

    Compensates the friction felt at the target velocity and injects
    damping on the momentum error:
    ``u = D v_target - Dv (p - m v_target) / m^2``.
    """
    p = np.asarray(momentum, dtype=np.float64)
    v_target = gains.target_velocity
    momentum_error = p - params.mass * v_target
    return params.dissipation @ v_target - (
        gains.damping @ momentum_error
    ) / params.mass**2


def edge_error(
    q_tail: np.ndarray, q_head: np.ndarray, target_distance: float, safe_distance: float
) -> EdgeError:
    """Squared-distance error coordinates for the pair (tail, head)."""
    rel = np.asarray(q_tail, dtype=np.float64) - np.asarray(q_head, dtype=np.float64)
    sq = float(rel @ rel)
    return EdgeError(
        error=sq - target_distance**2,
        gap=sq - safe_distance**2,
        span=target_distance**2 - safe_distance**2,
    )


def barrier_potential(err: EdgeError, gains: EdgeGains) -> float:
    """Edge spring energy; zero iff the error is zero, infinite at the barrier."""
    if err.gap <= 0.0:
        raise BarrierViolation(err.gap)
    return 0.25 * gains.gain * (1.0 / err.gap - 1.0 / err.span) ** 2


def barrier_gradient(err: EdgeError, gains: EdgeGains) -> float:
    """Derivative of :func:`barrier_potential` in the squared-distance error.

    Equals ``-(gain/2) (1/gap - 1/span) / gap^2``; its sign matches the sign
    of the error, so the induced edge force is always restoring.
    """
    if err.gap <= 0.0:
        raise BarrierViolation(err.gap)
    return -0.5 * gains.gain * (1.0 / err.gap - 1.0 / err.span) / err.gap**2


def edge_error_rate(
    q_tail: np.ndarray,
    q_head: np.ndarray,
    v_tail: np.ndarray,
    v_head: np.ndarray,
) -> float:
    """Exact time derivative ``2 q_rel . (v_tail - v_head)`` of the edge error."""
    rel = np.asarray(q_tail, dtype=np.float64) - np.asarray(q_head, dtype=np.float64)
    vrel = np.asarray(v_tail, dtype=np.float64) - np.asarray(v_head, dtype=np.float64)
    return 2.0 * float(rel @ vrel)


def _accumulate_edge_inputs(
    state: SystemState,
    graph: FormationGraph,
    gains: Sequence[EdgeGains],
    spring_gradient,
    masses: np.ndarray | None,
) -> np.ndarray:
    """Sum per-edge forces ``-q_rel * (gradient + damping * de/dt)`` per agent."""
    if len(gains) != graph.edge_count:
        raise ValueError(
            f"expected {graph.edge_count} edge gain sets, got {len(gains)}"
        )
    count, dim = state.positions.shape
    if masses is None:
        masses = np.ones(count)
    velocity = state.momenta / masses[:, None]
    total = np.zeros((count, dim))
    for k, (tail, head) in enumerate(graph.edges):
        ti, hi = tail - 1, head - 1
        rel = state.positions[ti] - state.positions[hi]
        rate = 2.0 * float(rel @ (velocity[ti] - velocity[hi]))
        effort = spring_gradient(k, rel) + gains[k].damping * rate
        force = rel * effort
        total[ti] -= force
        total[hi] += force
    return total


def formation_input(
    state: SystemState,
    graph: FormationGraph,
    gains: Sequence[EdgeGains],
    safety: SafetyParams,
    params: Sequence[AgentParams] | None = None,
) -> np.ndarray:
    """Stacked barrier spring-damper input, shape (N, n).

    Each edge contributes an equal-and-opposite force pair along the edge
    direction, so the inputs sum to zero over agents.  Raises
    :class:`BarrierViolation` if any edge distance is at or below the
    safety distance.  ``params`` supplies masses for the velocity terms;
    unit masses are assumed when omitted.
    """
    masses = None if params is None else np.array([a.mass for a in params])

    def gradient(k: int, rel: np.ndarray) -> float:
        err = edge_error(rel, np.zeros_like(rel), gains[k].target_distance, safety.safe_distance)
        if err.gap <= 0.0:
            raise BarrierViolation(err.gap, edge=k + 1)
        return barrier_gradient(err, gains[k])

    return _accumulate_edge_inputs(state, graph, gains, gradient, masses)


def baseline_quadratic_input(
    state: SystemState,
    graph: FormationGraph,
    gains: Sequence[EdgeGains],
    params: Sequence[AgentParams] | None = None,
) -> np.ndarray:
    """Quadratic-spring comparison law: potential ``(gain/4) e^2`` per edge.

    Same structure as :func:`formation_input` but with gradient
    ``(gain/2) e`` and no singularity, so collisions are representable.
    """
    masses = None if params is None else np.array([a.mass for a in params])

    def gradient(k: int, rel: np.ndarray) -> float:
        return 0.5 * gains[k].gain * (float(rel @ rel) - gains[k].target_distance**2)

    return _accumulate_edge_inputs(state, graph, gains, gradient, masses)


def combined_input(
    state: SystemState,
    graph: FormationGraph,
    params: Sequence[AgentParams],
    velocity_gains: Sequence[VelocityTrackingGains],
    edge_gains: Sequence[EdgeGains],
    safety: SafetyParams,
) -> np.ndarray:
    """Full proposed control law: velocity tracking plus barrier formation."""
    tracking = np.stack(
        [
            velocity_tracking_input(state.momenta[i], params[i], velocity_gains[i])
            for i in range(state.agent_count)
        ]
    )
    return tracking + formation_input(state, graph, edge_gains, safety, params)


def closed_loop_hamiltonian(
    state: SystemState,
    graph: FormationGraph,
    params: Sequence[AgentParams],
    velocity_gains: Sequence[VelocityTrackingGains],
    edge_gains: Sequence[EdgeGains],
    safety: SafetyParams,
) -> float:
    """Total stored energy: velocity-error energy plus edge spring energies.

    Zero exactly when every agent moves at the target velocity and every
    edge sits at its target distance.
    """
    total = 0.0
    for i in range(state.agent_count):
        momentum_error = (
            state.momenta[i] - params[i].mass * velocity_gains[i].target_velocity
        )
        scaled = momentum_error / params[i].mass
        total += 0.5 * float(scaled @ scaled)
    for k, (tail, head) in enumerate(graph.edges):
        err = edge_error(
            state.positions[tail - 1],
            state.positions[head - 1],
            edge_gains[k].target_distance,
            safety.safe_distance,
        )
        if err.gap <= 0.0:
            raise BarrierViolation(err.gap, edge=k + 1)
        total += barrier_potential(err, edge_gains[k])
    return total
