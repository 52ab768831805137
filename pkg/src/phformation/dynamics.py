"""Open-loop point-mass agent model in port-Hamiltonian form.

Each agent stores only kinetic energy, so the position gradient of its
Hamiltonian vanishes and the open loop reduces to ``dq = p/m`` and
``dp = -D p/m + u`` with a positive semi-definite friction matrix D.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AgentParams",
    "AgentState",
    "SystemState",
    "agent_hamiltonian",
    "momentum_gradient",
    "open_loop_vector_field",
    "total_kinetic_energy",
]

_PSD_TOL = 1e-10


def _check_psd(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.abs(matrix).max()))
    if np.abs(matrix - matrix.T).max() > _PSD_TOL * scale:
        raise ValueError(f"{name} must be symmetric")
    eigenvalues = np.linalg.eigvalsh(matrix)
    if eigenvalues.min() < -_PSD_TOL * scale:
        raise ValueError(
            f"{name} must be positive semi-definite (min eigenvalue {eigenvalues.min():.3e})"
        )
    return matrix


@dataclass(frozen=True)
class AgentParams:
    """Mass and viscous friction matrix of one agent.

    The inertia matrix is ``mass * I``; general inertia is out of scope.
    """

    mass: float
    dissipation: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        object.__setattr__(
            self, "dissipation", _check_psd(self.dissipation, "dissipation")
        )


@dataclass(frozen=True)
class AgentState:
    position: np.ndarray
    momentum: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.position, dtype=np.float64)
        p = np.asarray(self.momentum, dtype=np.float64)
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError("position and momentum must be 1-D with equal length")
        if not (np.isfinite(q).all() and np.isfinite(p).all()):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "position", q)
        object.__setattr__(self, "momentum", p)


@dataclass(frozen=True)
class SystemState:
    """Stacked positions and momenta of all agents, shape (N, n) each."""

    positions: np.ndarray
    momenta: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        q = np.asarray(self.positions, dtype=np.float64)
        p = np.asarray(self.momenta, dtype=np.float64)
        if q.shape != p.shape or q.ndim != 2:
            raise ValueError("positions and momenta must share shape (N, n)")
        object.__setattr__(self, "positions", q)
        object.__setattr__(self, "momenta", p)

    @property
    def agent_count(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    def agent(self, i: int) -> AgentState:
        """State of agent ``i`` (1-based)."""
        return AgentState(self.positions[i - 1], self.momenta[i - 1])


def agent_hamiltonian(state: AgentState, params: AgentParams) -> float:
    """Kinetic energy ``p.p / (2 m)`` of one agent."""
    p = state.momentum
    return float(p @ p) / (2.0 * params.mass)


def momentum_gradient(state: AgentState, params: AgentParams) -> np.ndarray:
    """Velocity ``p / m``, which is also the agent's passive output."""
    return state.momentum / params.mass


def open_loop_vector_field(
    state: SystemState,
    params: list[AgentParams],
    u: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivative (dq, dp) of the uncontrolled plant under input ``u``.

    ``u`` may be shaped (N, n) or flattened to length N*n.  Per agent the
    derivative is ``dq = p/m`` and ``dp = -D p/m + u``; the Hamiltonian has
    no position dependence, so positions enter nowhere on the right side.
    """
    count, dim = state.positions.shape
    if len(params) != count:
        raise ValueError(f"expected {count} agent parameter sets, got {len(params)}")
    u = np.asarray(u, dtype=np.float64)
    if u.size != count * dim:
        raise ValueError(f"input size {u.size} does not match {count}x{dim} agents")
    u = u.reshape(count, dim)
    if not np.isfinite(u).all():
        raise ValueError("input must be finite")
    mass = np.array([a.mass for a in params])
    velocity = state.momenta / mass[:, None]
    friction = np.einsum(
        "ijk,ik->ij", np.stack([a.dissipation for a in params]), velocity
    )
    return velocity, -friction + u


def total_kinetic_energy(state: SystemState, params: list[AgentParams]) -> float:
    """Sum of the agents' kinetic Hamiltonians."""
    mass = np.array([a.mass for a in params])
    return float(0.5 * ((state.momenta**2).sum(axis=1) / mass).sum())
