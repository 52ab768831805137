"""Fixed-step RK4 integration with a barrier guard.

A trial step is rejected whenever any stage state or the step's end state
would push a barrier argument (squared edge distance minus squared safety
distance) below the guard margin; the step is retried at half the size, up
to a configured number of halvings, and the step size recovers toward the
base value by doubling after clean steps.  This keeps every evaluated state
strictly inside the safe set without an adaptive error controller, so runs
are exactly reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _status, backend, trajectory
from .runtime import RunArrays

__all__ = ["IntegratorConfig", "SimulationAbort", "rk4_step", "integrate"]


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon, guard and logging settings for one run.

    ``log_stride`` of None applies the default rule: every step is kept for
    horizons up to 10 s, every 10th step beyond that.
    """

    dt: float = 1e-3
    t_end: float = 100.0
    guard_margin: float = 1e-6
    max_halvings: int = 30
    log_stride: int | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not self.guard_margin > 0:
            raise ValueError(f"guard_margin must be > 0, got {self.guard_margin}")
        if self.max_halvings < 1:
            raise ValueError(f"max_halvings must be >= 1, got {self.max_halvings}")
        if self.log_stride is not None and self.log_stride < 1:
            raise ValueError(f"log_stride must be >= 1, got {self.log_stride}")

    @property
    def stride(self) -> int:
        if self.log_stride is not None:
            return self.log_stride
        return 1 if self.t_end <= 10.0 else 10


class SimulationAbort(RuntimeError):
    """A run could not continue; carries the offending edge and time."""

    def __init__(self, message: str, edge: int | None = None, time: float | None = None):
        super().__init__(message)
        self.edge = edge
        self.time = time


def rk4_step(field, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``dy/dt = field(t, y)``.

    Works on arrays of any shape; local error is O(dt^5).
    """
    y = np.asarray(y, dtype=np.float64)
    k1 = np.asarray(field(t, y))
    k2 = np.asarray(field(t + 0.5 * dt, y + 0.5 * dt * k1))
    k3 = np.asarray(field(t + 0.5 * dt, y + 0.5 * dt * k2))
    k4 = np.asarray(field(t + dt, y + dt * k3))
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance_with_retry(kernels, arrays: RunArrays, config: IntegratorConfig):
    """Call the kernel, growing the log capacity if a run outpaces it."""
    stride = config.stride
    base_steps = int(math.ceil(config.t_end / config.dt))
    max_steps = 4 * base_steps + 4096
    capacity = base_steps // stride + 64
    while True:
        t_log = np.zeros(capacity)
        q_log = np.zeros((capacity, arrays.agent_count, arrays.dimension))
        p_log = np.zeros((capacity, arrays.agent_count, arrays.dimension))
        status, nlog, steps, fail_edge, fail_time = kernels.advance(
            arrays.q0,
            arrays.p0,
            0.0,
            arrays.mass,
            arrays.diss,
            arrays.vstar,
            arrays.dvel,
            arrays.tails,
            arrays.heads,
            arrays.gain,
            arrays.target2,
            arrays.span,
            arrays.edge_damp,
            arrays.safe2,
            config.guard_margin,
            arrays.edge_mode,
            arrays.vel_on,
            config.dt,
            config.t_end,
            config.max_halvings,
            stride,
            max_steps,
            t_log,
            q_log,
            p_log,
        )
        if status == _status.LOG_FULL:
            capacity *= 2
            continue
        return status, t_log[:nlog], q_log[:nlog], p_log[:nlog], steps, fail_edge, fail_time


def integrate(
    scenario,
    controller: str | None = None,
    config: IntegratorConfig | None = None,
    kernel_backend: str | None = None,
) -> trajectory.TrajectoryLog:
    """Integrate a scenario's closed loop and return the full trajectory log.

    ``controller`` overrides the scenario's controller selection;
    ``config`` overrides its integrator settings; ``kernel_backend``
    forces a kernel path (see :mod:`phformation.backend`).

    Raises
    ------
    SimulationAbort
        If the guard cannot find an admissible step within the configured
        number of halvings (reported with the offending edge and time), or
        if the defensive total step budget is exhausted.
    """
    arrays = scenario.run_arrays(controller)
    if config is None:
        config = scenario.integrator
    kernels = backend.get_kernels(kernel_backend)
    status, times, positions, momenta, steps, fail_edge, fail_time = _advance_with_retry(
        kernels, arrays, config
    )
    if status == _status.BARRIER_ABORT:
        raise SimulationAbort(
            f"step rejected {config.max_halvings} times at t={fail_time:.6f}s: "
            f"edge {fail_edge + 1} would cross the safety barrier "
            "(misconfigured gains or a genuine safety violation)",
            edge=fail_edge + 1,
            time=fail_time,
        )
    if status == _status.STEP_BUDGET:
        raise SimulationAbort(
            f"step budget exhausted at t={fail_time:.6f}s "
            "(persistent step halving; check gains and guard margin)",
            time=fail_time,
        )
    return trajectory.from_raw(arrays, times, positions, momenta, steps)
