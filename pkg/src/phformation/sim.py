"""Run orchestration, objective metrics, and randomized safety sweeps.

A run is judged against three objectives: every edge distance reaches its
target (formation), every agent reaches the common target velocity
(tracking), and no pair of agents ever comes closer than the safety
distance (collision avoidance).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import runtime
from .integrator import IntegratorConfig, integrate
from .scenario import Scenario
from .trajectory import TrajectoryLog

__all__ = [
    "RunReport",
    "SweepReport",
    "run",
    "compute_metrics",
    "verify_energy_decay",
    "randomized_safety_sweep",
    "CONVERGENCE_EDGE_TOL",
    "CONVERGENCE_MOMENTUM_TOL",
    "ENERGY_STEP_TOL",
]

CONVERGENCE_EDGE_TOL = 1e-2  # squared-distance error threshold (m^2)
CONVERGENCE_MOMENTUM_TOL = 1e-3  # momentum-error norm threshold (kg m/s)
ENERGY_STEP_TOL = 1e-8  # largest tolerated per-sample energy increase (J)


@dataclass(frozen=True)
class RunReport:
    """Objective metrics of one completed run."""

    converged: bool
    final_edge_errors: np.ndarray
    max_momentum_error_final: float
    min_distance_overall: float
    collision: bool
    collision_time: float | None
    energy_monotone_violations: int
    worst_energy_increase: float
    final_energy: float

    def as_dict(self) -> dict:
        return {
            "converged": self.converged,
            "final_edge_errors": [float(v) for v in self.final_edge_errors],
            "max_momentum_error_final": self.max_momentum_error_final,
            "min_distance_overall": self.min_distance_overall,
            "collision": self.collision,
            "collision_time": self.collision_time,
            "energy_monotone_violations": self.energy_monotone_violations,
            "worst_energy_increase": self.worst_energy_increase,
            "final_energy": self.final_energy,
        }


@dataclass(frozen=True)
class SweepReport:
    """Aggregate outcome of a randomized-start sweep."""

    trials: int
    collisions: int
    converged: int
    min_distance_overall: float
    min_distances: np.ndarray
    seed: int


def compute_metrics(
    log: TrajectoryLog,
    scenario: Scenario,
    edge_tol: float = CONVERGENCE_EDGE_TOL,
    momentum_tol: float = CONVERGENCE_MOMENTUM_TOL,
    energy_tol: float = ENERGY_STEP_TOL,
) -> RunReport:
    """Evaluate the formation, tracking and collision objectives on a log.

    Collision is judged on the minimum over logged time of the minimum
    distance across all unordered agent pairs, not just graph edges.
    """
    min_series = runtime.pairwise_distance_series(log.positions)
    min_overall = float(min_series.min())
    safe = scenario.safety.safe_distance
    collision = min_overall < safe
    collision_time = (
        float(log.times[int(np.argmax(min_series < safe))]) if collision else None
    )
    violations, worst = verify_energy_decay(log, energy_tol)
    final_errors = log.edge_errors[-1]
    max_momentum_final = float(log.momentum_errors[-1].max())
    converged = bool(
        (np.abs(final_errors) < edge_tol).all() and max_momentum_final < momentum_tol
    )
    return RunReport(
        converged=converged,
        final_edge_errors=final_errors.copy(),
        max_momentum_error_final=max_momentum_final,
        min_distance_overall=min_overall,
        collision=collision,
        collision_time=collision_time,
        energy_monotone_violations=violations,
        worst_energy_increase=worst,
        final_energy=float(log.total_energy[-1]),
    )


def run(
    scenario: Scenario,
    controller: str | None = None,
    config: IntegratorConfig | None = None,
    kernel_backend: str | None = None,
) -> tuple[TrajectoryLog, RunReport]:
    """Integrate a scenario and score it against the control objectives."""
    log = integrate(scenario, controller=controller, config=config,
                    kernel_backend=kernel_backend)
    return log, compute_metrics(log, scenario)


def verify_energy_decay(
    log: TrajectoryLog, tolerance: float = ENERGY_STEP_TOL
) -> tuple[int, float]:
    """Count logged samples where the total energy rose more than ``tolerance``.

    Returns (violation count, worst observed increase).  The worst increase
    is negative when the series is strictly decreasing.
    """
    increments = np.diff(log.total_energy)
    if increments.size == 0:
        return 0, 0.0
    return int((increments > tolerance).sum()), float(increments.max())


def _sample_positions(
    rng: np.random.Generator,
    count: int,
    dim: int,
    box: tuple[float, float],
    min_spacing: float,
    max_rejections: int,
) -> np.ndarray:
    low, high = box
    for _ in range(max_rejections):
        positions = rng.uniform(low, high, size=(count, dim))
        smallest = min(
            float(np.linalg.norm(positions[i] - positions[j]))
            for i in range(count)
            for j in range(i + 1, count)
        )
        if smallest > min_spacing:
            return positions
    raise RuntimeError(
        f"could not sample {count} positions with spacing > {min_spacing:.3g} "
        f"in [{low}, {high}]^{dim} after {max_rejections} rejections; "
        "the box is too small"
    )


def randomized_safety_sweep(
    template: Scenario,
    trials: int,
    seed: int | None = None,
    box: tuple[float, float] | None = None,
    margin: float = 0.2,
    t_end: float | None = None,
    randomize: bool = True,
    max_rejections: int = 10_000,
) -> SweepReport:
    """Run the barrier controller from many random safe starts and aggregate.

    Initial positions are drawn uniformly in ``box`` (per axis) and whole
    configurations are resampled until every pairwise distance exceeds the
    safety distance plus ``margin``.  With ``randomize=False`` the
    template's own initial positions are used for every trial, which makes
    a single trial identical to :func:`run`.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if seed is None:
        seed = template.seed
    if box is None:
        widest = 2.5 * max(g.target_distance for g in template.edge_gains)
        box = (0.0, widest)
    config = template.integrator
    if t_end is not None:
        config = dataclasses.replace(config, t_end=t_end)
    rng = np.random.default_rng(seed)
    min_spacing = template.safety.safe_distance + margin
    collisions = 0
    converged = 0
    minima = np.empty(trials)
    for trial in range(trials):
        if randomize:
            positions = _sample_positions(
                rng,
                template.agent_count,
                template.dimension,
                box,
                min_spacing,
                max_rejections,
            )
            scenario = template.with_initial_positions(positions)
        else:
            scenario = template
        _, report = run(scenario, controller="proposed", config=config)
        collisions += int(report.collision)
        converged += int(report.converged)
        minima[trial] = report.min_distance_overall
    return SweepReport(
        trials=trials,
        collisions=collisions,
        converged=converged,
        min_distance_overall=float(minima.min()),
        min_distances=minima,
        seed=seed,
    )
