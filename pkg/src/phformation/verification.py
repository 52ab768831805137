"""Numerical verification suites aggregating the library's invariants.

Each suite re-derives an expected property through an independent route
(enumeration, finite differences, step-halving, brute-force simulation) and
checks the implementation against it.  The CLI ``verify`` command runs
them and reports one pass/fail line per suite.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import sim
from .controllers import (
    EdgeGains,
    SafetyParams,
    barrier_gradient,
    barrier_potential,
    edge_error,
    formation_input,
)
from .dynamics import SystemState
from .graph import (
    build_tournament_graph,
    incidence_matrix,
    matrix_rank,
    verify_full_column_rank,
)
from .integrator import IntegratorConfig, integrate
from .scenario import load_bundled_scenario

__all__ = ["SuiteResult", "SUITES", "run_suite", "run_suites"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def check_incidence_rank(max_agents: int = 12) -> SuiteResult:
    """Tournament incidence structure: edge count, column signs, rank, order.

    The rank of a connected graph's incidence matrix is the node count
    minus one (each column sums to zero), so that is the value certified
    here; every edge must also point from a lower to a higher agent index,
    which is what makes the construction directed-acyclic.
    """
    checked = 0
    for count in range(2, max_agents + 1):
        graph = build_tournament_graph(count)
        expected_edges = count * (count - 1) // 2
        matrix = incidence_matrix(graph).entries
        if graph.edge_count != expected_edges:
            return SuiteResult(
                "rank", False, f"N={count}: edge count {graph.edge_count}"
            )
        plus = (matrix == 1).sum(axis=0)
        minus = (matrix == -1).sum(axis=0)
        if not ((plus == 1).all() and (minus == 1).all()):
            return SuiteResult("rank", False, f"N={count}: bad column signs")
        if matrix_rank(matrix) != count - 1:
            return SuiteResult(
                "rank", False, f"N={count}: rank {matrix_rank(matrix)} != {count - 1}"
            )
        if not all(tail < head for tail, head in graph.edges):
            return SuiteResult("rank", False, f"N={count}: not topologically ordered")
        if verify_full_column_rank(matrix) != (count == 2):
            return SuiteResult(
                "rank", False, f"N={count}: unexpected full-column-rank verdict"
            )
        checked += 1
    return SuiteResult("rank", True, f"{checked} graphs checked (N=2..{max_agents})")


def check_barrier_gradient(
    samples: int = 120, relative_tol: float = 1e-6
) -> SuiteResult:
    """Analytic spring gradient versus central finite differences."""
    triples = [(5.0, 4.0, 1.0), (1.0, 2.0, 0.5), (10.0, 6.0, 2.0)]
    worst = 0.0
    for gain, target, safe in triples:
        gains = EdgeGains(gain=gain, target_distance=target, damping=0.0)
        span = target**2 - safe**2
        errors = np.linspace(-span + 0.1, 100.0, samples)
        for err_value in errors:
            step = 1e-6 * max(1.0, abs(err_value))

            def potential(e: float) -> float:
                return barrier_potential(
                    edge_error_from_value(e, target, safe), gains
                )

            numeric = (potential(err_value + step) - potential(err_value - step)) / (
                2.0 * step
            )
            analytic = barrier_gradient(
                edge_error_from_value(err_value, target, safe), gains
            )
            scale = max(abs(numeric), abs(analytic), 1e-12)
            worst = max(worst, abs(numeric - analytic) / scale)
    passed = worst < relative_tol
    return SuiteResult(
        "gradient",
        passed,
        f"worst relative error {worst:.2e} over {len(triples)}x{samples} samples",
    )


def edge_error_from_value(error: float, target: float, safe: float):
    """EdgeError with a prescribed squared-distance error value."""
    from .controllers import EdgeError

    return EdgeError(
        error=error, gap=error + target**2 - safe**2, span=target**2 - safe**2
    )


def check_force_field(
    states: int = 5, relative_tol: float = 1e-5, seed: int = 7
) -> SuiteResult:
    """Spring forces versus half the numeric gradient of the total potential.

    The per-edge force is -q_rel dP/de, which is half the spatial gradient
    of the potential (the edge-error Jacobian drops the chain-rule factor
    two); the finite-difference reference therefore carries the same half.
    """
    rng = np.random.default_rng(seed)
    graph = build_tournament_graph(4)
    safety = SafetyParams(safe_distance=1.0)
    gains = [
        EdgeGains(gain=g, target_distance=4.0, damping=0.0)
        for g in (5.0, 3.0, 4.0, 2.0, 6.0, 5.0)
    ]
    worst = 0.0
    evaluated = 0
    while evaluated < states:
        positions = rng.uniform(0.0, 10.0, size=(4, 2))
        if runtime_min_distance(positions) < 1.5:
            continue
        evaluated += 1
        state = SystemState(positions=positions, momenta=np.zeros((4, 2)))

        def total_potential(q_flat: np.ndarray) -> float:
            q = q_flat.reshape(4, 2)
            total = 0.0
            for k, (tail, head) in enumerate(graph.edges):
                err = edge_error(q[tail - 1], q[head - 1], 4.0, 1.0)
                total += barrier_potential(err, gains[k])
            return total

        flat = positions.ravel().copy()
        numeric = np.empty_like(flat)
        for idx in range(flat.size):
            step = 1e-6 * max(1.0, abs(flat[idx]))
            forward = flat.copy()
            forward[idx] += step
            backward = flat.copy()
            backward[idx] -= step
            numeric[idx] = (total_potential(forward) - total_potential(backward)) / (
                2.0 * step
            )
        expected = (-0.5 * numeric).reshape(4, 2)
        actual = formation_input(state, graph, gains, safety)
        scale = np.maximum(np.maximum(np.abs(expected), np.abs(actual)), 1e-9)
        worst = max(worst, float((np.abs(expected - actual) / scale).max()))
    passed = worst < relative_tol
    return SuiteResult(
        "force", passed, f"worst componentwise relative error {worst:.2e}"
    )


def runtime_min_distance(positions: np.ndarray) -> float:
    count = positions.shape[0]
    return min(
        float(np.linalg.norm(positions[i] - positions[j]))
        for i in range(count)
        for j in range(i + 1, count)
    )


def check_integrator_order(min_ratio: float = 12.0) -> SuiteResult:
    """Step-halving contraction on the reference scenario truncated to 1 s.

    The base step is 8e-3 so the dt-versus-dt/2 differences sit well above
    the accumulation floor of double precision.
    """
    scenario = load_bundled_scenario("triangle")
    finals = {}
    for dt in (8e-3, 4e-3, 2e-3):
        config = IntegratorConfig(dt=dt, t_end=1.0, log_stride=10**9)
        log = integrate(scenario, config=config)
        finals[dt] = np.concatenate(
            [log.positions[-1].ravel(), log.momenta[-1].ravel()]
        )
    coarse = np.abs(finals[8e-3] - finals[4e-3]).max()
    fine = np.abs(finals[4e-3] - finals[2e-3]).max()
    ratio = coarse / fine
    order = float(np.log2(ratio))
    passed = ratio >= min_ratio
    return SuiteResult(
        "rk4", passed, f"contraction {ratio:.1f}x (observed order {order:.2f})"
    )


def check_energy_decay(tolerance: float = sim.ENERGY_STEP_TOL) -> SuiteResult:
    """Reference run: energy never rises, guard never crossed, no collision."""
    scenario = load_bundled_scenario("triangle")
    log, report = sim.run(scenario)
    gaps = log.edge_distances**2 - scenario.safety.safe_distance**2
    guard_ok = gaps.min() >= scenario.integrator.guard_margin
    passed = (
        report.energy_monotone_violations == 0
        and not report.collision
        and guard_ok
    )
    return SuiteResult(
        "energy",
        passed,
        f"violations {report.energy_monotone_violations} "
        f"(worst increase {report.worst_energy_increase:.2e}), "
        f"min distance {report.min_distance_overall:.3f}",
    )


def check_safety_sweep(trials: int = 5, seed: int = 42) -> SuiteResult:
    """Randomized safe starts never collide under the barrier controller.

    Convergence counts are reported for information; the pass condition is
    the safety property (zero collisions), which is what the barrier
    construction guarantees.
    """
    template = load_bundled_scenario("triangle")
    report = sim.randomized_safety_sweep(
        template, trials=trials, seed=seed, box=(0.0, 10.0), t_end=50.0
    )
    passed = report.collisions == 0
    return SuiteResult(
        "sweep",
        passed,
        f"{report.trials} trials, {report.collisions} collisions, "
        f"{report.converged} converged, min distance "
        f"{report.min_distance_overall:.3f}",
    )


SUITES = {
    "rank": check_incidence_rank,
    "gradient": check_barrier_gradient,
    "force": check_force_field,
    "rk4": check_integrator_order,
    "energy": check_energy_decay,
    "sweep": check_safety_sweep,
}


def run_suite(name: str, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    return SUITES[name](**kwargs)


def run_suites(names=None, **overrides) -> list[SuiteResult]:
    """Run the selected suites (default all) with per-suite keyword overrides."""
    if names is None:
        names = list(SUITES)
    results = []
    for name in names:
        kwargs = overrides.get(name, {})
        results.append(run_suite(name, **kwargs))
    return results
