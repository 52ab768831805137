"""Scenario files: parsing, validation, and compilation to kernel arrays.

A scenario is a TOML document with sections [agents], [graph], [gains],
[safety], [initial], [integrator] and [controller]; the exact field names
are frozen in the configuration reference in the project README and in the
bundled ``triangle.toml``.  Unknown keys are rejected so typos fail loudly,
and every load error names the offending field.
"""

from __future__ import annotations

import dataclasses
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import runtime
from .controllers import (
    CONTROLLERS,
    EdgeGains,
    SafetyParams,
    VelocityTrackingGains,
)
from .dynamics import AgentParams
from .graph import FormationGraph, build_tournament_graph, custom_graph
from .integrator import IntegratorConfig

__all__ = [
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "load_scenario_file",
    "bundled_config_names",
    "load_bundled_scenario",
]

_SECTIONS = {
    "agents": {"count", "dimension", "mass", "dissipation"},
    "graph": {"type", "edges"},
    "gains": {
        "edge_gain",
        "target_distance",
        "edge_damping",
        "velocity_damping",
        "target_velocity",
        "baseline_gain",
        "baseline_damping",
    },
    "safety": {"safe_distance"},
    "initial": {"positions", "momenta"},
    "integrator": {"dt", "t_end", "guard_margin", "max_halvings", "log_stride"},
    "controller": {"type"},
}
_TOP_LEVEL = {"seed"}


class ScenarioError(ValueError):
    """A scenario failed to parse or validate; the message names the field."""


@dataclass(frozen=True)
class Scenario:
    """A fully validated experiment description.

    Semantic invariants (target distances above the safety distance, safe
    initial spacing for the barrier controller, realizability of the
    distance targets) are checked on construction, so instances obtained in
    any way are ready to run.
    """

    agent_params: list[AgentParams]
    graph: FormationGraph
    edge_gains: list[EdgeGains]
    baseline_gains: list[EdgeGains]
    safety: SafetyParams
    velocity_gains: list[VelocityTrackingGains]
    initial_positions: np.ndarray
    initial_momenta: np.ndarray
    controller: str = "proposed"
    integrator: IntegratorConfig = IntegratorConfig()
    seed: int = 0

    def __post_init__(self) -> None:
        count = self.graph.agent_count
        q0 = np.asarray(self.initial_positions, dtype=np.float64)
        p0 = np.asarray(self.initial_momenta, dtype=np.float64)
        dim = q0.shape[1] if q0.ndim == 2 else 0
        if q0.shape != (count, dim) or dim not in (2, 3):
            raise ScenarioError(
                f"[initial].positions: expected shape ({count}, 2 or 3), got {q0.shape}"
            )
        if p0.shape != q0.shape:
            raise ScenarioError(
                f"[initial].momenta: expected shape {q0.shape}, got {p0.shape}"
            )
        if not (np.isfinite(q0).all() and np.isfinite(p0).all()):
            raise ScenarioError("[initial]: entries must be finite")
        object.__setattr__(self, "initial_positions", q0)
        object.__setattr__(self, "initial_momenta", p0)
        if len(self.agent_params) != count:
            raise ScenarioError(
                f"[agents]: expected {count} parameter sets, got {len(self.agent_params)}"
            )
        for i, params in enumerate(self.agent_params, start=1):
            if params.dissipation.shape != (dim, dim):
                raise ScenarioError(
                    f"[agents].dissipation: agent {i} matrix is "
                    f"{params.dissipation.shape}, expected ({dim}, {dim})"
                )
        if len(self.velocity_gains) != count:
            raise ScenarioError(
                f"[gains].velocity_damping: expected {count} sets, got "
                f"{len(self.velocity_gains)}"
            )
        for gains in self.velocity_gains:
            if gains.target_velocity.shape != (dim,):
                raise ScenarioError(
                    "[gains].target_velocity: expected length "
                    f"{dim}, got {gains.target_velocity.shape[0]}"
                )
        edge_count = self.graph.edge_count
        for name, gains in (("edge", self.edge_gains), ("baseline", self.baseline_gains)):
            if len(gains) != edge_count:
                raise ScenarioError(
                    f"[gains]: expected {edge_count} {name} gain sets, got {len(gains)}"
                )
        safe = self.safety.safe_distance
        for k, gains in enumerate(self.edge_gains, start=1):
            if not gains.target_distance > safe:
                raise ScenarioError(
                    f"[gains].target_distance: edge {k} target "
                    f"{gains.target_distance} does not exceed safe_distance {safe}"
                )
        if self.controller not in CONTROLLERS:
            raise ScenarioError(
                f"[controller].type: {self.controller!r} not in {CONTROLLERS}"
            )
        if self.controller == "proposed":
            for i in range(count):
                for j in range(i + 1, count):
                    spacing = float(np.linalg.norm(q0[i] - q0[j]))
                    if spacing <= safe:
                        raise ScenarioError(
                            "[initial].positions: agents "
                            f"{i + 1} and {j + 1} start {spacing:.4g} apart, "
                            f"within the safe distance {safe} required by the "
                            "barrier controller"
                        )
        if self.seed < 0:
            raise ScenarioError(f"seed: must be >= 0, got {self.seed}")
        self._check_realizability()

    def _check_realizability(self) -> None:
        # Triangle inequality over every edge triangle: a hard error for a
        # single triangle in the plane, a warning otherwise (full
        # realizability is out of scope).
        targets = {
            frozenset(pair): gains.target_distance
            for pair, gains in zip(self.graph.edges, self.edge_gains)
        }
        count = self.graph.agent_count
        violations = []
        for i in range(1, count + 1):
            for j in range(i + 1, count + 1):
                for k in range(j + 1, count + 1):
                    sides = [
                        targets.get(frozenset(pair))
                        for pair in ((i, j), (j, k), (i, k))
                    ]
                    if any(side is None for side in sides):
                        continue
                    longest = max(sides)
                    if longest > sum(sides) - longest:
                        violations.append((i, j, k))
        if not violations:
            return
        message = (
            "[gains].target_distance: triangle inequality violated for agent "
            f"triples {violations}; the distance set is not realizable"
        )
        if count == 3:
            raise ScenarioError(message)
        warnings.warn(message, stacklevel=3)

    @property
    def agent_count(self) -> int:
        return self.graph.agent_count

    @property
    def dimension(self) -> int:
        return self.initial_positions.shape[1]

    def with_initial_positions(self, positions) -> "Scenario":
        return dataclasses.replace(self, initial_positions=np.asarray(positions))

    def with_controller(self, controller: str) -> "Scenario":
        return dataclasses.replace(self, controller=controller)

    def with_integrator(self, config: IntegratorConfig) -> "Scenario":
        return dataclasses.replace(self, integrator=config)

    def run_arrays(self, controller: str | None = None) -> runtime.RunArrays:
        """Flatten this scenario into kernel-ready arrays for a controller."""
        name = self.controller if controller is None else controller
        if name not in CONTROLLERS:
            raise ScenarioError(f"controller: {name!r} not in {CONTROLLERS}")
        if name == "baseline":
            spring = self.baseline_gains
            edge_mode, vel_on = runtime.EDGES_QUADRATIC, 1
        elif name == "proposed":
            spring = self.edge_gains
            edge_mode, vel_on = runtime.EDGES_BARRIER, 1
        else:
            spring = self.edge_gains
            edge_mode = runtime.EDGES_OFF
            vel_on = 1 if name == "velocity_only" else 0
        targets = np.array([g.target_distance for g in self.edge_gains])
        safe = self.safety.safe_distance
        return runtime.RunArrays(
            controller=name,
            q0=self.initial_positions.copy(),
            p0=self.initial_momenta.copy(),
            mass=np.array([a.mass for a in self.agent_params]),
            diss=np.stack([a.dissipation for a in self.agent_params]),
            vstar=self.velocity_gains[0].target_velocity.copy(),
            dvel=np.stack([g.damping for g in self.velocity_gains]),
            tails=self.graph.tail_indices(),
            heads=self.graph.head_indices(),
            gain=np.array([g.gain for g in spring]),
            target2=targets**2,
            span=targets**2 - safe**2,
            edge_damp=np.array([g.damping for g in spring]),
            safe_distance=safe,
            edge_mode=edge_mode,
            vel_on=vel_on,
        )


def _reject_unknown(data: dict) -> None:
    for key in data:
        if key not in _SECTIONS and key not in _TOP_LEVEL:
            raise ScenarioError(f"unknown section or key {key!r}")
        if key in _SECTIONS:
            section = data[key]
            if not isinstance(section, dict):
                raise ScenarioError(f"[{key}]: expected a table")
            for inner in section:
                if inner not in _SECTIONS[key]:
                    raise ScenarioError(f"[{key}].{inner}: unknown key")


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _per_item(value, length: int, where: str) -> np.ndarray:
    """Broadcast a scalar or per-item list to a float array of ``length``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.full(length, float(value))
    if isinstance(value, list):
        if len(value) != length:
            raise ScenarioError(
                f"{where}: expected {length} entries, got {len(value)}"
            )
        return np.array([_as_float(item, where) for item in value])
    raise ScenarioError(f"{where}: expected a number or a list of numbers")


def _as_matrix(value, dim: int, where: str) -> np.ndarray:
    """Scalar -> scaled identity, length-n list -> diagonal, n x n -> matrix."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value) * np.eye(dim)
    if isinstance(value, list):
        if len(value) == dim and all(
            isinstance(item, (int, float)) and not isinstance(item, bool)
            for item in value
        ):
            return np.diag([float(item) for item in value])
        if len(value) == dim and all(isinstance(item, list) for item in value):
            matrix = np.array(
                [[_as_float(cell, where) for cell in row] for row in value]
            )
            if matrix.shape != (dim, dim):
                raise ScenarioError(f"{where}: expected a {dim}x{dim} matrix")
            return matrix
    raise ScenarioError(
        f"{where}: expected a number, a length-{dim} diagonal, or a {dim}x{dim} matrix"
    )


def _as_vectors(value, shape: tuple[int, int], where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ScenarioError(f"{where}: expected a list of {shape[0]} vectors")
    array = np.array(value, dtype=np.float64)
    if array.shape != shape:
        raise ScenarioError(f"{where}: expected shape {shape}, got {array.shape}")
    return array


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario from TOML text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"not valid TOML: {exc}") from exc
    _reject_unknown(data)

    agents = data.get("agents", {})
    if "count" not in agents:
        raise ScenarioError("[agents].count: required")
    count = agents["count"]
    if not isinstance(count, int) or isinstance(count, bool) or count < 2:
        raise ScenarioError(f"[agents].count: expected an integer >= 2, got {count!r}")
    dim = agents.get("dimension", 2)
    if dim not in (2, 3):
        raise ScenarioError(f"[agents].dimension: expected 2 or 3, got {dim!r}")
    masses = _per_item(agents.get("mass", 1.0), count, "[agents].mass")
    dissipation = _as_matrix(
        agents.get("dissipation", 0.0), dim, "[agents].dissipation"
    )
    try:
        agent_params = [
            AgentParams(mass=float(m), dissipation=dissipation) for m in masses
        ]
    except ValueError as exc:
        raise ScenarioError(f"[agents]: {exc}") from exc

    graph_section = data.get("graph", {})
    graph_type = graph_section.get("type", "tournament")
    try:
        if graph_type == "tournament":
            if "edges" in graph_section:
                raise ScenarioError(
                    "[graph].edges: only allowed with type = \"custom\""
                )
            graph = build_tournament_graph(count)
        elif graph_type == "custom":
            if "edges" not in graph_section:
                raise ScenarioError("[graph].edges: required for type = \"custom\"")
            graph = custom_graph(count, graph_section["edges"])
        else:
            raise ScenarioError(
                f"[graph].type: expected 'tournament' or 'custom', got {graph_type!r}"
            )
    except ValueError as exc:
        raise ScenarioError(f"[graph]: {exc}") from exc
    edge_count = graph.edge_count

    gains = data.get("gains", {})
    for required in ("edge_gain", "target_distance"):
        if required not in gains:
            raise ScenarioError(f"[gains].{required}: required")
    edge_gain = _per_item(gains["edge_gain"], edge_count, "[gains].edge_gain")
    target = _per_item(
        gains["target_distance"], edge_count, "[gains].target_distance"
    )
    edge_damping = _per_item(
        gains.get("edge_damping", 1.0), edge_count, "[gains].edge_damping"
    )
    baseline_gain = _per_item(
        gains.get("baseline_gain", gains["edge_gain"]),
        edge_count,
        "[gains].baseline_gain",
    )
    baseline_damping = _per_item(
        gains.get("baseline_damping", gains.get("edge_damping", 1.0)),
        edge_count,
        "[gains].baseline_damping",
    )
    if (edge_damping <= 0).any() or (baseline_damping <= 0).any():
        raise ScenarioError("[gains].edge_damping: must be > 0 on every edge")
    velocity_damping = _as_matrix(
        gains.get("velocity_damping", 1.0), dim, "[gains].velocity_damping"
    )
    target_velocity = np.asarray(
        gains.get("target_velocity", [0.0] * dim), dtype=np.float64
    )
    if target_velocity.shape != (dim,):
        raise ScenarioError(
            f"[gains].target_velocity: expected length {dim}, got shape "
            f"{target_velocity.shape}"
        )

    def make_edge_gains(gain_values, damping_values, where: str) -> list[EdgeGains]:
        try:
            return [
                EdgeGains(
                    gain=float(g), target_distance=float(d), damping=float(c)
                )
                for g, d, c in zip(gain_values, target, damping_values)
            ]
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc

    edge_gains = make_edge_gains(edge_gain, edge_damping, "[gains]")
    baseline_gains = make_edge_gains(baseline_gain, baseline_damping, "[gains]")

    safety_section = data.get("safety", {})
    if "safe_distance" not in safety_section:
        raise ScenarioError("[safety].safe_distance: required")
    try:
        safety = SafetyParams(
            safe_distance=_as_float(
                safety_section["safe_distance"], "[safety].safe_distance"
            )
        )
        velocity_gains = [
            VelocityTrackingGains(
                target_velocity=target_velocity, damping=velocity_damping
            )
            for _ in range(count)
        ]
    except ValueError as exc:
        raise ScenarioError(f"{exc}") from exc

    initial = data.get("initial", {})
    if "positions" not in initial:
        raise ScenarioError("[initial].positions: required")
    positions = _as_vectors(initial["positions"], (count, dim), "[initial].positions")
    momenta = (
        _as_vectors(initial["momenta"], (count, dim), "[initial].momenta")
        if "momenta" in initial
        else np.zeros((count, dim))
    )

    integrator_section = data.get("integrator", {})
    try:
        integrator = IntegratorConfig(
            dt=_as_float(integrator_section.get("dt", 1e-3), "[integrator].dt"),
            t_end=_as_float(
                integrator_section.get("t_end", 100.0), "[integrator].t_end"
            ),
            guard_margin=_as_float(
                integrator_section.get("guard_margin", 1e-6),
                "[integrator].guard_margin",
            ),
            max_halvings=int(integrator_section.get("max_halvings", 30)),
            log_stride=(
                int(integrator_section["log_stride"])
                if "log_stride" in integrator_section
                else None
            ),
        )
    except ValueError as exc:
        raise ScenarioError(f"[integrator]: {exc}") from exc

    controller = data.get("controller", {}).get("type", "proposed")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError(f"seed: expected an integer, got {seed!r}")

    return Scenario(
        agent_params=agent_params,
        graph=graph,
        edge_gains=edge_gains,
        baseline_gains=baseline_gains,
        safety=safety,
        velocity_gains=velocity_gains,
        initial_positions=positions,
        initial_momenta=momenta,
        controller=controller,
        integrator=integrator,
        seed=seed,
    )


def load_scenario_file(path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"scenario file not found: {path}")
    return load_scenario(path.read_text())


def bundled_config_names() -> list[str]:
    """Names of configs shipped with the package (usable as --config values)."""
    package = resources.files("phformation") / "configs"
    return sorted(item.name[:-5] for item in package.iterdir() if item.name.endswith(".toml"))


def load_bundled_scenario(name: str) -> Scenario:
    """Load a bundled config by bare name, e.g. ``triangle``."""
    package = resources.files("phformation") / "configs" / f"{name}.toml"
    if not package.is_file():
        raise FileNotFoundError(
            f"no bundled config named {name!r}; available: {bundled_config_names()}"
        )
    return load_scenario(package.read_text())
