"""Trajectory logs and their CSV/JSON export formats.

Column layout (frozen; the CSV header is the authoritative field list):

    t, q_1_x, q_1_y[, q_1_z], ..., q_N_*, p_1_x, ..., p_N_*,
    e_1..e_M, d_1..d_M, Hv, Hf, HF

Floating values are printed with 17 significant digits so that exports
round-trip exactly.  The JSON export carries the same columns as an object
``{"columns": [...], "data": [[row values], ...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import runtime
from .dynamics import SystemState

_AXES = "xyz"


@dataclass
class TrajectoryLog:
    """Time series of one run: states, inputs, and derived quantities.

    All arrays share the leading time axis.  ``velocity_energy``,
    ``spring_energy`` and ``total_energy`` are the stored-energy terms of
    the active controller (spring energy is identically zero when the run
    used no formation term).
    """

    times: np.ndarray  # (T,)
    positions: np.ndarray  # (T, N, n)
    momenta: np.ndarray  # (T, N, n)
    inputs: np.ndarray  # (T, N, n)
    edge_errors: np.ndarray  # (T, M)
    edge_distances: np.ndarray  # (T, M)
    velocity_energy: np.ndarray  # (T,)
    spring_energy: np.ndarray  # (T,)
    total_energy: np.ndarray  # (T,)
    momentum_errors: np.ndarray  # (T, N)
    controller: str = "proposed"
    steps_taken: int = 0

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def agent_count(self) -> int:
        return self.positions.shape[1]

    @property
    def dimension(self) -> int:
        return self.positions.shape[2]

    @property
    def edge_count(self) -> int:
        return self.edge_errors.shape[1]

    def state_at(self, index: int) -> SystemState:
        return SystemState(
            positions=self.positions[index],
            momenta=self.momenta[index],
            time=float(self.times[index]),
        )


def from_raw(
    arrays: runtime.RunArrays,
    times: np.ndarray,
    positions: np.ndarray,
    momenta: np.ndarray,
    steps_taken: int,
) -> TrajectoryLog:
    """Assemble a full log from kernel output; derived series are recomputed."""
    errors, distances = runtime.edge_series(arrays, positions)
    velocity_energy, spring_energy, total = runtime.energy_series(
        arrays, positions, momenta
    )
    return TrajectoryLog(
        times=times,
        positions=positions,
        momenta=momenta,
        inputs=runtime.input_series(arrays, positions, momenta),
        edge_errors=errors,
        edge_distances=distances,
        velocity_energy=velocity_energy,
        spring_energy=spring_energy,
        total_energy=total,
        momentum_errors=runtime.momentum_error_series(arrays, momenta),
        controller=arrays.controller,
        steps_taken=steps_taken,
    )


def column_names(agent_count: int, dimension: int, edge_count: int) -> list[str]:
    names = ["t"]
    for i in range(1, agent_count + 1):
        names += [f"q_{i}_{_AXES[d]}" for d in range(dimension)]
    for i in range(1, agent_count + 1):
        names += [f"p_{i}_{_AXES[d]}" for d in range(dimension)]
    names += [f"e_{k}" for k in range(1, edge_count + 1)]
    names += [f"d_{k}" for k in range(1, edge_count + 1)]
    names += ["Hv", "Hf", "HF"]
    return names


def to_table(log: TrajectoryLog) -> tuple[list[str], np.ndarray]:
    """Exported columns and the (T, columns) value matrix."""
    steps = len(log)
    blocks = [
        log.times.reshape(steps, 1),
        log.positions.reshape(steps, -1),
        log.momenta.reshape(steps, -1),
        log.edge_errors,
        log.edge_distances,
        log.velocity_energy.reshape(steps, 1),
        log.spring_energy.reshape(steps, 1),
        log.total_energy.reshape(steps, 1),
    ]
    return (
        column_names(log.agent_count, log.dimension, log.edge_count),
        np.hstack(blocks),
    )


def write_csv(log: TrajectoryLog, path) -> Path:
    path = Path(path)
    names, table = to_table(log)
    with path.open("w") as handle:
        handle.write(",".join(names) + "\n")
        for row in table:
            handle.write(",".join(f"{value:.17g}" for value in row) + "\n")
    return path


def write_json(log: TrajectoryLog, path) -> Path:
    path = Path(path)
    names, table = to_table(log)
    payload = {"columns": names, "data": table.tolist()}
    with path.open("w") as handle:
        json.dump(payload, handle)
        handle.write("\n")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a trajectory CSV back into (columns, values); for round-trips."""
    path = Path(path)
    with path.open() as handle:
        header = handle.readline().strip().split(",")
        table = np.array(
            [[float(cell) for cell in line.strip().split(",")] for line in handle]
        )
    return header, table


def read_json(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open() as handle:
        payload = json.load(handle)
    return payload["columns"], np.array(payload["data"], dtype=np.float64)
