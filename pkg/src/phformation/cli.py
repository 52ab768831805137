"""Command-line interface: run, compare, verify, and graph subcommands.

Exit codes: 0 success, 1 validation error (bad arguments, unreadable or
invalid config), 2 simulation abort, 3 verification failure (a failed
suite, or a collision under ``--fail-on-collision``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import trajectory, verification
from .graph import build_tournament_graph, incidence_matrix
from .integrator import SimulationAbort
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_config_names,
    load_bundled_scenario,
    load_scenario_file,
)
from .sim import RunReport, run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SIMULATION = 2
EXIT_VERIFICATION = 3


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors under this tool's exit contract
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _load_config(name_or_path: str) -> Scenario:
    path = Path(name_or_path)
    if path.is_file():
        return load_scenario_file(path)
    if name_or_path in bundled_config_names():
        return load_bundled_scenario(name_or_path)
    raise FileNotFoundError(
        f"config not found: {name_or_path} (not a file, and not one of the "
        f"bundled configs {bundled_config_names()})"
    )


def _report_lines(label: str, report: RunReport) -> list[str]:
    collision_when = (
        f"at t={report.collision_time:.3f}s" if report.collision else "never"
    )
    errors = ", ".join(f"{value:.3e}" for value in report.final_edge_errors)
    return [
        f"controller:          {label}",
        f"converged:           {report.converged}",
        f"collision:           {report.collision} ({collision_when})",
        f"min distance:        {report.min_distance_overall:.6f}",
        f"final edge errors:   [{errors}]",
        f"final max |p_err|:   {report.max_momentum_error_final:.3e}",
        f"final energy:        {report.final_energy:.6e}",
        f"energy violations:   {report.energy_monotone_violations}",
    ]


def _write_run_outputs(
    out_dir: Path, label: str, log, report: RunReport, fmt: str
) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        written.append(trajectory.write_csv(log, out_dir / f"trajectory_{label}.csv"))
    else:
        written.append(trajectory.write_json(log, out_dir / f"trajectory_{label}.json"))
    report_payload = {"controller": label, **report.as_dict()}
    report_json = out_dir / f"report_{label}.json"
    report_json.write_text(json.dumps(report_payload, indent=2) + "\n")
    written.append(report_json)
    report_txt = out_dir / f"report_{label}.txt"
    report_txt.write_text("\n".join(_report_lines(label, report)) + "\n")
    written.append(report_txt)
    return written


def cmd_run(args) -> int:
    try:
        scenario = _load_config(args.config)
        controller = args.controller or scenario.controller
        log, report = run(scenario, controller=controller)
    except (FileNotFoundError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationAbort as exc:
        print(f"simulation abort: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    written = _write_run_outputs(Path(args.out), controller, log, report, args.format)
    for line in _report_lines(controller, report):
        print(line)
    print("wrote: " + ", ".join(str(p) for p in written))
    verdict = "collision" if report.collision else "no collision"
    print(
        f"verdict: {verdict}; "
        + ("converged" if report.converged else "not converged")
    )
    if args.fail_on_collision and report.collision:
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        scenario = _load_config(args.config)
        results = {}
        for controller in ("proposed", "baseline"):
            log, report = run(scenario, controller=controller)
            results[controller] = (log, report)
    except (FileNotFoundError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationAbort as exc:
        print(f"simulation abort: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = (
        f"{'controller':<12} {'min_dist':>10} {'collision_t':>12} "
        f"{'max|e|_final':>13} {'final_energy':>13}"
    )
    lines = [header, "-" * len(header)]
    payload = {}
    for controller, (log, report) in results.items():
        collision_t = (
            f"{report.collision_time:.3f}" if report.collision_time is not None else "-"
        )
        max_err = max(abs(float(v)) for v in report.final_edge_errors)
        lines.append(
            f"{controller:<12} {report.min_distance_overall:>10.4f} "
            f"{collision_t:>12} {max_err:>13.3e} {report.final_energy:>13.3e}"
        )
        payload[controller] = report.as_dict()
        _write_run_outputs(out_dir, controller, log, report, args.format)
    table = "\n".join(lines)
    (out_dir / "compare.txt").write_text(table + "\n")
    (out_dir / "compare.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(table)
    print(f"wrote: {out_dir / 'compare.txt'}, {out_dir / 'compare.json'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {
        "rank": {"max_agents": args.max_n},
        "sweep": {"trials": args.trials, "seed": args.seed},
    }
    names = [args.suite] if args.suite else None
    try:
        results = verification.run_suites(names, **overrides)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"suite {result.name}: {status} ({result.detail})")
        failed += 0 if result.passed else 1
    if failed:
        print(f"{failed} suite(s) failed", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_graph(args) -> int:
    try:
        graph = build_tournament_graph(args.agents)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    matrix = incidence_matrix(graph)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "agents": graph.agent_count,
                    "edges": [list(edge) for edge in graph.edges],
                    "incidence": matrix.entries.tolist(),
                }
            )
        )
        return EXIT_OK
    print("edge,tail,head")
    for k, (tail, head) in enumerate(graph.edges, start=1):
        print(f"E{k},{tail},{head}")
    print()
    print("node," + ",".join(f"E{k}" for k in range(1, graph.edge_count + 1)))
    for i in range(graph.agent_count):
        print(f"{i + 1}," + ",".join(str(v) for v in matrix.entries[i]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="phformation",
        description=(
            "Distance-based formation control with collision avoidance for "
            "port-Hamiltonian agent models: simulate scenarios, compare "
            "controllers, verify invariants, and inspect communication graphs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario and write logs")
    run_p.add_argument("--config", required=True,
                       help="scenario file path or bundled config name")
    run_p.add_argument("--out", default="results", help="output directory")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument(
        "--controller",
        choices=("proposed", "baseline", "velocity_only", "none"),
        help="override the scenario's controller selection",
    )
    run_p.add_argument(
        "--fail-on-collision",
        action="store_true",
        help="exit with code 3 if any pair violates the safety distance",
    )
    run_p.set_defaults(func=cmd_run)

    compare_p = sub.add_parser(
        "compare", help="run proposed and baseline controllers side by side"
    )
    compare_p.add_argument("--config", required=True)
    compare_p.add_argument("--out", default="results")
    compare_p.add_argument("--format", choices=("csv", "json"), default="csv")
    compare_p.set_defaults(func=cmd_compare)

    verify_p = sub.add_parser("verify", help="run the numerical invariant suites")
    verify_p.add_argument(
        "--suite", choices=sorted(verification.SUITES), help="run one suite only"
    )
    verify_p.add_argument("--seed", type=int, default=42, help="sweep RNG seed")
    verify_p.add_argument(
        "--max-n", type=int, default=12, help="largest agent count for the rank suite"
    )
    verify_p.add_argument(
        "--trials", type=int, default=5, help="trial count for the sweep suite"
    )
    verify_p.set_defaults(func=cmd_verify)

    graph_p = sub.add_parser(
        "graph", help="print a tournament graph and its incidence matrix"
    )
    graph_p.add_argument("--agents", type=int, required=True)
    graph_p.add_argument("--format", choices=("csv", "json"), default="csv")
    graph_p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
