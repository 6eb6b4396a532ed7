"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or configuration error. Results go
to ``--out`` as JSON/CSV together with a ``manifest.json`` describing the run.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, candidates, carbon
from .config import build_scenario, load_config
from .exceptions import MicrogridError
from .optimize import ObjectivePoint, ParetoFront, SearchResult, exhaustive_run, nsga2_run
from .simulate import Composition, SimulationMetrics, run_simulation

COMMANDS = ("simulate", "exhaustive", "optimize", "candidates", "project", "validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _composition_label(c: Composition, cfg) -> str:
    return (f"({c.wind_turbines * cfg.wind.turbine_kw / 1000:g}, "
            f"{c.solar_units * cfg.solar.unit_kw / 1000:g}, "
            f"{c.battery_units * cfg.battery.unit_kwh / 1000:g})")


def _write_evaluations(path: Path, result: SearchResult, names):
    metric_cols = list(SimulationMetrics.__dataclass_fields__)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "generation", "wind_turbines", "solar_units", "battery_units",
                         *names, *metric_cols, "cache_hit"])
        for entry in result.log:
            p = entry.point
            metrics = p.metrics.to_dict()
            writer.writerow([entry.index, entry.generation, *p.composition.as_tuple(),
                             *(repr(v) for v in p.objectives),
                             *("" if metrics[k] is None else repr(metrics[k]) for k in metric_cols),
                             int(entry.cache_hit)])


def _write_pareto_scatter(path: Path, result: SearchResult):
    """Figure data: every evaluated point with an on-front flag."""
    on_front = result.front.compositions()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["wind_turbines", "solar_units", "battery_units", "embodied_tco2",
                         "operational_tco2_per_day", "on_front"])
        for p in sorted(result.points, key=lambda p: p.composition):
            m = p.metrics
            writer.writerow([*p.composition.as_tuple(), repr(m.embodied_tco2),
                             repr(m.operational_tco2_per_day), int(p.composition in on_front)])


def _write_coverage_grid(path: Path, result: SearchResult):
    """Figure data: on-site coverage of battery-free compositions (wind x solar)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["wind_turbines", "solar_units", "coverage_percent"])
        for p in sorted(result.points, key=lambda p: p.composition):
            if p.composition.battery_units == 0:
                writer.writerow([p.composition.wind_turbines, p.composition.solar_units,
                                 repr(p.metrics.coverage_percent)])


def _front_from_json(path: Path) -> ParetoFront:
    data = json.loads(Path(path).read_text())
    names = tuple(data["objectives"])
    points = []
    for item in data["points"]:
        comp = Composition(item["wind_turbines"], item["solar_units"], item["battery_units"])
        metrics = SimulationMetrics(**item["metrics"]) if "metrics" in item else None
        points.append(ObjectivePoint(comp, tuple(float(item["objectives"][n]) for n in names),
                                     metrics))
    return ParetoFront(tuple(points), names)


def _composition_from_args(args, cfg) -> Composition:
    comp = Composition(args.wind, args.solar, args.battery)
    if comp not in cfg.parameter_space():
        raise MicrogridError(f"composition {comp} lies outside the configured parameter space")
    return comp


def _search_outputs(out: Path, result: SearchResult, names) -> list[str]:
    _write_json(out / "front.json", result.front.to_dict())
    _write_evaluations(out / "evaluations.csv", result, names)
    _write_pareto_scatter(out / "pareto.csv", result)
    return ["front.json", "evaluations.csv", "pareto.csv"]


def cmd_simulate(args, cfg, out: Path):
    scenario = build_scenario(cfg, step_s=args.step_s)
    comp = _composition_from_args(args, cfg)
    metrics, steps = run_simulation(scenario, comp, return_steps=True)
    payload = {"composition": dict(zip(("wind_turbines", "solar_units", "battery_units"),
                                       comp.as_tuple())),
               **metrics.to_dict()}
    _write_json(out / "metrics.json", payload)
    written = ["metrics.json"]
    if args.dump_steps:
        cols = list(steps)
        stamps = [scenario.start.timestamp() + i * scenario.step_s for i in range(len(scenario))]
        with open(out / "steps.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["timestamp", *cols])
            for i, ts in enumerate(stamps):
                iso = datetime.fromtimestamp(ts, timezone.utc).isoformat()
                writer.writerow([iso, *(repr(float(steps[c][i])) for c in cols)])
        written.append("steps.csv")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return written, {}


def cmd_exhaustive(args, cfg, out: Path):
    scenario = build_scenario(cfg)
    names = tuple(cfg.search.objectives)
    result = exhaustive_run(scenario, cfg.parameter_space(), names, jobs=args.jobs)
    written = _search_outputs(out, result, names)
    _write_coverage_grid(out / "coverage_grid.csv", result)
    print(f"evaluated {result.n_simulations} compositions; front has {len(result.front)} points",
          file=sys.stderr)
    return written + ["coverage_grid.csv"], {}


def cmd_optimize(args, cfg, out: Path):
    scenario = build_scenario(cfg)
    config = cfg.search_config(seed=args.seed)
    result = nsga2_run(scenario, cfg.parameter_space(), config, jobs=args.jobs)
    written = _search_outputs(out, result, config.objectives)
    print(f"{result.n_simulations} simulations; front has {len(result.front)} points",
          file=sys.stderr)
    return written, {"seed": config.seed}


def cmd_candidates(args, cfg, out: Path):
    extra = {}
    if args.front:
        front = _front_from_json(args.front)
    else:
        scenario = build_scenario(cfg)
        config = cfg.search_config(seed=args.seed)
        front = nsga2_run(scenario, cfg.parameter_space(), config, jobs=args.jobs).front
        extra["seed"] = config.seed
    if any(p.metrics is None for p in front):
        raise MicrogridError("front entries need metrics to build the candidate table")
    method = args.method or cfg.candidates.method
    k = args.k or cfg.candidates.k
    if method == "threshold":
        budgets = args.budgets or cfg.candidates.budgets
        picks = candidates.threshold_select(front, sorted(budgets))
    elif method == "greedy":
        picks = candidates.greedy_diversity(front, k)
    else:
        picks = candidates.kmeans_select(front, k, seed=cfg.candidates.seed)
    rows = candidates.candidate_rows(picks, cfg.solar.unit_kw, cfg.wind.turbine_kw,
                                     cfg.battery.unit_kwh)
    (out / "candidates.csv").write_text(candidates.rows_to_csv(rows))
    table = candidates.format_table(rows)
    (out / "candidates.txt").write_text(table)
    print(table, end="")
    extra["method"] = method
    return ["candidates.csv", "candidates.txt"], extra


def _read_candidates_csv(path):
    profiles = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            label = f"({float(row['wind_mw']):g}, {float(row['solar_mw']):g}, " \
                    f"{float(row['battery_mwh']):g})"
            profiles.append((label, carbon.EmissionProfile(
                float(row["embodied_tco2"]), float(row["operational_tco2_per_day"]))))
    return profiles


def cmd_project(args, cfg, out: Path):
    horizon = args.horizon_days if args.horizon_days is not None else cfg.projection.horizon_days
    if args.candidates:
        profiles = _read_candidates_csv(args.candidates)
    else:
        scenario = build_scenario(cfg)
        comp = _composition_from_args(args, cfg)
        m = run_simulation(scenario, comp)
        profiles = [(_composition_label(comp, cfg),
                     carbon.EmissionProfile(m.embodied_tco2, m.operational_tco2_per_day))]
    series = [carbon.project(p, horizon) for _, p in profiles]
    with open(out / "projection.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", *(label for label, _ in profiles)])
        for day in range(horizon + 1):
            writer.writerow([day, *(repr(float(s[day])) for s in series)])
    crossovers = []
    for i, (la, pa) in enumerate(profiles):
        for lb, pb in profiles[i + 1:]:
            t = carbon.crossover_time(pa, pb)
            crossovers.append({"a": la, "b": lb, "crossover_days": t,
                               "crossover_years": None if t is None else t / 365.0})
    _write_json(out / "crossovers.json", crossovers)
    for c in crossovers:
        when = "never" if c["crossover_days"] is None else f"{c['crossover_years']:.2f} years"
        print(f"{c['a']} vs {c['b']}: {when}")
    return ["projection.csv", "crossovers.json"], {}


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="microgrid-sizer",
                     description="Simulate and size data-center microgrids for carbon trade-offs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path)
        if name != "validate":
            p.add_argument("--out", type=Path, default=Path("results"))
        return p

    def composition_flags(p):
        p.add_argument("--wind", type=int, default=0, help="number of wind turbines")
        p.add_argument("--solar", type=int, default=0, help="number of solar units")
        p.add_argument("--battery", type=int, default=0, help="number of battery units")

    p = add("simulate", "simulate one composition and write metrics.json")
    composition_flags(p)
    p.add_argument("--dump-steps", action="store_true", help="also write per-step steps.csv")
    p.add_argument("--step-s", type=float, default=None, help="override the simulation step")

    p = add("exhaustive", "evaluate every composition of the parameter space")
    p.add_argument("--jobs", type=int, default=1)

    p = add("optimize", "NSGA-II search of the parameter space")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = add("candidates", "shortlist a Pareto front")
    p.add_argument("--front", type=Path, help="front.json from a previous run "
                                               "(default: run the optimizer first)")
    p.add_argument("--method", choices=("threshold", "greedy", "kmeans"))
    p.add_argument("--budgets", type=float, nargs="+")
    p.add_argument("-k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = add("project", "cumulative emissions over a horizon")
    composition_flags(p)
    p.add_argument("--candidates", type=Path, help="candidates.csv to project instead")
    p.add_argument("--horizon-days", type=int, default=None)

    add("validate", "check a config and its traces without writing anything")
    return parser


HANDLERS = {"simulate": cmd_simulate, "exhaustive": cmd_exhaustive, "optimize": cmd_optimize,
            "candidates": cmd_candidates, "project": cmd_project}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)

    started = time.perf_counter()
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            build_scenario(cfg)
            print(f"{args.config}: ok", file=sys.stderr)
            return 0
        out: Path = args.out
        out.mkdir(parents=True, exist_ok=True)
        written, extra = HANDLERS[args.command](args, cfg, out)
    except (MicrogridError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    manifest = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "config_path": str(args.config),
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "seed": extra.pop("seed", None),
        "jobs": getattr(args, "jobs", 1),
        "versions": {"microgrid_sizer": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
        "wall_time_s": time.perf_counter() - started,
        "outputs": written,
        **extra,
    }
    _write_json(out / "manifest.json", manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
