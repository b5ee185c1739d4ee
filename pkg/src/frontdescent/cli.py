"""Experiment driver and command line interface.

`frontdescent run` executes a grid of (problem, n, strategy) instances with
one or more solvers, writing per-run front CSVs and trace JSONL files plus
combined metrics.csv / profiles.csv and a manifest.json. Given the same
config and seed the CSV/JSONL outputs are byte-identical across replays and
across --jobs settings; the manifest additionally records wallclock and
versions and is not byte-stable.

`frontdescent validate` re-evaluates a front CSV against its problem and
checks mutual nondominance and stationarity.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import (
    RESERVED_SOLVERS,
    SOLVERS,
    SolverConfig,
    write_trace_jsonl,
)
from .direction import theta_and_v
from .dominance import ArchiveFormatError, read_archive_csv
from .linesearch import LineSearchParams
from .metrics import (
    delta_spread,
    front_from_archive_csv,
    gamma_spread,
    hypervolume,
    hypervolume_reference_point,
    performance_profiles,
    purity,
    reference_front,
    write_metrics_csv,
    write_profiles_csv,
)
from .problems import SEED_STRATEGIES, initial_points, registry_get, registry_names

PAPER_DIMS = (5, 10, 20, 30, 40, 50, 100, 200)
SMOKE_DIMS = (5, 10)

# Budget for the smoke grid: large enough that IFSD visibly fills the front,
# small enough that the whole grid replays in seconds.
SMOKE_SOLVER_CONFIG = SolverConfig(max_iterations=100, max_evaluations=2000)


def smoke_config(out, seed=0, jobs=1):
    """The smoke experiment: JOS_1 at the smoke dimensions, both seeding
    strategies, both solvers, fixed small budget."""
    return ExperimentConfig(
        problems=_grid("smoke"),
        solver_config=SMOKE_SOLVER_CONFIG,
        out=str(out),
        seed=seed,
        jobs=jobs,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple = (("JOS_1", 5),)  # (name, n) pairs
    strategies: tuple = SEED_STRATEGIES
    solvers: tuple = ("FSD", "IFSD")
    solver_config: SolverConfig = SolverConfig()
    out: str = "runs/out"
    seed: int = 0
    jobs: int = 1
    allow_experimental: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "problems", tuple((str(p), int(n)) for p, n in self.problems)
        )
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        for s in self.strategies:
            if s not in SEED_STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        for s in self.solvers:
            if s in RESERVED_SOLVERS:
                raise ValueError(f"solver {s} is reserved but not implemented")
            if s not in SOLVERS:
                raise ValueError(f"unknown solver {s!r}; known: {sorted(SOLVERS)}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def instance_key(problem, n, strategy):
    return f"{problem}_n{n}_{strategy}"


def instance_seed(base_seed, problem, n, strategy):
    """Stable per-instance seed; the solver is deliberately not an input so
    all solvers of one instance share the same seed points."""
    crc = zlib.crc32(instance_key(problem, n, strategy).encode())
    ss = np.random.SeedSequence([int(base_seed), crc])
    return int(ss.generate_state(1)[0])


def seed_count(strategy, n):
    return 1 if strategy == "midpoint" else n


def _run_one(payload):
    """Worker for one (problem, n, strategy, solver) run. Writes the front
    CSV and trace JSONL, returns a summary dict. Must stay picklable."""
    (name, n, strategy, solver, solver_config, base_seed, out, allow_experimental) = payload
    t0 = time.perf_counter()
    key = instance_key(name, n, strategy)
    summary = {"solver": solver, "instance": key, "status": "ok"}
    try:
        problem = registry_get(name, n, allow_experimental=allow_experimental)
        X0 = initial_points(
            problem, strategy, seed_count(strategy, n), instance_seed(base_seed, name, n, strategy)
        )
        trace = SOLVERS[solver](problem, X0, solver_config)
        front_path = Path(out) / "fronts" / solver / f"{key}.csv"
        trace_path = Path(out) / "traces" / solver / f"{key}.jsonl"
        front_path.parent.mkdir(parents=True, exist_ok=True)
        trace_path.parent.mkdir(parents=True, exist_ok=True)
        from .dominance import write_archive_csv

        write_archive_csv(trace.final, front_path)
        write_trace_jsonl(trace, trace_path)
        summary.update(
            iterations=trace.iterations,
            members=len(trace.final),
            evaluations=trace.counters.evaluations,
            jacobian_evaluations=trace.counters.jacobian_evaluations,
            dual_solves=trace.counters.dual_solves,
            linesearch_failures=trace.counters.linesearch_failures,
            skipped_insertions=trace.counters.skipped_insertions,
            stop_reason=trace.stop_reason,
            front=str(front_path),
            trace=str(trace_path),
        )
    except Exception as exc:  # noqa: BLE001  recorded per-run, the grid goes on
        summary.update(status="failed", error=f"{type(exc).__name__}: {exc}")
    summary["wallclock_s"] = time.perf_counter() - t0
    return summary


PROFILE_METRICS = {
    "purity": "higher_better",
    "gamma": "lower_better",
    "delta": "lower_better",
    "hv": "higher_better",
}


def run_experiment(config):
    """Run the full grid, then compute metrics and profiles. Returns the
    manifest dict (also written to <out>/manifest.json)."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    payloads = [
        (name, n, strategy, solver, config.solver_config, config.seed, str(out), config.allow_experimental)
        for name, n in config.problems
        for strategy in config.strategies
        for solver in config.solvers
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            summaries = list(pool.map(_run_one, payloads))
    else:
        summaries = [_run_one(p) for p in payloads]
    summaries.sort(key=lambda s: (s["instance"], s["solver"]))

    instances = sorted({instance_key(name, n, strat) for name, n in config.problems for strat in config.strategies})
    fronts = {}
    for s in summaries:
        if s["status"] == "ok":
            fronts[(s["solver"], s["instance"])] = front_from_archive_csv(
                s["front"], s["solver"], s["instance"]
            )
    metric_rows = []
    scores = {metric: {} for metric in PROFILE_METRICS}
    for inst in instances:
        present = [s for s in config.solvers if (s, inst) in fronts]
        if not present:
            continue
        group = [fronts[(s, inst)] for s in present]
        reference = reference_front(group)
        ref_point = hypervolume_reference_point(group)
        for solver, front in zip(present, group):
            row = {
                "purity": purity(front, reference),
                "gamma": gamma_spread(front),
                "delta": delta_spread(front, reference),
                "hv": hypervolume(front, ref_point),
            }
            metric_rows.append(
                (solver, inst, row["purity"], row["gamma"], row["delta"], row["hv"])
            )
            for metric, value in row.items():
                scores[metric].setdefault(inst, {})[solver] = value
    write_metrics_csv(out / "metrics.csv", metric_rows)

    curves_by_metric = {}
    for metric, direction in PROFILE_METRICS.items():
        # profiles need every solver's score on an instance; drop the rest
        complete = [
            inst
            for inst in instances
            if set(scores[metric].get(inst, {})) == set(config.solvers)
        ]
        if not complete:
            continue
        matrix = np.array(
            [[scores[metric][inst][solver] for inst in complete] for solver in config.solvers]
        )
        try:
            curves_by_metric[metric] = performance_profiles(
                matrix, direction, list(config.solvers)
            )
        except ValueError:
            continue  # e.g. every instance excluded by inversion
    write_profiles_csv(out / "profiles.csv", curves_by_metric)

    manifest = {
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "numpy_version": np.__version__,
        "config": {
            "problems": [list(p) for p in config.problems],
            "strategies": list(config.strategies),
            "solvers": list(config.solvers),
            "out": str(config.out),
            "seed": config.seed,
            "jobs": config.jobs,
            "allow_experimental": config.allow_experimental,
            "solver_config": {
                "eps_theta": config.solver_config.eps_theta,
                "max_iterations": config.solver_config.max_iterations,
                "max_evaluations": config.solver_config.max_evaluations,
                "subset_policy": config.solver_config.subset_policy,
                "crowding_mode": config.solver_config.crowding_mode,
                "crowding_quantile": config.solver_config.crowding_quantile,
                "record_theta": config.solver_config.record_theta,
                "linesearch": {
                    "alpha0": config.solver_config.linesearch.alpha0,
                    "delta": config.solver_config.linesearch.delta,
                    "gamma": config.solver_config.linesearch.gamma,
                    "max_halvings": config.solver_config.linesearch.max_halvings,
                },
            },
        },
        "runs": summaries,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


@dataclass
class ValidationReport:
    path: str
    rows: list = field(default_factory=list)  # (id, max_abs_f_error, theta)
    nondominated: bool = True
    max_f_error: float = 0.0
    min_theta: float = 0.0
    ok: bool = True


def validate_front(path, problem, eps_theta=1e-6, f_tol=1e-9):
    """Re-evaluate a front CSV and check it: F round-trip within f_tol,
    mutual nondominance, and theta(x) >= -eps_theta per point."""
    archive = read_archive_csv(path, validate=False)
    report = ValidationReport(path=str(path))
    try:
        from .dominance import Archive

        Archive(archive.members, validate=True)
    except Exception as exc:
        report.nondominated = False
        report.ok = False
        report.rows.append(("archive", float("nan"), float("nan")))
        report.error = str(exc)
    for member in archive.members:
        recomputed = np.asarray(problem.evaluate(member.x), dtype=float)
        err = float(np.max(np.abs(recomputed - member.fx)))
        theta = theta_and_v(problem, member.x).theta
        report.rows.append((member.id, err, theta))
        report.max_f_error = max(report.max_f_error, err)
        report.min_theta = min(report.min_theta, theta)
        if err > f_tol or theta < -eps_theta:
            report.ok = False
    return report


def _build_solver_config(ns):
    return SolverConfig(
        linesearch=LineSearchParams(
            alpha0=ns.alpha0, delta=ns.delta, gamma=ns.gamma, max_halvings=ns.max_halvings
        ),
        eps_theta=ns.eps_theta,
        max_iterations=ns.max_iterations,
        max_evaluations=ns.max_evaluations,
        subset_policy=ns.subset_policy,
        crowding_mode=ns.crowding_mode,
        crowding_quantile=ns.crowding_quantile,
        seed=ns.seed,
        record_theta=not ns.no_record_theta,
    )


def _load_config_file(path):
    if sys.version_info >= (3, 11):
        import tomllib as toml
    else:
        import tomli as toml
    with open(path, "rb") as fh:
        return toml.load(fh)


def _problems_from_specs(specs):
    out = []
    for spec in specs:
        name, _, dim = str(spec).partition(":")
        if not dim:
            raise ValueError(f"problem spec {spec!r} must look like NAME:N")
        out.append((name, int(dim)))
    return tuple(out)


def _grid(kind):
    if kind == "paper":
        names = ("JOS_1", "CEC09_2", "CEC09_3", "CEC09_10", "MAN")
        return tuple((name, n) for name in names for n in PAPER_DIMS)
    if kind == "smoke":
        return tuple(("JOS_1", n) for n in SMOKE_DIMS)
    raise ValueError(f"unknown grid {kind!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="frontdescent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid")
    run.add_argument("--config", help="TOML config file; flags override its keys")
    run.add_argument("--problem", action="append", default=None, help="problem spec NAME:N (repeatable)")
    run.add_argument("--n", type=int, nargs="*", default=None, help="dimensions, combined with --problem names")
    run.add_argument("--grid", choices=["paper", "smoke"], default=None)
    run.add_argument("--strategy", action="append", choices=list(SEED_STRATEGIES), default=None)
    run.add_argument("--solver", action="append", default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jobs", type=int, default=None)
    run.add_argument("--allow-experimental", action="store_true")
    run.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    run.add_argument("--max-evaluations", dest="max_evaluations", type=int, default=None)
    run.add_argument("--eps-theta", dest="eps_theta", type=float, default=None)
    run.add_argument("--alpha0", type=float, default=None)
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--gamma", type=float, default=None)
    run.add_argument("--max-halvings", dest="max_halvings", type=int, default=None)
    run.add_argument("--subset-policy", dest="subset_policy", default=None)
    run.add_argument("--crowding-mode", dest="crowding_mode", default=None)
    run.add_argument("--crowding-quantile", dest="crowding_quantile", type=float, default=None)
    run.add_argument("--no-record-theta", dest="no_record_theta", action="store_true")

    val = sub.add_parser("validate", help="re-evaluate and check a front CSV")
    val.add_argument("path")
    val.add_argument("--problem", required=True)
    val.add_argument("--n", type=int, required=True)
    val.add_argument("--eps-theta", dest="eps_theta", type=float, default=1e-6)
    val.add_argument("--f-tol", dest="f_tol", type=float, default=1e-9)
    val.add_argument("--allow-experimental", action="store_true")

    sub.add_parser("problems", help="list registered problems")
    return parser


_DEFAULTS = {
    "problems": ["JOS_1:5"],
    "strategies": list(SEED_STRATEGIES),
    "solvers": ["FSD", "IFSD"],
    "out": "runs/out",
    "seed": 0,
    "jobs": 1,
    "allow_experimental": False,
    "max_iterations": 200,
    "max_evaluations": 2_000_000,
    "eps_theta": 1e-6,
    "alpha0": 1.0,
    "delta": 0.5,
    "gamma": 1e-4,
    "max_halvings": 60,
    "subset_policy": "all_nonempty",
    "crowding_mode": "quantile",
    "crowding_quantile": 0.5,
    "record_theta": True,
}


def _resolve_run_config(ns):
    settings = dict(_DEFAULTS)
    if ns.config:
        file_cfg = _load_config_file(ns.config)
        unknown = set(file_cfg) - set(settings)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_cfg)
    if ns.grid:
        problems = _grid(ns.grid)
        if ns.grid == "paper":
            settings["allow_experimental"] = True
    elif ns.problem:
        if ns.n:
            problems = tuple((spec.split(":")[0], n) for spec in ns.problem for n in ns.n)
        else:
            problems = _problems_from_specs(ns.problem)
    else:
        problems = _problems_from_specs(settings["problems"])
    for flag in (
        "out",
        "seed",
        "jobs",
        "max_iterations",
        "max_evaluations",
        "eps_theta",
        "alpha0",
        "delta",
        "gamma",
        "max_halvings",
        "subset_policy",
        "crowding_mode",
        "crowding_quantile",
    ):
        value = getattr(ns, flag)
        if value is not None:
            settings[flag] = value
    if ns.strategy:
        settings["strategies"] = ns.strategy
    if ns.solver:
        settings["solvers"] = ns.solver
    if ns.allow_experimental:
        settings["allow_experimental"] = True
    if ns.no_record_theta:
        settings["record_theta"] = False
    solver_config = SolverConfig(
        linesearch=LineSearchParams(
            alpha0=settings["alpha0"],
            delta=settings["delta"],
            gamma=settings["gamma"],
            max_halvings=settings["max_halvings"],
        ),
        eps_theta=settings["eps_theta"],
        max_iterations=settings["max_iterations"],
        max_evaluations=settings["max_evaluations"],
        subset_policy=settings["subset_policy"],
        crowding_mode=settings["crowding_mode"],
        crowding_quantile=settings["crowding_quantile"],
        seed=settings["seed"],
        record_theta=settings["record_theta"],
    )
    return ExperimentConfig(
        problems=problems,
        strategies=tuple(settings["strategies"]),
        solvers=tuple(settings["solvers"]),
        solver_config=solver_config,
        out=settings["out"],
        seed=settings["seed"],
        jobs=settings["jobs"],
        allow_experimental=settings["allow_experimental"],
    )


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "problems":
        for name in registry_names():
            print(name)
        return 0
    if ns.command == "validate":
        try:
            problem = registry_get(ns.problem, ns.n, allow_experimental=ns.allow_experimental)
            report = validate_front(ns.path, problem, eps_theta=ns.eps_theta, f_tol=ns.f_tol)
        except (ArchiveFormatError, ValueError) as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 2
        print(f"front {report.path}: {len(report.rows)} points")
        print(f"{'id':>8}  {'max|F err|':>12}  {'theta':>12}")
        for member_id, err, theta in report.rows:
            print(f"{member_id:>8}  {err:>12.3e}  {theta:>12.3e}")
        print(
            f"nondominated={report.nondominated} max_f_error={report.max_f_error:.3e} "
            f"min_theta={report.min_theta:.3e} -> {'OK' if report.ok else 'FAIL'}"
        )
        return 0 if report.ok else 1
    try:
        config = _resolve_run_config(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest = run_experiment(config)
    failed = [r for r in manifest["runs"] if r["status"] != "ok"]
    for r in manifest["runs"]:
        line = f"{r['solver']:>6} {r['instance']:<40} {r['status']}"
        if r["status"] == "ok":
            line += f" iters={r['iterations']} members={r['members']} evals={r['evaluations']}"
        else:
            line += f" {r['error']}"
        print(line)
    print(f"outputs in {config.out}")
    return 1 if failed and len(failed) == len(manifest["runs"]) else 0


if __name__ == "__main__":
    raise SystemExit(main())
