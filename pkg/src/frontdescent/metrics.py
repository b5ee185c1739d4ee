"""Front quality metrics and performance profiles.

Conventions (pinned by tests; formula provenance in docs/metrics_formulas.md):

  purity        fraction of a front's points that survive into the combined
                reference front, membership by exact equality.
  gamma_spread  largest hole: max over objectives of the largest consecutive
                gap in that objective's sorted values. For two objectives
                this equals sorting by f1 and taking the worst |gap| over
                both coordinates, since a nondominated front sorted by f1 is
                sorted by f2 in reverse.
  delta_spread  per objective (d0 + dN + sum |d_i - dbar|) / (d0 + dN +
                (N-1) dbar) with d_i the sorted consecutive gaps, dbar their
                mean, and d0/dN the distances from the front's ends to the
                reference front's extremes; the metric is the max over
                objectives. Degenerate cases: with N = 1 there are no gaps
                and the score is 1 unless the point touches both extremes
                (then 0); a zero denominator scores 0.
  hypervolume   exact sweep (m = 2) or slicing (m = 3) of the region between
                the front and a reference point. Points that do not strictly
                dominate the reference point are excluded with a warning;
                all excluded gives 0 with a warning.
  profiles      performance ratios r = t / best over instances, cumulative
                step curves on the pooled tau grid. Higher-is-better metrics
                are inverted (1/v) first; instances where that is impossible
                (a value <= 0) are excluded with a warning.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .dominance import read_archive_csv


class MetricWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class FrontSet:
    """Validated point cloud in objective space for one solver on one instance."""

    points: np.ndarray
    solver: str
    instance: str

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 2:
            raise ValueError(f"points must be (N >= 1, m >= 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("front points must be finite")
        for i in range(len(pts)):
            le = np.all(pts <= pts[i], axis=1)
            ne = np.any(pts != pts[i], axis=1)
            if np.any(le & ne):
                raise ValueError(f"front is not mutually nondominated (row {i})")
            if np.sum(np.all(pts == pts[i], axis=1)) > 1:
                raise ValueError(f"duplicate front point {pts[i]}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self):
        return self.points.shape[1]


def front_from_archive_csv(path, solver, instance):
    archive = read_archive_csv(path)
    return FrontSet(archive.fx_matrix, solver, instance)


def reference_front(fronts):
    """Nondominated filter of the union of fronts (one instance), duplicates
    collapsed, rows sorted lexicographically."""
    fronts = list(fronts)
    if not fronts:
        raise ValueError("need at least one front")
    instances = {f.instance for f in fronts}
    if len(instances) > 1:
        raise ValueError(f"fronts from different instances: {sorted(instances)}")
    widths = {f.m for f in fronts}
    if len(widths) > 1:
        raise ValueError(f"fronts with different objective counts: {sorted(widths)}")
    union = np.unique(np.vstack([f.points for f in fronts]), axis=0)
    keep = np.ones(len(union), dtype=bool)
    for i in range(len(union)):
        le = np.all(union <= union[i], axis=1)
        ne = np.any(union != union[i], axis=1)
        keep[i] = not np.any(le & ne)
    return FrontSet(union[keep], "reference", fronts[0].instance)


def purity(front, reference):
    """Fraction of front points present (exactly) in the reference front."""
    if front.m != reference.m:
        raise ValueError("objective count mismatch")
    ref_rows = {row.tobytes() for row in reference.points}
    hits = sum(1 for row in front.points if row.tobytes() in ref_rows)
    return hits / len(front.points)


def gamma_spread(front):
    """Largest consecutive gap over per-objective sorted values; 0 for a
    single point."""
    if len(front.points) < 2:
        return 0.0
    worst = 0.0
    for col in front.points.T:
        gaps = np.diff(np.sort(col))
        worst = max(worst, float(gaps.max()))
    return worst


def delta_spread(front, reference):
    """Gap uniformity against the reference extremes; max over objectives."""
    if front.m != reference.m:
        raise ValueError("objective count mismatch")
    worst = 0.0
    for j in range(front.m):
        v = np.sort(front.points[:, j])
        ref_col = reference.points[:, j]
        d0 = abs(v[0] - ref_col.min())
        dN = abs(ref_col.max() - v[-1])
        gaps = np.diff(v)
        if gaps.size:
            dbar = float(gaps.mean())
            num = d0 + dN + float(np.sum(np.abs(gaps - dbar)))
            den = d0 + dN + gaps.size * dbar
        else:
            num = d0 + dN
            den = d0 + dN
        worst = max(worst, num / den if den > 0 else 0.0)
    return worst


def _hv2(points, ref):
    """Exact 2-d dominated area below ref. Prunes its own staircase, so the
    input may contain 2-d-dominated projections."""
    pts = points[np.all(points < ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    area = 0.0
    staircase = []
    best_f2 = np.inf
    for p in pts:
        if p[1] < best_f2:
            staircase.append(p)
            best_f2 = p[1]
    for i, p in enumerate(staircase):
        next_f1 = staircase[i + 1][0] if i + 1 < len(staircase) else ref[0]
        area += (next_f1 - p[0]) * (ref[1] - p[1])
    return float(area)


def _hv3(points, ref):
    """Exact 3-d dominated volume: sweep slabs between sorted f3 values,
    each slab contributing its 2-d area times its thickness."""
    zs = np.unique(points[:, 2])
    vol = 0.0
    for i, z in enumerate(zs):
        top = zs[i + 1] if i + 1 < len(zs) else ref[2]
        active = points[points[:, 2] <= z][:, :2]
        vol += _hv2(active, ref[:2]) * (top - z)
    return float(vol)


def hypervolume(front, ref_point):
    """Dominated hypervolume of the front w.r.t. ref_point (m in {2, 3})."""
    ref = np.asarray(ref_point, dtype=float)
    if ref.shape != (front.m,):
        raise ValueError(f"ref_point must have shape ({front.m},)")
    if not np.all(np.isfinite(ref)):
        raise ValueError("ref_point must be finite")
    inside = np.all(front.points < ref, axis=1)
    excluded = int(len(front.points) - inside.sum())
    if excluded:
        warnings.warn(
            f"{excluded} front point(s) do not strictly dominate the reference point; excluded",
            MetricWarning,
            stacklevel=2,
        )
    pts = front.points[inside]
    if len(pts) == 0:
        warnings.warn(
            "no front point strictly dominates the reference point; hypervolume is 0",
            MetricWarning,
            stacklevel=2,
        )
        return 0.0
    if front.m == 2:
        return _hv2(pts, ref)
    if front.m == 3:
        return _hv3(pts, ref)
    raise ValueError(f"hypervolume supports m in {{2, 3}}, got m={front.m}")


def hypervolume_reference_point(fronts, margin=0.01):
    """Componentwise max over the union of fronts plus margin * range per
    objective (the range taken over the same union)."""
    union = np.vstack([f.points for f in fronts])
    hi = union.max(axis=0)
    return hi + margin * (hi - union.min(axis=0))


@dataclass(frozen=True)
class ProfileCurve:
    solver: str
    tau: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if tau.shape != rho.shape or tau.ndim != 1 or tau.size < 1:
            raise ValueError("tau and rho must be equal-length 1-d arrays")
        if tau[0] < 1.0 or np.any(np.diff(tau) <= 0):
            raise ValueError("tau must be >= 1 and strictly increasing")
        if np.any(rho < 0) or np.any(rho > 1) or np.any(np.diff(rho) < 0):
            raise ValueError("rho must be nondecreasing within [0, 1]")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "rho", rho)


DIRECTIONS = ("lower_better", "higher_better")


def performance_profiles(values, direction, solvers=None):
    """Cumulative performance profile curves from a solver-by-instance matrix.

    values[s, p] is solver s's score on instance p. lower_better scores must
    be >= 0; higher_better scores are inverted (1/v), excluding instances
    where any solver scored <= 0 (reported via MetricWarning). A best score
    of 0 gives ratio 1 to the solvers attaining it and +inf to the rest;
    infinite ratios never enter the tau grid, so curves can top out below 1.
    """
    V = np.asarray(values, dtype=float)
    if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 1:
        raise ValueError(f"values must be a (solvers, instances) matrix, got {V.shape}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if not np.all(np.isfinite(V)):
        raise ValueError("scores must be finite")
    S = V.shape[0]
    if solvers is None:
        solvers = [f"s{i}" for i in range(S)]
    if len(solvers) != S:
        raise ValueError("one solver label per row required")
    if direction == "higher_better":
        bad = np.any(V <= 0.0, axis=0)
        if bad.any():
            warnings.warn(
                f"excluded {int(bad.sum())} instance(s) with non-positive scores from "
                "a higher-is-better profile",
                MetricWarning,
                stacklevel=2,
            )
        V = 1.0 / V[:, ~bad]
    else:
        if np.any(V < 0.0):
            raise ValueError("lower_better scores must be >= 0")
    if V.shape[1] == 0:
        raise ValueError("no instances left to profile")
    best = V.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(
            best > 0.0, V / np.where(best > 0.0, best, 1.0), np.where(V == 0.0, 1.0, np.inf)
        )
    finite = ratios[np.isfinite(ratios)]
    taus = np.unique(finite)
    return [
        ProfileCurve(label, taus, np.mean(ratios[s][:, None] <= taus[None, :], axis=0))
        for s, label in enumerate(solvers)
    ]


METRIC_COLUMNS = ("solver", "instance", "purity", "gamma", "delta", "hv")
PROFILE_COLUMNS = ("metric", "solver", "tau", "rho")
_FLOAT_FORMAT = ".17g"


def write_metrics_csv(path, rows):
    """rows: iterable of (solver, instance, purity, gamma, delta, hv)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRIC_COLUMNS)
        for solver, instance, pur, gam, del_, hv in rows:
            writer.writerow(
                [solver, instance]
                + [format(float(v), _FLOAT_FORMAT) for v in (pur, gam, del_, hv)]
            )


def write_profiles_csv(path, curves_by_metric):
    """curves_by_metric: mapping metric name -> list of ProfileCurve."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_COLUMNS)
        for metric in sorted(curves_by_metric):
            for curve in curves_by_metric[metric]:
                for t, r in zip(curve.tau, curve.rho):
                    writer.writerow(
                        [metric, curve.solver, format(float(t), _FLOAT_FORMAT), format(float(r), _FLOAT_FORMAT)]
                    )


def read_profiles_csv(path):
    """Inverse of write_profiles_csv: mapping metric -> list of ProfileCurve."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(PROFILE_COLUMNS):
            raise ValueError(f"bad profiles header {header!r}")
        rows = {}
        for metric, solver, tau, rho in reader:
            rows.setdefault((metric, solver), []).append((float(tau), float(rho)))
    out = {}
    for (metric, solver), pts in rows.items():
        tau = np.array([p[0] for p in pts])
        rho = np.array([p[1] for p in pts])
        out.setdefault(metric, []).append(ProfileCurve(solver, tau, rho))
    return out
