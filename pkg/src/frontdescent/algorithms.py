"""Front-expanding steepest-descent drivers.

Both solvers iterate over the members of the current front and grow/refine
it in place within each outer iteration:

  fsd_run   every iteration-start member is considered for every nonempty
            objective subset; a search launches only if no point of the
            working archive is strictly below it under the restricted
            objectives and the subset direction value is negative. Accepted
            steps go through the front-aware Armijo search.

  ifsd_run  every iteration-start member still in the working archive first
            takes a plain Armijo step along the common descent direction
            (when not already stationary), the result z replacing it in the
            archive; then, unless z sits in a crowded region, each objective
            subset with a negative direction value launches a nondominance
            backtracking search from z.

Insertions always go through Archive.insert_filtered and are re-checked for
dominance against the live archive first; a candidate made obsolete by an
earlier insertion in the same sweep is skipped and counted.

Determinism: given the same problem, seed archive, and config, every run
produces bit-identical snapshots, counters, and exports. Wallclock timings
are recorded but excluded from that guarantee.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .direction import JacobianCache, theta_and_v
from .dominance import Archive, FrontMember, ObjectiveSubset, all_nonempty_subsets
from .linesearch import LineSearchError, LineSearchParams, armijo_front, armijo_single, nondominance_backtrack

SUBSET_POLICIES = ("all_nonempty", "exclude_full_in_partial_loop")
CROWDING_MODES = ("off", "quantile")


@dataclass(frozen=True)
class SolverConfig:
    linesearch: LineSearchParams = LineSearchParams()
    eps_theta: float = 1e-6
    max_iterations: int = 200
    max_evaluations: int = 2_000_000
    subset_policy: str = "all_nonempty"
    crowding_mode: str = "quantile"
    crowding_quantile: float = 0.5
    seed: int = 0
    record_theta: bool = True

    def __post_init__(self):
        if self.eps_theta < 0:
            raise ValueError(f"eps_theta must be >= 0, got {self.eps_theta}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.subset_policy not in SUBSET_POLICIES:
            raise ValueError(f"subset_policy must be one of {SUBSET_POLICIES}")
        if self.crowding_mode not in CROWDING_MODES:
            raise ValueError(f"crowding_mode must be one of {CROWDING_MODES}")
        if not 0.0 <= self.crowding_quantile <= 1.0:
            raise ValueError("crowding_quantile must be in [0, 1]")


@dataclass
class EvalCounters:
    """Work done by the algorithm itself. The diagnostic stationarity pass
    recorded per snapshot is deliberately not counted here."""

    evaluations: int = 0
    jacobian_evaluations: int = 0
    dual_solves: int = 0
    linesearch_failures: int = 0
    skipped_insertions: int = 0


class CountingProblem:
    """Problem proxy counting objective and Jacobian evaluations."""

    def __init__(self, problem, counters):
        self._problem = problem
        self._counters = counters

    @property
    def name(self):
        return self._problem.name

    @property
    def n(self):
        return self._problem.n

    @property
    def m(self):
        return self._problem.m

    @property
    def lower(self):
        return self._problem.lower

    @property
    def upper(self):
        return self._problem.upper

    def evaluate(self, x):
        self._counters.evaluations += 1
        return self._problem.evaluate(x)

    def jacobian(self, x):
        self._counters.jacobian_evaluations += 1
        return self._problem.jacobian(x)


@dataclass
class RunTrace:
    """Everything a run leaves behind.

    snapshots[k] is the archive after outer iteration k (snapshots[0] is the
    seed archive). insertions and launches carry the iteration index that
    produced them, for post-hoc structural checks. max_abs_theta[k] is the
    largest |theta| over snapshot members under the full objective set, from
    an uncounted diagnostic pass (nan when disabled).
    """

    snapshots: list = field(default_factory=list)
    counters: EvalCounters = field(default_factory=EvalCounters)
    evaluations_at: list = field(default_factory=list)
    max_abs_theta: list = field(default_factory=list)
    insertions: list = field(default_factory=list)  # (iteration, FrontMember)
    launches: list = field(default_factory=list)  # (iteration, kind, subset indices, member id)
    wallclock: list = field(default_factory=list)
    stop_reason: str = ""

    @property
    def final(self):
        return self.snapshots[-1]

    @property
    def iterations(self):
        return len(self.snapshots) - 1


def stopping_rule(trace, config):
    """True when the run is over: iteration budget, evaluation budget, or an
    iteration that left the archive unchanged (same member ids)."""
    if trace.iterations >= config.max_iterations:
        return True
    if trace.counters.evaluations >= config.max_evaluations:
        return True
    if len(trace.snapshots) >= 2 and trace.snapshots[-1].ids == trace.snapshots[-2].ids:
        return True
    return False


def _stop_reason(trace, config):
    if len(trace.snapshots) >= 2 and trace.snapshots[-1].ids == trace.snapshots[-2].ids:
        return "no_change"
    if trace.counters.evaluations >= config.max_evaluations:
        return "max_evaluations"
    return "max_iterations"


def crowding_distances(archive):
    """NSGA-II style crowding distance per member, aligned with member order.

    Boundary members of any objective get +inf; interior members sum the
    normalized gap between their sorted neighbors over objectives. An
    objective with zero range contributes 0. Sorting ties break by member id
    so the result does not depend on internal ordering.
    """
    N = len(archive)
    if N == 0:
        return np.empty(0)
    if N <= 2:
        return np.full(N, np.inf)
    F = archive.fx_matrix
    ids = np.array([m.id for m in archive.members])
    dist = np.zeros(N)
    boundary = np.zeros(N, dtype=bool)
    for col in F.T:
        order = np.lexsort((ids, col))
        boundary[order[0]] = True
        boundary[order[-1]] = True
        rng = col[order[-1]] - col[order[0]]
        if rng == 0.0:
            continue
        dist[order[1:-1]] += (col[order[2:]] - col[order[:-2]]) / rng
    dist[boundary] = np.inf
    return dist


def _validate_seed_archive(X0):
    if not isinstance(X0, Archive):
        raise TypeError("X0 must be an Archive")
    if len(X0) == 0:
        raise ValueError("seed archive must be nonempty")
    Archive(X0.members, validate=True)
    ids = [m.id for m in X0.members]
    if ids != sorted(ids):
        raise ValueError("seed archive members must be in ascending id order")


def _diag_max_abs_theta(problem, archive, config):
    if not config.record_theta:
        return float("nan")
    cache = JacobianCache(problem)
    worst = 0.0
    for member in archive.members:
        res = theta_and_v(problem, member.x, cache=cache)
        worst = max(worst, abs(res.theta))
    return worst


def _snapshot(trace, archive, problem, config, dt):
    trace.snapshots.append(archive)
    trace.evaluations_at.append(trace.counters.evaluations)
    trace.max_abs_theta.append(_diag_max_abs_theta(problem, archive, config))
    trace.wallclock.append(dt)


def _try_insert(trace, counters, current, iteration, x, fx, next_id, parent_id):
    """Dominance re-check plus filtered insert. Returns (archive, next_id);
    unchanged when the candidate was skipped or was an exact duplicate."""
    fx = np.asarray(fx, dtype=float)
    if not np.all(np.isfinite(fx)):
        counters.skipped_insertions += 1
        return current, next_id
    F = current.fx_matrix
    if np.any(np.all(F <= fx, axis=1) & np.any(F < fx, axis=1)):
        counters.skipped_insertions += 1
        return current, next_id
    member = FrontMember(x, fx, next_id, parent_id)
    new = current.insert_filtered(member)
    if new is current:
        return current, next_id
    trace.insertions.append((iteration, member))
    return new, next_id + 1


def fsd_run(problem, X0, config=SolverConfig()):
    """Front steepest descent over all objective subsets.

    Each iteration sweeps the iteration-start members in id order; for each
    nonempty objective subset in (cardinality, lexicographic) order the
    member must currently be subset-nondominated in the working archive and
    have a negative subset direction value to launch a front Armijo search.
    """
    _validate_seed_archive(X0)
    counters = EvalCounters()
    counting = CountingProblem(problem, counters)
    trace = RunTrace(counters=counters)
    _snapshot(trace, X0, problem, config, 0.0)
    for member in X0.members:
        trace.insertions.append((0, member))
    next_id = max(m.id for m in X0.members) + 1
    subsets = all_nonempty_subsets(problem.m)
    X = X0
    while not stopping_rule(trace, config):
        t0 = time.perf_counter()
        k = trace.iterations + 1
        cache = JacobianCache(counting)
        current = X
        for member in X.members:
            for subset in subsets:
                pos = list(subset.positions)
                FI = current.fx_matrix[:, pos]
                fI = member.fx[pos]
                if np.any(np.all(FI <= fI, axis=1) & np.any(FI < fI, axis=1)):
                    continue
                res = theta_and_v(counting, member.x, subset, cache=cache, counters=counters)
                if res.theta >= -config.eps_theta:
                    continue
                trace.launches.append((k, "front", subset.indices, member.id))
                try:
                    alpha = armijo_front(
                        counting, subset, current, member, res.d, res.theta, config.linesearch
                    )
                except LineSearchError:
                    counters.linesearch_failures += 1
                    continue
                z_x = member.x + alpha * res.d
                z_fx = np.asarray(counting.evaluate(z_x), dtype=float)
                current, next_id = _try_insert(
                    trace, counters, current, k, z_x, z_fx, next_id, member.id
                )
        X = current
        _snapshot(trace, X, problem, config, time.perf_counter() - t0)
    trace.stop_reason = _stop_reason(trace, config)
    return trace


def ifsd_run(problem, X0, config=SolverConfig()):
    """Improved front steepest descent.

    Per surviving iteration-start member: a preliminary single-point Armijo
    step along the common descent direction (skipped at stationarity, where
    the member itself goes forward), then per-subset nondominance
    backtracking searches from the stepped point, gated by the crowding
    quantile and skipped as soon as the point falls out of the working
    archive.
    """
    _validate_seed_archive(X0)
    counters = EvalCounters()
    counting = CountingProblem(problem, counters)
    trace = RunTrace(counters=counters)
    _snapshot(trace, X0, problem, config, 0.0)
    for member in X0.members:
        trace.insertions.append((0, member))
    next_id = max(m.id for m in X0.members) + 1
    full = ObjectiveSubset.full(problem.m)
    partial_subsets = all_nonempty_subsets(
        problem.m, include_full=config.subset_policy == "all_nonempty"
    )
    X = X0
    while not stopping_rule(trace, config):
        t0 = time.perf_counter()
        k = trace.iterations + 1
        cache = JacobianCache(counting)
        current = X
        for member in X.members:
            if member.id not in current.ids:
                continue
            res_full = theta_and_v(counting, member.x, full, cache=cache, counters=counters)
            z = member
            if res_full.theta < -config.eps_theta:
                trace.launches.append((k, "preliminary", full.indices, member.id))
                try:
                    alpha = armijo_single(
                        counting, member, res_full.d, res_full.theta, config.linesearch
                    )
                except LineSearchError:
                    counters.linesearch_failures += 1
                    continue
                z_x = member.x + alpha * res_full.d
                z_fx = np.asarray(counting.evaluate(z_x), dtype=float)
                candidate_id = next_id
                current, next_id = _try_insert(
                    trace, counters, current, k, z_x, z_fx, next_id, member.id
                )
                if next_id == candidate_id:  # candidate skipped; nothing to explore from
                    continue
                z = trace.insertions[-1][1]
            if config.crowding_mode == "quantile":
                dists = crowding_distances(current)
                dz = dists[current.index_of(z.id)]
                finite = dists[np.isfinite(dists)]
                if (
                    finite.size
                    and np.isfinite(dz)
                    and dz < np.quantile(finite, config.crowding_quantile)
                ):
                    continue
            for subset in partial_subsets:
                if z.id not in current.ids:
                    break
                res = theta_and_v(counting, z.x, subset, cache=cache, counters=counters)
                if res.theta >= -config.eps_theta:
                    continue
                trace.launches.append((k, "partial", subset.indices, z.id))
                try:
                    alpha = nondominance_backtrack(counting, current, z, res.d, config.linesearch)
                except LineSearchError:
                    counters.linesearch_failures += 1
                    continue
                w_x = z.x + alpha * res.d
                w_fx = np.asarray(counting.evaluate(w_x), dtype=float)
                current, next_id = _try_insert(
                    trace, counters, current, k, w_x, w_fx, next_id, z.id
                )
        X = current
        _snapshot(trace, X, problem, config, time.perf_counter() - t0)
    trace.stop_reason = _stop_reason(trace, config)
    return trace


SOLVERS = {"FSD": fsd_run, "IFSD": ifsd_run}

# Identifier reserved for the extrapolated variant; not implemented here.
RESERVED_SOLVERS = ("EFSD",)


def write_trace_jsonl(trace, path):
    """One JSON record per snapshot: iteration index, member count,
    cumulative evaluations, and the largest |theta| over members."""
    with open(path, "w") as fh:
        for k, snap in enumerate(trace.snapshots):
            record = {
                "k": k,
                "member_count": len(snap),
                "evaluations": trace.evaluations_at[k],
                "max_theta": trace.max_abs_theta[k],
            }
            fh.write(json.dumps(record) + "\n")
