"""Steepest common-descent directions for a set of gradients.

The direction subproblem

    min_d  max_j g_j . d + 0.5 ||d||^2

has the dual: find the minimum-norm point of the convex hull of the
gradients, i.e. minimize 0.5 ||sum_j w_j g_j||^2 over the unit simplex.
At the optimum d = -sum_j w_j g_j and the optimal value is -0.5 ||d||^2,
which is <= 0 by construction and 0 exactly when the hull contains the
origin (the point is stationary).

One and two gradients have closed forms. Three or more go through projected
gradient on the simplex with Barzilai-Borwein steps, on gradients normalized
by their largest norm so the stopping tolerance is scale-free (the simplex
weights are invariant under a common positive scaling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dominance import ObjectiveSubset


class DualSolveError(RuntimeError):
    """The simplex QP failed to reach the requested tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class DirectionResult:
    d: np.ndarray
    theta: float
    weights: np.ndarray
    iterations: int = 0
    residual: float = 0.0


def project_to_simplex(v):
    """Euclidean projection onto the unit simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    positive = u - css / idx > 0
    rho = idx[positive][-1]
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def _face_step(G, w):
    """Minor cycle of the min-norm-point scheme: solve the equality-KKT
    system on the current support exactly; if the solution leaves the face,
    walk toward it until the first coordinate hits zero, drop that index, and
    resolve. The walk decreases the objective (the target is the affine
    minimizer of the face), and each drop shrinks the support, so the cycle
    is finite. Returns a point with objective <= that of ``w``."""
    w = w.copy()
    for _ in range(G.shape[0] + 1):
        support = np.flatnonzero(w > 0.0)
        ks = support.size
        kkt = np.zeros((ks + 1, ks + 1))
        kkt[:ks, :ks] = G[np.ix_(support, support)]
        kkt[:ks, ks] = 1.0
        kkt[ks, :ks] = 1.0
        rhs = np.zeros(ks + 1)
        rhs[ks] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        u = sol[:ks]
        if not np.all(np.isfinite(u)):
            return w
        v = np.zeros_like(w)
        v[support] = u
        if u.min() >= -1e-12:
            v = np.maximum(v, 0.0)
            total = v.sum()
            return v / total if total > 0.0 else w
        diff = v - w
        neg = diff < 0.0
        t = float(min(1.0, np.min(w[neg] / -diff[neg])))
        w = np.maximum(w + t * diff, 0.0)
        w[w <= 1e-15] = 0.0
        total = w.sum()
        if not total > 0.0:
            return v / v.sum() if v.sum() > 0.0 else w
        w = w / total
    return w


def _simplex_qp(G, tol, max_iter):
    """min 0.5 w' G w over the simplex; G = gram matrix of gradients.

    Projected gradient with Barzilai-Borwein step scaling and an exact line
    search over the feasible segment (raw BB steps can cycle on
    ill-conditioned problems), accelerated by an exact KKT solve on the
    current active face whenever that improves the objective. The face solves
    give active-set-style finite termination on rank-deficient gram matrices,
    where plain projected gradient zigzags. The Frank-Wolfe gap
    w'Gw - min_j (Gw)_j bounds the suboptimality, so it is the stopping
    residual.
    """
    k = G.shape[0]
    w = np.full(k, 1.0 / k)
    g = G @ w
    step = 1.0 / max(float(np.trace(G)), 1e-12)
    prev_w = None
    prev_g = None
    residual = np.inf
    for it in range(max_iter + 1):
        residual = float(w @ g - g.min())
        if residual <= tol:
            return w, residual, it
        if prev_w is not None:
            s = w - prev_w
            y = g - prev_g
            sy = float(s @ y)
            if sy > 1e-18:
                step = float(s @ s) / sy
        step = min(max(step, 1e-12), 1e12)
        prev_w, prev_g = w, g
        d = project_to_simplex(w - step * g) - w
        gd = float(g @ d)
        if gd < 0.0:
            # sum(d) == 0, so feasibility only caps decreasing coordinates
            shrinking = d < 0.0
            lam_max = float(np.min(w[shrinking] / -d[shrinking]))
            dGd = float(d @ (G @ d))
            lam = lam_max if dGd <= 0.0 else min(lam_max, -gd / dGd)
            w = np.maximum(w + lam * d, 0.0)
            w /= w.sum()
        cand = _face_step(G, w)
        if float(cand @ G @ cand) <= float(w @ G @ w):
            w = cand
        if np.array_equal(w, prev_w):
            # no representable progress left at this precision
            break
        g = G @ w
        g = G @ w
    raise DualSolveError(
        f"simplex QP did not reach tol={tol} in {max_iter} iterations (residual {residual:.3e})",
        residual,
    )


def solve_direction(gradients, tol=1e-9, max_iter=10_000):
    """Steepest common-descent direction for the given gradient rows.

    Returns DirectionResult with d, theta = -0.5||d||^2 <= 0, and the simplex
    weights. Non-finite gradients are rejected.
    """
    G = np.asarray(gradients, dtype=float)
    if G.ndim == 1:
        G = G[None, :]
    if G.ndim != 2 or G.shape[0] < 1:
        raise ValueError(f"expected a (k, n) gradient matrix, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ValueError("gradients must be finite")
    k = G.shape[0]
    if k == 1:
        d = -G[0]
        return DirectionResult(d, -0.5 * float(d @ d), np.array([1.0]))
    if k == 2:
        g1, g2 = G
        diff = g1 - g2
        den = float(diff @ diff)
        t = 0.0 if den == 0.0 else min(max(float(g1 @ diff) / den, 0.0), 1.0)
        w = np.array([1.0 - t, t])
        d = -(w @ G)
        return DirectionResult(d, -0.5 * float(d @ d), w)
    scale = float(np.max(np.linalg.norm(G, axis=1)))
    if scale == 0.0:
        return DirectionResult(np.zeros(G.shape[1]), 0.0, np.full(k, 1.0 / k))
    Gn = G / scale
    gram = Gn @ Gn.T
    w, residual, iters = _simplex_qp(gram, tol, max_iter)
    d = -(w @ G)
    return DirectionResult(d, -0.5 * float(d @ d), w, iters, residual)


class JacobianCache:
    """Memoizes problem.jacobian per decision vector.

    Keyed on the raw bytes of x: within one outer iteration the same point is
    queried once per objective subset, and the rows are just sliced. Scope a
    cache to one iteration; holding it longer silently changes evaluation
    counts (never results).
    """

    def __init__(self, problem):
        self.problem = problem
        self._store = {}

    def jacobian(self, x):
        key = np.asarray(x, dtype=float).tobytes()
        jac = self._store.get(key)
        if jac is None:
            jac = np.asarray(self.problem.jacobian(x), dtype=float)
            self._store[key] = jac
        return jac

    def clear(self):
        self._store.clear()


def theta_and_v(problem, x, subset=None, cache=None, counters=None):
    """Direction result for the objective subset at x (full set by default).

    Pulls the Jacobian through the cache when given; counts the dual solve in
    counters when given.
    """
    x = np.asarray(x, dtype=float)
    if subset is None:
        subset = ObjectiveSubset.full(problem.m)
    jac = cache.jacobian(x) if cache is not None else np.asarray(problem.jacobian(x), dtype=float)
    if jac.shape != (problem.m, problem.n):
        raise ValueError(f"jacobian shape {jac.shape} != ({problem.m}, {problem.n})")
    if subset.indices[-1] > problem.m:
        raise ValueError(f"subset {subset.indices} out of range for m={problem.m}")
    result = solve_direction(jac[list(subset.positions)])
    if counters is not None:
        counters.dual_solves += 1
    return result


def is_pareto_stationary(problem, x, eps_theta=1e-6, cache=None):
    """True iff the full-set direction value theta(x) >= -eps_theta."""
    return theta_and_v(problem, x, cache=cache).theta >= -eps_theta
