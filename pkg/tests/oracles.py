"""Independent reference implementations used to freeze expected test values.

Everything in this module is deliberately naive: brute-force scans, dense
grids, inclusion-exclusion, and Monte Carlo. Production code must agree with
these oracles, never the other way around. Nothing here imports the package
under test.
"""

import itertools

import numpy as np


def brute_nondominated_mask(points):
    """Boolean mask of points not dominated by any other point.

    q dominates p iff q <= p componentwise and q != p (exact comparisons).
    """
    pts = np.asarray(points, dtype=float)
    keep = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i == j:
                continue
            q, p = pts[j], pts[i]
            if np.all(q <= p) and np.any(q < p):
                keep[i] = False
                break
    return keep


_SIMPLEX_GRID_CACHE = {}


def simplex_grid(k, step):
    """All weight vectors on the unit simplex in R^k with coordinates that are
    integer multiples of step. Rows sum to 1 up to rounding."""
    key = (k, step)
    if key in _SIMPLEX_GRID_CACHE:
        return _SIMPLEX_GRID_CACHE[key]
    m = int(round(1.0 / step))
    if k == 1:
        grid = np.array([[1.0]])
    elif k == 2:
        a = np.arange(m + 1) * step
        grid = np.column_stack([a, 1.0 - a])
    elif k == 3:
        i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
        ok = (i + j) <= m
        a = i[ok] * step
        b = j[ok] * step
        grid = np.column_stack([a, b, 1.0 - a - b])
    else:
        rows = []
        for comb in itertools.combinations_with_replacement(range(k), m):
            counts = np.bincount(comb, minlength=k)
            rows.append(counts * step)
        grid = np.array(rows)
    _SIMPLEX_GRID_CACHE[key] = grid
    return grid


def grid_direction(gradients, step=1e-3):
    """Dense-grid solution of min over the simplex of 0.5 * ||sum_j w_j g_j||^2.

    Returns (theta, d) where d = -sum w_j g_j at the grid minimizer and
    theta = -0.5 ||d||^2. Grid resolution bounds the error in theta.
    """
    G = np.asarray(gradients, dtype=float)
    lam = simplex_grid(G.shape[0], step)
    dvec = lam @ G
    vals = 0.5 * np.einsum("ij,ij->i", dvec, dvec)
    i = int(np.argmin(vals))
    return -vals[i], -dvec[i]


def ie_hypervolume(points, ref):
    """Union volume of the boxes [p, ref] by inclusion-exclusion.

    Exponential in the number of points; use only for small fronts.
    """
    ref = np.asarray(ref, dtype=float)
    pts = [p for p in np.asarray(points, dtype=float) if np.all(p < ref)]
    total = 0.0
    for r in range(1, len(pts) + 1):
        for comb in itertools.combinations(pts, r):
            corner = np.max(np.vstack(comb), axis=0)
            vol = float(np.prod(np.maximum(ref - corner, 0.0)))
            total += ((-1.0) ** (r + 1)) * vol
    return total


def mc_hypervolume(points, ref, n_samples=200_000, seed=12345):
    """Monte Carlo estimate of the dominated volume below ref.

    Returns (estimate, standard_error). Samples uniformly in the bounding box
    [componentwise min of points, ref], which contains the whole dominated
    region intersected with the area below ref.
    """
    pts = np.asarray(points, dtype=float)
    ref = np.asarray(ref, dtype=float)
    lo = pts.min(axis=0)
    rng = np.random.default_rng(seed)
    samples = lo + rng.random((n_samples, ref.size)) * (ref - lo)
    hit = np.zeros(n_samples, dtype=bool)
    for p in pts:
        hit |= np.all(p <= samples, axis=1)
    frac = hit.mean()
    box_vol = float(np.prod(ref - lo))
    est = frac * box_vol
    se = box_vol * np.sqrt(max(frac * (1.0 - frac), 1e-300) / n_samples)
    return est, se


def scalar_armijo(eval_f, f0, theta, alpha0, delta, gamma, max_halvings):
    """First step length alpha0 * delta**h whose trial satisfies the sufficient
    decrease condition on every objective simultaneously. None if exhausted."""
    f0 = np.asarray(f0, dtype=float)
    for h in range(max_halvings + 1):
        alpha = alpha0 * delta**h
        trial = np.asarray(eval_f(alpha), dtype=float)
        if np.all(trial <= f0 + gamma * alpha * theta):
            return alpha
    return None


def fd_jacobian(evaluate, x, rel_step=1e-6):
    """Central finite-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(evaluate(x), dtype=float)
    jac = np.zeros((f0.size, x.size))
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (np.asarray(evaluate(xp)) - np.asarray(evaluate(xm))) / (2 * h)
    return jac
