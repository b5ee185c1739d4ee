"""Smooth unconstrained multi-objective benchmark problems.

Each problem bundles an objective evaluator F: R^n -> R^m, an analytic
Jacobian (rows are objective gradients), and a reference box used only for
seeding: the solvers themselves are unconstrained. Formula provenance notes
live in docs/problem_formulas.md.

Variable indexing in the CEC 2009 formulas below is 1-based to match the
published definitions; code comments call out the shift where it bites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dominance import Archive, FrontMember


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    n: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: Callable
    jacobian: Callable
    experimental: bool = False

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        up = np.asarray(self.upper, dtype=float)
        if lo.shape != (self.n,) or up.shape != (self.n,):
            raise ValueError("bounds must have shape (n,)")
        if not np.all(lo < up):
            raise ValueError("lower bounds must be strictly below upper bounds")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def box(self):
        return self.lower, self.upper


def _check_x(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected decision vector of shape ({n},), got {x.shape}")
    return x


def jos_1(n):
    """Two convex quadratics with minimizers at 0 and 2*ones.

        f1(x) = (1/n) sum x_i^2
        f2(x) = (1/n) sum (x_i - 2)^2

    The Pareto set is the diagonal segment {t * ones : t in [0, 2]}. Box
    [-100, 100]^n, used for seeding only.
    """
    if n < 1:
        raise ValueError("JOS_1 requires n >= 1")

    def evaluate(x):
        x = _check_x(x, n)
        return np.array([np.mean(x * x), np.mean((x - 2.0) ** 2)])

    def jacobian(x):
        x = _check_x(x, n)
        return np.vstack([2.0 * x / n, 2.0 * (x - 2.0) / n])

    return Problem("JOS_1", n, 2, np.full(n, -100.0), np.full(n, 100.0), evaluate, jacobian)


def cec09_2(n):
    """CEC 2009 unconstrained instance 2 (UF2), bi-objective.

    Tail variables j = 2..n split by parity into J1 (odd, enters f1) and J2
    (even, enters f2). With c_j = 6 pi x1 + j pi / n and
    a_j = 0.3 x1^2 cos(24 pi x1 + 4 j pi / n) + 0.6 x1:

        y_j = x_j - a_j cos(c_j)   (j odd)
        y_j = x_j - a_j sin(c_j)   (j even)
        f1  = x1 + (2/|J1|) sum_{J1} y_j^2
        f2  = 1 - sqrt(x1) + (2/|J2|) sum_{J2} y_j^2

    Box [0,1] x [-1,1]^(n-1). f2 is undefined for x1 < 0 and nonsmooth at
    x1 = 0; evaluation returns NaN outside the domain and the solvers skip
    such trials.
    """
    if n < 3:
        raise ValueError("CEC09_2 requires n >= 3 so both index groups are nonempty")
    j = np.arange(2, n + 1)  # 1-based tail indices
    odd = j % 2 == 1
    n1 = int(odd.sum())
    n2 = int((~odd).sum())

    def _tail(x):
        x1 = x[0]
        c = 6.0 * np.pi * x1 + j * np.pi / n
        b = 24.0 * np.pi * x1 + 4.0 * j * np.pi / n
        a = 0.3 * x1 * x1 * np.cos(b) + 0.6 * x1
        trig = np.where(odd, np.cos(c), np.sin(c))
        y = x[1:] - a * trig
        return x1, c, b, a, trig, y

    def evaluate(x):
        x = _check_x(x, n)
        x1, c, b, a, trig, y = _tail(x)
        with np.errstate(invalid="ignore"):
            root = np.sqrt(x1)
        f1 = x1 + 2.0 / n1 * np.sum(y[odd] ** 2)
        f2 = 1.0 - root + 2.0 / n2 * np.sum(y[~odd] ** 2)
        return np.array([f1, f2])

    def jacobian(x):
        x = _check_x(x, n)
        x1, c, b, a, trig, y = _tail(x)
        da = 0.6 * x1 * np.cos(b) - 7.2 * np.pi * x1 * x1 * np.sin(b) + 0.6
        dtrig = np.where(odd, -6.0 * np.pi * np.sin(c), 6.0 * np.pi * np.cos(c))
        dy_dx1 = -(da * trig + a * dtrig)
        g1 = np.zeros(n)
        g2 = np.zeros(n)
        g1[0] = 1.0 + 4.0 / n1 * np.sum(y[odd] * dy_dx1[odd])
        g2[0] = -0.5 / np.sqrt(x1) + 4.0 / n2 * np.sum(y[~odd] * dy_dx1[~odd])
        tail1 = np.zeros(n - 1)
        tail1[odd] = 4.0 / n1 * y[odd]
        tail2 = np.zeros(n - 1)
        tail2[~odd] = 4.0 / n2 * y[~odd]
        g1[1:] = tail1
        g2[1:] = tail2
        return np.vstack([g1, g2])

    lower = np.concatenate([[0.0], np.full(n - 1, -1.0)])
    upper = np.concatenate([[1.0], np.full(n - 1, 1.0)])
    return Problem("CEC09_2", n, 2, lower, upper, evaluate, jacobian)


def cec09_3(n):
    """CEC 2009 unconstrained instance 3 (UF3), bi-objective.

    Tail deviations y_j = x_j - x1^(0.5 (1 + 3 (j-2)/(n-2))) for j = 2..n,
    split by parity into J1 (odd) and J2 (even). Each group contributes the
    multimodal term

        (2/|J|) * (4 sum y_j^2 - 2 prod cos(20 y_j pi / sqrt(j)) + 2)

    on top of f1 = x1, f2 = 1 - sqrt(x1). Box [0, 1]^n. On the manifold
    y = 0 the group terms vanish, leaving the front f2 = 1 - sqrt(f1).
    """
    if n < 3:
        raise ValueError("CEC09_3 requires n >= 3 so both index groups are nonempty")
    j = np.arange(2, n + 1)
    odd = j % 2 == 1
    expo = 0.5 * (1.0 + 3.0 * (j - 2.0) / (n - 2.0))
    groups = [odd, ~odd]

    def _tail(x):
        x1 = x[0]
        with np.errstate(invalid="ignore"):
            y = x[1:] - x1**expo
        t = 20.0 * y * np.pi / np.sqrt(j)
        return x1, y, t

    def _group_value(y, t, mask):
        return 4.0 * np.sum(y[mask] ** 2) - 2.0 * np.prod(np.cos(t[mask])) + 2.0

    def evaluate(x):
        x = _check_x(x, n)
        x1, y, t = _tail(x)
        with np.errstate(invalid="ignore"):
            root = np.sqrt(x1)
        base = np.array([x1, 1.0 - root])
        return base + np.array(
            [2.0 / groups[i].sum() * _group_value(y, t, groups[i]) for i in range(2)]
        )

    def jacobian(x):
        x = _check_x(x, n)
        x1, y, t = _tail(x)
        dy_dx1 = -expo * x1 ** (expo - 1.0)
        dt_dy = 20.0 * np.pi / np.sqrt(j)
        jac = np.zeros((2, n))
        base_dx1 = [1.0, -0.5 / np.sqrt(x1)]
        for i, mask in enumerate(groups):
            size = mask.sum()
            cj = np.cos(t[mask])
            sj = np.sin(t[mask])
            # product of cos over the group excluding each position in turn
            fwd = np.concatenate([[1.0], np.cumprod(cj)[:-1]])
            bwd = np.concatenate([np.cumprod(cj[::-1])[-2::-1], [1.0]])
            prod_wo = fwd * bwd
            dg_dy = 8.0 * y[mask] + 2.0 * sj * dt_dy[mask] * prod_wo
            jac[i, 0] = base_dx1[i] + 2.0 / size * np.sum(dg_dy * dy_dx1[mask])
            tail = np.zeros(n - 1)
            tail[mask] = 2.0 / size * dg_dy
            jac[i, 1:] = tail
        return jac

    return Problem("CEC09_3", n, 2, np.zeros(n), np.ones(n), evaluate, jacobian)


def cec09_10(n):
    """CEC 2009 unconstrained instance 10 (UF10), tri-objective.

    Tail deviations y_j = x_j - 2 x2 sin(2 pi x1 + j pi / n) for j = 3..n,
    split by j mod 3 into J1 (remainder 1), J2 (remainder 2), J3 (remainder
    0). Each y contributes h(y) = 4 y^2 - cos(8 pi y) + 1 to its group:

        f1 = cos(pi x1 / 2) cos(pi x2 / 2) + (2/|J1|) sum_{J1} h
        f2 = cos(pi x1 / 2) sin(pi x2 / 2) + (2/|J2|) sum_{J2} h
        f3 = sin(pi x1 / 2)               + (2/|J3|) sum_{J3} h

    Box [0,1]^2 x [-2,2]^(n-2). On y = 0 the objective vector lies on the
    unit sphere octant.
    """
    if n < 5:
        raise ValueError("CEC09_10 requires n >= 5 so all three index groups are nonempty")
    j = np.arange(3, n + 1)
    masks = [j % 3 == 1, j % 3 == 2, j % 3 == 0]

    def _tail(x):
        x1, x2 = x[0], x[1]
        phase = 2.0 * np.pi * x1 + j * np.pi / n
        s = np.sin(phase)
        c = np.cos(phase)
        y = x[2:] - 2.0 * x2 * s
        return x1, x2, s, c, y

    def evaluate(x):
        x = _check_x(x, n)
        x1, x2, s, c, y = _tail(x)
        h = 4.0 * y * y - np.cos(8.0 * np.pi * y) + 1.0
        a1 = np.cos(0.5 * np.pi * x1)
        a2 = np.sin(0.5 * np.pi * x1)
        b1 = np.cos(0.5 * np.pi * x2)
        b2 = np.sin(0.5 * np.pi * x2)
        base = np.array([a1 * b1, a1 * b2, a2])
        return base + np.array([2.0 / m.sum() * np.sum(h[m]) for m in masks])

    def jacobian(x):
        x = _check_x(x, n)
        x1, x2, s, c, y = _tail(x)
        hp = 8.0 * y + 8.0 * np.pi * np.sin(8.0 * np.pi * y)
        dy_dx1 = -4.0 * np.pi * x2 * c
        dy_dx2 = -2.0 * s
        a1 = np.cos(0.5 * np.pi * x1)
        a2 = np.sin(0.5 * np.pi * x1)
        b1 = np.cos(0.5 * np.pi * x2)
        b2 = np.sin(0.5 * np.pi * x2)
        half_pi = 0.5 * np.pi
        base_dx1 = [-half_pi * a2 * b1, -half_pi * a2 * b2, half_pi * a1]
        base_dx2 = [-half_pi * a1 * b2, half_pi * a1 * b1, 0.0]
        jac = np.zeros((3, n))
        for i, m in enumerate(masks):
            size = m.sum()
            jac[i, 0] = base_dx1[i] + 2.0 / size * np.sum(hp[m] * dy_dx1[m])
            jac[i, 1] = base_dx2[i] + 2.0 / size * np.sum(hp[m] * dy_dx2[m])
            tail = np.zeros(n - 2)
            tail[m] = 2.0 / size * hp[m]
            jac[i, 2:] = tail
        return jac

    lower = np.concatenate([[0.0, 0.0], np.full(n - 2, -2.0)])
    upper = np.concatenate([[1.0, 1.0], np.full(n - 2, 2.0)])
    return Problem("CEC09_10", n, 3, lower, upper, evaluate, jacobian)


def man(n):
    """Experimental bi-objective instance; transcription unverified, see
    docs/problem_formulas.md. f1 is nonsmooth on the kink hyperplanes
    x_i = exp((i/n)^2)/3; its gradient is taken as 0 there.

        f1 = sum |x_i - exp((i/n)^2)/3|^(1/2)
        f2 = sum (x_i - 0.5 cos(10 pi i / n) - 0.5)^2

    Box [-1, 1]^n.
    """
    if n < 1:
        raise ValueError("MAN requires n >= 1")
    i = np.arange(1, n + 1)
    r = np.exp((i / n) ** 2) / 3.0
    c = 0.5 * np.cos(10.0 * np.pi * i / n) + 0.5

    def evaluate(x):
        x = _check_x(x, n)
        return np.array([np.sum(np.sqrt(np.abs(x - r))), np.sum((x - c) ** 2)])

    def jacobian(x):
        x = _check_x(x, n)
        diff = x - r
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = np.where(diff == 0.0, 0.0, 0.5 * np.sign(diff) / np.sqrt(np.abs(diff)))
        return np.vstack([g1, 2.0 * (x - c)])

    return Problem("MAN", n, 2, np.full(n, -1.0), np.full(n, 1.0), evaluate, jacobian, experimental=True)


_REGISTRY = {
    "JOS_1": (jos_1, 1, False),
    "CEC09_2": (cec09_2, 3, False),
    "CEC09_3": (cec09_3, 3, False),
    "CEC09_10": (cec09_10, 5, False),
    "MAN": (man, 1, True),
}


def registry_names(include_experimental=True):
    return [
        name
        for name, (_, _, experimental) in _REGISTRY.items()
        if include_experimental or not experimental
    ]


def registry_get(name, n, allow_experimental=False):
    """Problem instance by registry name and dimension.

    Experimental problems (unverified formula transcriptions) must be opted
    into explicitly.
    """
    if name not in _REGISTRY:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(sorted(_REGISTRY))}")
    factory, min_n, experimental = _REGISTRY[name]
    if experimental and not allow_experimental:
        raise ValueError(
            f"{name} is experimental (unverified formula); pass allow_experimental=True"
        )
    n = int(n)
    if n < min_n:
        raise ValueError(f"{name} requires n >= {min_n}, got {n}")
    return factory(n)


SEED_STRATEGIES = ("uniform_diagonal", "midpoint")


def initial_points(problem, strategy, count, seed):
    """Mutually nondominated seed archive on the box hyper-diagonal.

    uniform_diagonal draws count values t ~ U[0,1) and places points at
    lower + t * (upper - lower); midpoint places the single point t = 0.5
    (count must be 1). Dominated samples and exact objective duplicates are
    filtered, keeping the earliest; surviving sample indices become ids.
    """
    if strategy not in SEED_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; known: {SEED_STRATEGIES}")
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if strategy == "midpoint":
        if count != 1:
            raise ValueError("midpoint strategy seeds exactly one point")
        t = np.array([0.5])
    else:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        t = rng.random(count)
    X = problem.lower + t[:, None] * (problem.upper - problem.lower)
    evaluated = [(i, X[i], np.asarray(problem.evaluate(X[i]), dtype=float)) for i in range(count)]
    members = []
    kept_fx = []
    for i, x, fx in evaluated:
        if not np.all(np.isfinite(fx)):
            continue
        dominated = any(
            np.all(other <= fx) and np.any(other < fx) for _, _, other in evaluated
        )
        duplicate = any(np.array_equal(fx, prev) for prev in kept_fx)
        if dominated or duplicate:
            continue
        members.append(FrontMember(x, fx, i, None))
        kept_fx.append(fx)
    if not members:
        raise ValueError("all seed samples were filtered out")
    return Archive(members, validate=True)
