"""Backtracking line searches over a mutually nondominated archive.

All three searches try alpha0 * delta**h for h = 0, 1, ... and return the
first accepted step, so the result always has that exact floating-point form.
They differ in the acceptance test:

  armijo_front          reject while some archive member, restricted to the
                        objective subset and shifted by the sufficient
                        decrease term, is strictly below the trial in every
                        subset component.
  armijo_single         accept when the trial improves on the starting point
                        itself by the sufficient decrease margin in every
                        objective.
  nondominance_backtrack
                        accept when the trial beats every archive member
                        strictly in at least one objective.

Running out of halvings raises LineSearchError; the drivers count the
failure and skip the candidate rather than swallowing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dominance import ObjectiveSubset


class LineSearchError(RuntimeError):
    """No step length was accepted within the halving budget."""

    def __init__(self, message, halvings):
        super().__init__(message)
        self.halvings = halvings


@dataclass(frozen=True)
class LineSearchParams:
    alpha0: float = 1.0
    delta: float = 0.5
    gamma: float = 1e-4
    max_halvings: int = 60

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.max_halvings < 1:
            raise ValueError(f"max_halvings must be >= 1, got {self.max_halvings}")


def _steps(params):
    for h in range(params.max_halvings + 1):
        yield params.alpha0 * params.delta**h


def armijo_front(problem, subset, archive, member, v, theta, params):
    """Front-aware Armijo step from member.x along v for the objective subset.

    Preconditions: theta < 0, and member is not dominated under the
    restricted objectives by any archive member. The acceptance test compares
    the trial against the subset-nondominated subfront only; dominated
    members cannot tighten it.

    A non-finite trial vector is rejected explicitly: the reject test
    compares members *below* the trial, so a NaN would otherwise slip
    through as accepted.
    """
    if not isinstance(subset, ObjectiveSubset):
        raise TypeError("subset must be an ObjectiveSubset")
    if not theta < 0:
        raise ValueError(f"armijo_front requires theta < 0, got {theta}")
    pos = list(subset.positions)
    F_all = archive.fx_matrix[:, pos]
    f_member = member.fx[pos]
    dominated = np.all(F_all <= f_member, axis=1) & np.any(F_all < f_member, axis=1)
    if np.any(dominated):
        raise ValueError(
            f"member id={member.id} is dominated under subset {subset.indices}; "
            "front Armijo requires a subset-nondominated start"
        )
    FI = archive.nondominated_subset_wrt(subset).fx_matrix[:, pos]
    v = np.asarray(v, dtype=float)
    for h, alpha in enumerate(_steps(params)):
        trial = np.asarray(problem.evaluate(member.x + alpha * v), dtype=float)
        if not np.all(np.isfinite(trial)):
            continue
        shifted = FI + params.gamma * alpha * theta
        if np.any(np.all(shifted < trial[pos], axis=1)):
            continue
        return alpha
    raise LineSearchError(
        f"front Armijo exhausted {params.max_halvings} halvings from id={member.id} "
        f"on subset {subset.indices}",
        params.max_halvings,
    )


def armijo_single(problem, member, v, theta, params):
    """Plain multi-objective Armijo: every objective must improve on
    member.fx by gamma * alpha * theta. theta < 0 required."""
    if not theta < 0:
        raise ValueError(f"armijo_single requires theta < 0, got {theta}")
    v = np.asarray(v, dtype=float)
    f0 = member.fx
    for alpha in _steps(params):
        trial = np.asarray(problem.evaluate(member.x + alpha * v), dtype=float)
        if np.all(trial <= f0 + params.gamma * alpha * theta):
            return alpha
    raise LineSearchError(
        f"single-point Armijo exhausted {params.max_halvings} halvings from id={member.id}",
        params.max_halvings,
    )


def nondominance_backtrack(problem, archive, member, v, params):
    """Largest step of the form alpha0 * delta**h whose trial strictly beats
    every archive member in at least one objective (member itself included,
    which rules out exact duplicates)."""
    F = archive.fx_matrix
    dominated = np.all(F <= member.fx, axis=1) & np.any(F < member.fx, axis=1)
    if np.any(dominated):
        raise ValueError(
            f"member id={member.id} is dominated within the archive; "
            "nondominance backtracking requires a nondominated start"
        )
    v = np.asarray(v, dtype=float)
    for alpha in _steps(params):
        trial = np.asarray(problem.evaluate(member.x + alpha * v), dtype=float)
        if np.all(np.any(trial < F, axis=1)):
            return alpha
    raise LineSearchError(
        f"nondominance backtracking exhausted {params.max_halvings} halvings from id={member.id}",
        params.max_halvings,
    )
