"""Pareto ordering predicates and the mutually nondominated archive.

All comparisons are exact floating-point comparisons on purpose: the archive
semantics (duplicate detection, dominance filtering, no-change stopping) are
defined bit-for-bit, which is what makes whole runs replayable. Tolerances
live in the solvers, never here.

The archive is a flat, append-ordered tuple of members with linear scans.
At the sizes these solvers produce (up to a few thousand points per run)
anything fancier costs more than it saves.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np


class ArchiveContractError(ValueError):
    """An archive operation was called with input violating its contract."""


def _pair(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"objective vectors must be 1-d and equally sized, got {u.shape} and {v.shape}")
    return u, v


def leq(u, v):
    """True iff u <= v componentwise."""
    u, v = _pair(u, v)
    return bool(np.all(u <= v))


def lt(u, v):
    """True iff u < v in every component."""
    u, v = _pair(u, v)
    return bool(np.all(u < v))


def dominates(u, v):
    """True iff u <= v componentwise and u != v (strict somewhere)."""
    u, v = _pair(u, v)
    return bool(np.all(u <= v) and np.any(u < v))


@dataclass(frozen=True)
class ObjectiveSubset:
    """Nonempty set of 1-based objective indices, kept sorted.

    1-based indexing matches the usual mathematical statement of partial
    descent over objective subsets; `positions` gives the 0-based view for
    array slicing.
    """

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise ValueError("objective subset must be nonempty")
        if sorted(set(idx)) != list(idx):
            raise ValueError(f"objective indices must be sorted and unique, got {idx}")
        if idx[0] < 1:
            raise ValueError(f"objective indices are 1-based, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, m):
        return cls(tuple(range(1, m + 1)))

    @property
    def positions(self):
        return tuple(i - 1 for i in self.indices)

    def is_full(self, m):
        return len(self.indices) == m

    def restrict(self, u):
        u = np.asarray(u, dtype=float)
        if self.indices[-1] > u.size:
            raise ValueError(f"subset {self.indices} out of range for vector of size {u.size}")
        return u[list(self.positions)]

    def __len__(self):
        return len(self.indices)


def restrict(u, subset):
    """Components of u selected by a 1-based ObjectiveSubset (or index iterable)."""
    if not isinstance(subset, ObjectiveSubset):
        subset = ObjectiveSubset(tuple(sorted(subset)))
    return subset.restrict(u)


def all_nonempty_subsets(m, include_full=True):
    """Every nonempty subset of {1..m}, ordered by cardinality then lexicographically."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = []
    for size in range(1, m + 1):
        if size == m and not include_full:
            continue
        for comb in itertools.combinations(range(1, m + 1), size):
            out.append(ObjectiveSubset(comb))
    return out


def _freeze(arr):
    a = np.array(arr, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FrontMember:
    """One evaluated point: decision vector, objective vector, bookkeeping.

    Members are immutable snapshots; logical identity is the integer id,
    unique within a run. parent_id is the id of the point whose search
    produced this one (None for seed points).
    """

    x: np.ndarray
    fx: np.ndarray
    id: int
    parent_id: int = None
    crowding: float = math.inf

    def __post_init__(self):
        x = _freeze(self.x)
        fx = _freeze(self.fx)
        if x.ndim != 1 or fx.ndim != 1:
            raise ValueError("x and fx must be 1-d arrays")
        if fx.size < 2:
            raise ValueError("objective vector must have at least two components")
        if not np.all(np.isfinite(fx)):
            raise ValueError(f"objective vector must be finite, got {fx}")
        if not np.all(np.isfinite(x)):
            raise ValueError(f"decision vector must be finite, got {x}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "fx", fx)
        object.__setattr__(self, "id", int(self.id))


class Archive:
    """Append-ordered set of FrontMembers that is mutually nondominated.

    Instances are immutable: mutating operations return new archives sharing
    member objects. Exact duplicate objective vectors are never stored; the
    incumbent wins and the insert is a no-op.
    """

    __slots__ = ("members", "_fx", "_index", "_ids")

    def __init__(self, members=(), validate=True):
        object.__setattr__(self, "members", tuple(members))
        object.__setattr__(self, "_fx", None)
        object.__setattr__(self, "_index", None)
        object.__setattr__(self, "_ids", None)
        if validate and self.members:
            self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("Archive is immutable")

    def _validate(self):
        ids = [m.id for m in self.members]
        if len(set(ids)) != len(ids):
            raise ArchiveContractError(f"duplicate member ids: {sorted(ids)}")
        widths = {m.fx.size for m in self.members}
        if len(widths) > 1:
            raise ArchiveContractError(f"inconsistent objective dimensions: {sorted(widths)}")
        F = self.fx_matrix
        for i in range(len(F)):
            le = np.all(F <= F[i], axis=1)
            ne = np.any(F != F[i], axis=1)
            if np.any(le & ne):
                j = int(np.nonzero(le & ne)[0][0])
                raise ArchiveContractError(
                    f"member id={self.members[i].id} dominated by id={self.members[j].id}"
                )
            dup = np.all(F == F[i], axis=1)
            if dup.sum() > 1:
                raise ArchiveContractError(f"duplicate objective vector {F[i]}")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def fx_matrix(self):
        if self._fx is None:
            F = (
                np.vstack([m.fx for m in self.members])
                if self.members
                else np.empty((0, 0))
            )
            F.setflags(write=False)
            object.__setattr__(self, "_fx", F)
        return self._fx

    @property
    def ids(self):
        if self._ids is None:
            object.__setattr__(self, "_ids", frozenset(m.id for m in self.members))
        return self._ids

    def index_of(self, member_id):
        if self._index is None:
            object.__setattr__(self, "_index", {m.id: i for i, m in enumerate(self.members)})
        return self._index[member_id]

    def insert_filtered(self, p):
        """New archive with p inserted and every member p dominates removed.

        Exact duplicate of an existing objective vector: no-op, the incumbent
        stays (returns self). p dominated by an existing member: contract
        error, the caller was supposed to check.
        """
        if not isinstance(p, FrontMember):
            raise TypeError("insert_filtered expects a FrontMember")
        if not self.members:
            return Archive((p,), validate=False)
        F = self.fx_matrix
        if p.fx.size != F.shape[1]:
            raise ArchiveContractError(
                f"objective dimension mismatch: archive has m={F.shape[1]}, point has m={p.fx.size}"
            )
        if np.any(np.all(F == p.fx, axis=1)):
            return self
        dominated_by_member = np.all(F <= p.fx, axis=1) & np.any(F < p.fx, axis=1)
        if np.any(dominated_by_member):
            j = int(np.nonzero(dominated_by_member)[0][0])
            raise ArchiveContractError(
                f"point fx={p.fx} is dominated by member id={self.members[j].id}"
            )
        removed = np.all(p.fx <= F, axis=1) & np.any(p.fx < F, axis=1)
        kept = tuple(m for m, r in zip(self.members, removed) if not r)
        return Archive(kept + (p,), validate=False)

    def nondominated_subset_wrt(self, subset):
        """Members not dominated by any other member under the restricted
        objective vector F_I. With the full index set this is the archive
        itself (the archive invariant)."""
        if not isinstance(subset, ObjectiveSubset):
            raise TypeError("expects an ObjectiveSubset")
        if not self.members:
            return self
        m = self.fx_matrix.shape[1]
        if subset.indices[-1] > m:
            raise ArchiveContractError(f"subset {subset.indices} out of range for m={m}")
        if subset.is_full(m):
            return self
        FI = self.fx_matrix[:, list(subset.positions)]
        if len(subset) == 1:
            col = FI[:, 0]
            keep = col == col.min()
        else:
            keep = np.ones(len(FI), dtype=bool)
            # chunked pairwise scan keeps memory linear in chunk size
            for start in range(0, len(FI), 256):
                block = FI[start : start + 256]
                dom = np.all(FI[:, None, :] <= block[None, :, :], axis=2) & np.any(
                    FI[:, None, :] < block[None, :, :], axis=2
                )
                keep[start : start + 256] = ~dom.any(axis=0)
        return Archive(tuple(m_ for m_, k in zip(self.members, keep) if k), validate=False)


ARCHIVE_FLOAT_FORMAT = ".17g"


def _fmt(v):
    return format(float(v), ARCHIVE_FLOAT_FORMAT)


def archive_csv_header(n, m):
    return (
        ["id", "parent_id"]
        + [f"x_{i}" for i in range(1, n + 1)]
        + [f"f_{j}" for j in range(1, m + 1)]
    )


def write_archive_csv(archive, path):
    """Serialize an archive, rows in ascending id order, floats at 17
    significant digits for exact round-trip."""
    members = sorted(archive.members, key=lambda m: m.id)
    if not members:
        raise ValueError("refusing to serialize an empty archive")
    n = members[0].x.size
    m = members[0].fx.size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(archive_csv_header(n, m))
        for mem in members:
            row = [str(mem.id), "" if mem.parent_id is None else str(mem.parent_id)]
            row += [_fmt(v) for v in mem.x]
            row += [_fmt(v) for v in mem.fx]
            writer.writerow(row)


class ArchiveFormatError(ValueError):
    """A CSV being read does not match the archive schema; carries the line number."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


def read_archive_csv(path, validate=True):
    """Parse an archive CSV written by write_archive_csv.

    Schema errors raise ArchiveFormatError with the offending line number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ArchiveFormatError("empty file", 1) from None
        n = sum(1 for c in header if c.startswith("x_"))
        m = sum(1 for c in header if c.startswith("f_"))
        if n < 1 or m < 2 or header != archive_csv_header(n, m):
            raise ArchiveFormatError(
                f"bad header {header!r}, expected id,parent_id,x_1..x_n,f_1..f_m", 1
            )
        members = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ArchiveFormatError(
                    f"expected {len(header)} fields, got {len(row)}", lineno
                )
            try:
                member_id = int(row[0])
                parent = None if row[1] == "" else int(row[1])
                x = np.array([float(v) for v in row[2 : 2 + n]])
                fx = np.array([float(v) for v in row[2 + n :]])
            except ValueError as exc:
                raise ArchiveFormatError(str(exc), lineno) from None
            try:
                members.append(FrontMember(x, fx, member_id, parent))
            except ValueError as exc:
                raise ArchiveFormatError(str(exc), lineno) from None
    return Archive(members, validate=validate)
