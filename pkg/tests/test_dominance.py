"""Tests for dominance.py: ordering predicates, subsets, archive, CSV."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontdescent.dominance import (
    Archive,
    ArchiveContractError,
    ArchiveFormatError,
    FrontMember,
    ObjectiveSubset,
    all_nonempty_subsets,
    dominates,
    leq,
    lt,
    read_archive_csv,
    restrict,
    write_archive_csv,
)
from oracles import brute_nondominated_mask


def member(fx, mid, x=None, parent=None):
    fx = np.asarray(fx, dtype=float)
    return FrontMember(np.zeros(2) if x is None else x, fx, mid, parent)


# ---------------------------------------------------------------- predicates


def test_leq_examples():
    assert leq([1, 2], [1, 3])
    assert leq([1, 2], [1, 2])
    assert not leq([2, 1], [1, 3])


def test_lt_examples():
    assert lt([0, 0], [1, 1])
    assert not lt([1, 2], [1, 3])


def test_dominates_examples():
    assert dominates([1, 2], [1, 3])
    assert not dominates([1, 2], [1, 2])
    assert not dominates([2, 1], [1, 3])


def test_length_mismatch_raises():
    with pytest.raises(ValueError):
        leq([1, 2], [1, 2, 3])


vectors = st.lists(
    st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=2, max_size=4
)


@given(st.data())
def test_predicate_implications(data):
    u = data.draw(vectors)
    v = data.draw(st.lists(st.floats(min_value=-10, max_value=10), min_size=len(u), max_size=len(u)))
    if lt(u, v):
        assert dominates(u, v)
    if dominates(u, v):
        assert leq(u, v) and not np.array_equal(u, v)
        assert not dominates(v, u)
    if leq(u, v) and leq(v, u):
        assert np.array_equal(u, v)


@given(vectors, st.data())
def test_dominates_transitive(u, data):
    n = len(u)
    bounded = st.lists(st.floats(min_value=-10, max_value=10), min_size=n, max_size=n)
    v = data.draw(bounded)
    w = data.draw(bounded)
    if dominates(u, v) and dominates(v, w):
        assert dominates(u, w)


# ------------------------------------------------------------------- subsets


def test_restrict_example():
    assert np.array_equal(restrict([5.0, 6.0, 7.0], {1, 3}), [5.0, 7.0])


def test_subset_validation():
    with pytest.raises(ValueError):
        ObjectiveSubset(())
    with pytest.raises(ValueError):
        ObjectiveSubset((0, 1))
    with pytest.raises(ValueError):
        ObjectiveSubset((2, 1))
    with pytest.raises(ValueError):
        ObjectiveSubset((1, 1))
    s = ObjectiveSubset((1, 3))
    assert s.positions == (0, 2)
    with pytest.raises(ValueError):
        s.restrict([1.0, 2.0])


def test_all_nonempty_subsets_order():
    assert [s.indices for s in all_nonempty_subsets(2)] == [(1,), (2,), (1, 2)]
    assert [s.indices for s in all_nonempty_subsets(3)] == [
        (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3),
    ]
    assert [s.indices for s in all_nonempty_subsets(2, include_full=False)] == [(1,), (2,)]


# -------------------------------------------------------------- front member


def test_front_member_validation():
    with pytest.raises(ValueError):
        member([1.0, np.nan], 0)
    with pytest.raises(ValueError):
        member([1.0], 0)
    with pytest.raises(ValueError):
        FrontMember(np.array([np.inf, 0.0]), np.array([1.0, 2.0]), 0)
    m = member([1.0, 2.0], 3)
    with pytest.raises(ValueError):
        m.fx[0] = 9.0  # frozen snapshot
    with pytest.raises(Exception):
        m.id = 4


# ------------------------------------------------------------------- archive


def test_insert_filtered_removes_only_dominated():
    A = Archive([member([1, 3], 0), member([2, 2], 1), member([3, 1], 2)])
    out = A.insert_filtered(member([2, 1.5], 3))
    # [2,1.5] dominates [2,2] but is incomparable with [3,1]
    assert sorted(tuple(m.fx) for m in out) == [(1.0, 3.0), (2.0, 1.5), (3.0, 1.0)]
    assert brute_nondominated_mask([m.fx for m in out]).all()


def test_insert_duplicate_is_noop_keeping_incumbent():
    A = Archive([member([1, 3], 0), member([3, 1], 1)])
    out = A.insert_filtered(member([1, 3], 7))
    assert out is A
    assert {m.id for m in out} == {0, 1}


def test_insert_dominated_point_is_contract_error():
    A = Archive([member([1, 1], 0)])
    with pytest.raises(ArchiveContractError):
        A.insert_filtered(member([2, 2], 1))


def test_insert_into_empty():
    out = Archive().insert_filtered(member([1, 2], 0))
    assert len(out) == 1


def test_archive_validation_rejects_dominated_and_duplicate():
    with pytest.raises(ArchiveContractError):
        Archive([member([1, 1], 0), member([2, 2], 1)])
    with pytest.raises(ArchiveContractError):
        Archive([member([1, 2], 0), member([1, 2], 1)])
    with pytest.raises(ArchiveContractError):
        Archive([member([1, 2], 0), member([2, 1], 0)])


def test_archive_immutable():
    A = Archive([member([1, 2], 0)])
    with pytest.raises(AttributeError):
        A.members = ()


def test_nondominated_subset_wrt_examples():
    A = Archive([member([1, 3], 0), member([2, 2], 1), member([3, 1], 2)])
    sub = A.nondominated_subset_wrt(ObjectiveSubset((1,)))
    assert [tuple(m.fx) for m in sub] == [(1.0, 3.0)]
    sub = A.nondominated_subset_wrt(ObjectiveSubset((2,)))
    assert [tuple(m.fx) for m in sub] == [(3.0, 1.0)]
    # full subset: the archive invariant already guarantees nondominance
    assert A.nondominated_subset_wrt(ObjectiveSubset((1, 2))) is A


def test_nondominated_subset_keeps_restricted_ties():
    A = Archive(
        [
            FrontMember(np.zeros(1), np.array([1.0, 2.0, 3.0]), 0),
            FrontMember(np.zeros(1), np.array([1.0, 3.0, 2.0]), 1),
            FrontMember(np.zeros(1), np.array([2.0, 1.0, 4.0]), 2),
        ]
    )
    sub = A.nondominated_subset_wrt(ObjectiveSubset((1,)))
    assert {m.id for m in sub} == {0, 1}  # equal f1: neither dominates
    sub = A.nondominated_subset_wrt(ObjectiveSubset((1, 2)))
    assert {m.id for m in sub} == {0, 2}


def test_subset_out_of_range():
    A = Archive([member([1, 2], 0)])
    with pytest.raises(ArchiveContractError):
        A.nondominated_subset_wrt(ObjectiveSubset((3,)))


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 6), st.integers(0, 6)).map(lambda t: (float(t[0]), float(t[1]))),
        min_size=1,
        max_size=40,
    )
)
def test_insert_sequences_match_brute_force(points):
    """Feed a random sequence; the archive must end up exactly at the brute
    nondominated subset of the accepted points, duplicates going to the
    earliest."""
    archive = Archive()
    accepted = []
    for i, fx in enumerate(points):
        fx = np.asarray(fx)
        F = archive.fx_matrix
        if len(archive) and np.any(np.all(F <= fx, axis=1) & np.any(F < fx, axis=1)):
            with pytest.raises(ArchiveContractError):
                archive.insert_filtered(member(fx, i))
            continue
        before = {m.id for m in archive}
        archive = archive.insert_filtered(member(fx, i))
        if {m.id for m in archive} == before:
            assert any(np.array_equal(fx, a) for a in accepted)  # duplicate no-op
        else:
            accepted.append(fx)
        rows = [m.fx for m in archive]
        assert brute_nondominated_mask(rows).all()
    mask = brute_nondominated_mask(accepted)
    expect = {tuple(a) for a, keep in zip(accepted, mask) if keep}
    assert {tuple(m.fx) for m in archive} == expect


# ----------------------------------------------------------------------- CSV


def test_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    members = []
    fxs = [(0.1, 3.0), (1.0 / 3.0, 2.0), (1e-300, 5.0), (0.9999999999999999, 1e-30)]
    for i, fx in enumerate(sorted(fxs)):
        members.append(FrontMember(rng.standard_normal(3), np.array(fx), i, None if i == 0 else i - 1))
    A = Archive(members)
    path = tmp_path / "front.csv"
    write_archive_csv(A, path)
    B = read_archive_csv(path)
    assert len(B) == len(A)
    for ma, mb in zip(A.members, B.members):
        assert ma.id == mb.id and ma.parent_id == mb.parent_id
        assert np.array_equal(ma.x, mb.x)
        assert np.array_equal(ma.fx, mb.fx)


def test_csv_header(tmp_path):
    A = Archive([member([1.5, 2.5], 4, x=np.array([0.5, 0.25, 0.125]))])
    path = tmp_path / "front.csv"
    write_archive_csv(A, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,parent_id,x_1,x_2,x_3,f_1,f_2"
    assert lines[1] == "4,,0.5,0.25,0.125,1.5,2.5"


def test_csv_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,parent_id,x_1,f_1,f_2\n0,,0.0,1.0\n")
    with pytest.raises(ArchiveFormatError) as err:
        read_archive_csv(path)
    assert err.value.line == 2

    path.write_text("id,wrong,x_1,f_1,f_2\n")
    with pytest.raises(ArchiveFormatError) as err:
        read_archive_csv(path)
    assert err.value.line == 1

    path.write_text("id,parent_id,x_1,f_1,f_2\n0,,0.0,oops,1.0\n")
    with pytest.raises(ArchiveFormatError) as err:
        read_archive_csv(path)
    assert err.value.line == 2

    path.write_text("")
    with pytest.raises(ArchiveFormatError):
        read_archive_csv(path)


def test_csv_rows_sorted_by_id(tmp_path):
    A = Archive([member([3, 1], 5), member([1, 3], 2)])
    path = tmp_path / "front.csv"
    write_archive_csv(A, path)
    ids = [int(line.split(",")[0]) for line in path.read_text().splitlines()[1:]]
    assert ids == [2, 5]
