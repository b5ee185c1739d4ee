"""Front metrics and performance profiles: frozen values, oracles, schemas."""

import csv

import numpy as np
import pytest

from frontdescent.dominance import Archive, FrontMember, write_archive_csv
from frontdescent.metrics import (
    METRIC_COLUMNS,
    MetricWarning,
    FrontSet,
    ProfileCurve,
    delta_spread,
    front_from_archive_csv,
    gamma_spread,
    hypervolume,
    hypervolume_reference_point,
    performance_profiles,
    purity,
    read_profiles_csv,
    reference_front,
    write_metrics_csv,
    write_profiles_csv,
)

from oracles import brute_nondominated_mask, ie_hypervolume, mc_hypervolume


def _front(points, solver="s", instance="inst"):
    return FrontSet(np.asarray(points, dtype=float), solver, instance)


def _antidiagonal(f1_values):
    f1 = np.asarray(f1_values, dtype=float)
    return np.column_stack([f1, 1.0 - f1])


def _random_front(rng, m, max_points=6):
    while True:
        pts = rng.random((rng.integers(1, max_points + 1), m))
        pts = np.unique(pts, axis=0)
        pts = pts[brute_nondominated_mask(pts)]
        if len(pts):
            return pts


# ---------------------------------------------------------------------------
# FrontSet and reference_front
# ---------------------------------------------------------------------------


def test_frontset_validation():
    fs = _front([[0.0, 1.0], [1.0, 0.0]])
    assert fs.m == 2
    assert not fs.points.flags.writeable
    with pytest.raises(ValueError, match="nondominated"):
        _front([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError, match="duplicate"):
        _front([[0.0, 1.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="finite"):
        _front([[0.0, np.nan]])
    with pytest.raises(ValueError):
        _front([[0.0], [1.0]])
    with pytest.raises(ValueError):
        _front(np.empty((0, 2)))


def test_reference_front_keeps_all_mutually_nondominated_points():
    a = _front([[1.0, 3.0], [3.0, 1.0]], solver="A")
    b = _front([[2.0, 2.0], [0.0, 5.0]], solver="B")
    ref = reference_front([a, b])
    assert ref.solver == "reference"
    assert ref.instance == "inst"
    expected = {(1.0, 3.0), (3.0, 1.0), (2.0, 2.0), (0.0, 5.0)}
    assert {tuple(p) for p in ref.points} == expected


def test_reference_front_single_solver_is_itself():
    a = _front([[1.0, 3.0], [3.0, 1.0]])
    ref = reference_front([a])
    assert {tuple(p) for p in ref.points} == {tuple(p) for p in a.points}


def test_reference_front_filters_dominated_and_collapses_duplicates():
    a = _front([[1.0, 3.0], [3.0, 1.0]], solver="A")
    # (2, 3.5) is dominated by A's (1, 3) once the fronts are pooled
    b = _front([[2.0, 3.5], [0.5, 4.0]], solver="B")
    ref = reference_front([a, b])
    assert {tuple(p) for p in ref.points} == {(1.0, 3.0), (3.0, 1.0), (0.5, 4.0)}
    duplicate = _front([[1.0, 3.0], [3.0, 1.0]], solver="B")
    assert len(reference_front([a, duplicate]).points) == 2


def test_reference_front_input_consistency():
    with pytest.raises(ValueError):
        reference_front([])
    with pytest.raises(ValueError, match="different instances"):
        reference_front([_front([[0, 1]], instance="x"), _front([[1, 0]], instance="y")])
    with pytest.raises(ValueError, match="objective counts"):
        reference_front([_front([[0, 1]]), _front([[1, 0, 2]])])


# ---------------------------------------------------------------------------
# purity
# ---------------------------------------------------------------------------


def test_purity_examples():
    ref = _front([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]], solver="reference")
    subset = _front([[1.0, 2.0], [2.0, 1.0]])
    assert purity(subset, ref) == 1.0
    disjoint = _front([[0.5, 3.5], [3.5, 0.5]])
    assert purity(disjoint, ref) == 0.0
    three_of_four = _front([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [2.5, 0.5]])
    assert purity(three_of_four, ref) == 0.75
    assert purity(ref, ref) == 1.0
    with pytest.raises(ValueError):
        purity(_front([[0.0, 1.0, 2.0]]), ref)


# ---------------------------------------------------------------------------
# gamma spread
# ---------------------------------------------------------------------------


def test_gamma_two_point_front():
    assert gamma_spread(_front([[0.0, 1.0], [1.0, 0.0]])) == 1.0


def test_gamma_uniform_eleven_points():
    front = _front(_antidiagonal(np.linspace(0.0, 1.0, 11)))
    assert gamma_spread(front) == pytest.approx(0.1, abs=1e-15)


def test_gamma_single_point_is_zero():
    assert gamma_spread(_front([[0.3, 0.7]])) == 0.0


def test_gamma_permutation_invariance():
    rng = np.random.default_rng(3)
    f1 = np.sort(rng.random(9))
    pts = _antidiagonal(f1)
    value = gamma_spread(_front(pts))
    for _ in range(5):
        perm = rng.permutation(len(pts))
        assert gamma_spread(_front(pts[perm])) == value


# ---------------------------------------------------------------------------
# delta spread
# ---------------------------------------------------------------------------


def test_delta_uniform_front_touching_extremes_is_zero():
    front = _front(_antidiagonal(np.linspace(0.0, 1.0, 5)))
    ref = reference_front([front])
    assert delta_spread(front, ref) == pytest.approx(0.0, abs=1e-12)


def test_delta_two_point_front_equal_to_reference_extremes():
    front = _front(_antidiagonal([0.0, 1.0]))
    ref = reference_front([front])
    assert delta_spread(front, ref) == 0.0


def test_delta_nonuniform_exceeds_uniform():
    # gaps 0.1, 0.8, 0.1 against mean 1/3:
    # (|0.1-1/3|*2 + |0.8-1/3|) / (3 * 1/3) = 14/15
    uniform = _front(_antidiagonal(np.linspace(0.0, 1.0, 4)))
    nonuniform = _front(_antidiagonal([0.0, 0.1, 0.9, 1.0]))
    ref = reference_front([uniform, nonuniform])
    d_nonuniform = delta_spread(nonuniform, ref)
    assert d_nonuniform == pytest.approx(14.0 / 15.0, rel=1e-12)
    assert delta_spread(uniform, ref) < d_nonuniform


def test_delta_counts_distance_to_reference_extremes():
    # Interior uniform points: d0 = dN = 0.25, gaps (0.25, 0.25):
    # (0.5 + 0) / (0.5 + 2*0.25) = 0.5
    front = _front(_antidiagonal([0.25, 0.5, 0.75]))
    ref = _front(_antidiagonal([0.0, 0.25, 0.5, 0.75, 1.0]), solver="reference")
    assert delta_spread(front, ref) == pytest.approx(0.5, rel=1e-12)


def test_delta_permutation_invariance():
    rng = np.random.default_rng(8)
    pts = _antidiagonal(np.sort(rng.random(7)))
    ref = _front(_antidiagonal([0.0, 1.0]), solver="reference")
    value = delta_spread(_front(pts), ref)
    perm = rng.permutation(len(pts))
    assert delta_spread(_front(pts[perm]), ref) == value


# ---------------------------------------------------------------------------
# hypervolume
# ---------------------------------------------------------------------------


def test_hv_unit_box():
    assert hypervolume(_front([[0.0, 0.0]]), [1.0, 1.0]) == 1.0


def test_hv_two_point_overlap():
    assert hypervolume(_front([[0.0, 0.5], [0.5, 0.0]]), [1.0, 1.0]) == 0.75


def test_hv_three_dimensional_examples():
    assert hypervolume(_front([[0.0, 0.0, 0.0]]), [1.0, 1.0, 1.0]) == 1.0
    fs = _front([[0.0, 0.0, 0.5], [0.5, 0.5, 0.0]])
    assert hypervolume(fs, [1.0, 1.0, 1.0]) == 0.625  # 0.5 + 0.25 - 0.125


def test_hv_excludes_points_not_dominating_reference():
    fs = _front([[0.0, 0.5], [0.5, 0.0]])
    with pytest.warns(MetricWarning, match="excluded"):
        value = hypervolume(fs, [1.0, 0.4])
    assert value == 0.2  # only [0.5, 0] survives: (1 - 0.5) * (0.4 - 0)


def test_hv_zero_when_nothing_dominates_reference():
    fs = _front([[0.5, 0.5]])
    with pytest.warns(MetricWarning) as record:
        assert hypervolume(fs, [0.5, 1.0]) == 0.0
    messages = [str(w.message) for w in record]
    assert any("hypervolume is 0" in msg for msg in messages)


def test_hv_input_errors():
    fs = _front([[0.0, 0.0]])
    with pytest.raises(ValueError):
        hypervolume(fs, [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        hypervolume(fs, [np.inf, 1.0])
    four = _front([[0.0, 0.0, 0.0, 0.0]])
    with pytest.raises(ValueError, match="m in"):
        hypervolume(four, [1.0, 1.0, 1.0, 1.0])


@pytest.mark.parametrize("m", [2, 3])
def test_hv_matches_inclusion_exclusion_oracle(m):
    rng = np.random.default_rng(100 + m)
    ref = np.full(m, 1.1)
    for _ in range(200):
        pts = _random_front(rng, m, max_points=4)
        exact = hypervolume(_front(pts), ref)
        assert abs(exact - ie_hypervolume(pts, ref)) <= 1e-12


@pytest.mark.parametrize("m", [2, 3])
def test_hv_within_monte_carlo_confidence_interval(m):
    rng = np.random.default_rng(200 + m)
    ref = np.full(m, 1.1)
    for trial in range(8):
        pts = _random_front(rng, m, max_points=6)
        exact = hypervolume(_front(pts), ref)
        est, se = mc_hypervolume(pts, ref, n_samples=120_000, seed=trial)
        assert abs(exact - est) <= max(2.58 * se, 1e-9)


@pytest.mark.parametrize("m", [2, 3])
def test_hv_monotone_under_nondominated_insertion(m):
    rng = np.random.default_rng(300 + m)
    ref = np.full(m, 1.1)
    trials = 0
    while trials < 100:
        pts = _random_front(rng, m)
        extra = rng.random(m)
        grown = np.vstack([pts, extra])
        grown = np.unique(grown, axis=0)
        if not brute_nondominated_mask(grown).all() or len(grown) == len(pts):
            continue
        before = hypervolume(_front(pts), ref)
        after = hypervolume(_front(grown), ref)
        assert after >= before - 1e-12
        trials += 1


def test_hv_reference_point_rule():
    fronts = [_front([[0.0, 2.0]], solver="A"), _front([[2.0, 0.0]], solver="B")]
    ref = hypervolume_reference_point(fronts, margin=0.01)
    np.testing.assert_allclose(ref, [2.02, 2.02], rtol=1e-15)


# ---------------------------------------------------------------------------
# performance profiles
# ---------------------------------------------------------------------------


def test_profile_curve_validation():
    ProfileCurve("s", [1.0, 2.0], [0.5, 1.0])
    with pytest.raises(ValueError):
        ProfileCurve("s", [0.5, 2.0], [0.5, 1.0])
    with pytest.raises(ValueError):
        ProfileCurve("s", [1.0, 1.0], [0.5, 1.0])
    with pytest.raises(ValueError):
        ProfileCurve("s", [1.0, 2.0], [1.0, 0.5])
    with pytest.raises(ValueError):
        ProfileCurve("s", [1.0, 2.0], [0.5, 1.5])
    with pytest.raises(ValueError):
        ProfileCurve("s", [1.0, 2.0], [1.0])


def test_profiles_hand_table():
    curves = performance_profiles([[1.0, 2.0], [2.0, 1.0]], "lower_better", ["A", "B"])
    for curve in curves:
        assert np.array_equal(curve.tau, [1.0, 2.0])
        assert np.array_equal(curve.rho, [0.5, 1.0])


def test_profiles_single_solver():
    (curve,) = performance_profiles([[3.0, 5.0, 7.0]], "lower_better")
    assert np.array_equal(curve.tau, [1.0])
    assert np.array_equal(curve.rho, [1.0])


def test_profiles_higher_better_inversion_picks_larger_value():
    curves = performance_profiles([[4.0], [2.0]], "higher_better", ["big", "small"])
    by_name = {c.solver: c for c in curves}
    assert by_name["big"].rho[0] == 1.0  # ratio 1 at tau = 1
    assert by_name["small"].rho[0] == 0.0
    assert by_name["small"].rho[-1] == 1.0  # reached at tau = 2


def test_profiles_direction_inversion_flips_winner():
    values = [[4.0, 5.0], [2.0, 2.5]]
    low = {c.solver: c.rho[0] for c in performance_profiles(values, "lower_better", ["A", "B"])}
    high = {c.solver: c.rho[0] for c in performance_profiles(values, "higher_better", ["A", "B"])}
    assert low == {"A": 0.0, "B": 1.0}
    assert high == {"A": 1.0, "B": 0.0}


def test_profiles_exclude_nonpositive_under_inversion():
    values = [[1.0, 0.0], [2.0, 3.0]]
    with pytest.warns(MetricWarning, match="excluded 1 instance"):
        curves = performance_profiles(values, "higher_better", ["A", "B"])
    # only the first instance remains; B's 2.0 beats A's 1.0 there
    by_name = {c.solver: c for c in curves}
    assert np.array_equal(by_name["B"].rho, [1.0, 1.0])
    assert np.array_equal(by_name["A"].rho, [0.0, 1.0])


def test_profiles_zero_best_under_lower_better():
    curves = performance_profiles([[0.0], [1.0]], "lower_better", ["zero", "one"])
    by_name = {c.solver: c for c in curves}
    assert np.array_equal(by_name["zero"].tau, [1.0])
    assert by_name["zero"].rho[0] == 1.0
    assert by_name["one"].rho[0] == 0.0  # infinite ratio never attained


def test_profiles_input_errors():
    with pytest.raises(ValueError):
        performance_profiles([[1.0]], "sideways")
    with pytest.raises(ValueError):
        performance_profiles([[-1.0]], "lower_better")
    with pytest.raises(ValueError):
        performance_profiles([[np.nan]], "lower_better")
    with pytest.raises(ValueError):
        performance_profiles([[1.0], [2.0]], "lower_better", ["only_one_label"])
    with pytest.warns(MetricWarning):
        with pytest.raises(ValueError, match="no instances"):
            performance_profiles([[0.0], [1.0]], "higher_better")


def test_profiles_rho_monotone_on_random_matrices():
    rng = np.random.default_rng(31)
    for _ in range(20):
        V = rng.uniform(0.1, 9.0, size=(3, 7))
        for direction in ("lower_better", "higher_better"):
            for curve in performance_profiles(V, direction):
                assert np.all(np.diff(curve.rho) >= 0)
                assert curve.rho[-1] <= 1.0
                # the best solver(s) per instance have ratio exactly 1
            curves = performance_profiles(V, direction)
            at_tau1 = np.array([c.rho[0] for c in curves])
            assert at_tau1.max() > 0


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_metrics_csv_round_trip(tmp_path):
    rows = [
        ("IFSD", "JOS_1_n5_midpoint", 1.0, 0.1, 1.0 / 3.0, 3.9999999999999996),
        ("FSD", "JOS_1_n5_midpoint", 0.5, 4.0, 1e-300, 0.0),
    ]
    path = tmp_path / "metrics.csv"
    write_metrics_csv(path, rows)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        assert next(reader) == list(METRIC_COLUMNS)
        parsed = [
            (r[0], r[1], float(r[2]), float(r[3]), float(r[4]), float(r[5]))
            for r in reader
        ]
    assert parsed == rows


def test_profiles_csv_round_trip(tmp_path):
    curves = {
        "purity": performance_profiles([[1.0, 2.0], [2.0, 1.0]], "lower_better", ["A", "B"]),
        "hv": performance_profiles([[3.0], [4.0]], "lower_better", ["A", "B"]),
    }
    path = tmp_path / "profiles.csv"
    write_profiles_csv(path, curves)
    loaded = read_profiles_csv(path)
    assert sorted(loaded) == ["hv", "purity"]
    for metric, original in curves.items():
        by_name = {c.solver: c for c in loaded[metric]}
        for curve in original:
            assert np.array_equal(by_name[curve.solver].tau, curve.tau)
            assert np.array_equal(by_name[curve.solver].rho, curve.rho)


def test_read_profiles_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("metric,solver,tau\n")
    with pytest.raises(ValueError, match="header"):
        read_profiles_csv(path)


def test_front_from_archive_csv(tmp_path):
    members = [
        FrontMember(np.array([0.0, 0.0]), np.array([0.0, 4.0]), 0),
        FrontMember(np.array([2.0, 2.0]), np.array([4.0, 0.0]), 1),
    ]
    arch = Archive(members, validate=True)
    path = tmp_path / "front.csv"
    write_archive_csv(arch, path)
    fs = front_from_archive_csv(path, "IFSD", "JOS_1_n2_midpoint")
    assert fs.solver == "IFSD"
    assert fs.instance == "JOS_1_n2_midpoint"
    assert np.array_equal(fs.points, arch.fx_matrix)
