import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppclab.errors import DomainError
from ppclab.paircorr import (PairCorrCurve, brute_pair_count, cells_per_axis, poisson_reference,
                             r2_count, r2_curve, threshold)

from oracles import pair_count


def test_two_point_example():
    pts = np.array([[0.0, 0.0], [0.2, 0.2]])
    assert r2_count(pts, 1.0) == 1.0
    assert r2_count(pts, 1.0, method="brute") == 1.0


def test_identical_points_and_single_point():
    pts = np.full((7, 2), 0.3)
    assert r2_count(pts, 0.01) == 6.0
    assert r2_count(np.array([[0.5]]), 1.0) == 0.0
    curve = r2_curve(np.array([[0.5]]), [0.5, 1, 2])
    np.testing.assert_array_equal(curve.r2, [0, 0, 0])


def test_inclusive_threshold():
    # N = 4, d = 1: threshold s/4; a gap of exactly 0.25 counts at s = 1
    pts = np.array([[0.0], [0.25], [0.5], [0.75]])
    assert r2_count(pts, 1.0, method="brute") == 2.0
    assert r2_count(pts, 1.0, method="grid") == 2.0


@pytest.mark.parametrize("s, d, norm, want", [
    (0.5, 2, "sup", 1.0), (1.0, 1, "euclid", 2.0), (1.0, 2, "euclid", math.pi)])
def test_poisson_reference(s, d, norm, want):
    assert poisson_reference(s, d, norm) == pytest.approx(want)


def test_curve_fields_and_errors():
    rng = np.random.default_rng(1)
    pts = rng.random((200, 2))
    c = r2_curve(pts, [0.5, 1.0, 2.0])
    assert isinstance(c, PairCorrCurve) and c.N == 200 and c.d == 2
    np.testing.assert_allclose(c.reference, [(2 * s) ** 2 * (1 - 1 / 200) for s in (0.5, 1, 2)])
    with pytest.raises(DomainError):
        r2_curve(pts, [])
    with pytest.raises(DomainError):
        r2_curve(pts, [1.0, 0.5])


def test_reference_capped():
    c = r2_curve(np.random.default_rng(0).random((4, 1)), [10.0])
    assert c.reference[0] == 3.0


def test_csv_roundtrip(tmp_path):
    c = r2_curve(np.random.default_rng(0).random((50, 1)), [0.5, 1.0])
    c.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "s,r2,reference"
    assert [float(v) for v in lines[1].split(",")] == [0.5, c.r2[0], c.reference[0]]


def test_grid_matches_python_oracle(rng):
    for _ in range(20):
        n = int(rng.integers(2, 60))
        d = int(rng.integers(1, 4))
        pts = rng.random((n, d))
        s = float(rng.uniform(0.1, 3.0))
        for norm in ("sup", "euclid"):
            want = pair_count(pts.tolist(), threshold(s, n, d), norm) / n
            assert r2_count(pts, s, norm, "brute") == want
            assert r2_count(pts, s, norm, "grid") == want


def test_grid_equals_brute_random_sets(rng, backend):
    # at least 100 sets, N <= 512, d <= 4, with s small enough that the grid is used
    used_grid = 0
    for _ in range(110):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(2, 513))
        s = float(rng.uniform(0.05, 1.5))
        pts = rng.random((n, d))
        if rng.random() < 0.3:
            pts = (np.round(pts * 64) / 64) % 1.0  # lattice data hits the threshold exactly
        norm = "sup" if rng.random() < 0.7 else "euclid"
        used_grid += cells_per_axis(s, n, d) >= 3
        assert r2_count(pts, s, norm, "grid") == r2_count(pts, s, norm, "brute")
    assert used_grid >= 50


@given(st.integers(2, 120), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_curve_monotone_and_bounded(n, d, seed):
    pts = np.random.default_rng(seed).random((n, d))
    c = r2_curve(pts, [0.1, 0.5, 1.0, 2.0, 5.0])
    assert np.all(np.diff(c.r2) >= 0)
    assert np.all(c.r2 >= 0) and np.all(c.r2 <= n - 1)


@given(st.integers(2, 200), st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(0.1, 2.0))
def test_shift_invariance(n, d, seed, s):
    # dyadic coordinates and shifts keep every difference exact
    r = np.random.default_rng(seed)
    pts = r.integers(0, 2**20, size=(n, d)) / 2**20
    shift = r.integers(0, 2**20, size=d) / 2**20
    moved = (pts + shift) % 1.0
    assert r2_count(moved, s) == r2_count(pts, s)
    assert r2_count(moved, s, "euclid") == r2_count(pts, s, "euclid")


def test_brute_counts_ordered_pairs():
    pts = np.array([[0.1], [0.15], [0.9]])
    assert brute_pair_count(pts, 0.06) == 2
    assert brute_pair_count(pts, 0.21) == 4
