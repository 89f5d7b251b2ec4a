import numpy as np
import pytest

from infometer.errors import InvalidConfig
from infometer.knn import NeighborIndex, brute_force_count, brute_force_kth

LINE = np.array([[0.0], [1.0], [3.0]])


class TestKthDistance:
    def test_line_k1(self):
        assert NeighborIndex(LINE).kth_distance(0, 1) == 1.0

    def test_line_k2(self):
        assert NeighborIndex(LINE).kth_distance(0, 2) == 3.0

    def test_k_at_least_n_rejected(self):
        with pytest.raises(InvalidConfig):
            NeighborIndex(LINE).kth_distances(3)

    def test_uniform_2d_matches_brute_force_exactly(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 1, (100, 2))
        idx = NeighborIndex(pts)
        dists = idx.kth_distances(4)
        for q in range(100):
            assert dists[q] == brute_force_kth(pts, q, 4)

    def test_monotone_in_k(self):
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((60, 3))
        idx = NeighborIndex(pts)
        prev = idx.kth_distances(1)
        for k in range(2, 8):
            cur = idx.kth_distances(k)
            assert np.all(cur >= prev)
            prev = cur


class TestCountWithin:
    def test_line_strict(self):
        assert NeighborIndex(LINE).count_within(0, 2.0, strict=True) == 1

    def test_zero_radius_strict(self):
        assert NeighborIndex(LINE).count_within(0, 0.0, strict=True) == 0

    def test_boundary_point_excluded_only_when_strict(self):
        idx = NeighborIndex(LINE)
        assert idx.count_within(0, 1.0, strict=True) == 0
        assert idx.count_within(0, 1.0, strict=False) == 1

    def test_random_counts_match_brute_force(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((100, 2))
        idx = NeighborIndex(pts)
        for _ in range(1000):
            q = int(rng.integers(0, 100))
            r = float(rng.uniform(0, 2.0))
            strict = bool(rng.integers(0, 2))
            got = idx.count_within(q, r, strict)
            assert got == brute_force_count(pts, q, r, strict)

    def test_monotone_in_radius(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((50, 2))
        idx = NeighborIndex(pts)
        radii = np.linspace(0, 3, 15)
        prev = np.full(50, -1)
        for r in radii:
            cur = idx.count_within_all(np.full(50, r))
            assert np.all(cur >= prev)
            prev = cur


def test_brute_force_equivalence_across_shapes():
    # realized distances reappear as query radii downstream, so exactness
    # must hold even with ties and duplicated coordinates
    rng = np.random.default_rng(4)
    for trial in range(25):
        n = int(rng.integers(5, 120))
        d = int(rng.integers(1, 6))
        pts = rng.standard_normal((n, d))
        if trial % 3 == 0:
            pts = np.round(pts, 1)
        if np.unique(pts, axis=0).shape[0] != n:
            continue
        idx = NeighborIndex(pts)
        k = int(rng.integers(1, min(5, n - 1) + 1))
        dists = idx.kth_distances(k)
        for q in range(n):
            assert dists[q] == brute_force_kth(pts, q, k)
        # realized kth distances as radii: the KSG boundary case
        strict_counts = idx.count_within_all(dists, strict=True)
        for q in range(n):
            assert strict_counts[q] == brute_force_count(pts, q, dists[q], True)


def test_duplicates_rejected_when_required():
    pts = np.array([[1.0], [1.0], [2.0]])
    with pytest.raises(InvalidConfig):
        NeighborIndex(pts, require_distinct=True)
    NeighborIndex(pts)  # count spaces tolerate duplicates


def test_brute_force_equivalence_at_contract_scale():
    rng = np.random.default_rng(6)
    pts = rng.standard_normal((500, 5))
    idx = NeighborIndex(pts)
    dists = idx.kth_distances(4)
    for q in rng.integers(0, 500, 40):
        assert dists[q] == brute_force_kth(pts, int(q), 4)
    counts = idx.count_within_all(dists, strict=True)
    for q in rng.integers(0, 500, 40):
        assert counts[q] == brute_force_count(pts, int(q), dists[q], True)
