"""Exact max-norm (Chebyshev) neighbor statistics.

This is the computational kernel behind the nearest-neighbor entropy and
mutual-information estimators. The contract is exactness: every query agrees
with a brute-force O(N^2) scan, bit for bit. Strict radius counts use the
next-representable-float trick (count of d <= nextafter(r, 0) equals the
count of d < r), which stays exact because Chebyshev distances involve no
accumulation error.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidConfig


class NeighborIndex:
    """Immutable spatial index over an N x d point set under the max-norm.

    Parameters
    ----------
    points:
        Real matrix, one row per point.
    require_distinct:
        Reject duplicate rows at build time. Needed wherever log-distance
        terms appear (k-th neighbor distances); marginal count spaces may
        carry duplicates.
    """

    def __init__(self, points: np.ndarray, require_distinct: bool = False):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidConfig("index needs a non-empty 2-d point set")
        if not np.all(np.isfinite(pts)):
            raise InvalidConfig("points contain NaN or Inf")
        if require_distinct and np.unique(pts, axis=0).shape[0] != pts.shape[0]:
            raise InvalidConfig(
                "duplicate points: k-th neighbor distances are undefined at zero "
                "distance (apply tie-break jitter first)"
            )
        self._pts = pts
        self._tree = cKDTree(pts)

    @property
    def n(self) -> int:
        return self._pts.shape[0]

    @property
    def d(self) -> int:
        return self._pts.shape[1]

    def kth_distance(self, query_row: int, k: int) -> float:
        """Max-norm distance from one point to its k-th nearest other point."""
        return float(self.kth_distances(int(k))[int(query_row)])

    def kth_distances(self, k: int) -> np.ndarray:
        """k-th neighbor distance for every point (self excluded)."""
        k = int(k)
        if not 1 <= k < self.n:
            raise InvalidConfig(f"need 1 <= k < N, got k={k}, N={self.n}")
        dist, _ = self._tree.query(self._pts, k=k + 1, p=np.inf)
        return dist[:, k]

    def count_within(self, query_row: int, radius: float, strict: bool = True) -> int:
        """Points (excluding the query) with distance < radius (strict) or <= radius."""
        r = np.asarray([float(radius)])
        return int(self.count_within_all(np.full(self.n, r[0]), strict)[int(query_row)])

    def count_within_all(self, radii: np.ndarray, strict: bool = True) -> np.ndarray:
        """Per-point neighbor counts at per-point radii; self never counted."""
        r = np.asarray(radii, dtype=np.float64)
        if r.shape != (self.n,):
            raise InvalidConfig(f"need one radius per point ({self.n}), got shape {r.shape}")
        if np.any(r < 0):
            raise InvalidConfig("radii must be >= 0")
        q = np.nextafter(r, 0) if strict else r
        # nextafter(0, 0) == 0: a zero strict radius counts only exact
        # duplicates of the query, which d <= 0 then removes via the -1.
        counts = self._tree.query_ball_point(self._pts, q, p=np.inf, return_length=True)
        return np.asarray(counts, dtype=np.int64) - 1


def brute_force_kth(points: np.ndarray, query_row: int, k: int) -> float:
    """Reference O(N^2) k-th neighbor distance (testing oracle)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    d = np.max(np.abs(pts - pts[query_row]), axis=1)
    d[query_row] = np.inf
    return float(np.sort(d)[k - 1])


def brute_force_count(points: np.ndarray, query_row: int, radius: float, strict: bool = True) -> int:
    """Reference O(N) range count (testing oracle)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    d = np.max(np.abs(pts - pts[query_row]), axis=1)
    mask = d < radius if strict else d <= radius
    mask[query_row] = False
    return int(mask.sum())
