"""Batched neighbor-count kernels for surrogate and resampling suites.

Evaluating a nearest-neighbor MI or conditional-MI statistic a few hundred
times per significance test is the hot loop of the whole toolkit. These
kernels exploit what stays fixed across a suite:

  * circular shifts / permutations only relabel the source column; the
    (target, conditioning) point cloud and its neighbor table never change,
  * the source value multiset is shift-invariant, so one global sort gives
    source ranks for every replicate,
  * subsample replicates reuse the full-sample neighbor table with an
    activity mask.

Counts come from exact comparisons (|a - b| < r on float64, same as a brute
scan), so suite results are bit-identical to evaluating the plain estimator
replicate by replicate; the test suite asserts that equality.

Orthogonal-range counts for the (source, conditioning) marginal use a
Fenwick tree over source ranks swept in conditioning order, with interval
boundaries located by predicate binary search (the predicate is the exact
distance comparison, monotone along a sorted axis).
"""

from __future__ import annotations

import warnings

import numpy as np

# the bundled TBB is older than numba wants; the workqueue layer it falls
# back to is fine for our prange loops
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB version")

from numba import njit, prange
from scipy.spatial import cKDTree


# ---------------------------------------------------------------------------
# shared scalar helpers
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, inline="always")
def _cheb_row(mat, i, j):
    d = 0.0
    for m in range(mat.shape[1]):
        dd = abs(mat[j, m] - mat[i, m])
        if dd > d:
            d = dd
    return d


@njit(cache=True, nogil=True, inline="always")
def _kth_insert(best, k, filled, val):
    """Insert val into the sorted k-best buffer; returns new fill count."""
    if filled < k:
        t = filled
        while t > 0 and best[t - 1] > val:
            best[t] = best[t - 1]
            t -= 1
        best[t] = val
        return filled + 1
    if val < best[k - 1]:
        t = k - 1
        while t > 0 and best[t - 1] > val:
            best[t] = best[t - 1]
            t -= 1
        best[t] = val
    return filled


@njit(cache=True, nogil=True)
def _interval_bounds(sorted_vals, pivot, center, radius):
    """Half-open index range [lo, hi) of sorted values with |v - center| < radius.

    pivot must be any index whose value satisfies the predicate (the query
    point's own position). Comparisons are the exact distance predicate, so
    boundary floats land exactly as a linear scan would place them.
    """
    n = sorted_vals.shape[0]
    lo, hi = pivot, n  # first index >= pivot violating the predicate
    while lo < hi:
        mid = (lo + hi) // 2
        if abs(sorted_vals[mid] - center) < radius:
            lo = mid + 1
        else:
            hi = mid
    upper = lo
    lo, hi = 0, pivot  # first index <= pivot satisfying the predicate
    while lo < hi:
        mid = (lo + hi) // 2
        if abs(sorted_vals[mid] - center) < radius:
            hi = mid
        else:
            lo = mid + 1
    return lo, upper


@njit(cache=True, nogil=True, inline="always")
def _fenwick_add(tree, pos):
    i = pos + 1
    while i < tree.shape[0]:
        tree[i] += 1
        i += i & (-i)


@njit(cache=True, nogil=True, inline="always")
def _fenwick_prefix(tree, count):
    s = 0
    i = count
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


# ---------------------------------------------------------------------------
# conditional-MI suite: statistic(x; y_perm | z) over many source relabelings
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _joint_kth_from_table(tab_d, tab_i, yv, i, k, best):
    """k-th joint distance for point i scanning the (x,z) neighbor table.

    Joint distance to j is max(table xz-distance, |y_j - y_i|); the table is
    ascending in xz-distance, so once xz-distance reaches the current k-th
    best the scan is complete. Returns (eps, ok); ok False means the table
    was exhausted before the bound certified completeness.
    """
    M = tab_d.shape[1]
    for t in range(k):
        best[t] = np.inf
    filled = 0
    yi = yv[i]
    for t in range(M):
        dxz = tab_d[i, t]
        if filled == k and dxz >= best[k - 1]:
            return best[k - 1], True
        dy = abs(yv[tab_i[i, t]] - yi)
        de = dxz if dxz > dy else dy
        filled = _kth_insert(best, k, filled, de)
    return best[k - 1], False


@njit(cache=True, nogil=True)
def _joint_kth_full(xz, yv, i, k, best):
    for t in range(k):
        best[t] = np.inf
    filled = 0
    yi = yv[i]
    for j in range(xz.shape[0]):
        if j == i:
            continue
        dxz = _cheb_row(xz, i, j)
        dy = abs(yv[j] - yi)
        de = dxz if dxz > dy else dy
        filled = _kth_insert(best, k, filled, de)
    return best[k - 1]


@njit(cache=True, nogil=True)
def _count_table_lt(tab_d, i, eps):
    """How many table distances for row i are < eps (table row ascending)."""
    M = tab_d.shape[1]
    lo, hi = 0, M
    while lo < hi:
        mid = (lo + hi) // 2
        if tab_d[i, mid] < eps:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def _count_full_lt(xz, i, eps):
    c = 0
    for j in range(xz.shape[0]):
        if j != i and _cheb_row(xz, i, j) < eps:
            c += 1
    return c


@njit(cache=True, nogil=True, parallel=True)
def _cmi_suite_kernel(xz, tab_d, tab_i, zsorted, zord, zpos, ysorted, yrank, yvals,
                      perms, k, n_xz, n_yz, n_z,
                      yv_w, yrk_w, zlo_w, zhi_w, ylo_w, yhi_w,
                      tree_w, hs_w, he_w, ns_w, ne_w, acc_w, best_w):
    """Counts for the conditional-MI estimator over perms rows.

    xz: fixed (x, z) matrix, rows = points. z is the last column (1-d).
    perms[r, t]: index whose source value point t takes in replicate r.
    Outputs are (R, N) int64 count arrays. The *_w arguments are
    caller-allocated per-replicate workspaces (no allocation inside the
    parallel region).
    """
    R = perms.shape[0]
    n = xz.shape[0]
    zcol = xz.shape[1] - 1
    for r in prange(R):
        best = best_w[r]
        yv = yv_w[r]
        yrk = yrk_w[r]
        for t in range(n):
            src = perms[r, t]
            yv[t] = yvals[src]
            yrk[t] = yrank[src]
        zlo = zlo_w[r]
        zhi = zhi_w[r]
        ylo = ylo_w[r]
        yhi = yhi_w[r]
        for i in range(n):
            eps, ok = _joint_kth_from_table(tab_d, tab_i, yv, i, k, best)
            if not ok:
                eps = _joint_kth_full(xz, yv, i, k, best)
            cnt = _count_table_lt(tab_d, i, eps)
            if cnt >= tab_d.shape[1]:
                cnt = _count_full_lt(xz, i, eps)
            n_xz[r, i] = cnt
            lo, hi = _interval_bounds(zsorted, zpos[i], xz[i, zcol], eps)
            zlo[i] = lo
            zhi[i] = hi
            n_z[r, i] = hi - lo - 1
            lo, hi = _interval_bounds(ysorted, yrk[i], yv[i], eps)
            ylo[i] = lo
            yhi[i] = hi
        # Fenwick sweep over z-sorted positions for the (y, z) rectangle counts
        tree = tree_w[r]
        head_start = hs_w[r]
        head_end = he_w[r]
        nxt_start = ns_w[r]
        nxt_end = ne_w[r]
        acc = acc_w[r]
        for t in range(n + 1):
            tree[t] = 0
            head_start[t] = -1
            head_end[t] = -1
        for i in range(n):
            acc[i] = 0
            t = zlo[i]
            nxt_start[i] = head_start[t]
            head_start[t] = i
            t = zhi[i]
            nxt_end[i] = head_end[t]
            head_end[t] = i
        for t in range(n + 1):
            i = head_start[t]
            while i != -1:
                acc[i] -= _fenwick_prefix(tree, yhi[i]) - _fenwick_prefix(tree, ylo[i])
                i = nxt_start[i]
            i = head_end[t]
            while i != -1:
                acc[i] += _fenwick_prefix(tree, yhi[i]) - _fenwick_prefix(tree, ylo[i])
                i = nxt_end[i]
            if t < n:
                _fenwick_add(tree, yrk[zord[t]])
        for i in range(n):
            n_yz[r, i] = acc[i] - 1


# ---------------------------------------------------------------------------
# plain-MI suite: statistic(x; y_perm) over many source relabelings
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, parallel=True)
def _mi_suite_kernel(xmat, tab_d, tab_i, ysorted, yrank, yvals, perms, k, n_x, n_y,
                     yv_w, yrk_w, best_w):
    R = perms.shape[0]
    n = xmat.shape[0]
    for r in prange(R):
        best = best_w[r]
        yv = yv_w[r]
        yrk = yrk_w[r]
        for t in range(n):
            src = perms[r, t]
            yv[t] = yvals[src]
            yrk[t] = yrank[src]
        for i in range(n):
            eps, ok = _joint_kth_from_table(tab_d, tab_i, yv, i, k, best)
            if not ok:
                eps = _joint_kth_full(xmat, yv, i, k, best)
            cnt = _count_table_lt(tab_d, i, eps)
            if cnt >= tab_d.shape[1]:
                cnt = _count_full_lt(xmat, i, eps)
            n_x[r, i] = cnt
            lo, hi = _interval_bounds(ysorted, yrk[i], yv[i], eps)
            n_y[r, i] = hi - lo - 1


# ---------------------------------------------------------------------------
# subsample suite: statistic(x_S; y_S) over many index subsets S
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, parallel=True)
def _mi_subsample_kernel(xmat, tab_d, tab_i, yvals, subsets, ys_sub, k, n_x, n_y,
                         act_w, best_w):
    """Counts for the MI estimator restricted to each row of subsets.

    subsets: (B, m) point indices, no duplicates. ys_sub: per-row sorted
    source values of the subset. Outputs are (B, m).
    """
    B, m = subsets.shape
    n = xmat.shape[0]
    M = tab_d.shape[1]
    for b in prange(B):
        active = act_w[b]
        for t in range(n):
            active[t] = False
        for t in range(m):
            active[subsets[b, t]] = True
        best = best_w[b]
        ys = ys_sub[b]
        for t in range(m):
            i = subsets[b, t]
            yi = yvals[i]
            # k-th joint distance within the subset, via the full-sample table
            for u in range(k):
                best[u] = np.inf
            filled = 0
            ok = False
            for u in range(M):
                dxz = tab_d[i, u]
                if filled == k and dxz >= best[k - 1]:
                    ok = True
                    break
                j = tab_i[i, u]
                if not active[j]:
                    continue
                dy = abs(yvals[j] - yi)
                de = dxz if dxz > dy else dy
                filled = _kth_insert(best, k, filled, de)
            if ok:
                eps = best[k - 1]
            else:
                for u in range(k):
                    best[u] = np.inf
                filled = 0
                for j in range(n):
                    if j == i or not active[j]:
                        continue
                    dxz = _cheb_row(xmat, i, j)
                    dy = abs(yvals[j] - yi)
                    de = dxz if dxz > dy else dy
                    filled = _kth_insert(best, k, filled, de)
                eps = best[k - 1]
            # subset count in the x-marginal
            cnt = 0
            exhausted = True
            for u in range(M):
                if tab_d[i, u] >= eps:
                    exhausted = False
                    break
                if active[tab_i[i, u]]:
                    cnt += 1
            if exhausted:
                cnt = 0
                for j in range(n):
                    if j != i and active[j] and _cheb_row(xmat, i, j) < eps:
                        cnt += 1
            n_x[b, t] = cnt
            # subset count in the source marginal via its sorted values
            pivot = np.searchsorted(ys, yi)
            while ys[pivot] != yi:
                pivot += 1
            lo, hi = _interval_bounds(ys, pivot, yi, eps)
            n_y[b, t] = hi - lo - 1


# ---------------------------------------------------------------------------
# python-side drivers
# ---------------------------------------------------------------------------

_TABLE_DEPTH = 512
_CHUNK = 64


def _as_matrix(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def _neighbor_table(points: np.ndarray, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Ascending Chebyshev neighbor distances and indices, self excluded.

    Requires distinct rows: with duplicates the zero-distance tie makes
    "self is the first hit" ambiguous and every downstream count wrong.
    """
    n = points.shape[0]
    if np.unique(points, axis=0).shape[0] != n:
        from .errors import InvalidConfig

        raise InvalidConfig(
            "batched neighbor suites require distinct table rows; apply tie-break "
            "jitter first"
        )
    m = min(depth, n - 1)
    dist, idx = cKDTree(points).query(points, k=m + 1, p=np.inf)
    return np.ascontiguousarray(dist[:, 1:]), np.ascontiguousarray(idx[:, 1:].astype(np.int32))


def _rank_arrays(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(y, kind="stable")
    rank = np.empty(y.size, dtype=np.int32)
    rank[order] = np.arange(y.size, dtype=np.int32)
    return np.ascontiguousarray(y[order]), rank


def cmi_counts_over_perms(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                          k: int, perms: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """KSG-style strict counts for I(x; y_perm | z) per permutation row.

    Requires 1-d y and 1-d z; x may have any width. Returns
    (n_xz, n_yz, n_z), each (R, N).
    """
    xm = _as_matrix(x)
    zv = np.ascontiguousarray(z, dtype=np.float64).ravel()
    yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    xz = np.ascontiguousarray(np.column_stack([xm, zv]))
    n = xz.shape[0]
    tab_d, tab_i = _neighbor_table(xz, _TABLE_DEPTH)
    zord = np.argsort(zv, kind="stable").astype(np.int32)
    zpos = np.empty(n, dtype=np.int32)
    zpos[zord] = np.arange(n, dtype=np.int32)
    zsorted = np.ascontiguousarray(zv[zord])
    ysorted, yrank = _rank_arrays(yv)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    R = perms.shape[0]
    n_xz = np.empty((R, n), dtype=np.int64)
    n_yz = np.empty((R, n), dtype=np.int64)
    n_z = np.empty((R, n), dtype=np.int64)
    c = min(_CHUNK, R)
    yv_w = np.empty((c, n))
    yrk_w = np.empty((c, n), dtype=np.int32)
    zlo_w = np.empty((c, n), dtype=np.int32)
    zhi_w = np.empty((c, n), dtype=np.int32)
    ylo_w = np.empty((c, n), dtype=np.int32)
    yhi_w = np.empty((c, n), dtype=np.int32)
    tree_w = np.empty((c, n + 1), dtype=np.int32)
    hs_w = np.empty((c, n + 1), dtype=np.int32)
    he_w = np.empty((c, n + 1), dtype=np.int32)
    ns_w = np.empty((c, n), dtype=np.int32)
    ne_w = np.empty((c, n), dtype=np.int32)
    acc_w = np.empty((c, n), dtype=np.int32)
    best_w = np.empty((c, int(k)))
    for start in range(0, R, _CHUNK):
        sl = slice(start, min(start + _CHUNK, R))
        w = sl.stop - start
        _cmi_suite_kernel(xz, tab_d, tab_i, zsorted, zord, zpos,
                          ysorted, yrank, yv, perms[sl], int(k),
                          n_xz[sl], n_yz[sl], n_z[sl],
                          yv_w[:w], yrk_w[:w], zlo_w[:w], zhi_w[:w], ylo_w[:w],
                          yhi_w[:w], tree_w[:w], hs_w[:w], he_w[:w], ns_w[:w],
                          ne_w[:w], acc_w[:w], best_w[:w])
    return n_xz, n_yz, n_z


def mi_counts_over_perms(x: np.ndarray, y: np.ndarray, k: int,
                         perms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """KSG algorithm-1 strict counts for I(x; y_perm) per permutation row."""
    xm = _as_matrix(x)
    yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    n = xm.shape[0]
    tab_d, tab_i = _neighbor_table(xm, _TABLE_DEPTH)
    ysorted, yrank = _rank_arrays(yv)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    R = perms.shape[0]
    n_x = np.empty((R, n), dtype=np.int64)
    n_y = np.empty((R, n), dtype=np.int64)
    c = min(_CHUNK, R)
    yv_w = np.empty((c, n))
    yrk_w = np.empty((c, n), dtype=np.int32)
    best_w = np.empty((c, int(k)))
    for start in range(0, R, _CHUNK):
        sl = slice(start, min(start + _CHUNK, R))
        w = sl.stop - start
        _mi_suite_kernel(xm, tab_d, tab_i, ysorted, yrank, yv, perms[sl], int(k),
                         n_x[sl], n_y[sl], yv_w[:w], yrk_w[:w], best_w[:w])
    return n_x, n_y


def mi_counts_over_subsets(x: np.ndarray, y: np.ndarray, k: int,
                           subsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Strict MI counts restricted to each subset row (no duplicate indices)."""
    xm = _as_matrix(x)
    yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    n = xm.shape[0]
    tab_d, tab_i = _neighbor_table(xm, _TABLE_DEPTH)
    subsets = np.ascontiguousarray(subsets, dtype=np.int64)
    B, m = subsets.shape
    ys_sub = np.sort(yv[subsets], axis=1)
    n_x = np.empty((B, m), dtype=np.int64)
    n_y = np.empty((B, m), dtype=np.int64)
    c = min(_CHUNK, B)
    act_w = np.empty((c, n), dtype=np.bool_)
    best_w = np.empty((c, int(k)))
    for start in range(0, B, _CHUNK):
        sl = slice(start, min(start + _CHUNK, B))
        w = sl.stop - start
        _mi_subsample_kernel(xm, tab_d, tab_i, yv, subsets[sl],
                             np.ascontiguousarray(ys_sub[sl]), int(k),
                             n_x[sl], n_y[sl], act_w[:w], best_w[:w])
    return n_x, n_y
