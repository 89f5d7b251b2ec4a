"""Statistical machinery: surrogate null distributions, resampling intervals,
multiple-comparison corrections, and the all-pairs directed-influence scan.

Everything here is seeded and replicate-indexed: replicate r always draws
from substream (master_seed, r), so p-values, intervals, and rejection sets
are bit-identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DiscreteSeries
from .errors import InsufficientData, InvalidConfig
from .rng import RngSeed, as_seed, parallel_map
from .temporal import (DEFAULT_EMBEDDING, EmbeddingSpec, TeResult, _plugin_cmi,
                       _series_values, _target_entropy, te_shift_statistic)

DEFAULT_SURROGATES = 200
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class SignificanceResult:
    """Observed statistic against an empirical surrogate null."""

    observed: float
    null_samples: np.ndarray
    p_value: float
    method: str
    surrogate_count: int
    seed: RngSeed

    def to_dict(self) -> dict:
        return {
            "observed": self.observed,
            "p_value": self.p_value,
            "method": self.method,
            "surrogate_count": self.surrogate_count,
            "null_mean": float(np.mean(self.null_samples)),
            "null_sd": float(np.std(self.null_samples)),
            "null_samples": [float(v) for v in self.null_samples],
            "seed": self.seed.to_dict(),
        }


@dataclass(frozen=True)
class CiResult:
    """Percentile interval from seeded resampling; always brackets the point."""

    point: float
    low: float
    high: float
    level: float
    replicates: int
    method: str
    resampling: str

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "low": self.low,
            "high": self.high,
            "level": self.level,
            "replicates": self.replicates,
            "method": self.method,
            "resampling": self.resampling,
        }


def surrogate_test(statistic, method: str = "time_shift", surrogates: int = DEFAULT_SURROGATES,
                   seed=None, alpha: float | None = None, workers: int = 1) -> SignificanceResult:
    """Empirical p-value of a statistic against shift or permutation surrogates.

    The statistic object exposes .n, .min_shift, .observed(), and
    .value_for_offset / .value_for_perm; a .batch_offsets / .batch_perms
    method, when present and applicable, evaluates the whole suite in one
    pass with identical results.

    The p-value is (1 + #{null >= observed}) / (S + 1): never exactly zero.
    Ties count against significance. time_shift rotates the aligned source
    circularly by a per-replicate offset in [min_shift, n - min_shift],
    preserving its autocorrelation; permutation shuffles source rows and is
    only a valid null for serially independent data.
    """
    s_count = int(surrogates)
    if s_count < 19:
        raise InvalidConfig(f"need at least 19 surrogates, got {s_count}")
    if alpha is not None and alpha < 1.0 / (s_count + 1):
        raise InvalidConfig(
            f"{s_count} surrogates cannot resolve alpha={alpha}: the smallest attainable "
            f"p-value is 1/(S+1) = {1.0 / (s_count + 1):.4g}; raise S to at least "
            f"{int(np.ceil(1.0 / alpha)) - 1}"
        )
    seed = as_seed(seed)
    n = statistic.n
    observed = float(statistic.observed())

    if method == "time_shift":
        lo = max(int(statistic.min_shift), 1)
        hi = n - lo
        if hi < lo:
            raise InsufficientData(
                f"series of effective length {n} too short for shifts >= {lo}"
            )
        offsets = np.array([int(seed.substream(r).integers(lo, hi + 1)) for r in range(s_count)])
        batch = getattr(statistic, "batch_offsets", None)
        vals = batch(offsets) if batch is not None else None
        if vals is not None:
            observed = float(vals[0])
            null = np.asarray(vals[1:], dtype=np.float64)
        else:
            null = np.asarray(parallel_map(
                lambda r: float(statistic.value_for_offset(offsets[r])), s_count, workers))
    elif method == "permutation":
        perms = [seed.substream(r).permutation(n) for r in range(s_count)]
        batch = getattr(statistic, "batch_perms", None)
        vals = batch(np.asarray(perms)) if batch is not None else None
        if vals is not None:
            observed = float(vals[0])
            null = np.asarray(vals[1:], dtype=np.float64)
        else:
            null = np.asarray(parallel_map(
                lambda r: float(statistic.value_for_perm(perms[r])), s_count, workers))
    else:
        raise InvalidConfig(f"unknown surrogate method {method!r}")

    p = (1 + int(np.sum(null >= observed))) / (s_count + 1)
    return SignificanceResult(observed, null, float(p), method, s_count, seed)


# ---------------------------------------------------------------------------
# resampling intervals
# ---------------------------------------------------------------------------

def _iid_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, n, size=n)


def _moving_block_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    length = int(np.ceil(n ** (1.0 / 3.0)))
    starts = rng.integers(0, n - length + 1, size=int(np.ceil(n / length)))
    idx = (starts[:, None] + np.arange(length)[None, :]).ravel()[:n]
    return idx


def _subsample_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    m = (n + 1) // 2
    return rng.permutation(n)[:m]


def _window_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    m = (n + 1) // 2
    start = int(rng.integers(0, n - m + 1))
    return np.arange(start, start + m)


_RESAMPLERS = {
    "iid": _iid_indices,
    "moving_block": _moving_block_indices,
    "subsample": _subsample_indices,
    "window_subsample": _window_indices,
}


def bootstrap_ci(statistic, replicates: int = 200, level: float = 0.95,
                 seed=None, workers: int = 1) -> CiResult:
    """Reflected (basic) percentile interval over seeded resamples.

    The statistic object exposes .n, .resampling (one of iid, moving_block,
    subsample, window_subsample), .point(), .value_for_indices(idx); an
    optional .batch_indices evaluates all replicate index sets at once.

    The pivot is the replicate distribution centered on its own mean, and
    the interval reflects its tails around the point estimate:

        low  = point - (q_hi - mean_reps)
        high = point - (q_lo - mean_reps)

    A plain percentile interval has zero coverage wherever the estimator is
    capped at the true value (plugin entropy of a maximum-entropy source can
    never exceed log K, so its replicates all sit below the truth).
    Centering additionally cancels resampling-scheme bias: half-sample
    replicates of neighbor statistics sit visibly above the full-sample
    value because k-th neighbor radii grow at half density, and reflecting
    raw quantiles would drag the interval off target. Half-sample deviations
    need no width rescaling: for smooth functionals Var(value_m - value_n)
    is about sigma^2 (1/m - 1/n) = sigma^2 / n at m = n/2, already the
    full-sample error.

    low <= point <= high always holds.
    """
    b = int(replicates)
    if b < 100:
        raise InvalidConfig(f"need at least 100 replicates, got {b}")
    if not 0 < level < 1:
        raise InvalidConfig(f"level must be in (0,1), got {level}")
    seed = as_seed(seed)
    n = statistic.n
    mode = statistic.resampling
    if mode not in _RESAMPLERS:
        raise InvalidConfig(f"unknown resampling mode {mode!r}")
    sampler = _RESAMPLERS[mode]
    index_sets = [sampler(seed.substream(r), n) for r in range(b)]
    point = float(statistic.point())

    batch = getattr(statistic, "batch_indices", None)
    vals = None
    if batch is not None and all(len(ix) == len(index_sets[0]) for ix in index_sets):
        vals = batch(np.asarray(index_sets))
    if vals is None:
        vals = parallel_map(lambda r: float(statistic.value_for_indices(index_sets[r])),
                            b, workers)
    pool = np.concatenate([[point], np.asarray(vals, dtype=np.float64)])
    tail = (1.0 - level) / 2.0
    q_lo, q_hi = np.percentile(pool, [100 * tail, 100 * (1 - tail)])
    center = float(pool.mean())
    low = min(point - (q_hi - center), point)
    high = max(point - (q_lo - center), point)
    return CiResult(point, float(low), float(high), float(level), b,
                    "bootstrap-percentile (centered reflection)", mode)


class FunctionStat:
    """Adapter: plain callable over row-indexable data as a bootstrap statistic."""

    def __init__(self, fn, data: np.ndarray, resampling: str = "iid"):
        self.fn = fn
        self.data = np.asarray(data)
        self.resampling = resampling

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def point(self) -> float:
        return float(self.fn(self.data))

    def value_for_indices(self, idx: np.ndarray) -> float:
        return float(self.fn(self.data[idx]))


class PluginEntropyStat:
    """Plugin entropy of a discrete series under iid resampling."""

    def __init__(self, series: DiscreteSeries):
        self.symbols = series.symbols
        self.alphabet = series.alphabet_size
        self.resampling = "iid"

    @property
    def n(self) -> int:
        return self.symbols.size

    def _value(self, sym: np.ndarray) -> float:
        p = np.bincount(sym, minlength=self.alphabet) / sym.size
        nz = p[p > 0]
        return float(-np.sum(nz * np.log(nz)))

    def point(self) -> float:
        return self._value(self.symbols)

    def value_for_indices(self, idx: np.ndarray) -> float:
        return self._value(self.symbols[idx])


class MiKsgStat:
    """Nearest-neighbor MI under half-sample subsampling.

    Resampling with replacement duplicates points, which wrecks neighbor
    statistics (duplicates masquerade as ultra-fine dependence), so interval
    replicates come from m-out-of-n subsampling without replacement.
    """

    def __init__(self, x, y, k_neighbors: int = 4):
        from .data import ensure_distinct_rows
        from .mi import as_array

        xa = as_array(x, "x")
        ya = as_array(y, "y")
        if xa.shape[0] != ya.shape[0]:
            raise InvalidConfig("x and y must have equal N")
        joint, _ = ensure_distinct_rows(np.column_stack([xa, ya]))
        self.x = joint[:, : xa.shape[1]]
        self.y = joint[:, xa.shape[1]:]
        self.k = int(k_neighbors)
        self.resampling = "subsample"

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def _value(self, xa: np.ndarray, ya: np.ndarray) -> float:
        from .knn import NeighborIndex
        from .mi import ksg_mi_value

        joint = np.column_stack([xa, ya])
        eps = NeighborIndex(joint, require_distinct=True).kth_distances(self.k)
        n_x = NeighborIndex(xa).count_within_all(eps)
        n_y = NeighborIndex(ya).count_within_all(eps)
        return ksg_mi_value(self.k, xa.shape[0], n_x, n_y)

    def point(self) -> float:
        return self._value(self.x, self.y)

    def value_for_indices(self, idx: np.ndarray) -> float:
        return self._value(self.x[idx], self.y[idx])

    def batch_indices(self, index_matrix: np.ndarray) -> np.ndarray | None:
        if self.y.shape[1] != 1:
            return None
        from scipy.special import digamma

        from ._fastpath import mi_counts_over_subsets

        n_x, n_y = mi_counts_over_subsets(self.x, self.y[:, 0], self.k, index_matrix)
        m = index_matrix.shape[1]
        return digamma(self.k) + digamma(m) - np.mean(
            digamma(n_x + 1.0) + digamma(n_y + 1.0), axis=1
        )


class TeStat:
    """Transfer entropy under contiguous-window subsampling of embedded rows.

    Embedded rows are serially dependent and neighbor-based, so replicates
    use random contiguous windows: no duplicated points, temporal structure
    intact inside each window.
    """

    def __init__(self, source, target, spec: EmbeddingSpec = DEFAULT_EMBEDDING,
                 estimator: str = "ksg", k_neighbors: int = 4,
                 extra_conditioning: np.ndarray | None = None):
        self.stat = te_shift_statistic(source, target, spec, estimator, k_neighbors,
                                       extra_conditioning)
        self.estimator = estimator
        self.resampling = "window_subsample" if estimator == "ksg" else "moving_block"

    @property
    def n(self) -> int:
        return self.stat.n

    def point(self) -> float:
        return self.stat.observed()

    def value_for_indices(self, idx: np.ndarray) -> float:
        if self.estimator == "plugin":
            return _plugin_cmi(self.stat.fut[idx], self.stat.src[idx], self.stat.cond[idx])
        sub = type(self.stat)(self.stat.fut[idx], self.stat.src[idx], self.stat.cond[idx],
                              self.stat.k, self.stat.min_shift)
        return sub.observed()


# ---------------------------------------------------------------------------
# multiple comparisons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrectionResult:
    p_raw: np.ndarray
    p_adjusted: np.ndarray
    rejected: np.ndarray
    method: str
    alpha: float

    def to_dict(self) -> dict:
        return {
            "p_raw": [float(v) for v in self.p_raw],
            "p_adjusted": [float(v) for v in self.p_adjusted],
            "rejected": [bool(v) for v in self.rejected],
            "method": self.method,
            "alpha": self.alpha,
        }


def correct_pvalues(p_values, method: str = "bonferroni", alpha: float = DEFAULT_ALPHA,
                    m_total: int | None = None) -> CorrectionResult:
    """Adjusted p-values and the rejection set at alpha.

    bonferroni: min(1, m * p). bh_fdr: step-up with enforced monotonicity.
    The FDR rejection set always contains the Bonferroni one. m_total
    overrides the family size when the vector is a subset of a larger family.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InvalidConfig("need a non-empty 1-d p-value vector")
    if np.any(p <= 0) or np.any(p > 1):
        raise InvalidConfig("p-values must lie in (0, 1]")
    m = int(m_total) if m_total is not None else p.size
    if m < p.size:
        raise InvalidConfig(f"family size {m} smaller than the vector ({p.size})")
    if method == "bonferroni":
        adj = np.minimum(1.0, m * p)
    elif method == "bh_fdr":
        order = np.argsort(p, kind="stable")
        ranked = p[order] * m / np.arange(1, p.size + 1)
        ranked = np.minimum.accumulate(ranked[::-1])[::-1]
        adj = np.empty(p.size)
        adj[order] = np.minimum(1.0, ranked)
    else:
        raise InvalidConfig(f"unknown correction method {method!r}")
    return CorrectionResult(p, adj, adj <= alpha, method, float(alpha))


# ---------------------------------------------------------------------------
# all-pairs directed scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkScanResult:
    pairs: tuple[tuple[int, int], ...]
    results: dict
    correction: CorrectionResult
    rejected_pairs: tuple[tuple[int, int], ...]
    conditioning: str
    seed: RngSeed

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "results": {f"{i}->{j}": r.to_dict() for (i, j), r in self.results.items()},
            "correction": self.correction.to_dict(),
            "rejected_pairs": [list(p) for p in self.rejected_pairs],
            "conditioning": self.conditioning,
            "seed": self.seed.to_dict(),
        }


def network_scan(streams, spec: EmbeddingSpec = DEFAULT_EMBEDDING, estimator: str = "ksg",
                 k_neighbors: int = 4, surrogates: int = DEFAULT_SURROGATES,
                 correction: str = "bonferroni", alpha: float = DEFAULT_ALPHA,
                 seed=None, condition_on_others: bool = True,
                 workers: int = 1) -> NetworkScanResult:
    """Transfer entropy with surrogate significance for all directed pairs.

    Conditioning on the joint past of all other streams suppresses indirect
    links (a relay A -> B -> C never shows a corrected A -> C edge);
    pairwise mode is available for comparability and speed but cannot
    separate direct from relayed influence. The choice is recorded.

    The corrected per-test level must be attainable: alpha / n_tests >=
    1/(S+1), otherwise no rejection would ever be possible and the scan
    refuses to run.
    """
    m = len(streams)
    if m < 2:
        raise InvalidConfig("need at least 2 streams")
    values = [_series_values(s) for s in streams]
    n = values[0].size
    if any(v.size != n for v in values):
        raise InvalidConfig("all streams must have equal length")
    n_tests = m * (m - 1)
    s_count = int(surrogates)
    per_test_alpha = alpha / n_tests
    if per_test_alpha < 1.0 / (s_count + 1):
        raise InvalidConfig(
            f"{s_count} surrogates cannot resolve the corrected level alpha/{n_tests} = "
            f"{per_test_alpha:.4g}; the smallest attainable p-value is "
            f"{1.0 / (s_count + 1):.4g}. Raise surrogates to at least "
            f"{int(np.ceil(n_tests / alpha)) - 1}."
        )
    seed = as_seed(seed)

    maxlag = spec.max_lag(with_source=True)
    anchors = np.arange(maxlag, n)
    lag_cols = {
        s: np.column_stack([values[s][anchors - lag] for lag in spec.source_lags()])
        for s in range(m)
    }
    target_entropy = {}
    for j in range(m):
        target_entropy[j], _ = _target_entropy(
            streams[j] if isinstance(streams[j], DiscreteSeries) else values[j],
            estimator, k_neighbors,
        )

    pairs = tuple((i, j) for i in range(m) for j in range(m) if i != j)
    results = {}
    p_raw = []
    for pair_index, (i, j) in enumerate(pairs):
        if condition_on_others:
            other = [lag_cols[s] for s in range(m) if s not in (i, j)]
            extra = np.column_stack(other) if other else None
        else:
            extra = None
        stat = te_shift_statistic(streams[i] if isinstance(streams[i], DiscreteSeries) else values[i],
                                  streams[j] if isinstance(streams[j], DiscreteSeries) else values[j],
                                  spec, estimator, k_neighbors, extra_conditioning=extra)
        sig = surrogate_test(stat, "time_shift", s_count,
                             seed=RngSeed(seed.substream(pair_index).integers(0, 2**63)),
                             workers=workers)
        h = target_entropy[j]
        effect = sig.observed / h if h > 0 else None
        res = TeResult(sig.observed, effect, spec, estimator,
                       {"pair": [i, j], "k": k_neighbors,
                        "conditioning": "all-other-streams-past" if condition_on_others else "pairwise"},
                       significance=sig)
        results[(i, j)] = res
        p_raw.append(sig.p_value)

    corr = correct_pvalues(np.array(p_raw), correction, alpha)
    rejected = tuple(pair for pair, rej in zip(pairs, corr.rejected) if rej)
    return NetworkScanResult(pairs, results, corr, rejected,
                             "all-other-streams-past" if condition_on_others else "pairwise",
                             seed)
