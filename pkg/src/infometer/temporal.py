"""Time-series measures: transfer entropy, active information storage,
predictive information, and embedding construction/selection.

Transfer entropy from source Y to target X is the conditional MI between
X's next value and Y's recent past, given X's own recent past. The embedding
(how many lags, at what spacing) is an explicit, reported choice; defaults
exist but are flagged, never silently authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import DiscreteSeries, SampleMatrix, check_stationarity, ensure_distinct_rows
from .entropy import entropy_knn, entropy_plugin
from .errors import InsufficientData, InvalidConfig
from .knn import NeighborIndex
from .mi import as_array, cmi_ksg, ksg_cmi_value, ksg_mi_value, mi_ksg, MiEstimate

DEFAULT_EMBEDDING_NOTE = (
    "default embedding l = k = tau = 1 in use; lag choices should be justified "
    "for the system under study, not defaulted"
)


@dataclass(frozen=True)
class EmbeddingSpec:
    """Uniform lag structure: l target taps and k source taps, tau apart.

    Tap lags relative to the predicted sample are 1, 1 + tau, ...,
    1 + (l-1) tau for the target and likewise with k for the source.
    selected_lags, when present, records a non-uniform selection as
    (source_index, lag) pairs and is informational.
    """

    target_history: int = 1
    source_history: int = 1
    delay: int = 1
    selected_lags: tuple[tuple[int, int], ...] | None = None
    is_default: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.target_history < 1 or self.source_history < 1 or self.delay < 1:
            raise InvalidConfig("embedding needs l, k, tau >= 1")
        if self.selected_lags is not None:
            lags = [int(lag) for _, lag in self.selected_lags]
            if any(lag < 1 for lag in lags):
                raise InvalidConfig("explicit lags must be positive")

    def target_lags(self) -> list[int]:
        return [1 + i * self.delay for i in range(self.target_history)]

    def source_lags(self) -> list[int]:
        return [1 + i * self.delay for i in range(self.source_history)]

    def max_lag(self, with_source: bool) -> int:
        lags = self.target_lags() + (self.source_lags() if with_source else [])
        return max(lags)

    def to_dict(self) -> dict:
        return {
            "target_history": self.target_history,
            "source_history": self.source_history,
            "delay": self.delay,
            "selected_lags": [list(p) for p in self.selected_lags] if self.selected_lags else None,
            "is_default": self.is_default,
        }


DEFAULT_EMBEDDING = EmbeddingSpec(1, 1, 1, is_default=True)


def _series_values(series) -> np.ndarray:
    if isinstance(series, DiscreteSeries):
        return series.symbols.astype(np.float64)
    arr = as_array(series, "series")
    if arr.shape[1] != 1:
        raise InvalidConfig("time series must be univariate")
    return arr[:, 0]


def embed(target, spec: EmbeddingSpec, source=None) -> SampleMatrix:
    """Lagged block matrix: future value, target past taps, source past taps.

    Row for time s holds (x[s], x[s - lag] ..., y[s - lag] ...) for s running
    over the max-lag-trimmed range; every column is a verbatim lagged slice.
    """
    x = _series_values(target)
    y = _series_values(source) if source is not None else None
    if y is not None and y.size != x.size:
        raise InvalidConfig("source and target must have equal length")
    maxlag = spec.max_lag(with_source=y is not None)
    n_eff = x.size - maxlag
    if n_eff < 1:
        raise InsufficientData(
            f"series of length {x.size} cannot support max lag {maxlag}"
        )
    s = np.arange(maxlag, x.size)
    cols = [x[s]]
    names = ["future"]
    for lag in spec.target_lags():
        cols.append(x[s - lag])
        names.append(f"target_lag{lag}")
    if y is not None:
        for lag in spec.source_lags():
            cols.append(y[s - lag])
            names.append(f"source_lag{lag}")
    return SampleMatrix(np.column_stack(cols), tuple(names), is_time_ordered=True)


def split_blocks(embedded: SampleMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """(future, target-past, source-past) column blocks of an embed() result."""
    names = embedded.column_names or ()
    fut = embedded.data[:, [i for i, c in enumerate(names) if c == "future"]]
    tgt = embedded.data[:, [i for i, c in enumerate(names) if c.startswith("target_lag")]]
    src_idx = [i for i, c in enumerate(names) if c.startswith("source_lag")]
    src = embedded.data[:, src_idx] if src_idx else None
    return fut, tgt, src


@dataclass(frozen=True)
class TeResult:
    """Directed transfer value with its normalization and provenance."""

    value: float
    effect_size: float | None
    embedding: EmbeddingSpec
    estimator_id: str
    hyperparams: dict
    significance: object | None = None
    ci: object | None = None
    stationarity: dict | None = None
    preprocessing: tuple[dict, ...] = ()
    notes: tuple[str, ...] = ()
    unit: str = "nats"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "effect_size": self.effect_size,
            "embedding": self.embedding.to_dict(),
            "estimator_id": self.estimator_id,
            "hyperparams": dict(self.hyperparams),
            "significance": self.significance.to_dict() if self.significance is not None else None,
            "ci": self.ci.to_dict() if self.ci is not None else None,
            "stationarity": self.stationarity,
            "preprocessing": [dict(p) for p in self.preprocessing],
            "notes": list(self.notes),
            "unit": self.unit,
        }

    def with_significance(self, sig) -> "TeResult":
        from dataclasses import replace

        return replace(self, significance=sig)

    def with_ci(self, ci) -> "TeResult":
        from dataclasses import replace

        return replace(self, ci=ci)


def _discrete_block_entropy(cols: list[np.ndarray]) -> float:
    """Plugin entropy (nats) of the joint symbols formed by integer columns."""
    if not cols:
        return 0.0
    stacked = np.column_stack(cols).astype(np.int64)
    _, counts = np.unique(stacked, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log(p)))


def _plugin_cmi(fut: np.ndarray, src: np.ndarray, tgt: np.ndarray) -> float:
    """I(future; source | target-past) from empirical counts; >= 0 exactly."""
    f = [fut[:, j] for j in range(fut.shape[1])]
    s = [src[:, j] for j in range(src.shape[1])]
    t = [tgt[:, j] for j in range(tgt.shape[1])]
    return (
        _discrete_block_entropy(f + t)
        + _discrete_block_entropy(s + t)
        - _discrete_block_entropy(t)
        - _discrete_block_entropy(f + s + t)
    )


def _plugin_mi_blocks(a: np.ndarray, b: np.ndarray) -> float:
    ac = [a[:, j] for j in range(a.shape[1])]
    bc = [b[:, j] for j in range(b.shape[1])]
    return _discrete_block_entropy(ac) + _discrete_block_entropy(bc) - _discrete_block_entropy(ac + bc)


def _target_entropy(target, estimator: str, k_neighbors: int) -> tuple[float, str]:
    if estimator == "plugin":
        h = entropy_plugin(target).value
        return h, "plugin entropy of target symbols"
    vals = _series_values(target)
    h = entropy_knn(vals.reshape(-1, 1), k=k_neighbors).value
    return h, "knn differential entropy of target"


def _stationarity_record(target, source=None) -> dict | None:
    recs = {}
    try:
        recs["target"] = check_stationarity(_series_values(target)).to_dict()
        if source is not None:
            recs["source"] = check_stationarity(_series_values(source)).to_dict()
    except InsufficientData:
        return None
    return recs


def transfer_entropy(source, target, spec: EmbeddingSpec = DEFAULT_EMBEDDING,
                     estimator: str = "ksg", k_neighbors: int = 4,
                     extra_conditioning: np.ndarray | None = None) -> TeResult:
    """Directed transfer from source to target under the given embedding.

    estimator "ksg" expects continuous series; "plugin" expects
    DiscreteSeries. extra_conditioning appends already-embedded columns
    (e.g. other streams' pasts) to the conditioning block.
    """
    if estimator not in ("ksg", "plugin"):
        raise InvalidConfig(f"unknown estimator {estimator!r}")
    emb = embed(target, spec, source)
    fut, tgt, src = split_blocks(emb)
    cond = tgt if extra_conditioning is None else np.column_stack([tgt, extra_conditioning])
    notes: tuple[str, ...] = (DEFAULT_EMBEDDING_NOTE,) if spec.is_default else ()

    if estimator == "plugin":
        if not isinstance(target, DiscreteSeries) or not isinstance(source, DiscreteSeries):
            raise InvalidConfig("plugin transfer entropy needs DiscreteSeries inputs")
        value = _plugin_cmi(fut, src, cond)
        hyper = {"n_eff": fut.shape[0]}
        prep: tuple[dict, ...] = ()
    else:
        est = cmi_ksg(fut, src, cond, k=k_neighbors)
        value = est.value
        hyper = dict(est.hyperparams)
        prep = est.preprocessing
        notes = notes + est.notes

    h_target, norm_desc = _target_entropy(target, estimator, k_neighbors)
    effect = value / h_target if h_target > 0 else None
    hyper["effect_size_normalization"] = norm_desc
    return TeResult(value, effect, spec, estimator, hyper,
                    stationarity=_stationarity_record(target, source),
                    preprocessing=prep, notes=notes)


def active_information_storage(series, spec: EmbeddingSpec = DEFAULT_EMBEDDING,
                               estimator: str = "ksg", k_neighbors: int = 4) -> TeResult:
    """Self-prediction: MI between the series' own past block and next value."""
    if estimator not in ("ksg", "plugin"):
        raise InvalidConfig(f"unknown estimator {estimator!r}")
    emb = embed(series, spec, None)
    fut, tgt, _ = split_blocks(emb)
    notes: tuple[str, ...] = (DEFAULT_EMBEDDING_NOTE,) if spec.is_default else ()
    if estimator == "plugin":
        if not isinstance(series, DiscreteSeries):
            raise InvalidConfig("plugin estimation needs a DiscreteSeries")
        value = _plugin_mi_blocks(fut, tgt)
        hyper = {"n_eff": fut.shape[0]}
        prep: tuple[dict, ...] = ()
    else:
        est = mi_ksg(tgt, fut, k=k_neighbors)
        value = est.value
        hyper = dict(est.hyperparams)
        prep = est.preprocessing
        notes = notes + est.notes
    h_target, norm_desc = _target_entropy(series, estimator, k_neighbors)
    effect = value / h_target if h_target > 0 else None
    hyper["effect_size_normalization"] = norm_desc
    return TeResult(value, effect, spec, estimator, hyper,
                    stationarity=_stationarity_record(series),
                    preprocessing=prep, notes=notes)


def predictive_information(series, window: int, estimator: str = "ksg",
                           k_neighbors: int = 4) -> MiEstimate:
    """MI between the length-T past block and length-T future block.

    The timescale T is part of the result's identity: the value is not
    comparable across windows.
    """
    t = int(window)
    if t < 1:
        raise InvalidConfig("window must be >= 1")
    x = _series_values(series)
    n = x.size
    if n <= 2 * t:
        raise InsufficientData(f"need N > 2T, got N={n}, T={t}")
    anchors = np.arange(t - 1, n - t)
    past = np.column_stack([x[anchors - i] for i in range(t)])
    future = np.column_stack([x[anchors + 1 + i] for i in range(t)])
    if estimator == "plugin":
        if not isinstance(series, DiscreteSeries):
            raise InvalidConfig("plugin estimation needs a DiscreteSeries")
        value = _plugin_mi_blocks(past, future)
        return MiEstimate(value, "plugin", {"window": t, "n_eff": anchors.size})
    est = mi_ksg(past, future, k=k_neighbors)
    hyper = dict(est.hyperparams)
    hyper["window"] = t
    return MiEstimate(est.value, est.estimator_id, hyper, ci=est.ci,
                      preprocessing=est.preprocessing, notes=est.notes)


# ---------------------------------------------------------------------------
# statistics objects consumed by inference.surrogate_test
# ---------------------------------------------------------------------------

class CmiShiftStatistic:
    """Conditional MI I(x; y | z) as a function of circular shifts of y.

    Shifting the aligned y block (rows rotated jointly) preserves its
    autocorrelation while destroying the y-x alignment, which is the null a
    significance test needs. When y and z are single columns the whole suite
    of shifts runs through the batched counting kernels.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray, z: np.ndarray,
                 k_neighbors: int = 4, min_shift: int = 1):
        # distinct (x, z) rows guarantee distinct joints under every shift
        # of y, so jitter is decided once for the whole suite
        dx = x.shape[1]
        xz, _ = ensure_distinct_rows(np.column_stack([x, z]))
        self.fut = xz[:, :dx]
        self.cond = xz[:, dx:]
        self.src = np.asarray(y, dtype=np.float64).reshape(len(y), -1)
        self.k = int(k_neighbors)
        self._min_shift = int(min_shift)

    @property
    def n(self) -> int:
        return self.fut.shape[0]

    @property
    def min_shift(self) -> int:
        return self._min_shift

    def _value(self, src_block: np.ndarray) -> float:
        joint = np.column_stack([self.fut, src_block, self.cond])
        eps = NeighborIndex(joint, require_distinct=True).kth_distances(self.k)
        n_xz = NeighborIndex(np.column_stack([self.fut, self.cond])).count_within_all(eps)
        n_yz = NeighborIndex(np.column_stack([src_block, self.cond])).count_within_all(eps)
        n_z = NeighborIndex(self.cond).count_within_all(eps)
        return ksg_cmi_value(self.k, n_xz, n_yz, n_z)

    def observed(self) -> float:
        return self._value(self.src)

    def value_for_offset(self, offset: int) -> float:
        return self._value(np.roll(self.src, int(offset), axis=0))

    def batch_offsets(self, offsets: np.ndarray) -> np.ndarray | None:
        """[observed, null...] via the batched kernels; None without a fast path."""
        if self.src.shape[1] != 1 or self.cond.shape[1] != 1:
            return None
        from scipy.special import digamma

        from ._fastpath import cmi_counts_over_perms

        n = self.n
        base = np.arange(n)
        perms = np.vstack([base] + [(base - int(o)) % n for o in offsets])
        n_xz, n_yz, n_z = cmi_counts_over_perms(
            self.fut, self.src[:, 0], self.cond[:, 0], self.k, perms
        )
        return digamma(self.k) - np.mean(
            digamma(n_xz + 1.0) + digamma(n_yz + 1.0) - digamma(n_z + 1.0), axis=1
        )


class TePluginShiftStatistic:
    """Discrete-plugin transfer entropy over circular source shifts."""

    def __init__(self, fut: np.ndarray, src: np.ndarray, cond: np.ndarray, min_shift: int):
        self.fut = fut
        self.src = src
        self.cond = cond
        self._min_shift = int(min_shift)

    @property
    def n(self) -> int:
        return self.fut.shape[0]

    @property
    def min_shift(self) -> int:
        return self._min_shift

    def observed(self) -> float:
        return _plugin_cmi(self.fut, self.src, self.cond)

    def value_for_offset(self, offset: int) -> float:
        return _plugin_cmi(self.fut, np.roll(self.src, int(offset), axis=0), self.cond)

    def batch_offsets(self, offsets: np.ndarray) -> None:
        return None


def te_shift_statistic(source, target, spec: EmbeddingSpec = DEFAULT_EMBEDDING,
                       estimator: str = "ksg", k_neighbors: int = 4,
                       extra_conditioning: np.ndarray | None = None):
    """Build the shift statistic matching transfer_entropy's configuration."""
    emb = embed(target, spec, source)
    fut, tgt, src = split_blocks(emb)
    if src is None:
        raise InvalidConfig("statistic needs a source")
    cond = tgt if extra_conditioning is None else np.column_stack([tgt, extra_conditioning])
    min_shift = spec.max_lag(with_source=True)
    if estimator == "plugin":
        return TePluginShiftStatistic(fut, src, cond, min_shift)
    if estimator != "ksg":
        raise InvalidConfig(f"unknown estimator {estimator!r}")
    return CmiShiftStatistic(fut, src, cond, k_neighbors, min_shift)


class MiPermStatistic:
    """MI as a function of row permutations (or shifts) of y."""

    def __init__(self, x, y, k_neighbors: int = 4):
        xa = as_array(x, "x")
        ya = as_array(y, "y")
        if xa.shape[0] != ya.shape[0]:
            raise InvalidConfig("x and y must have equal N")
        # distinct x rows keep every permuted joint distinct
        self.x, _ = ensure_distinct_rows(xa)
        self.y = ya
        self.k = int(k_neighbors)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def min_shift(self) -> int:
        return 1

    def _value(self, y_block: np.ndarray) -> float:
        joint = np.column_stack([self.x, y_block])
        eps = NeighborIndex(joint, require_distinct=True).kth_distances(self.k)
        n_x = NeighborIndex(self.x).count_within_all(eps)
        n_y = NeighborIndex(y_block).count_within_all(eps)
        return ksg_mi_value(self.k, self.n, n_x, n_y)

    def observed(self) -> float:
        return self._value(self.y)

    def value_for_offset(self, offset: int) -> float:
        return self._value(np.roll(self.y, int(offset), axis=0))

    def value_for_perm(self, perm: np.ndarray) -> float:
        return self._value(self.y[perm])

    def _batch(self, perms: np.ndarray) -> np.ndarray | None:
        if self.y.shape[1] != 1:
            return None
        from ._fastpath import mi_counts_over_perms
        from scipy.special import digamma

        n_x, n_y = mi_counts_over_perms(self.x, self.y[:, 0], self.k, perms)
        return digamma(self.k) + digamma(self.n) - np.mean(
            digamma(n_x + 1.0) + digamma(n_y + 1.0), axis=1
        )

    def batch_offsets(self, offsets: np.ndarray) -> np.ndarray | None:
        base = np.arange(self.n)
        perms = np.vstack([base] + [(base - int(o)) % self.n for o in offsets])
        return self._batch(perms)

    def batch_perms(self, perms: np.ndarray) -> np.ndarray | None:
        base = np.arange(self.n).reshape(1, -1)
        return self._batch(np.vstack([base, perms]))


# ---------------------------------------------------------------------------
# non-uniform embedding selection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionStep:
    candidate: tuple[int, int]
    cmi: float
    p_value: float
    accepted: bool


@dataclass(frozen=True)
class SelectionResult:
    spec: EmbeddingSpec
    steps: tuple[SelectionStep, ...]

    @property
    def selected(self) -> tuple[tuple[int, int], ...]:
        return self.spec.selected_lags or ()


def select_embedding_nonuniform(target, candidate_sources: Sequence, max_lag: int,
                                alpha: float = 0.05, surrogates: int = 199,
                                k_neighbors: int = 4, seed=None) -> SelectionResult:
    """Greedy forward lag selection with a max-statistic stopping rule.

    At each step the (source, lag) candidate with the largest conditional MI
    against the target future (given everything already selected) is tested
    against surrogates of the *best over all candidates* statistic; that
    maximum-statistic null corrects for selection across the candidate set.
    Selection stops at the first non-significant step; an empty selection is
    a valid outcome.
    """
    from .rng import as_seed

    if max_lag < 1:
        raise InvalidConfig("max_lag must be >= 1")
    s_count = int(surrogates)
    if s_count < 19:
        raise InvalidConfig("need at least 19 surrogates")
    if alpha < 1.0 / (s_count + 1):
        raise InvalidConfig(
            f"{s_count} surrogates cannot resolve alpha={alpha}; smallest "
            f"attainable p-value is {1.0 / (s_count + 1):.4g}"
        )
    seed = as_seed(seed)
    x = _series_values(target)
    sources = [_series_values(s) for s in candidate_sources]
    if any(s.size != x.size for s in sources):
        raise InvalidConfig("all series must have equal length")
    n = x.size
    if n <= max_lag + 1:
        raise InsufficientData("series shorter than the candidate lag range")

    anchors = np.arange(max_lag, n)
    future = x[anchors].reshape(-1, 1)
    candidates = {(si, lag): sources[si][anchors - lag]
                  for si in range(len(sources)) for lag in range(1, max_lag + 1)}
    n_eff = anchors.size
    lo, hi = max_lag, n_eff - max_lag
    if hi < lo:
        raise InsufficientData("series too short for shift surrogates at this lag range")
    selected: list[tuple[int, int]] = []
    selected_cols: list[np.ndarray] = []
    steps: list[SelectionStep] = []
    remaining = list(candidates)

    def make_stat(col: np.ndarray):
        if selected_cols:
            z = np.column_stack(selected_cols)
        else:
            # unconditional step: a constant conditioning column reduces the
            # conditional estimator to plain MI
            z = np.zeros((n_eff, 1))
        return CmiShiftStatistic(future, col.reshape(-1, 1), z, k_neighbors, max_lag)

    step_index = 0
    while remaining:
        # offsets[r, c]: shift for candidate c in surrogate round r
        offsets = np.vstack([
            seed.substream(step_index * 1_000_003 + r).integers(lo, hi + 1, size=len(remaining))
            for r in range(s_count)
        ])
        observed = np.empty(len(remaining))
        nulls = np.empty((s_count, len(remaining)))
        for ci, cand in enumerate(remaining):
            stat = make_stat(candidates[cand])
            vals = stat.batch_offsets(offsets[:, ci])
            if vals is None:
                observed[ci] = stat.observed()
                nulls[:, ci] = [stat.value_for_offset(o) for o in offsets[:, ci]]
            else:
                observed[ci] = vals[0]
                nulls[:, ci] = vals[1:]
        best_ci = int(np.argmax(observed))
        best = remaining[best_ci]
        best_value = float(observed[best_ci])
        # max-statistic correction: each round contributes its maximum over
        # the whole candidate set
        null_max = nulls.max(axis=1)
        p = (1 + int(np.sum(null_max >= best_value))) / (s_count + 1)
        accepted = p <= alpha
        steps.append(SelectionStep(best, best_value, p, accepted))
        if not accepted:
            break
        selected.append(best)
        selected_cols.append(candidates[best])
        remaining.remove(best)
        step_index += 1

    spec = EmbeddingSpec(
        target_history=1, source_history=1, delay=1,
        selected_lags=tuple(selected) if selected else (),
    )
    return SelectionResult(spec, tuple(steps))
