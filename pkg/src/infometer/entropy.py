"""Shannon and differential entropy estimators.

Four estimators with different data regimes: plugin and Miller-Madow for
discrete symbols, spacing (Vasicek) for univariate continuous samples, and
the nearest-neighbor estimator for continuous samples in any dimension.
All values are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import digamma

from .data import DiscreteSeries, ProbTable, SampleMatrix, ensure_distinct_rows
from .errors import DegenerateInput, InvalidConfig
from .knn import NeighborIndex

DEFAULT_KNN_K = 4


@dataclass(frozen=True)
class EntropyEstimate:
    """An entropy value plus everything a report needs to reproduce it."""

    value: float
    estimator_id: str
    hyperparams: dict
    unit: str = "nats"
    ci: object | None = None
    preprocessing: tuple[dict, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "estimator_id": self.estimator_id,
            "hyperparams": dict(self.hyperparams),
            "unit": self.unit,
            "ci": self.ci.to_dict() if self.ci is not None else None,
            "preprocessing": [dict(p) for p in self.preprocessing],
            "notes": list(self.notes),
        }


def _plugin_value(probs: np.ndarray) -> float:
    nz = probs[probs > 0]
    return float(-np.sum(nz * np.log(nz)))


def entropy_plugin(p: ProbTable | DiscreteSeries) -> EntropyEstimate:
    """-sum p log p with 0 log 0 = 0, from a distribution or raw symbols."""
    if isinstance(p, DiscreteSeries):
        probs = p.frequencies()
        hyper = {"source": "empirical_frequencies", "n": p.n, "alphabet_size": p.alphabet_size}
        prep = (p.record,) if p.record else ()
    elif isinstance(p, ProbTable):
        probs = p.probs
        hyper = {"source": "prob_table", "alphabet_size": p.k}
        prep = ()
    else:
        raise InvalidConfig(f"expected ProbTable or DiscreteSeries, got {type(p).__name__}")
    return EntropyEstimate(_plugin_value(probs), "plugin", hyper, preprocessing=prep)


def entropy_miller_madow(series: DiscreteSeries) -> EntropyEstimate:
    """Plugin estimate plus the (K_observed - 1) / (2N) small-sample correction."""
    if series.n < 1:
        raise InvalidConfig("empty series")
    counts = np.bincount(series.symbols, minlength=series.alphabet_size)
    k_obs = int((counts > 0).sum())
    plugin = _plugin_value(counts / series.n)
    corrected = plugin + (k_obs - 1) / (2 * series.n)
    hyper = {"n": series.n, "observed_symbols": k_obs, "alphabet_size": series.alphabet_size}
    prep = (series.record,) if series.record else ()
    return EntropyEstimate(corrected, "miller_madow", hyper, preprocessing=prep)


def entropy_vasicek(samples: np.ndarray | Sequence[float], m: int | None = None) -> EntropyEstimate:
    """Spacing estimator of differential entropy for univariate samples.

    Averages log of the m-spacings of the order statistics under the usual
    N/(2m) scaling. Only defined for d = 1; there is no spacing construction
    in higher dimension. Default window m = floor(sqrt(N)).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise InvalidConfig("spacing estimator is defined for d = 1 only")
    n = x.size
    if m is None:
        m = max(1, int(np.sqrt(n)))
    m = int(m)
    if m < 1:
        raise InvalidConfig(f"spacing window must be >= 1, got {m}")
    if n < 2 * m + 1:
        raise InvalidConfig(f"need N >= 2m + 1, got N={n}, m={m}")
    xs = np.sort(x)
    if xs[0] == xs[-1]:
        raise DegenerateInput("constant sample has no spacing structure")
    idx = np.arange(n)
    upper = xs[np.minimum(idx + m, n - 1)]
    lower = xs[np.maximum(idx - m, 0)]
    gaps = upper - lower
    if np.any(gaps <= 0):
        raise DegenerateInput(
            "zero m-spacings (heavily tied sample); spacing estimation assumes "
            "continuous data"
        )
    value = float(np.mean(np.log(n / (2.0 * m) * gaps)))
    return EntropyEstimate(value, "vasicek", {"m": m, "n": n})


def entropy_knn(samples: SampleMatrix | np.ndarray, k: int = DEFAULT_KNN_K) -> EntropyEstimate:
    """Nearest-neighbor differential entropy under the max-norm.

    H = psi(N) - psi(k) + log(2^d) + (d/N) * sum_i log eps_i, where eps_i is
    the distance to the k-th nearest neighbor and 2^d the max-norm unit-ball
    volume. Duplicate rows are separated by tie-break jitter first.
    """
    arr = samples.data if isinstance(samples, SampleMatrix) else np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    n, d = arr.shape
    k = int(k)
    if not 1 <= k < n:
        raise InvalidConfig(f"need 1 <= k < N, got k={k}, N={n}")
    pts, jitter_record = ensure_distinct_rows(arr)
    index = NeighborIndex(pts, require_distinct=True)
    eps = index.kth_distances(k)
    value = float(digamma(n) - digamma(k) + d * np.log(2.0) + d * np.mean(np.log(eps)))
    prep = (jitter_record,) if jitter_record else ()
    return EntropyEstimate(value, "knn_kl", {"k": k, "n": n, "d": d, "norm": "chebyshev"},
                           preprocessing=prep)
