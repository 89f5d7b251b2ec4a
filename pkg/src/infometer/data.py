"""Shared data substrate: validated sample matrices, discrete series,
probability tables, discretization, rank transform, and the stationarity
screen.

Conventions baked in here:
  * all log-based quantities downstream are in nats unless a function says
    otherwise; unit conversion is a display concern,
  * missing values are rejected, never imputed,
  * every preprocessing step returns a record suitable for the reporting
    manifest.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateInput, InsufficientData, InvalidConfig
from .rng import content_seed

#: additive tie-break jitter, as a fraction of the column standard deviation
JITTER_SCALE = 1e-10

_PROB_TOL = 1e-12


def _validate_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{what} contains NaN or Inf; missing values are rejected, not imputed")


@dataclass(frozen=True)
class SampleMatrix:
    """N observations x d real dimensions, optionally time-ordered.

    Immutable after construction; the array is copied and write-protected.
    """

    data: np.ndarray
    column_names: tuple[str, ...] | None = None
    is_time_ordered: bool = False

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise InvalidConfig(f"sample matrix must be 2-d, got ndim={arr.ndim}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise InvalidConfig(f"need N >= 1 and d >= 1, got shape {arr.shape}")
        _validate_finite(arr, "sample matrix")
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != d:
                raise InvalidConfig(f"{len(names)} column names for {d} columns")
            object.__setattr__(self, "column_names", names)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def column(self, key: int | str) -> np.ndarray:
        """One column as a 1-d array; accepts an index or a header name."""
        if isinstance(key, str):
            if self.column_names is None or key not in self.column_names:
                raise InvalidConfig(f"unknown column {key!r}")
            key = self.column_names.index(key)
        return self.data[:, key]


@dataclass(frozen=True)
class DiscreteSeries:
    """Integer symbol sequence over the alphabet {0, ..., K-1}."""

    symbols: np.ndarray
    alphabet_size: int
    record: dict | None = None

    def __post_init__(self):
        sym = np.array(self.symbols, copy=True)
        if sym.ndim != 1:
            raise InvalidConfig("discrete series must be 1-d")
        if not np.issubdtype(sym.dtype, np.integer):
            if not np.all(sym == np.floor(sym)):
                raise InvalidConfig("symbols must be integers")
            sym = sym.astype(np.int64)
        k = int(self.alphabet_size)
        if k < 1:
            raise InvalidConfig(f"alphabet size must be >= 1, got {k}")
        if sym.size and (sym.min() < 0 or sym.max() >= k):
            raise InvalidConfig(f"symbols must lie in [0, {k}), got range [{sym.min()}, {sym.max()}]")
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "alphabet_size", k)

    @property
    def n(self) -> int:
        return self.symbols.size

    def frequencies(self) -> np.ndarray:
        return np.bincount(self.symbols, minlength=self.alphabet_size) / max(self.n, 1)


@dataclass(frozen=True)
class ProbTable:
    """Normalized distribution over a finite alphabet (entries sum to 1)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64, copy=True)
        if p.ndim != 1:
            raise InvalidConfig("probability table must be 1-d; use JointTable for joints")
        _validate_finite(p, "probability table")
        if np.any(p < 0):
            raise InvalidConfig("probabilities must be >= 0")
        if abs(p.sum() - 1.0) > _PROB_TOL:
            raise InvalidConfig(f"probabilities must sum to 1 within {_PROB_TOL}, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def k(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class JointTable:
    """Joint distribution over 2 (or 3) finite axes; marginals are ProbTables."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64, copy=True)
        if p.ndim not in (2, 3):
            raise InvalidConfig(f"joint table must have 2 or 3 axes, got {p.ndim}")
        _validate_finite(p, "joint table")
        if np.any(p < 0):
            raise InvalidConfig("probabilities must be >= 0")
        if abs(p.sum() - 1.0) > _PROB_TOL:
            raise InvalidConfig(f"joint must sum to 1 within {_PROB_TOL}, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def marginal(self, axis: int) -> ProbTable:
        axes = tuple(a for a in range(self.probs.ndim) if a != axis)
        m = self.probs.sum(axis=axes)
        return ProbTable(m / m.sum())


def joint_from_series(x: DiscreteSeries, y: DiscreteSeries) -> JointTable:
    """Empirical joint of two aligned discrete series."""
    if x.n != y.n:
        raise InvalidConfig(f"length mismatch: {x.n} vs {y.n}")
    if x.n == 0:
        raise InsufficientData("empty series")
    counts = np.zeros((x.alphabet_size, y.alphabet_size))
    np.add.at(counts, (x.symbols, y.symbols), 1.0)
    return JointTable(counts / counts.sum())


# ---------------------------------------------------------------------------
# preprocessing operations
# ---------------------------------------------------------------------------

def discretize(values: np.ndarray | Sequence[float], bins: int, rule: str = "equal_width") -> DiscreteSeries:
    """Bin a real column into symbols 0..bins-1.

    rule "equal_width": uniform bin edges over [min, max], top bin closed on
    the right. rule "equal_frequency": rank-based assignment, so bin counts
    differ by at most one even under ties.

    The applied edges land in the result's ``record`` so a manifest can state
    exactly how the column was discretized.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    _validate_finite(v, "column")
    b = int(bins)
    if b < 2:
        raise InvalidConfig(f"need at least 2 bins, got {b}")
    if b > v.size:
        raise InvalidConfig(f"more bins ({b}) than observations ({v.size})")
    if np.unique(v).size < 2:
        raise DegenerateInput("constant column cannot be discretized")

    if rule == "equal_width":
        edges = np.linspace(v.min(), v.max(), b + 1)
        sym = np.digitize(v, edges[1:-1], right=False)
    elif rule == "equal_frequency":
        order = np.argsort(v, kind="stable")
        ranks = np.empty(v.size, dtype=np.int64)
        ranks[order] = np.arange(v.size)
        sym = (ranks * b) // v.size
        edges = np.quantile(v, np.linspace(0, 1, b + 1))
    else:
        raise InvalidConfig(f"unknown discretization rule {rule!r}")

    record = {"step": "discretize", "rule": rule, "bins": b, "edges": [float(e) for e in edges]}
    return DiscreteSeries(sym.astype(np.int64), b, record=record)


def rank_transform(samples: SampleMatrix) -> SampleMatrix:
    """Map every column to (rank - 0.5) / N, giving uniform marginals on (0,1).

    Ties break by stable input order, so the output never has duplicates and
    a second application reproduces the same ranks.
    """
    if samples.n < 2:
        raise InsufficientData("rank transform needs N >= 2")
    out = np.empty_like(samples.data)
    n = samples.n
    for j in range(samples.d):
        order = np.argsort(samples.data[:, j], kind="stable")
        ranks = np.empty(n, dtype=np.float64)
        ranks[order] = np.arange(1, n + 1)
        out[:, j] = (ranks - 0.5) / n
    return SampleMatrix(out, samples.column_names, samples.is_time_ordered)


def standardize(samples: SampleMatrix) -> tuple[SampleMatrix, dict]:
    """Zero-mean / unit-variance columns plus the manifest record.

    Constant columns are left at zero offset scale 1 rather than dividing
    by zero.
    """
    mu = samples.data.mean(axis=0)
    sd = samples.data.std(axis=0)
    sd_safe = np.where(sd > 0, sd, 1.0)
    out = (samples.data - mu) / sd_safe
    record = {
        "step": "standardize",
        "mean": [float(m) for m in mu],
        "std": [float(s) for s in sd],
    }
    return SampleMatrix(out, samples.column_names, samples.is_time_ordered), record


def ensure_distinct_rows(arr: np.ndarray) -> tuple[np.ndarray, dict | None]:
    """Jitter columns just enough to separate duplicate rows.

    Nearest-neighbor statistics assume continuous densities, so exactly
    coincident points (common after bootstrap resampling) are displaced by
    additive noise of magnitude JITTER_SCALE x column std. The noise seed is
    derived from the column content: the same data always gets the same
    jitter, wherever it appears.
    """
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    uniq = np.unique(arr, axis=0)
    if uniq.shape[0] == arr.shape[0]:
        return arr, None
    out = arr.copy()
    for j in range(arr.shape[1]):
        col = arr[:, j]
        sd = col.std()
        if sd == 0:
            continue
        rng = np.random.default_rng(content_seed(col))
        out[:, j] = col + rng.standard_normal(col.size) * (JITTER_SCALE * sd)
    if np.unique(out, axis=0).shape[0] != out.shape[0]:
        raise DegenerateInput(
            "duplicate points persist after tie-break jitter "
            "(all-constant rows cannot be separated)"
        )
    return out, {"step": "jitter", "scale": JITTER_SCALE, "reason": "duplicate rows"}


@dataclass(frozen=True)
class StationarityResult:
    """Advisory split-half drift screen; never blocks a computation."""

    ok: bool
    messages: tuple[str, ...]
    mean_shift_sd: float
    variance_ratio: float

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "messages": list(self.messages),
            "mean_shift_sd": self.mean_shift_sd,
            "variance_ratio": self.variance_ratio,
        }


def check_stationarity(series: np.ndarray | Sequence[float]) -> StationarityResult:
    """Split-half mean/variance drift screen.

    Warns when the half means differ by more than 0.5 pooled standard
    deviations or the variance ratio leaves [0.5, 2.0]. Deliberately crude:
    it flags gross trends and variance breaks, nothing subtler.
    """
    v = np.asarray(series, dtype=np.float64).ravel()
    _validate_finite(v, "series")
    if v.size < 20:
        raise InsufficientData(f"stationarity screen needs N >= 20, got {v.size}")
    half = v.size // 2
    a, b = v[:half], v[half:]
    pooled_sd = np.sqrt(0.5 * (a.var() + b.var()))
    mean_shift = abs(a.mean() - b.mean()) / pooled_sd if pooled_sd > 0 else np.inf
    var_ratio = b.var() / a.var() if a.var() > 0 else np.inf
    messages = []
    if mean_shift > 0.5:
        messages.append(f"mean drift: halves differ by {mean_shift:.2f} pooled standard deviations")
    if not 0.5 <= var_ratio <= 2.0:
        messages.append(f"variance ratio between halves is {var_ratio:.2f}, outside [0.5, 2.0]")
    return StationarityResult(
        ok=not messages,
        messages=tuple(messages),
        mean_shift_sd=float(mean_shift),
        variance_ratio=float(var_ratio),
    )


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def read_csv(path_or_text: str, time_ordered: bool = False) -> SampleMatrix:
    """Load a CSV with a header row, one observation (or time step) per row."""
    if _looks_like_path(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = path_or_text
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if len(rows) < 2:
        raise InsufficientData("CSV needs a header row and at least one data row")
    header = tuple(h.strip() for h in rows[0])
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise InvalidConfig(f"non-numeric CSV cell: {exc}") from exc
    return SampleMatrix(data, header, is_time_ordered=time_ordered)


def _looks_like_path(s: str) -> bool:
    import os

    return os.path.exists(s)


def read_json(path_or_text: str, time_ordered: bool = False) -> SampleMatrix:
    """Load the {"columns": [...], "data": [[...]]} container."""
    if _looks_like_path(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = json.loads(path_or_text)
    if not isinstance(obj, dict) or "data" not in obj:
        raise InvalidConfig('JSON container must carry "columns" and "data"')
    cols = obj.get("columns")
    data = np.array(obj["data"], dtype=np.float64)
    names = tuple(str(c) for c in cols) if cols is not None else None
    return SampleMatrix(data, names, is_time_ordered=time_ordered)


def load_table(path: str, time_ordered: bool = False) -> SampleMatrix:
    """Dispatch on extension: .json containers, anything else as CSV."""
    if str(path).lower().endswith(".json"):
        return read_json(path, time_ordered)
    return read_csv(path, time_ordered)
