"""Mutual information and conditional mutual information.

Plugin MI for discrete joints; the Kraskov-style nearest-neighbor estimator
(algorithm 1, strict marginal counts at the joint k-th neighbor radius) for
continuous data, plus its conditional extension. These are measurement
estimators only; no variational bound ever hides behind this API.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .data import JointTable, SampleMatrix, ensure_distinct_rows
from .errors import DimensionalityWarning, InvalidConfig
from .knn import NeighborIndex

DEFAULT_K = 4
#: above this combined dimension, neighbor statistics are dominated by
#: the curse of dimensionality; we warn and proceed
DIMENSION_WARN_THRESHOLD = 20


@dataclass(frozen=True)
class MiEstimate:
    """MI value with the estimator identity pinned to it.

    role is always "measurement": this toolkit quantifies information, it
    does not train bounds.
    """

    value: float
    estimator_id: str
    hyperparams: dict
    role: str = "measurement"
    unit: str = "nats"
    ci: object | None = None
    significance: object | None = None
    preprocessing: tuple[dict, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "estimator_id": self.estimator_id,
            "hyperparams": dict(self.hyperparams),
            "role": self.role,
            "unit": self.unit,
            "ci": self.ci.to_dict() if self.ci is not None else None,
            "significance": self.significance.to_dict() if self.significance is not None else None,
            "preprocessing": [dict(p) for p in self.preprocessing],
            "notes": list(self.notes),
        }


def as_array(x: SampleMatrix | np.ndarray, name: str = "input") -> np.ndarray:
    arr = x.data if isinstance(x, SampleMatrix) else np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidConfig(f"{name} must be 1-d or 2-d")
    if not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name} contains NaN or Inf")
    return arr


def mi_plugin(joint: JointTable) -> MiEstimate:
    """sum p(x,y) log[p(x,y) / (p(x) p(y))] from a discrete joint."""
    if joint.probs.ndim != 2:
        raise InvalidConfig("plugin MI needs a 2-axis joint")
    p = joint.probs
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    outer = np.outer(px, py)
    mask = p > 0
    value = float(np.sum(p[mask] * np.log(p[mask] / outer[mask])))
    return MiEstimate(value, "plugin", {"shape": list(p.shape)})


def ksg_mi_value(k: int, n: int, n_x: np.ndarray, n_y: np.ndarray) -> float:
    """Kraskov algorithm-1 combination of strict marginal counts."""
    return float(digamma(k) + digamma(n) - np.mean(digamma(n_x + 1.0) + digamma(n_y + 1.0)))


def ksg_cmi_value(k: int, n_xz: np.ndarray, n_yz: np.ndarray, n_z: np.ndarray) -> float:
    """Conditional variant: psi(k) - <psi(n_xz+1) + psi(n_yz+1) - psi(n_z+1)>."""
    return float(digamma(k) - np.mean(digamma(n_xz + 1.0) + digamma(n_yz + 1.0) - digamma(n_z + 1.0)))


def _dimension_note(d_total: int) -> tuple[str, ...]:
    if d_total > DIMENSION_WARN_THRESHOLD:
        msg = (
            f"combined dimension {d_total} exceeds {DIMENSION_WARN_THRESHOLD}: neighbor "
            "statistics are unreliable here; reduce dimension (e.g. PCA projection) "
            "before estimating"
        )
        warnings.warn(msg, DimensionalityWarning, stacklevel=3)
        return (msg,)
    return ()


def mi_ksg(x: SampleMatrix | np.ndarray, y: SampleMatrix | np.ndarray, k: int = DEFAULT_K) -> MiEstimate:
    """Nearest-neighbor MI between two continuous blocks, in nats.

    Negative outputs (possible at small N) are reported as-is; clipping to
    zero would hide the estimator's bias.
    """
    xa = as_array(x, "x")
    ya = as_array(y, "y")
    if xa.shape[0] != ya.shape[0]:
        raise InvalidConfig(f"x and y must have equal N, got {xa.shape[0]} vs {ya.shape[0]}")
    n = xa.shape[0]
    k = int(k)
    if not 1 <= k < n:
        raise InvalidConfig(f"need 1 <= k < N, got k={k}, N={n}")
    notes = _dimension_note(xa.shape[1] + ya.shape[1])

    joint, jit = ensure_distinct_rows(np.column_stack([xa, ya]))
    xa, ya = joint[:, : xa.shape[1]], joint[:, xa.shape[1]:]
    eps = NeighborIndex(joint, require_distinct=True).kth_distances(k)
    n_x = NeighborIndex(xa).count_within_all(eps, strict=True)
    n_y = NeighborIndex(ya).count_within_all(eps, strict=True)
    value = ksg_mi_value(k, n, n_x, n_y)
    if value < 0:
        notes = notes + ("negative estimate retained: small-sample fluctuation, not clipped",)
    prep = (jit,) if jit else ()
    return MiEstimate(value, "ksg", {"k": k, "n": n, "dx": xa.shape[1], "dy": ya.shape[1],
                                     "algorithm": 1, "norm": "chebyshev"},
                      preprocessing=prep, notes=notes)


def cmi_ksg(x: SampleMatrix | np.ndarray, y: SampleMatrix | np.ndarray,
            z: SampleMatrix | np.ndarray, k: int = DEFAULT_K) -> MiEstimate:
    """Conditional MI I(x; y | z) by nearest-neighbor counts in the marginal
    spaces (x,z), (y,z) and (z) at the joint k-th neighbor radius."""
    xa = as_array(x, "x")
    ya = as_array(y, "y")
    za = as_array(z, "z")
    if not (xa.shape[0] == ya.shape[0] == za.shape[0]):
        raise InvalidConfig("x, y, z must have equal N")
    n = xa.shape[0]
    k = int(k)
    if not 1 <= k < n:
        raise InvalidConfig(f"need 1 <= k < N, got k={k}, N={n}")
    notes = _dimension_note(xa.shape[1] + ya.shape[1] + za.shape[1])

    joint, jit = ensure_distinct_rows(np.column_stack([xa, ya, za]))
    dx, dy = xa.shape[1], ya.shape[1]
    xa, ya, za = joint[:, :dx], joint[:, dx:dx + dy], joint[:, dx + dy:]
    eps = NeighborIndex(joint, require_distinct=True).kth_distances(k)
    n_xz = NeighborIndex(np.column_stack([xa, za])).count_within_all(eps, strict=True)
    n_yz = NeighborIndex(np.column_stack([ya, za])).count_within_all(eps, strict=True)
    n_z = NeighborIndex(za).count_within_all(eps, strict=True)
    value = ksg_cmi_value(k, n_xz, n_yz, n_z)
    if value < 0:
        notes = notes + ("negative estimate retained: small-sample fluctuation, not clipped",)
    prep = (jit,) if jit else ()
    return MiEstimate(value, "ksg", {"k": k, "n": n, "dx": dx, "dy": dy, "dz": za.shape[1],
                                     "algorithm": 1, "conditional": True, "norm": "chebyshev"},
                      preprocessing=prep, notes=notes)


def mi_gaussian_oracle(rho: float) -> float:
    """Exact MI of a bivariate Gaussian with correlation rho: -0.5 log(1 - rho^2)."""
    rho = float(rho)
    if not abs(rho) < 1:
        raise InvalidConfig(f"need |rho| < 1, got {rho}")
    return -0.5 * float(np.log(1.0 - rho * rho))
