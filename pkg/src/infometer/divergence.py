"""KL divergence, cross-entropy, and Jensen-Shannon divergence for discrete
distributions.

KL is directional and blows up on support violations; both facts are kept in
the caller's face. Smoothing is opt-in and recorded, never silently applied.
Continuous inputs must be discretized upstream (and the result treated as
discretization-dependent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ProbTable
from .errors import DisjointSupport, InvalidConfig


@dataclass(frozen=True)
class Smoothing:
    """How near-zero entries of q are handled before dividing by them.

    kind "additive": q <- (q + value) / (1 + K * value).
    kind "clip": q <- max(q, value), renormalized.
    """

    kind: str
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "additive", "clip"):
            raise InvalidConfig(f"unknown smoothing kind {self.kind!r}")
        if self.kind != "none" and self.value <= 0:
            raise InvalidConfig(f"{self.kind} smoothing needs a positive value")

    def apply(self, q: np.ndarray) -> np.ndarray:
        if self.kind == "additive":
            out = q + self.value
        elif self.kind == "clip":
            out = np.maximum(q, self.value)
        else:
            return q
        return out / out.sum()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}


NO_SMOOTHING = Smoothing("none")


@dataclass(frozen=True)
class DivergenceResult:
    value: float
    direction: str
    smoothing: Smoothing
    unit: str = "nats"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "direction": self.direction,
            "smoothing": self.smoothing.to_dict(),
            "unit": self.unit,
        }


def _check_pair(p: ProbTable, q: ProbTable) -> None:
    if p.k != q.k:
        raise InvalidConfig(f"alphabet mismatch: {p.k} vs {q.k}")


def _prepared_q(p: np.ndarray, q: np.ndarray, smoothing: Smoothing) -> np.ndarray:
    qs = smoothing.apply(q)
    if np.any((p > 0) & (qs == 0)):
        raise DisjointSupport(
            "q has zero mass where p > 0; the divergence is undefined or infinite. "
            "Use additive/clip smoothing, or prefer the Jensen-Shannon divergence "
            "for disjoint-support comparisons."
        )
    return qs


def kl_discrete(p: ProbTable, q: ProbTable, smoothing: Smoothing = NO_SMOOTHING) -> DivergenceResult:
    """D(p || q) = sum p log(p/q) in nats, directional by argument order."""
    _check_pair(p, q)
    qs = _prepared_q(p.probs, q.probs, smoothing)
    mask = p.probs > 0
    value = float(np.sum(p.probs[mask] * np.log(p.probs[mask] / qs[mask])))
    return DivergenceResult(value, "forward p||q", smoothing)


def cross_entropy(p: ProbTable, q: ProbTable, smoothing: Smoothing = NO_SMOOTHING) -> float:
    """H(p, q) = -sum p log q; equals H(p) + D(p || q)."""
    _check_pair(p, q)
    qs = _prepared_q(p.probs, q.probs, smoothing)
    mask = p.probs > 0
    return float(-np.sum(p.probs[mask] * np.log(qs[mask])))


def jensen_shannon(p: ProbTable, q: ProbTable) -> float:
    """Symmetrized, always-finite divergence, bounded by log 2."""
    _check_pair(p, q)
    m = 0.5 * (p.probs + q.probs)

    def _kl_to_mix(a: np.ndarray) -> float:
        mask = a > 0
        return float(np.sum(a[mask] * np.log(a[mask] / m[mask])))

    return 0.5 * _kl_to_mix(p.probs) + 0.5 * _kl_to_mix(q.probs)
