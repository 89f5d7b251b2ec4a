"""Seeded ground-truth generators: coupled autoregressive pairs, planted
networks, chains, and small binary-node systems with known causal structure.

These are the systems the test suite measures against closed forms, and the
CLI exposes them so any reported number can be regenerated offline from a
seed.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .causal import SystemSplit, Tpm
from .data import DiscreteSeries
from .errors import InvalidConfig
from .rng import as_seed

_BURN_IN = 100


def _ar1_from_noise(noise: np.ndarray, phi: float) -> np.ndarray:
    return lfilter([1.0], [1.0, -phi], noise)


def white_noise(length: int, n_streams: int = 1, seed=None) -> np.ndarray:
    """iid standard normal streams, shape (length, n_streams)."""
    rng = as_seed(seed).substream(0)
    return rng.standard_normal((int(length), int(n_streams)))


def ar1(length: int, phi: float = 0.9, seed=None) -> np.ndarray:
    """Stationary AR(1) with unit innovations, burn-in discarded."""
    rng = as_seed(seed).substream(0)
    noise = rng.standard_normal(int(length) + _BURN_IN)
    return _ar1_from_noise(noise, float(phi))[_BURN_IN:]


def coupled_ar(length: int, coupling: float = 0.5, delay: int = 1, seed=None) -> dict:
    """Source-drives-target pair:

        y[t] = 0.5 y[t-1] + eta[t]
        x[t] = 0.5 x[t-1] + coupling * y[t-delay] + eps[t]

    with unit-variance innovations. Returns {"source": y, "target": x}.
    """
    n = int(length)
    d = int(delay)
    if d < 1:
        raise InvalidConfig("delay must be >= 1")
    rng = as_seed(seed).substream(0)
    total = n + _BURN_IN
    eta = rng.standard_normal(total)
    eps = rng.standard_normal(total)
    y = _ar1_from_noise(eta, 0.5)
    y_lagged = np.concatenate([np.zeros(d), y[:-d]])
    x = _ar1_from_noise(coupling * y_lagged + eps, 0.5)
    return {"source": y[_BURN_IN:], "target": x[_BURN_IN:]}


def planted_network(length: int = 500, n_streams: int = 5, edge: tuple[int, int] = (0, 1),
                    coupling: float = 0.8, seed=None) -> np.ndarray:
    """Independent AR(1) streams except one planted directed coupling.

    Stream edge[1] receives coupling * stream edge[0] at lag 1. Returns a
    (length, n_streams) matrix.
    """
    n = int(length)
    m = int(n_streams)
    src, dst = edge
    if not (0 <= src < m and 0 <= dst < m and src != dst):
        raise InvalidConfig(f"bad edge {edge} for {m} streams")
    rng = as_seed(seed).substream(0)
    total = n + _BURN_IN
    noise = rng.standard_normal((total, m))
    out = np.empty((total, m))
    for s in range(m):
        if s == dst:
            continue
        out[:, s] = _ar1_from_noise(noise[:, s], 0.5)
    driver = np.concatenate([[0.0], out[:-1, src]])
    out[:, dst] = _ar1_from_noise(coupling * driver + noise[:, dst], 0.5)
    return out[_BURN_IN:]


def chain(length: int = 2000, coupling: float = 0.8, seed=None) -> np.ndarray:
    """Relay A -> B -> C with lag-1 couplings; no direct A -> C link.

    Returns (length, 3) with columns A, B, C.
    """
    n = int(length)
    rng = as_seed(seed).substream(0)
    total = n + _BURN_IN
    na, nb, nc = rng.standard_normal((3, total))
    a = _ar1_from_noise(na, 0.5)
    a_lag = np.concatenate([[0.0], a[:-1]])
    b = _ar1_from_noise(coupling * a_lag + nb, 0.5)
    b_lag = np.concatenate([[0.0], b[:-1]])
    c = _ar1_from_noise(coupling * b_lag + nc, 0.5)
    return np.column_stack([a, b, c])[_BURN_IN:]


def alternating_binary(length: int, start: int = 0) -> DiscreteSeries:
    """Deterministic 0101... series (one noiseless bit of self-memory)."""
    sym = (np.arange(int(length)) + int(start)) % 2
    return DiscreteSeries(sym, 2)


def uniform_discrete(length: int, alphabet: int = 4, seed=None) -> DiscreteSeries:
    rng = as_seed(seed).substream(0)
    return DiscreteSeries(rng.integers(0, int(alphabet), int(length)), int(alphabet))


# ---------------------------------------------------------------------------
# binary-node systems with known causal structure
# ---------------------------------------------------------------------------

def _deterministic_tpm(n: int, step) -> Tpm:
    size = 2 ** n
    m = np.zeros((size, size))
    for s in range(size):
        bits = [(s >> i) & 1 for i in range(n)]
        nxt = step(bits)
        idx = sum(b << i for i, b in enumerate(nxt))
        m[s, idx] = 1.0
    return Tpm(n, m)


def copy_swap_system() -> Tpm:
    """Two nodes copying each other every step (maximally integrated pair)."""
    return _deterministic_tpm(2, lambda b: [b[1], b[0]])


def disconnected_system() -> Tpm:
    """Two self-copying nodes with no interaction (fully reducible)."""
    return _deterministic_tpm(2, lambda b: [b[0], b[1]])


def identity_tpm(n: int) -> Tpm:
    return Tpm(n, np.eye(2 ** n))


def self_copy_system() -> tuple[Tpm, SystemSplit]:
    """Node 0 copies itself; node 1 (the environment) blinks independently.

    The system's next state is fully its own doing: interventional autonomy
    is exactly 1 bit.
    """
    tpm = _deterministic_tpm(2, lambda b: [b[0], 1 - b[1]])
    return tpm, SystemSplit((0,), (1,), m=1)


def self_copy_trajectories(length: int = 401) -> tuple[list, list]:
    """Two trajectories covering both system start states.

    Returns (v_trajectories, e_trajectories) for the observational autonomy
    estimator; pooled, they realize the uniform start exactly. An odd length
    keeps the alternating environment balanced across the windows, so the
    pooled joint is exactly the ideal one.
    """
    n = int(length)
    t = np.arange(n)
    e0 = DiscreteSeries(t % 2, 2)
    e1 = DiscreteSeries((t + 1) % 2, 2)
    v0 = DiscreteSeries(np.zeros(n, dtype=np.int64), 2)
    v1 = DiscreteSeries(np.ones(n, dtype=np.int64), 2)
    return [(v0,), (v1,)], [(e0,), (e1,)]


def hidden_phase_system() -> tuple[Tpm, SystemSplit]:
    """A reactive system that looks self-determined from the outside.

    Nodes: V (bit 0), E1 (bit 1), E2 (bit 2). The environment pair (E1, E2)
    runs a deterministic 4-phase counter (E1' = E2, E2' = NOT E1); V mirrors
    a function of the environment's full state (V' = E1 XOR E2) and has no
    influence on anything, including itself. Interventional autonomy is 0.
    Observed against E1 alone, V predicts itself perfectly one step ahead
    (the hidden phase leaks through V's own past): observational autonomy is
    1 bit. The gap is pure environmental correlation.
    """
    tpm = _deterministic_tpm(3, lambda b: [b[1] ^ b[2], b[2], 1 - b[1]])
    return tpm, SystemSplit((0,), (1, 2), m=1)


def hidden_phase_trajectory(length: int = 400, seed=None) -> dict:
    """One run of the hidden-phase system from a random initial phase.

    Returns DiscreteSeries for "v", "e1" (the visible environment node), and
    "e2" (the hidden phase bit).
    """
    rng = as_seed(seed).substream(0)
    n = int(length)
    v = np.empty(n, dtype=np.int64)
    e1 = np.empty(n, dtype=np.int64)
    e2 = np.empty(n, dtype=np.int64)
    v[0] = rng.integers(0, 2)
    e1[0] = rng.integers(0, 2)
    e2[0] = rng.integers(0, 2)
    for t in range(1, n):
        v[t] = e1[t - 1] ^ e2[t - 1]
        e1[t] = e2[t - 1]
        e2[t] = 1 - e1[t - 1]
    return {"v": DiscreteSeries(v, 2), "e1": DiscreteSeries(e1, 2),
            "e2": DiscreteSeries(e2, 2)}


def degenerate_macro_system() -> tuple[Tpm, np.ndarray]:
    """Four micro states where coarse-graining gains causal power.

    Three states mix uniformly among themselves (pure degeneracy); the
    fourth is a fixed point. Grouped 3-and-1, the macro description is a
    deterministic 2-state system with a full bit of effective information,
    more than the noisy micro description carries.
    """
    third = 1.0 / 3.0
    m = np.array([
        [third, third, third, 0.0],
        [third, third, third, 0.0],
        [third, third, third, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    grain = np.array([0, 0, 0, 1])
    return Tpm(2, m), grain
