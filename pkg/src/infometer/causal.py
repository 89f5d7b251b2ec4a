"""System-level causal measures on small binary networks: effective
information, bipartition-based integration (Phi), causal emergence across a
coarse-graining, and autonomy.

Everything operates on a full transition probability matrix (TPM) over the
2^n joint states of n binary nodes, with node i stored as bit i of the state
index. These are interventional quantities: the "do" distribution is always
the uniform (maximum-entropy) state mix, and none of them can be estimated
from trajectories alone. Values are in bits throughout this module, because
the natural ceiling is the node count. Everything is deterministic: no RNG.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import DiscreteSeries
from .errors import InsufficientData, InvalidConfig, SystemTooLarge

#: hard cap: 2^12 x 2^12 transition matrices mark the desk-scale frontier
NODE_CAP = 12
#: beyond this, exact computation is still possible but costly
COMFORT_CAP = 8

_ROW_TOL = 1e-12


class CostWarning(UserWarning):
    """Exact computation will be slow at this system size."""


@dataclass(frozen=True)
class Tpm:
    """Row-stochastic 2^n x 2^n transition matrix over binary node states."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise InvalidConfig("need at least one node")
        if n > NODE_CAP:
            raise SystemTooLarge(
                f"{n} nodes means a {2**n} x {2**n} matrix; the exact-computation "
                f"cap is {NODE_CAP} nodes"
            )
        if n > COMFORT_CAP:
            warnings.warn(
                f"{n} nodes: exact bipartition search is exponential; expect minutes",
                CostWarning, stacklevel=3,
            )
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        size = 2 ** n
        if m.shape != (size, size):
            raise InvalidConfig(f"expected a {size} x {size} matrix, got {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InvalidConfig("transition probabilities must be finite and >= 0")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > _ROW_TOL):
            raise InvalidConfig(f"every row must sum to 1 within {_ROW_TOL}")
        m.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "matrix", m)

    @property
    def n_states(self) -> int:
        return 2 ** self.n

    @classmethod
    def from_node_probs(cls, node_probs: np.ndarray) -> "Tpm":
        """Build the full joint TPM from per-node ON probabilities.

        node_probs is 2^n x n: entry (s, i) is P(node i ON at t+1 | state s),
        nodes conditionally independent given the current state.
        """
        p = np.asarray(node_probs, dtype=np.float64)
        if p.ndim != 2:
            raise InvalidConfig("state-by-node format must be 2-d")
        size, n = p.shape
        if size != 2 ** n:
            raise InvalidConfig(f"state-by-node shape {p.shape} is not 2^n x n")
        if np.any(p < 0) or np.any(p > 1):
            raise InvalidConfig("node probabilities must lie in [0, 1]")
        bits = _state_bits(n)  # 2^n x n
        on = p[:, None, :]
        full = np.prod(np.where(bits[None, :, :], on, 1.0 - on), axis=2)
        return cls(n, full)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "tpm": self.matrix.tolist()})


def _state_bits(n: int) -> np.ndarray:
    states = np.arange(2 ** n)
    return ((states[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)


def load_tpm(path_or_text: str) -> tuple[Tpm, dict | None]:
    """Parse TPM JSON; accepts the full 2^n x 2^n matrix under "tpm" or the
    2^n x n state-by-node form (auto-detected by shape, conversion recorded)."""
    import os

    if os.path.exists(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = json.loads(path_or_text)
    if not isinstance(obj, dict) or "n" not in obj or "tpm" not in obj:
        raise InvalidConfig('TPM JSON must carry "n" and "tpm"')
    n = int(obj["n"])
    m = np.asarray(obj["tpm"], dtype=np.float64)
    if m.shape == (2 ** n, 2 ** n):
        return Tpm(n, m), None
    if m.shape == (2 ** n, n):
        record = {"step": "tpm_conversion", "from": "state-by-node",
                  "assumption": "conditionally independent nodes"}
        return Tpm.from_node_probs(m), record
    raise InvalidConfig(f"tpm shape {m.shape} matches neither 2^n x 2^n nor 2^n x n for n={n}")


@dataclass(frozen=True)
class Bipartition:
    """A cut of the node set into two nonempty sides."""

    part_a: tuple[int, ...]
    part_b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(sorted(int(i) for i in self.part_a))
        b = tuple(sorted(int(i) for i in self.part_b))
        if not a or not b:
            raise InvalidConfig("both sides of a bipartition must be nonempty")
        if set(a) & set(b):
            raise InvalidConfig("bipartition sides overlap")
        object.__setattr__(self, "part_a", a)
        object.__setattr__(self, "part_b", b)

    def to_dict(self) -> dict:
        return {"part_a": list(self.part_a), "part_b": list(self.part_b)}


@dataclass(frozen=True)
class CoarseGraining:
    """Surjective map from micro states to macro states (label per state)."""

    groups: tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(x) for x in self.groups)
        labels = sorted(set(g))
        if labels != list(range(len(labels))):
            raise InvalidConfig("macro labels must be 0..G-1 with every label used")
        object.__setattr__(self, "groups", g)

    @property
    def n_macro(self) -> int:
        return len(set(self.groups))


@dataclass(frozen=True)
class SystemSplit:
    """System/environment node split with the conditioning history length."""

    v_nodes: tuple[int, ...]
    e_nodes: tuple[int, ...]
    m: int = 1

    def __post_init__(self):
        v = tuple(sorted(int(i) for i in self.v_nodes))
        e = tuple(sorted(int(i) for i in self.e_nodes))
        if not v or not e:
            raise InvalidConfig("both the system and the environment must be nonempty")
        if set(v) & set(e):
            raise InvalidConfig("system and environment nodes overlap")
        if self.m < 1:
            raise InvalidConfig("history length m must be >= 1")
        object.__setattr__(self, "v_nodes", v)
        object.__setattr__(self, "e_nodes", e)


def _kl_rows_bits(rows: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """KL(row || ref) in bits for each row; rows' support must lie in ref's."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log2(rows / ref), 0.0)
    return terms.sum(axis=1)


def effective_information(tpm: Tpm) -> float:
    """Average KL (bits) between each state's transition row and the
    uniform-intervention output distribution (the mean of all rows).

    Ranges from 0 (all rows identical) to n bits (rows are 2^n distinct
    deterministic states).
    """
    avg = tpm.matrix.mean(axis=0)
    return float(_kl_rows_bits(tpm.matrix, avg[None, :]).mean())


def _sub_index(n: int, nodes: tuple[int, ...]) -> np.ndarray:
    """Compressed state index of the given nodes for every full state."""
    states = np.arange(2 ** n)
    out = np.zeros(2 ** n, dtype=np.int64)
    for pos, node in enumerate(nodes):
        out |= ((states >> node) & 1) << pos
    return out


def _part_mechanism(tpm: Tpm, nodes: tuple[int, ...]) -> np.ndarray:
    """Mechanism of a node subset with everything else uniformized.

    P(part' = a' | part = a) averages the full rows over the complement's
    states and marginalizes the outputs onto the subset.
    """
    sub = _sub_index(tpm.n, nodes)
    size = 2 ** len(nodes)
    onehot = np.zeros((tpm.n_states, size))
    onehot[np.arange(tpm.n_states), sub] = 1.0
    out_marg = tpm.matrix @ onehot           # 2^n x 2^|part|
    collapsed = onehot.T @ out_marg          # 2^|part| x 2^|part|
    return collapsed / (tpm.n_states / size)


def partitioned_tpm(tpm: Tpm, cut: Bipartition) -> Tpm:
    """The cut system: each side keeps only its own-state dependence, with
    cross-cut inputs replaced by uniform noise; sides evolve independently."""
    nodes = set(range(tpm.n))
    if set(cut.part_a) | set(cut.part_b) != nodes:
        raise InvalidConfig("bipartition must cover all nodes")
    mech_a = _part_mechanism(tpm, cut.part_a)
    mech_b = _part_mechanism(tpm, cut.part_b)
    sub_a = _sub_index(tpm.n, cut.part_a)
    sub_b = _sub_index(tpm.n, cut.part_b)
    out = mech_a[sub_a[:, None], sub_a[None, :]] * mech_b[sub_b[:, None], sub_b[None, :]]
    return Tpm(tpm.n, out)


@dataclass(frozen=True)
class PhiResult:
    value: float
    mip: Bipartition
    per_cut: tuple[tuple[Bipartition, float], ...]
    variant: str = "ei-bipartition-v1"
    unit: str = "bits"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "mip": self.mip.to_dict(),
            "variant": self.variant,
            "unit": self.unit,
            "per_cut": [{"cut": c.to_dict(), "phi": v} for c, v in self.per_cut],
        }


def _all_bipartitions(n: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 unordered bipartitions; part_a always contains node 0."""
    cuts = []
    rest = list(range(1, n))
    for mask in range(2 ** (n - 1) - 1):
        a = [0] + [rest[i] for i in range(n - 1) if (mask >> i) & 1]
        b = [node for node in range(n) if node not in a]
        cuts.append(Bipartition(tuple(a), tuple(b)))
    return cuts


def phi_for_cut(tpm: Tpm, cut: Bipartition) -> float:
    """Average KL (bits) between whole and cut transition rows."""
    cut_rows = partitioned_tpm(tpm, cut).matrix
    return float(_kl_rows_bits(tpm.matrix, cut_rows).mean())


def phi(tpm: Tpm, workers: int = 1) -> PhiResult:
    """Integration: minimum whole-vs-cut divergence over all bipartitions.

    Exhaustive search over 2^(n-1) - 1 cuts (this is the exponential wall;
    the node cap keeps it finite). The variant label travels with the value
    because different integration measures order systems differently. Ties
    resolve to the lexicographically smallest part_a.
    """
    if tpm.n < 2:
        raise InvalidConfig("integration needs at least 2 nodes")
    cuts = _all_bipartitions(tpm.n)
    from .rng import parallel_map

    values = parallel_map(lambda i: phi_for_cut(tpm, cuts[i]), len(cuts), workers)
    best = 0
    for i in range(1, len(cuts)):
        if values[i] < values[best] or (values[i] == values[best]
                                        and cuts[i].part_a < cuts[best].part_a):
            best = i
    return PhiResult(float(values[best]), cuts[best], tuple(zip(cuts, map(float, values))))


@dataclass(frozen=True)
class EmergenceResult:
    ei_micro: float
    ei_macro: float
    emergent: bool
    grain: CoarseGraining
    macro_tpm: np.ndarray
    unit: str = "bits"

    def to_dict(self) -> dict:
        return {
            "ei_micro": self.ei_micro,
            "ei_macro": self.ei_macro,
            "emergent": self.emergent,
            "grain": list(self.grain.groups),
            "macro_tpm": self.macro_tpm.tolist(),
            "unit": self.unit,
        }


def causal_emergence(tpm_micro: Tpm, grain: CoarseGraining) -> EmergenceResult:
    """Does the coarse-grained description carry more effective information?

    The macro TPM averages the micro rows inside each macro group (uniform
    intervention within the group) and sums outgoing mass per macro column.
    The grain travels with the verdict: emergence is a property of a
    (system, grouping) pair, not of the system alone.
    """
    if len(grain.groups) != tpm_micro.n_states:
        raise InvalidConfig(
            f"grain labels {len(grain.groups)} micro states, TPM has {tpm_micro.n_states}"
        )
    g = grain.n_macro
    if g < 2:
        raise InvalidConfig("need at least 2 macro states")
    labels = np.asarray(grain.groups)
    onehot = np.zeros((tpm_micro.n_states, g))
    onehot[np.arange(tpm_micro.n_states), labels] = 1.0
    counts = onehot.sum(axis=0)
    macro = (onehot.T @ tpm_micro.matrix @ onehot) / counts[:, None]
    ei_micro = effective_information(tpm_micro)
    avg = macro.mean(axis=0)
    ei_macro = float(_kl_rows_bits(macro, avg[None, :]).mean())
    return EmergenceResult(ei_micro, ei_macro, bool(ei_macro > ei_micro + 1e-9),
                           grain, macro)


# ---------------------------------------------------------------------------
# autonomy
# ---------------------------------------------------------------------------

def _as_trajectories(series) -> list[tuple[DiscreteSeries, ...]]:
    """Normalize input to a list of per-trajectory tuples of node series."""
    if isinstance(series, DiscreteSeries):
        return [(series,)]
    series = list(series)
    if series and isinstance(series[0], DiscreteSeries):
        return [tuple(series)]
    out = []
    for traj in series:
        out.append((traj,) if isinstance(traj, DiscreteSeries) else tuple(traj))
    return out


def _encode_joint(cols: Sequence[DiscreteSeries]) -> tuple[np.ndarray, int]:
    """Pack aligned node series into one symbol stream."""
    n = cols[0].n
    if any(c.n != n for c in cols):
        raise InvalidConfig("node series must have equal length")
    code = np.zeros(n, dtype=np.int64)
    radix = 1
    for c in cols:
        code += c.symbols * radix
        radix *= c.alphabet_size
    return code, radix


def _entropy_of_rows(rows: np.ndarray) -> float:
    _, counts = np.unique(rows, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def autonomy_observational(v_series, e_series, m: int = 1) -> float:
    """How much the system's own previous state sharpens prediction of its
    next state, beyond m steps of environment history (bits).

    Plugin conditional-entropy difference from pooled empirical counts.
    Accepts one trajectory (a DiscreteSeries or tuple of node series) or a
    list of trajectories; windows never straddle trajectory seams. Purely
    observational: environmental correlations routed through hidden state
    can masquerade as self-determination, which is exactly what comparing
    against the interventional variant exposes.
    """
    m = int(m)
    if m < 1:
        raise InvalidConfig("history length m must be >= 1")
    v_trajs = _as_trajectories(v_series)
    e_trajs = _as_trajectories(e_series)
    if len(v_trajs) != len(e_trajs):
        raise InvalidConfig("system and environment trajectory counts differ")
    windows = []
    for v_cols, e_cols in zip(v_trajs, e_trajs):
        v_code, _ = _encode_joint(v_cols)
        e_code, _ = _encode_joint(e_cols)
        if v_code.size != e_code.size:
            raise InvalidConfig("system and environment series must have equal length")
        n = v_code.size
        if n <= m:
            continue
        t = np.arange(m, n)
        cols = [v_code[t], v_code[t - 1]]
        cols += [e_code[t - lag] for lag in range(1, m + 1)]
        windows.append(np.column_stack(cols))
    if not windows or sum(w.shape[0] for w in windows) < 10:
        raise InsufficientData("need at least 10 pooled windows of length m + 1")
    rows = np.vstack(windows)
    v_now, v_prev, e_past = rows[:, :1], rows[:, 1:2], rows[:, 2:]
    h_given_e = _entropy_of_rows(np.column_stack([v_now, e_past])) - _entropy_of_rows(e_past)
    h_given_ve = (_entropy_of_rows(rows)
                  - _entropy_of_rows(np.column_stack([v_prev, e_past])))
    return h_given_e - h_given_ve


def system_mechanism(tpm: Tpm, split: SystemSplit) -> Tpm:
    """The system-to-system mechanism with environment inputs uniformized."""
    nodes = set(range(tpm.n))
    if set(split.v_nodes) | set(split.e_nodes) != nodes:
        raise InvalidConfig("split must cover all nodes")
    mech = _part_mechanism(tpm, split.v_nodes)
    return Tpm(len(split.v_nodes), mech)


def autonomy_causal(tpm: Tpm, split: SystemSplit) -> float:
    """Effective information (bits) of the system-to-system mechanism.

    Environment inputs are forced to maximum entropy, so only causal paths
    from the system's own state to its next state contribute; reactive
    systems score zero no matter how self-predictive they look in data.
    """
    return effective_information(system_mechanism(tpm, split))


def autonomy_causal_normalized(tpm: Tpm, split: SystemSplit) -> float:
    """autonomy_causal as a fraction of its ceiling (|V| bits).

    Convenience variant for comparing systems of different sizes; the
    unnormalized value is the primary quantity.
    """
    return autonomy_causal(tpm, split) / len(split.v_nodes)
