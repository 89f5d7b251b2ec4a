"""Measure selection advisor: a static decision table mapping an analysis
objective and data regime to the measure, the estimator in this toolkit, the
measure's standing caveat, and the reporting checklist.

The table is data, not logic, so it can be audited and snapshot-tested line
by line. Neural variational bounds show up only inside caveat text: they are
training objectives, not measurement estimators, and nothing here will ever
select one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig

OBJECTIVES = (
    "uncertainty",
    "compare_distributions",
    "dependence",
    "directed_influence",
    "temporal_memory",
    "agent_complexity",
)
DATA_KINDS = ("discrete", "continuous", "mixed")

#: one standing caveat per measure; the single most dangerous misuse
CAVEATS = {
    "entropy": "Finite-sample bias grows with d; report estimator, k, and bootstrap CI",
    "kl_ce": "KL is asymmetric; undefined for disjoint support; distinguish forward vs reverse",
    "mutual_information": "Curse of dimensionality; neural bounds are not unbiased estimators; control leakage",
    "transfer_entropy": "Not interventional causality; confounders produce spurious TE; require surrogate tests",
    "predictive_information": "Requires stationarity; T choice affects value; not defined at a single lag",
    "phi": "NP-hard; variant-dependent; different Phi versions disagree; no consciousness claim",
    "effective_information": "Requires do-X_t access; coarse-graining choice strongly affects EI value",
    "autonomy": 'Observational and causal variants disagree; boundary and time-lag sensitive; not a "free will" scalar',
}

CHECKLISTS = {
    "entropy": (
        "state whether the variable is discrete or continuous and how it was discretized or normalized",
        "report the estimator family and its hyperparameters (bin rule, k, spacing window)",
        "attach a bootstrap/subsampling uncertainty interval",
        "report sensitivity to preprocessing choices",
    ),
    "kl_ce": (
        "state the direction (which distribution is the reference)",
        "state how near-zero probabilities were smoothed, if at all",
        "declare measurement estimator vs training objective",
    ),
    "mutual_information": (
        "report estimator family and k",
        "report robustness across k (e.g. k in {3, 5, 10})",
        "attach bootstrap variance and a surrogate significance test",
        "declare measurement estimator vs training surrogate",
    ),
    "transfer_entropy": (
        "report the lags and embedding strategy with a justification",
        "report the conditioning set (what was conditioned on, and why)",
        "attach surrogate significance tests with effect sizes",
        "discuss plausible confounders and how they were addressed",
    ),
    "predictive_information": (
        "report the window T; the value is not comparable across windows",
        "verify stationarity before estimating",
        "attach surrogate significance where a claim rests on the value",
    ),
    "phi": (
        "state the variant ('ei-bipartition-v1' here), system size, and exact vs approximate search",
        "state the system boundary and time step",
    ),
    "effective_information": (
        "state the intervention distribution (uniform here)",
        "report the coarse-graining alongside any emergence claim",
    ),
    "autonomy": (
        "state the system/environment boundary and the history length m",
        "report observational and interventional variants separately; they measure different things",
    ),
}


@dataclass(frozen=True)
class Query:
    """What the user wants to measure, and what the data allows."""

    objective: str
    data_kind: str = "continuous"
    dimension: int = 1
    n_samples: int = 1000
    time_ordered: bool = False
    interventional_access: bool = False

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise InvalidConfig(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.data_kind not in DATA_KINDS:
            raise InvalidConfig(f"data_kind must be one of {DATA_KINDS}, got {self.data_kind!r}")
        if self.dimension < 1 or self.n_samples < 1:
            raise InvalidConfig("dimension and n_samples must be >= 1")


@dataclass(frozen=True)
class Recommendation:
    measure: str
    estimator: str
    caveat: str
    checklist: tuple[str, ...]
    warnings: tuple[str, ...] = ()
    alternatives: tuple[str, ...] = ()
    unavailable: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "estimator": self.estimator,
            "caveat": self.caveat,
            "checklist": list(self.checklist),
            "warnings": list(self.warnings),
            "alternatives": list(self.alternatives),
            "unavailable": list(self.unavailable),
        }


def _mixed_disclosure() -> str:
    return ("mixed discrete/continuous data: the dedicated mixed-scale estimators are outside "
            "this toolkit; discretize-then-plugin is a second-best route whose value depends "
            "on the binning, which must be reported")


def recommend(query: Query) -> Recommendation:
    """Deterministic decision table: every valid query maps to exactly one
    recommendation, with regime warnings where estimates get fragile."""
    warn: list[str] = []
    alts: list[str] = []
    unavailable: list[str] = []

    if query.objective == "uncertainty":
        if query.data_kind == "discrete":
            est = "entropy_plugin"
        elif query.data_kind == "mixed":
            est = "discretize + entropy_plugin"
            alts.append(_mixed_disclosure())
        elif query.dimension == 1:
            est = "entropy_vasicek"
        else:
            est = "entropy_knn"
        if query.data_kind != "discrete" and query.dimension >= 10:
            warn.append("high-dimensional entropy (d >= 10) is fragile; prefer dimension "
                        "reduction before estimation")
        return Recommendation("entropy", est, CAVEATS["entropy"], CHECKLISTS["entropy"],
                              tuple(warn), tuple(alts))

    if query.objective == "compare_distributions":
        if query.data_kind == "discrete":
            est = "kl_discrete / cross_entropy"
        else:
            est = "discretize + kl_discrete"
            alts.append("continuous density-ratio estimation (classifier/RKHS) is a learned "
                        "component outside this toolkit; results here are discretization-dependent")
        warn.append("on disjoint or near-disjoint support KL is undefined or infinite; "
                    "use jensen_shannon there")
        return Recommendation("kl_ce", est, CAVEATS["kl_ce"], CHECKLISTS["kl_ce"],
                              tuple(warn), tuple(alts))

    if query.objective == "dependence":
        if query.data_kind == "discrete":
            est = "mi_plugin"
        elif query.data_kind == "mixed":
            est = "discretize + mi_plugin"
            alts.append(_mixed_disclosure())
        else:
            est = "mi_ksg"
            if query.dimension >= 20:
                warn.append(f"combined dimension {query.dimension} >= 20: neighbor-based MI is "
                            "unreliable; project to d <= 15 (e.g. PCA) before estimating. "
                            "Neural lower bounds exist for this regime but are training "
                            "surrogates, not measurements, and are out of scope here")
        return Recommendation("mutual_information", est, CAVEATS["mutual_information"],
                              CHECKLISTS["mutual_information"], tuple(warn), tuple(alts))

    if query.objective == "directed_influence":
        if not query.time_ordered:
            warn.append("directed influence needs time-ordered data; an unordered sample "
                        "cannot support a temporal direction claim")
        if query.dimension > 2:
            est = "network_scan (transfer_entropy per directed pair, conditioned on the "\
                  "remaining streams, surrogate-tested, multiplicity-corrected)"
        else:
            est = "transfer_entropy + surrogate_test"
        return Recommendation("transfer_entropy", est, CAVEATS["transfer_entropy"],
                              CHECKLISTS["transfer_entropy"], tuple(warn), tuple(alts))

    if query.objective == "temporal_memory":
        if not query.time_ordered:
            warn.append("temporal memory needs time-ordered data")
        est = "predictive_information (plugin for discrete, ksg otherwise)"
        return Recommendation("predictive_information", est, CAVEATS["predictive_information"],
                              CHECKLISTS["predictive_information"], tuple(warn), tuple(alts))

    # agent_complexity
    if query.interventional_access:
        est = "phi + effective_information + autonomy (observational and causal)"
        warn.append("exact computation is exponential in nodes; keep systems small")
        return Recommendation("phi", est, CAVEATS["phi"], CHECKLISTS["phi"],
                              tuple(warn), tuple(alts))
    est = "autonomy_observational"
    unavailable = [
        "effective_information: no observational-data estimator exists; it requires the "
        "full transition model under intervention",
        "phi: requires the full transition model",
        "autonomy_causal: requires the full transition model",
    ]
    warn.append("without interventional access, only the observational autonomy screen is "
                "available; it conflates external correlation with self-determination")
    return Recommendation("autonomy", est, CAVEATS["autonomy"], CHECKLISTS["autonomy"],
                          tuple(warn), tuple(alts), tuple(unavailable))
