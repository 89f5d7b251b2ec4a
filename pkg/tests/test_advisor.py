import pytest

from infometer.advisor import CAVEATS, DATA_KINDS, OBJECTIVES, Query, Recommendation, recommend
from infometer.errors import InvalidConfig

# frozen snapshot of the caveat catalog: one standing caveat per measure,
# matched verbatim by every recommendation
CAVEAT_SNAPSHOT = {
    "entropy": "Finite-sample bias grows with d; report estimator, k, and bootstrap CI",
    "kl_ce": "KL is asymmetric; undefined for disjoint support; distinguish forward vs reverse",
    "mutual_information": "Curse of dimensionality; neural bounds are not unbiased estimators; control leakage",
    "transfer_entropy": "Not interventional causality; confounders produce spurious TE; require surrogate tests",
    "predictive_information": "Requires stationarity; T choice affects value; not defined at a single lag",
    "phi": "NP-hard; variant-dependent; different Phi versions disagree; no consciousness claim",
    "effective_information": "Requires do-X_t access; coarse-graining choice strongly affects EI value",
    "autonomy": 'Observational and causal variants disagree; boundary and time-lag sensitive; not a "free will" scalar',
}


def test_caveat_catalog_snapshot():
    assert CAVEATS == CAVEAT_SNAPSHOT


def test_every_query_yields_exactly_one_recommendation():
    for objective in OBJECTIVES:
        for kind in DATA_KINDS:
            for dim in (1, 2, 5, 30, 128):
                for interventional in (False, True):
                    q = Query(objective, kind, dim, 500, True, interventional)
                    rec = recommend(q)
                    assert isinstance(rec, Recommendation)
                    assert rec.caveat == CAVEAT_SNAPSHOT[rec.measure]
                    assert rec.checklist
                    # determinism: identical query, identical output
                    assert recommend(q) == rec


def test_uncertainty_routes():
    assert recommend(Query("uncertainty", "discrete")).estimator == "entropy_plugin"
    assert recommend(Query("uncertainty", "continuous", 1)).estimator == "entropy_vasicek"
    assert recommend(Query("uncertainty", "continuous", 3)).estimator == "entropy_knn"
    rec = recommend(Query("uncertainty", "mixed", 2))
    assert "plugin" in rec.estimator
    assert rec.alternatives


def test_dependence_routes():
    assert recommend(Query("dependence", "discrete")).estimator == "mi_plugin"
    low = recommend(Query("dependence", "continuous", 5))
    assert low.estimator == "mi_ksg"
    assert not low.warnings
    high = recommend(Query("dependence", "continuous", 128))
    assert high.estimator == "mi_ksg"
    assert any("reduce" in w or "project" in w for w in high.warnings)
    assert any("training surrogates" in w for w in high.warnings)
    mixed = recommend(Query("dependence", "mixed", 3))
    assert mixed.alternatives  # second-best disclosure


def test_directed_influence_routes():
    multi = recommend(Query("directed_influence", "continuous", 5, time_ordered=True))
    assert multi.measure == "transfer_entropy"
    assert "network_scan" in multi.estimator
    assert multi.caveat.startswith("Not interventional causality")
    pair = recommend(Query("directed_influence", "continuous", 2, time_ordered=True))
    assert "network_scan" not in pair.estimator
    unordered = recommend(Query("directed_influence", "continuous", 5, time_ordered=False))
    assert any("time-ordered" in w for w in unordered.warnings)


def test_temporal_memory_route():
    rec = recommend(Query("temporal_memory", "continuous", 1, time_ordered=True))
    assert rec.measure == "predictive_information"


def test_agent_complexity_gating():
    with_tpm = recommend(Query("agent_complexity", "discrete", 6, interventional_access=True))
    assert with_tpm.measure == "phi"
    assert not with_tpm.unavailable
    without = recommend(Query("agent_complexity", "discrete", 6, interventional_access=False))
    assert without.estimator == "autonomy_observational"
    assert any("no observational-data estimator" in u for u in without.unavailable)
    assert any("phi" in u for u in without.unavailable)


def test_compare_distributions_suggests_jsd_for_disjoint():
    rec = recommend(Query("compare_distributions", "discrete"))
    assert any("jensen_shannon" in w for w in rec.warnings)


def test_query_validation():
    with pytest.raises(InvalidConfig):
        Query("guess")
    with pytest.raises(InvalidConfig):
        Query("uncertainty", "fuzzy")
