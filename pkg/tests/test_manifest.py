import pytest

from infometer.errors import MissingField
from infometer.manifest import (ReportManifest, build_manifest, canonical_json,
                                parse_manifest)


def _ci():
    return {"point": 0.2, "low": 0.1, "high": 0.3, "level": 0.95,
            "replicates": 200, "method": "bootstrap-percentile", "resampling": "subsample"}


def _sig():
    return {"observed": 0.2, "p_value": 0.005, "method": "time_shift",
            "surrogate_count": 199, "null_samples": [0.0, 0.01]}


class TestBuild:
    def test_happy_path_te(self):
        m = build_manifest("transfer_entropy", "ksg", {"k": 4}, _ci(), _sig(),
                           preprocessing_steps=[{"step": "standardize"}])
        assert m.role == "measurement"
        assert m.estimator["id"] == "ksg"
        assert m.estimator["artifact_version"]
        assert m.preprocessing["steps"] == [{"step": "standardize"}]

    def test_mi_without_interval_names_the_missing_field(self):
        with pytest.raises(MissingField) as exc:
            build_manifest("mutual_information", "ksg", {"k": 4}, None, _sig())
        assert exc.value.field == "uncertainty"

    def test_te_without_significance_names_the_missing_field(self):
        with pytest.raises(MissingField) as exc:
            build_manifest("transfer_entropy", "ksg", {"k": 4}, _ci(), None)
        assert exc.value.field == "significance"

    def test_deterministic_measures_autofill_exact_fields(self):
        m = build_manifest("phi", "ei-bipartition-v1", {"n_nodes": 3}, None, None,
                           unit="bits")
        assert m.uncertainty["kind"] == "exact"
        assert m.significance["kind"] == "not-applicable"
        assert m.estimator["id"] == "ei-bipartition-v1"

    def test_entropy_needs_interval_but_not_significance(self):
        m = build_manifest("entropy", "plugin", {}, _ci(), None)
        assert m.significance["kind"] == "not-applicable"
        with pytest.raises(MissingField):
            build_manifest("entropy", "plugin", {}, None, None)

    def test_missing_estimator_id(self):
        with pytest.raises(MissingField) as exc:
            build_manifest("entropy", "", {}, _ci(), None)
        assert exc.value.field == "estimator"


class TestSerialization:
    def test_round_trip_is_byte_identical(self):
        m = build_manifest("transfer_entropy", "ksg", {"k": 4, "n": 100}, _ci(), _sig(),
                           preprocessing_steps=[{"step": "jitter", "scale": 1e-10}],
                           stationarity={"target": {"ok": True}},
                           notes=("default embedding in use",))
        text = m.to_json()
        again = parse_manifest(text).to_json()
        assert text == again
        third = parse_manifest(again).to_json()
        assert text == third

    def test_parse_rejects_partial_manifest(self):
        m = build_manifest("phi", "ei-bipartition-v1", {}, None, None, unit="bits")
        obj = m.to_dict()
        del obj["significance"]
        with pytest.raises(MissingField):
            parse_manifest(canonical_json(obj))

    def test_canonical_json_sorts_keys(self):
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_numpy_values_coerced(self):
        import numpy as np

        m = build_manifest("entropy", "plugin", {"n": np.int64(5), "vals": np.array([1.5])},
                           _ci(), None)
        text = m.to_json()
        assert '"n":5' in text
