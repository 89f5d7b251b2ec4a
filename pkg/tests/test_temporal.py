import numpy as np
import pytest

from infometer.data import DiscreteSeries
from infometer.errors import InsufficientData, InvalidConfig
from infometer.mi import mi_gaussian_oracle
from infometer.simulate import alternating_binary, coupled_ar, ar1
from infometer.temporal import (DEFAULT_EMBEDDING, EmbeddingSpec, active_information_storage,
                                embed, predictive_information, select_embedding_nonuniform,
                                split_blocks, transfer_entropy)

from oracles import linear_gaussian_te_oracle


class TestEmbed:
    def test_shift_by_one(self):
        sm = embed(np.array([1.0, 2, 3, 4]), EmbeddingSpec(1, 1, 1))
        fut, tgt, src = split_blocks(sm)
        assert fut[:, 0].tolist() == [2, 3, 4]
        assert tgt[:, 0].tolist() == [1, 2, 3]
        assert src is None

    def test_too_short_for_lags(self):
        with pytest.raises(InsufficientData):
            embed(np.array([1.0, 2, 3]), EmbeddingSpec(2, 1, 2))

    def test_columns_are_verbatim_lagged_slices(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(60)
        y = rng.standard_normal(60)
        spec = EmbeddingSpec(3, 2, 2)
        sm = embed(x, spec, y)
        maxlag = spec.max_lag(True)
        s = np.arange(maxlag, 60)
        names = sm.column_names
        for i, name in enumerate(names):
            if name == "future":
                np.testing.assert_array_equal(sm.data[:, i], x[s])
            elif name.startswith("target_lag"):
                lag = int(name.removeprefix("target_lag"))
                np.testing.assert_array_equal(sm.data[:, i], x[s - lag])
            else:
                lag = int(name.removeprefix("source_lag"))
                np.testing.assert_array_equal(sm.data[:, i], y[s - lag])

    def test_row_count(self):
        sm = embed(np.arange(100.0), EmbeddingSpec(2, 1, 3))
        assert sm.n == 100 - EmbeddingSpec(2, 1, 3).max_lag(False)

    def test_spec_validation(self):
        with pytest.raises(InvalidConfig):
            EmbeddingSpec(0, 1, 1)


class TestTransferEntropy:
    def test_coupled_ar_matches_regression_oracle(self):
        pair = coupled_ar(10_000, coupling=0.5, seed=42)
        oracle = linear_gaussian_te_oracle(pair["source"], pair["target"])
        res = transfer_entropy(pair["source"], pair["target"], DEFAULT_EMBEDDING, "ksg", 4)
        assert res.value == pytest.approx(oracle, abs=0.03)
        assert res.effect_size is not None and res.effect_size > 0

    def test_reverse_direction_near_zero(self):
        pair = coupled_ar(10_000, coupling=0.5, seed=43)
        res = transfer_entropy(pair["target"], pair["source"], DEFAULT_EMBEDDING, "ksg", 4)
        assert res.value == pytest.approx(0.0, abs=0.02)

    def test_plugin_nonnegative_and_self_source_zero(self):
        rng = np.random.default_rng(1)
        sym = rng.integers(0, 2, 500)
        series = DiscreteSeries(sym, 2)
        # conditioning on the target's own past removes a duplicate source exactly
        res = transfer_entropy(series, series, DEFAULT_EMBEDDING, "plugin")
        assert res.value == pytest.approx(0.0, abs=1e-12)
        other = DiscreteSeries(rng.integers(0, 2, 500), 2)
        res2 = transfer_entropy(other, series, DEFAULT_EMBEDDING, "plugin")
        assert res2.value >= 0

    def test_default_embedding_flagged(self):
        pair = coupled_ar(500, seed=2)
        res = transfer_entropy(pair["source"], pair["target"])
        assert any("default embedding" in n for n in res.notes)
        explicit = transfer_entropy(pair["source"], pair["target"],
                                    EmbeddingSpec(1, 1, 1), "ksg", 4)
        assert not any("default embedding" in n for n in explicit.notes)

    def test_stationarity_recorded(self):
        pair = coupled_ar(500, seed=3)
        res = transfer_entropy(pair["source"], pair["target"])
        assert res.stationarity is not None
        assert "target" in res.stationarity

    def test_time_reversal_asymmetry_with_significance(self):
        from infometer.inference import surrogate_test
        from infometer.temporal import te_shift_statistic

        pair = coupled_ar(4000, coupling=0.5, seed=44)
        fwd = surrogate_test(te_shift_statistic(pair["source"], pair["target"]),
                             "time_shift", 200, seed=1)
        rev = surrogate_test(te_shift_statistic(pair["target"], pair["source"]),
                             "time_shift", 200, seed=2)
        assert fwd.observed - rev.observed > 0.08
        assert fwd.p_value <= 0.05
        assert rev.p_value > 0.05


class TestAis:
    def test_iid_discrete_near_zero(self):
        rng = np.random.default_rng(4)
        s = DiscreteSeries(rng.integers(0, 2, 4000), 2)
        res = active_information_storage(s, DEFAULT_EMBEDDING, "plugin")
        assert res.value == pytest.approx(0.0, abs=0.01)

    def test_alternating_series_is_one_bit(self):
        # length 201 gives 200 embedded pairs, an exact 50/50 joint
        res = active_information_storage(alternating_binary(201), DEFAULT_EMBEDDING, "plugin")
        assert res.value == pytest.approx(np.log(2), abs=1e-12)

    def test_ar1_closed_form(self):
        x = ar1(10_000, phi=0.9, seed=5)
        res = active_information_storage(x, DEFAULT_EMBEDDING, "ksg", 4)
        assert res.value == pytest.approx(mi_gaussian_oracle(0.9), abs=0.05)


class TestPredictiveInformation:
    def test_iid_near_zero(self):
        rng = np.random.default_rng(6)
        s = DiscreteSeries(rng.integers(0, 2, 4000), 2)
        assert predictive_information(s, 1, "plugin").value == pytest.approx(0.0, abs=0.01)

    def test_period_two_is_one_bit(self):
        assert predictive_information(alternating_binary(301), 1, "plugin").value == \
            pytest.approx(np.log(2), abs=1e-12)

    def test_ar1_window_one_equals_ais(self):
        x = ar1(10_000, phi=0.9, seed=7)
        pi = predictive_information(x, 1, "ksg", 4).value
        ais = active_information_storage(x, DEFAULT_EMBEDDING, "ksg", 4).value
        assert pi == pytest.approx(ais, abs=0.02)

    def test_window_validation(self):
        with pytest.raises(InsufficientData):
            predictive_information(np.arange(10.0), 5)


class TestSelection:
    def test_no_coupling_selects_nothing(self):
        rng = np.random.default_rng(8)
        target = rng.standard_normal(600)
        sources = [rng.standard_normal(600)]
        res = select_embedding_nonuniform(target, sources, max_lag=3,
                                          surrogates=99, seed=11)
        assert res.selected == ()
        assert res.steps[-1].accepted is False

    def test_planted_lag_two_found(self):
        hits = 0
        reps = 20
        for rep in range(reps):
            pair = coupled_ar(700, coupling=0.9, delay=2, seed=100 + rep)
            res = select_embedding_nonuniform(pair["target"], [pair["source"]],
                                              max_lag=4, surrogates=99, seed=rep)
            if res.selected and res.selected[0] == (0, 2):
                hits += 1
        assert hits >= reps * 0.9

    def test_duplicated_source_selected_once(self):
        found_dupe = 0
        for rep in range(5):
            pair = coupled_ar(800, coupling=0.9, delay=1, seed=200 + rep)
            res = select_embedding_nonuniform(pair["target"],
                                              [pair["source"], pair["source"]],
                                              max_lag=2, surrogates=99, seed=rep)
            lags = {lag for _, lag in res.selected}
            srcs = [s for s, _ in res.selected]
            # the true lag must not be picked from both copies
            if srcs.count(0) + srcs.count(1) != len(srcs):
                continue
            per_lag = {}
            for s, lag in res.selected:
                per_lag.setdefault(lag, []).append(s)
            for lag, sources in per_lag.items():
                assert len(sources) == 1, f"lag {lag} selected from both copies"
            found_dupe += 1
        assert found_dupe >= 4

    def test_alpha_feasibility_guard(self):
        with pytest.raises(InvalidConfig):
            select_embedding_nonuniform(np.arange(100.0), [np.arange(100.0)],
                                        max_lag=2, alpha=0.001, surrogates=99)
