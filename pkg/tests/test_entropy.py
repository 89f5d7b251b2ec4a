import numpy as np
import pytest

from infometer.data import DiscreteSeries, ProbTable
from infometer.entropy import (entropy_knn, entropy_miller_madow, entropy_plugin,
                               entropy_vasicek)
from infometer.errors import DegenerateInput, InvalidConfig

from oracles import direct_entropy_nats, knn_entropy_reference


class TestPlugin:
    @pytest.mark.parametrize("k", [2, 4, 8])
    def test_uniform_is_exactly_log_k(self, k):
        est = entropy_plugin(ProbTable(np.full(k, 1.0 / k)))
        assert est.value == np.log(k)

    def test_deterministic_is_zero(self):
        assert entropy_plugin(ProbTable([1.0, 0.0, 0.0])).value == 0.0

    def test_direct_summation_oracle(self):
        p = [0.5, 0.25, 0.25]
        est = entropy_plugin(ProbTable(p))
        assert est.value == pytest.approx(direct_entropy_nats(p), abs=1e-12)
        assert est.value == pytest.approx(1.0397207708399179, abs=1e-10)

    def test_from_series_uses_empirical_frequencies(self):
        s = DiscreteSeries([0, 0, 1, 1], 2)
        assert entropy_plugin(s).value == pytest.approx(np.log(2))

    def test_estimator_identity_always_populated(self):
        est = entropy_plugin(ProbTable([0.3, 0.7]))
        assert est.estimator_id == "plugin"
        assert est.hyperparams

    def test_grouping_never_increases_entropy(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = int(rng.integers(3, 10))
            p = rng.dirichlet(np.ones(k))
            h = entropy_plugin(ProbTable(p)).value
            i, j = rng.choice(k, 2, replace=False)
            merged = np.delete(p, [i, j])
            merged = np.append(merged, p[i] + p[j])
            h2 = entropy_plugin(ProbTable(merged / merged.sum())).value
            assert h2 <= h + 1e-12


class TestMillerMadow:
    def test_correction_formula(self):
        rng = np.random.default_rng(1)
        sym = rng.integers(0, 4, 100)
        sym[:4] = [0, 1, 2, 3]  # all four observed
        s = DiscreteSeries(sym, 4)
        plugin = entropy_plugin(s).value
        mm = entropy_miller_madow(s).value
        assert mm - plugin == pytest.approx(3 / 200, abs=1e-15)

    def test_single_symbol_is_zero(self):
        s = DiscreteSeries(np.zeros(50, dtype=int), 3)
        assert entropy_miller_madow(s).value == 0.0

    def test_correction_vanishes_with_n(self):
        rng = np.random.default_rng(2)
        s = DiscreteSeries(rng.integers(0, 4, 200_000), 4)
        mm = entropy_miller_madow(s).value
        plugin = entropy_plugin(s).value
        assert mm - plugin == pytest.approx(0.0, abs=1e-4)

    def test_bias_direction_and_reduction(self):
        # plugin underestimates at small N; the correction shrinks the gap
        rng = np.random.default_rng(3)
        p = np.array([0.4, 0.3, 0.2, 0.1])
        truth = direct_entropy_nats(p)
        plugin_vals, mm_vals = [], []
        for _ in range(200):
            sym = rng.choice(4, size=50, p=p)
            s = DiscreteSeries(sym, 4)
            plugin_vals.append(entropy_plugin(s).value)
            mm_vals.append(entropy_miller_madow(s).value)
        assert np.mean(plugin_vals) < truth
        assert abs(np.mean(mm_vals) - truth) < abs(np.mean(plugin_vals) - truth)


class TestVasicek:
    def test_uniform_closed_form(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(0, 1, 100_000)
        assert entropy_vasicek(x).value == pytest.approx(0.0, abs=0.02)

    def test_normal_closed_form(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(100_000)
        assert entropy_vasicek(x).value == pytest.approx(0.5 * np.log(2 * np.pi * np.e), abs=0.02)

    def test_constant_sample_rejected(self):
        with pytest.raises(DegenerateInput):
            entropy_vasicek(np.ones(100))

    def test_multivariate_rejected(self):
        with pytest.raises(InvalidConfig):
            entropy_vasicek(np.zeros((10, 2)))

    def test_default_window_recorded(self):
        rng = np.random.default_rng(6)
        est = entropy_vasicek(rng.uniform(0, 1, 400))
        assert est.hyperparams["m"] == 20


class TestKnnEntropy:
    def test_uniform_square(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(0, 1, (10_000, 2))
        assert entropy_knn(pts, k=4).value == pytest.approx(0.0, abs=0.05)

    def test_standard_normal_2d(self):
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((10_000, 2))
        assert entropy_knn(pts, k=4).value == pytest.approx(np.log(2 * np.pi * np.e), abs=0.05)

    def test_small_sample_matches_independent_formula(self):
        rng = np.random.default_rng(9)
        pts = rng.standard_normal((10, 3))
        est = entropy_knn(pts, k=2)
        assert est.value == pytest.approx(knn_entropy_reference(pts, 2), abs=1e-10)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(10)
        pts = rng.standard_normal((500, 2))
        a = entropy_knn(pts, k=4).value
        b = entropy_knn(pts[rng.permutation(500)], k=4).value
        assert a == pytest.approx(b, abs=1e-9)

    def test_k_at_least_n_rejected(self):
        with pytest.raises(InvalidConfig):
            entropy_knn(np.random.default_rng(0).standard_normal((5, 1)), k=5)

    def test_duplicate_rows_jittered_not_fatal(self):
        rng = np.random.default_rng(11)
        pts = rng.standard_normal((50, 2))
        pts[10] = pts[20]
        est = entropy_knn(pts, k=3)
        assert np.isfinite(est.value)
        assert any(p["step"] == "jitter" for p in est.preprocessing)
