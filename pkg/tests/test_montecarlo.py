import math

import numpy as np
import pytest

from sphdefect.chaos import exact_variance
from sphdefect.montecarlo import (CltConfig, clt_experiment, default_degree,
                                  defect_estimate, nyquist_degree,
                                  sample_field, stream,
                                  wasserstein1_empirical)
from sphdefect.montecarlo import _spectral_defects
from sphdefect.specfun import gegenbauer, sphere_surface
from sphdefect.spherequad import build_grid

SEED = 618970


class TestStreams:
    def test_deterministic_and_independent(self):
        a1 = stream(7, 0).standard_normal(5)
        a2 = stream(7, 0).standard_normal(5)
        b = stream(7, 1).standard_normal(5)
        c = stream(8, 0).standard_normal(5)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)
        assert not np.array_equal(a1, c)

    def test_degree_rules(self):
        assert nyquist_degree(20) == 99
        assert default_degree(20) == 400
        # the hard floor wins for small l
        assert default_degree(2) == max(4 * 2 + 19, 40)


class TestFieldSamples:
    def test_pointwise_law(self):
        # T(x) is centered Gaussian with variance 1 at every point; pool
        # many realizations at a few fixed nodes
        grid = build_grid(2, 30)
        idx = [0, 17, grid.size - 1]
        vals = np.array([sample_field(2, 6, grid, rng=stream(SEED, i)).values[idx]
                         for i in range(3000)])
        mean = vals.mean(axis=0)
        var = vals.var(axis=0)
        assert np.all(np.abs(mean) < 5.0 / math.sqrt(3000))
        assert np.all(np.abs(var - 1.0) < 5.0 * math.sqrt(2.0 / 3000))

    def test_two_point_covariance(self):
        # E T(x) T(y) = G_l(cos d(x,y)) for an arbitrary node pair
        grid = build_grid(2, 30)
        i, j = 3, 200
        t = float(np.clip(grid.points[i] @ grid.points[j], -1, 1))
        target = gegenbauer(2, 6, t)
        prods = np.array([
            (lambda v: v[i] * v[j])(sample_field(2, 6, grid,
                                                 rng=stream(SEED, k)).values)
            for k in range(4000)])
        se = prods.std() / math.sqrt(4000)
        assert abs(prods.mean() - target) < 5.0 * se

    def test_methods_share_the_same_law(self):
        # spectral and covariance samplers must agree in distribution:
        # compare defect second moments on one small explicit grid.  The
        # factorization is reused across realizations (one Cholesky, not n);
        # first check that the reused-factor path reproduces the public API
        # sample bitwise, then gather statistics with the cheap path.
        from sphdefect.montecarlo import (FieldSample, _covariance_factor,
                                          _covariance_values,
                                          _spectral_prepared, _spectral_values)
        l, degree, n = 8, nyquist_degree(8), 900
        grid = build_grid(2, degree)
        var_exact = exact_variance(2, l, tol=1e-6).value
        factor = _covariance_factor(2, l, grid)
        prepared = _spectral_prepared(2, l, grid)
        public_cov = sample_field(2, l, grid, method="covariance-factorization",
                                  rng=stream(SEED, 0)).values
        assert np.array_equal(
            public_cov, _covariance_values(2, l, grid, stream(SEED, 0), factor))
        public_spec = sample_field(2, l, grid, rng=stream(SEED, 0)).values
        assert np.array_equal(
            public_spec, _spectral_values(2, l, grid, stream(SEED, 0), prepared))

        def defect(values):
            return defect_estimate(FieldSample(
                d=2, l=l, grid=grid, values=values,
                method="spectral-basis", master_seed=SEED, index=0))

        outs = {}
        for name, draw in (("spectral", lambda r: _spectral_values(2, l, grid, r, prepared)),
                           ("covariance", lambda r: _covariance_values(2, l, grid, r, factor))):
            d2 = np.array([defect(draw(stream(SEED, i))) ** 2 for i in range(n)])
            outs[name] = d2
            se = d2.std() / math.sqrt(n)
            # 4 SE against the exact value, plus 5% discretization headroom
            assert abs(d2.mean() - var_exact) < 4.0 * se + 0.05 * var_exact, name
        se_pair = math.hypot(outs["spectral"].std(),
                             outs["covariance"].std()) / math.sqrt(n)
        assert abs(outs["spectral"].mean()
                   - outs["covariance"].mean()) < 3.0 * se_pair

    def test_covariance_budget_refusal(self):
        grid = build_grid(2, 200)
        with pytest.raises(ValueError, match="grid size"):
            sample_field(2, 4, grid, method="covariance-factorization",
                         rng=stream(SEED, 0))

    def test_unknown_method(self):
        grid = build_grid(2, 20)
        with pytest.raises(ValueError, match="method"):
            sample_field(2, 4, grid, method="qmc", rng=stream(SEED, 0))

    def test_reproducible_bitwise(self):
        grid = build_grid(2, 24)
        v1 = sample_field(2, 4, grid, rng=stream(41, 7)).values
        v2 = sample_field(2, 4, grid, rng=stream(41, 7)).values
        assert np.array_equal(v1, v2)


class TestDefects:
    def test_bounded_by_surface(self):
        grid = build_grid(2, 40)
        surf = sphere_surface(2)
        for i in range(50):
            s = sample_field(2, 8, grid, rng=stream(SEED, i))
            assert abs(defect_estimate(s)) <= surf + 1e-12

    def test_constant_sign_field_gives_full_surface(self):
        grid = build_grid(2, 12)
        from sphdefect.montecarlo import FieldSample
        s = FieldSample(d=2, l=4, grid=grid, values=np.ones(grid.size),
                        method="spectral-basis", master_seed=0, index=0)
        assert defect_estimate(s) == pytest.approx(sphere_surface(2), rel=1e-14)

    def test_sign_zero_contributes_nothing(self):
        grid = build_grid(2, 12)
        from sphdefect.montecarlo import FieldSample
        vals = np.zeros(grid.size)
        s = FieldSample(d=2, l=4, grid=grid, values=vals,
                        method="spectral-basis", master_seed=0, index=0)
        assert defect_estimate(s) == 0.0

    @pytest.mark.parametrize("d,l", [(2, 5), (2, 9), (3, 3)])
    def test_odd_degree_defects_exactly_zero(self, d, l):
        grid = build_grid(d, max(2 * l + 1, 11))
        for i in range(40):
            s = sample_field(d, l, grid, rng=stream(SEED, i))
            assert defect_estimate(s) == 0.0

    def test_batched_path_matches_per_sample_path(self):
        # the batched all-realizations kernel must reproduce the one-sample
        # code path stream for stream
        l, degree, n = 6, 60, 130  # n > batch size to cover the tail batch
        grid = build_grid(2, degree)
        batched = _spectral_defects(2, l, grid, SEED, n)
        single = np.array([
            defect_estimate(sample_field(2, l, grid, rng=stream(SEED, i)))
            for i in range(n)])
        assert np.max(np.abs(batched - single)) < 1e-12


class TestWasserstein:
    def test_normal_reference_small_for_normal_sample(self):
        z = stream(3, 0).standard_normal(20000)
        assert wasserstein1_empirical(z) < 0.02

    def test_detects_scale_mismatch(self):
        z = 2.0 * stream(3, 1).standard_normal(20000)
        # W1 to N(0,1) approaches E|2Z - ...| ~ sigma difference
        assert wasserstein1_empirical(z) > 0.5

    def test_two_sample_form(self):
        x = np.array([0.0, 1.0])
        y = np.array([0.5, 1.5])
        assert wasserstein1_empirical(x, y) == pytest.approx(0.5, rel=1e-12)

    def test_translation_equivariance(self):
        x = stream(5, 0).standard_normal(500)
        base = wasserstein1_empirical(x, x + 0.0)
        shifted = wasserstein1_empirical(x, x + 0.3)
        assert base == pytest.approx(0.0, abs=1e-15)
        assert shifted == pytest.approx(0.3, rel=1e-12)

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            wasserstein1_empirical([1.0])


class TestCltExperiment:
    def test_seeded_run_matches_theory(self):
        diag = clt_experiment(2, 10, 600, CltConfig(master_seed=SEED))
        assert abs(diag.mean) < 4.0 * diag.mean_se
        assert abs(diag.variance - 1.0) < 5.0 * diag.variance_se
        assert diag.exact_var == pytest.approx(
            exact_variance(2, 10, tol=1e-6).value, rel=1e-6)
        assert 0.0 < diag.w1 < 0.2
        assert 0.0 < diag.ks < 1.0

    def test_reproducible(self):
        a = clt_experiment(2, 8, 120, CltConfig(master_seed=12))
        b = clt_experiment(2, 8, 120, CltConfig(master_seed=12))
        assert a == b  # dataclass equality: every statistic bitwise equal
        assert np.array_equal(a.defects, b.defects)

    def test_seed_changes_output(self):
        a = clt_experiment(2, 8, 120, CltConfig(master_seed=12))
        c = clt_experiment(2, 8, 120, CltConfig(master_seed=13))
        assert not np.array_equal(a.defects, c.defects)

    def test_grid_refinement_stable(self):
        # doubling the default grid beyond 20l must not move the variance
        # estimate by more than sampling noise (discretization bias gone)
        n = 700
        a = clt_experiment(2, 8, n, CltConfig(master_seed=SEED))
        b = clt_experiment(2, 8, n, CltConfig(master_seed=SEED,
                                              grid_degree=2 * default_degree(8)))
        # same streams, same realizations: difference is pure quadrature
        assert abs(a.variance - b.variance) < 0.01

    def test_rejects_odd_degree(self):
        with pytest.raises(ValueError, match="even"):
            clt_experiment(2, 7, 100)

    def test_rejects_underresolved_grid(self):
        with pytest.raises(ValueError, match="under-resolve"):
            clt_experiment(2, 20, 100, CltConfig(grid_degree=60))

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValueError, match="realizations"):
            clt_experiment(2, 8, 1)

    def test_dict_export_drops_bulk_data(self):
        diag = clt_experiment(2, 8, 50, CltConfig(master_seed=1))
        doc = diag.to_dict()
        assert "defects" not in doc
        assert doc["l"] == 8
        assert doc["n_realizations"] == 50

    def test_covariance_method_small_case(self):
        cfg = CltConfig(master_seed=SEED, method="covariance-factorization",
                        grid_degree=nyquist_degree(6))
        diag = clt_experiment(2, 6, 150, cfg)
        assert abs(diag.mean) < 4.0 * diag.mean_se
        assert abs(diag.variance - 1.0) < 0.35
