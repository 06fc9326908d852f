import numpy as np
import pytest
from scipy import integrate as sint
from scipy import stats

from polychaos.compose import compose
from polychaos.distributions import make_rng
from polychaos.integrate import IntegrationError, SimOptions
from polychaos.modelir import load_system
from polychaos.simulate import (
    RegressionError,
    regress,
    sample_basis,
    sample_variables,
    sim_collocation,
    sim_galerkin,
    sim_montecarlo,
)

from conftest import dirac_doc

OPTS = SimOptions((0.0, 1.0), dt=0.05, rtol=1e-10, atol=1e-12)


def decay_moment(k: int, t: float) -> float:
    """``E[(2 exp(-a t))**k]`` for ``a ~ B(2, 2)`` by adaptive quadrature."""
    return sint.quad(lambda a: (2 * np.exp(-a * t)) ** k * 6 * a * (1 - a), 0.0, 1.0, epsabs=1e-14)[0]


def mixed_system(**extra):
    doc = {
        "states": [
            {"name": "x", "pdf": "uniform", "data": [0.9, 1.1], "rhs": "-k*x + u"},
            {"name": "y", "pdf": "dirac", "data": [0], "rhs": "k*x - 0.5*y"},
        ],
        "parameters": [
            {"name": "k", "pdf": "beta", "data": [2, 2]},
            {"name": "c", "pdf": "dirac", "data": [3]},
        ],
        "inputs": [{"name": "u", "rhs": "piecewise(u_t, u_v, t)", "u_t": [0, 0.5], "u_v": [0, 0]}],
        "outputs": [{"name": "z", "rhs": "c*y + x"}],
    }
    doc.update(extra)
    return load_system(doc)


class TestSampling:
    def test_no_germs_gives_empty_rows(self, rng):
        es = compose(load_system(dirac_doc()), 2)
        assert sample_basis(es, 7, rng).shape == (0, 7)
        assert sample_variables(es, 7, rng).shape == (0, 7)

    def test_germ_families(self, rng):
        doc = {
            "states": [{"name": "x", "pdf": "gaussian", "data": [0, 1], "rhs": "-a*x"}],
            "parameters": [{"name": "a", "pdf": "uniform", "data": [0, 1]}],
        }
        es = compose(load_system(doc), 2)
        xi = sample_basis(es, 40_000, rng)
        # germ order: parameter a (Legendre) then x (Hermite)
        assert xi[0].min() >= -1 and xi[0].max() <= 1
        se = np.sqrt(2 / 40_000)
        assert abs(xi[1].var() - 1.0) < 5 * se

    def test_variable_samples_match_distributions(self, rng):
        es = compose(mixed_system(), 2)
        v = sample_variables(es, 20_000, rng)
        assert v.shape == (2, 20_000)  # c and y are Dirac
        k, x = v
        assert abs(k.mean() - 0.5) < 5 * np.sqrt(0.05 / 20_000)
        assert 0.9 <= x.min() and x.max() <= 1.1
        assert stats.kstest(k, stats.beta(2, 2).cdf).pvalue > 1e-3

    def test_rejects_empty_sample(self, rng, decay_p3):
        with pytest.raises(ValueError):
            sample_basis(decay_p3, 0, rng)


class TestGalerkin:
    def test_mean_and_variance_against_quadrature(self, decay_p3):
        res = sim_galerkin(decay_p3, OPTS)
        xhat = res.coeffs["x"][-1]
        lam = res.basis.norms_sq
        mean = decay_moment(1, 1.0)
        var = decay_moment(2, 1.0) - mean**2
        assert xhat[0] == pytest.approx(mean, rel=1e-9)
        assert np.sum(xhat[1:] ** 2 * lam[1:]) == pytest.approx(var, rel=1e-5)

    def test_initial_coefficients(self, decay_p3):
        res = sim_galerkin(decay_p3, OPTS)
        np.testing.assert_array_equal(res.coeffs["x"][0], [2.0, 0, 0, 0])

    def test_all_dirac_is_nominal(self):
        es = compose(load_system(dirac_doc()), 3)
        res = sim_galerkin(es, OPTS)
        assert es.size == 1
        nominal = sim_montecarlo(es, OPTS, np.zeros((0, 1)))
        np.testing.assert_allclose(res.coeffs["x"][:, 0], nominal.variable("x")[0], atol=1e-10)

    def test_input_override_changes_trajectory(self):
        es = compose(mixed_system(), 2)
        base = sim_galerkin(es, OPTS)
        forced = sim_galerkin(es, OPTS, {"u_v": [0.0, 2.0]})
        early = base.times <= 0.5
        np.testing.assert_allclose(base.coeffs["x"][early], forced.coeffs["x"][early], atol=1e-12)
        assert forced.coeffs["x"][-1, 0] > base.coeffs["x"][-1, 0] + 0.5

    def test_outputs_are_expanded(self):
        es = compose(mixed_system(), 2)
        res = sim_galerkin(es, OPTS)
        np.testing.assert_allclose(res.coeffs["z"], 3 * res.coeffs["y"] + res.coeffs["x"], atol=1e-14)
        assert res.names == ["x", "y", "z"]


class TestCollocation:
    def test_regress_recovers_polynomial_exactly(self, decay_p3, rng):
        xi = sample_basis(decay_p3, 50, rng)
        phi = decay_p3.basis.evaluate(xi).T
        c = rng.normal(size=decay_p3.size)
        np.testing.assert_allclose(regress(phi, phi @ c), c, atol=1e-10)

    def test_agrees_with_galerkin(self, decay_p3):
        xi = sample_basis(decay_p3, 500, make_rng(1))
        col = sim_collocation(decay_p3, OPTS, xi)
        gal = sim_galerkin(decay_p3, OPTS)
        assert np.abs(col.coeffs["x"] - gal.coeffs["x"]).max() < 1e-4

    def test_needs_enough_samples(self, decay_p3, rng):
        xi = sample_basis(decay_p3, decay_p3.size - 1, rng)
        with pytest.raises(RegressionError):
            sim_collocation(decay_p3, OPTS, xi)

    def test_rank_deficient_samples(self, decay_p3):
        xi = np.zeros((1, 10))
        with pytest.raises(RegressionError, match="rank"):
            sim_collocation(decay_p3, OPTS, xi)

    def test_non_polynomial_model(self, rng):
        doc = {
            "states": [{"name": "x", "pdf": "dirac", "data": [1], "rhs": "-exp(a)*x"}],
            "parameters": [{"name": "a", "pdf": "uniform", "data": [0, 0.2]}],
        }
        es = compose(load_system(doc), 3, projection=False)
        res = sim_collocation(es, OPTS, sample_basis(es, 200, rng))
        mean = sint.quad(lambda a: np.exp(-np.exp(a)) / 0.2, 0.0, 0.2)[0]
        assert res.coeffs["x"][-1, 0] == pytest.approx(mean, rel=1e-6)


class TestMonteCarlo:
    def test_moments_within_standard_error(self, decay_p3):
        n = 20_000
        mc = sim_montecarlo(decay_p3, OPTS, sample_variables(decay_p3, n, make_rng(7)))
        x1 = mc.variable("x")[:, -1]
        mean = decay_moment(1, 1.0)
        sd = np.sqrt(decay_moment(2, 1.0) - mean**2)
        assert abs(x1.mean() - mean) < 5 * sd / np.sqrt(n)

    def test_samples_match_closed_form(self, decay_p3, rng):
        v = sample_variables(decay_p3, 5, rng)
        mc = sim_montecarlo(decay_p3, OPTS, v)
        np.testing.assert_allclose(mc.variable("x"), 2 * np.exp(-np.outer(v[0], mc.times)), rtol=1e-8)

    def test_same_seed_same_trajectories(self, decay_p3):
        a = sim_montecarlo(decay_p3, OPTS, sample_variables(decay_p3, 50, make_rng(3)))
        b = sim_montecarlo(decay_p3, OPTS, sample_variables(decay_p3, 50, make_rng(3)))
        np.testing.assert_array_equal(a.values, b.values)

    def test_batching_does_not_change_results(self, decay_p3):
        v = sample_variables(decay_p3, 37, make_rng(4))
        whole = sim_montecarlo(decay_p3, OPTS, v)
        # the common step sequence differs per batch, so agreement is to tolerance
        split = sim_montecarlo(decay_p3, OPTS, v, batch=10)
        np.testing.assert_allclose(whole.values, split.values, rtol=1e-8)

    def test_dirac_only_samples_identical(self):
        es = compose(load_system(dirac_doc()), 2)
        mc = sim_montecarlo(es, OPTS, np.zeros((0, 4)))
        assert mc.values.shape == (4, len(OPTS.grid), 2)
        assert np.all(mc.values == mc.values[0])

    def test_rejects_wrong_sample_shape(self, decay_p3):
        with pytest.raises(ValueError):
            sim_montecarlo(decay_p3, OPTS, np.zeros((2, 5)))

    def test_outputs_included(self, rng):
        es = compose(mixed_system(), 1)
        mc = sim_montecarlo(es, OPTS, sample_variables(es, 4, rng))
        assert mc.names == ["x", "y", "z"]
        np.testing.assert_allclose(mc.variable("z"), 3 * mc.variable("y") + mc.variable("x"), atol=1e-14)

    def test_failing_sample_is_reported(self):
        doc = {
            "states": [{"name": "x", "pdf": "dirac", "data": [1], "rhs": "a*x^2"}],
            "parameters": [{"name": "a", "pdf": "uniform", "data": [0, 4]}],
        }
        es = compose(load_system(doc), 1)
        samples = np.array([[0.5, 3.0]])
        with pytest.raises(IntegrationError, match="sample 1"):
            sim_montecarlo(es, SimOptions((0.0, 1.0), dt=0.1, max_steps=5000), samples)
