import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from polychaos.distributions import Beta, Beta4, Gaussian, Uniform
from polychaos.orthopoly import (
    QuadratureBudgetError,
    eval_poly,
    family_for,
    gauss_rule,
    hermite,
    inner_product,
    jacobi,
    legendre,
)

FAMILIES = [
    pytest.param(hermite(), id="hermite"),
    pytest.param(legendre(), id="legendre"),
    pytest.param(jacobi(1.0, 1.0), id="jacobi-beta22"),
    pytest.param(jacobi(5.0, 3.0), id="jacobi-beta46"),
    pytest.param(jacobi(-0.5, 0.7), id="jacobi-skew"),
]


class TestEval:
    @pytest.mark.parametrize(
        "fam, n, xi, expected",
        [(hermite(), 0, 7.3, 1.0), (hermite(), 2, 1.0, 0.0), (legendre(), 2, 1.0, 1.0), (hermite(), 3, 2.0, 2.0)],
    )
    def test_values(self, fam, n, xi, expected):
        assert eval_poly(fam, n, xi) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("fam", FAMILIES)
    def test_matches_scipy(self, fam):
        x = np.linspace(-0.99, 0.99, 23) if fam.family != "hermite" else np.linspace(-4, 4, 23)
        for n in range(11):
            ref = oracles.poly(fam.family, n, x, fam.alpha, fam.beta)
            np.testing.assert_allclose(eval_poly(fam, n, x), ref, rtol=1e-11, atol=1e-11 * max(1, np.abs(ref).max()))

    def test_order_beyond_budget(self):
        with pytest.raises(ValueError):
            eval_poly(hermite(), hermite().max_order + 1, 0.0)

    def test_vector_shape(self):
        vals = legendre().eval_all(3, np.zeros((2, 5)))
        assert vals.shape == (4, 2, 5)


class TestGaussRule:
    def test_legendre_one_node(self):
        rule = gauss_rule(legendre(), 1)
        np.testing.assert_allclose(rule.nodes, [0.0], atol=1e-15)
        np.testing.assert_allclose(rule.weights, [1.0])

    @pytest.mark.parametrize(
        "fam, nodes",
        [(legendre(), [-1 / math.sqrt(3), 1 / math.sqrt(3)]), (hermite(), [-1.0, 1.0])],
    )
    def test_two_nodes(self, fam, nodes):
        rule = gauss_rule(fam, 2)
        np.testing.assert_allclose(np.sort(rule.nodes), nodes, atol=1e-14)
        np.testing.assert_allclose(rule.weights, [0.5, 0.5], atol=1e-14)

    @pytest.mark.parametrize("fam", FAMILIES)
    @pytest.mark.parametrize("n", range(1, 11))
    def test_exact_to_degree(self, fam, n):
        rule = gauss_rule(fam, n)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert (rule.weights > 0).all()
        for d in range(2 * n):
            ref = oracles.weight_raw_moment(fam.family, d, fam.alpha, fam.beta)
            got = rule.integrate(rule.nodes**d)
            assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("fam", [hermite(), legendre(), jacobi(1.0, 1.0)], ids=["hermite", "legendre", "jacobi-beta22"])
    def test_symmetric_rule_cancels_odd_integrands(self, fam):
        rule = gauss_rule(fam, 10)
        assert rule.symmetric
        x = rule.nodes
        for k in range(10):
            # x * (x^2)^k is exactly odd in floating point; libm pow need not be
            assert rule.integrate(x * (x * x) ** k) == 0.0

    def test_budget(self):
        small = type(hermite())("hermite", max_order=4)
        with pytest.raises(QuadratureBudgetError):
            small.gauss_rule(6)


class TestInnerProduct:
    @pytest.mark.parametrize("fam", FAMILIES)
    def test_orthogonal_to_constant(self, fam):
        assert abs(inner_product(fam, [0, 1])) < 1e-14

    @pytest.mark.parametrize("fam, n, expected", [(hermite(), 2, 2.0), (legendre(), 2, 0.2), (hermite(), 5, 120.0)])
    def test_norms(self, fam, n, expected):
        assert inner_product(fam, [n, n]) == pytest.approx(expected, rel=1e-13)
        assert fam.norm_sq(n) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("fam", FAMILIES)
    def test_orthogonality(self, fam):
        for i in range(9):
            for j in range(9):
                if i != j:
                    c = inner_product(fam, [i, j]) / math.sqrt(inner_product(fam, [i, i]) * inner_product(fam, [j, j]))
                    assert abs(c) < 1e-9

    @pytest.mark.parametrize("fam", FAMILIES)
    def test_norms_against_oracle(self, fam):
        for n in range(9):
            ref = oracles.inner(fam.family, [n, n], fam.alpha, fam.beta)
            assert fam.norm_sq(n) == pytest.approx(ref, rel=1e-11)
            assert fam.norm_sq(n) > 0

    @pytest.mark.parametrize("fam", FAMILIES)
    def test_triple_products(self, fam):
        for orders in ([1, 1, 2], [2, 3, 1], [3, 3, 4], [2, 2, 2, 2]):
            ref = oracles.inner(fam.family, orders, fam.alpha, fam.beta)
            assert inner_product(fam, orders) == pytest.approx(ref, rel=1e-10, abs=1e-12)


class TestFamilyFor:
    @pytest.mark.parametrize(
        "dist, family",
        [(Gaussian(3, 2), "hermite"), (Uniform(-1, 4), "legendre"), (Beta(2, 2), "jacobi"), (Beta4(3, 3, 0, 5), "jacobi")],
    )
    def test_family(self, dist, family):
        assert family_for(dist).family == family

    @pytest.mark.parametrize("a, b", [(2, 2), (4, 6), (0.5, 3), (3, 1)])
    def test_beta_weight_is_germ_density(self, a, b):
        fam = family_for(Beta(a, b))
        xi = np.linspace(-0.95, 0.95, 17)
        # beta density of (1 + xi)/2 mapped back to [-1, 1]
        ref = Beta(a, b).pdf((1 + xi) / 2) / 2
        np.testing.assert_allclose(fam.weight_pdf(xi), ref, rtol=1e-12)

    @pytest.mark.parametrize("a, b", [(2, 2), (4, 6), (0.5, 3)])
    def test_germ_samples_match_weight(self, a, b):
        fam = family_for(Beta(a, b))
        xi = fam.sample(200_000, np.random.default_rng(1))
        ref = oracles.weight_raw_moment("jacobi", 1, fam.alpha, fam.beta)
        assert abs(xi.mean() - ref) < 5 * xi.std() / math.sqrt(len(xi))


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(-0.9, 6), beta=st.floats(-0.9, 6), i=st.integers(0, 8), j=st.integers(0, 8))
def test_jacobi_orthogonality_property(alpha, beta, i, j):
    fam = jacobi(alpha, beta)
    ip = inner_product(fam, [i, j])
    if i == j:
        assert ip > 0
    else:
        assert abs(ip) < 1e-9 * math.sqrt(fam.norm_sq(i) * fam.norm_sq(j))
