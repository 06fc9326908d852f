"""One-dimensional orthogonal polynomial families and their Gauss rules.

All weights are probability densities on the canonical germ:

* Hermite (probabilists'): standard normal density.
* Legendre: ``1/2`` on ``[-1, 1]``.
* Jacobi: beta density mapped to ``[-1, 1]``; a ``Beta(a, b)`` variable gives the
  classical Jacobi exponents ``(1 - x)**(b - 1) * (1 + x)**(a - 1)``.

Polynomials keep their classical normalisation (``He_n`` monic, ``P_n(1) = 1``,
standard Jacobi ``P_n^(alpha, beta)``); squared norms are carried explicitly.
Evaluation goes through the monic three-term recurrence
``pi_{n+1} = (x - a_n) pi_n - b_n pi_{n-1}`` followed by a leading-coefficient
scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

DEFAULT_MAX_ORDER = 64


class QuadratureBudgetError(ValueError):
    """Raised when a requested polynomial degree exceeds the available rule."""


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    symmetric: bool = False  # nodes[i] == -nodes[-1 - i] and equal weights

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the trailing (node) axis.

        Symmetric rules add mirror pairs first, so odd integrands cancel exactly.
        """
        values = np.asarray(values)
        if not self.symmetric:
            return values @ self.weights
        h = len(self.nodes) // 2
        out = (values[..., :h] + values[..., ::-1][..., :h]) @ self.weights[:h]
        if len(self.nodes) % 2:
            out = out + values[..., h] * self.weights[h]
        return out


@dataclass(frozen=True, eq=False)
class PolyFamily1D:
    """A classical orthogonal family on its canonical germ.

    ``alpha`` and ``beta`` are the Jacobi exponents on ``(1 - x)`` and ``(1 + x)``
    and are ignored for the other families.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    max_order: int = DEFAULT_MAX_ORDER
    _rec: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.family not in ("hermite", "legendre", "jacobi"):
            raise ValueError(f"unknown polynomial family {self.family!r}")
        if self.family == "jacobi" and not (self.alpha > -1 and self.beta > -1):
            raise ValueError("jacobi exponents must exceed -1")
        object.__setattr__(self, "_rec", self._recurrence(self.max_order + 1))

    def __eq__(self, other):
        return isinstance(other, PolyFamily1D) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self) -> tuple:
        if self.family == "jacobi":
            return ("jacobi", self.alpha, self.beta)
        return (self.family,)

    # -- recurrence --------------------------------------------------------

    def _recurrence(self, n: int):
        a = np.zeros(n)
        b = np.zeros(n)
        lead = np.ones(n)
        b[0] = 1.0
        if self.family == "hermite":
            b[1:] = np.arange(1, n)
        elif self.family == "legendre":
            k = np.arange(1, n, dtype=float)
            b[1:] = k**2 / (4 * k**2 - 1)
            for m in range(1, n):
                lead[m] = lead[m - 1] * (2 * m - 1) / m
        else:
            al, be = self.alpha, self.beta
            s = al + be
            a[0] = (be - al) / (s + 2)
            if n > 1:
                k = np.arange(1, n, dtype=float)
                a[1:] = (be**2 - al**2) / ((2 * k + s) * (2 * k + s + 2))
                b[1] = 4 * (al + 1) * (be + 1) / ((s + 2) ** 2 * (s + 3))
            if n > 2:
                k = np.arange(2, n, dtype=float)
                b[2:] = (
                    4 * k * (k + al) * (k + be) * (k + s)
                    / ((2 * k + s) ** 2 * (2 * k + s + 1) * (2 * k + s - 1))
                )
            for m in range(1, n):
                # k_m = (m + s + 1)_m / (2^m m!)
                poch = math.prod(m + s + 1 + i for i in range(m))
                lead[m] = poch / (2**m * math.factorial(m))
        return a, b, lead

    def recurrence(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Monic coefficients ``(a_0..a_{n-1}, b_0..b_{n-1})`` with ``b_0 = 1``."""
        self._check(n - 1)
        a, b, _ = self._rec
        return a[:n].copy(), b[:n].copy()

    def leading(self, n: int) -> float:
        self._check(n)
        return float(self._rec[2][n])

    def norm_sq(self, n: int) -> float:
        """``<phi_n, phi_n>`` under the probability weight."""
        self._check(n)
        _, b, lead = self._rec
        return float(lead[n] ** 2 * np.prod(b[1 : n + 1]))

    def norms_sq(self, n: int) -> np.ndarray:
        return np.array([self.norm_sq(k) for k in range(n + 1)])

    def _check(self, n: int):
        if n > self.max_order:
            raise ValueError(f"order {n} exceeds max_order {self.max_order} of {self.family}")

    # -- evaluation --------------------------------------------------------

    def eval_all(self, n: int, xi) -> np.ndarray:
        """Values of ``phi_0..phi_n`` at ``xi``; shape ``(n + 1,) + shape(xi)``."""
        self._check(n)
        xi = np.asarray(xi, dtype=float)
        a, b, lead = self._rec
        out = np.empty((n + 1,) + xi.shape)
        out[0] = 1.0
        if n >= 1:
            out[1] = xi - a[0]
        for k in range(1, n):
            out[k + 1] = (xi - a[k]) * out[k] - b[k] * out[k - 1]
        return out * lead[: n + 1].reshape((-1,) + (1,) * xi.ndim)

    def eval(self, n: int, xi):
        return self.eval_all(n, xi)[n]

    # -- quadrature --------------------------------------------------------

    def gauss_rule(self, n: int) -> QuadratureRule:
        """Golub-Welsch rule with ``n`` nodes, exact up to degree ``2n - 1``."""
        if n < 1:
            raise ValueError("node count must be >= 1")
        if n > self.max_order:
            raise QuadratureBudgetError(
                f"{self.family} rule with {n} nodes exceeds max_order {self.max_order}"
            )
        return _gauss_rule(self, n)

    def rule_for_degree(self, degree: int) -> QuadratureRule:
        """Smallest Gauss rule integrating polynomials of ``degree`` exactly."""
        return self.gauss_rule(max(1, math.ceil((degree + 1) / 2)))

    def inner_product(self, orders) -> float:
        """``integral of prod(phi_k for k in orders)`` against the weight."""
        orders = list(orders)
        if not orders:
            return 1.0
        rule = self.rule_for_degree(sum(orders))
        vals = self.eval_all(max(orders), rule.nodes)
        return float(rule.integrate(np.prod(vals[orders], axis=0)))

    # -- germ sampling -----------------------------------------------------

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.family == "hermite":
            return rng.standard_normal(n)
        if self.family == "legendre":
            return rng.uniform(-1.0, 1.0, n)
        # exponent on (1 + x) belongs to the left end of the beta variable
        return 2.0 * rng.beta(self.beta + 1, self.alpha + 1, n) - 1.0

    def weight_pdf(self, xi):
        """Probability density of the germ."""
        xi = np.asarray(xi, dtype=float)
        if self.family == "hermite":
            return np.exp(-0.5 * xi**2) / math.sqrt(2 * math.pi)
        if self.family == "legendre":
            return np.where(np.abs(xi) <= 1, 0.5, 0.0)
        from .distributions import Beta4

        return Beta4(self.beta + 1, self.alpha + 1, -1.0, 1.0).pdf(xi)


@lru_cache(maxsize=256)
def _gauss_rule(fam: PolyFamily1D, n: int) -> QuadratureRule:
    a, b = fam.recurrence(n)
    nodes = eigh_tridiagonal(a, np.sqrt(b[1:]), eigvals_only=True)
    # Christoffel weights are more accurate than squared eigenvector entries
    mon = fam.eval_all(n - 1, nodes) / np.array([fam.leading(k) for k in range(n)])[:, None]
    hk = np.cumprod(b[:n])
    weights = 1.0 / np.sum(mon**2 / hk[:, None], axis=0)
    weights /= weights.sum()
    symmetric = fam.family != "jacobi" or fam.alpha == fam.beta
    if symmetric:
        # symmetric weight: make the rule exactly symmetric
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, symmetric)


@lru_cache(maxsize=None)
def hermite() -> PolyFamily1D:
    return PolyFamily1D("hermite")


@lru_cache(maxsize=None)
def legendre() -> PolyFamily1D:
    return PolyFamily1D("legendre")


@lru_cache(maxsize=None)
def jacobi(alpha: float, beta: float) -> PolyFamily1D:
    return PolyFamily1D("jacobi", float(alpha), float(beta))


def family_for(dist) -> PolyFamily1D:
    """Polynomial family matched to the germ of a distribution."""
    key = dist.germ_key()
    if key[0] == "hermite":
        return hermite()
    if key[0] == "legendre":
        return legendre()
    if key[0] == "jacobi":
        _, shape_a, shape_b = key
        return jacobi(shape_b - 1.0, shape_a - 1.0)
    raise ValueError(f"distribution {dist!r} has no polynomial germ")


def eval_poly(f: PolyFamily1D, n: int, xi):
    return f.eval(n, xi)


def gauss_rule(f: PolyFamily1D, n: int) -> QuadratureRule:
    return f.gauss_rule(n)


def inner_product(f: PolyFamily1D, orders) -> float:
    return f.inner_product(orders)
