"""Moments, beta fitting, PCE sampling and density comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import roots_legendre

from .pcebasis import BasisSet, MomentTensor
from .distributions import Beta4, Distribution
from .integrate import Trajectory

BHATTACHARYYA_NODES = 200
BHATTACHARYYA_RTOL = 1e-6


class FitError(ValueError):
    pass


class DegenerateDistributionError(FitError):
    pass


class InfeasibleMomentsError(FitError):
    def __init__(self, message: str, margin: float):
        self.margin = margin
        super().__init__(f"{message} (feasibility margin {margin:.6g})")


class PrecisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MomentSeries:
    """Raw and central moments of orders ``1..m``; rows are orders, columns times."""

    times: np.ndarray
    raw: np.ndarray
    central: np.ndarray

    @property
    def orders(self) -> list[int]:
        return list(range(1, self.raw.shape[0] + 1))

    def at(self, k: int) -> np.ndarray:
        """Raw moments at time index ``k``."""
        return self.raw[:, k]


def raw_to_central(raw: np.ndarray) -> np.ndarray:
    """Central moments from raw ones (rows ``1..m``) by the binomial expansion."""
    raw = np.asarray(raw, dtype=float)
    m = raw.shape[0]
    nu = np.concatenate([np.ones((1,) + raw.shape[1:]), raw])
    mu = nu[1]
    central = np.zeros_like(raw)
    for k in range(2, m + 1):
        acc = np.zeros(raw.shape[1:])
        for j in range(k + 1):
            acc = acc + math.comb(k, j) * nu[j] * (-mu) ** (k - j)
        central[k - 1] = acc
    if m >= 2:
        central[1] = np.maximum(central[1], 0.0)
    return central


def calc_moments(tensors: Sequence[MomentTensor], coeffs: Trajectory | np.ndarray, times=None) -> MomentSeries:
    """Moments of orders ``1..len(tensors)`` from coefficient rows of shape ``(T, size)``."""
    if isinstance(coeffs, Trajectory):
        times, coeffs = coeffs.times, coeffs.values
    x = np.atleast_2d(np.asarray(coeffs, dtype=float))
    for order, mt in enumerate(tensors, start=1):
        if mt.m != order:
            raise ValueError(f"tensor list must hold orders 1..m in sequence; position {order} has order {mt.m}")
        if mt.size != x.shape[-1]:
            raise ValueError(f"coefficient length {x.shape[-1]} does not match basis size {mt.size}")
    raw = np.array([mt.apply(x) for mt in tensors]).reshape(len(tensors), x.shape[0])
    if times is None:
        times = np.arange(x.shape[0], dtype=float)
    return MomentSeries(np.asarray(times, dtype=float), raw, raw_to_central(raw))


@dataclass(frozen=True)
class Beta4Fit:
    alpha: float
    beta: float
    lower: float
    upper: float

    def distribution(self) -> Beta4:
        return Beta4(self.alpha, self.beta, self.lower, self.upper)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "lower": self.lower, "upper": self.upper}


def beta_region_margin(beta1: float, beta2: float) -> float:
    """Signed distance to the edge of the beta region in the (skew^2, kurtosis) plane.

    The region lies strictly between ``beta2 = beta1 + 1`` and the gamma line
    ``beta2 = 3 + 1.5 beta1``; positive values are inside.
    """
    return min(beta2 - beta1 - 1.0, 3.0 + 1.5 * beta1 - beta2)


def fit_beta4(nu1: float, nu2: float, nu3: float, nu4: float) -> Beta4Fit:
    """Four-parameter beta with the given first four raw moments (Pearson type I inversion)."""
    central = raw_to_central(np.array([nu1, nu2, nu3, nu4], dtype=float).reshape(4, 1))[:, 0]
    mean = float(nu1)
    var = float(nu2 - nu1 * nu1)
    if not var > 0 or not np.isfinite(var):
        raise DegenerateDistributionError(f"variance {var:.6g} is not positive; the distribution is degenerate")
    sd = math.sqrt(var)
    gamma1 = central[2] / sd**3
    beta1 = gamma1**2
    beta2 = central[3] / var**2
    margin = beta_region_margin(beta1, beta2)
    if not margin > 0:
        raise InfeasibleMomentsError(
            f"skewness^2={beta1:.6g}, kurtosis={beta2:.6g} lie outside the beta family", margin
        )
    r = 6.0 * (beta2 - beta1 - 1.0) / (6.0 + 3.0 * beta1 - 2.0 * beta2)
    root = (r + 2.0) * gamma1 / math.sqrt((r + 2.0) ** 2 * beta1 + 16.0 * (r + 1.0))
    alpha = 0.5 * r * (1.0 - root)
    beta = 0.5 * r * (1.0 + root)
    span = sd * (alpha + beta) * math.sqrt((alpha + beta + 1.0) / (alpha * beta))
    lower = mean - span * alpha / (alpha + beta)
    return Beta4Fit(float(alpha), float(beta), float(lower), float(lower + span))


def fit_samples(samples) -> Beta4Fit:
    x = np.asarray(samples, dtype=float).ravel()
    return fit_beta4(*(np.mean(x**k) for k in range(1, 5)))


def sample_pce(b: BasisSet, coeffs, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` realizations of ``sum_i c_i phi_i(xi)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (b.size,):
        raise ValueError(f"expected {b.size} coefficients, got shape {coeffs.shape}")
    xi = np.empty((b.n_xi, n))
    for d, fam in enumerate(b.families):
        xi[d] = fam.sample(n, rng)
    return coeffs @ b.evaluate(xi)


# -- Bhattacharyya distance --------------------------------------------------

Density = Union[Distribution, Beta4Fit, np.ndarray, Sequence[float]]


def _as_distribution(p: Density) -> Distribution:
    if isinstance(p, Distribution):
        if p.is_deterministic:
            raise ValueError("a Dirac distribution has no density")
        return p
    if isinstance(p, Beta4Fit):
        return p.distribution()
    return fit_samples(p).distribution()


def _window(d: Distribution, width: float = 40.0) -> tuple[float, float]:
    lo, hi = d.support
    sd = math.sqrt(d.variance())
    return (lo if np.isfinite(lo) else d.mean() - width * sd, hi if np.isfinite(hi) else d.mean() + width * sd)


def _gl(a: float, b: float, n: int, panels: int = 1):
    x, w = roots_legendre(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def bhattacharyya(p: Density, q: Density, nodes: int = BHATTACHARYYA_NODES) -> float:
    """``-ln int sqrt(p q)``; ``inf`` when the densities share no support.

    Sample arrays are replaced by their moment-matched four-parameter beta.
    The integral is taken over the common support, where ``sqrt(p q)`` is
    nonzero; a second pass with the interval split in two checks the rule.
    """
    dp, dq = _as_distribution(p), _as_distribution(q)
    (pl, pu), (ql, qu) = dp.support, dq.support
    lo, hi = max(pl, ql), min(pu, qu)
    if not lo < hi:
        return math.inf
    # infinite ends: cover the region where either density has mass
    wins = [_window(dp), _window(dq)]
    if not np.isfinite(lo):
        lo = min(w[0] for w in wins)
    if not np.isfinite(hi):
        hi = max(w[1] for w in wins)

    def coefficient(panels):
        x, w = _gl(lo, hi, nodes, panels)
        return float(np.sqrt(dp.pdf(x) * dq.pdf(x)) @ w)

    bc = coefficient(1)
    fine = coefficient(2)
    if abs(fine - bc) > BHATTACHARYYA_RTOL * max(abs(fine), 1e-300):
        warnings.warn(
            f"Bhattacharyya quadrature changed by {abs(fine - bc):.3g} on refinement", PrecisionWarning, stacklevel=2
        )
    bc = fine
    if bc <= 0.0:
        return math.inf
    return max(0.0, -math.log(min(bc, 1.0)))


def outer_bounds(samples) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise min and max over the leading (sample) axis."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 0 or x.shape[0] < 1:
        raise ValueError("outer bounds need at least one sample")
    return x.min(axis=0), x.max(axis=0)
