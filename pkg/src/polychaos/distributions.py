"""Scalar probability distributions for uncertain parameters and initial conditions.

Every non-degenerate distribution is an affine image of a canonical *germ*:

=========  ==================  ===============================
family     germ                map ``x = shift + scale * xi``
=========  ==================  ===============================
gaussian   standard normal     ``mean + sqrt(variance) * xi``
uniform    U(-1, 1)            ``(a + b)/2 + (b - a)/2 * xi``
beta       beta on [-1, 1]     ``(1 + xi)/2``
beta4      beta on [-1, 1]     ``l + (u - l) * (1 + xi)/2``
=========  ==================  ===============================

Gaussian ``data`` is ``(mean, variance)``, not a standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Sequence

import numpy as np
from scipy.special import betaln

DEFAULT_SEED = 20200101


class DistributionError(ValueError):
    """Raised for invalid distribution data."""


def make_rng(seed: int | None = DEFAULT_SEED) -> np.random.Generator:
    """Return the seeded generator threaded through all sampling routines."""
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def _beta_raw_moment(alpha: float, beta: float, m: int) -> float:
    out = 1.0
    for r in range(m):
        out *= (alpha + r) / (alpha + beta + r)
    return out


def _std_normal_raw_moment(m: int) -> float:
    if m % 2:
        return 0.0
    out = 1.0
    for k in range(m - 1, 0, -2):
        out *= k
    return out


class Distribution:
    """Base class; concrete families are frozen dataclasses below."""

    kind: ClassVar[str]
    arity: ClassVar[int]

    @property
    def data(self) -> tuple[float, ...]:
        raise NotImplementedError

    @property
    def is_deterministic(self) -> bool:
        return False

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def raw_moment(self, m: int) -> float:
        raise NotImplementedError

    def germ_map(self) -> tuple[float, float]:
        """``(shift, scale)`` with ``x = shift + scale * xi`` on the canonical germ."""
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        from .orthopoly import family_for

        shift, scale = self.germ_map()
        return shift + scale * family_for(self).sample(n, rng)

    def mean(self) -> float:
        return self.raw_moment(1)

    def variance(self) -> float:
        return self.raw_moment(2) - self.raw_moment(1) ** 2

    def germ_key(self) -> tuple:
        """Identifies the canonical germ; equal keys share one polynomial family."""
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float
    var: float

    kind: ClassVar[str] = "gaussian"
    arity: ClassVar[int] = 2

    def __post_init__(self):
        if not self.var > 0:
            raise DistributionError(f"gaussian variance must be > 0, got {self.var}")

    @property
    def data(self):
        return (self.mu, self.var)

    @property
    def support(self):
        return (-math.inf, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x - self.mu) ** 2 / self.var) / math.sqrt(2 * math.pi * self.var)

    def raw_moment(self, m):
        sd = math.sqrt(self.var)
        return sum(
            math.comb(m, k) * self.mu ** (m - k) * sd**k * _std_normal_raw_moment(k)
            for k in range(m + 1)
        )

    def germ_map(self):
        return (self.mu, math.sqrt(self.var))

    def germ_key(self):
        return ("hermite",)


@dataclass(frozen=True)
class Uniform(Distribution):
    lower: float
    upper: float

    kind: ClassVar[str] = "uniform"
    arity: ClassVar[int] = 2

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DistributionError(f"uniform needs lower < upper, got {self.lower}, {self.upper}")

    @property
    def data(self):
        return (self.lower, self.upper)

    @property
    def support(self):
        return (self.lower, self.upper)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, 1.0 / (self.upper - self.lower), 0.0)

    def raw_moment(self, m):
        a, b = self.lower, self.upper
        return (b ** (m + 1) - a ** (m + 1)) / ((m + 1) * (b - a))

    def germ_map(self):
        return (0.5 * (self.lower + self.upper), 0.5 * (self.upper - self.lower))

    def germ_key(self):
        return ("legendre",)


@dataclass(frozen=True)
class Beta4(Distribution):
    """Four-parameter beta on ``[lower, upper]``."""

    alpha: float
    beta: float
    lower: float = 0.0
    upper: float = 1.0

    kind: ClassVar[str] = "beta4"
    arity: ClassVar[int] = 4

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DistributionError(f"beta shapes must be > 0, got {self.alpha}, {self.beta}")
        if not self.lower < self.upper:
            raise DistributionError(f"beta support needs lower < upper, got {self.lower}, {self.upper}")

    @property
    def data(self):
        return (self.alpha, self.beta, self.lower, self.upper)

    @property
    def support(self):
        return (self.lower, self.upper)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        width = self.upper - self.lower
        y = (x - self.lower) / width
        inside = (y >= 0.0) & (y <= 1.0)
        yc = np.clip(y, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = (
                (self.alpha - 1) * np.log(yc)
                + (self.beta - 1) * np.log1p(-yc)
                - betaln(self.alpha, self.beta)
            )
            # shape exactly 1 would give 0 * log(0) at the matching endpoint
            if self.alpha == 1:
                logp = np.where(yc == 0, (self.beta - 1) * np.log1p(-yc) - betaln(1, self.beta), logp)
            if self.beta == 1:
                logp = np.where(yc == 1, (self.alpha - 1) * np.log(yc) - betaln(self.alpha, 1), logp)
            dens = np.exp(logp) / width
        return np.where(inside, dens, 0.0)

    def raw_moment(self, m):
        lo, width = self.lower, self.upper - self.lower
        return sum(
            math.comb(m, k) * lo ** (m - k) * width**k * _beta_raw_moment(self.alpha, self.beta, k)
            for k in range(m + 1)
        )

    def germ_map(self):
        half = 0.5 * (self.upper - self.lower)
        return (self.lower + half, half)

    def germ_key(self):
        return ("jacobi", float(self.alpha), float(self.beta))


class Beta(Beta4):
    """Standard beta on ``[0, 1]``."""

    kind: ClassVar[str] = "beta"
    arity: ClassVar[int] = 2

    def __init__(self, alpha: float, beta: float):
        super().__init__(alpha, beta, 0.0, 1.0)

    def __repr__(self):
        return f"Beta(alpha={self.alpha!r}, beta={self.beta!r})"

    @property
    def data(self):
        return (self.alpha, self.beta)


@dataclass(frozen=True)
class Dirac(Distribution):
    value: float

    kind: ClassVar[str] = "dirac"
    arity: ClassVar[int] = 1

    @property
    def data(self):
        return (self.value,)

    @property
    def is_deterministic(self):
        return True

    @property
    def support(self):
        return (self.value, self.value)

    def pdf(self, x):
        raise DistributionError("dirac distribution has no density representation")

    def raw_moment(self, m):
        return float(self.value) ** m

    def germ_map(self):
        return (float(self.value), 0.0)

    def germ_key(self):
        return ("dirac",)

    def sample(self, n, rng):
        return np.full(n, float(self.value))


FAMILIES: dict[str, type[Distribution]] = {
    cls.kind: cls for cls in (Gaussian, Uniform, Beta, Beta4, Dirac)
}


def from_spec(pdf: str, data: Sequence[float]) -> Distribution:
    """Build a distribution from the ``pdf`` / ``data`` pair of a system document."""
    try:
        cls = FAMILIES[pdf.lower()]
    except (KeyError, AttributeError):
        raise DistributionError(f"unknown pdf {pdf!r}; expected one of {sorted(FAMILIES)}") from None
    data = [float(v) for v in np.atleast_1d(data)]
    if len(data) != cls.arity:
        raise DistributionError(f"pdf {pdf!r} expects {cls.arity} data values, got {len(data)}")
    return cls(*data)


def pdf_eval(d: Distribution, x):
    return d.pdf(x)


def raw_moment(d: Distribution, m: int) -> float:
    if m < 1:
        raise ValueError("moment order must be >= 1")
    return d.raw_moment(m)


def sample(d: Distribution, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("sample count must be >= 1")
    return d.sample(n, rng)
