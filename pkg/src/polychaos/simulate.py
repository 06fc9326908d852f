"""Galerkin, collocation and Monte Carlo simulation of a composed system."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

import numpy as np
from scipy.linalg import qr, solve_triangular

from .pcebasis import BasisSet
from .compose import ExpandedSystem
from .integrate import IntegrationError, SimOptions, Trajectory, integrate
from .modelir import piecewise  # noqa: F401  (re-exported input helper)

log = logging.getLogger(__name__)

MC_BATCH = 20_000


class RegressionError(ValueError):
    pass


@dataclass(frozen=True)
class PCEResult:
    """PCE coefficient trajectories for every state and output."""

    method: str
    times: np.ndarray
    basis: BasisSet
    coeffs: Mapping[str, np.ndarray]  # name -> (T, size)

    def trajectory(self, name: str) -> Trajectory:
        return Trajectory(self.times, self.coeffs[name])

    @property
    def names(self) -> list[str]:
        return list(self.coeffs)


@dataclass(frozen=True)
class MCResult:
    """Sampled trajectories of the original states (and outputs)."""

    times: np.ndarray
    names: list[str]
    values: np.ndarray  # (n, T, n_vars)
    samples: np.ndarray = field(repr=False)  # (n_xi, n) variable samples

    def __len__(self):
        return self.values.shape[0]

    def trajectory(self, k: int) -> Trajectory:
        return Trajectory(self.times, self.values[k])

    def variable(self, name: str) -> np.ndarray:
        """All samples of one variable, shape ``(n, T)``."""
        return self.values[:, :, self.names.index(name)]


def sample_basis(es: ExpandedSystem, n: int, rng: np.random.Generator) -> np.ndarray:
    """Germ samples, one row per germ dimension."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    out = np.empty((es.basis.n_xi, n))
    for g in es.germs:
        out[g.dim] = g.family.sample(n, rng)
    return out


def sample_variables(es: ExpandedSystem, n: int, rng: np.random.Generator) -> np.ndarray:
    """Samples of the uncertain variables (Dirac ones excluded), in germ order."""
    xi = sample_basis(es, n, rng)
    realized = es.realize(xi)
    return np.array([realized[name] for name in es.germs.names]).reshape(len(es.germs), n)


def sim_galerkin(es: ExpandedSystem, opts: SimOptions, input_overrides: Mapping[str, Any] | None = None) -> PCEResult:
    traj = integrate(
        lambda t, y: es.rhs(t, y, input_overrides),
        es.x0_hat,
        opts,
        breakpoints=es.system.breakpoints(input_overrides),
    )
    coeffs = {name: es.block(traj.values, name) for name in es.state_names}
    if es.system.outputs:
        outs = es.output_coeffs(traj.times, traj.values, input_overrides)
        for k, name in enumerate(es.output_names):
            coeffs[name] = outs[:, k * es.size : (k + 1) * es.size]
    return PCEResult("galerkin", traj.times, es.basis, coeffs)


def _nominal_batch(es: ExpandedSystem, opts: SimOptions, params: Mapping[str, np.ndarray], n: int, overrides):
    """Integrate the nominal model for ``n`` realizations; returns ``(T, n_vars, n)``."""
    params = {**es.deterministic_values(), **params}
    y0 = es.initial_states(params, n)
    traj = integrate(
        lambda t, y: es.nominal_rhs(t, y, params, overrides),
        y0,
        opts,
        breakpoints=es.system.breakpoints(overrides),
    )
    values = traj.values  # (T, n_states, n)
    if es.system.outputs:
        outs = es.nominal_outputs(traj.times, np.moveaxis(values, 1, 0), params, overrides)
        values = np.concatenate([values, np.moveaxis(outs, 0, 1)], axis=1)
    return traj.times, values


def _run_samples(es, opts, realized: Mapping[str, np.ndarray], n: int, overrides, batch: int):
    for start in range(0, n, batch):
        stop = min(n, start + batch)
        chunk = {k: v[start:stop] for k, v in realized.items()}
        try:
            times, values = _nominal_batch(es, opts, chunk, stop - start, overrides)
        except IntegrationError:
            # locate the first failing sample for the report
            for k in range(start, stop):
                one = {name: v[k : k + 1] for name, v in realized.items()}
                try:
                    _nominal_batch(es, opts, one, 1, overrides)
                except IntegrationError as exc:
                    raise IntegrationError(f"sample {k}: {exc}", exc.t) from None
            raise
        yield start, times, values


def _sample_array(samples, rows: int) -> np.ndarray:
    """``(rows, n)`` samples; a 1-D array is accepted when ``rows == 1``."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1 and rows == 1:
        samples = samples[None, :]
    if samples.ndim != 2 or samples.shape[0] != rows:
        raise ValueError(f"expected samples of shape ({rows}, n), got {samples.shape}")
    if samples.shape[1] < 1:
        raise ValueError("sample count must be >= 1")
    return samples


def sim_collocation(
    es: ExpandedSystem,
    opts: SimOptions,
    basis_samples: np.ndarray,
    input_overrides: Mapping[str, Any] | None = None,
    batch: int = MC_BATCH,
) -> PCEResult:
    """Regress PCE coefficients on nominal simulations at germ samples.

    The regression matrix is factored once by column-pivoted QR and reused for
    every state, output and grid time.
    """
    xi = _sample_array(basis_samples, es.basis.n_xi)
    q = xi.shape[1]
    if q < es.size:
        raise RegressionError(f"collocation needs at least {es.size} samples for {es.size} coefficients, got {q}")
    phi = es.basis.evaluate(xi).T  # (q, size)
    Q, R, piv = qr(phi, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[-1] <= 1e-10 * diag[0]:
        raise RegressionError(
            "regression matrix is rank deficient; draw more samples or spread them over the support"
        )
    realized = es.realize(xi)
    blocks = [values for _, times, values in _run_samples(es, opts, realized, q, input_overrides, batch)]
    Y = np.concatenate(blocks, axis=2)  # (T, n_vars, q)
    T, n_vars, _ = Y.shape
    rhs = Q.T @ Y.reshape(T * n_vars, q).T  # (size, T * n_vars)
    sol = np.empty_like(rhs)
    sol[piv] = solve_triangular(R, rhs)
    sol = sol.T.reshape(T, n_vars, es.size)
    names = es.state_names + es.output_names
    coeffs = {name: sol[:, k, :] for k, name in enumerate(names)}
    return PCEResult("collocation", opts.grid, es.basis, coeffs)


def iter_montecarlo(
    es: ExpandedSystem,
    opts: SimOptions,
    variable_samples: np.ndarray,
    input_overrides: Mapping[str, Any] | None = None,
    batch: int = MC_BATCH,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(first_index, values (b, T, n_vars))`` batch by batch."""
    samples = _sample_array(variable_samples, len(es.germs))
    n = samples.shape[1]
    realized = {name: samples[k] for k, name in enumerate(es.germs.names)}
    for start, _, values in _run_samples(es, opts, realized, n, input_overrides, batch):
        yield start, np.transpose(values, (2, 0, 1))


def sim_montecarlo(
    es: ExpandedSystem,
    opts: SimOptions,
    variable_samples: np.ndarray,
    input_overrides: Mapping[str, Any] | None = None,
    batch: int = MC_BATCH,
) -> MCResult:
    samples = _sample_array(variable_samples, len(es.germs))
    parts = [v for _, v in iter_montecarlo(es, opts, samples, input_overrides, batch)]
    return MCResult(opts.grid, es.state_names + es.output_names, np.concatenate(parts), samples)


def regress(phi: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients for ``phi @ c ~= y`` (``phi`` of shape ``(q, size)``)."""
    Q, R, piv = qr(phi, mode="economic", pivoting=True)
    out = np.empty((phi.shape[1],) + np.shape(y)[1:])
    out[piv] = solve_triangular(R, Q.T @ y)
    return out
