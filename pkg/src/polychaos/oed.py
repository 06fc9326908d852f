"""Input design for discriminating two enzyme kinetics hypotheses.

Both candidate models describe substrate ``x1`` and complex ``x2`` under
mass-action kinetics; the input ``u`` adds to the dissociation rate ``p2``.
A piecewise-constant ``u`` is chosen to maximize the Bhattacharyya distance
between the two models' predicted densities of ``x2`` at the measurement time.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .pcebasis import MomentTensor, moment_tensor
from .compose import ExpandedSystem, compose
from .distributions import make_rng
from .integrate import SimOptions
from .modelir import SystemDef, load_system
from .postprocess import (
    Beta4Fit,
    FitError,
    PrecisionWarning,
    bhattacharyya,
    calc_moments,
    fit_beta4,
    outer_bounds,
)
from .simulate import sample_variables, sim_galerkin, sim_montecarlo

log = logging.getLogger(__name__)

HENRI_RHS = (
    "(p1 + p3)*(x2 - 1)*x1 + (p2 + u)*x2",
    "p1*(1 - x2)*x1 - (p2 + u)*x2",
)
MICHAELIS_MENTEN_RHS = (
    "p1*(x2 - 1)*x1 + (p2 + u)*x2",
    "p1*(1 - x2)*x1 - (p3 + p2 + u)*x2",
)
INPUT_TIMES = (0.0, 1.0, 2.0, 3.0, 4.0)
# scores closer than this are quadrature noise, not discrimination
SCORE_TOL = 1e-9


class NonDiscriminatingError(RuntimeError):
    pass


def reaction_model(rhs: Sequence[str], p_bounds: tuple[float, float]) -> SystemDef:
    return load_system(
        {
            "states": [
                {"name": "x1", "pdf": "beta4", "data": [3, 3, 0.96, 0.98], "rhs": rhs[0]},
                {"name": "x2", "pdf": "beta4", "data": [3, 3, 0.01, 0.03], "rhs": rhs[1]},
            ],
            "parameters": [{"name": f"p{i}", "pdf": "uniform", "data": list(p_bounds)} for i in (1, 2, 3)],
            "inputs": [
                {"name": "u", "rhs": "piecewise(u_t, u_v, t)", "u_t": list(INPUT_TIMES), "u_v": [0.0] * 5}
            ],
        }
    )


@dataclass(frozen=True, eq=False)
class OedProblem:
    model_a: SystemDef
    model_b: SystemDef
    measured_output: str = "x2"
    measurement_time: float = 10.0
    input_breakpoints: tuple[float, ...] = INPUT_TIMES
    input_bounds: np.ndarray = field(default_factory=lambda: np.tile([0.0, 5.0], (5, 1)))
    pce_order: int = 2
    dt: float = 0.05

    def __post_init__(self):
        bounds = np.asarray(self.input_bounds, dtype=float).reshape(-1, 2)
        if len(bounds) != len(self.input_breakpoints):
            raise ValueError("one [lo, hi] bound pair is needed per input segment")
        if not np.isfinite(bounds).all() or (bounds[:, 0] > bounds[:, 1]).any():
            raise ValueError("input bounds must be finite with lo <= hi")
        if self.measurement_time < self.input_breakpoints[-1]:
            raise ValueError("measurement time precedes the last input breakpoint")
        object.__setattr__(self, "input_bounds", bounds)
        expanded = tuple(compose(m, self.pce_order) for m in (self.model_a, self.model_b))
        object.__setattr__(self, "_expanded", expanded)
        tensors = [moment_tensor(expanded[0].basis, m) for m in range(1, 5)]
        object.__setattr__(self, "_moment_tensors", tensors)

    @property
    def expanded(self) -> tuple[ExpandedSystem, ExpandedSystem]:
        return self._expanded

    @property
    def moment_tensors(self) -> list[MomentTensor]:
        return self._moment_tensors

    @property
    def options(self) -> SimOptions:
        return SimOptions((0.0, self.measurement_time), self.dt)

    def overrides(self, u_v) -> dict:
        u_v = np.asarray(u_v, dtype=float)
        if u_v.shape != (len(self.input_breakpoints),):
            raise ValueError(f"expected {len(self.input_breakpoints)} input values, got shape {u_v.shape}")
        return {"u_t": np.asarray(self.input_breakpoints, dtype=float), "u_v": u_v}


def build_reference_problem(pce_order: int = 2) -> OedProblem:
    return OedProblem(
        reaction_model(HENRI_RHS, (0.9, 1.1)),
        reaction_model(MICHAELIS_MENTEN_RHS, (0.9, 1.15)),
        pce_order=pce_order,
    )


def output_fits(prob: OedProblem, u_v) -> tuple[Beta4Fit, Beta4Fit]:
    """Beta4 fits of the measured output of both models at the measurement time."""
    fits = []
    for es in prob.expanded:
        res = sim_galerkin(es, prob.options, prob.overrides(u_v))
        final = res.coeffs[prob.measured_output][-1:]
        fits.append(fit_beta4(*calc_moments(prob.moment_tensors, final).raw[:, 0]))
    return fits[0], fits[1]


def discrimination_score(prob: OedProblem, u_v) -> float:
    u_v = np.asarray(u_v, dtype=float)
    lo, hi = prob.input_bounds.T
    if ((u_v < lo - 1e-12) | (u_v > hi + 1e-12)).any():
        raise ValueError(f"input {u_v.tolist()} violates the bounds")
    return bhattacharyya(*output_fits(prob, u_v))


@dataclass
class OedResult:
    u_v: np.ndarray
    score: float
    evaluations: int
    zero_score: float
    trace: list[dict]

    @property
    def simulations(self) -> int:
        return 2 * self.evaluations


def optimize_input(
    prob: OedProblem,
    starts: int = 3,
    seed: int | None = None,
    max_evals_per_start: int = 150,
) -> OedResult:
    """Maximize the discrimination score by bounded Nelder-Mead from several starts.

    The first start is the centre of the bounds, the others are uniform draws.
    A start ends early once the densities separate completely (infinite score).
    """
    if starts < 1:
        raise ValueError("need at least one start")
    lo, hi = prob.input_bounds.T
    free = hi > lo
    rng = make_rng(seed)
    trace: list[dict] = []
    best = {"score": -math.inf, "u": None}

    class _Separated(Exception):
        pass

    def full(z):
        u = lo.copy()
        u[free] = np.clip(z, lo[free], hi[free])
        return u

    def score_of(u, start):
        try:
            s = discrimination_score(prob, u)
        except FitError as exc:
            log.debug("fit failed for %s: %s", u, exc)
            s = math.nan
        if s > best["score"]:
            best.update(score=s, u=u.copy())
        trace.append({"evaluation": len(trace) + 1, "start": start, "u_v": u.tolist(), "score": s, "best": best["score"]})
        return s

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        zero_score = discrimination_score(prob, np.clip(np.zeros(len(lo)), lo, hi))
        for k in range(starts):
            x0 = 0.5 * (lo + hi) if k == 0 else rng.uniform(lo, hi)
            if not free.any():
                score_of(full(x0[free]), k)
                continue

            def objective(z):
                s = score_of(full(z), k)
                if s == math.inf:
                    raise _Separated
                return -s if np.isfinite(s) else math.inf

            z0 = x0[free]
            # quarter-range steps, pointing inward when the upper bound is near
            step = 0.25 * (hi[free] - lo[free])
            step = np.where(z0 + step <= hi[free], step, -step)
            simplex = np.vstack([z0, z0 + np.diag(step)])
            try:
                minimize(
                    objective,
                    z0,
                    method="Nelder-Mead",
                    bounds=list(zip(lo[free], hi[free])),
                    options={"initial_simplex": simplex, "maxfev": max_evals_per_start, "xatol": 1e-3, "fatol": 1e-6},
                )
            except _Separated:
                pass
    if best["u"] is None or (free.any() and not best["score"] > zero_score + SCORE_TOL):
        raise NonDiscriminatingError(
            f"no start improved on the zero-input score {zero_score:.6g}; "
            f"{len(trace)} evaluations, best {best['score']:.6g}"
        )
    return OedResult(best["u"], best["score"], len(trace), zero_score, trace)


def mc_envelopes(prob: OedProblem, u_v, n: int = 2000, seed: int | None = None, dt: float | None = None):
    """Monte Carlo outer bounds of the measured output for both models.

    Returns ``(times, [(lo_a, hi_a), (lo_b, hi_b)])``.
    """
    rng = make_rng(seed)
    opts = SimOptions((0.0, prob.measurement_time), dt or prob.dt)
    envs = []
    for es in prob.expanded:
        mc = sim_montecarlo(es, opts, sample_variables(es, n, rng), prob.overrides(u_v))
        envs.append(outer_bounds(mc.variable(prob.measured_output)))
    return opts.grid, envs


def envelope_gap(envs) -> np.ndarray:
    """Signed distance between two envelopes per time; positive where they are disjoint."""
    (la, ha), (lb, hb) = envs
    return np.maximum(lb - ha, la - hb)
