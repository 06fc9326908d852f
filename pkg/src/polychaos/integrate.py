"""Explicit ODE integrators on a fixed output grid.

``rk45`` is the Dormand-Prince 5(4) pair with local extrapolation, max-norm
error control and its 4th-order continuous extension for grid output.
``rk4`` and ``euler`` take fixed steps that land on every grid point. All
solvers restart at input breakpoints so discontinuous inputs never fall
inside a step. States may be arrays of any shape; a batch of samples is
integrated as one array with a common step sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SOLVERS = ("rk45", "rk4", "euler")


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} at t={t:.17g}")


@dataclass(frozen=True)
class SimOptions:
    t_span: tuple[float, float] = (0.0, 1.0)
    dt: float = 0.005
    solver: str = "rk45"
    rtol: float = 1e-8
    atol: float = 1e-10
    fixed_step: float | None = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        t0, tf = self.t_span
        if not t0 < tf:
            raise ValueError(f"t_span needs t0 < tf, got {self.t_span}")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be > 0")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")

    @property
    def grid(self) -> np.ndarray:
        """``t0, t0 + dt, ..., tf``; a short final interval is kept if ``dt`` does not divide the span."""
        t0, tf = self.t_span
        tol = 1e-9 * max(1.0, abs(tf))
        n = int(round((tf - t0) / self.dt))
        if abs(t0 + n * self.dt - tf) <= tol:
            grid = t0 + self.dt * np.arange(n + 1)
            grid[-1] = tf
        else:
            n = int(np.floor((tf - t0) / self.dt))
            grid = np.append(t0 + self.dt * np.arange(n + 1), tf)
        return grid


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray  # (T, ...) matching the state shape

    def at(self, t: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        return self.values[k]


# Dormand-Prince coefficients
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


_A_MAT = np.zeros((7, 7))
for _s, _row in enumerate(_A):
    _A_MAT[_s, : len(_row)] = _row
_B7 = np.append(_B, 0.0)
_MIN_STEP = 10 * np.finfo(float).eps


def _finite(x) -> bool:
    return bool(np.isfinite(x).all())


def _initial_step(f, t, y, f0, direction_span, rtol, atol):
    scale = atol + rtol * np.abs(y)
    d0 = np.max(np.abs(y) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    f1 = f(t + h0, y + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0 if _finite(f1) else np.inf
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, direction_span)


def _rk45_segment(f, t0, t1, y, h, grid, out, opts: SimOptions, counter):
    """Advance from ``t0`` to ``t1`` writing dense output for grid points in ``(t0, t1]``."""
    t = t0
    f0 = f(t, y)
    if not _finite(f0):
        raise IntegrationError("non-finite derivative", t)
    if h is None:
        h = _initial_step(f, t, y, f0, t1 - t0, opts.rtol, opts.atol)
    gi = np.searchsorted(grid, t0, side="right")
    shape = np.shape(y)
    step_rejected = False
    while t < t1:
        min_step = _MIN_STEP * max(abs(t), 1.0)
        h = min(h, t1 - t)
        if t1 - (t + h) < min_step:
            h = t1 - t
        if h < min_step:
            raise IntegrationError("step size underflow", t)
        counter[0] += 1
        if counter[0] > opts.max_steps:
            raise IntegrationError(f"exceeded {opts.max_steps} steps", t)
        # stages as rows of one array, so each combination is a single matmul
        K = np.empty((7,) + shape)
        flat = K.reshape(7, -1)
        K[0] = f0
        for s in range(1, 6):
            K[s] = f(t + _C[s] * h, y + h * (_A_MAT[s, :s] @ flat[:s]).reshape(shape))
        y_new = y + h * (_B7 @ flat).reshape(shape)
        K[6] = f(t + h, y_new)
        if not (_finite(y_new) and _finite(K[6])):
            h *= 0.2
            step_rejected = True
            continue
        err = h * (_E @ flat)
        scale = opts.atol + opts.rtol * np.maximum(np.abs(y), np.abs(y_new)).ravel()
        err_norm = float(np.max(np.abs(err) / scale)) if err.size else 0.0
        if err_norm > 1.0:
            h *= max(0.2, 0.9 * err_norm ** -0.2)
            step_rejected = True
            continue
        t_new = t + h if t1 - (t + h) > min_step else t1
        # dense output on grid points passed by this step
        gj = int(np.searchsorted(grid, t_new + 1e-12 * max(1.0, abs(t_new)), side="right"))
        if gj > gi:
            theta = (grid[gi:gj] - t) / h
            weights = np.stack([theta, theta**2, theta**3, theta**4], axis=1) @ _P.T
            out[gi:gj] = y + h * (weights @ flat).reshape((gj - gi,) + shape)
            if grid[gj - 1] >= t_new:
                out[gj - 1] = y_new
            gi = gj
        factor = 10.0 if err_norm == 0 else min(10.0, 0.9 * err_norm ** -0.2)
        if step_rejected:
            factor = min(1.0, factor)
        step_rejected = False
        t, y, f0 = t_new, y_new, K[6]
        h *= factor
    return y, h


def _fixed_segment(f, t0, t1, y, grid, out, opts: SimOptions, counter):
    stops = grid[(grid > t0) & (grid <= t1)]
    if not len(stops) or stops[-1] < t1:
        stops = np.append(stops, t1)
    hmax = opts.fixed_step or opts.dt
    t = t0
    for stop in stops:
        n = max(1, int(np.ceil((stop - t) / hmax - 1e-9)))
        h = (stop - t) / n
        for _ in range(n):
            counter[0] += 1
            if opts.solver == "euler":
                y = y + h * f(t, y)
            else:
                k1 = f(t, y)
                k2 = f(t + h / 2, y + h / 2 * k1)
                k3 = f(t + h / 2, y + h / 2 * k2)
                k4 = f(t + h, y + h * k3)
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            if not _finite(y):
                raise IntegrationError("non-finite state", t)
        t = stop
        k = np.searchsorted(grid, stop)
        if k < len(grid) and grid[k] == stop:
            out[k] = y
    return y


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    opts: SimOptions,
    breakpoints: Sequence[float] = (),
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` and return the solution on ``opts.grid``."""
    grid = opts.grid
    y = np.array(y0, dtype=float)
    out = np.empty((len(grid),) + y.shape)
    out[0] = y
    t0, tf = opts.t_span
    cuts = [t0] + sorted(b for b in set(breakpoints) if t0 < b < tf) + [tf]
    counter = [0]
    h = None
    for a, b in zip(cuts[:-1], cuts[1:]):
        if opts.solver == "rk45":
            y, h = _rk45_segment(rhs, a, b, y, h, grid, out, opts, counter)
        else:
            y = _fixed_segment(rhs, a, b, y, grid, out, opts, counter)
    return Trajectory(grid, out)
