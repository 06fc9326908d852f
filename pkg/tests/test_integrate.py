import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polychaos.integrate import IntegrationError, SimOptions, integrate


class TestSimOptions:
    def test_grid_includes_endpoints(self):
        g = SimOptions((0.0, 1.0), dt=0.1).grid
        assert len(g) == 11
        assert g[0] == 0.0 and g[-1] == 1.0

    def test_grid_keeps_short_final_interval(self):
        g = SimOptions((0.0, 1.0), dt=0.3).grid
        np.testing.assert_allclose(g, [0.0, 0.3, 0.6, 0.9, 1.0])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t_span": (1.0, 1.0)},
            {"t_span": (2.0, 1.0)},
            {"dt": 0.0},
            {"rtol": 0.0},
            {"atol": -1.0},
            {"solver": "bdf"},
        ],
    )
    def test_rejects_bad_options(self, kwargs):
        with pytest.raises(ValueError):
            SimOptions(**kwargs)


class TestRK45:
    def test_exponential_decay(self):
        opts = SimOptions((0.0, 2.0), dt=0.1, rtol=1e-9, atol=1e-12)
        tr = integrate(lambda t, y: -1.5 * y, [2.0], opts)
        np.testing.assert_allclose(tr.values[:, 0], 2.0 * np.exp(-1.5 * tr.times), rtol=1e-8)

    def test_constant_solution_is_exact(self):
        opts = SimOptions((0.0, 3.0), dt=0.25)
        tr = integrate(lambda t, y: np.zeros_like(y), [1.25, -4.0], opts)
        assert np.all(tr.values == np.array([1.25, -4.0]))

    def test_rotation_preserves_norm(self):
        opts = SimOptions((0.0, 10.0), dt=0.5, rtol=1e-10, atol=1e-12)
        tr = integrate(lambda t, y: np.array([-y[1], y[0]]), [1.0, 0.0], opts)
        np.testing.assert_allclose(np.hypot(tr.values[:, 0], tr.values[:, 1]), 1.0, atol=1e-7)
        np.testing.assert_allclose(tr.values[:, 0], np.cos(tr.times), atol=1e-7)

    def test_time_dependent_rhs(self):
        opts = SimOptions((0.0, 1.0), dt=0.05, rtol=1e-10, atol=1e-12)
        tr = integrate(lambda t, y: np.array([np.cos(t)]), [0.0], opts)
        np.testing.assert_allclose(tr.values[:, 0], np.sin(tr.times), atol=1e-9)

    def test_batched_states_match_individual_runs(self):
        opts = SimOptions((0.0, 1.0), dt=0.1, rtol=1e-10, atol=1e-12)
        rates = np.array([0.5, 1.0, 3.0])
        tr = integrate(lambda t, y: -rates * y, np.ones(3), opts)
        np.testing.assert_allclose(tr.values, np.exp(-np.outer(tr.times, rates)), rtol=1e-8)

    def test_breakpoint_handles_step_input(self):
        # x' = u(t), u jumps from 0 to 1 at t = 0.37
        def rhs(t, y):
            return np.array([1.0 if t >= 0.37 else 0.0])

        opts = SimOptions((0.0, 1.0), dt=0.1, rtol=1e-10, atol=1e-12)
        tr = integrate(rhs, [0.0], opts, breakpoints=[0.37])
        np.testing.assert_allclose(tr.values[:, 0], np.maximum(tr.times - 0.37, 0.0), atol=1e-12)

    def test_blowup_raises_with_time(self):
        opts = SimOptions((0.0, 2.0), dt=0.1, max_steps=10_000)
        with pytest.raises(IntegrationError) as info:
            integrate(lambda t, y: y**2, [1.0], opts)
        assert 0.9 < info.value.t < 1.01

    def test_halving_tolerance_converges(self):
        f = lambda t, y: np.array([y[1], -np.sin(y[0])])  # noqa: E731
        ref = integrate(f, [1.0, 0.0], SimOptions((0.0, 5.0), dt=0.5, rtol=1e-12, atol=1e-14)).values
        errs = []
        for rtol in (1e-5, 1e-7, 1e-9):
            v = integrate(f, [1.0, 0.0], SimOptions((0.0, 5.0), dt=0.5, rtol=rtol, atol=rtol * 1e-2)).values
            errs.append(np.abs(v - ref).max())
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-8

    def test_trajectory_at_nearest_grid_point(self):
        opts = SimOptions((0.0, 1.0), dt=0.25)
        tr = integrate(lambda t, y: np.ones_like(y), [0.0], opts)
        assert tr.at(0.5)[0] == pytest.approx(0.5, abs=1e-12)


class TestFixedStep:
    @pytest.mark.parametrize("solver,order", [("euler", 1), ("rk4", 4)])
    def test_convergence_order(self, solver, order):
        errs = []
        for h in (0.02, 0.01):
            opts = SimOptions((0.0, 1.0), dt=0.1, solver=solver, fixed_step=h)
            tr = integrate(lambda t, y: -y, [1.0], opts)
            errs.append(abs(tr.values[-1, 0] - np.exp(-1.0)))
        observed = np.log2(errs[0] / errs[1])
        assert observed == pytest.approx(order, abs=0.2)

    def test_fixed_step_lands_on_grid(self):
        opts = SimOptions((0.0, 1.0), dt=0.3, solver="rk4", fixed_step=0.07)
        tr = integrate(lambda t, y: np.ones_like(y), [0.0], opts)
        np.testing.assert_allclose(tr.values[:, 0], tr.times, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    rate=st.floats(0.1, 5.0),
    y0=st.floats(-10.0, 10.0),
    dt=st.sampled_from([0.05, 0.1, 0.3]),
)
def test_linear_decay_property(rate, y0, dt):
    opts = SimOptions((0.0, 1.0), dt=dt, rtol=1e-10, atol=1e-12)
    tr = integrate(lambda t, y: -rate * y, [y0], opts)
    np.testing.assert_allclose(tr.values[:, 0], y0 * np.exp(-rate * tr.times), rtol=1e-8, atol=1e-11)
