"""Time integration: CFL control, integrating-factor exactness, cadence."""

import math

import numpy as np
import pytest

from oldroyd2d.errors import ConfigError, IntegrationError
from oldroyd2d.fields import ScalarField, SymTensorField
from oldroyd2d.grid import Grid
from oldroyd2d.model import ModelParams, make_state
from oldroyd2d.stepping import StepConfig, cfl_dt, integrate, step

from conftest import field_from, rand_state


class TestStepConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            StepConfig(scheme="rk4")
        with pytest.raises(ConfigError):
            StepConfig(cfl=0.0)
        with pytest.raises(ConfigError):
            StepConfig(dt_min=0.1, dt_max=0.01)

    def test_scheme_normalized(self):
        assert StepConfig(scheme="IFRK2").scheme == "ifrk2"


class TestCflDt:
    def test_unit_velocity(self):
        grid = Grid(128)
        # omega = sin(x) gives u = (0, -cos x), |u|_inf = 1
        state = make_state(0.0, field_from(grid, lambda x, y: np.sin(x)),
                           SymTensorField.zeros(grid))
        config = StepConfig(cfl=0.5, dt_max=10.0, dt_min=1e-12, t_end=1.0)
        assert abs(cfl_dt(state, config) - math.pi / 128) < 1e-12

    def test_zero_velocity_hits_dt_max(self, grid32):
        state = make_state(0.0, ScalarField.zeros(grid32), SymTensorField.zeros(grid32))
        config = StepConfig(dt_max=0.123, t_end=1.0)
        assert cfl_dt(state, config) == 0.123

    def test_clamping(self, grid32):
        state = rand_state(grid32, 1, omega_amp=100.0)
        config = StepConfig(dt_min=0.05, dt_max=0.06, t_end=1.0)
        assert cfl_dt(state, config) == 0.05


class TestStep:
    def test_pure_diffusion_exact(self, grid32):
        params = ModelParams(nu=0.0, mu=0.9, K=0.0, alpha=0.0, beta=0.25,
                             q_enabled=False, variant="q_zero")
        tau = rand_state(grid32, 2).tau
        state = make_state(0.0, ScalarField.zeros(grid32), tau)
        dt = 0.2
        out = step(state, dt, params, StepConfig(dt_max=dt, t_end=dt))
        decay = np.exp(-(params.beta + params.mu * grid32.ksq) * dt)
        scale = max(c.max_abs_coeff() for c in tau.components)
        for got, want in zip(out.tau.components, tau.components):
            assert np.max(np.abs(got.coeffs - decay * want.coeffs)) <= 1e-12 * scale

    def test_zero_state_fixed(self, grid16):
        state = make_state(0.0, ScalarField.zeros(grid16), SymTensorField.zeros(grid16))
        out = step(state, 0.1, ModelParams(), StepConfig(t_end=0.1))
        assert out.omega.l2() == 0.0
        assert out.t == pytest.approx(0.1)

    def test_nonpositive_dt_rejected(self, grid16):
        state = make_state(0.0, ScalarField.zeros(grid16), SymTensorField.zeros(grid16))
        with pytest.raises(ValueError):
            step(state, 0.0, ModelParams(), StepConfig(t_end=1.0))

    def test_nonfinite_detected(self, grid16):
        huge = 1e200 * field_from(grid16, lambda x, y: np.sin(x))
        state = make_state(0.0, huge, SymTensorField.zeros(grid16))
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(IntegrationError) as exc:
                step(state, 1.0, ModelParams(), StepConfig(dt_max=1.0, t_end=1.0))
        assert exc.value.t == pytest.approx(1.0)

    def test_symmetry_and_mean_preserved(self, grid32):
        params = ModelParams(nu=0.0, mu=0.5, b=0.3)
        state = rand_state(grid32, 3)
        out = step(state, 0.05, params, StepConfig(t_end=1.0))
        assert abs(out.omega.coeffs[0, 0]) < 1e-13
        assert isinstance(out.tau, SymTensorField)


class TestIntegrate:
    def test_zero_horizon_returns_initial(self, grid16):
        state = rand_state(grid16, 4, band=(1, 4))
        out = integrate(state, ModelParams(), StepConfig(t_end=0.0))
        assert out is state

    def test_deterministic(self, grid32):
        params = ModelParams(nu=0.0, mu=0.8, K=1.0, alpha=1.0, b=0.2)
        config = StepConfig(scheme="ifrk4", cfl=0.4, dt_max=0.05, t_end=0.5)
        outs = []
        for _ in range(2):
            state = rand_state(grid32, 5)
            outs.append(integrate(state, params, config))
        assert np.array_equal(outs[0].omega.coeffs, outs[1].omega.coeffs)
        assert np.array_equal(outs[0].tau.t12.coeffs, outs[1].tau.t12.coeffs)

    def test_observer_cadence(self, grid32):
        state = rand_state(grid32, 6, omega_amp=0.1, tau_amp=0.1)
        seen = []
        integrate(state, ModelParams(), StepConfig(dt_max=0.03, t_end=1.0),
                  observer=lambda s: seen.append(s.t), observe_every=0.25)
        assert seen == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0], abs=1e-9)

    def test_land_times_hit_exactly(self, grid32):
        state = rand_state(grid32, 7, omega_amp=0.1, tau_amp=0.1)
        seen = []
        integrate(state, ModelParams(), StepConfig(dt_max=0.04, t_end=0.5),
                  observer=lambda s: seen.append(s.t), observe_every=0.5,
                  land_times=(0.1234,))
        assert any(abs(t - 0.1234) < 1e-9 for t in seen)

    def test_euler_conserves_enstrophy_to_scheme_order(self):
        grid = Grid(64)
        params = ModelParams(nu=0.0, mu=1.0, K=0.0, alpha=0.0,
                             q_enabled=False, variant="q_zero")
        state = rand_state(grid, 8, band=(1, 6), tau_amp=0.0)
        w0 = state.omega.l2()

        def drift(dt):
            config = StepConfig(scheme="ifrk2", cfl=1.0, dt_max=dt, dt_min=dt, t_end=0.5)
            out = integrate(state, params, config)
            return abs(out.omega.l2() - w0) / w0

        d1, d2 = drift(0.02), drift(0.01)
        assert d1 < 1e-4
        assert d1 / d2 > 2.0  # at least the scheme order under halving
