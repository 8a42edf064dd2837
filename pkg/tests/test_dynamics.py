import math
from dataclasses import replace

import numpy as np
import pytest

from src.sleeve_actuator.dynamics import (
    Disturbance,
    PlantParams,
    PressureLag,
    SimTrace,
    constant_pressure,
    integrate_rk4,
    plant_derivatives,
    pressure_step,
    square_wave,
    static_equilibrium,
    step_count,
)
from src.sleeve_actuator.errors import DivergenceError, ValidationError
from src.sleeve_actuator.statics import max_extension
from src.sleeve_actuator.stiffness import StiffnessCubic


def terminal_y(plant, pressure, dt, duration=0.2, state=(0.0, 0.0)):
    return integrate_rk4(plant, state, constant_pressure(pressure), dt, duration).y[-1]


class TestPlantDerivatives:
    def test_pressurised_rest(self, l13_poly):
        plant = PlantParams(2.0, 0.05, 590.63, l13_poly)
        dy, dv = plant_derivatives(plant, 0.0, 0.0, 0.1)
        assert dy == 0.0
        assert dv == pytest.approx(29645.0, rel=1e-4)

    def test_unpressurised_rest(self, l13_poly):
        plant = PlantParams(2.0, 0.05, 590.63, l13_poly)
        assert plant_derivatives(plant, 0.0, 0.0, 0.0)[1] == pytest.approx(112.3)

    def test_damping_and_load_oppose_motion(self, l13_poly):
        plant = PlantParams(2.0, 0.05, 590.63, l13_poly)
        free = plant_derivatives(plant, 5.0, 10.0, 0.1)[1]
        loaded = plant_derivatives(plant, 5.0, 10.0, 0.1, external_force=3.0)[1]
        assert loaded == pytest.approx(free - 1000.0 / 2.0 * 3.0)

    def test_rejects_nonfinite(self, l13_plant):
        with pytest.raises(ValidationError):
            plant_derivatives(l13_plant, math.nan, 0.0, 0.1)


class TestPlantParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(mass_M=0.0),
            dict(damping_b=-0.1),
            dict(effective_area=0.0),
            dict(pressure_limits=(0.2, 0.1)),
        ],
    )
    def test_rejects_invalid(self, l13_poly, kwargs):
        fields = dict(mass_M=2.0, damping_b=0.05, effective_area=486.0, stiffness=l13_poly)
        fields.update(kwargs)
        with pytest.raises(ValidationError):
            PlantParams(**fields)

    def test_from_geometry_uses_effective_area(self, l13_plant):
        assert l13_plant.effective_area == pytest.approx(486.07, abs=1e-2)
        assert l13_plant.pressure_limits == (0.0, 0.2)

    def test_clamp(self, l13_plant):
        assert l13_plant.clamp_pressure(0.5) == 0.2
        assert l13_plant.clamp_pressure(-0.1) == 0.0


class TestStaticConvergence:
    @pytest.mark.parametrize("pressure_kpa", [25, 50, 75, 100, 125])
    def test_settles_on_static_free_stroke(self, l13_geometry, l13_poly, l13_plant, pressure_kpa):
        pressure = pressure_kpa / 1000.0
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(pressure), 1e-3, 3.0)
        expected = max_extension(l13_geometry, l13_poly, pressure)
        assert trace.y[-1] == pytest.approx(expected, rel=1e-3)
        assert abs(trace.v[-1]) < 1e-6

    def test_unpressurised_rest_is_stiffness_root(self, l13_plant, l13_poly):
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.0), 1e-3, 3.0)
        assert trace.y[-1] == pytest.approx(0.108, abs=1e-3)
        assert l13_poly.force(trace.y[-1]) == pytest.approx(0.0, abs=1e-6)

    def test_halving_the_step(self, l13_plant):
        coarse = terminal_y(l13_plant, 0.1, 1e-3, duration=3.0)
        fine = terminal_y(l13_plant, 0.1, 5e-4, duration=3.0)
        assert abs(coarse - fine) / abs(fine) < 1e-6

    def test_fourth_order_convergence(self, l13_plant):
        reference = terminal_y(l13_plant, 0.1, 2.5e-4)
        coarse = abs(terminal_y(l13_plant, 0.1, 4e-3) - reference)
        fine = abs(terminal_y(l13_plant, 0.1, 2e-3) - reference)
        assert 12.0 < coarse / fine < 20.0

    def test_equilibrium_matches_statics(self, l13_geometry, l13_poly, l13_plant):
        assert static_equilibrium(l13_plant, 0.1) == pytest.approx(max_extension(l13_geometry, l13_poly, 0.1), abs=1e-8)


class TestIntegration:
    def test_trace_shape(self, l13_plant):
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.05), 1e-3, 0.5)
        assert len(trace) == 501
        assert trace.t[0] == 0.0
        assert trace.t[-1] == pytest.approx(0.5)
        assert np.all(np.isnan(trace.setpoint))
        assert np.all(trace.u == 0.05)

    def test_zero_duration(self, l13_plant):
        trace = integrate_rk4(l13_plant, (1.0, 0.0), constant_pressure(0.05), 1e-3, 0.0)
        assert len(trace) == 1
        assert trace.y[0] == 1.0

    def test_command_is_clamped(self, l13_plant):
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.5), 1e-3, 0.01)
        assert np.all(trace.p == 0.2)

    def test_divergence(self):
        unstable = PlantParams(2.0, 0.0, 100.0, StiffnessCubic(0.0, 0.0, -1000.0, 0.0))
        with pytest.raises(DivergenceError) as info:
            integrate_rk4(unstable, (0.1, 0.0), constant_pressure(0.0), 1e-3, 5.0)
        assert 0.0 < info.value.time_s <= 5.0

    def test_load_step_shifts_equilibrium(self, l13_plant, l13_poly):
        load = Disturbance(5.0, start_s=0.5)
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.1), 1e-3, 4.0, disturbance=load)
        balance = l13_plant.effective_area * 0.1 - l13_poly.force(trace.y[-1]) - 5.0
        assert balance == pytest.approx(0.0, abs=1e-5)
        assert trace.y[-1] < static_equilibrium(l13_plant, 0.1)

    def test_rejects_bad_step(self):
        with pytest.raises(ValidationError):
            step_count(1.0, 0.0)
        with pytest.raises(ValidationError):
            step_count(-1.0, 1e-3)


class TestPressureLag:
    def test_fill_time_constant(self, l13_plant):
        plant = replace(l13_plant, pressure_lag=PressureLag(0.3, 0.25))
        trace = integrate_rk4(plant, (0.0, 0.0, 0.0), constant_pressure(0.1), 1e-3, 0.3)
        assert trace.p[-1] == pytest.approx(0.1 * (1 - math.exp(-1)), rel=1e-6)

    def test_vent_time_constant(self, l13_plant):
        plant = replace(l13_plant, pressure_lag=PressureLag(0.3, 0.25))
        trace = integrate_rk4(plant, (20.0, 0.0, 0.1), constant_pressure(0.0), 1e-3, 0.25)
        assert trace.p[-1] == pytest.approx(0.1 * math.exp(-1), rel=1e-6)

    def test_two_element_state_starts_vented(self, l13_plant):
        plant = replace(l13_plant, pressure_lag=PressureLag(0.3, 0.25))
        trace = integrate_rk4(plant, (0.0, 0.0), constant_pressure(0.1), 1e-3, 0.3)
        assert trace.p[0] == 0.0
        assert trace.p[-1] == pytest.approx(0.1 * (1 - math.exp(-1)), rel=1e-6)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            PressureLag(0.0, 0.1)


class TestSignals:
    def test_step(self):
        signal = pressure_step(0.1, t_on=1.0, t_off=2.0)
        assert [signal(t) for t in (0.5, 1.0, 1.5, 2.0)] == [0.0, 0.1, 0.1, 0.0]

    def test_square_wave(self):
        signal = square_wave(0.1, 2.0)
        assert [signal(t) for t in (0.0, 0.2, 0.25, 0.3, 0.5)] == [0.1, 0.1, 0.0, 0.0, 0.1]

    def test_square_wave_needs_frequency(self):
        with pytest.raises(ValidationError):
            square_wave(0.1, 0.0)


class TestSimTrace:
    def test_empty(self):
        trace = SimTrace.empty()
        assert len(trace) == 0
        assert trace.dt == 0.0

    def test_time_must_increase(self):
        values = np.zeros(3)
        with pytest.raises(ValidationError):
            SimTrace(np.array([0.0, 0.0, 1.0]), values, values, values, values, values, values)
