"""
Nonlinear plant of the linear sleeve actuator and its fixed-step integrator.

    M y'' = A_eff P - b y' - FK(y) - F_ext

with y in mm, P in MPa, A_eff in mm^2, b in N*s/mm and M in kg. Forces are in
N, so the acceleration N/kg = m/s^2 is scaled by 1000 to mm/s^2. The valve
is optionally modelled as a first-order lag on the commanded pressure with
separate fill and vent time constants.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from config.simulation_config import SimulationConfig

from .errors import DivergenceError, NoRootError, ValidationError
from .geometry import ActuatorGeometry, FoldSpec
from .statics import projected_areas
from .stiffness import StiffnessCubic

logger = logging.getLogger(__name__)

MM_PER_M = 1000.0

PressureSignal = Callable[[float], float]
State = Tuple[float, float, float]  # (y mm, v mm/s, P MPa)


@dataclass(frozen=True)
class PressureLag:
    fill_tau: float
    vent_tau: float

    def __post_init__(self):
        if not (self.fill_tau > 0 and self.vent_tau > 0):
            raise ValidationError("pressure lag time constants must be positive", field="fill_tau_s")


@dataclass(frozen=True)
class Disturbance:
    """External force step (N) acting against extension from start_s onwards"""

    force_n: float
    start_s: float = 0.0

    def force(self, t: float) -> float:
        return self.force_n if t >= self.start_s else 0.0


@dataclass(frozen=True)
class PlantParams:
    mass_M: float
    damping_b: float
    effective_area: float
    stiffness: StiffnessCubic
    pressure_lag: Optional[PressureLag] = None
    pressure_limits: Tuple[float, float] = (0.0, SimulationConfig.DEFAULT_MAX_PRESSURE_KPA / 1000.0)

    def __post_init__(self):
        if not self.mass_M > 0:
            raise ValidationError("mass must be positive", field="mass_kg")
        if self.damping_b < 0:
            raise ValidationError("damping must be >= 0", field="damping_n_s_per_mm")
        if not self.effective_area > 0:
            raise ValidationError("effective area A1 + A2 - A3 must be positive", field="effective_area")
        low, high = self.pressure_limits
        if not 0 <= low < high:
            raise ValidationError("pressure limits must satisfy 0 <= P_min < P_max", field="max_pressure_kpa")

    @classmethod
    def from_geometry(
        cls,
        geom: ActuatorGeometry,
        stiffness: StiffnessCubic,
        spec: Optional[FoldSpec] = None,
        mass_M: float = SimulationConfig.DEFAULT_MASS_KG,
        damping_b: float = SimulationConfig.DEFAULT_DAMPING,
        pressure_lag: Optional[PressureLag] = None,
        max_pressure: float = SimulationConfig.DEFAULT_MAX_PRESSURE_KPA / 1000.0,
    ) -> "PlantParams":
        areas = projected_areas(geom, spec)
        return cls(mass_M, damping_b, areas.effective, stiffness, pressure_lag, (0.0, max_pressure))

    def clamp_pressure(self, pressure: float) -> float:
        low, high = self.pressure_limits
        return min(max(pressure, low), high)


@dataclass(frozen=True)
class SimTrace:
    """
    Uniformly sampled simulation record

    Open-loop traces carry NaN setpoint and error columns.
    """

    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    p: np.ndarray
    u: np.ndarray
    setpoint: np.ndarray
    error: np.ndarray
    warnings: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = len(self.t)
        for name in ("y", "v", "p", "u", "setpoint", "error"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"trace column {name} has the wrong length")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ValidationError("trace time must be strictly increasing", field="t_s")

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def empty(cls) -> "SimTrace":
        blank = np.zeros(0)
        return cls(blank, blank, blank, blank, blank, blank, blank)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0


class TraceRecorder:
    """Preallocated column buffers filled sample by sample"""

    def __init__(self, n: int):
        self.columns = {name: np.full(n, np.nan) for name in ("t", "y", "v", "p", "u", "setpoint", "error")}
        self.count = 0

    def record(self, t: float, state: State, u: float, setpoint: float = math.nan):
        i = self.count
        cols = self.columns
        cols["t"][i] = t
        cols["y"][i] = state[0]
        cols["v"][i] = state[1]
        cols["p"][i] = state[2]
        cols["u"][i] = u
        cols["setpoint"][i] = setpoint
        cols["error"][i] = setpoint - state[0]
        self.count += 1

    def trace(self, warnings: Tuple[str, ...] = ()) -> SimTrace:
        n = self.count
        return SimTrace(**{name: col[:n].copy() for name, col in self.columns.items()}, warnings=warnings)


def plant_derivatives(
    params: PlantParams, y: float, v: float, P: float, external_force: float = 0.0
) -> Tuple[float, float]:
    """
    State derivatives of the plant

    Args:
        params: Plant parameters
        y: Displacement (mm)
        v: Velocity (mm/s)
        P: Chamber pressure (MPa)
        external_force: Load opposing extension (N)

    Returns:
        (dy/dt in mm/s, dv/dt in mm/s^2)
    """
    if not (math.isfinite(y) and math.isfinite(v) and math.isfinite(P) and math.isfinite(external_force)):
        raise ValidationError("plant inputs must be finite")
    net = params.effective_area * P - params.damping_b * v - params.stiffness.force(y) - external_force
    return v, MM_PER_M / params.mass_M * net


def _derivative(params: PlantParams, state: State, p_cmd: float, f_ext: float) -> State:
    y, v, p = state
    lag = params.pressure_lag
    if lag is None:
        p = p_cmd
        dp = 0.0
    else:
        tau = lag.fill_tau if p_cmd > p else lag.vent_tau
        dp = (p_cmd - p) / tau
    net = params.effective_area * p - params.damping_b * v - params.stiffness.force(y) - f_ext
    return v, MM_PER_M / params.mass_M * net, dp


def rk4_step(params: PlantParams, state: State, p_cmd: float, f_ext: float, h: float) -> State:
    """One classical Runge-Kutta step with the command held over the step"""
    k1 = _derivative(params, state, p_cmd, f_ext)
    s2 = tuple(s + 0.5 * h * k for s, k in zip(state, k1))
    k2 = _derivative(params, s2, p_cmd, f_ext)
    s3 = tuple(s + 0.5 * h * k for s, k in zip(state, k2))
    k3 = _derivative(params, s3, p_cmd, f_ext)
    s4 = tuple(s + h * k for s, k in zip(state, k3))
    k4 = _derivative(params, s4, p_cmd, f_ext)
    y, v, p = (s + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4))
    if params.pressure_lag is None:
        p = p_cmd
    return y, v, p


def check_finite(state: State, t: float):
    y, v, _ = state
    limit = SimulationConfig.DIVERGENCE_LIMIT
    if not (math.isfinite(y) and math.isfinite(v)) or abs(y) > limit or abs(v) > limit:
        raise DivergenceError(f"simulation diverged at t = {t:.6g} s (y = {y:.3g} mm, v = {v:.3g} mm/s)", t)


def step_count(duration: float, dt: float) -> int:
    if not dt > 0:
        raise ValidationError("dt must be positive", field="dt_s")
    if duration < 0:
        raise ValidationError("duration must be >= 0", field="duration_s")
    return int(round(duration / dt))


def static_equilibrium(params: PlantParams, P: float, y_hi: Optional[float] = None) -> float:
    """
    Displacement where A_eff P = FK(y)

    Args:
        params: Plant parameters
        P: Pressure (MPa)
        y_hi: Upper end of the search bracket; ten times the cubic's range when None
    """
    poly = params.stiffness
    y_hi = y_hi if y_hi is not None else 10.0 * max(abs(poly.valid_range[1]), 1.0)

    def balance(y: float) -> float:
        return params.effective_area * P - poly.force(y)

    if balance(0.0) == 0.0:
        return 0.0
    if balance(0.0) * balance(y_hi) > 0:
        raise NoRootError(f"no equilibrium on [0, {y_hi:.6g}] mm at {P:.6g} MPa")
    return float(optimize.bisect(balance, 0.0, y_hi, xtol=SimulationConfig.EQUILIBRIUM_XTOL, maxiter=200))


def integrate_rk4(
    params: PlantParams,
    initial_state: Tuple[float, ...],
    pressure_signal: PressureSignal,
    dt: float = SimulationConfig.DEFAULT_DT,
    duration: float = 1.0,
    disturbance: Optional[Disturbance] = None,
) -> SimTrace:
    """
    Open-loop fixed-step simulation

    Args:
        params: Plant parameters
        initial_state: (y, v) or (y, v, P); without P a lagged plant starts at
            the lower pressure limit and an unlagged one at the first command
        pressure_signal: Commanded pressure (MPa) as a function of time (s)
        dt: Step (s)
        duration: Simulated time (s); the trace has round(duration/dt) + 1 samples
        disturbance: Optional external force step

    Returns:
        SimTrace with NaN setpoint/error columns

    Raises:
        DivergenceError: if |y| or |v| exceeds SimulationConfig.DIVERGENCE_LIMIT
    """
    n = step_count(duration, dt)
    first_cmd = params.clamp_pressure(pressure_signal(0.0))
    if len(initial_state) == 3:
        state: State = (float(initial_state[0]), float(initial_state[1]), float(initial_state[2]))
    else:
        state = (float(initial_state[0]), float(initial_state[1]), params.pressure_limits[0])
    if params.pressure_lag is None:
        state = (state[0], state[1], first_cmd)

    recorder = TraceRecorder(n + 1)
    for i in range(n + 1):
        t = i * dt
        p_cmd = params.clamp_pressure(pressure_signal(t))
        if params.pressure_lag is None:
            state = (state[0], state[1], p_cmd)
        recorder.record(t, state, p_cmd)
        if i == n:
            break
        f_ext = disturbance.force(t) if disturbance else 0.0
        state = rk4_step(params, state, p_cmd, f_ext, dt)
        check_finite(state, t + dt)

    logger.debug("integrated %d RK4 steps of %.3g s", n, dt)
    return recorder.trace()


def constant_pressure(P: float) -> PressureSignal:
    return lambda t: P


def pressure_step(P: float, t_on: float = 0.0, t_off: Optional[float] = None) -> PressureSignal:
    """P between t_on and t_off (open-ended when t_off is None), zero elsewhere"""

    def signal(t: float) -> float:
        if t < t_on or (t_off is not None and t >= t_off):
            return 0.0
        return P

    return signal


def square_wave(P_high: float, frequency: float, P_low: float = 0.0) -> PressureSignal:
    """Square pressure command, high during the first half of each period"""
    if not frequency > 0:
        raise ValidationError("frequency must be positive", field="frequency_hz")
    period = 1.0 / frequency

    def signal(t: float) -> float:
        phase = (t % period) / period
        # Guard the half-period edge against round-off in t
        return P_high if phase < 0.5 - 1e-12 else P_low

    return signal
