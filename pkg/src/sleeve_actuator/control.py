"""
Discrete PID position control of the linear sleeve actuator.

The controller output is a pressure command in MPa. The integral uses the
trapezoidal rule with conditional clamping: while the output sits on a limit
and the error pushes further into it, the integrator is frozen. The
derivative acts on the measurement (no kick on setpoint steps) unless
``derivative_on="error"`` is requested.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

from config.simulation_config import SimulationConfig

from .dynamics import (
    Disturbance,
    PlantParams,
    SimTrace,
    TraceRecorder,
    check_finite,
    rk4_step,
    static_equilibrium,
    step_count,
)
from .errors import ValidationError

logger = logging.getLogger(__name__)

RATE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PidGains:
    """Kp (MPa/mm), Ki (MPa/(mm*s)), Kd (MPa*s/mm), output limits (MPa), sample time (s)"""

    kp: float
    ki: float = 0.0
    kd: float = 0.0
    output_limits: Tuple[float, float] = (0.0, 0.2)
    sample_time: float = SimulationConfig.DEFAULT_DT
    anti_windup: bool = True
    derivative_on: str = "measurement"

    def __post_init__(self):
        if not self.sample_time > 0:
            raise ValidationError("sample_time must be positive", field="sample_time_s")
        u_min, u_max = self.output_limits
        if not u_min < u_max:
            raise ValidationError("output limits must satisfy u_min < u_max", field="output_max_kpa")
        if self.derivative_on not in ("measurement", "error"):
            raise ValidationError("derivative_on must be 'measurement' or 'error'", field="derivative_on")


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    prev_error: Optional[float] = None
    prev_measurement: Optional[float] = None
    saturated: bool = False


def pid_step(gains: PidGains, state: PidState, setpoint: float, measurement: float, dt: float) -> Tuple[float, PidState]:
    """
    One controller update

    Args:
        gains: Controller gains and limits
        state: Controller memory from the previous update
        setpoint: Desired displacement (mm)
        measurement: Measured displacement (mm)
        dt: Time since the previous update (s)

    Returns:
        Tuple of (clamped command in MPa, updated controller state)
    """
    error = setpoint - measurement
    p_term = gains.kp * error

    if state.prev_error is None:
        increment = 0.0
        d_term = 0.0
    else:
        increment = 0.5 * (error + state.prev_error) * dt
        if gains.derivative_on == "measurement":
            d_term = -gains.kd * (measurement - state.prev_measurement) / dt
        else:
            d_term = gains.kd * (error - state.prev_error) / dt

    integral = state.integral + increment
    unclamped = p_term + gains.ki * integral + d_term

    u_min, u_max = gains.output_limits
    command = min(max(unclamped, u_min), u_max)
    saturated = command != unclamped

    if gains.anti_windup and saturated:
        pushing_high = unclamped > u_max and increment > 0
        pushing_low = unclamped < u_min and increment < 0
        if pushing_high or pushing_low:
            integral = state.integral

    return command, PidState(integral, error, measurement, saturated)


class TrajectoryKind(str, Enum):
    STEP = "step"
    RAMP = "ramp"
    SINUSOID = "sinusoid"
    STAIRCASE = "staircase"


@dataclass(frozen=True)
class TrajectorySpec:
    """
    Reference path for the closed loop (mm, s, Hz)

    step: ``amplitude`` from t = 0. ramp: ``slope`` mm/s for ``ramp_duration``
    (the whole run when None), then held. sinusoid: ``offset`` +
    ``amplitude`` sin(2 pi f t). staircase: ``levels`` held ``dwell`` s each.
    """

    kind: TrajectoryKind
    duration: float
    amplitude: float = 0.0
    slope: float = 0.0
    ramp_duration: Optional[float] = None
    offset: float = 0.0
    frequency: float = 0.0
    levels: Tuple[float, ...] = ()
    dwell: float = 0.0
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.duration > 0:
            raise ValidationError("trajectory duration must be positive", field="duration_s")
        if self.kind is TrajectoryKind.SINUSOID and not self.frequency > 0:
            raise ValidationError("sinusoid frequency must be positive", field="frequency_hz")
        if self.kind is TrajectoryKind.STAIRCASE and (not self.levels or not self.dwell > 0):
            raise ValidationError("staircase needs levels and a positive dwell", field="levels")

    def setpoint(self, t: float) -> float:
        if self.kind is TrajectoryKind.STEP:
            return self.amplitude if t >= 0 else 0.0
        if self.kind is TrajectoryKind.RAMP:
            end = self.ramp_duration if self.ramp_duration is not None else self.duration
            return self.slope * min(max(t, 0.0), end)
        if self.kind is TrajectoryKind.SINUSOID:
            return self.offset + self.amplitude * math.sin(2.0 * math.pi * self.frequency * t)
        index = min(int(t // self.dwell), len(self.levels) - 1)
        return self.levels[max(index, 0)]

    def max_setpoint(self) -> float:
        if self.kind is TrajectoryKind.STEP:
            return self.amplitude
        if self.kind is TrajectoryKind.RAMP:
            end = self.ramp_duration if self.ramp_duration is not None else self.duration
            return self.slope * min(end, self.duration)
        if self.kind is TrajectoryKind.SINUSOID:
            return self.offset + abs(self.amplitude)
        return max(self.levels)

    def check_reachable(self, max_stroke: float) -> "TrajectorySpec":
        """Returns a copy flagged when the path exceeds the geometric stroke (mm)"""
        peak = self.max_setpoint()
        if peak <= max_stroke:
            return self
        note = f"trajectory peak {peak:.6g} mm exceeds the geometric stroke {max_stroke:.6g} mm"
        logger.warning(note)
        return replace(self, warnings=self.warnings + (note,))


def controller_ratio(sample_time: float, dt: float) -> int:
    """Plant steps per controller update; dt must divide sample_time exactly"""
    if not dt > 0:
        raise ValidationError("dt must be positive", field="dt_s")
    if dt > sample_time * (1.0 + RATE_TOLERANCE):
        raise ValidationError("plant dt must not exceed the controller sample time", field="dt_s")
    ratio = sample_time / dt
    steps = int(round(ratio))
    if abs(ratio - steps) > RATE_TOLERANCE * max(1.0, ratio):
        raise ValidationError(
            f"plant dt {dt:g} s does not divide the sample time {sample_time:g} s", field="dt_s"
        )
    return steps


def simulate_closed_loop(
    params: PlantParams,
    gains: PidGains,
    trajectory: TrajectorySpec,
    dt: Optional[float] = None,
    initial_state: Optional[Tuple[float, float]] = None,
    disturbance: Optional[Disturbance] = None,
) -> SimTrace:
    """
    PID-controlled simulation over the whole trajectory

    Args:
        params: Plant parameters
        gains: PID gains; the command is held between controller updates
        trajectory: Reference path
        dt: Plant step (s); the controller sample time when None
        initial_state: (y, v); rest equilibrium at zero pressure when None
        disturbance: Optional external force step

    Returns:
        SimTrace sampled every dt

    Raises:
        ValidationError: dt does not divide the sample time
        DivergenceError: if the state leaves the finite range
    """
    dt = dt if dt is not None else gains.sample_time
    per_update = controller_ratio(gains.sample_time, dt)
    n = step_count(trajectory.duration, dt)

    if initial_state is None:
        initial_state = (static_equilibrium(params, params.pressure_limits[0]), 0.0)
    state = (float(initial_state[0]), float(initial_state[1]), params.pressure_limits[0])

    controller = PidState()
    command = params.pressure_limits[0]
    recorder = TraceRecorder(n + 1)

    for i in range(n + 1):
        t = i * dt
        setpoint = trajectory.setpoint(t)
        if i % per_update == 0:
            command, controller = pid_step(gains, controller, setpoint, state[0], gains.sample_time)
            command = params.clamp_pressure(command)
        if params.pressure_lag is None:
            state = (state[0], state[1], command)
        recorder.record(t, state, command, setpoint)
        if i == n:
            break
        f_ext = disturbance.force(t) if disturbance else 0.0
        state = rk4_step(params, state, command, f_ext, dt)
        check_finite(state, t + dt)

    logger.debug("closed-loop %s run: %d steps, %d per controller update", trajectory.kind.value, n, per_update)
    return recorder.trace(trajectory.warnings)
