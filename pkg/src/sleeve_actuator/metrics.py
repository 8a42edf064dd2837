"""
Response metrics for simulated traces: step figures, sinusoid tracking,
open-loop rise/decay, disturbance recovery, hold accuracy and the
square-wave frequency sweep with its -3 dB bandwidth.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.simulation_config import SimulationConfig
from utils.concurrency import run_sweep

from .control import TrajectoryKind, TrajectorySpec
from .dynamics import PlantParams, SimTrace, integrate_rk4, pressure_step, square_wave, static_equilibrium
from .errors import NoCrossingError, ValidationError

logger = logging.getLogger(__name__)

CUTOFF_DB = 20.0 * math.log10(1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class ResponseMetrics:
    """
    Tracking figures for one closed-loop run

    Step-type figures (rise, settling, overshoot) are None for ramps and
    sinusoids; amplitude ratio and phase lag are only set for sinusoids.
    """

    rise_time_10_90: Optional[float]
    settling_time: Optional[float]
    overshoot: Optional[float]
    steady_state_error: float
    rmse: float
    amplitude_ratio: Optional[float] = None
    phase_lag: Optional[float] = None
    warnings: Tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "rise_time_10_90_s": self.rise_time_10_90,
            "settling_time_s": self.settling_time,
            "overshoot_pct": self.overshoot,
            "steady_state_error_mm": self.steady_state_error,
            "rmse_mm": self.rmse,
            "amplitude_ratio": self.amplitude_ratio,
            "phase_lag_deg": self.phase_lag,
        }


@dataclass(frozen=True)
class SineFit:
    offset: float
    amplitude: float
    phase_rad: float


@dataclass(frozen=True)
class TimeResponse:
    """Open-loop pressurise/vent figures; decay_time is None when y never falls to 10 %"""

    rise_time: Optional[float]
    decay_time: Optional[float]
    peak_displacement: float
    warnings: Tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class DisturbanceMetrics:
    peak_deviation_mm: float
    recovery_time_s: Optional[float]


@dataclass(frozen=True)
class LevelAccuracy:
    level_mm: float
    rmse_mm: float


@dataclass(frozen=True)
class DriveSpec:
    """Square-wave pressure drive for the frequency sweep (MPa, s)"""

    pressure_high: float
    pressure_low: float = 0.0
    dt: float = SimulationConfig.DEFAULT_DT
    transient_cycles: int = SimulationConfig.TRANSIENT_CYCLES
    measure_cycles: int = SimulationConfig.MEASURE_CYCLES

    def __post_init__(self):
        if not self.pressure_high > self.pressure_low >= 0:
            raise ValidationError("drive needs pressure_high > pressure_low >= 0", field="pressure_kpa")
        if self.transient_cycles < 0 or self.measure_cycles < 1:
            raise ValidationError("cycle counts must be >= 0 (transient) and >= 1 (measured)")


@dataclass(frozen=True)
class FrequencyPoint:
    frequency_hz: float
    amplitude_mm: float
    amplitude_db: float


def _crossing_time(t: np.ndarray, y: np.ndarray, level: float, start: int = 0, rising: bool = True) -> Optional[float]:
    """First time y reaches level at or after index start, linearly interpolated"""
    sign = 1.0 if rising else -1.0
    hits = np.where(sign * (y[start:] - level) >= 0)[0]
    if len(hits) == 0:
        return None
    i = start + int(hits[0])
    if i == start or y[i] == level:
        return float(t[i])
    fraction = (level - y[i - 1]) / (y[i] - y[i - 1])
    return float(t[i - 1] + fraction * (t[i] - t[i - 1]))


def step_figures(t: np.ndarray, y: np.ndarray, band: float = SimulationConfig.SETTLING_BAND) -> Tuple[float, float, float]:
    """
    Rise time, settling time and percent overshoot of a step response

    The response runs from y[0] to its final value y[-1]. Rise time spans
    10 % to 90 % of that change; settling time is the first sample after
    which y stays inside the band around the final value.
    """
    y0, y_final = float(y[0]), float(y[-1])
    change = y_final - y0
    if abs(change) <= 1e-12 * max(1.0, abs(y_final)):
        return 0.0, 0.0, 0.0

    rising = change > 0
    low, high = SimulationConfig.RISE_LIMITS
    t_low = _crossing_time(t, y, y0 + low * change, rising=rising)
    t_high = _crossing_time(t, y, y0 + high * change, rising=rising)
    rise = (t_high - t_low) if t_low is not None and t_high is not None else 0.0

    outside = np.where(np.abs(y - y_final) > band * abs(change))[0]
    settling = float(t[min(outside[-1] + 1, len(t) - 1)] - t[0]) if len(outside) else 0.0

    peak = float(np.max(y)) if rising else float(np.min(y))
    overshoot = max(0.0, (peak - y_final) / change * 100.0)
    return float(rise), settling, overshoot


def fit_sinusoid(t: np.ndarray, signal: np.ndarray, frequency: float) -> SineFit:
    """Least-squares fit of offset + a sin(wt) + b cos(wt) at a known frequency"""
    omega = 2.0 * math.pi * frequency
    design = np.column_stack([np.ones_like(t), np.sin(omega * t), np.cos(omega * t)])
    (offset, a, b), *_ = np.linalg.lstsq(design, signal, rcond=None)
    return SineFit(float(offset), float(math.hypot(a, b)), float(math.atan2(b, a)))


def _wrap_degrees(angle: float) -> float:
    return (angle + 180.0) % 360.0 - 180.0


def _last_cycles(t: np.ndarray, frequency: float, cycles: int) -> np.ndarray:
    start = t[-1] - cycles / frequency
    return t >= start - 1e-12


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values**2))) if len(values) else 0.0


def response_metrics(trace: SimTrace, trajectory: TrajectorySpec) -> ResponseMetrics:
    """
    Figures of merit of a closed-loop trace

    Args:
        trace: Closed-loop trace (setpoint and error columns filled)
        trajectory: The path that produced it

    Returns:
        ResponseMetrics
    """
    if len(trace) < 2:
        raise ValidationError("metrics need at least two samples")
    t, y, error = trace.t, trace.y, trace.error
    steady_state_error = float(error[-1])
    notes: List[str] = []

    if trajectory.kind in (TrajectoryKind.STEP, TrajectoryKind.STAIRCASE):
        rise, settling, overshoot = step_figures(t, y)
        rmse = _rms(error[t - t[0] >= settling])
        return ResponseMetrics(rise, settling, overshoot, steady_state_error, rmse, warnings=trace.warnings)

    if trajectory.kind is TrajectoryKind.RAMP:
        window = t >= t[0] + 0.5 * (t[-1] - t[0])
        return ResponseMetrics(None, None, None, steady_state_error, _rms(error[window]), warnings=trace.warnings)

    cycles = SimulationConfig.SINE_FIT_CYCLES
    if t[-1] - t[0] < cycles / trajectory.frequency:
        notes.append(f"trace shorter than {cycles} cycles; sine fit uses the whole run")
        window = np.ones_like(t, dtype=bool)
    else:
        window = _last_cycles(t, trajectory.frequency, cycles)

    reference = fit_sinusoid(t[window], trace.setpoint[window], trajectory.frequency)
    response = fit_sinusoid(t[window], y[window], trajectory.frequency)
    if reference.amplitude == 0:
        raise ValidationError("sinusoid metrics need a nonzero reference amplitude", field="amplitude_mm")
    ratio = response.amplitude / reference.amplitude
    lag = _wrap_degrees(math.degrees(reference.phase_rad - response.phase_rad))
    for note in notes:
        logger.warning(note)
    return ResponseMetrics(
        None, None, None, steady_state_error, _rms(error[window]), ratio, lag, trace.warnings + tuple(notes)
    )


def rise_decay_times(trace: SimTrace, vent_at: float) -> TimeResponse:
    """
    Rise time while pressurised and decay time after venting

    Both are measured against the peak displacement reached before
    ``vent_at``: rise from 10 % to 90 % of the excursion, decay from 90 %
    back down to 10 %.
    """
    t, y = trace.t, trace.y
    vent_index = int(np.searchsorted(t, vent_at))
    if vent_index < 2:
        raise ValidationError("vent time must leave a pressurised interval", field="hold_s")

    y0 = float(y[0])
    peak = float(np.max(y[:vent_index]))
    excursion = peak - y0
    if excursion <= 0:
        return TimeResponse(None, None, peak, ("no extension during the pressurised interval",))

    low, high = SimulationConfig.RISE_LIMITS
    t_low = _crossing_time(t[:vent_index], y[:vent_index], y0 + low * excursion)
    t_high = _crossing_time(t[:vent_index], y[:vent_index], y0 + high * excursion)
    rise = t_high - t_low if t_low is not None and t_high is not None else None

    d_high = _crossing_time(t, y, y0 + high * excursion, start=vent_index, rising=False)
    d_low = _crossing_time(t, y, y0 + low * excursion, start=vent_index, rising=False)
    notes: Tuple[str, ...] = ()
    decay = None
    if d_high is None or d_low is None:
        notes = ("displacement did not fall back to 10 % before the end of the run",)
        logger.warning(notes[0])
    else:
        decay = d_low - d_high
    return TimeResponse(rise, decay, peak, notes)


def step_time_response(
    params: PlantParams,
    pressure: float,
    hold: float,
    vent_duration: float,
    dt: float = SimulationConfig.DEFAULT_DT,
) -> TimeResponse:
    """
    Pressurise from rest for ``hold`` seconds, then vent

    Args:
        params: Plant parameters, usually with a pressure lag
        pressure: Applied pressure (MPa)
        hold: Pressurised interval (s)
        vent_duration: Observed interval after venting (s)
        dt: Step (s)
    """
    if not (hold > 0 and vent_duration > 0):
        raise ValidationError("hold and vent durations must be positive", field="hold_s")
    rest = static_equilibrium(params, params.pressure_limits[0])
    trace = integrate_rk4(
        params, (rest, 0.0, params.pressure_limits[0]), pressure_step(pressure, 0.0, hold), dt, hold + vent_duration
    )
    return rise_decay_times(trace, hold)


def disturbance_metrics(trace: SimTrace, start_s: float, band: float = SimulationConfig.SETTLING_BAND) -> DisturbanceMetrics:
    """
    Peak deviation caused by a load step and the time to return inside the band

    The reference is the setpoint (or, for open-loop traces, the
    displacement) at the instant the load is applied.
    """
    start = int(np.searchsorted(trace.t, start_s))
    if start >= len(trace):
        raise ValidationError("disturbance starts after the end of the trace", field="disturbance_at_s")
    reference = trace.setpoint[start]
    if not np.isfinite(reference):
        reference = trace.y[start]
    deviation = np.abs(trace.y[start:] - reference)
    tolerance = band * max(abs(reference), 1.0)

    outside = np.where(deviation > tolerance)[0]
    if len(outside) == 0:
        recovery: Optional[float] = 0.0
    elif outside[-1] == len(deviation) - 1:
        recovery = None
    else:
        recovery = float(trace.t[start + outside[-1] + 1] - trace.t[start])
    return DisturbanceMetrics(float(deviation.max()), recovery)


def level_rmse(trace: SimTrace, trajectory: TrajectorySpec) -> List[LevelAccuracy]:
    """Per-level RMSE over the second half of each staircase dwell"""
    if trajectory.kind is not TrajectoryKind.STAIRCASE:
        raise ValidationError("level accuracy needs a staircase trajectory", field="trajectory")
    results = []
    for k, level in enumerate(trajectory.levels):
        begin = (k + 0.5) * trajectory.dwell
        end = (k + 1) * trajectory.dwell
        if k == len(trajectory.levels) - 1:
            end = max(end, trajectory.duration)
        window = (trace.t >= begin) & (trace.t < end)
        results.append(LevelAccuracy(float(level), _rms(trace.y[window] - level)))
    return results


def frequency_grid(f_min: float, f_max: float, df: float) -> List[float]:
    """Inclusive grid f_min, f_min + df, ... up to f_max"""
    if not (f_min > 0 and f_max >= f_min and df > 0):
        raise ValidationError("frequency grid needs 0 < fmin <= fmax and df > 0", field="fmin")
    count = int(math.floor((f_max - f_min) / df + 1e-9)) + 1
    return [round(f_min + i * df, 12) for i in range(count)]


def sweep_amplitude(params: PlantParams, drive: DriveSpec, frequency: float) -> float:
    """Half peak-to-peak displacement over the measured cycles of one drive frequency"""
    cycles = drive.transient_cycles + drive.measure_cycles
    rest = static_equilibrium(params, drive.pressure_low)
    trace = integrate_rk4(
        params,
        (rest, 0.0, drive.pressure_low),
        square_wave(drive.pressure_high, frequency, drive.pressure_low),
        drive.dt,
        cycles / frequency,
    )
    window = trace.t >= drive.transient_cycles / frequency - 1e-12
    y = trace.y[window]
    return float((y.max() - y.min()) / 2.0)


def frequency_response(
    params: PlantParams,
    drive_spec: DriveSpec,
    f_min: float,
    f_max: float,
    df: float,
    max_concurrent: int = 1,
) -> List[FrequencyPoint]:
    """
    Square-wave displacement amplitude across a frequency grid

    Args:
        params: Plant parameters; the pressure lag shapes the roll-off
        drive_spec: Drive levels, step and cycle counts
        f_min: First frequency (Hz)
        f_max: Last frequency (Hz), inclusive
        df: Frequency step (Hz)
        max_concurrent: Frequencies simulated at once

    Returns:
        FrequencyPoint list; dB is relative to the largest amplitude in the sweep
    """
    def amplitude_at(frequency: float) -> float:
        amplitude = sweep_amplitude(params, drive_spec, frequency)
        logger.debug("sweep %.4g Hz: amplitude %.6g mm", frequency, amplitude)
        return amplitude

    results = run_sweep(amplitude_at, frequency_grid(f_min, f_max, df), max_concurrent)
    return to_response_curve([r.parameter for r in results], [r.value for r in results])


def to_response_curve(frequencies: Sequence[float], amplitudes: Sequence[float]) -> List[FrequencyPoint]:
    peak = max(amplitudes)
    if not peak > 0:
        raise NoCrossingError("the actuator did not move at any swept frequency")
    return [
        FrequencyPoint(float(f), float(a), 20.0 * math.log10(a / peak) if a > 0 else -math.inf)
        for f, a in zip(frequencies, amplitudes)
    ]


CurvePoint = Union[FrequencyPoint, Tuple[float, float, float]]


def _as_points(response_curve: Sequence[CurvePoint]) -> List[FrequencyPoint]:
    return [p if isinstance(p, FrequencyPoint) else FrequencyPoint(*p) for p in response_curve]


def cutoff_crossings(response_curve: Sequence[CurvePoint]) -> int:
    """Times the dB series passes the -3 dB level in either direction; 1 for a clean roll-off"""
    above = [p.amplitude_db > CUTOFF_DB for p in _as_points(response_curve)]
    return sum(a != b for a, b in zip(above, above[1:]))


def bandwidth(response_curve: Sequence[CurvePoint]) -> float:
    """
    Frequency of the first -3 dB crossing, linearly interpolated in dB

    A curve that climbs back above -3 dB still reports its first crossing,
    with a warning.

    Raises:
        NoCrossingError: the curve never falls to -3 dB
    """
    points = _as_points(response_curve)
    if not points:
        raise NoCrossingError("empty response curve")
    if points[0].amplitude_db <= CUTOFF_DB:
        raise NoCrossingError("the curve starts below -3 dB; extend the sweep to lower frequencies")
    crossings = cutoff_crossings(points)
    if crossings > 1:
        logger.warning("response crosses -3 dB %d times; reporting the first crossing", crossings)

    for prev, point in zip(points, points[1:]):
        if point.amplitude_db == CUTOFF_DB:
            return point.frequency_hz
        if point.amplitude_db < CUTOFF_DB:
            fraction = (CUTOFF_DB - prev.amplitude_db) / (point.amplitude_db - prev.amplitude_db)
            return prev.frequency_hz + fraction * (point.frequency_hz - prev.frequency_hz)

    raise NoCrossingError(
        f"no -3 dB crossing between {points[0].frequency_hz:g} and {points[-1].frequency_hz:g} Hz"
    )
