import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.simulation_config import SimulationConfig
from utils.concurrency import run_sweep

from .control import PidGains, TrajectoryKind, TrajectorySpec, simulate_closed_loop
from .datasets_io import (
    ActuatorSetup,
    GeometryConfig,
    load_force_displacement,
    load_geometry_config,
    load_stress_strain,
)
from .dynamics import Disturbance, PressureLag, SimTrace
from .errors import ValidationError
from .geometry import (
    ActuatorGeometry,
    FoldSpec,
    bend_analysis,
    contraction_total,
    extension_single_fold,
    extension_total,
)
from .hyperelastic import MaterialFamily, MaterialModel, fit_linear_family
from .metrics import (
    DriveSpec,
    bandwidth,
    cutoff_crossings,
    disturbance_metrics,
    frequency_response,
    level_rmse,
    response_metrics,
    step_time_response,
)
from .report_generator import Report, ReportGenerator
from .statics import blocked_force, force_displacement_curve, max_extension, net_force, projected_areas
from .stiffness import ForceDisplacementDataset, check_pressure_ordering, fit_cubic, interval_stiffness
from .units import UnitConverter

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("fold_angle", "fold_width", "fold_count")
SWEEP_METRICS = ("extension", "blocked_force", "max_extension")
SWEEP_HOLDS = ("fold_width", "fold_length")
KINEMATIC_MODES = ("extension", "contraction", "bending")


class ActuatorToolkit:
    """Runs the models behind each command and shapes their results into reports"""

    def __init__(self, max_concurrent: int = 4, strict: bool = True):
        """
        Initialize toolkit

        Args:
            max_concurrent: Sweep points evaluated at once
            strict: Reject unknown config keys instead of warning
        """
        self.max_concurrent = max_concurrent
        self.strict = strict
        self.report_generator = ReportGenerator()

    def load(self, config_path: Path) -> ActuatorSetup:
        """Loads a config file and converts it to internal units"""
        return load_geometry_config(config_path, strict=self.strict).to_setup()

    def kinematics(self, setup: ActuatorSetup, mode: str = "extension", delta_single: Optional[float] = None) -> Report:
        """
        Stroke report in one of the extension, contraction or bending modes

        Args:
            setup: Loaded actuator
            mode: Kinematic mode
            delta_single: Outer-side extension per fold for bending (mm);
                the full single-fold extension when None

        Returns:
            Flat report
        """
        if mode not in KINEMATIC_MODES:
            raise ValidationError(f"mode must be one of {', '.join(KINEMATIC_MODES)}", field="mode")
        spec = setup.fold_spec
        bend = None
        if mode == "bending":
            geom = setup.geometry
            if geom.constraining_layer_thickness_tc is None:
                raise ValidationError(
                    "bending needs constraining_layer_thickness_mm in the config",
                    field="constraining_layer_thickness_mm",
                )
            delta = extension_single_fold(spec) if delta_single is None else delta_single
            bend = bend_analysis(
                geom.actuator_length_l,
                spec.fold_count_n,
                delta,
                geom.sleeve_radius_r,
                geom.constraining_layer_thickness_tc,
            )
        return self.report_generator.kinematics_report(
            spec, extension_total(spec), contraction_total(spec), bend, mode, setup.chamber_count
        )

    def fit_material(self, data_path: Path, family: str = "mr5") -> Tuple[MaterialModel, Report]:
        try:
            material_family = MaterialFamily(family)
        except ValueError as e:
            raise ValidationError(f"unknown material family '{family}'", field="family") from e
        data = load_stress_strain(data_path)
        model, fit = fit_linear_family(data, material_family)
        return model, self.report_generator.material_report(model, fit)

    def fit_stiffness(
        self,
        data_path: Path,
        pressure_kpa: Optional[float] = None,
        bin_width: float = SimulationConfig.STIFFNESS_BIN_WIDTH_MM,
    ) -> Report:
        """
        Cubic fit and interval stiffness of one force-displacement dataset

        Args:
            data_path: CSV with displacement_mm, force_n and optionally pressure_kpa
            pressure_kpa: Which pressure group to fit when the file holds several
            bin_width: Interval width for the stiffness table (mm)
        """
        datasets = load_force_displacement(data_path)
        if pressure_kpa is not None:
            chosen = [d for d in datasets if d.pressure_kpa == pressure_kpa]
            if not chosen:
                labels = ", ".join(f"{d.pressure_kpa:g}" for d in datasets if d.pressure_kpa is not None)
                raise ValidationError(f"no rows at {pressure_kpa:g} kPa (found: {labels or 'none'})", field="pressure_kpa")
            data = chosen[0]
        elif len(datasets) == 1:
            data = datasets[0]
        else:
            raise ValidationError("file holds several pressures; choose one with --pressure-kpa", field="pressure_kpa")

        poly, fit = fit_cubic(data)
        report = self.report_generator.stiffness_report(poly, fit, interval_stiffness(data, bin_width))
        if len(datasets) > 1:
            report.update(self._pressure_ordering(datasets, bin_width))
        return report

    @staticmethod
    def _pressure_ordering(datasets: Sequence[ForceDisplacementDataset], bin_width: float) -> Report:
        # Compared at the middle of the displacement span every group covers
        start = max(d.displacement_array[0] for d in datasets)
        stop = min(d.displacement_array[-1] for d in datasets)
        if not stop > start:
            logger.warning("pressure groups share no displacement span; stiffness ordering not checked")
            return {"ordering_checked_at_mm": None}
        y = float(0.5 * (start + stop))
        violations = check_pressure_ordering(datasets, y, bin_width)
        for low, high in violations:
            logger.warning("stiffness at %.6g mm does not grow from %g kPa to %g kPa", y, low, high)
        return {
            "ordering_checked_at_mm": y,
            "pressure_order_violations_kpa": [f"{low:g}->{high:g}" for low, high in violations],
        }

    def statics(
        self,
        setup: ActuatorSetup,
        pressure_kpa: float,
        y_step: Optional[float] = None,
        update_areas: bool = False,
    ) -> Tuple[Report, List[Report]]:
        """
        Blocked force, free stroke and optionally the force-displacement curve

        Args:
            setup: Loaded actuator with a stiffness section
            pressure_kpa: Pressure (kPa)
            y_step: Curve spacing (mm); no curve when None
            update_areas: Use extension-dependent projected areas

        Returns:
            Tuple of (report, curve rows)
        """
        poly = setup.require_stiffness()
        pressure = UnitConverter.kpa_to_mpa(pressure_kpa)
        state = net_force(setup.geometry, poly, pressure, 0.0, setup.fold_spec)
        stroke = max_extension(setup.geometry, poly, pressure, setup.fold_spec, update_areas) if pressure > 0 else None
        areas = projected_areas(setup.geometry, setup.fold_spec)
        report = self.report_generator.statics_report(state, stroke, areas.effective)

        rows: List[Report] = []
        if y_step is not None:
            if not y_step > 0:
                raise ValidationError("y step must be positive", field="y_step")
            y_end = stroke if stroke is not None else poly.valid_range[1]
            grid = np.arange(0.0, y_end + 0.5 * y_step, y_step)
            curve = force_displacement_curve(setup.geometry, poly, pressure, grid, setup.fold_spec, update_areas)
            rows = self.report_generator.curve_rows(curve)
        return report, rows

    @staticmethod
    def build_trajectory(
        kind: str,
        duration: float,
        amplitude: float = 0.0,
        slope: float = 0.0,
        offset: float = 0.0,
        frequency: float = 0.0,
        levels: Sequence[float] = (),
        dwell: float = 0.0,
        ramp_duration: Optional[float] = None,
    ) -> TrajectorySpec:
        try:
            trajectory_kind = TrajectoryKind(kind)
        except ValueError as e:
            raise ValidationError(f"unknown trajectory '{kind}'", field="trajectory") from e
        return TrajectorySpec(
            kind=trajectory_kind,
            duration=duration,
            amplitude=amplitude,
            slope=slope,
            ramp_duration=ramp_duration,
            offset=offset,
            frequency=frequency,
            levels=tuple(levels),
            dwell=dwell,
        )

    def simulate(
        self,
        setup: ActuatorSetup,
        trajectory: TrajectorySpec,
        dt: Optional[float] = None,
        disturbance: Optional[Disturbance] = None,
        gains: Optional[PidGains] = None,
    ) -> Tuple[SimTrace, Report]:
        """
        Closed-loop tracking run with its metrics

        Args:
            setup: Loaded actuator with stiffness and pid sections
            trajectory: Reference path
            dt: Plant step (s); the controller sample time when None
            disturbance: Optional load step
            gains: Gains overriding the config's pid section

        Returns:
            Tuple of (trace, metrics report)
        """
        plant = setup.require_plant()
        gains = gains or setup.require_gains()
        trajectory = trajectory.check_reachable(extension_total(setup.fold_spec))
        trace = simulate_closed_loop(plant, gains, trajectory, dt=dt, disturbance=disturbance)

        report = self.report_generator.metrics_report(response_metrics(trace, trajectory), trajectory.kind.value)
        if disturbance is not None:
            result = disturbance_metrics(trace, disturbance.start_s)
            report.update(self.report_generator.disturbance_report(result, disturbance.force_n, disturbance.start_s))
        if trajectory.kind is TrajectoryKind.STAIRCASE:
            report.update(self.report_generator.level_report(level_rmse(trace, trajectory)))
        return trace, report

    def frequency(
        self,
        setup: ActuatorSetup,
        f_min: float,
        f_max: float,
        df: float,
        pressure_kpa: float = 100.0,
        dt: float = SimulationConfig.DEFAULT_DT,
        lag: Optional[PressureLag] = None,
    ) -> Tuple[List[Report], Report]:
        """
        Square-wave frequency sweep and its -3 dB bandwidth

        Returns:
            Tuple of (response rows, bandwidth report)
        """
        plant = setup.require_plant()
        if lag is not None:
            plant = replace(plant, pressure_lag=lag)
        if plant.pressure_lag is None:
            logger.warning("no pressure lag configured; the response will be nearly flat")
        drive = DriveSpec(pressure_high=UnitConverter.kpa_to_mpa(pressure_kpa), dt=dt)
        curve = frequency_response(plant, drive, f_min, f_max, df, self.max_concurrent)
        rows = self.report_generator.frequency_rows(curve)
        return rows, {
            "pressure_kpa": pressure_kpa,
            "bandwidth_hz": bandwidth(curve),
            "cutoff_crossings": cutoff_crossings(curve),
        }

    def time_response(
        self,
        setup: ActuatorSetup,
        pressure_kpa: float,
        hold: float,
        vent: float,
        dt: float = SimulationConfig.DEFAULT_DT,
    ) -> Report:
        plant = setup.require_plant()
        result = step_time_response(plant, UnitConverter.kpa_to_mpa(pressure_kpa), hold, vent, dt)
        return self.report_generator.time_response_report(result, pressure_kpa)

    def sweep(
        self,
        setup: ActuatorSetup,
        param: str,
        values: Sequence[float],
        metric: str,
        pressure_kpa: float = 100.0,
        hold: str = "fold_width",
    ) -> List[Report]:
        """
        Evaluates one metric across a geometric parameter range

        The fold count stays at the base actuator's value unless it is the
        swept parameter. Points run concurrently; rows come back ordered by
        parameter value.

        A fold angle sweep keeps the fold width fw by default, so S = fw / cos(theta)
        grows with the angle and the projected areas stay put. With
        hold="fold_length" the base S is kept instead and the areas shrink as
        the folds stand up.

        Args:
            setup: Base actuator
            param: fold_angle (deg), fold_width (mm) or fold_count
            values: Parameter values
            metric: extension (mm), blocked_force (N) or max_extension (mm)
            pressure_kpa: Pressure for the force metrics (kPa)
            hold: Fold dimension kept fixed while the angle varies

        Returns:
            One row per parameter value
        """
        if param not in SWEEP_PARAMS:
            raise ValidationError(f"param must be one of {', '.join(SWEEP_PARAMS)}", field="param")
        if metric not in SWEEP_METRICS:
            raise ValidationError(f"metric must be one of {', '.join(SWEEP_METRICS)}", field="metric")
        if hold not in SWEEP_HOLDS:
            raise ValidationError(f"hold must be one of {', '.join(SWEEP_HOLDS)}", field="hold")
        if hold == "fold_length" and param == "fold_width":
            raise ValidationError("a fold width sweep cannot hold the fold length", field="hold")
        if metric != "extension":
            setup.require_stiffness()
        if param == "fold_count" and any(v != int(v) or v < 1 for v in values):
            raise ValidationError("fold counts must be positive integers", field="range")

        pressure = UnitConverter.kpa_to_mpa(pressure_kpa)
        base_count = setup.fold_spec.fold_count_n
        base_length = setup.fold_spec.fold_length_s if hold == "fold_length" else None

        def evaluate(value: float) -> float:
            geom, spec = _vary(setup.geometry, param, value, base_count, base_length)
            if metric == "extension":
                return extension_total(spec)
            if metric == "blocked_force":
                return blocked_force(geom, setup.stiffness, pressure, spec)
            return max_extension(geom, setup.stiffness, pressure, spec)

        results = run_sweep(evaluate, list(values), self.max_concurrent)
        return [{param: r.parameter, metric: r.value} for r in results]

    @staticmethod
    def catalog_config(name: str) -> GeometryConfig:
        from config.actuator_catalog import ActuatorCatalog

        try:
            document = ActuatorCatalog.config_dict(name)
        except ValueError as e:
            raise ValidationError(str(e), field="name") from e
        return GeometryConfig.model_validate(document)


def _vary(
    geom: ActuatorGeometry, param: str, value: float, fold_count: int, fold_length: Optional[float] = None
) -> Tuple[ActuatorGeometry, FoldSpec]:
    if param == "fold_angle":
        beta = UnitConverter.deg_to_rad(value)
        width = geom.fold_width_fw if fold_length is None else fold_length * math.cos(beta)
        geom = replace(geom, fold_angle_beta=beta, fold_width_fw=width, warnings=())
    elif param == "fold_width":
        geom = replace(geom, fold_width_fw=value, warnings=())
        fold_length = None
    else:
        fold_count = int(value)
        fold_length = None
    return geom, geom.fold_spec(fold_count_n=fold_count, fold_length_s=fold_length)
