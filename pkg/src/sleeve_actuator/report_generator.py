from typing import Any, Dict, List, Optional, Sequence

from .errors import (
    DivergenceError,
    NoCrossingError,
    NoRootError,
    NumericalError,
    RankDeficiencyError,
    StraightActuatorError,
    ValidationError,
)
from .geometry import BendReport, FoldSpec
from .hyperelastic import MaterialFitReport, MaterialModel
from .metrics import DisturbanceMetrics, FrequencyPoint, LevelAccuracy, ResponseMetrics, TimeResponse
from .statics import StaticState
from .stiffness import CubicFitReport, IntervalStiffnessReport, StiffnessCubic
from .units import UnitConverter

Report = Dict[str, Any]


class ReportGenerator:
    """Builds the flat key-value reports printed by the CLI and written by write_report"""

    # Hints appended to error messages, keyed by error type
    ERROR_HINTS = {
        NoRootError: "try a higher pressure or check the stiffness coefficients",
        RankDeficiencyError: "the data does not span enough distinct values for this model",
        DivergenceError: "reduce dt or check the gains and plant parameters",
        NoCrossingError: "extend the frequency range or enable the pressure lag",
    }

    @staticmethod
    def kinematics_report(
        spec: FoldSpec,
        extension: float,
        contraction: float,
        bend: Optional[BendReport] = None,
        mode: str = "extension",
        chamber_count: Optional[int] = None,
    ) -> Report:
        """
        Stroke report of one actuator

        Args:
            spec: Fold description used for the strokes
            extension: Total extension (mm)
            contraction: Total contraction (mm)
            bend: Bending analysis, when requested
            mode: extension, contraction or bending
            chamber_count: Chamber count of an omnidirectional actuator

        Returns:
            Flat report
        """
        report: Report = {
            "mode": mode,
            "fold_length_s_mm": spec.fold_length_s,
            "fold_angle_deg": spec.fold_angle_deg,
            "fold_count_n": spec.fold_count_n,
            "delta_ext_mm": extension,
            "delta_con_mm": contraction,
        }
        if chamber_count is not None:
            report["chamber_count_nc"] = chamber_count
        if bend is not None:
            report["straight"] = bend.straight
            report["rho_mm"] = bend.curvature_radius_rho
            report["phi_outer_arc_deg"] = bend.bend_angle_outer_arc_deg
            report["phi_consistent_deg"] = bend.bend_angle_consistent_deg
            report["bend_residual_mm"] = bend.consistency_residual
        return report

    @staticmethod
    def material_report(model: MaterialModel, fit: MaterialFitReport) -> Report:
        report: Report = {"family": model.family.value, "material": model.label}
        report.update({f"{name}_mpa": value for name, value in model.coefficients.items()})
        report.update(
            {
                "samples": fit.sample_count,
                "residual_norm_mpa": fit.residual_norm,
                "rms_residual_mpa": fit.rms_residual_mpa,
                "peak_stress_mpa": fit.peak_stress_mpa,
                "condition": fit.condition,
            }
        )
        return report

    @staticmethod
    def stiffness_report(
        poly: StiffnessCubic, fit: CubicFitReport, intervals: Optional[IntervalStiffnessReport] = None
    ) -> Report:
        report: Report = {
            "a_n_per_mm3": poly.a,
            "b_n_per_mm2": poly.b,
            "c_n_per_mm": poly.c,
            "d_n": poly.d,
            "valid_from_mm": poly.valid_range[0],
            "valid_to_mm": poly.valid_range[1],
            "samples": fit.sample_count,
            "residual_norm_n": fit.residual_norm,
            "rms_residual_n": fit.rms_residual_n,
            "condition": fit.condition,
        }
        if intervals is not None:
            report["interval_stiffness_n_per_m"] = intervals.values()
        if poly.warnings:
            report["warnings"] = list(poly.warnings)
        return report

    @staticmethod
    def statics_report(state: StaticState, max_extension: Optional[float], effective_area: float) -> Report:
        return {
            "pressure_kpa": UnitConverter.mpa_to_kpa(state.pressure),
            "effective_area_mm2": effective_area,
            "blocked_force_n": state.net_force_Fy,
            "f1_n": state.F1,
            "f2y_n": state.F2y,
            "f3y_n": state.F3y,
            "fk0_n": state.FK,
            "max_extension_mm": max_extension,
        }

    @staticmethod
    def curve_rows(states: Sequence[StaticState]) -> List[Report]:
        return [
            {
                "y_mm": s.displacement_y,
                "net_force_n": s.net_force_Fy,
                "fk_n": s.FK,
                "extrapolated": int(s.extrapolated),
            }
            for s in states
        ]

    @staticmethod
    def metrics_report(metrics: ResponseMetrics, trajectory_kind: str) -> Report:
        report: Report = {"trajectory": trajectory_kind}
        report.update({key: value for key, value in metrics.as_dict().items() if value is not None})
        if metrics.warnings:
            report["warnings"] = list(metrics.warnings)
        return report

    @staticmethod
    def disturbance_report(result: DisturbanceMetrics, force_n: float, start_s: float) -> Report:
        return {
            "disturbance_n": force_n,
            "disturbance_at_s": start_s,
            "peak_deviation_mm": result.peak_deviation_mm,
            "recovery_time_s": result.recovery_time_s,
        }

    @staticmethod
    def level_report(levels: Sequence[LevelAccuracy]) -> Report:
        return {f"level_{item.level_mm:g}mm_rmse_mm": item.rmse_mm for item in levels}

    @staticmethod
    def frequency_rows(curve: Sequence[FrequencyPoint]) -> List[Report]:
        return [
            {"frequency_hz": p.frequency_hz, "amplitude_mm": p.amplitude_mm, "amplitude_db": p.amplitude_db}
            for p in curve
        ]

    @staticmethod
    def time_response_report(result: TimeResponse, pressure_kpa: float) -> Report:
        report: Report = {
            "pressure_kpa": pressure_kpa,
            "peak_displacement_mm": result.peak_displacement,
            "rise_time_s": result.rise_time,
            "decay_time_s": result.decay_time,
        }
        if result.warnings:
            report["warnings"] = list(result.warnings)
        return report

    @staticmethod
    def parse_error(error: Exception) -> str:
        """
        Turns an exception into a short message for stderr

        Args:
            error: Raised toolkit error

        Returns:
            One-line message, with a hint for numerical failures
        """
        if isinstance(error, StraightActuatorError):
            return "Actuator is straight: zero differential extension"
        if isinstance(error, ValidationError):
            lines = str(error).split("\n")
            return f"Invalid input: {lines[0]}"
        if isinstance(error, NumericalError):
            hint = next((h for kind, h in ReportGenerator.ERROR_HINTS.items() if isinstance(error, kind)), None)
            message = str(error).split("\n")[0]
            return f"Numerical failure: {message}" + (f" ({hint})" if hint else "")
        raw = str(error)
        return raw if len(raw) <= 100 else raw[:100] + "..."
