"""
Closed-form stroke models of a folded-bellows sleeve.

All lengths are in mm. Angles are radians inside the dataclasses and degrees
at every public argument whose name ends in ``_deg``. Folds are treated as
rigid hinges; material deformation inside a fold is ignored.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from config.simulation_config import SimulationConfig

from .errors import StraightActuatorError, ValidationError
from .units import UnitConverter

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2


def _check_open_angle(angle_rad: float, name: str = "fold_angle"):
    if not 0.0 < angle_rad < HALF_PI:
        raise ValidationError(
            f"{name} must lie strictly between 0 and 90 degrees, "
            f"got {UnitConverter.rad_to_deg(angle_rad):.6g}",
            field=name,
        )


def _check_positive(value: float, name: str):
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be a positive finite length, got {value}", field=name)


@dataclass(frozen=True)
class FoldSpec:
    """Fold length S (mm), fold angle theta (rad) and fold count N"""

    fold_length_s: float
    fold_angle: float
    fold_count_n: int = 1

    def __post_init__(self):
        _check_positive(self.fold_length_s, "fold_length_s")
        _check_open_angle(self.fold_angle)
        if int(self.fold_count_n) != self.fold_count_n or self.fold_count_n < 1:
            raise ValidationError(
                f"fold_count_n must be a positive integer, got {self.fold_count_n}",
                field="fold_count_n",
            )

    @classmethod
    def from_degrees(cls, fold_length_s: float, fold_angle_deg: float, fold_count_n: int = 1) -> "FoldSpec":
        return cls(fold_length_s, UnitConverter.deg_to_rad(fold_angle_deg), fold_count_n)

    @property
    def fold_angle_deg(self) -> float:
        return UnitConverter.rad_to_deg(self.fold_angle)

    @property
    def pitch(self) -> float:
        """Rest-state axial height of one fold, 2 S sin(theta)"""
        return 2.0 * self.fold_length_s * math.sin(self.fold_angle)

    def with_angle_deg(self, fold_angle_deg: float) -> "FoldSpec":
        return FoldSpec.from_degrees(self.fold_length_s, fold_angle_deg, self.fold_count_n)


def derive_default_radii(
    sleeve_radius_r: float,
    wall_thickness_wt: float,
    wall_gap: float = 0.0,
    cap_width: float = 2.0,
) -> Dict[str, float]:
    """
    Derives the four pressure-area radii from the sleeve radius

    These radii are never tabulated; the defaults are an assumption:
    R1i = r, R1o = r + cap_width, R2i = r + wall_gap, R3i = r - wt.

    Args:
        sleeve_radius_r: Sleeve radius r (mm)
        wall_thickness_wt: Wall thickness wt (mm)
        wall_gap: Gap between the sleeve radius and the external wall (mm)
        cap_width: Radial width of the annular cap (mm)

    Returns:
        Dict with keys R1i, R1o, R2i, R3i
    """
    return {
        "R1i": sleeve_radius_r,
        "R1o": sleeve_radius_r + cap_width,
        "R2i": sleeve_radius_r + wall_gap,
        "R3i": sleeve_radius_r - wall_thickness_wt,
    }


@dataclass(frozen=True)
class ActuatorGeometry:
    """Sleeve dimensions (mm) and fold angle beta (rad) of one actuator"""

    sleeve_radius_r: float
    actuator_length_l: float
    fold_width_fw: float
    fold_angle_beta: float
    restraining_layer_thickness_tr: float
    restraining_layer_count_nr: int
    wall_thickness_wt: float
    shore_hardness_sh: int
    cap_inner_radius_R1i: float
    cap_outer_radius_R1o: float
    external_wall_inner_radius_R2i: float
    internal_wall_outer_radius_R3i: float
    constraining_layer_thickness_tc: Optional[float] = None
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for name in (
            "sleeve_radius_r",
            "actuator_length_l",
            "fold_width_fw",
            "restraining_layer_thickness_tr",
            "wall_thickness_wt",
            "cap_inner_radius_R1i",
            "cap_outer_radius_R1o",
            "external_wall_inner_radius_R2i",
            "internal_wall_outer_radius_R3i",
        ):
            _check_positive(getattr(self, name), name)
        if self.constraining_layer_thickness_tc is not None:
            _check_positive(self.constraining_layer_thickness_tc, "constraining_layer_thickness_tc")
        _check_open_angle(self.fold_angle_beta, "fold_angle_beta")
        if self.restraining_layer_count_nr < 0:
            raise ValidationError("restraining_layer_count_nr must be >= 0", field="restraining_layer_count_nr")

        if not self.cap_outer_radius_R1o > self.cap_inner_radius_R1i:
            raise ValidationError("cap_outer_radius_R1o must exceed cap_inner_radius_R1i", field="cap_outer_radius_R1o")
        if not (
            self.internal_wall_outer_radius_R3i
            <= self.cap_inner_radius_R1i
            <= self.external_wall_inner_radius_R2i
            <= self.cap_outer_radius_R1o
        ):
            raise ValidationError(
                "radii must satisfy R3i <= R1i <= R2i <= R1o",
                field="external_wall_inner_radius_R2i",
            )

        notes = list(self.warnings)
        if self.shore_hardness_sh not in SimulationConfig.TESTED_SHORE_HARDNESS:
            notes.append(f"shore hardness {self.shore_hardness_sh}A was never tested (85A and 95A were)")
        low, high = SimulationConfig.TESTED_FOLD_ANGLE_DEG
        beta_deg = UnitConverter.rad_to_deg(self.fold_angle_beta)
        if not low <= beta_deg <= high:
            notes.append(f"fold angle {beta_deg:.6g} deg is outside the tested span [{low:g}, {high:g}] deg")
        for note in notes[len(self.warnings):]:
            logger.warning(note)
        object.__setattr__(self, "warnings", tuple(notes))

    @property
    def fold_angle_deg(self) -> float:
        return UnitConverter.rad_to_deg(self.fold_angle_beta)

    def fold_spec(self, fold_count_n: Optional[int] = None, fold_length_s: Optional[float] = None) -> FoldSpec:
        """
        Builds the fold description used by the stroke models

        Args:
            fold_count_n: Explicit fold count; estimated from the length when None
            fold_length_s: Explicit fold length S; derived from fw when None

        Returns:
            FoldSpec with theta identified with beta
        """
        s = fold_length_s if fold_length_s is not None else fold_length_from_width(
            self.fold_width_fw, self.fold_angle_deg
        )
        if fold_count_n is None:
            fold_count_n = estimate_fold_count(self.actuator_length_l, FoldSpec(s, self.fold_angle_beta, 1))
        return FoldSpec(s, self.fold_angle_beta, fold_count_n)


@dataclass(frozen=True)
class BendGeometry:
    """Constrained-side length L, offset, central-line radius rho (mm), total angle (deg)"""

    constrained_side_length_L: float
    offset_thickness: float
    curvature_radius_rho: float
    bend_angle_total: float

    def __post_init__(self):
        _check_positive(self.curvature_radius_rho, "curvature_radius_rho")
        if self.bend_angle_total < 0:
            raise ValidationError("bend_angle_total must be >= 0", field="bend_angle_total")

    def arc_residual(self) -> float:
        """rho * angle(rad) - L; zero for the arc-consistent angle"""
        return self.curvature_radius_rho * UnitConverter.deg_to_rad(self.bend_angle_total) - self.constrained_side_length_L


@dataclass(frozen=True)
class BendReport:
    """Both bending-angle variants and their consistency residual"""

    straight: bool
    curvature_radius_rho: Optional[float]
    bend_angle_outer_arc_deg: float
    bend_angle_consistent_deg: float
    consistency_residual: float


def fold_length_from_width(fold_width_fw: float, fold_angle_deg: float) -> float:
    """
    Converts the horizontal fold width into the fold side length

    S = fw / cos(theta): fw is the horizontal projection of the fold side.

    Args:
        fold_width_fw: Fold width fw (mm)
        fold_angle_deg: Fold angle (degrees)

    Returns:
        Fold length S (mm)
    """
    _check_positive(fold_width_fw, "fold_width_fw")
    angle = UnitConverter.deg_to_rad(fold_angle_deg)
    _check_open_angle(angle)
    return fold_width_fw / math.cos(angle)


def extension_single_fold(spec: FoldSpec) -> float:
    """Extension of one fold, 2 S (1 - sin theta)"""
    return 2.0 * spec.fold_length_s * (1.0 - math.sin(spec.fold_angle))


def extension_total(spec: FoldSpec) -> float:
    """Extension stroke of N folds"""
    return spec.fold_count_n * extension_single_fold(spec)


def contraction_total(spec: FoldSpec) -> float:
    """Contraction stroke of N folds, 2 S sin(theta) N"""
    return 2.0 * spec.fold_length_s * math.sin(spec.fold_angle) * spec.fold_count_n


def curvature_radius(L: float, N: int, delta_single: float, r: float, offset: float) -> float:
    """
    Radius of the central line of a bent actuator

    Args:
        L: Constrained side length (mm)
        N: Fold count
        delta_single: Differential extension of one fold on the outer side (mm)
        r: Sleeve radius (mm)
        offset: Offset layer thickness added to r (mm)

    Returns:
        rho = L (r + offset) / (N delta_single)

    Raises:
        StraightActuatorError: if delta_single is zero
    """
    if N < 1:
        raise ValidationError("N must be >= 1", field="fold_count_n")
    if delta_single == 0:
        raise StraightActuatorError("zero differential extension: actuator is straight")
    if delta_single < 0:
        raise ValidationError("delta_single must be positive", field="delta_single")
    return L * (r + offset) / (N * delta_single)


def bend_angle_outer_arc(delta_single: float, rho: float, r: float, offset: float, N: int) -> float:
    """Total bending angle (deg) with the (rho + r + offset) denominator"""
    return N * (delta_single / (rho + r + offset)) * (180.0 / math.pi)


def bend_angle_consistent(delta_single: float, r: float, offset: float, N: int) -> float:
    """Total bending angle (deg) consistent with L = rho * phi"""
    return UnitConverter.rad_to_deg(N * delta_single / (r + offset))


def bend_analysis(L: float, N: int, delta_single: float, r: float, offset: float) -> BendReport:
    """
    Evaluates both bending-angle variants and the residual |rho * phi_outer_arc - L|

    Args:
        L: Constrained side length (mm)
        N: Fold count
        delta_single: Outer-side extension per fold (mm)
        r: Sleeve radius (mm)
        offset: Offset layer thickness (mm)

    Returns:
        BendReport; ``straight`` is set and rho is None when delta_single is 0
    """
    if delta_single == 0:
        return BendReport(True, None, 0.0, 0.0, 0.0)

    rho = curvature_radius(L, N, delta_single, r, offset)
    phi_outer_arc = bend_angle_outer_arc(delta_single, rho, r, offset, N)
    phi_consistent = bend_angle_consistent(delta_single, r, offset, N)
    residual = abs(rho * UnitConverter.deg_to_rad(phi_outer_arc) - L)
    return BendReport(False, rho, phi_outer_arc, phi_consistent, residual)


def estimate_fold_count(l: float, spec: FoldSpec) -> int:
    """
    Number of folds that fit in the actuator length at rest

    Args:
        l: Actuator length (mm)
        spec: Fold description (its own count is ignored)

    Returns:
        floor(l / (2 S sin theta)), at least 1
    """
    _check_positive(l, "actuator_length_l")
    pitch = spec.pitch
    if pitch > l:
        raise ValidationError(
            f"one fold pitch ({pitch:.6g} mm) exceeds the actuator length ({l:.6g} mm)",
            field="actuator_length_l",
        )
    return max(1, int(math.floor(l / pitch + 1e-9)))


def fold_angle_at_extension(spec: FoldSpec, y: float) -> float:
    """
    Fold angle (rad) after the actuator has extended by y

    Each fold takes y / N; its height 2 S sin(theta) grows by that amount, so
    sin(theta_y) = sin(theta) + y / (2 S N), capped at a flat fold.
    """
    sin_theta = math.sin(spec.fold_angle) + y / (2.0 * spec.fold_length_s * spec.fold_count_n)
    return math.asin(min(1.0, max(0.0, sin_theta)))
