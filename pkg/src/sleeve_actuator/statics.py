"""
Quasi-static pressure-to-force model of the linear sleeve actuator.

Pressures are in MPa and areas in mm^2, so P * A is directly in N. The
projected areas are treated as totals over the actuator; there is no
per-fold summation.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from scipy import optimize

from config.simulation_config import SimulationConfig

from .errors import NoRootError, ValidationError
from .geometry import ActuatorGeometry, FoldSpec, extension_total, fold_angle_at_extension
from .stiffness import StiffnessCubic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProjectedAreas:
    """Cap, external-wall and internal-wall projected areas (mm^2)"""

    A1: float
    A2: float
    A3: float

    def __post_init__(self):
        for name in ("A1", "A2", "A3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0", field=name)

    @property
    def effective(self) -> float:
        """A1 + A2 - A3"""
        return self.A1 + self.A2 - self.A3


@dataclass(frozen=True)
class StaticState:
    """Force balance at one pressure (MPa) and displacement (mm); forces in N"""

    pressure: float
    displacement_y: float
    net_force_Fy: float
    F1: float
    F2y: float
    F3y: float
    FK: float
    extrapolated: bool = False


def area_cap(R1o: float, R1i: float) -> float:
    """Annular cap area pi (R1o^2 - R1i^2)"""
    if not R1o >= R1i >= 0:
        raise ValidationError("cap radii must satisfy R1o >= R1i >= 0", field="cap_outer_radius_R1o")
    return math.pi * (R1o**2 - R1i**2)


def _wall_area(radius: float, fold_length_s: float, theta_rad: float) -> float:
    reach = fold_length_s * math.cos(theta_rad)
    return math.pi * (radius + reach) ** 2 - math.pi * radius**2


def area_external(R2i: float, fold_length_s: float, theta_rad: float) -> float:
    """External wall area pi (R2i + S cos theta)^2 - pi R2i^2"""
    return _wall_area(R2i, fold_length_s, theta_rad)


def area_internal(R3i: float, fold_length_s: float, theta_rad: float) -> float:
    """Internal wall area pi (R3i + S cos theta)^2 - pi R3i^2"""
    return _wall_area(R3i, fold_length_s, theta_rad)


def projected_areas(
    geom: ActuatorGeometry,
    spec: Optional[FoldSpec] = None,
    y: float = 0.0,
    update_areas: bool = False,
) -> ProjectedAreas:
    """
    Projected areas of an actuator

    Args:
        geom: Actuator geometry
        spec: Fold description; derived from geom when None
        y: Current extension (mm), only used with update_areas
        update_areas: Recompute the fold angle from y instead of holding it at rest

    Returns:
        ProjectedAreas
    """
    spec = spec or geom.fold_spec()
    theta = fold_angle_at_extension(spec, y) if update_areas else spec.fold_angle
    return ProjectedAreas(
        A1=area_cap(geom.cap_outer_radius_R1o, geom.cap_inner_radius_R1i),
        A2=area_external(geom.external_wall_inner_radius_R2i, spec.fold_length_s, theta),
        A3=area_internal(geom.internal_wall_outer_radius_R3i, spec.fold_length_s, theta),
    )


def state_from_areas(areas: ProjectedAreas, poly: StiffnessCubic, P: float, y: float) -> StaticState:
    """Force balance for known areas"""
    if P < 0:
        raise ValidationError("negative pressure (vacuum) is outside the extension model", field="pressure")
    f1 = P * areas.A1
    f2 = P * areas.A2
    f3 = P * areas.A3
    fk = poly.force(y)
    return StaticState(
        pressure=P,
        displacement_y=y,
        net_force_Fy=f1 + f2 - f3 - fk,
        F1=f1,
        F2y=f2,
        F3y=f3,
        FK=fk,
        extrapolated=poly.is_extrapolated(y),
    )


def net_force(
    geom: ActuatorGeometry,
    poly: StiffnessCubic,
    P: float,
    y: float,
    spec: Optional[FoldSpec] = None,
    update_areas: bool = False,
) -> StaticState:
    """
    Net axial force Fy = P (A1 + A2 - A3) - FK(y)

    Args:
        geom: Actuator geometry
        poly: Axial stiffness cubic
        P: Internal pressure (MPa), must be >= 0
        y: Displacement (mm)
        spec: Fold description; derived from geom when None
        update_areas: Use extension-dependent areas

    Returns:
        StaticState; ``extrapolated`` is set when y lies outside the cubic's range
    """
    areas = projected_areas(geom, spec, y, update_areas)
    return state_from_areas(areas, poly, P, y)


def blocked_force(
    geom: ActuatorGeometry, poly: StiffnessCubic, P: float, spec: Optional[FoldSpec] = None
) -> float:
    """Net force at zero displacement (N)"""
    return net_force(geom, poly, P, 0.0, spec).net_force_Fy


def max_extension(
    geom: ActuatorGeometry,
    poly: StiffnessCubic,
    P: float,
    spec: Optional[FoldSpec] = None,
    update_areas: bool = False,
) -> float:
    """
    Free stroke: the displacement at which the net force reaches zero

    The root is bracketed on [0, 1.5 x geometric extension] and found by
    bisection to SimulationConfig.BISECTION_XTOL.

    Raises:
        ValidationError: if P is not positive
        NoRootError: if the net force does not change sign in the bracket
    """
    if not P > 0:
        raise ValidationError("max_extension needs a positive pressure", field="pressure")

    spec = spec or geom.fold_spec()
    y_hi = SimulationConfig.BRACKET_FACTOR * extension_total(spec)

    def balance(y: float) -> float:
        return net_force(geom, poly, P, y, spec, update_areas).net_force_Fy

    f_lo, f_hi = balance(0.0), balance(y_hi)
    if f_lo == 0.0:
        return 0.0
    if f_lo * f_hi > 0:
        raise NoRootError(
            f"net force keeps one sign on [0, {y_hi:.6g}] mm at {P * 1000:.6g} kPa "
            f"(F(0) = {f_lo:.6g} N, F(y_hi) = {f_hi:.6g} N)"
        )

    root = optimize.bisect(balance, 0.0, y_hi, xtol=SimulationConfig.BISECTION_XTOL, maxiter=200)
    logger.debug("max extension at %.6g MPa: %.9g mm", P, root)
    return float(root)


def force_displacement_curve(
    geom: ActuatorGeometry,
    poly: StiffnessCubic,
    P: float,
    y_grid: Sequence[float],
    spec: Optional[FoldSpec] = None,
    update_areas: bool = False,
) -> List[StaticState]:
    """Net force sampled on a displacement grid"""
    spec = spec or geom.fold_spec()
    return [net_force(geom, poly, P, float(y), spec, update_areas) for y in y_grid]
