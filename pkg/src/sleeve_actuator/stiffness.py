"""
Empirical axial-stiffness polynomial FK(y) = a y^3 + b y^2 + c y + d.

y is in mm and FK in N; interval stiffness values are reported in N/m.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config.simulation_config import SimulationConfig

from .errors import RankDeficiencyError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StiffnessCubic:
    """Cubic coefficients a (N/mm^3), b (N/mm^2), c (N/mm), d (N) and their fitted range (mm)"""

    a: float
    b: float
    c: float
    d: float
    valid_range: Tuple[float, float] = (0.0, 40.0)
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        low, high = self.valid_range
        if not low < high:
            raise ValidationError(f"valid_range must be nonempty, got {self.valid_range}", field="valid_range")
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c, self.d)):
            raise ValidationError("stiffness coefficients must be finite", field="stiffness")
        if self.c <= 0 and not self.warnings:
            note = f"linear stiffness coefficient c = {self.c:.6g} N/mm is not positive"
            logger.warning(note)
            object.__setattr__(self, "warnings", (note,))

    @classmethod
    def zero(cls, valid_range: Tuple[float, float] = (0.0, 40.0)) -> "StiffnessCubic":
        return cls(0.0, 0.0, 0.0, 0.0, valid_range, warnings=("zero stiffness polynomial",))

    def coefficients(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def derivative_coefficients(self) -> Tuple[float, float, float]:
        """Coefficients of K(y) = 3a y^2 + 2b y + c"""
        return (3.0 * self.a, 2.0 * self.b, self.c)

    def force(self, y: float) -> float:
        return ((self.a * y + self.b) * y + self.c) * y + self.d

    def stiffness(self, y: float) -> float:
        return (3.0 * self.a * y + 2.0 * self.b) * y + self.c

    def is_extrapolated(self, y: float) -> bool:
        low, high = self.valid_range
        return not low <= y <= high


@dataclass(frozen=True)
class ForceDisplacementDataset:
    """Force (N) measured against displacement (mm), optionally at one pressure (kPa)"""

    displacements: Tuple[float, ...]
    forces: Tuple[float, ...]
    pressure_kpa: Optional[float] = None
    model_label: str = ""

    def __post_init__(self):
        if len(self.displacements) != len(self.forces):
            raise ValidationError("displacement and force columns differ in length")
        if not np.all(np.isfinite(np.asarray(self.displacements + self.forces, dtype=float))):
            raise ValidationError("force-displacement samples must be finite")
        for i in range(1, len(self.displacements)):
            if self.displacements[i] < self.displacements[i - 1]:
                raise ValidationError(
                    f"displacement must be nondecreasing (row {i + 1})", field="displacement_mm", row=i + 1
                )

    def __len__(self) -> int:
        return len(self.displacements)

    @property
    def displacement_array(self) -> np.ndarray:
        return np.asarray(self.displacements, dtype=float)

    @property
    def force_array(self) -> np.ndarray:
        return np.asarray(self.forces, dtype=float)


@dataclass(frozen=True)
class IntervalStiffness:
    start_mm: float
    end_mm: float
    stiffness_n_per_m: float


@dataclass(frozen=True)
class IntervalStiffnessReport:
    intervals: Tuple[IntervalStiffness, ...]

    def values(self) -> List[float]:
        return [item.stiffness_n_per_m for item in self.intervals]


@dataclass(frozen=True)
class CubicFitReport:
    sample_count: int
    residual_norm: float
    rms_residual_n: float
    condition: float


def stiffness_force(poly: StiffnessCubic, y: float) -> float:
    """FK(y) in N"""
    return poly.force(y)


def axial_stiffness(poly: StiffnessCubic, y: float) -> float:
    """dFK/dy in N/mm"""
    return poly.stiffness(y)


def fit_cubic(data: ForceDisplacementDataset) -> Tuple[StiffnessCubic, CubicFitReport]:
    """
    Least-squares cubic through force-displacement samples

    Args:
        data: At least four samples

    Returns:
        Tuple of (cubic valid over the data's displacement span, residual report)

    Raises:
        ValidationError: fewer than four samples
        RankDeficiencyError: zero displacement span or ill-conditioned design
    """
    if len(data) < 4:
        raise ValidationError(f"a cubic fit needs at least 4 samples, got {len(data)}")

    y = data.displacement_array
    force = data.force_array
    span = (float(y.min()), float(y.max()))
    if not span[1] > span[0]:
        raise RankDeficiencyError("all samples share one displacement", math.inf)

    design = np.column_stack([y**3, y**2, y, np.ones_like(y)])
    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    scaled = design / scale

    condition = float(np.linalg.cond(scaled))
    if not np.isfinite(condition) or condition > SimulationConfig.MAX_CONDITION:
        raise RankDeficiencyError(f"cubic design condition estimate {condition:.3g} is too large", condition)

    q, r = linalg.qr(scaled, mode="economic")
    a, b, c, d = linalg.solve_triangular(r, q.T @ force) / scale

    residual = force - design @ np.array([a, b, c, d])
    residual_norm = float(np.linalg.norm(residual))
    poly = StiffnessCubic(float(a), float(b), float(c), float(d), span)
    return poly, CubicFitReport(len(data), residual_norm, residual_norm / math.sqrt(len(data)), condition)


def _unique_samples(data: ForceDisplacementDataset) -> Tuple[np.ndarray, np.ndarray]:
    # Repeated displacements are averaged so interpolation sees a strictly increasing axis
    y, inverse = np.unique(data.displacement_array, return_inverse=True)
    force = np.bincount(inverse, weights=data.force_array) / np.bincount(inverse)
    return y, force


def interval_stiffness(
    data: ForceDisplacementDataset, bin_width: float = SimulationConfig.STIFFNESS_BIN_WIDTH_MM
) -> IntervalStiffnessReport:
    """
    Force-to-displacement ratio over contiguous displacement bins

    Bins start at the first displacement and step by bin_width; the last bin
    is shortened to end at the last displacement. Bin-edge forces are
    linearly interpolated from the samples.

    Args:
        data: Force-displacement samples spanning a positive range
        bin_width: Bin width in mm

    Returns:
        IntervalStiffnessReport with stiffness in N/m
    """
    if not bin_width > 0:
        raise ValidationError("bin_width must be positive", field="bin_width")

    y, force = _unique_samples(data)
    if len(y) < 2:
        raise ValidationError("interval stiffness needs at least two distinct displacements")

    start, stop = float(y[0]), float(y[-1])
    edges = [start]
    while edges[-1] + bin_width < stop - 1e-9 * bin_width:
        edges.append(edges[-1] + bin_width)
    edges.append(stop)

    edge_force = np.interp(edges, y, force)
    intervals = tuple(
        IntervalStiffness(
            start_mm=edges[i],
            end_mm=edges[i + 1],
            stiffness_n_per_m=float((edge_force[i + 1] - edge_force[i]) / (edges[i + 1] - edges[i]) * 1000.0),
        )
        for i in range(len(edges) - 1)
    )
    return IntervalStiffnessReport(intervals)


def stiffness_at(report: IntervalStiffnessReport, y: float) -> float:
    """Interval stiffness (N/m) of the bin containing y"""
    for item in report.intervals:
        if item.start_mm <= y <= item.end_mm:
            return item.stiffness_n_per_m
    raise ValidationError(f"displacement {y} mm lies outside the measured intervals", field="y")


def check_pressure_ordering(
    datasets: Sequence[ForceDisplacementDataset],
    y: float,
    bin_width: float = SimulationConfig.STIFFNESS_BIN_WIDTH_MM,
) -> List[Tuple[float, float]]:
    """
    Checks that stiffness at y grows with the pressure label

    Args:
        datasets: Per-pressure datasets; each must carry pressure_kpa
        y: Displacement at which to compare (mm)
        bin_width: Interval width (mm)

    Returns:
        List of (lower pressure, higher pressure) pairs that violate the ordering
    """
    labelled = [d for d in datasets if d.pressure_kpa is not None]
    if len(labelled) != len(datasets):
        raise ValidationError("every dataset needs a pressure label", field="pressure_kpa")

    ordered = sorted(labelled, key=lambda d: d.pressure_kpa)
    values = [stiffness_at(interval_stiffness(d, bin_width), y) for d in ordered]
    violations = []
    for i in range(1, len(ordered)):
        if not values[i] > values[i - 1]:
            violations.append((ordered[i - 1].pressure_kpa, ordered[i].pressure_kpa))
    return violations
