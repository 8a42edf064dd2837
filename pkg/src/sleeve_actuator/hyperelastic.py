"""
Incompressible hyperelastic strain-energy models for TPU.

Invariant-based families are written as polynomials
W = sum_k C_k (I1 - 3)^i_k (I2 - 3)^j_k, which makes the uniaxial nominal
stress linear in the coefficients and lets one least-squares routine fit
every one of them. Ogden is stretch-based and evaluate-only.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config.simulation_config import SimulationConfig

from .errors import RankDeficiencyError, ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

INCOMPRESSIBILITY_TOL = 1e-12


class MaterialFamily(str, Enum):
    NEO_HOOKEAN = "neo_hookean"
    MOONEY_RIVLIN_2 = "mr2"
    MOONEY_RIVLIN_5 = "mr5"
    YEOH_3 = "yeoh3"
    OGDEN = "ogden"


# (coefficient name, power of (I1 - 3), power of (I2 - 3))
POLYNOMIAL_TERMS: Dict[MaterialFamily, Tuple[Tuple[str, int, int], ...]] = {
    MaterialFamily.NEO_HOOKEAN: (("C10", 1, 0),),
    MaterialFamily.MOONEY_RIVLIN_2: (("C10", 1, 0), ("C01", 0, 1)),
    MaterialFamily.MOONEY_RIVLIN_5: (
        ("C10", 1, 0),
        ("C01", 0, 1),
        ("C20", 2, 0),
        ("C11", 1, 1),
        ("C02", 0, 2),
    ),
    MaterialFamily.YEOH_3: (("C10", 1, 0), ("C20", 2, 0), ("C30", 3, 0)),
}

LINEAR_FAMILIES = tuple(POLYNOMIAL_TERMS)


@lru_cache(maxsize=1)
def _note_mr5_form():
    # Printed form repeats C10(I1-3) and squares (I1-3) for C02.
    logger.info("Mooney-Rivlin 5 uses the standard basis: last term is C02*(I2-3)^2")


@dataclass(frozen=True)
class StretchState:
    """Principal stretches (dimensionless)"""

    lambda1: float
    lambda2: float
    lambda3: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValidationError(f"{name} must be positive, got {value}", field=name)

    @classmethod
    def incompressible(cls, lambda1: float, lambda2: float, lambda3: Optional[float] = None) -> "StretchState":
        """
        Builds a volume-preserving state

        Args:
            lambda1: First principal stretch
            lambda2: Second principal stretch
            lambda3: Third stretch; computed as 1/(lambda1*lambda2) when omitted

        Raises:
            ValidationError: if the product of the stretches differs from 1
        """
        if not lambda1 * lambda2 > 0:
            raise ValidationError("lambda1 and lambda2 must be positive", field="lambda1")
        if lambda3 is None:
            lambda3 = 1.0 / (lambda1 * lambda2)
        state = cls(lambda1, lambda2, lambda3)
        if abs(lambda1 * lambda2 * lambda3 - 1.0) > INCOMPRESSIBILITY_TOL:
            raise ValidationError(
                f"stretch product {lambda1 * lambda2 * lambda3!r} is not 1 (incompressible)",
                field="lambda3",
            )
        return state

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3)


@dataclass(frozen=True)
class InvariantSet:
    I1: float
    I2: float
    I3: float


@dataclass(frozen=True)
class MaterialModel:
    """
    A hyperelastic model family with named coefficients

    C-coefficients and Ogden mu_i are in MPa; Ogden alpha_i are dimensionless
    and stored as mu1..muN followed by alpha1..alphaN.
    """

    family: MaterialFamily
    coefficients: Dict[str, float]
    label: str = ""
    incompressibility_d1: float = 0.0

    def __post_init__(self):
        names = list(self.coefficients)
        expected = coefficient_names(self.family, ogden_terms=len(names) // 2 or 1)
        if names != expected:
            raise ValidationError(
                f"{self.family.value} expects coefficients {expected}, got {names}",
                field="coefficients",
            )
        if self.incompressibility_d1 != 0.0:
            raise ValidationError("only incompressible models (D1 = 0) are supported", field="D1")
        if self.family is MaterialFamily.MOONEY_RIVLIN_5:
            _note_mr5_form()

    def vector(self) -> np.ndarray:
        return np.array(list(self.coefficients.values()), dtype=float)


@dataclass(frozen=True)
class StressStrainDataset:
    """Uniaxial tensile samples: engineering strain and nominal stress (MPa)"""

    strains: Tuple[float, ...]
    stresses: Tuple[float, ...]
    material_label: str = ""

    def __post_init__(self):
        if len(self.strains) != len(self.stresses):
            raise ValidationError("strain and stress columns differ in length")
        values = np.asarray(self.strains + self.stresses, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValidationError("stress-strain samples must be finite")
        if self.strains and self.strains[0] < 0:
            raise ValidationError("first strain must be >= 0", field="strain", row=1)
        for i in range(1, len(self.strains)):
            if not self.strains[i] > self.strains[i - 1]:
                raise ValidationError(
                    f"strain must be strictly increasing (row {i + 1})", field="strain", row=i + 1
                )

    def __len__(self) -> int:
        return len(self.strains)

    @property
    def stretch_array(self) -> np.ndarray:
        return 1.0 + np.asarray(self.strains, dtype=float)

    @property
    def stress_array(self) -> np.ndarray:
        return np.asarray(self.stresses, dtype=float)


@dataclass(frozen=True)
class MaterialFitReport:
    family: MaterialFamily
    sample_count: int
    residual_norm: float
    rms_residual_mpa: float
    peak_stress_mpa: float
    condition: float
    warnings: Tuple[str, ...] = field(default=())


def coefficient_names(family: MaterialFamily, ogden_terms: int = 1) -> List[str]:
    if family is MaterialFamily.OGDEN:
        return [f"mu{i + 1}" for i in range(ogden_terms)] + [f"alpha{i + 1}" for i in range(ogden_terms)]
    return [name for name, _, _ in POLYNOMIAL_TERMS[family]]


def make_model(family: MaterialFamily, values: Sequence[float], label: str = "") -> MaterialModel:
    """Builds a model from coefficient values in the family's canonical order"""
    names = coefficient_names(family, ogden_terms=max(1, len(values) // 2))
    if len(names) != len(values):
        raise ValidationError(f"{family.value} needs {len(names)} coefficients, got {len(values)}")
    return MaterialModel(family, dict(zip(names, (float(v) for v in values))), label=label)


def invariants_of(state: StretchState) -> InvariantSet:
    l1, l2, l3 = (v * v for v in state.as_tuple())
    return InvariantSet(
        I1=l1 + l2 + l3,
        I2=l1 * l2 + l2 * l3 + l3 * l1,
        I3=l1 * l2 * l3,
    )


def uniaxial_state(stretch: float) -> StretchState:
    """Incompressible uniaxial stretch (lambda, lambda^-1/2, lambda^-1/2)"""
    if not (stretch > 0 and math.isfinite(stretch)):
        raise ValidationError(f"stretch must be positive and finite, got {stretch}", field="stretch")
    lateral = 1.0 / math.sqrt(stretch)
    return StretchState(stretch, lateral, lateral)


def stretch_from_strain(engineering_strain: ArrayLike) -> ArrayLike:
    return 1.0 + engineering_strain


def _polynomial_terms(model: MaterialModel) -> Tuple[Tuple[str, int, int], ...]:
    try:
        return POLYNOMIAL_TERMS[model.family]
    except KeyError:
        raise ValidationError(
            f"{model.family.value} is stretch-based; use strain_energy_from_stretches", field="family"
        ) from None


def strain_energy(model: MaterialModel, inv: InvariantSet) -> float:
    """Strain-energy density W (MPa) of an invariant-based model"""
    j1 = inv.I1 - 3.0
    j2 = inv.I2 - 3.0
    return sum(model.coefficients[name] * j1**i * j2**j for name, i, j in _polynomial_terms(model))


def strain_energy_from_stretches(model: MaterialModel, state: StretchState) -> float:
    """Strain-energy density W (MPa) for any family, Ogden included"""
    if model.family is not MaterialFamily.OGDEN:
        return strain_energy(model, invariants_of(state))

    n = len(model.coefficients) // 2
    values = model.vector()
    mus, alphas = values[:n], values[n:]
    stretches = np.array(state.as_tuple())
    return float(sum(mu / a * (np.sum(stretches**a) - 3.0) for mu, a in zip(mus, alphas)))


def energy_derivatives(model: MaterialModel, inv: InvariantSet) -> Tuple[float, float]:
    """Analytic (dW/dI1, dW/dI2)"""
    j1 = inv.I1 - 3.0
    j2 = inv.I2 - 3.0
    d1 = 0.0
    d2 = 0.0
    for name, i, j in _polynomial_terms(model):
        c = model.coefficients[name]
        if i:
            d1 += c * i * j1 ** (i - 1) * j2**j
        if j:
            d2 += c * j * j1**i * j2 ** (j - 1)
    return d1, d2


def _uniaxial_design(family: MaterialFamily, stretch: np.ndarray) -> np.ndarray:
    """Column k holds the nominal stress produced by a unit coefficient k"""
    j1 = stretch**2 + 2.0 / stretch - 3.0
    j2 = 2.0 * stretch + 1.0 / stretch**2 - 3.0
    prefactor = 2.0 * (stretch - stretch**-2)
    columns = []
    for _, i, j in POLYNOMIAL_TERMS[family]:
        w1 = i * j1 ** (i - 1) * j2**j if i else np.zeros_like(stretch)
        w2 = j * j1**i * j2 ** (j - 1) if j else np.zeros_like(stretch)
        columns.append(prefactor * (w1 + w2 / stretch))
    return np.column_stack(columns)


def uniaxial_nominal_stress(model: MaterialModel, stretch: ArrayLike) -> ArrayLike:
    """
    Nominal (engineering) stress in incompressible uniaxial tension

    Args:
        model: Material model
        stretch: Stretch lambda (scalar or array), must be positive

    Returns:
        P = 2 (lambda - lambda^-2)(dW/dI1 + dW/dI2 / lambda) in MPa, or the
        Ogden sum mu_i (lambda^(alpha_i - 1) - lambda^(-alpha_i/2 - 1))
    """
    lam = np.asarray(stretch, dtype=float)
    if np.any(lam <= 0):
        raise ValidationError("stretch must be positive", field="stretch")

    if model.family is MaterialFamily.OGDEN:
        n = len(model.coefficients) // 2
        values = model.vector()
        stress = sum(
            mu * (lam ** (a - 1.0) - lam ** (-a / 2.0 - 1.0)) for mu, a in zip(values[:n], values[n:])
        )
    else:
        stress = _uniaxial_design(model.family, np.atleast_1d(lam)) @ model.vector()
        stress = stress.reshape(lam.shape)

    return float(stress) if np.ndim(stress) == 0 else stress


def generate_uniaxial_dataset(
    model: MaterialModel,
    stretches: Sequence[float],
    noise: float = 0.0,
    seed: Optional[int] = None,
    label: str = "",
) -> StressStrainDataset:
    """
    Samples a model into a synthetic tensile dataset

    Args:
        model: Material model to sample
        stretches: Strictly increasing stretches
        noise: Relative multiplicative noise level (0.01 is 1 %)
        seed: Seed for numpy's default generator
        label: Material label stored on the dataset
    """
    lam = np.asarray(stretches, dtype=float)
    stress = np.asarray(uniaxial_nominal_stress(model, lam), dtype=float)
    if noise:
        rng = np.random.default_rng(seed)
        stress = stress * (1.0 + noise * rng.standard_normal(stress.shape))
    return StressStrainDataset(
        tuple(float(v) for v in lam - 1.0),
        tuple(float(v) for v in stress),
        material_label=label or model.label,
    )


def fit_linear_family(data: StressStrainDataset, family: MaterialFamily) -> Tuple[MaterialModel, MaterialFitReport]:
    """
    Least-squares calibration of a coefficient-linear family

    The design matrix is column-equilibrated and solved through a QR
    factorisation.

    Args:
        data: Tensile samples (nominal stress)
        family: Any family in LINEAR_FAMILIES

    Returns:
        Tuple of (fitted model, fit report)

    Raises:
        ValidationError: too few samples or no strained sample
        RankDeficiencyError: condition estimate above SimulationConfig.MAX_CONDITION
    """
    if family not in POLYNOMIAL_TERMS:
        raise ValidationError(f"{family.value} cannot be fitted by linear least squares", field="family")

    names = coefficient_names(family)
    if len(data) < len(names):
        raise ValidationError(f"{family.value} needs at least {len(names)} samples, got {len(data)}")

    stretch = data.stretch_array
    if not np.any(stretch > 1.0):
        raise ValidationError("at least one sample must have positive strain", field="strain")

    design = _uniaxial_design(family, stretch)
    target = data.stress_array

    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    scaled = design / scale

    condition = float(np.linalg.cond(scaled))
    if not np.isfinite(condition) or condition > SimulationConfig.MAX_CONDITION:
        raise RankDeficiencyError(
            f"design matrix condition estimate {condition:.3g} exceeds {SimulationConfig.MAX_CONDITION:.0e}",
            condition,
        )

    q, r = linalg.qr(scaled, mode="economic")
    solution = linalg.solve_triangular(r, q.T @ target) / scale

    residual = target - design @ solution
    residual_norm = float(np.linalg.norm(residual))
    model = make_model(family, solution, label=data.material_label)
    report = MaterialFitReport(
        family=family,
        sample_count=len(data),
        residual_norm=residual_norm,
        rms_residual_mpa=residual_norm / math.sqrt(len(data)),
        peak_stress_mpa=float(np.max(np.abs(target))) if len(target) else 0.0,
        condition=condition,
    )
    logger.debug("fitted %s: rms residual %.3g MPa, cond %.3g", family.value, report.rms_residual_mpa, condition)
    return model, report
