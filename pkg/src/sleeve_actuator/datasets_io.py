"""
File boundary of the toolkit: JSON actuator configs and CSV datasets in,
CSV traces and text/JSON reports out.

Files use boundary units (mm, kPa, N, degrees, s). Everything handed to the
models is in internal units (mm, MPa, N, radians, s); the conversion happens
here and nowhere else.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Type, Union

import numpy as np
import pandas as pd
import pydantic
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from config.simulation_config import SimulationConfig
from utils.validation import InputValidator

from .control import PidGains
from .dynamics import PlantParams, PressureLag, SimTrace
from .errors import ValidationError
from .geometry import ActuatorGeometry, FoldSpec, derive_default_radii
from .hyperelastic import StressStrainDataset
from .stiffness import ForceDisplacementDataset, StiffnessCubic
from .units import UnitConverter

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRACE_COLUMNS = ["t_s", "setpoint_mm", "y_mm", "v_mm_s", "p_mpa", "u_mpa", "e_mm"]
STRESS_STRAIN_COLUMNS = ["strain", "stress_mpa"]
FORCE_DISPLACEMENT_COLUMNS = ["displacement_mm", "force_n"]
PRESSURE_COLUMN = "pressure_kpa"

RADIUS_FIELDS = {
    "cap_inner_radius_mm": "R1i",
    "cap_outer_radius_mm": "R1o",
    "external_wall_inner_radius_mm": "R2i",
    "internal_wall_outer_radius_mm": "R3i",
}

_validator = InputValidator()


class StiffnessSection(BaseModel):
    """FK(y) = a y^3 + b y^2 + c y + d with y in mm and FK in N"""

    model_config = ConfigDict(extra="forbid")

    a: float
    b: float
    c: float
    d: float
    valid_range_mm: Tuple[float, float] = (0.0, 40.0)


class PlantSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mass_kg: float = Field(default=SimulationConfig.DEFAULT_MASS_KG, gt=0)
    damping_n_s_per_mm: float = Field(default=SimulationConfig.DEFAULT_DAMPING, ge=0)
    max_pressure_kpa: float = Field(default=SimulationConfig.DEFAULT_MAX_PRESSURE_KPA, gt=0)
    fill_tau_s: Optional[float] = Field(default=None, gt=0)
    vent_tau_s: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _both_taus(self) -> "PlantSection":
        if (self.fill_tau_s is None) != (self.vent_tau_s is None):
            raise ValueError("fill_tau_s and vent_tau_s must be given together")
        return self


class PidSection(BaseModel):
    """Gains in boundary units: kPa per mm, kPa per (mm*s), kPa*s per mm"""

    model_config = ConfigDict(extra="forbid")

    kp_kpa_per_mm: float
    ki_kpa_per_mm_s: float = 0.0
    kd_kpa_s_per_mm: float = 0.0
    output_min_kpa: float = 0.0
    output_max_kpa: float = SimulationConfig.DEFAULT_MAX_PRESSURE_KPA
    sample_time_s: float = Field(default=SimulationConfig.DEFAULT_DT, gt=0)
    anti_windup: bool = True
    derivative_on: Literal["measurement", "error"] = "measurement"


SECTIONS: Dict[str, Type[BaseModel]] = {
    "stiffness": StiffnessSection,
    "plant": PlantSection,
    "pid": PidSection,
}


@dataclass(frozen=True)
class ActuatorSetup:
    """A config converted to internal units and model objects"""

    name: str
    geometry: ActuatorGeometry
    fold_spec: FoldSpec
    stiffness: Optional[StiffnessCubic]
    plant: Optional[PlantParams]
    gains: Optional[PidGains]
    warnings: Tuple[str, ...] = ()
    chamber_count: Optional[int] = None

    def require_plant(self) -> PlantParams:
        if self.plant is None:
            raise ValidationError("config has no stiffness section; the plant cannot be built", field="stiffness")
        return self.plant

    def require_stiffness(self) -> StiffnessCubic:
        if self.stiffness is None:
            raise ValidationError("config has no stiffness section", field="stiffness")
        return self.stiffness

    def require_gains(self) -> PidGains:
        if self.gains is None:
            raise ValidationError("config has no pid section", field="pid")
        return self.gains


class GeometryConfig(BaseModel):
    """
    Actuator config document in boundary units

    The four pressure-area radii are optional as a group: omitted radii are
    derived from r and wt with a warning; a partial set is rejected.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = ""
    sleeve_radius_mm: float = Field(gt=0)
    actuator_length_mm: float = Field(gt=0)
    fold_width_mm: float = Field(gt=0)
    fold_angle_deg: float = Field(gt=0, lt=90)
    restraining_layer_thickness_mm: float = Field(gt=0)
    restraining_layer_count: int = Field(ge=0)
    wall_thickness_mm: float = Field(gt=0)
    shore_hardness: int = Field(gt=0)
    constraining_layer_thickness_mm: Optional[float] = Field(default=None, gt=0)
    chamber_count: Optional[int] = Field(default=None, ge=1)
    cap_inner_radius_mm: Optional[float] = Field(default=None, gt=0)
    cap_outer_radius_mm: Optional[float] = Field(default=None, gt=0)
    external_wall_inner_radius_mm: Optional[float] = Field(default=None, gt=0)
    internal_wall_outer_radius_mm: Optional[float] = Field(default=None, gt=0)
    fold_count: Optional[int] = Field(default=None, ge=1)
    stiffness: Optional[StiffnessSection] = None
    plant: PlantSection = Field(default_factory=PlantSection)
    pid: Optional[PidSection] = None

    _load_warnings: Tuple[str, ...] = PrivateAttr(default=())

    @model_validator(mode="after")
    def _radii_as_group(self) -> "GeometryConfig":
        given = [getattr(self, name) is not None for name in RADIUS_FIELDS]
        if any(given) and not all(given):
            missing = [name for name, present in zip(RADIUS_FIELDS, given) if not present]
            raise ValueError(f"radii must be given all together or not at all; missing {', '.join(missing)}")
        return self

    @property
    def load_warnings(self) -> Tuple[str, ...]:
        return self._load_warnings

    def to_setup(self) -> ActuatorSetup:
        """Converts to internal units (kPa -> MPa, degrees -> radians) and builds the model objects"""
        notes: List[str] = list(self._load_warnings)
        if self.cap_inner_radius_mm is None:
            radii = derive_default_radii(self.sleeve_radius_mm, self.wall_thickness_mm)
            note = "pressure-area radii not given; derived defaults R1i=r, R1o=r+2, R2i=r, R3i=r-wt"
            logger.warning(note)
            notes.append(note)
        else:
            radii = {short: getattr(self, name) for name, short in RADIUS_FIELDS.items()}

        geometry = ActuatorGeometry(
            sleeve_radius_r=self.sleeve_radius_mm,
            actuator_length_l=self.actuator_length_mm,
            fold_width_fw=self.fold_width_mm,
            fold_angle_beta=UnitConverter.deg_to_rad(self.fold_angle_deg),
            restraining_layer_thickness_tr=self.restraining_layer_thickness_mm,
            restraining_layer_count_nr=self.restraining_layer_count,
            wall_thickness_wt=self.wall_thickness_mm,
            shore_hardness_sh=self.shore_hardness,
            cap_inner_radius_R1i=radii["R1i"],
            cap_outer_radius_R1o=radii["R1o"],
            external_wall_inner_radius_R2i=radii["R2i"],
            internal_wall_outer_radius_R3i=radii["R3i"],
            constraining_layer_thickness_tc=self.constraining_layer_thickness_mm,
        )
        notes.extend(geometry.warnings)
        fold_spec = geometry.fold_spec(fold_count_n=self.fold_count)

        stiffness = None
        plant = None
        if self.stiffness is not None:
            s = self.stiffness
            stiffness = StiffnessCubic(s.a, s.b, s.c, s.d, tuple(s.valid_range_mm))
            notes.extend(stiffness.warnings)
            p = self.plant
            lag = PressureLag(p.fill_tau_s, p.vent_tau_s) if p.fill_tau_s is not None else None
            plant = PlantParams.from_geometry(
                geometry,
                stiffness,
                fold_spec,
                mass_M=p.mass_kg,
                damping_b=p.damping_n_s_per_mm,
                pressure_lag=lag,
                max_pressure=UnitConverter.kpa_to_mpa(p.max_pressure_kpa),
            )

        gains = None
        if self.pid is not None:
            g = self.pid
            gains = PidGains(
                kp=UnitConverter.kpa_to_mpa(g.kp_kpa_per_mm),
                ki=UnitConverter.kpa_to_mpa(g.ki_kpa_per_mm_s),
                kd=UnitConverter.kpa_to_mpa(g.kd_kpa_s_per_mm),
                output_limits=(UnitConverter.kpa_to_mpa(g.output_min_kpa), UnitConverter.kpa_to_mpa(g.output_max_kpa)),
                sample_time=g.sample_time_s,
                anti_windup=g.anti_windup,
                derivative_on=g.derivative_on,
            )

        return ActuatorSetup(self.name, geometry, fold_spec, stiffness, plant, gains, tuple(notes), self.chamber_count)

    @classmethod
    def from_setup(cls, setup: ActuatorSetup) -> "GeometryConfig":
        """Converts internal units back to a boundary-unit document with explicit radii"""
        geom = setup.geometry
        fields: Dict[str, Any] = {
            "name": setup.name,
            "sleeve_radius_mm": geom.sleeve_radius_r,
            "actuator_length_mm": geom.actuator_length_l,
            "fold_width_mm": geom.fold_width_fw,
            "fold_angle_deg": UnitConverter.rad_to_deg(geom.fold_angle_beta),
            "restraining_layer_thickness_mm": geom.restraining_layer_thickness_tr,
            "restraining_layer_count": geom.restraining_layer_count_nr,
            "wall_thickness_mm": geom.wall_thickness_wt,
            "shore_hardness": geom.shore_hardness_sh,
            "constraining_layer_thickness_mm": geom.constraining_layer_thickness_tc,
            "cap_inner_radius_mm": geom.cap_inner_radius_R1i,
            "cap_outer_radius_mm": geom.cap_outer_radius_R1o,
            "external_wall_inner_radius_mm": geom.external_wall_inner_radius_R2i,
            "internal_wall_outer_radius_mm": geom.internal_wall_outer_radius_R3i,
            "fold_count": setup.fold_spec.fold_count_n,
            "chamber_count": setup.chamber_count,
        }
        if setup.stiffness is not None:
            poly = setup.stiffness
            fields["stiffness"] = {"a": poly.a, "b": poly.b, "c": poly.c, "d": poly.d, "valid_range_mm": poly.valid_range}
        if setup.plant is not None:
            plant = setup.plant
            fields["plant"] = {
                "mass_kg": plant.mass_M,
                "damping_n_s_per_mm": plant.damping_b,
                "max_pressure_kpa": UnitConverter.mpa_to_kpa(plant.pressure_limits[1]),
                "fill_tau_s": plant.pressure_lag.fill_tau if plant.pressure_lag else None,
                "vent_tau_s": plant.pressure_lag.vent_tau if plant.pressure_lag else None,
            }
        if setup.gains is not None:
            g = setup.gains
            fields["pid"] = {
                "kp_kpa_per_mm": UnitConverter.mpa_to_kpa(g.kp),
                "ki_kpa_per_mm_s": UnitConverter.mpa_to_kpa(g.ki),
                "kd_kpa_s_per_mm": UnitConverter.mpa_to_kpa(g.kd),
                "output_min_kpa": UnitConverter.mpa_to_kpa(g.output_limits[0]),
                "output_max_kpa": UnitConverter.mpa_to_kpa(g.output_limits[1]),
                "sample_time_s": g.sample_time,
                "anti_windup": g.anti_windup,
                "derivative_on": g.derivative_on,
            }
        return cls.model_validate(fields)


def _strip_unknown(data: Dict[str, Any], model: Type[BaseModel], prefix: str = "") -> Tuple[Dict[str, Any], List[str]]:
    kept: Dict[str, Any] = {}
    dropped: List[str] = []
    for key, value in data.items():
        if key not in model.model_fields:
            dropped.append(prefix + key)
            continue
        section = SECTIONS.get(key) if not prefix else None
        if section is not None and isinstance(value, dict):
            value, nested = _strip_unknown(value, section, f"{key}.")
            dropped.extend(nested)
        kept[key] = value
    return kept, dropped


def _field_name(error: Mapping[str, Any]) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "config"


def parse_geometry_config(text: str, strict: bool = True, source: str = "<config>") -> GeometryConfig:
    """
    Parses and validates a JSON config document

    Args:
        text: JSON text
        strict: Reject unknown keys; when False they are dropped with a warning
        source: Name used in messages

    Returns:
        Validated GeometryConfig

    Raises:
        ValidationError: malformed JSON (with line) or an invalid field (with field name)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ValidationError(f"{source}: top level must be a JSON object", line=1)

    dropped: List[str] = []
    if not strict:
        data, dropped = _strip_unknown(data, GeometryConfig)
        for key in dropped:
            logger.warning("%s: ignoring unknown key '%s'", source, _validator.sanitize_for_log(key))

    try:
        config = GeometryConfig.model_validate(data)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        field = _field_name(first)
        raise ValidationError(f"{source}: {field}: {first['msg']}", field=field) from e

    config._load_warnings = tuple(f"unknown key '{key}' ignored" for key in dropped)
    return config


def load_geometry_config(path: PathLike, strict: bool = True) -> GeometryConfig:
    """
    Loads an actuator config file

    Args:
        path: JSON document in boundary units
        strict: Reject unknown keys (default) or drop them with a warning

    Returns:
        Validated GeometryConfig; call ``to_setup()`` for internal units
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read config {path}: {e.strerror}", field="config") from e
    return parse_geometry_config(text, strict=strict, source=str(path))


def serialize_geometry_config(config: GeometryConfig) -> str:
    return json.dumps(config.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True) + "\n"


def _read_table(path: PathLike, required: List[str], optional: Sequence[str] = ()) -> Dict[str, np.ndarray]:
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except FileNotFoundError as e:
        raise ValidationError(f"data file {path} not found") from e
    except pd.errors.EmptyDataError as e:
        raise ValidationError(f"{path}: file is empty; a header row is required") from e
    except pd.errors.ParserError as e:
        raise ValidationError(f"{path}: malformed CSV: {e}") from e

    frame.columns = [c.strip() for c in frame.columns]
    is_valid, error = _validator.check_required_columns(frame.columns, required)
    if not is_valid:
        raise ValidationError(f"{path}: {error}")

    columns = {}
    for name in list(required) + [c for c in optional if c in frame.columns]:
        is_valid, error, row = _validator.check_numeric_column(frame[name], name)
        if not is_valid:
            raise ValidationError(f"{path}: {error}", field=name, row=row)
        columns[name] = pd.to_numeric(frame[name]).to_numpy(dtype=float)
    return columns


def load_stress_strain(path: PathLike, material_label: str = "") -> StressStrainDataset:
    """
    Loads a uniaxial tensile CSV (columns ``strain``, ``stress_mpa``)

    Raises:
        ValidationError: non-numeric or non-finite cell, or strain not strictly increasing (with row)
    """
    columns = _read_table(path, STRESS_STRAIN_COLUMNS)
    label = material_label or Path(path).stem
    try:
        return StressStrainDataset(
            tuple(columns["strain"].tolist()), tuple(columns["stress_mpa"].tolist()), material_label=label
        )
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}", field=e.field, row=e.row) from e


def write_stress_strain(data: StressStrainDataset, path: PathLike, force: bool = False):
    """Writes a tensile dataset at full double precision"""
    frame = pd.DataFrame({"strain": list(data.strains), "stress_mpa": list(data.stresses)})
    _write_frame(frame, Path(path), force, float_format="%.17g")


def load_force_displacement(path: PathLike, model_label: str = "") -> List[ForceDisplacementDataset]:
    """
    Loads force-displacement samples (``displacement_mm``, ``force_n``, optional ``pressure_kpa``)

    Rows are grouped per pressure, ordered by increasing pressure; without
    a pressure column a single unlabelled dataset is returned. Rows out of
    displacement order are sorted with a warning.
    """
    columns = _read_table(path, FORCE_DISPLACEMENT_COLUMNS, optional=[PRESSURE_COLUMN])
    label = model_label or Path(path).stem
    displacement = columns["displacement_mm"]
    force = columns["force_n"]
    if len(displacement) == 0:
        raise ValidationError(f"{path}: no data rows")

    if PRESSURE_COLUMN in columns:
        pressure = columns[PRESSURE_COLUMN]
        groups = [(float(p), np.where(pressure == p)[0]) for p in np.unique(pressure)]
    else:
        groups = [(None, np.arange(len(displacement)))]

    datasets = []
    for pressure_kpa, rows in groups:
        y = displacement[rows]
        f = force[rows]
        if np.any(np.diff(y) < 0):
            order = np.argsort(y, kind="stable")
            y, f = y[order], f[order]
            where = f" at {pressure_kpa:g} kPa" if pressure_kpa is not None else ""
            logger.warning("%s: displacement rows%s were out of order and have been sorted", path, where)
        datasets.append(ForceDisplacementDataset(tuple(y.tolist()), tuple(f.tolist()), pressure_kpa, label))
    return datasets


def ensure_writable(path: Path, force: bool):
    is_valid, error = _validator.check_output_path(path, force)
    if not is_valid:
        raise ValidationError(error, field="output")


def _write_frame(frame: pd.DataFrame, path: Path, force: bool, float_format: Optional[str] = None):
    ensure_writable(path, force)
    frame.to_csv(
        path,
        index=False,
        float_format=float_format or SimulationConfig.float_format(),
        na_rep="",
        lineterminator="\n",
        encoding="utf-8",
    )


def write_trace(trace: SimTrace, path: PathLike, force: bool = False):
    """
    Writes a trace as CSV with 9 significant digits

    Open-loop NaN setpoint and error cells are written empty; an empty trace
    yields a header-only file.
    """
    frame = pd.DataFrame(
        {
            "t_s": trace.t,
            "setpoint_mm": trace.setpoint,
            "y_mm": trace.y,
            "v_mm_s": trace.v,
            "p_mpa": trace.p,
            "u_mpa": trace.u,
            "e_mm": trace.error,
        },
        columns=TRACE_COLUMNS,
    )
    _write_frame(frame, Path(path), force)


def read_trace(path: PathLike) -> SimTrace:
    path = Path(path)
    frame = pd.read_csv(path, encoding="utf-8")
    is_valid, error = _validator.check_required_columns(frame.columns, TRACE_COLUMNS)
    if not is_valid:
        raise ValidationError(f"{path}: {error}")
    column = {name: frame[name].to_numpy(dtype=float) for name in TRACE_COLUMNS}
    return SimTrace(
        t=column["t_s"],
        y=column["y_mm"],
        v=column["v_mm_s"],
        p=column["p_mpa"],
        u=column["u_mpa"],
        setpoint=column["setpoint_mm"],
        error=column["e_mm"],
    )


def write_table(rows: Sequence[Mapping[str, Any]], path: PathLike, columns: Sequence[str], force: bool = False):
    """Writes report rows (sweeps, curves, frequency responses) as CSV"""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    _write_frame(frame, Path(path), force)


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return SimulationConfig.float_format() % value
    if isinstance(value, (list, tuple)):
        return "; ".join(_format_value(v) for v in value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(SimulationConfig.float_format() % value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return str(value)


def format_report_text(report: Mapping[str, Any]) -> str:
    """Flat ``key = value`` lines in the report's own order"""
    return "".join(f"{key} = {_format_value(value)}\n" for key, value in report.items())


def report_json_path(path: Path) -> Path:
    return path.with_suffix(".json") if path.suffix != ".json" else path.with_suffix(".report.json")


def write_report(report: Mapping[str, Any], path: PathLike, force: bool = False) -> Tuple[Path, Path]:
    """
    Writes a flat report as text and as a JSON document next to it

    Args:
        report: Flat mapping of names to numbers, strings or lists
        path: Text report path; the JSON document takes the same stem
        force: Overwrite existing files

    Returns:
        Tuple of (text path, JSON path)
    """
    text_path = Path(path)
    json_path = report_json_path(text_path)
    ensure_writable(text_path, force)
    ensure_writable(json_path, force)
    text_path.write_text(format_report_text(report), encoding="utf-8")
    document = {key: _json_value(value) for key, value in report.items()}
    json_path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return text_path, json_path
