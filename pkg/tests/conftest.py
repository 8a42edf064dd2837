import math
from pathlib import Path

import pytest

from config.actuator_catalog import ActuatorCatalog
from src.sleeve_actuator.dynamics import PlantParams
from src.sleeve_actuator.geometry import ActuatorGeometry
from src.sleeve_actuator.stiffness import StiffnessCubic

PRESETS = Path(__file__).resolve().parent.parent / "config" / "presets"


def make_geometry(**overrides) -> ActuatorGeometry:
    """L13 dimensions with the example radii R1o=32, R1i=30, R2i=30, R3i=28"""
    fields = dict(
        sleeve_radius_r=30.0,
        actuator_length_l=80.0,
        fold_width_fw=16.0,
        fold_angle_beta=math.radians(30.0),
        restraining_layer_thickness_tr=0.8,
        restraining_layer_count_nr=12,
        wall_thickness_wt=0.96,
        shore_hardness_sh=85,
        cap_inner_radius_R1i=30.0,
        cap_outer_radius_R1o=32.0,
        external_wall_inner_radius_R2i=30.0,
        internal_wall_outer_radius_R3i=28.0,
    )
    fields.update(overrides)
    return ActuatorGeometry(**fields)


@pytest.fixture
def l13_poly() -> StiffnessCubic:
    return ActuatorCatalog.stiffness()


@pytest.fixture
def example_geometry() -> ActuatorGeometry:
    return make_geometry()


@pytest.fixture
def l13_geometry() -> ActuatorGeometry:
    """Catalog L13 with derived default radii"""
    return ActuatorCatalog.geometry("L13")


@pytest.fixture
def l13_plant(l13_geometry, l13_poly) -> PlantParams:
    return PlantParams.from_geometry(l13_geometry, l13_poly)


@pytest.fixture
def presets_dir() -> Path:
    return PRESETS


@pytest.fixture
def geometry_factory():
    return make_geometry


@pytest.fixture
def l13_setup():
    from src.sleeve_actuator.datasets_io import load_geometry_config

    return load_geometry_config(PRESETS / "l13.json").to_setup()
