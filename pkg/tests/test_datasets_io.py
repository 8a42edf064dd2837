import json
import math

import numpy as np
import pytest

from src.sleeve_actuator.datasets_io import (
    TRACE_COLUMNS,
    GeometryConfig,
    load_force_displacement,
    load_geometry_config,
    load_stress_strain,
    parse_geometry_config,
    read_trace,
    serialize_geometry_config,
    write_report,
    write_stress_strain,
    write_trace,
)
from src.sleeve_actuator.dynamics import SimTrace, constant_pressure, integrate_rk4
from src.sleeve_actuator.errors import ValidationError
from src.sleeve_actuator.hyperelastic import StressStrainDataset

BASE = {
    "name": "demo",
    "sleeve_radius_mm": 30,
    "actuator_length_mm": 80,
    "fold_width_mm": 16,
    "fold_angle_deg": 30,
    "restraining_layer_thickness_mm": 0.8,
    "restraining_layer_count": 12,
    "wall_thickness_mm": 0.96,
    "shore_hardness": 85,
}


def document(**changes):
    data = dict(BASE)
    data.update(changes)
    return json.dumps(data)


class TestGeometryConfig:
    @pytest.mark.parametrize(
        "name, has_plant, has_gains",
        [("l13.json", True, True), ("l13_valve.json", True, False), ("b1.json", False, False)],
    )
    def test_presets_load_strictly(self, presets_dir, name, has_plant, has_gains):
        setup = load_geometry_config(presets_dir / name).to_setup()
        assert (setup.plant is not None) == has_plant
        assert (setup.gains is not None) == has_gains

    def test_units_are_converted(self, l13_setup):
        assert l13_setup.geometry.fold_angle_beta == pytest.approx(math.radians(30.0))
        assert l13_setup.gains.kp == pytest.approx(0.005)
        assert l13_setup.gains.output_limits == pytest.approx((0.0, 0.2))
        assert l13_setup.plant.pressure_limits == pytest.approx((0.0, 0.2))

    def test_derived_radii_are_reported(self, l13_setup):
        assert any("derived defaults" in note for note in l13_setup.warnings)
        assert l13_setup.geometry.internal_wall_outer_radius_R3i == pytest.approx(29.04)

    def test_round_trip_through_setup(self, l13_setup):
        text = serialize_geometry_config(GeometryConfig.from_setup(l13_setup))
        again = parse_geometry_config(text).to_setup()
        assert again.geometry.fold_angle_beta == pytest.approx(l13_setup.geometry.fold_angle_beta, rel=1e-12)
        assert again.fold_spec.fold_count_n == l13_setup.fold_spec.fold_count_n
        assert again.stiffness.coefficients() == pytest.approx(l13_setup.stiffness.coefficients())
        assert again.gains.ki == pytest.approx(l13_setup.gains.ki)
        assert not any("derived defaults" in note for note in again.warnings)

    def test_chamber_count_survives_round_trip(self):
        setup = parse_geometry_config(json.dumps(dict(BASE, chamber_count=3))).to_setup()
        assert setup.chamber_count == 3
        again = parse_geometry_config(serialize_geometry_config(GeometryConfig.from_setup(setup))).to_setup()
        assert again.chamber_count == 3

    def test_missing_field_is_named(self):
        data = dict(BASE)
        del data["fold_angle_deg"]
        with pytest.raises(ValidationError) as info:
            parse_geometry_config(json.dumps(data))
        assert info.value.field == "fold_angle_deg"

    def test_out_of_range_angle(self):
        with pytest.raises(ValidationError) as info:
            parse_geometry_config(document(fold_angle_deg=95))
        assert info.value.field == "fold_angle_deg"

    def test_untested_angle_warns(self):
        setup = parse_geometry_config(document(fold_angle_deg=10)).to_setup()
        assert any("outside the tested span" in note for note in setup.warnings)

    def test_invalid_json_reports_line(self):
        text = '{\n  "name": "demo",\n  sleeve_radius_mm: 30\n}\n'
        with pytest.raises(ValidationError) as info:
            parse_geometry_config(text)
        assert info.value.line == 3

    def test_top_level_must_be_object(self):
        with pytest.raises(ValidationError):
            parse_geometry_config("[1, 2]")

    def test_unknown_key_rejected_when_strict(self):
        with pytest.raises(ValidationError) as info:
            parse_geometry_config(document(colour="red"))
        assert info.value.field == "colour"

    def test_unknown_keys_dropped_when_lenient(self):
        config = parse_geometry_config(document(colour="red", plant={"mass_kg": 1.5, "vendor": "x"}), strict=False)
        assert config.plant.mass_kg == 1.5
        assert set(config.load_warnings) == {"unknown key 'colour' ignored", "unknown key 'plant.vendor' ignored"}

    def test_partial_radii_rejected(self):
        with pytest.raises(ValidationError) as info:
            parse_geometry_config(document(cap_inner_radius_mm=30, cap_outer_radius_mm=32))
        assert "radii must be given all together" in str(info.value)

    def test_lag_needs_both_time_constants(self):
        with pytest.raises(ValidationError):
            parse_geometry_config(document(plant={"fill_tau_s": 0.3}))

    def test_missing_sections_are_reported_on_use(self):
        setup = parse_geometry_config(document()).to_setup()
        assert setup.plant is None
        with pytest.raises(ValidationError) as info:
            setup.require_plant()
        assert info.value.field == "stiffness"
        with pytest.raises(ValidationError):
            setup.require_gains()

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ValidationError):
            load_geometry_config(tmp_path / "absent.json")


class TestStressStrainCsv:
    def test_load(self, tmp_path):
        path = tmp_path / "tpu.csv"
        path.write_text("strain,stress_mpa\n0.1,0.5\n0.2,0.9\n0.4,1.4\n", encoding="utf-8")
        data = load_stress_strain(path)
        assert data.strains == (0.1, 0.2, 0.4)
        assert data.material_label == "tpu"

    def test_non_numeric_cell_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("strain,stress_mpa\n0.1,0.5\n0.2,abc\n", encoding="utf-8")
        with pytest.raises(ValidationError) as info:
            load_stress_strain(path)
        assert info.value.row == 2
        assert info.value.field == "stress_mpa"
        assert "abc" in str(info.value)

    def test_strain_must_increase(self, tmp_path):
        path = tmp_path / "order.csv"
        path.write_text("strain,stress_mpa\n0.1,0.5\n0.3,0.9\n0.2,1.0\n", encoding="utf-8")
        with pytest.raises(ValidationError) as info:
            load_stress_strain(path)
        assert info.value.row == 3

    def test_missing_column(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("strain,stress\n0.1,0.5\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="stress_mpa"):
            load_stress_strain(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValidationError, match="header"):
            load_stress_strain(path)

    def test_written_dataset_keeps_full_precision(self, tmp_path):
        data = StressStrainDataset((0.1, 0.25, 1.0 / 3.0), (0.123456789012345, 0.5, 2.0 / 3.0), "tpu")
        path = tmp_path / "out.csv"
        write_stress_strain(data, path)
        again = load_stress_strain(path, material_label="tpu")
        assert again.strains == pytest.approx(data.strains, rel=1e-15)
        assert again.stresses == pytest.approx(data.stresses, rel=1e-15)


class TestForceDisplacementCsv:
    def test_groups_by_pressure(self, tmp_path):
        rows = ["displacement_mm,force_n,pressure_kpa"]
        for pressure in (125, 0, 50, 100, 75):
            rows.extend(f"{y},{(1.7 + pressure / 50) * y},{pressure}" for y in (0, 5, 10))
        path = tmp_path / "fd.csv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        datasets = load_force_displacement(path)
        assert [d.pressure_kpa for d in datasets] == [0.0, 50.0, 75.0, 100.0, 125.0]
        assert all(d.displacements == (0.0, 5.0, 10.0) for d in datasets)

    def test_shuffled_rows_are_sorted(self, tmp_path):
        path = tmp_path / "shuffled.csv"
        path.write_text("displacement_mm,force_n\n10,17\n0,0\n5,8.5\n", encoding="utf-8")
        (data,) = load_force_displacement(path)
        assert data.displacements == (0.0, 5.0, 10.0)
        assert data.forces == (0.0, 8.5, 17.0)
        assert data.pressure_kpa is None

    def test_no_rows(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text("displacement_mm,force_n\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="no data rows"):
            load_force_displacement(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="not found"):
            load_force_displacement(tmp_path / "absent.csv")


class TestTraceCsv:
    def test_round_trip(self, tmp_path, l13_plant):
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.1), 1e-3, 0.2)
        path = tmp_path / "trace.csv"
        write_trace(trace, path)
        again = read_trace(path)
        np.testing.assert_allclose(again.y, trace.y, rtol=1e-8, atol=1e-12)
        assert np.all(np.isnan(again.setpoint))

    def test_header_order(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace(SimTrace.empty(), path)
        assert path.read_text(encoding="utf-8") == ",".join(TRACE_COLUMNS) + "\n"
        assert len(read_trace(path)) == 0

    def test_repeated_writes_are_identical(self, tmp_path, l13_plant):
        trace = integrate_rk4(l13_plant, (0.0, 0.0), constant_pressure(0.05), 1e-3, 0.1)
        path = tmp_path / "trace.csv"
        write_trace(trace, path)
        first = path.read_bytes()
        write_trace(trace, path, force=True)
        assert path.read_bytes() == first

    def test_refuses_to_overwrite(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("keep\n", encoding="utf-8")
        with pytest.raises(ValidationError) as info:
            write_trace(SimTrace.empty(), path)
        assert info.value.field == "output"
        assert path.read_text(encoding="utf-8") == "keep\n"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ValidationError, match="does not exist"):
            write_trace(SimTrace.empty(), tmp_path / "nested" / "trace.csv")


class TestReport:
    def test_text_and_json(self, tmp_path):
        report = {"name": "L13", "fold_count": 4, "stroke_mm": 73.90080, "bend": math.nan, "ok": True, "span": [1.0, 2.5]}
        text_path, json_path = write_report(report, tmp_path / "report.txt")
        assert json_path.name == "report.json"
        lines = text_path.read_text(encoding="utf-8").splitlines()
        assert lines == ["name = L13", "fold_count = 4", "stroke_mm = 73.9008", "bend = nan", "ok = true", "span = 1; 2.5"]
        loaded = json.loads(json_path.read_text(encoding="utf-8"))
        assert loaded == {"name": "L13", "fold_count": 4, "stroke_mm": 73.9008, "bend": None, "ok": True, "span": [1.0, 2.5]}

    def test_json_named_report(self, tmp_path):
        _, json_path = write_report({"a": 1}, tmp_path / "out.json")
        assert json_path.name == "out.report.json"

    def test_refuses_to_overwrite(self, tmp_path):
        write_report({"a": 1}, tmp_path / "report.txt")
        with pytest.raises(ValidationError):
            write_report({"a": 2}, tmp_path / "report.txt")
        write_report({"a": 2}, tmp_path / "report.txt", force=True)
        assert (tmp_path / "report.txt").read_text(encoding="utf-8") == "a = 2\n"
