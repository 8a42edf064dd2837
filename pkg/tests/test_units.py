import math

import pytest

from src.sleeve_actuator.errors import ValidationError
from src.sleeve_actuator.units import UnitConverter


def test_pressure_conversion():
    assert UnitConverter.kpa_to_mpa(125.0) == 0.125
    assert UnitConverter.mpa_to_kpa(0.2) == 200.0


def test_angle_conversion():
    assert UnitConverter.deg_to_rad(180.0) == math.pi
    assert UnitConverter.rad_to_deg(UnitConverter.deg_to_rad(30.0)) == pytest.approx(30.0)


class TestParseRange:
    def test_inclusive_stop(self):
        assert UnitConverter.parse_range("30:40:2") == pytest.approx([30, 32, 34, 36, 38, 40])

    def test_fractional_step_keeps_stop(self):
        assert len(UnitConverter.parse_range("0.2:2.0:0.2")) == 10

    def test_single_value(self):
        assert UnitConverter.parse_range(" 12 ") == [12.0]

    @pytest.mark.parametrize("text", ["40:30:2", "1:2:0", "1:2", "a:b:c"])
    def test_rejects(self, text):
        with pytest.raises(ValidationError) as info:
            UnitConverter.parse_range(text)
        assert info.value.field == "range"


class TestParseList:
    def test_values(self):
        assert UnitConverter.parse_list("10, 20,30,") == [10.0, 20.0, 30.0]

    @pytest.mark.parametrize("text", ["", " , ", "10,x"])
    def test_rejects(self, text):
        with pytest.raises(ValidationError):
            UnitConverter.parse_list(text)
