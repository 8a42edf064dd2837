import math
import re
from typing import List

from .errors import ValidationError

# Boundary units: mm, kPa, N, degrees, s. Internal units: mm, MPa, N, radians, s.
KPA_PER_MPA = 1000.0


class UnitConverter:
    """Converts between boundary (file and CLI) units and internal units"""

    @staticmethod
    def kpa_to_mpa(pressure_kpa: float) -> float:
        return pressure_kpa / KPA_PER_MPA

    @staticmethod
    def mpa_to_kpa(pressure_mpa: float) -> float:
        return pressure_mpa * KPA_PER_MPA

    @staticmethod
    def deg_to_rad(angle_deg: float) -> float:
        return math.radians(angle_deg)

    @staticmethod
    def rad_to_deg(angle_rad: float) -> float:
        return math.degrees(angle_rad)

    @staticmethod
    def parse_range(text: str) -> List[float]:
        """
        Parses a sweep range written as START:STOP:STEP (STOP inclusive)

        Args:
            text: Range text, e.g. "30:40:2"; a single number yields one point

        Returns:
            Ordered list of parameter values
        """
        cleaned = text.strip()
        if re.fullmatch(r'[-+0-9.eE]+', cleaned):
            return [float(cleaned)]

        match = re.fullmatch(r'([-+0-9.eE]+):([-+0-9.eE]+):([-+0-9.eE]+)', cleaned)
        if not match:
            raise ValidationError(f"Range must look like START:STOP:STEP, got '{text}'", field="range")

        start, stop, step = (float(g) for g in match.groups())
        if step <= 0:
            raise ValidationError("Range step must be positive", field="range")
        if stop < start:
            raise ValidationError("Range stop must not be below start", field="range")

        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]

    @staticmethod
    def parse_list(text: str) -> List[float]:
        """
        Parses a comma separated list of numbers

        Args:
            text: e.g. "10,20,30,40"

        Returns:
            List of floats in the given order
        """
        parts = [p.strip() for p in text.split(',') if p.strip()]
        if not parts:
            raise ValidationError("Expected a comma separated list of numbers")
        try:
            return [float(p) for p in parts]
        except ValueError as e:
            raise ValidationError(f"Invalid number in list '{text}': {e}") from e
