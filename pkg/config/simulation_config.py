class SimulationConfig:
    """Numeric defaults shared by the statics, dynamics and metrics modules"""

    # Integration
    DEFAULT_DT = 1e-3  # seconds
    DIVERGENCE_LIMIT = 1e9  # mm and mm/s

    # Plant defaults (damping is never identified experimentally)
    DEFAULT_MASS_KG = 2.0
    DEFAULT_DAMPING = 0.05  # N*s/mm
    DEFAULT_MAX_PRESSURE_KPA = 200.0

    # Root finding
    BISECTION_XTOL = 1e-9  # mm
    EQUILIBRIUM_XTOL = 1e-12  # mm, rest states handed to the integrator
    BRACKET_FACTOR = 1.5  # y_hi = factor * geometric extension

    # Response metrics
    SETTLING_BAND = 0.02
    RISE_LIMITS = (0.1, 0.9)
    SINE_FIT_CYCLES = 3

    # Frequency response
    TRANSIENT_CYCLES = 5
    MEASURE_CYCLES = 3

    # Fits
    MAX_CONDITION = 1e12

    # Geometry config policy
    TESTED_FOLD_ANGLE_DEG = (25.0, 45.0)
    TESTED_SHORE_HARDNESS = (85, 95)
    STIFFNESS_BIN_WIDTH_MM = 5.0

    # Output formatting
    SIGNIFICANT_DIGITS = 9

    @classmethod
    def validate(cls):
        """Validates that the defaults are mutually consistent"""
        if cls.DEFAULT_DT <= 0:
            raise ValueError("DEFAULT_DT must be positive")
        if not 0 < cls.SETTLING_BAND < 1:
            raise ValueError("SETTLING_BAND must lie in (0, 1)")
        low, high = cls.RISE_LIMITS
        if not 0 <= low < high <= 1:
            raise ValueError("RISE_LIMITS must satisfy 0 <= low < high <= 1")
        if cls.TRANSIENT_CYCLES < 1 or cls.MEASURE_CYCLES < 1 or cls.SINE_FIT_CYCLES < 1:
            raise ValueError("Cycle counts must be at least 1")
        if cls.BRACKET_FACTOR <= 1:
            raise ValueError("BRACKET_FACTOR must exceed 1")
        return True

    @classmethod
    def float_format(cls) -> str:
        """Returns the printf-style format used for every written number"""
        return f"%.{cls.SIGNIFICANT_DIGITS}g"
