from typing import Any, Dict, List


class ActuatorCatalog:
    """Tested actuator models, material constants and the measured L13 stiffness"""

    # Linear sleeve actuators: r, l, fw, beta, tr, wt, nr, sh (mm, degrees)
    LSSA_FIELDS = ("r", "l", "fw", "beta", "tr", "wt", "nr", "sh")
    LSSA_MODELS = {
        "L1": (30, 80, 16, 30, 0.4, 1.2, 18, 85),
        "L2": (30, 80, 16, 30, 0.4, 0.96, 18, 85),
        "L3": (30, 80, 16, 30, 0.4, 1.6, 18, 85),
        "L4": (30, 80, 16, 30, 0.4, 0.96, 16, 85),
        "L5": (30, 80, 12, 30, 0.4, 0.96, 18, 85),
        "L6": (30, 80, 8, 30, 0.4, 0.96, 18, 85),
        "L7": (30, 80, 16, 30, 0.8, 0.96, 18, 85),
        "L8": (30, 80, 4, 30, 0.4, 0.96, 18, 85),
        "L9": (30, 80, 12, 35, 0.4, 0.96, 18, 85),
        "L10": (30, 80, 12, 40, 0.4, 0.96, 18, 85),
        "L11": (30, 80, 12, 30, 0.4, 0.96, 18, 95),
        "L12": (30, 80, 12, 30, 0.4, 0.96, 14, 85),
        "L13": (30, 80, 16, 30, 0.8, 0.96, 12, 85),
    }

    # Bending sleeve actuators add the constraining layer thickness tc
    BSSA_FIELDS = ("r", "l", "fw", "beta", "tr", "wt", "nr", "tc", "sh")
    BSSA_MODELS = {
        "B1": (30, 120, 16, 30, 0.4, 0.96, 18, 1.6, 85),
        "B2": (30, 120, 16, 30, 0.4, 1.2, 18, 1.6, 85),
        "B3": (30, 120, 16, 30, 0.4, 1.6, 18, 1.6, 85),
        "B4": (30, 120, 16, 30, 0.8, 1.2, 18, 1.6, 85),
        "B5": (30, 120, 16, 30, 0.4, 1.2, 18, 1.6, 95),
        "B6": (30, 120, 16, 30, 0.4, 1.2, 18, 3.2, 85),
        "B7": (30, 120, 16, 30, 0.4, 1.2, 10, 1.6, 85),
        "B8": (30, 120, 14, 30, 0.4, 1.2, 10, 1.6, 85),
        "B9": (30, 120, 12, 30, 0.4, 0.96, 18, 1.6, 85),
        "B10": (30, 120, 8, 30, 0.4, 0.96, 18, 1.6, 85),
        "B11": (30, 120, 16, 45, 0.4, 1.2, 18, 1.6, 85),
        "B12": (30, 120, 16, 30, 0.8, 0.96, 12, 1.6, 85),
        "B13": (30, 120, 16, 30, 0.8, 0.96, 10, 1.6, 85),
    }

    # Omnidirectional sleeve actuators add the chamber count nc
    OSSA_FIELDS = ("r", "l", "fw", "beta", "tr", "wt", "nr", "nc", "sh")
    OSSA_MODELS = {
        "Omni1": (30, 120, 16, 30, 0.4, 0.96, 18, 2, 85),
        "Omni2": (30, 120, 16, 30, 0.4, 1.2, 18, 2, 85),
        "Omni3": (30, 120, 12, 30, 0.4, 0.96, 18, 2, 85),
        "Omni4": (30, 120, 16, 30, 0.8, 1.2, 12, 2, 85),
        "Omni5": (30, 120, 16, 30, 0.8, 1.2, 18, 2, 85),
        "Omni6": (30, 120, 8, 30, 0.4, 0.96, 10, 2, 85),
        "Omni7": (30, 120, 12, 35, 0.4, 0.96, 10, 2, 85),
        "Omni8": (30, 120, 12, 40, 0.4, 0.96, 18, 2, 85),
        "Omni9": (30, 120, 12, 30, 0.4, 0.96, 18, 2, 95),
        "Omni10": (30, 120, 8, 30, 0.4, 0.96, 10, 3, 85),
        "Omni11": (30, 120, 8, 30, 0.4, 0.96, 10, 4, 85),
    }

    # Mooney-Rivlin five-parameter constants in MPa (D1 = 0, incompressible)
    MATERIALS = {
        "TPU85": {"C10": -3.1992, "C01": 6.977, "C20": 0.0281, "C11": -0.074972, "C02": 0.92155},
        "TPU95": {"C10": -28.763, "C01": 42.995, "C20": 0.10499, "C11": -6.6676, "C02": 9.138},
    }

    # FK(y) = a y^3 + b y^2 + c y + d of model L13, y in mm, FK in N
    L13_STIFFNESS = {"a": 4.1481e-4, "b": 1.2865e-2, "c": 2.0789, "d": -0.2246, "valid_range_mm": (0.0, 40.0)}

    @classmethod
    def names(cls) -> List[str]:
        """Returns every model name in table order"""
        return list(cls.LSSA_MODELS) + list(cls.BSSA_MODELS) + list(cls.OSSA_MODELS)

    @classmethod
    def family_of(cls, name: str) -> str:
        if name in cls.LSSA_MODELS:
            return "linear"
        if name in cls.BSSA_MODELS:
            return "bending"
        if name in cls.OSSA_MODELS:
            return "omnidirectional"
        raise ValueError(f"unknown actuator model '{name}'; known models: {', '.join(cls.names())}")

    @classmethod
    def row(cls, name: str) -> Dict[str, float]:
        """Returns a table row keyed by its column symbols"""
        family = cls.family_of(name)
        if family == "linear":
            return dict(zip(cls.LSSA_FIELDS, cls.LSSA_MODELS[name]))
        if family == "bending":
            return dict(zip(cls.BSSA_FIELDS, cls.BSSA_MODELS[name]))
        return dict(zip(cls.OSSA_FIELDS, cls.OSSA_MODELS[name]))

    @classmethod
    def config_dict(cls, name: str) -> Dict[str, Any]:
        """
        Returns a boundary-unit config document for a tabulated model

        Args:
            name: Model name such as "L13", "B1" or "Omni3"

        Returns:
            Dict accepted by the strict geometry config loader
        """
        row = cls.row(name)
        document: Dict[str, Any] = {
            "name": name,
            "sleeve_radius_mm": row["r"],
            "actuator_length_mm": row["l"],
            "fold_width_mm": row["fw"],
            "fold_angle_deg": row["beta"],
            "restraining_layer_thickness_mm": row["tr"],
            "restraining_layer_count": row["nr"],
            "wall_thickness_mm": row["wt"],
            "shore_hardness": row["sh"],
        }
        if "tc" in row:
            document["constraining_layer_thickness_mm"] = row["tc"]
        if "nc" in row:
            document["chamber_count"] = row["nc"]
        if name == "L13":
            document["stiffness"] = dict(cls.L13_STIFFNESS, valid_range_mm=list(cls.L13_STIFFNESS["valid_range_mm"]))
        return document

    @classmethod
    def geometry(cls, name: str):
        """Builds the ActuatorGeometry of a tabulated model with derived default radii"""
        from src.sleeve_actuator.datasets_io import GeometryConfig

        return GeometryConfig.model_validate(cls.config_dict(name)).to_setup().geometry

    @classmethod
    def material(cls, name: str):
        """Returns the MaterialModel of "TPU85" or "TPU95" """
        from src.sleeve_actuator.hyperelastic import MaterialFamily, MaterialModel

        key = name.replace(" ", "").upper()
        if key not in cls.MATERIALS:
            raise ValueError(f"unknown material '{name}'; known materials: {', '.join(cls.MATERIALS)}")
        return MaterialModel(MaterialFamily.MOONEY_RIVLIN_5, dict(cls.MATERIALS[key]), label=key)

    @classmethod
    def stiffness(cls):
        """Returns the measured L13 StiffnessCubic"""
        from src.sleeve_actuator.stiffness import StiffnessCubic

        s = cls.L13_STIFFNESS
        return StiffnessCubic(s["a"], s["b"], s["c"], s["d"], s["valid_range_mm"])

    @classmethod
    def validate(cls):
        """Validates that every table row has the right number of columns"""
        for fields, models in (
            (cls.LSSA_FIELDS, cls.LSSA_MODELS),
            (cls.BSSA_FIELDS, cls.BSSA_MODELS),
            (cls.OSSA_FIELDS, cls.OSSA_MODELS),
        ):
            for name, values in models.items():
                if len(values) != len(fields):
                    raise ValueError(f"catalog row {name} has {len(values)} values, expected {len(fields)}")
        return True
