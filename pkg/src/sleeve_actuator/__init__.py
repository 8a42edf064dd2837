from .toolkit import ActuatorToolkit

__version__ = "0.1.0"
__all__ = ["ActuatorToolkit"]
