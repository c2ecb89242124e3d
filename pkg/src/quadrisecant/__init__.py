"""Quadrisecants, trisecants and essential secants of polygonal knots."""
from .tolerances import DEFAULT_TOL, ToleranceConfig

__version__ = "0.1.0"
__all__ = ["DEFAULT_TOL", "ToleranceConfig", "__version__"]
