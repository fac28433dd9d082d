"""
framelab.core - measures, semi-inner products, spectra, bounds and constructions
"""
from .config import ConfigManager, get_config
from .errors import (
    DegenerateFunctionError,
    EvaluationError,
    FramelabError,
    SpecParseError,
    UnknownEntryError,
    UnsupportedKindError,
)
from .quadrature import QuadratureSpec

__all__ = [
    "ConfigManager",
    "get_config",
    "FramelabError",
    "EvaluationError",
    "UnsupportedKindError",
    "DegenerateFunctionError",
    "SpecParseError",
    "UnknownEntryError",
    "QuadratureSpec",
]
