"""
errors.py - framelab exception hierarchy
"""


class FramelabError(Exception):
    """Base class for framelab errors."""


class EvaluationError(FramelabError, ArithmeticError):
    """A density, integrand or transform produced non-finite values."""


class UnsupportedKindError(FramelabError, TypeError):
    """The operation is not defined for this measure or function kind."""


class DegenerateFunctionError(FramelabError, ValueError):
    """Test function norm below the admissible floor (or a family of such)."""


class SpecParseError(FramelabError, ValueError):
    """Malformed JSON specification."""


class UnknownEntryError(FramelabError, KeyError):
    """Unknown catalog id."""
