"""
framelab: (p,q)-Bessel and frame measures, numerically

Finite Borel measures and their Fourier-Stieltjes transforms, the compatible
semi-inner product on L^p, empirical and certified frame bounds, constructions
on measures and a catalog of worked examples.

Usage:
    from framelab import ExponentPair, lebesgue, Lattice, estimate_bounds
    mu = lebesgue([[0, 1]])
    estimate = estimate_bounds(mu, Lattice(1), ExponentPair(1.5), budget=20)
"""

__version__ = "1.0.0"
__author__ = "framelab developers"
__license__ = "MIT"

from .core.bounds import (
    BoundCertificate,
    BoundEstimate,
    bessel_functional,
    bessel_ratio,
    estimate_bounds,
    holder_bound,
    perturbation_bound,
    riesz_thorin,
)
from .core.catalog import list_entries, verify
from .core.config import ConfigManager, get_config
from .core.constructions import DiscretizationSpec, discretize, p_operator, smooth
from .core.errors import FramelabError
from .core.functions import AtomSamples, Modulated, SimpleFunction, TrigPolynomial
from .core.measures import (
    atomic,
    convolve,
    dirac,
    lebesgue,
    piecewise_constant,
    self_similar,
    uniform,
)
from .core.sip import ExponentPair, fourier_coefficient, norm_p, semi_inner_product
from .core.spectra import DigitSet, Explicit, Lattice, ShiftedUnion, perturb

__all__ = [
    "__version__",
    "ConfigManager",
    "get_config",
    "FramelabError",
    "ExponentPair",
    "fourier_coefficient",
    "norm_p",
    "semi_inner_product",
    "AtomSamples",
    "Modulated",
    "SimpleFunction",
    "TrigPolynomial",
    "atomic",
    "convolve",
    "dirac",
    "lebesgue",
    "piecewise_constant",
    "self_similar",
    "uniform",
    "DigitSet",
    "Explicit",
    "Lattice",
    "ShiftedUnion",
    "perturb",
    "BoundCertificate",
    "BoundEstimate",
    "bessel_functional",
    "bessel_ratio",
    "estimate_bounds",
    "holder_bound",
    "perturbation_bound",
    "riesz_thorin",
    "DiscretizationSpec",
    "discretize",
    "p_operator",
    "smooth",
    "list_entries",
    "verify",
]
