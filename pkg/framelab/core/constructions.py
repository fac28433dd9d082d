"""
constructions.py - constructive operators on measures
Discretization, q-frames from discretizations, smoothing, approximate identities,
the P-operator, budgeted Bessel measures and convex combinations.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .bounds import BUDGETED, BoundCertificate
from .config import ConfigManager, get_config
from .errors import UnsupportedKindError
from .functions import AtomSamples, TestFunction, TrigPolynomial, atom_values
from .measures import (
    AtomicMeasure,
    DensityMeasure,
    Measure,
    Piece,
    add_measures,
    convolve,
    dirac,
    lebesgue,
    piecewise_constant,
    tabulated,
    uniform,
)
from .quadrature import QuadratureSpec
from .sip import ExponentPair, semi_inner_product

logger = logging.getLogger(__name__)

RULE_CENTER = "center"
RULE_CORNER = "corner"
RULE_EXPLICIT = "explicit"


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscretizationSpec:
    """
    Cells r(k + [0,1)^d) with one representative point each.

    Attributes:
        r: Cell size
        rule: "center", "corner" or "explicit"
        representatives: Cell index -> point, for the explicit rule
        window: Box of cells to cover; defaults to the measure's bounding box
    """

    r: float
    rule: str = RULE_CENTER
    representatives: Optional[Dict[Tuple[int, ...], Tuple[float, ...]]] = None
    window: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"Cell size r must be positive, got {self.r}")
        if self.rule not in (RULE_CENTER, RULE_CORNER, RULE_EXPLICIT):
            raise ValueError(f"Unknown representative rule: {self.rule}")
        if self.rule == RULE_EXPLICIT and not self.representatives:
            raise ValueError("The explicit rule needs representative points")

    def representative(self, k: np.ndarray) -> np.ndarray:
        """x_k for cell index k; always inside r(k + [0,1)^d)."""
        if self.rule == RULE_CENTER:
            return self.r * (k + 0.5)
        if self.rule == RULE_CORNER:
            return self.r * k.astype(float)
        key = tuple(int(i) for i in k)
        if key not in self.representatives:
            raise ValueError(f"No representative given for cell {key}")
        x = np.asarray(self.representatives[key], dtype=float)
        if np.any(x < self.r * k) or np.any(x >= self.r * (k + 1)):
            raise ValueError(f"Representative {x.tolist()} lies outside cell {key}")
        return x

    def reach(self, dim: int) -> float:
        """Largest distance between a point of a cell and its representative, r sqrt(d)."""
        return self.r * math.sqrt(dim)


def _cell_range(box: np.ndarray, r: float) -> List[np.ndarray]:
    return [np.arange(math.floor(lo / r), max(math.ceil(hi / r), math.floor(lo / r) + 1))
            for lo, hi in box]


def discretize(nu: Measure, spec: DiscretizationSpec) -> AtomicMeasure:
    """
    nu' = sum_k nu(r(k + Q)) delta_{x_k}, cells of zero mass omitted.

    Atomic measures are binned exactly; other kinds use box_mass cell by cell.

    Raises:
        ValueError: unbounded support without a window, or nothing left
    """
    r = spec.r
    window = None if spec.window is None else np.asarray(spec.window, dtype=float).reshape(-1, 2)

    if isinstance(nu, AtomicMeasure):
        points, weights = nu.points, nu.weights
        if window is not None:
            inside = np.all((points >= window[:, 0]) & (points < window[:, 1]), axis=1)
            points, weights = points[inside], weights[inside]
        cells = np.floor(points / r).astype(np.int64)
        keys, inverse = np.unique(cells, axis=0, return_inverse=True)
        masses = np.bincount(inverse.reshape(-1), weights=weights, minlength=keys.shape[0])
    else:
        if window is None:
            try:
                window = nu.bounding_box()
            except UnsupportedKindError:
                raise ValueError(
                    f"{nu.kind} measures need an explicit window to be discretized"
                ) from None
        ranges = _cell_range(window, r)
        keys = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, nu.dim)
        masses = np.array([nu.box_mass(r * k, r * (k + 1)) for k in keys])
        logger.debug(f"Discretized over {keys.shape[0]} cells of size {r:g}")

    keep = masses > 0
    if not keep.any():
        raise ValueError("Discretization has no cell of positive mass")
    keys, masses = keys[keep], masses[keep]
    points = np.stack([spec.representative(k) for k in keys])
    return AtomicMeasure(points, masses)


@dataclass
class QFrameFamily:
    """Weighted exponentials {c_k e_{x_k}} with c_k = w_k^(1/q)."""

    points: np.ndarray
    coefficients: np.ndarray
    exponents: ExponentPair

    def functions(self) -> List[TrigPolynomial]:
        return [
            TrigPolynomial(x.reshape(1, -1), [c]) for x, c in zip(self.points, self.coefficients)
        ]

    def bessel_sum(self, f: TestFunction, mu: Measure) -> float:
        """sum_k |[f, c_k e_{x_k}]|^q; equals the functional with nu' for probability mu."""
        q = self.exponents.q
        return math.fsum(
            abs(semi_inner_product(f, g, mu, self.exponents)) ** q for g in self.functions()
        )


def q_frame_from_discretization(nu_prime: AtomicMeasure, e: ExponentPair) -> QFrameFamily:
    """Exponential family carrying the weights of a discretized measure."""
    if not isinstance(nu_prime, AtomicMeasure):
        raise UnsupportedKindError("q-frames are built from atomic measures")
    return QFrameFamily(nu_prime.points.copy(), nu_prime.weights ** (1.0 / e.q), e)


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------

def window_average(nu: Measure) -> Measure:
    """nu * chi_[0,1] dm, the density t -> nu([t - 1, t])."""
    if nu.dim != 1:
        raise ValueError("Smoothing is implemented on the real line only")
    return convolve(nu, lebesgue([0.0, 1.0]))


def bump(width: float = 0.5, quadrature: QuadratureSpec = None) -> DensityMeasure:
    """Normalized C-infinity bump exp(-1 / (1 - (x/width)^2)) on (-width, width)."""
    if not width > 0:
        raise ValueError(f"Bump width must be positive, got {width}")

    def profile(x: np.ndarray) -> np.ndarray:
        u = (x[:, 0] / width) ** 2
        out = np.zeros(x.shape[0])
        inside = u < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - u[inside]))
        return out

    raw = DensityMeasure([[-width, width]], profile, quadrature or QuadratureSpec.from_config(),
                         ([0.0],))
    return raw.scale(1.0 / raw.mass())


def smooth(nu: Measure, width: float = 0.5, points_per_unit: int = 256,
           config: ConfigManager = None) -> DensityMeasure:
    """
    Smooth density (nu * chi_[0,1] dm) * g dm for a bump g, tabulated on a grid.

    Mass is preserved up to quadrature and interpolation error.
    """
    config = config or get_config()
    first = window_average(nu)
    if not isinstance(first, DensityMeasure):
        raise UnsupportedKindError(f"Cannot smooth {nu.kind} measures")
    second = convolve(first, bump(width, first.quadrature), config=config)
    lo, hi = second.bounding_box()[0]
    count = max(2, int(math.ceil((hi - lo) * points_per_unit)) + 1)
    grid = np.linspace(lo, hi, count)
    values = second.density_at(grid.reshape(-1, 1))
    logger.debug(f"Smoothed density tabulated on {count} points")
    return tabulated(grid, values, first.quadrature)


# ---------------------------------------------------------------------------
# Approximate identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproximateIdentity:
    """Probability measures lambda_n with support radius shrinking like 1/n."""

    kind: str = "uniform"
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("uniform", "atomic"):
            raise ValueError(f"Unknown approximate identity kind: {self.kind}")

    def measure(self, n: int) -> Measure:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if self.kind == "uniform":
            return uniform(np.tile([-1.0 / n, 1.0 / n], (self.dim, 1)))
        point = np.zeros(self.dim)
        point[0] = 1.0 / n
        return dirac(point)

    def radius(self, n: int) -> float:
        """sup |t| over the support of lambda_n."""
        return math.sqrt(self.dim) / n if self.kind == "uniform" else 1.0 / n

    def sequence(self, ns: Sequence[int]) -> Iterator[Measure]:
        for n in ns:
            yield self.measure(n)


def approximate_identity(kind: str, n: int, dim: int = 1) -> Measure:
    """lambda_n of the given kind."""
    return ApproximateIdentity(kind, dim).measure(n)


# ---------------------------------------------------------------------------
# The P-operator
# ---------------------------------------------------------------------------

def p_operator(f: TestFunction, mu: Measure, mu_prime: Measure,
               config: ConfigManager = None) -> TestFunction:
    """
    P f = d((f dmu) * mu') / d(mu * mu').

    Defined for atomic pairs and for mu' a single atom (then P f is the translate
    of f). Satisfies integral P f g d(mu * mu') = integral integral f(x) g(x + y) dmu dmu'.

    Raises:
        ValueError: mu or mu' not a probability measure
        UnsupportedKindError: other kind pairs
    """
    if not (mu.is_probability and mu_prime.is_probability):
        raise ValueError("The P-operator needs probability measures")
    if isinstance(mu_prime, AtomicMeasure) and len(mu_prime) == 1:
        return f.translate(mu_prime.points[0])
    if not (isinstance(mu, AtomicMeasure) and isinstance(mu_prime, AtomicMeasure)):
        raise UnsupportedKindError(
            f"P-operator is not available for {mu.kind} * {mu_prime.kind}"
        )
    config = config or get_config()
    rho = convolve(mu, mu_prime, config=config)
    sums = (mu.points[:, None, :] + mu_prime.points[None, :, :]).reshape(-1, mu.dim)
    pair_weights = np.multiply.outer(mu.weights, mu_prime.weights)
    numerators = (atom_values(f, mu)[:, None] * pair_weights).ravel()
    _, index = cKDTree(rho.points).query(sums)
    values = np.zeros(len(rho), dtype=complex)
    np.add.at(values, index, numerators)
    return AtomSamples(rho, values / rho.weights)


# ---------------------------------------------------------------------------
# Budgeted Bessel measures and convex combinations
# ---------------------------------------------------------------------------

def budgeted_bessel(
    mu: Measure, B: float, points, e: ExponentPair, config: ConfigManager = None
) -> Tuple[AtomicMeasure, BoundCertificate]:
    """
    Equal weights summing to B / mass(mu) on the given points, Bessel with bound B.

    Returns:
        (nu, certificate)
    """
    if not B > 0:
        raise ValueError(f"B must be positive, got {B}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim <= 1:
        pts = pts.reshape(-1, mu.dim)
    if pts.shape[0] == 0:
        raise ValueError("At least one point is required")
    weight = B / (mu.mass() * pts.shape[0])
    nu = AtomicMeasure.from_atoms(pts, np.full(pts.shape[0], weight), config=config)
    certificate = BoundCertificate(
        BUDGETED, upper=B, exponents=e,
        premises={"B": B, "mass_mu": mu.mass(), "points": int(pts.shape[0]), "weight": weight},
    )
    return nu, certificate


def convex_combine(nu1: Measure, nu2: Measure, lam: float,
                   config: ConfigManager = None) -> Measure:
    """lam nu1 + (1 - lam) nu2 for 0 < lam < 1."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    a, b = nu1.scale(lam), nu2.scale(1.0 - lam)
    if isinstance(a, DensityMeasure) and isinstance(b, DensityMeasure) \
            and a.pieces is not None and b.pieces is not None:
        pieces: List[Piece] = list(a.pieces) + list(b.pieces)
        box = np.stack([np.minimum(a.box[:, 0], b.box[:, 0]),
                        np.maximum(a.box[:, 1], b.box[:, 1])], axis=1)
        return piecewise_constant(pieces, box, a.quadrature)
    return add_measures(a, b, config=config)


__all__ = [
    "DiscretizationSpec",
    "discretize",
    "QFrameFamily",
    "q_frame_from_discretization",
    "window_average",
    "bump",
    "smooth",
    "ApproximateIdentity",
    "approximate_identity",
    "p_operator",
    "budgeted_bessel",
    "convex_combine",
]
