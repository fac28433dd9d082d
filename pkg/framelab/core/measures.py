"""
measures.py - finite Borel measures on R^d
Atomic, density, self-similar (IFS) and lazy convolution representations with
mass, integration, Fourier-Stieltjes transform, convolution and scaling.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .config import ConfigManager, get_config
from .errors import EvaluationError, UnsupportedKindError
from .quadrature import QuadratureSpec, tensor_rule

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-9

Evaluable = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Array helpers
# ---------------------------------------------------------------------------

def as_points(x, dim: int) -> Tuple[np.ndarray, bool]:
    """
    Normalize a point or a batch of points to shape (k, dim).

    In dimension 1 a scalar is a single point and a flat array is a batch.
    In higher dimension a flat array of length dim is a single point.

    Returns:
        (points, single) where single tells whether one point was given
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 and dim == 1:
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1), False
        if arr.shape[0] == dim:
            return arr.reshape(1, dim), True
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr, False
    raise ValueError(f"Expected points of dimension {dim}, got shape {arr.shape}")


def evaluate(g: Evaluable, points: np.ndarray) -> np.ndarray:
    """Evaluate a vectorized function at points of shape (m, d) as a flat array."""
    m = points.shape[0]
    values = np.asarray(g(points))
    if values.ndim == 0:
        values = np.full(m, values.item(), dtype=values.dtype)
    elif values.size == m:
        values = values.reshape(m)
    else:
        raise ValueError(f"Integrand returned shape {values.shape} for {m} points")
    if not np.all(np.isfinite(values)):
        raise EvaluationError("Integrand produced non-finite values")
    return values


def transform_from_nodes(
    nodes: np.ndarray, weights: np.ndarray, freqs: np.ndarray, budget: Optional[int] = None
) -> np.ndarray:
    """
    Evaluate sum_j weights_j exp(-2 pi i t . x_j) for every row t of freqs.

    Frequencies are processed in fixed-size blocks so memory stays below the
    batch budget; the summation order does not depend on the block size.
    """
    budget = budget or get_config().get_batch_budget()
    out = np.zeros(freqs.shape[0], dtype=complex)
    if nodes.shape[0] == 0:
        return out
    chunk = max(1, budget // nodes.shape[0])
    for start in range(0, freqs.shape[0], chunk):
        block = freqs[start:start + chunk]
        phases = np.exp(-2j * np.pi * (block @ nodes.T))
        out[start:start + chunk] = phases @ weights
    return out


def box_character_integral(freqs: np.ndarray, box: np.ndarray) -> np.ndarray:
    """Closed form of the integral of exp(-2 pi i t . x) dx over a box, per row t."""
    box = np.asarray(box, dtype=float)
    widths = box[:, 1] - box[:, 0]
    centers = 0.5 * (box[:, 0] + box[:, 1])
    factors = np.exp(-2j * np.pi * freqs * centers) * widths * np.sinc(freqs * widths)
    return np.prod(factors, axis=1)


def merge_atoms(
    points: np.ndarray, weights: np.ndarray, tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Merge atoms closer than tol (Euclidean), summing their weights.

    Each merged atom sits at its lowest-index member; output keeps first-occurrence order.
    """
    n = points.shape[0]
    if n <= 1:
        return points, weights
    pairs = cKDTree(points).query_pairs(r=tol, output_type="ndarray")
    if pairs.size == 0:
        return points, weights
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    count, labels = connected_components(graph, directed=False)
    first = np.full(count, n)
    np.minimum.at(first, labels, np.arange(n))
    merged = np.bincount(labels, weights=weights, minlength=count)
    order = np.argsort(first, kind="stable")
    return points[first[order]], merged[order]


def _as_box(box) -> np.ndarray:
    arr = np.asarray(box, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"Box must have shape (d, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr[:, 1] < arr[:, 0]):
        raise ValueError(f"Invalid box {arr.tolist()}")
    return arr


def _intersect(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    lo = np.maximum(a[:, 0], b[:, 0])
    hi = np.minimum(a[:, 1], b[:, 1])
    if np.any(hi <= lo):
        return None
    return np.stack([lo, hi], axis=1)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Measure kinds
# ---------------------------------------------------------------------------

class Measure(ABC):
    """Finite Borel measure on R^d."""

    kind = "measure"

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def mass(self) -> float:
        """Total mass."""

    @abstractmethod
    def scale(self, alpha: float) -> "Measure":
        """Multiply the measure by alpha > 0."""

    @property
    def is_probability(self) -> bool:
        return abs(self.mass() - 1.0) <= PROBABILITY_TOLERANCE

    def nodes(self, breakpoints=None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Weighted support nodes: atoms, or quadrature nodes times density.

        Args:
            breakpoints: Optional per-axis edges the quadrature panels must respect

        Returns:
            Nodes of shape (M, d) and real weights of shape (M,)
        """
        raise UnsupportedKindError(f"{self.kind} measures have no integration nodes")

    def integrate(self, g: Evaluable) -> complex:
        """Integrate a vectorized function against the measure."""
        X, W = self.nodes()
        return complex(W @ evaluate(g, X))

    def fourier_stieltjes(self, t):
        """
        Fourier-Stieltjes transform: integral of exp(-2 pi i t . x) dmu(x).

        Args:
            t: One frequency or a batch of frequencies

        Returns:
            Complex value, or an array for a batch
        """
        freqs, single = as_points(t, self.dim)
        values = self._transform(freqs)
        return complex(values[0]) if single else values

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        X, W = self.nodes()
        return transform_from_nodes(X, W, freqs)

    def ball_mass(self, center, radius: float) -> float:
        raise UnsupportedKindError(f"ball_mass is not available for {self.kind} measures")

    def box_mass(self, lo, hi) -> float:
        raise UnsupportedKindError(f"box_mass is not available for {self.kind} measures")

    def bounding_box(self) -> np.ndarray:
        raise UnsupportedKindError(f"{self.kind} measures have no bounding box")

    def support_radius(self) -> float:
        """Upper bound for |x| over the support."""
        box = self.bounding_box()
        return float(np.sqrt(np.sum(np.max(np.abs(box), axis=1) ** 2)))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} dim={self.dim} mass={self.mass():.6g}>"


@dataclass(frozen=True, eq=False, repr=False)
class AtomicMeasure(Measure):
    """sum_i w_i delta_{x_i} with positive weights at distinct points."""

    points: np.ndarray
    weights: np.ndarray

    kind = "atomic"

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 0:
            points = points.reshape(1, 1)
        elif points.ndim == 1:
            points = points.reshape(-1, 1)
        weights = np.array(self.weights, dtype=float).reshape(-1)

        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError("Atomic measure needs at least one point")
        if weights.shape[0] != points.shape[0]:
            raise ValueError(
                f"Got {points.shape[0]} points but {weights.shape[0]} weights"
            )
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(weights)):
            raise ValueError("Atomic points and weights must be finite")
        if np.any(weights <= 0):
            raise ValueError("Atomic weights must be strictly positive")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ValueError("Atomic points must be distinct (use AtomicMeasure.from_atoms)")

        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def from_atoms(
        cls, points, weights, tol: Optional[float] = None, config: ConfigManager = None
    ) -> "AtomicMeasure":
        """Build an atomic measure, merging atoms closer than the merge tolerance."""
        tol = (config or get_config()).get_merge_tolerance() if tol is None else tol
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        w = np.asarray(weights, dtype=float).reshape(-1)
        pts, w = merge_atoms(pts, w, tol)
        return cls(pts, w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def mass(self) -> float:
        return float(math.fsum(self.weights))

    def nodes(self, breakpoints=None):
        return self.points, self.weights

    def scale(self, alpha: float) -> "AtomicMeasure":
        _check_alpha(alpha)
        return AtomicMeasure(self.points, self.weights * alpha)

    def ball_mass(self, center, radius: float) -> float:
        c, _ = as_points(center, self.dim)
        inside = np.linalg.norm(self.points - c[0], axis=1) < radius
        return float(self.weights[inside].sum())

    def box_mass(self, lo, hi) -> float:
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.dim,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.dim,))
        inside = np.all((self.points >= lo) & (self.points < hi), axis=1)
        return float(self.weights[inside].sum())

    def bounding_box(self) -> np.ndarray:
        return np.stack([self.points.min(axis=0), self.points.max(axis=0)], axis=1)


class Piece(NamedTuple):
    """Constant density value on a box."""

    box: np.ndarray
    value: float


def _piecewise_density(pieces: Sequence[Piece]) -> Evaluable:
    def density(x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for piece in pieces:
            inside = np.all((x >= piece.box[:, 0]) & (x < piece.box[:, 1]), axis=1)
            out[inside] += piece.value
        return out

    return density


@dataclass(frozen=True, eq=False, repr=False)
class DensityMeasure(Measure):
    """
    Density on a box: dmu = rho(x) dx.

    Exactly one of three forms describes rho for serialization: constant pieces,
    1-d samples interpolated linearly, or an opaque callable.
    """

    box: np.ndarray
    density: Evaluable
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec.from_config)
    breakpoints: Optional[Tuple[np.ndarray, ...]] = None
    pieces: Optional[Tuple[Piece, ...]] = None
    samples: Optional[Tuple[np.ndarray, np.ndarray]] = None

    kind = "density"

    def __post_init__(self):
        box = _as_box(self.box)
        object.__setattr__(self, "box", _frozen(box))
        dim = box.shape[0]

        bps = []
        for axis in range(dim):
            extra = None if self.breakpoints is None else self.breakpoints[axis]
            edges = np.asarray([] if extra is None else extra, dtype=float)
            bps.append(_frozen(np.unique(edges)))
        object.__setattr__(self, "breakpoints", tuple(bps))

        if self.pieces is not None:
            pieces = tuple(Piece(_as_box(p.box), float(p.value)) for p in self.pieces)
            if any(p.value < 0 for p in pieces):
                raise ValueError("Piece values must be nonnegative")
            object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self) -> int:
        return self.box.shape[0]

    def density_at(self, x: np.ndarray) -> np.ndarray:
        """Density values at points of shape (m, d); zero outside the box."""
        out = np.zeros(x.shape[0])
        inside = np.all((x >= self.box[:, 0]) & (x <= self.box[:, 1]), axis=1)
        if inside.any():
            values = np.asarray(self.density(x[inside]), dtype=float).reshape(-1)
            if not np.all(np.isfinite(values)):
                raise EvaluationError("Density produced non-finite values")
            if np.any(values < 0):
                raise EvaluationError("Density produced negative values")
            out[inside] = values
        return out

    def _merged_breakpoints(self, extra=None):
        if extra is None:
            return self.breakpoints
        merged = []
        for axis in range(self.dim):
            more = extra[axis] if axis < len(extra) and extra[axis] is not None else []
            merged.append(np.union1d(self.breakpoints[axis], np.asarray(more, dtype=float)))
        return merged

    def _rule_on(self, box: np.ndarray, extra=None) -> Tuple[np.ndarray, np.ndarray]:
        X, w = tensor_rule(box, self.quadrature, self._merged_breakpoints(extra))
        W = w * self.density_at(X)
        keep = W != 0
        return X[keep], W[keep]

    @cached_property
    def _default_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        X, W = self._rule_on(self.box)
        logger.debug(f"Density nodes: {X.shape[0]} with nonzero weight")
        return X, W

    def nodes(self, breakpoints=None):
        if breakpoints is None:
            return self._default_nodes
        return self._rule_on(self.box, breakpoints)

    def mass(self) -> float:
        if self.pieces is not None:
            return self._pieces_mass(self.box)
        return float(math.fsum(self._default_nodes[1]))

    def _pieces_mass(self, region: np.ndarray) -> float:
        total = []
        for piece in self.pieces:
            clipped = _intersect(piece.box, region)
            if clipped is not None:
                total.append(piece.value * float(np.prod(clipped[:, 1] - clipped[:, 0])))
        return float(math.fsum(total))

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        if self.pieces is None:
            return super()._transform(freqs)
        out = np.zeros(freqs.shape[0], dtype=complex)
        for piece in self.pieces:
            clipped = _intersect(piece.box, self.box)
            if clipped is not None and piece.value != 0:
                out += piece.value * box_character_integral(freqs, clipped)
        return out

    def scale(self, alpha: float) -> "DensityMeasure":
        _check_alpha(alpha)
        base = self.density
        pieces = None
        if self.pieces is not None:
            pieces = tuple(Piece(p.box, p.value * alpha) for p in self.pieces)
        samples = None
        if self.samples is not None:
            samples = (self.samples[0], self.samples[1] * alpha)
        return DensityMeasure(
            self.box,
            lambda x: alpha * np.asarray(base(x), dtype=float),
            self.quadrature,
            self.breakpoints,
            pieces,
            samples,
        )

    def box_mass(self, lo, hi) -> float:
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.dim,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.dim,))
        region = _intersect(np.stack([lo, hi], axis=1), self.box)
        if region is None:
            return 0.0
        if self.pieces is not None:
            return self._pieces_mass(region)
        _, W = self._rule_on(region)
        return float(math.fsum(W))

    def ball_mass(self, center, radius: float) -> float:
        c, _ = as_points(center, self.dim)
        c = c[0]
        if self.dim == 1:
            return self.box_mass(c - radius, c + radius)
        region = _intersect(np.stack([c - radius, c + radius], axis=1), self.box)
        if region is None:
            return 0.0
        X, W = self._rule_on(region)
        inside = np.linalg.norm(X - c, axis=1) < radius
        return float(math.fsum(W[inside]))

    def bounding_box(self) -> np.ndarray:
        return self.box.copy()


@dataclass(frozen=True, eq=False, repr=False)
class SelfSimilarMeasure(Measure):
    """
    Invariant measure of the IFS x -> R^{-1}(x + a), a in digits, with weights rho_a.

    Only the transform is exposed; the measure may be singular.
    """

    matrix: np.ndarray
    digits: np.ndarray
    weights: np.ndarray
    depth: Optional[int] = None
    total_mass: float = 1.0
    tail_tolerance: Optional[float] = None
    max_depth: Optional[int] = None

    kind = "ifs"

    def __post_init__(self):
        config = get_config()
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim == 0:
            matrix = matrix.reshape(1, 1)
        digits = np.array(self.digits, dtype=float)
        if digits.ndim == 1:
            digits = digits.reshape(-1, matrix.shape[0])
        weights = np.array(self.weights, dtype=float).reshape(-1)

        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("R must be a square matrix")
        if not np.allclose(matrix, np.round(matrix)):
            raise ValueError("R must have integer entries")
        if np.min(np.abs(np.linalg.eigvals(matrix))) <= 1.0:
            raise ValueError("R must be expanding (all eigenvalues of modulus > 1)")
        if digits.shape[1] != matrix.shape[0] or not np.allclose(digits, np.round(digits)):
            raise ValueError("Digits must be integer vectors of the matrix dimension")
        if not np.any(np.all(digits == 0, axis=1)):
            raise ValueError("Digit set must contain 0")
        if np.unique(digits, axis=0).shape[0] != digits.shape[0]:
            raise ValueError("Digits must be distinct")
        if weights.shape[0] != digits.shape[0]:
            raise ValueError("One weight per digit is required")
        if np.any(weights <= 0) or np.any(weights >= 1) or abs(weights.sum() - 1) > 1e-12:
            raise ValueError("Weights must lie in (0, 1) and sum to 1")
        if self.total_mass <= 0:
            raise ValueError("total_mass must be positive")
        if self.depth is not None and self.depth < 1:
            raise ValueError("depth must be >= 1")

        object.__setattr__(self, "matrix", _frozen(matrix))
        object.__setattr__(self, "digits", _frozen(digits))
        object.__setattr__(self, "weights", _frozen(weights))
        if self.tail_tolerance is None:
            object.__setattr__(self, "tail_tolerance", config.get_tail_tolerance())
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", config.get_max_depth())

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def mass(self) -> float:
        return float(self.total_mass)

    def scale(self, alpha: float) -> "SelfSimilarMeasure":
        _check_alpha(alpha)
        return SelfSimilarMeasure(
            self.matrix, self.digits, self.weights, self.depth,
            self.total_mass * alpha, self.tail_tolerance, self.max_depth,
        )

    def integrate(self, g: Evaluable) -> complex:
        raise UnsupportedKindError(
            "Self-similar measures integrate only characters (use fourier_stieltjes)"
        )

    def mask(self, s: np.ndarray) -> np.ndarray:
        """m(s) = sum_a rho_a exp(-2 pi i a . s) per row of s."""
        return np.exp(-2j * np.pi * (s @ self.digits.T)) @ self.weights

    @staticmethod
    def _geometric_tail(inverse: np.ndarray) -> float:
        """G with sum_{j>k} |A^j s| <= G |A^k s| for a matrix A with spectral radius < 1."""
        powers, norms = inverse.copy(), []
        for _ in range(64):
            norms.append(np.linalg.norm(powers, 2))
            if norms[-1] < 1.0:
                return float(sum(norms) / (1.0 - norms[-1]))
            powers = powers @ inverse
        raise ValueError("Inverse of R does not contract within 64 powers")

    @cached_property
    def _tail_factor(self) -> float:
        return self._geometric_tail(np.linalg.inv(self.matrix.T))

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        step = np.linalg.inv(self.matrix)  # rows: s -> s R^{-1} == (R^T)^{-1} s
        amax = float(np.max(np.linalg.norm(self.digits, axis=1)))
        product = np.ones(freqs.shape[0], dtype=complex)
        s = freqs.copy()
        limit = self.depth if self.depth is not None else self.max_depth
        for k in range(1, limit + 1):
            s = s @ step
            product *= self.mask(s)
            if self.depth is None:
                tail = 2 * np.pi * amax * self._tail_factor * np.linalg.norm(s, axis=1).max()
                if tail <= self.tail_tolerance:
                    logger.debug(f"Self-similar product truncated at depth {k}")
                    break
        else:
            if self.depth is None:
                logger.warning(f"Self-similar product hit max depth {limit}")
        return product * self.total_mass

    def bounding_box(self) -> np.ndarray:
        radius = self.support_radius()
        return np.tile([-radius, radius], (self.dim, 1))

    def support_radius(self) -> float:
        amax = float(np.max(np.linalg.norm(self.digits, axis=1)))
        inverse = np.linalg.inv(self.matrix)
        return amax * self._geometric_tail(inverse)


@dataclass(frozen=True, eq=False, repr=False)
class ConvolutionMeasure(Measure):
    """Lazy convolution left * right."""

    left: Measure
    right: Measure
    batch_budget: Optional[int] = None

    kind = "convolution"

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise ValueError("Convolution children must share the dimension")
        if self.batch_budget is None:
            object.__setattr__(self, "batch_budget", get_config().get_batch_budget())

    @property
    def dim(self) -> int:
        return self.left.dim

    def mass(self) -> float:
        return self.left.mass() * self.right.mass()

    def scale(self, alpha: float) -> "ConvolutionMeasure":
        return ConvolutionMeasure(self.left.scale(alpha), self.right, self.batch_budget)

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        return self.left._transform(freqs) * self.right._transform(freqs)

    @cached_property
    def _product_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        Xa, Wa = self.left.nodes()
        Xb, Wb = self.right.nodes()
        size = Xa.shape[0] * Xb.shape[0]
        if size > self.batch_budget:
            raise EvaluationError(f"Iterated convolution integral needs {size} nodes")
        X = (Xa[:, None, :] + Xb[None, :, :]).reshape(-1, self.dim)
        W = np.multiply.outer(Wa, Wb).ravel()
        return X, W

    def nodes(self, breakpoints=None):
        return self._product_nodes

    def bounding_box(self) -> np.ndarray:
        return self.left.bounding_box() + self.right.bounding_box()


@dataclass(frozen=True, eq=False, repr=False)
class SumMeasure(Measure):
    """Finite sum of measures of the same dimension."""

    terms: Tuple[Measure, ...]

    kind = "sum"

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("Sum needs at least one term")
        if len({t.dim for t in terms}) != 1:
            raise ValueError("Summed measures must share the dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def mass(self) -> float:
        return float(math.fsum(t.mass() for t in self.terms))

    def scale(self, alpha: float) -> "SumMeasure":
        return SumMeasure(tuple(t.scale(alpha) for t in self.terms))

    def nodes(self, breakpoints=None):
        parts = [t.nodes(breakpoints) for t in self.terms]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def integrate(self, g: Evaluable) -> complex:
        return complex(sum(t.integrate(g) for t in self.terms))

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        out = np.zeros(freqs.shape[0], dtype=complex)
        for term in self.terms:
            out += term._transform(freqs)
        return out

    def ball_mass(self, center, radius: float) -> float:
        return float(math.fsum(t.ball_mass(center, radius) for t in self.terms))

    def box_mass(self, lo, hi) -> float:
        return float(math.fsum(t.box_mass(lo, hi) for t in self.terms))

    def bounding_box(self) -> np.ndarray:
        boxes = np.stack([t.bounding_box() for t in self.terms])
        return np.stack([boxes[:, :, 0].min(axis=0), boxes[:, :, 1].max(axis=0)], axis=1)


@dataclass(frozen=True, eq=False, repr=False)
class EmbeddedMeasure(Measure):
    """Push-forward of a measure on R^n into R^dim along the coordinate axes `axes`."""

    base: Measure
    axes: Tuple[int, ...]
    ambient: int

    kind = "embedded"

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if len(axes) != self.base.dim or len(set(axes)) != len(axes):
            raise ValueError("One distinct axis per base coordinate is required")
        if min(axes) < 0 or max(axes) >= self.ambient:
            raise ValueError("Axes out of range")
        object.__setattr__(self, "axes", axes)

    @property
    def dim(self) -> int:
        return self.ambient

    @property
    def _others(self) -> list:
        return [a for a in range(self.ambient) if a not in self.axes]

    def _pad(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((x.shape[0], self.ambient))
        out[:, list(self.axes)] = x
        return out

    def mass(self) -> float:
        return self.base.mass()

    def scale(self, alpha: float) -> "EmbeddedMeasure":
        return EmbeddedMeasure(self.base.scale(alpha), self.axes, self.ambient)

    def nodes(self, breakpoints=None):
        sub = None
        if breakpoints is not None:
            sub = [breakpoints[a] for a in self.axes]
        X, W = self.base.nodes(sub)
        return self._pad(X), W

    def integrate(self, g: Evaluable) -> complex:
        return self.base.integrate(lambda x: g(self._pad(x)))

    def _transform(self, freqs: np.ndarray) -> np.ndarray:
        return self.base._transform(freqs[:, list(self.axes)])

    def ball_mass(self, center, radius: float) -> float:
        c, _ = as_points(center, self.ambient)
        off = float(np.sum(c[0, self._others] ** 2))
        if off >= radius ** 2:
            return 0.0
        return self.base.ball_mass(c[0, list(self.axes)], math.sqrt(radius ** 2 - off))

    def box_mass(self, lo, hi) -> float:
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.ambient,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.ambient,))
        others = self._others
        if np.any(lo[others] > 0) or np.any(hi[others] <= 0):
            return 0.0
        axes = list(self.axes)
        return self.base.box_mass(lo[axes], hi[axes])

    def bounding_box(self) -> np.ndarray:
        box = np.zeros((self.ambient, 2))
        box[list(self.axes)] = self.base.bounding_box()
        return box


def _check_alpha(alpha: float) -> None:
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError(f"Scale factor must be positive and finite, got {alpha}")


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def dirac(point=0.0, weight: float = 1.0) -> AtomicMeasure:
    """weight * delta_point."""
    pts = np.atleast_1d(np.asarray(point, dtype=float))
    return AtomicMeasure(pts.reshape(1, -1), [weight])


def atomic(points, weights=None, config: ConfigManager = None) -> AtomicMeasure:
    """Atomic measure (unit weights by default), merging coincident atoms."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim <= 1:
        pts = pts.reshape(-1, 1)
    if weights is None:
        weights = np.ones(pts.shape[0])
    return AtomicMeasure.from_atoms(pts, weights, config=config)


def piecewise_constant(
    pieces: Sequence[Tuple], box=None, quadrature: QuadratureSpec = None,
    config: ConfigManager = None,
) -> DensityMeasure:
    """
    Density with constant values on boxes (values add where boxes overlap).

    Args:
        pieces: (box, value) pairs with box of shape (d, 2)
        box: Support box (defaults to the bounding box of the pieces)
        quadrature: Quadrature spec (defaults to the numerics config)
        config: Configuration supplying the default quadrature
    """
    pieces = tuple(Piece(_as_box(b), float(v)) for b, v in pieces)
    if not pieces:
        raise ValueError("At least one piece is required")
    if box is None:
        stacked = np.stack([p.box for p in pieces])
        box = np.stack([stacked[:, :, 0].min(axis=0), stacked[:, :, 1].max(axis=0)], axis=1)
    box = _as_box(box)
    breakpoints = [
        np.unique(np.concatenate([p.box[axis] for p in pieces])) for axis in range(box.shape[0])
    ]
    return DensityMeasure(
        box,
        _piecewise_density(pieces),
        quadrature or QuadratureSpec.from_config(config),
        tuple(breakpoints),
        pieces,
    )


def lebesgue(box, quadrature: QuadratureSpec = None,
             config: ConfigManager = None) -> DensityMeasure:
    """Lebesgue measure restricted to a box."""
    return piecewise_constant([(box, 1.0)], quadrature=quadrature, config=config)


def uniform(box, quadrature: QuadratureSpec = None,
            config: ConfigManager = None) -> DensityMeasure:
    """Normalized Lebesgue measure on a box."""
    box = _as_box(box)
    return piecewise_constant([(box, 1.0 / float(np.prod(box[:, 1] - box[:, 0])))],
                              quadrature=quadrature, config=config)


def lebesgue_window(half_width: Optional[float] = None, dim: int = 1,
                    quadrature: QuadratureSpec = None,
                    config: ConfigManager = None) -> DensityMeasure:
    """Lebesgue measure on [-T, T]^d (windowed stand-in for Lebesgue measure)."""
    if half_width is None:
        half_width = (config or get_config()).get_lebesgue_window()
    if not half_width > 0:
        raise ValueError(f"Window half-width must be positive, got {half_width}")
    return lebesgue(np.tile([-half_width, half_width], (dim, 1)), quadrature, config)


def tabulated(grid, values, quadrature: QuadratureSpec = None,
              config: ConfigManager = None) -> DensityMeasure:
    """1-d density interpolated linearly from samples on a grid."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
        raise ValueError("Samples need matching 1-d grid and values (>= 2 points)")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("Sample grid must be increasing")
    if np.any(values < 0):
        raise ValueError("Density samples must be nonnegative")
    return DensityMeasure(
        [[grid[0], grid[-1]]],
        lambda x: np.interp(x[:, 0], grid, values, left=0.0, right=0.0),
        quadrature or QuadratureSpec.from_config(config),
        (grid,),
        None,
        (_frozen(grid.copy()), _frozen(values.copy())),
    )


def self_similar(matrix, digits, weights=None, depth: Optional[int] = None,
                 total_mass: float = 1.0, config: ConfigManager = None) -> SelfSimilarMeasure:
    """IFS invariant measure (equal weights by default)."""
    digits = np.asarray(digits, dtype=float)
    count = digits.shape[0]
    if weights is None:
        weights = np.full(count, 1.0 / count)
    config = config or get_config()
    return SelfSimilarMeasure(matrix, digits, weights, depth, total_mass,
                              config.get_tail_tolerance(), config.get_max_depth())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def mass(m: Measure) -> float:
    """Total mass of a measure."""
    return m.mass()


def integrate(m: Measure, g: Evaluable) -> complex:
    """Integral of a vectorized function g against m."""
    return m.integrate(g)


def fourier_stieltjes(m: Measure, t):
    """Fourier-Stieltjes transform of m at t (single frequency or batch)."""
    return m.fourier_stieltjes(t)


def scale(m: Measure, alpha: float) -> Measure:
    """alpha * m for alpha > 0."""
    return m.scale(alpha)


def ball_mass(m: Measure, center, radius: float) -> float:
    """Mass of the open Euclidean ball B(center, radius)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return m.ball_mass(center, radius)


def box_mass(m: Measure, lo, hi) -> float:
    """Mass of the half-open box [lo, hi)."""
    return m.box_mass(lo, hi)


def convolve(a: Measure, b: Measure, config: ConfigManager = None) -> Measure:
    """
    Convolution a * b.

    Atomic * Atomic and Atomic * Density are evaluated exactly, Density * Density is a
    quadrature-evaluated density; every other pair becomes a lazy ConvolutionMeasure.
    """
    if a.dim != b.dim:
        raise ValueError(f"Cannot convolve measures on R^{a.dim} and R^{b.dim}")
    config = config or get_config()

    if isinstance(a, AtomicMeasure) and isinstance(b, AtomicMeasure):
        points = (a.points[:, None, :] + b.points[None, :, :]).reshape(-1, a.dim)
        weights = np.multiply.outer(a.weights, b.weights).ravel()
        return AtomicMeasure.from_atoms(points, weights, config=config)
    if isinstance(a, AtomicMeasure) and isinstance(b, DensityMeasure):
        return _shifted_sum(a, b)
    if isinstance(a, DensityMeasure) and isinstance(b, AtomicMeasure):
        return _shifted_sum(b, a)
    if isinstance(a, DensityMeasure) and isinstance(b, DensityMeasure):
        return _density_convolution(a, b, config)
    return ConvolutionMeasure(a, b, config.get_batch_budget())


def _shifted_sum(atoms: AtomicMeasure, dens: DensityMeasure) -> DensityMeasure:
    box = dens.box + np.stack([atoms.points.min(axis=0), atoms.points.max(axis=0)], axis=1)
    if dens.pieces is not None:
        pieces = [
            (p.box + x[:, None], w * p.value)
            for x, w in zip(atoms.points, atoms.weights)
            for p in dens.pieces
        ]
        return piecewise_constant(pieces, box, dens.quadrature)

    edges = [np.union1d(dens.breakpoints[a], dens.box[a]) for a in range(dens.dim)]
    breakpoints = tuple(
        np.unique((edges[a][None, :] + atoms.points[:, a][:, None]).ravel())
        for a in range(dens.dim)
    )
    points, weights = atoms.points, atoms.weights

    def density(x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for shift, w in zip(points, weights):
            out += w * dens.density_at(x - shift)
        return out

    return DensityMeasure(box, density, dens.quadrature, breakpoints)


def _density_convolution(a: DensityMeasure, b: DensityMeasure,
                         config: ConfigManager) -> DensityMeasure:
    inner, outer = (a, b) if a.nodes()[0].shape[0] <= b.nodes()[0].shape[0] else (b, a)
    Y, W = inner.nodes()
    budget = config.get_batch_budget()
    dim = a.dim

    def density(x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        if Y.shape[0] == 0:
            return out
        rows = max(1, budget // Y.shape[0])
        for start in range(0, x.shape[0], rows):
            block = x[start:start + rows]
            shifted = (block[:, None, :] - Y[None, :, :]).reshape(-1, dim)
            out[start:start + rows] = outer.density_at(shifted).reshape(block.shape[0], -1) @ W
        return out

    box = a.box + b.box
    breakpoints = []
    for axis in range(dim):
        ea = np.union1d(a.breakpoints[axis], a.box[axis])
        eb = np.union1d(b.breakpoints[axis], b.box[axis])
        if ea.size * eb.size <= 4096:
            breakpoints.append(np.unique(np.add.outer(ea, eb).ravel()))
        else:
            breakpoints.append(box[axis])
    return DensityMeasure(box, density, a.quadrature, tuple(breakpoints))


def embed(m: Measure, axes: Sequence[int], dim: int) -> Measure:
    """Place a measure on R^n into R^dim along the given coordinate axes."""
    if isinstance(m, AtomicMeasure):
        points = np.zeros((len(m), dim))
        points[:, list(axes)] = m.points
        return AtomicMeasure(points, m.weights)
    return EmbeddedMeasure(m, tuple(axes), dim)


def add_measures(*terms: Measure, config: ConfigManager = None) -> Measure:
    """Sum of measures; atomic terms are merged into one atomic measure."""
    if not terms:
        raise ValueError("Nothing to add")
    atomic_terms = [t for t in terms if isinstance(t, AtomicMeasure)]
    others = [t for t in terms if not isinstance(t, AtomicMeasure)]
    merged = []
    if atomic_terms:
        merged.append(AtomicMeasure.from_atoms(
            np.concatenate([t.points for t in atomic_terms]),
            np.concatenate([t.weights for t in atomic_terms]),
            config=config,
        ))
    merged.extend(others)
    return merged[0] if len(merged) == 1 else SumMeasure(tuple(merged))


def mixed_type(a: Measure, b: Measure, config: ConfigManager = None) -> Measure:
    """rho = a x delta_0 + delta_0 x b on R^{n+m}."""
    n, m = a.dim, b.dim
    first = embed(a, range(n), n + m)
    second = embed(b, range(n, n + m), n + m)
    return add_measures(first, second, config=config)

