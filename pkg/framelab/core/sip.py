"""
sip.py - the compatible semi-inner product on L^p(mu)
Exponent pairs, L^p norms, [f, g], Fourier coefficients of f dmu and the
(1, infinity) sup-norm pathway.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ConfigManager, get_config
from .errors import UnsupportedKindError
from .functions import (
    AtomSamples,
    Modulated,
    SimpleFunction,
    TestFunction,
    TrigPolynomial,
    merged_breakpoints,
)
from .measures import (
    AtomicMeasure,
    DensityMeasure,
    Measure,
    SelfSimilarMeasure,
    SumMeasure,
    as_points,
    box_character_integral,
    transform_from_nodes,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExponentPair:
    """Conjugate exponents 1/p + 1/q = 1; q is always derived from p."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p < 1:
            raise ValueError(f"p must be a finite real >= 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_q(cls, q: float) -> "ExponentPair":
        if q == math.inf:
            return cls(1.0)
        if q <= 1:
            raise ValueError(f"q must be > 1, got {q}")
        return cls(q / (q - 1.0))

    @property
    def q(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    @property
    def is_endpoint(self) -> bool:
        """The (1, infinity) case."""
        return self.p == 1.0

    def to_dict(self) -> dict:
        return {"p": self.p, "q": "inf" if self.is_endpoint else self.q}

    def __str__(self) -> str:
        q = "inf" if self.is_endpoint else f"{self.q:g}"
        return f"(p={self.p:g}, q={q})"


def interpolated_exponent(e0: ExponentPair, e1: ExponentPair, theta: float) -> ExponentPair:
    """Exponent with 1/p = (1 - theta)/p0 + theta/p1."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    return ExponentPair(1.0 / ((1.0 - theta) / e0.p + theta / e1.p))


def interpolation_parameter(e0: ExponentPair, e1: ExponentPair, p: float) -> float:
    """theta placing 1/p between 1/p0 and 1/p1."""
    if e0.p == e1.p:
        raise ValueError("Endpoint exponents must differ")
    return (1.0 / p - 1.0 / e0.p) / (1.0 / e1.p - 1.0 / e0.p)


def character(t, dim: Optional[int] = None) -> TrigPolynomial:
    """e_t(x) = exp(2 pi i t . x)."""
    return TrigPolynomial.character(t, dim)


# ---------------------------------------------------------------------------
# Norms and the semi-inner product
# ---------------------------------------------------------------------------

def _power_integral(f: TestFunction, mu: Measure, p: float) -> float:
    if isinstance(f, Modulated):
        return _power_integral(f.base, mu, p)
    if isinstance(mu, SelfSimilarMeasure):
        return _self_similar_power(f, mu, p)
    if isinstance(mu, SumMeasure):
        return math.fsum(_power_integral(f, term, p) for term in mu.terms)
    X, W = mu.nodes(f.breakpoints())
    if isinstance(f, AtomSamples) and isinstance(mu, AtomicMeasure) and f.lives_on(mu):
        values = np.abs(f.values)
    else:
        values = np.abs(f.evaluate(X))
    return float(W @ values ** p)


def _self_similar_power(f: TestFunction, mu: SelfSimilarMeasure, p: float) -> float:
    if not isinstance(f, TrigPolynomial):
        raise UnsupportedKindError("Only trig polynomials have norms under self-similar measures")
    if f.frequencies.shape[0] == 1:
        return float(abs(f.coefficients[0]) ** p * mu.mass())
    if p != 2:
        raise UnsupportedKindError("Multi-term norms under self-similar measures need p = 2")
    # |f|^2 = sum_jk c_j conj(c_k) e_{xi_j - xi_k}
    diffs = (f.frequencies[None, :, :] - f.frequencies[:, None, :]).reshape(-1, f.dim)
    gram = mu.fourier_stieltjes(diffs).reshape(f.frequencies.shape[0], -1)
    value = np.real(np.conj(f.coefficients) @ gram @ f.coefficients)
    return float(max(value, 0.0))


def norm_p(f: TestFunction, mu: Measure, e: ExponentPair) -> float:
    """
    ||f||_{L^p(mu)} = (integral |f|^p dmu)^(1/p).

    Args:
        f: Test function
        mu: Measure
        e: Exponent pair

    Returns:
        The L^p norm
    """
    return _power_integral(f, mu, e.p) ** (1.0 / e.p)


def semi_inner_product(
    f: TestFunction, g: TestFunction, mu: Measure, e: ExponentPair
) -> complex:
    """
    [f, g] = ||g||^(2-p) integral f |g|^(p-2) conj(g) dmu.

    The integrand vanishes where g = 0 and [f, g] = 0 when ||g|| = 0.

    Raises:
        ValueError: for p = 1 (only the sup-norm pathway exists there)
    """
    if e.is_endpoint:
        raise ValueError(
            "The semi-inner product needs p > 1; use fourier_coefficient or sup_norm_transform"
        )
    p = e.p

    # [f, c e_t] = conj(c) mass^((2-p)/p) * (f dmu)^(t)
    if isinstance(g, TrigPolynomial) and g.frequencies.shape[0] == 1:
        c = g.coefficients[0]
        if c == 0:
            return 0j
        factor = np.conj(c) * mu.mass() ** ((2.0 - p) / p)
        return complex(factor * fourier_coefficient(f, g.frequencies[0], mu))

    g_norm = norm_p(g, mu, e)
    if g_norm == 0:
        return 0j
    X, W = mu.nodes(merged_breakpoints(f, g))
    gv = g.evaluate(X)
    fv = f.evaluate(X)
    magnitude = np.abs(gv)
    integrand = np.zeros(X.shape[0], dtype=complex)
    nonzero = magnitude > 0
    integrand[nonzero] = fv[nonzero] * magnitude[nonzero] ** (p - 2.0) * np.conj(gv[nonzero])
    return complex(W @ integrand) / g_norm ** (p - 2.0)


# ---------------------------------------------------------------------------
# Fourier coefficients of f dmu
# ---------------------------------------------------------------------------

def _coefficients(f: TestFunction, mu: Measure, freqs: np.ndarray) -> np.ndarray:
    if isinstance(f, Modulated):
        return _coefficients(f.base, mu, freqs - f.shift)
    if isinstance(mu, SumMeasure):
        out = np.zeros(freqs.shape[0], dtype=complex)
        for term in mu.terms:
            out += _coefficients(f, term, freqs)
        return out
    if isinstance(f, TrigPolynomial) and not isinstance(mu, AtomicMeasure):
        # (e_xi dmu)^(t) = mu^(t - xi)
        out = np.zeros(freqs.shape[0], dtype=complex)
        for xi, c in zip(f.frequencies, f.coefficients):
            out += c * mu._transform(freqs - xi)
        return out
    if isinstance(f, SimpleFunction) and isinstance(mu, DensityMeasure) and mu.pieces:
        return _simple_on_pieces(f, mu, freqs)
    if isinstance(mu, SelfSimilarMeasure):
        raise UnsupportedKindError(
            f"Fourier coefficients of {f.kind} functions need a non-self-similar measure"
        )
    X, W = mu.nodes(f.breakpoints())
    if isinstance(f, AtomSamples) and isinstance(mu, AtomicMeasure) and f.lives_on(mu):
        weights = W * f.values
    else:
        weights = W * f.evaluate(X)
    return transform_from_nodes(X, weights, freqs)


def _simple_on_pieces(f: SimpleFunction, mu: DensityMeasure, freqs: np.ndarray) -> np.ndarray:
    out = np.zeros(freqs.shape[0], dtype=complex)
    for cell, value in f.cells():
        for piece in mu.pieces:
            lo = np.maximum.reduce([cell[:, 0], piece.box[:, 0], mu.box[:, 0]])
            hi = np.minimum.reduce([cell[:, 1], piece.box[:, 1], mu.box[:, 1]])
            if np.all(hi > lo) and piece.value != 0:
                out += value * piece.value * box_character_integral(
                    freqs, np.stack([lo, hi], axis=1)
                )
    return out


def fourier_coefficient(f: TestFunction, t, mu: Measure):
    """
    (f dmu)^(t) = integral f(x) exp(-2 pi i t . x) dmu(x).

    Equals [f, e_t] for probability measures and every p > 1. Exact for atomic mu
    and for constant-piece densities against trig, simple and modulated functions.

    Args:
        f: Test function
        t: One frequency or a batch
        mu: Measure

    Returns:
        Complex value, or an array for a batch
    """
    freqs, single = as_points(t, mu.dim)
    values = _coefficients(f, mu, freqs)
    return complex(values[0]) if single else values


def _window_box(window, dim: int) -> np.ndarray:
    if np.isscalar(window):
        return np.tile([-float(window), float(window)], (dim, 1))
    box = np.asarray(window, dtype=float).reshape(-1, 2)
    if box.shape[0] != dim or np.any(box[:, 1] < box[:, 0]):
        raise ValueError(f"Window must be a (d, 2) box for d={dim}")
    return box


def window_grid(window, dim: int, points_per_axis: Optional[int] = None,
                config: ConfigManager = None) -> np.ndarray:
    """Uniform grid over the window (origin included when inside), capped in size."""
    config = config or get_config()
    box = _window_box(window, dim)
    n = points_per_axis or config.get_sup_grid_points()
    cap = config.get_sup_grid_cap()
    n = max(2, min(n, int(cap ** (1.0 / dim))))
    axes = [np.linspace(lo, hi, n) for lo, hi in box]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    if np.all((box[:, 0] <= 0) & (box[:, 1] >= 0)):
        grid = np.vstack([np.zeros((1, dim)), grid])
    return grid


def sup_norm_transform(
    f: TestFunction,
    mu: Measure,
    window=None,
    grid: Optional[int] = None,
    config: ConfigManager = None,
) -> float:
    """
    max |(f dmu)^(t)| over a uniform grid of the window.

    A lower estimate of the true supremum; the grid holds `grid` points per axis
    (2048 by default) plus the origin.
    """
    config = config or get_config()
    window = config.get_sup_window() if window is None else window
    freqs = window_grid(window, mu.dim, grid, config)
    values = np.abs(_coefficients(f, mu, freqs))
    logger.debug(f"Sup-norm grid of {freqs.shape[0]} frequencies")
    return float(values.max())
