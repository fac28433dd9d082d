"""
functions.py - test functions in L^p(mu)
Trig polynomials, simple functions on box partitions, atom-indexed samples and
modulations e_s * f, all evaluable on batches of points.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .measures import AtomicMeasure, as_points

logger = logging.getLogger(__name__)

ATOM_MATCH_TOLERANCE = 1e-9


class TestFunction(ABC):
    """Element of L^p(mu) in evaluable form."""

    __test__ = False
    kind = "function"

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the domain."""

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Complex values at points of shape (m, d)."""

    @abstractmethod
    def translate(self, y) -> "TestFunction":
        """x -> f(x - y)."""

    @abstractmethod
    def __mul__(self, scalar) -> "TestFunction":
        """Scalar multiple."""

    def __rmul__(self, scalar) -> "TestFunction":
        return self.__mul__(scalar)

    def __call__(self, x) -> np.ndarray:
        points, single = as_points(x, self.dim)
        values = self.evaluate(points)
        return complex(values[0]) if single else values

    def modulate(self, s) -> "TestFunction":
        """x -> exp(2 pi i s . x) f(x)."""
        shift, _ = as_points(s, self.dim)
        return Modulated(self, shift[0])

    def breakpoints(self) -> Optional[List[np.ndarray]]:
        """Per-axis discontinuity locations, if any."""
        return None


@dataclass(frozen=True, eq=False)
class TrigPolynomial(TestFunction):
    """sum_k c_k exp(2 pi i xi_k . x) with distinct frequencies xi_k."""

    frequencies: np.ndarray
    coefficients: np.ndarray

    kind = "trig"

    def __post_init__(self):
        freqs = np.array(self.frequencies, dtype=float)
        if freqs.ndim <= 1:
            freqs = freqs.reshape(-1, 1)
        coeffs = np.array(self.coefficients, dtype=complex).reshape(-1)
        if freqs.shape[0] == 0 or freqs.shape[0] != coeffs.shape[0]:
            raise ValueError("One coefficient per frequency is required")
        if not np.all(np.isfinite(freqs)) or not np.all(np.isfinite(coeffs)):
            raise ValueError("Frequencies and coefficients must be finite")
        if np.unique(freqs, axis=0).shape[0] != freqs.shape[0]:
            raise ValueError("Trig polynomial frequencies must be distinct")
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def character(cls, t, dim: int = None) -> "TrigPolynomial":
        """The exponential e_t(x) = exp(2 pi i t . x)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return cls(t.reshape(1, dim or t.size), [1.0])

    @classmethod
    def constant(cls, value: complex = 1.0, dim: int = 1) -> "TrigPolynomial":
        return cls(np.zeros((1, dim)), [value])

    @classmethod
    def random(
        cls, rng: np.random.Generator, degree: int, dim: int = 1, terms: Optional[int] = None
    ) -> "TrigPolynomial":
        """
        Random trig polynomial with integer frequencies in [-degree, degree]^dim.

        Args:
            rng: Random generator
            degree: Largest absolute frequency per axis
            dim: Dimension
            terms: Number of distinct frequencies (all of the window when None)
        """
        axis = np.arange(-degree, degree + 1)
        grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        if terms is not None and terms < grid.shape[0]:
            grid = grid[np.sort(rng.choice(grid.shape[0], size=terms, replace=False))]
        coeffs = rng.standard_normal(grid.shape[0]) + 1j * rng.standard_normal(grid.shape[0])
        return cls(grid.astype(float), coeffs)

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]

    @property
    def degree(self) -> float:
        return float(np.max(np.abs(self.frequencies)))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.exp(2j * np.pi * (x @ self.frequencies.T)) @ self.coefficients

    def translate(self, y) -> "TrigPolynomial":
        shift, _ = as_points(y, self.dim)
        phase = np.exp(-2j * np.pi * (self.frequencies @ shift[0]))
        return TrigPolynomial(self.frequencies, self.coefficients * phase)

    def modulate(self, s) -> "TrigPolynomial":
        shift, _ = as_points(s, self.dim)
        return TrigPolynomial(self.frequencies + shift[0], self.coefficients)

    def __mul__(self, scalar) -> "TrigPolynomial":
        return TrigPolynomial(self.frequencies, self.coefficients * complex(scalar))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        freqs = np.concatenate([self.frequencies, other.frequencies])
        coeffs = np.concatenate([self.coefficients, other.coefficients])
        unique, inverse = np.unique(freqs, axis=0, return_inverse=True)
        summed = np.zeros(unique.shape[0], dtype=complex)
        np.add.at(summed, inverse.reshape(-1), coeffs)
        return TrigPolynomial(unique, summed)


@dataclass(frozen=True, eq=False)
class SimpleFunction(TestFunction):
    """
    Piecewise-constant function on the grid partition of a box.

    edges[a] are the increasing cell edges along axis a; values has one entry per
    cell. Cells are half-open and the function vanishes outside the box.
    """

    edges: Tuple[np.ndarray, ...]
    values: np.ndarray

    kind = "simple"

    def __post_init__(self):
        edges = tuple(np.array(e, dtype=float).reshape(-1) for e in self.edges)
        if not edges or any(e.size < 2 or np.any(np.diff(e) <= 0) for e in edges):
            raise ValueError("Each axis needs at least two increasing edges")
        values = np.array(self.values, dtype=complex).reshape([e.size - 1 for e in edges])
        if not np.all(np.isfinite(values)):
            raise ValueError("Simple function values must be finite")
        for e in edges:
            e.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    @classmethod
    def indicator(cls, box, value: complex = 1.0) -> "SimpleFunction":
        """value * chi_box."""
        box = np.asarray(box, dtype=float).reshape(-1, 2)
        return cls(tuple(box), np.full([1] * box.shape[0], value, dtype=complex))

    @property
    def dim(self) -> int:
        return len(self.edges)

    @property
    def box(self) -> np.ndarray:
        return np.array([[e[0], e[-1]] for e in self.edges])

    def cells(self):
        """Yield (cell box, value) for every nonzero cell."""
        for index in zip(*np.nonzero(self.values)):
            box = np.array([[self.edges[a][i], self.edges[a][i + 1]] for a, i in enumerate(index)])
            yield box, self.values[index]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0], dtype=complex)
        inside = np.ones(x.shape[0], dtype=bool)
        index = []
        for axis, e in enumerate(self.edges):
            i = np.searchsorted(e, x[:, axis], side="right") - 1
            inside &= (i >= 0) & (i < e.size - 1)
            index.append(np.clip(i, 0, e.size - 2))
        out[inside] = self.values[tuple(i[inside] for i in index)]
        return out

    def breakpoints(self) -> List[np.ndarray]:
        return list(self.edges)

    def translate(self, y) -> "SimpleFunction":
        shift, _ = as_points(y, self.dim)
        return SimpleFunction(tuple(e + s for e, s in zip(self.edges, shift[0])), self.values)

    def __mul__(self, scalar) -> "SimpleFunction":
        return SimpleFunction(self.edges, self.values * complex(scalar))

    def __add__(self, other: "SimpleFunction") -> "SimpleFunction":
        if not isinstance(other, SimpleFunction):
            return NotImplemented
        edges = tuple(np.union1d(a, b) for a, b in zip(self.edges, other.edges))
        mids = [0.5 * (e[:-1] + e[1:]) for e in edges]
        grid = np.stack(np.meshgrid(*mids, indexing="ij"), axis=-1).reshape(-1, len(edges))
        values = self.evaluate(grid) + other.evaluate(grid)
        return SimpleFunction(edges, values.reshape([e.size - 1 for e in edges]))


@dataclass(frozen=True, eq=False)
class AtomSamples(TestFunction):
    """Values at the atoms of an atomic measure (zero elsewhere)."""

    measure: AtomicMeasure
    values: np.ndarray

    kind = "atoms"

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.shape[0] != len(self.measure):
            raise ValueError(
                f"Got {values.shape[0]} samples for {len(self.measure)} atoms"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def random(cls, rng: np.random.Generator, measure: AtomicMeasure) -> "AtomSamples":
        n = len(measure)
        return cls(measure, rng.standard_normal(n) + 1j * rng.standard_normal(n))

    @property
    def dim(self) -> int:
        return self.measure.dim

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.measure.points)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        distance, index = self._tree.query(x, distance_upper_bound=ATOM_MATCH_TOLERANCE)
        found = np.isfinite(distance)
        out = np.zeros(x.shape[0], dtype=complex)
        out[found] = self.values[index[found]]
        return out

    def lives_on(self, measure) -> bool:
        """True when the samples are indexed by exactly the atoms of measure."""
        if measure is self.measure:
            return True
        return (
            isinstance(measure, AtomicMeasure)
            and measure.points.shape == self.measure.points.shape
            and np.array_equal(measure.points, self.measure.points)
        )

    def translate(self, y) -> "AtomSamples":
        shift, _ = as_points(y, self.dim)
        moved = AtomicMeasure(self.measure.points + shift[0], self.measure.weights)
        return AtomSamples(moved, self.values)

    def modulate(self, s) -> "AtomSamples":
        shift, _ = as_points(s, self.dim)
        phase = np.exp(2j * np.pi * (self.measure.points @ shift[0]))
        return AtomSamples(self.measure, self.values * phase)

    def __mul__(self, scalar) -> "AtomSamples":
        return AtomSamples(self.measure, self.values * complex(scalar))

    def __add__(self, other: "AtomSamples") -> "AtomSamples":
        if not isinstance(other, AtomSamples):
            return NotImplemented
        if not other.lives_on(self.measure):
            raise ValueError("Atom samples on different atoms cannot be added")
        return AtomSamples(self.measure, self.values + other.values)


@dataclass(frozen=True, eq=False)
class Modulated(TestFunction):
    """x -> exp(2 pi i s . x) base(x)."""

    base: TestFunction
    shift: np.ndarray

    kind = "modulated"

    def __post_init__(self):
        shift = np.array(self.shift, dtype=float).reshape(-1)
        if shift.size != self.base.dim:
            raise ValueError("Modulation shift must match the function dimension")
        shift.setflags(write=False)
        object.__setattr__(self, "shift", shift)

    @property
    def dim(self) -> int:
        return self.base.dim

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.exp(2j * np.pi * (x @ self.shift)) * self.base.evaluate(x)

    def breakpoints(self):
        return self.base.breakpoints()

    def modulate(self, s) -> "Modulated":
        shift, _ = as_points(s, self.dim)
        return Modulated(self.base, self.shift + shift[0])

    def translate(self, y) -> "Modulated":
        shift, _ = as_points(y, self.dim)
        phase = np.exp(-2j * np.pi * float(self.shift @ shift[0]))
        return Modulated(self.base.translate(shift[0]) * phase, self.shift)

    def __mul__(self, scalar) -> "Modulated":
        return Modulated(self.base * scalar, self.shift)

    def __add__(self, other: "Modulated") -> "Modulated":
        if not isinstance(other, Modulated) or not np.array_equal(self.shift, other.shift):
            return NotImplemented
        return Modulated(self.base + other.base, self.shift)


def modulated_box(box, T) -> Modulated:
    """g_T = e_{-T} chi_box."""
    indicator = SimpleFunction.indicator(box)
    shift = -np.atleast_1d(np.asarray(T, dtype=float))
    return Modulated(indicator, np.broadcast_to(shift, (indicator.dim,)))


def merged_breakpoints(*functions: TestFunction) -> Optional[List[np.ndarray]]:
    """Union of the per-axis breakpoints of several functions."""
    found = [f.breakpoints() for f in functions if f.breakpoints() is not None]
    if not found:
        return None
    dim = len(found[0])
    return [np.unique(np.concatenate([b[a] for b in found])) for a in range(dim)]


def random_function_like(
    rng: np.random.Generator, template: TestFunction
) -> TestFunction:
    """Random function of the same kind and support as template."""
    if isinstance(template, AtomSamples):
        return AtomSamples.random(rng, template.measure)
    if isinstance(template, TrigPolynomial):
        n = template.frequencies.shape[0]
        return TrigPolynomial(
            template.frequencies, rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
    if isinstance(template, SimpleFunction):
        shape = template.values.shape
        return SimpleFunction(
            template.edges, rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        )
    raise TypeError(f"No random counterpart for {template.kind} functions")


def atom_values(f: TestFunction, measure: AtomicMeasure) -> np.ndarray:
    """Values of f at the atoms of measure."""
    if isinstance(f, AtomSamples) and f.lives_on(measure):
        return np.asarray(f.values)
    return f.evaluate(measure.points)


__all__ = [
    "TestFunction",
    "TrigPolynomial",
    "SimpleFunction",
    "AtomSamples",
    "Modulated",
    "modulated_box",
    "merged_breakpoints",
    "random_function_like",
    "atom_values",
]
