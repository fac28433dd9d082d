"""
spectra.py - countable frequency sets
Deterministic shell-by-shell enumeration, truncation and bounded perturbation.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .measures import AtomicMeasure

logger = logging.getLogger(__name__)


def _drop_repeats(points: np.ndarray) -> np.ndarray:
    """Remove exact repeats keeping the first occurrence."""
    if points.shape[0] <= 1:
        return points
    _, first = np.unique(points, axis=0, return_index=True)
    return points[np.sort(first)]


class SpectrumSet(ABC):
    """
    Countable set of frequencies with a deterministic enumeration.

    Points come in shells; truncate(N) lists shells 0..N in order, so every
    truncation is a prefix of the next one.
    """

    kind = "spectrum"

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the frequencies."""

    @abstractmethod
    def labeled(self, level: int) -> Tuple[np.ndarray, np.ndarray]:
        """Points of shells 0..level with their shell index, in enumeration order."""

    def truncate(self, level: int) -> np.ndarray:
        """
        Finite truncation of the set.

        Args:
            level: Highest shell to include (>= 0)

        Returns:
            Array of shape (n, dim), repeats removed
        """
        if level < 0:
            raise ValueError(f"level must be >= 0, got {level}")
        points, _ = self.labeled(int(level))
        return _drop_repeats(points)

    def support_radius(self, level: int) -> float:
        points = self.truncate(level)
        return float(np.max(np.linalg.norm(points, axis=1)))


@dataclass(frozen=True)
class Lattice(SpectrumSet):
    """step * Z^d, enumerated by sup-norm shells, lexicographically within a shell."""

    dimension: int = 1
    step: float = 1.0

    kind = "lattice"

    def __post_init__(self):
        if self.dimension < 1 or self.step <= 0:
            raise ValueError("Lattice needs dimension >= 1 and step > 0")

    @property
    def dim(self) -> int:
        return self.dimension

    def labeled(self, level: int):
        axis = np.arange(-level, level + 1)
        grid = np.stack(np.meshgrid(*([axis] * self.dimension), indexing="ij"), axis=-1)
        grid = grid.reshape(-1, self.dimension)
        shells = np.max(np.abs(grid), axis=1)
        order = np.argsort(shells, kind="stable")
        return grid[order] * self.step, shells[order]


@dataclass(frozen=True)
class ShiftedUnion(SpectrumSet):
    """Union of base + shift over the shifts; shell s lists every shift's shell s in turn."""

    base: SpectrumSet
    shifts: Tuple[Tuple[float, ...], ...]

    kind = "shifted_union"

    def __post_init__(self):
        shifts = np.asarray(self.shifts, dtype=float).reshape(-1, self.base.dim)
        if shifts.shape[0] == 0:
            raise ValueError("At least one shift is required")
        object.__setattr__(self, "shifts", tuple(tuple(s) for s in shifts))

    @property
    def dim(self) -> int:
        return self.base.dim

    def labeled(self, level: int):
        points, shells = self.base.labeled(level)
        copies, copy_shells, copy_ids = [], [], []
        for index, shift in enumerate(self.shifts):
            copies.append(points + np.asarray(shift))
            copy_shells.append(shells)
            copy_ids.append(np.full(shells.shape[0], index))
        all_shells = np.concatenate(copy_shells)
        order = np.lexsort((np.concatenate(copy_ids), all_shells))
        return np.concatenate(copies)[order], all_shells[order]


@dataclass(frozen=True)
class DigitSet(SpectrumSet):
    """{sum_{m=0}^{k} b^m d_m : d_m in D}; level k holds the sums up to b^k."""

    base: int
    digits: Tuple[Tuple[float, ...], ...]

    kind = "digit_set"

    def __post_init__(self):
        digits = np.asarray(self.digits, dtype=float)
        if digits.ndim <= 1:
            digits = digits.reshape(-1, 1)
        if abs(self.base) < 2 or int(self.base) != self.base:
            raise ValueError("Digit base must be an integer with |b| >= 2")
        if not np.any(np.all(digits == 0, axis=1)):
            raise ValueError("Digit set must contain 0 so that levels are nested")
        object.__setattr__(self, "digits", tuple(tuple(d) for d in digits))

    @property
    def dim(self) -> int:
        return len(self.digits[0])

    def labeled(self, level: int):
        digits = np.asarray(self.digits)
        nonzero = digits[np.any(digits != 0, axis=1)]
        current = _drop_repeats(digits[np.lexsort(digits.T[::-1])])
        points, shells = [current], [np.zeros(current.shape[0], dtype=int)]
        for k in range(1, level + 1):
            fresh = (current[:, None, :] + float(self.base) ** k * nonzero[None, :, :])
            fresh = fresh.reshape(-1, self.dim)
            fresh = _drop_repeats(fresh[np.lexsort(fresh.T[::-1])])
            points.append(fresh)
            shells.append(np.full(fresh.shape[0], k))
            current = np.concatenate([current, fresh])
        return np.concatenate(points), np.concatenate(shells)


@dataclass(frozen=True)
class Explicit(SpectrumSet):
    """A finite list, all in shell 0."""

    points: Tuple[Tuple[float, ...], ...]

    kind = "explicit"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim <= 1:
            points = points.reshape(-1, 1)
        if points.shape[0] == 0:
            raise ValueError("Explicit spectrum needs at least one point")
        object.__setattr__(self, "points", tuple(tuple(p) for p in points))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def labeled(self, level: int):
        points = np.asarray(self.points)
        return points, np.zeros(points.shape[0], dtype=int)


@dataclass(frozen=True)
class Perturbed(SpectrumSet):
    """
    omega_n = lambda_n + u_n with u_n i.i.d. uniform on [-C, C]^d.

    Offsets are drawn from the seed in enumeration order, so the n-th offset does
    not depend on the truncation level.
    """

    base: SpectrumSet
    radius: float
    seed: int = 0

    kind = "perturbed"

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"Perturbation radius must be >= 0, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.base.dim

    def offsets(self, count: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(-self.radius, self.radius, size=(count, self.dim))

    def pairs(self, level: int) -> Tuple[np.ndarray, np.ndarray]:
        """(lambda_n, omega_n) over the truncation."""
        base = self.base.truncate(level)
        return base, base + self.offsets(base.shape[0])

    def labeled(self, level: int):
        points, shells = self.base.labeled(level)
        _, first = np.unique(points, axis=0, return_index=True)
        keep = np.sort(first)
        points, shells = points[keep], shells[keep]
        return points + self.offsets(points.shape[0]), shells

    def truncate(self, level: int) -> np.ndarray:
        if level < 0:
            raise ValueError(f"level must be >= 0, got {level}")
        return self.labeled(int(level))[0]

    def max_offset(self, level: int) -> float:
        """sup-norm of omega_n - lambda_n over the truncation."""
        base, moved = self.pairs(level)
        return float(np.max(np.abs(moved - base))) if base.size else 0.0


def truncate(spectrum: SpectrumSet, level: int) -> np.ndarray:
    """Points of the spectrum up to the given level."""
    return spectrum.truncate(level)


def perturb(spectrum: SpectrumSet, C: float, seed: int = 0) -> Perturbed:
    """Perturb every frequency by an independent uniform offset in [-C, C]^d."""
    return Perturbed(spectrum, float(C), int(seed))


def as_atomic_measure(
    spectrum: SpectrumSet, level: int, weights: Optional[Sequence[float]] = None
) -> AtomicMeasure:
    """
    sum over the truncation of w_lambda delta_lambda (unit weights by default).

    Raises:
        ValueError: when weights do not match the truncation length
    """
    points = spectrum.truncate(level)
    if weights is None:
        w = np.ones(points.shape[0])
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape[0] != points.shape[0]:
            raise ValueError(f"Got {w.shape[0]} weights for {points.shape[0]} frequencies")
    return AtomicMeasure(points, w)
