"""
quadrature.py - composite Gauss-Legendre rules on boxes
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .config import ConfigManager, get_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """Panels per unit length (per axis) and Gauss-Legendre nodes per panel."""

    panels_per_unit: int = 64
    nodes_per_panel: int = 8

    def __post_init__(self):
        if self.panels_per_unit < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels_per_unit and nodes_per_panel must be >= 1")

    @classmethod
    def from_config(cls, config: ConfigManager = None) -> "QuadratureSpec":
        config = config or get_config()
        return cls(config.get_panels_per_unit(), config.get_nodes_per_panel())

    def to_dict(self) -> dict:
        return {"panels_per_unit": self.panels_per_unit, "nodes_per_panel": self.nodes_per_panel}


@lru_cache(maxsize=32)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    return np.asarray(nodes, dtype=float), np.asarray(weights, dtype=float)


def panel_edges(
    lo: float, hi: float, panels_per_unit: int, breakpoints: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    Uniform panel edges on [lo, hi] refined by breakpoints inside the interval.

    Args:
        lo: Left end
        hi: Right end
        panels_per_unit: Panels per unit length
        breakpoints: Extra edges (piece boundaries, cell edges)

    Returns:
        Sorted edge array including both ends
    """
    if hi <= lo:
        return np.array([lo, lo])
    count = max(1, int(math.ceil(panels_per_unit * (hi - lo) - 1e-9)))
    edges = np.linspace(lo, hi, count + 1)
    if breakpoints is not None and len(breakpoints):
        extra = np.asarray(breakpoints, dtype=float)
        extra = extra[(extra > lo) & (extra < hi)]
        edges = np.union1d(edges, extra)
    gap = 1e-13 * max(1.0, abs(lo), abs(hi))
    keep = np.concatenate([[True], np.diff(edges) > gap])
    edges = edges[keep]
    edges[-1] = hi
    return edges


def rule_1d(
    lo: float,
    hi: float,
    spec: QuadratureSpec,
    breakpoints: Optional[Sequence[float]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    if hi <= lo:
        return np.empty(0), np.empty(0)
    edges = panel_edges(lo, hi, spec.panels_per_unit, breakpoints)
    ref_x, ref_w = _reference_rule(spec.nodes_per_panel)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def tensor_rule(
    box: np.ndarray,
    spec: QuadratureSpec,
    breakpoints: Optional[Sequence[Optional[Sequence[float]]]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tensor-product composite rule on a box.

    Args:
        box: Array of shape (d, 2) with [lo, hi] per axis
        spec: Quadrature spec
        breakpoints: Per-axis breakpoint lists (or None)

    Returns:
        Nodes of shape (M, d) and weights of shape (M,)
    """
    box = np.asarray(box, dtype=float)
    dim = box.shape[0]
    axes_x, axes_w = [], []
    for axis in range(dim):
        extra = breakpoints[axis] if breakpoints is not None else None
        x, w = rule_1d(box[axis, 0], box[axis, 1], spec, extra)
        axes_x.append(x)
        axes_w.append(w)

    if any(x.size == 0 for x in axes_x):
        return np.empty((0, dim)), np.empty(0)

    grids = np.meshgrid(*axes_x, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = axes_w[0]
    for w in axes_w[1:]:
        weights = np.multiply.outer(weights, w).ravel()
    logger.debug(f"Tensor rule on {dim}-d box: {nodes.shape[0]} nodes")
    return nodes, weights
