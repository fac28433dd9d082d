"""
codec.py - JSON specifications
Encode and decode measures, spectra, test functions and certificates.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from ..core.bounds import BoundCertificate
from ..core.config import ConfigManager, get_config
from ..core.errors import SpecParseError, UnsupportedKindError
from ..core.functions import AtomSamples, Modulated, SimpleFunction, TestFunction, TrigPolynomial
from ..core.measures import (
    AtomicMeasure,
    ConvolutionMeasure,
    DensityMeasure,
    EmbeddedMeasure,
    Measure,
    SelfSimilarMeasure,
    SumMeasure,
    piecewise_constant,
    self_similar,
    tabulated,
)
from ..core.quadrature import QuadratureSpec
from ..core.spectra import DigitSet, Explicit, Lattice, Perturbed, ShiftedUnion, SpectrumSet

logger = logging.getLogger(__name__)

MEASURE_KINDS = ("atomic", "density", "ifs", "convolution", "sum", "embedded")
SPECTRUM_KINDS = ("lattice", "shifted_union", "digit_set", "explicit", "perturbed")
FUNCTION_KINDS = ("trig", "simple", "atoms", "modulated")

TABULATION_POINTS_PER_UNIT = 256


def _floats(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def _complex_pairs(values) -> list:
    values = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in values]


def _complex_from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim == 1:
        return arr.astype(complex)
    return arr[:, 0] + 1j * arr[:, 1]


def _number(value) -> Any:
    if value is None:
        return None
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def measure_to_dict(m: Measure) -> Dict[str, Any]:
    """
    JSON-ready dict of a measure.

    Opaque 1-d densities are written as samples on a grid of 256 points per unit.

    Raises:
        UnsupportedKindError: opaque densities in more than one dimension
    """
    if isinstance(m, AtomicMeasure):
        return {
            "kind": "atomic",
            "atoms": [[_floats(x), float(w)] for x, w in zip(m.points, m.weights)],
        }
    if isinstance(m, DensityMeasure):
        out: Dict[str, Any] = {"kind": "density", "box": _floats(m.box)}
        if m.pieces is not None:
            out["pieces"] = [{"box": _floats(p.box), "value": p.value} for p in m.pieces]
        elif m.samples is not None:
            out["grid"] = _floats(m.samples[0])
            out["samples"] = _floats(m.samples[1])
        elif m.dim == 1:
            lo, hi = m.box[0]
            count = max(2, int(math.ceil((hi - lo) * TABULATION_POINTS_PER_UNIT)) + 1)
            grid = np.linspace(lo, hi, count)
            out["grid"] = _floats(grid)
            out["samples"] = _floats(m.density_at(grid.reshape(-1, 1)))
            logger.info(f"Density written as {count} samples")
        else:
            raise UnsupportedKindError("Opaque densities in d >= 2 cannot be serialized")
        out["quadrature"] = m.quadrature.to_dict()
        return out
    if isinstance(m, SelfSimilarMeasure):
        out = {
            "kind": "ifs",
            "R": _floats(m.matrix),
            "digits": _floats(m.digits),
            "weights": _floats(m.weights),
        }
        if m.depth is not None:
            out["depth"] = int(m.depth)
        if m.total_mass != 1.0:
            out["mass"] = float(m.total_mass)
        return out
    if isinstance(m, ConvolutionMeasure):
        return {"kind": "convolution", "left": measure_to_dict(m.left),
                "right": measure_to_dict(m.right)}
    if isinstance(m, SumMeasure):
        return {"kind": "sum", "terms": [measure_to_dict(t) for t in m.terms]}
    if isinstance(m, EmbeddedMeasure):
        return {"kind": "embedded", "dim": m.ambient, "axes": list(m.axes),
                "base": measure_to_dict(m.base)}
    raise UnsupportedKindError(f"Cannot serialize {m.kind} measures")


def _quadrature(spec: Dict, config: ConfigManager) -> QuadratureSpec:
    q = spec.get("quadrature")
    if q is None:
        return QuadratureSpec.from_config(config)
    return QuadratureSpec(int(q["panels_per_unit"]), int(q["nodes_per_panel"]))


def _density_from_dict(spec: Dict, config: ConfigManager) -> DensityMeasure:
    quadrature = _quadrature(spec, config)
    if "pieces" in spec:
        pieces = [(p["box"], p["value"]) for p in spec["pieces"]]
        return piecewise_constant(pieces, spec.get("box"), quadrature)
    if "breakpoints" in spec:
        edges = np.asarray(spec["breakpoints"], dtype=float)
        values = np.asarray(spec["values"], dtype=float)
        if edges.ndim != 1 or values.shape != (edges.size - 1,):
            raise SpecParseError("Density breakpoints need one value per interval")
        pieces = [([[lo, hi]], v) for lo, hi, v in zip(edges[:-1], edges[1:], values) if v != 0]
        return piecewise_constant(pieces, [[edges[0], edges[-1]]], quadrature)
    if "samples" in spec:
        return tabulated(spec["grid"], spec["samples"], quadrature)
    raise SpecParseError("Density needs pieces, breakpoints/values or grid/samples")


def measure_from_dict(spec: Dict, config: ConfigManager = None) -> Measure:
    """
    Build a measure from its JSON dict.

    Densities without an explicit quadrature, self-similar tail settings and
    the lazy convolution budget are taken from config.

    Raises:
        SpecParseError: malformed specification
    """
    config = config or get_config()
    try:
        kind = spec["kind"]
        if kind == "atomic":
            points = [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in spec["atoms"]]
            weights = [float(w) for _, w in spec["atoms"]]
            return AtomicMeasure(np.stack(points), weights)
        if kind == "density":
            return _density_from_dict(spec, config)
        if kind == "ifs":
            return self_similar(
                spec["R"], spec["digits"], spec["weights"], spec.get("depth"),
                float(spec.get("mass", 1.0)), config,
            )
        if kind == "convolution":
            return ConvolutionMeasure(measure_from_dict(spec["left"], config),
                                      measure_from_dict(spec["right"], config),
                                      config.get_batch_budget())
        if kind == "sum":
            return SumMeasure(tuple(measure_from_dict(t, config) for t in spec["terms"]))
        if kind == "embedded":
            return EmbeddedMeasure(measure_from_dict(spec["base"], config), tuple(spec["axes"]),
                                   int(spec["dim"]))
    except SpecParseError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise SpecParseError(f"Invalid {spec.get('kind', '?')} measure: {e}") from e
    raise SpecParseError(f"Unknown measure kind: {kind}")


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def spectrum_to_dict(s: SpectrumSet) -> Dict[str, Any]:
    """JSON-ready dict of a spectrum."""
    if isinstance(s, Lattice):
        return {"kind": "lattice", "dim": s.dimension, "step": s.step}
    if isinstance(s, ShiftedUnion):
        return {"kind": "shifted_union", "base": spectrum_to_dict(s.base),
                "shifts": [list(v) for v in s.shifts]}
    if isinstance(s, DigitSet):
        return {"kind": "digit_set", "base": int(s.base), "digits": [list(d) for d in s.digits]}
    if isinstance(s, Explicit):
        return {"kind": "explicit", "points": [list(p) for p in s.points]}
    if isinstance(s, Perturbed):
        return {"kind": "perturbed", "base": spectrum_to_dict(s.base), "C": s.radius,
                "seed": s.seed}
    raise UnsupportedKindError(f"Cannot serialize {s.kind} spectra")


def spectrum_from_dict(spec: Dict) -> SpectrumSet:
    """
    Build a spectrum from its JSON dict.

    Raises:
        SpecParseError: malformed specification
    """
    try:
        kind = spec["kind"]
        if kind == "lattice":
            return Lattice(int(spec.get("dim", 1)), float(spec.get("step", 1.0)))
        if kind == "shifted_union":
            return ShiftedUnion(spectrum_from_dict(spec["base"]), spec["shifts"])
        if kind == "digit_set":
            return DigitSet(int(spec["base"]), spec["digits"])
        if kind == "explicit":
            return Explicit(spec["points"])
        if kind == "perturbed":
            return Perturbed(spectrum_from_dict(spec["base"]), float(spec["C"]),
                             int(spec.get("seed", 0)))
    except SpecParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SpecParseError(f"Invalid {spec.get('kind', '?')} spectrum: {e}") from e
    raise SpecParseError(f"Unknown spectrum kind: {kind}")


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

def function_to_dict(f: TestFunction) -> Dict[str, Any]:
    """JSON-ready dict of a test function; complex numbers as [re, im]."""
    if isinstance(f, TrigPolynomial):
        pairs = zip(f.frequencies, _complex_pairs(f.coefficients))
        return {"kind": "trig", "terms": [[_floats(xi), c] for xi, c in pairs]}
    if isinstance(f, SimpleFunction):
        return {"kind": "simple", "edges": [_floats(e) for e in f.edges],
                "values": _complex_pairs(f.values)}
    if isinstance(f, AtomSamples):
        return {"kind": "atoms", "measure": measure_to_dict(f.measure),
                "values": _complex_pairs(f.values)}
    if isinstance(f, Modulated):
        return {"kind": "modulated", "shift": _floats(f.shift), "base": function_to_dict(f.base)}
    raise UnsupportedKindError(f"Cannot serialize {f.kind} functions")


def function_from_dict(spec: Dict, config: ConfigManager = None) -> TestFunction:
    """
    Build a test function from its JSON dict.

    Raises:
        SpecParseError: malformed specification
    """
    try:
        kind = spec["kind"]
        if kind == "trig":
            freqs = np.stack([np.atleast_1d(np.asarray(xi, dtype=float))
                              for xi, _ in spec["terms"]])
            coefficients = _complex_from_pairs([c for _, c in spec["terms"]])
            return TrigPolynomial(freqs, coefficients)
        if kind == "simple":
            edges = tuple(spec["edges"])
            return SimpleFunction(edges, _complex_from_pairs(spec["values"]))
        if kind == "atoms":
            measure = measure_from_dict(spec["measure"], config)
            return AtomSamples(measure, _complex_from_pairs(spec["values"]))
        if kind == "modulated":
            return Modulated(function_from_dict(spec["base"], config), spec["shift"])
    except SpecParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SpecParseError(f"Invalid {spec.get('kind', '?')} function: {e}") from e
    raise SpecParseError(f"Unknown function kind: {kind}")


# ---------------------------------------------------------------------------
# Certificates and files
# ---------------------------------------------------------------------------

def certificate_to_dict(certificate: BoundCertificate) -> Dict[str, Any]:
    return certificate.to_dict()


def decode(spec: Dict, config: ConfigManager = None) -> Union[Measure, SpectrumSet]:
    """Measure or spectrum, chosen by the kind field."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecParseError("Specification must be an object with a 'kind' field")
    if spec["kind"] in SPECTRUM_KINDS:
        return spectrum_from_dict(spec)
    return measure_from_dict(spec, config)


def load_json(path: Union[str, Path]) -> Dict:
    """
    Read a JSON file.

    Raises:
        SpecParseError: missing file or invalid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise SpecParseError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise SpecParseError(f"Invalid JSON in {path}: {e}") from e


def load_spec(path: Union[str, Path], config: ConfigManager = None) -> Union[Measure, SpectrumSet]:
    return decode(load_json(path), config)


def load_measure(path: Union[str, Path], config: ConfigManager = None) -> Measure:
    spec = load_json(path)
    if not isinstance(spec, dict) or spec.get("kind") not in MEASURE_KINDS:
        raise SpecParseError(f"{path} does not hold a measure specification")
    return measure_from_dict(spec, config)


def encode(obj) -> Dict[str, Any]:
    """Dict of a measure, spectrum, function or certificate."""
    if isinstance(obj, Measure):
        return measure_to_dict(obj)
    if isinstance(obj, SpectrumSet):
        return spectrum_to_dict(obj)
    if isinstance(obj, TestFunction):
        return function_to_dict(obj)
    if isinstance(obj, BoundCertificate):
        return certificate_to_dict(obj)
    raise UnsupportedKindError(f"Cannot serialize {type(obj).__name__}")
