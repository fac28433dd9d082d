"""
catalog.py - worked examples with expected outcomes
Every entry runs end to end and compares its numbers with an expected value
within a recorded tolerance.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .bounds import (
    TrigFamily,
    bessel_functional,
    bessel_ratio,
    envelope_functional,
    estimate_bounds,
    holder_bound,
    lattice_interpolation_bound,
    riesz_thorin,
)
from .config import ConfigManager, get_config
from .constructions import RULE_CORNER, DiscretizationSpec, discretize, p_operator
from .errors import UnknownEntryError
from .functions import AtomSamples, SimpleFunction, TrigPolynomial, modulated_box
from .measures import (
    add_measures,
    atomic,
    dirac,
    lebesgue,
    lebesgue_window,
    piecewise_constant,
    self_similar,
    uniform,
)
from .quadrature import QuadratureSpec
from .sip import ExponentPair, norm_p
from .spectra import DigitSet, Explicit, Lattice, ShiftedUnion

logger = logging.getLogger(__name__)

IDENTITY = "identity"
BOUND = "bound"
DIVERGENCE = "divergence"
NO_FRAME = "no-frame"


@dataclass
class VerificationReport:
    """Outcome of one catalog entry."""

    id: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    truncation: Any = None
    runtime_ms: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "pass": self.passed,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "truncation": self.truncation,
            "runtime_ms": self.runtime_ms,
            "details": self.details,
        }


# runner(level, config) -> report without id and runtime filled in
Runner = Callable[[Optional[int], ConfigManager], VerificationReport]


@dataclass(frozen=True)
class CatalogEntry:
    """
    A worked example.

    Attributes:
        id: Stable identifier used by `catalog verify`
        description: One-line summary
        mu: Description of the measure carrying the test functions
        nu: Description of the frame measure or spectrum
        exponents: Exponents p the entry covers
        outcome: identity, bound, divergence or no-frame
        tolerance: Tolerance of the pass criterion
        schedule: Default truncation schedule
    """

    id: str
    description: str
    mu: str
    nu: str
    exponents: tuple
    outcome: str
    tolerance: float
    schedule: tuple
    runner: Runner = field(repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "description": self.description,
            "mu": self.mu,
            "nu": self.nu,
            "exponents": list(self.exponents),
            "outcome": self.outcome,
            "tolerance": self.tolerance,
            "schedule": list(self.schedule),
        }


_REGISTRY: Dict[str, CatalogEntry] = {}


def _entry(id: str, description: str, mu: str, nu: str, exponents, outcome: str,
           tolerance: float, schedule=()):
    def register(runner: Runner) -> Runner:
        _REGISTRY[id] = CatalogEntry(id, description, mu, nu, tuple(exponents), outcome,
                                     tolerance, tuple(schedule), runner)
        return runner

    return register


def _report(passed, measured, expected, tolerance, truncation=None,
            **details) -> VerificationReport:
    return VerificationReport("", bool(passed), float(measured), float(expected),
                              float(tolerance), truncation, 0.0, details)


def _is_nondecreasing(values, slack: float = 0.0) -> bool:
    return all(b >= a - slack for a, b in zip(values, values[1:]))


def _is_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _schedule(default: List[int], level: Optional[int]) -> List[int]:
    if level is None:
        return list(default)
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    return [s for s in default if s < level] + [int(level)]


# ---------------------------------------------------------------------------
# Entries
# ---------------------------------------------------------------------------

@_entry("two_atom", "Parseval identity of {e_0, e_1} for the two-atom measure",
        "1/2 (delta_0 + delta_1/2)", "{0, 1}", [2.0], IDENTITY, 1e-12)
def _two_atom(level, config):
    mu = atomic([0.0, 0.5], [0.5, 0.5], config=config)
    spectrum = Explicit([0.0, 1.0])
    e = ExponentPair(2.0)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        f = AtomSamples.random(rng, mu)
        residual = abs(bessel_functional(f, mu, spectrum, e, trunc=0) - norm_p(f, mu, e) ** 2)
        worst = max(worst, residual)
    return _report(worst < 1e-12, worst, 0.0, 1e-12, None, samples=1000)


@_entry("two_interval", "Z u (Z + 1/4) is a spectrum of 1/2 chi_[0,1]u[2,3]",
        "1/2 chi_[0,1]u[2,3] dx", "Z u (Z + 1/4)", [2.0], IDENTITY, 5e-5,
        [10, 100, 1000, 10000])
def _two_interval(level, config):
    mu = piecewise_constant([([[0.0, 1.0]], 0.5), ([[2.0, 3.0]], 0.5)])
    spectrum = ShiftedUnion(Lattice(1), [[0.0], [0.25]])
    e = ExponentPair(2.0)
    schedule = _schedule([10, 100, 1000, 10000], level)
    indicator = SimpleFunction.indicator([[0.0, 1.0]])

    sums = [bessel_functional(indicator, mu, spectrum, e, trunc=n) for n in schedule]
    # tail of sum 1/(8 pi^2 (n + 1/4)^2) beyond the window
    tolerance = max(5e-5, 1.0 / (4.0 * math.pi ** 2 * (schedule[-1] - 1)))
    final = sums[-1]
    passed = (0.5 - tolerance <= final <= 0.5 + 1e-12) and _is_nondecreasing(sums, 1e-15)

    battery = {
        "one": TrigPolynomial.constant(1.0),
        "e_1 - e_-2 / 2": TrigPolynomial([[1.0], [-2.0]], [1.0, -0.5]),
    }
    residuals = {}
    for name, f in battery.items():
        ratio = bessel_ratio(f, mu, spectrum, e, trunc=min(schedule[-1], 100), config=config)
        residuals[name] = abs(ratio - 1.0)
    passed = passed and all(r < 1e-9 for r in residuals.values())
    return _report(passed, final, 0.5, tolerance, schedule[-1],
                   sums=dict(zip(schedule, sums)), battery_residuals=residuals)


@_entry("unit_cube_lattice", "Hausdorff-Young on [0,1]^d with the integer lattice",
        "chi_[0,1]^d dx (d = 1, 2)", "Z^d", [1.25, 1.5, 2.0], BOUND, 1e-9, [64])
def _unit_cube_lattice(level, config):
    level = 64 if level is None else int(level)
    rng = np.random.default_rng(1)
    ps = [1.25, 1.5, 2.0]
    worst = 0.0
    violations = 0
    cases = [
        (lebesgue([[0.0, 1.0]]), Lattice(1), 32, level, 200),
        (lebesgue([[0.0, 1.0], [0.0, 1.0]], QuadratureSpec(16, 8)), Lattice(2), 4, 8, 20),
    ]
    for mu, spectrum, degree, trunc, count in cases:
        for _ in range(count):
            f = TrigPolynomial.random(rng, degree, mu.dim, terms=8)
            for p in ps:
                ratio = bessel_ratio(f, mu, spectrum, ExponentPair(p), trunc=trunc, config=config)
                worst = max(worst, ratio)
                violations += ratio > 1.0 + 1e-9
    return _report(violations == 0, worst, 1.0, 1e-9, level, violations=violations,
                   functions={"d=1": 200, "d=2": 20})


@_entry("cantor4", "Parseval sums of the quarter Cantor measure over its digit spectrum",
        "mu_4 (R = 4, digits {0, 2})", "{sum 4^k d_k : d_k in {0, 1}}", [2.0], IDENTITY,
        1e-9, range(1, 9))
def _cantor4(level, config):
    top = 8 if level is None else int(level)
    mu = self_similar([[4]], [[0], [2]])
    spectrum = DigitSet(4, [[0], [1]])
    e = ExponentPair(2.0)
    one = TrigPolynomial.constant(1.0)
    half = TrigPolynomial.character([0.5])
    levels = list(range(1, top + 1))
    sums = [bessel_functional(one, mu, spectrum, e, trunc=k) for k in levels]
    evidence = [bessel_functional(half, mu, spectrum, e, trunc=k) for k in levels]
    final = sums[-1]
    # sums for e_1/2 increase towards ||e_1/2||^2 = 1
    half_bounded = _is_nondecreasing(evidence, 1e-15) and max(evidence) <= 1.0 + 1e-9
    half_grows = top < 2 or evidence[-1] > evidence[0]
    passed = (_is_nondecreasing(sums) and max(sums) <= 1.0 + 1e-9 and final >= 1.0 - 1e-9
              and half_bounded and half_grows)
    return _report(passed, final, 1.0, 1e-9, top,
                   sums=dict(zip(levels, sums)),
                   e_half=dict(zip(levels, evidence)),
                   e_half_bounded=bool(half_bounded),
                   e_half_grows=bool(half_grows))


@_entry("dirac_tight", "Every nu is a tight frame measure for delta_0 with bound mass(nu)",
        "delta_0", "3 atoms of total mass m", [1.5, 2.0, 4.0], IDENTITY, 1e-12)
def _dirac_tight(level, config):
    mu = dirac(0.0)
    rng = np.random.default_rng(2)
    worst = 0.0
    for m in (0.5, 1.0, 3.0):
        nu = atomic([-1.3, 0.4, 2.7], m * np.array([0.2, 0.3, 0.5]), config=config)
        for p in (1.5, 2.0, 4.0):
            e = ExponentPair(p)
            for _ in range(100):
                f = AtomSamples.random(rng, mu)
                worst = max(worst, abs(bessel_ratio(f, mu, nu, e, config=config) - m) / m)
    return _report(worst < 1e-12, worst, 0.0, 1e-12, None, masses=[0.5, 1.0, 3.0])


@_entry("lebesgue_plancherel", "Windowed Plancherel for trig polynomials on [0,1]",
        "chi_[0,1] dx", "Lebesgue measure on [-T, T]", [2.0], IDENTITY, 0.05,
        [8, 16, 32, 64])
def _lebesgue_plancherel(level, config):
    windows = _schedule([8, 16, 32, 64], level)
    mu = lebesgue([[0.0, 1.0]])
    rng = np.random.default_rng(3)
    two, three_halves = ExponentPair(2.0), ExponentPair(1.5)
    top = lebesgue_window(windows[-1])
    furthest = 1.0
    monotone = True
    hausdorff_young = {}
    for index in range(5):
        f = TrigPolynomial.random(rng, 8)
        norm_sq = norm_p(f, mu, two) ** 2
        values = [bessel_functional(f, mu, lebesgue_window(T), two) / norm_sq for T in windows]
        monotone = monotone and _is_nondecreasing(values)
        if abs(values[-1] - 1.0) > abs(furthest - 1.0):
            furthest = values[-1]
        hausdorff_young[index] = bessel_ratio(f, mu, top, three_halves, config=config)
    passed = monotone and abs(furthest - 1.0) <= 0.05
    return _report(passed, furthest, 1.0, 0.05, windows[-1], monotone=monotone,
                   p_1_5_ratio=hausdorff_young)


@_entry("no_frame_counterexample", "chi_[0,1] dx + delta_2 has no frame measure",
        "chi_[0,1] dx + delta_2", "normalized Lebesgue on [-10, 10]", [2.0], NO_FRAME, 0.01,
        [1, 10, 100])
def _no_frame(level, config):
    mu = add_measures(lebesgue([[0.0, 1.0]]), dirac(2.0), config=config)
    nu = uniform([[-10.0, 10.0]])
    e = ExponentPair(2.0)
    ratios = [bessel_ratio(modulated_box([[0.0, 1.0]], T), mu, nu, e, config=config)
              for T in (1, 10, 100)]
    atom = bessel_ratio(SimpleFunction.indicator([[1.5, 2.5]]), mu, nu, e, config=config)
    floor = 0.5 * nu.mass()
    passed = _is_decreasing(ratios) and ratios[-1] < 0.01 and atom >= floor
    return _report(passed, ratios[-1], 0.0, 0.01, None,
                   g_T=dict(zip([1, 10, 100], ratios)), atom_ratio=atom, atom_floor=floor)


@_entry("p_gt_2_divergence", "sum |c_n|^(2-eps) diverges for c_n = n^-1/2 (log n)^-2",
        "-", "-", [1.8], DIVERGENCE, 0.0, [1000 * 2 ** k for k in range(11)])
def _p_gt_2(level, config):
    doublings = 10 if level is None else int(level)
    schedule = [1000 * 2 ** k for k in range(doublings + 1)]
    n = np.arange(2, schedule[-1] + 1, dtype=float)
    c = n ** -0.5 * np.log(n) ** -2.0

    def partial_sums(eps: float) -> np.ndarray:
        cumulative = np.cumsum(np.abs(c) ** (2.0 - eps))
        return np.array([cumulative[N - 2] for N in schedule])

    divergent = partial_sums(0.2)
    convergent = partial_sums(0.0)
    growth = np.diff(divergent)
    # doubling increments of the divergent series outpace the square-summable ones
    ratios = growth / np.diff(convergent)
    passed = bool(np.all(growth > 0) and np.all(np.diff(ratios) > 0))
    return _report(passed, float(divergent[-1]), float(divergent[0]), 0.0, doublings,
                   partial_sums=dict(zip(schedule, divergent.tolist())),
                   increment_ratios=ratios.tolist())


@_entry("holder_random_pairs", "Hoelder bound mass(mu) mass(nu) dominates the estimate",
        "random atomic", "random atomic", [1.5, 2.0, 3.0], BOUND, 1e-9)
def _holder_pairs(level, config):
    rng = np.random.default_rng(4)
    worst = -math.inf
    violations = 0
    for pair in range(50):
        mu = atomic(rng.uniform(-2, 2, int(rng.integers(1, 6))), config=config)
        mu = mu.scale(float(rng.uniform(0.2, 2.0)))
        nu = atomic(rng.uniform(-5, 5, int(rng.integers(1, 7))), config=config)
        for p in (1.5, 2.0, 3.0):
            e = ExponentPair(p)
            certificate = holder_bound(mu, nu, e)
            estimate = estimate_bounds(mu, nu, e, budget=4, seed=pair, refine_steps=5,
                                       max_workers=1, config=config)
            slack = estimate.upper_hat - certificate.upper
            worst = max(worst, slack)
            violations += slack > 1e-9
    return _report(violations == 0, worst, 0.0, 1e-9, None, pairs=50, violations=violations)


@_entry("riesz_thorin_lattice", "Interpolated bound at (4/3, 4) on the unit interval",
        "chi_[0,1] dx", "Z", [4.0 / 3.0], BOUND, 1e-9, [32])
def _riesz_thorin_lattice(level, config):
    trunc = 32 if level is None else int(level)
    e, certificate = riesz_thorin(ExponentPair(1.0), 1.0, ExponentPair(2.0), 1.0, 0.5)
    lattice = lattice_interpolation_bound(1.0, e.p)
    estimate = estimate_bounds(lebesgue([[0.0, 1.0]]), Lattice(1), e,
                               family=TrigFamily(1, window=8, terms=4, config=config),
                               budget=8, seed=0, trunc=trunc, refine_steps=10, max_workers=1,
                               config=config)
    passed = (abs(e.p - 4.0 / 3.0) < 1e-12 and abs(e.q - 4.0) < 1e-12
              and certificate.upper <= 1.0 + 1e-12
              and estimate.upper_hat <= certificate.upper + 1e-9)
    return _report(passed, estimate.upper_hat, certificate.upper, 1e-9, trunc,
                   p=e.p, q=e.q, certificate=certificate.to_dict(),
                   lattice_certificate=lattice.to_dict())


@_entry("discretization_sandwich", "Discretized Lebesgue measure stays within the envelopes",
        "1/2 chi_[0,1]u[2,3] dx", "Lebesgue on [-20, 20] and its discretizations",
        [2.0], BOUND, 1e-12, [1.0, 0.5, 0.25])
def _discretization(level, config):
    mu = piecewise_constant([([[0.0, 1.0]], 0.5), ([[2.0, 3.0]], 0.5)])
    nu = lebesgue([[-20.0, 20.0]], QuadratureSpec(8, 4))
    e = ExponentPair(2.0)
    rng = np.random.default_rng(5)
    functions = [TrigPolynomial.random(rng, 4, terms=4) for _ in range(50)]
    violations = 0
    gaps = {}
    masses = {}
    for r in (1.0, 0.5, 0.25):
        spec = DiscretizationSpec(r, RULE_CORNER)
        nu_prime = discretize(nu, spec)
        masses[r] = nu_prime.mass()
        total_gap = 0.0
        for f in functions:
            low, high = envelope_functional(f, mu, nu, e, spec.reach(1), probes=9,
                                            config=config)
            value = bessel_functional(f, mu, nu_prime, e)
            slack = 1e-12 * max(1.0, high)
            violations += not (low - slack <= value <= high + slack)
            total_gap += high - low
        gaps[r] = total_gap / len(functions)
    shrinking = _is_decreasing([gaps[r] for r in (1.0, 0.5, 0.25)])
    passed = violations == 0 and shrinking
    return _report(passed, violations, 0.0, 1e-12, None, mean_gap=gaps, masses=masses,
                   functions=len(functions))


@_entry("p_operator_contraction", "The P-operator does not increase L^p norms",
        "random atomic probability", "random atomic probability", [1.5, 2.0, 3.0], BOUND,
        1e-12)
def _p_operator(level, config):
    rng = np.random.default_rng(6)
    worst = -math.inf
    equality = 0.0
    for _ in range(25):
        mu = atomic(rng.uniform(-1, 1, int(rng.integers(1, 6))), config=config)
        mu = mu.scale(1.0 / mu.mass())
        mu_prime = atomic(rng.uniform(-1, 1, int(rng.integers(1, 6))), config=config)
        mu_prime = mu_prime.scale(1.0 / mu_prime.mass())
        for _ in range(20):
            f = AtomSamples.random(rng, mu)
            moved = p_operator(f, mu, mu_prime, config)
            shifted = p_operator(f, mu, dirac(0.0), config)
            for p in (1.5, 2.0, 3.0):
                e = ExponentPair(p)
                before = norm_p(f, mu, e)
                worst = max(worst, norm_p(moved, moved.measure, e) - before)
                equality = max(equality,
                               abs(norm_p(shifted, shifted.measure, e) - before) / before)
    passed = worst <= 1e-12 and equality <= 1e-12
    return _report(passed, worst, 0.0, 1e-12, None, functions=500, delta_0_residual=equality)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def list_entries() -> List[CatalogEntry]:
    """All catalog entries in registration order."""
    return list(_REGISTRY.values())


def get_entry(entry_id: str) -> CatalogEntry:
    """
    Look up an entry.

    Raises:
        UnknownEntryError: no entry with that id
    """
    try:
        return _REGISTRY[entry_id]
    except KeyError:
        raise UnknownEntryError(f"Unknown catalog entry: {entry_id}") from None


def verify(entry_id: str, level: Optional[int] = None,
           config: ConfigManager = None) -> VerificationReport:
    """
    Run one entry and compare it with its expected outcome.

    Args:
        entry_id: Catalog id
        level: Truncation override (meaning depends on the entry)
        config: Configuration

    Returns:
        VerificationReport
    """
    entry = get_entry(entry_id)
    config = config or get_config()
    logger.info(f"Verifying {entry_id}")
    started = time.perf_counter()
    report = entry.runner(level, config)
    report.id = entry_id
    report.runtime_ms = round((time.perf_counter() - started) * 1000.0, 3)
    logger.info(f"{entry_id}: {'pass' if report.passed else 'FAIL'} "
                f"(measured {report.measured:.6g}, {report.runtime_ms:.0f} ms)")
    return report


__all__ = [
    "CatalogEntry",
    "VerificationReport",
    "list_entries",
    "get_entry",
    "verify",
]
