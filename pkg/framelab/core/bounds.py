"""
bounds.py - (p,q)-Bessel and frame bounds
The Bessel functional, empirical bound estimation over test families and
certified bound calculators conditional on declared premises.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..utils import parallel_map
from .config import ConfigManager, get_config
from .errors import DegenerateFunctionError, UnsupportedKindError
from .functions import AtomSamples, TestFunction, TrigPolynomial, modulated_box
from .measures import (
    AtomicMeasure,
    DensityMeasure,
    Measure,
    SelfSimilarMeasure,
    as_points,
)
from .sip import (
    ExponentPair,
    fourier_coefficient,
    interpolated_exponent,
    interpolation_parameter,
    norm_p,
    semi_inner_product,
    sup_norm_transform,
)
from .spectra import SpectrumSet, as_atomic_measure

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 16

HOLDER = "Hölder"
RIESZ_THORIN = "RieszThorin"
PERTURBATION = "Perturbation"
SCALING = "Scaling"
CONVOLUTION_CLOSURE = "ConvolutionClosure"
DECONVOLUTION = "Deconvolution"
BUDGETED = "Budgeted"
WEIGHTED_EXPONENTIAL = "WeightedExponential"

RULES = (
    HOLDER,
    RIESZ_THORIN,
    PERTURBATION,
    SCALING,
    CONVOLUTION_CLOSURE,
    DECONVOLUTION,
    BUDGETED,
    WEIGHTED_EXPONENTIAL,
)

SAMPLE_COLUMNS = [
    "family_id",
    "sample_index",
    "p",
    "q",
    "truncation",
    "functional",
    "norm_q_power",
    "ratio",
]

SpectrumOrMeasure = Union[Measure, SpectrumSet]


def _json_number(value: Optional[float]):
    if value is None:
        return None
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

@dataclass
class BoundCertificate:
    """
    A frame/Bessel bound valid conditionally on its recorded premises.

    Attributes:
        rule: One of RULES
        upper: Bessel bound B (None when the rule gives none)
        lower: Frame bound A (None when the rule gives none)
        exponents: Exponent pair the bounds refer to
        premises: Input bounds and constants, recorded verbatim
        notes: Free-form remark
    """

    rule: str
    upper: Optional[float] = None
    lower: Optional[float] = None
    exponents: Optional[ExponentPair] = None
    premises: Dict[str, Any] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"Unknown certificate rule: {self.rule}")

    def to_dict(self) -> Dict[str, Any]:
        premises = {
            k: _json_number(v) if isinstance(v, (float, np.floating)) else v
            for k, v in self.premises.items()
        }
        return {
            "rule": self.rule,
            "bounds": {"lower": _json_number(self.lower), "upper": _json_number(self.upper)},
            "exponents": None if self.exponents is None else self.exponents.to_dict(),
            "premises": premises,
            "notes": self.notes,
        }


@dataclass
class BoundEstimate:
    """Empirical inner estimates of the optimal frame bounds."""

    lower_hat: float
    upper_hat: float
    sample_count: int
    family: str
    exponents: ExponentPair
    truncation: Dict[str, Any]
    seed: int
    samples: pd.DataFrame = field(repr=False, default_factory=pd.DataFrame)
    upper_function: Optional[TestFunction] = field(repr=False, default=None)
    lower_function: Optional[TestFunction] = field(repr=False, default=None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower_hat": self.lower_hat,
            "upper_hat": self.upper_hat,
            "sample_count": self.sample_count,
            "family": self.family,
            "exponents": self.exponents.to_dict(),
            "truncation": self.truncation,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# The functional
# ---------------------------------------------------------------------------

def resolve_nu(nu: SpectrumOrMeasure, trunc: Optional[int] = None) -> Tuple[Measure, Dict]:
    """
    Turn a spectrum into its truncated unit-weight atomic measure.

    Returns:
        (measure, truncation metadata)
    """
    if isinstance(nu, SpectrumSet):
        level = DEFAULT_TRUNCATION if trunc is None else int(trunc)
        measure = as_atomic_measure(nu, level)
        return measure, {"level": level, "atoms": len(measure)}
    meta = {"kind": nu.kind}
    if isinstance(nu, AtomicMeasure):
        meta["atoms"] = len(nu)
    return nu, meta


def bessel_functional(
    f: TestFunction,
    mu: Measure,
    nu: SpectrumOrMeasure,
    e: ExponentPair,
    trunc: Optional[int] = None,
) -> float:
    """
    integral |(f dmu)^(t)|^q dnu(t).

    For atomic nu this is the q-Bessel sum sum_lambda w_lambda |[f, e_lambda]|^q;
    density nu is integrated on its quadrature nodes.

    Args:
        f: Test function
        mu: Measure carrying f
        nu: Measure, or a spectrum truncated at `trunc`
        e: Exponent pair with p > 1
        trunc: Truncation level when nu is a spectrum

    Raises:
        ValueError: for p = 1
    """
    if e.is_endpoint:
        raise ValueError("The (1, inf) case has no integral functional; use sup_norm_transform")
    nu, _ = resolve_nu(nu, trunc)
    X, W = nu.nodes()
    values = np.abs(fourier_coefficient(f, X, mu))
    return float(W @ values ** e.q)


def endpoint_functional(
    f: TestFunction,
    mu: Measure,
    nu: SpectrumOrMeasure,
    window=None,
    trunc: Optional[int] = None,
    config: ConfigManager = None,
) -> float:
    """sup_t |(f dmu)^(t)| over the atoms of nu, or over the window grid otherwise."""
    nu, _ = resolve_nu(nu, trunc)
    if isinstance(nu, AtomicMeasure):
        return float(np.max(np.abs(fourier_coefficient(f, nu.points, mu))))
    if window is None:
        try:
            window = nu.bounding_box()
        except UnsupportedKindError:
            window = None
    return sup_norm_transform(f, mu, window=window, config=config)


class Sample(NamedTuple):
    functional: float
    norm: float
    norm_q_power: float
    ratio: float

    def normalized(self) -> "Sample":
        return Sample(self.functional / self.norm_q_power, 1.0, 1.0, self.ratio)


def evaluate_sample(
    f: TestFunction,
    mu: Measure,
    nu: Measure,
    e: ExponentPair,
    window=None,
    config: ConfigManager = None,
) -> Sample:
    """
    Functional, norm and ratio for one test function.

    Raises:
        DegenerateFunctionError: when ||f|| is below the norm floor
    """
    config = config or get_config()
    norm = norm_p(f, mu, e)
    if not norm >= config.get_min_norm():
        raise DegenerateFunctionError(f"||f|| = {norm:.3g} is below the norm floor")
    if e.is_endpoint:
        functional = endpoint_functional(f, mu, nu, window=window, config=config)
        norm_q = norm
    else:
        functional = bessel_functional(f, mu, nu, e)
        norm_q = norm ** e.q
    return Sample(functional, norm, norm_q, functional / norm_q)


def bessel_ratio(
    f: TestFunction,
    mu: Measure,
    nu: SpectrumOrMeasure,
    e: ExponentPair,
    trunc: Optional[int] = None,
    config: ConfigManager = None,
) -> float:
    """Functional / ||f||^q with the norm floor enforced."""
    nu, _ = resolve_nu(nu, trunc)
    return evaluate_sample(f, mu, nu, e, config=config).ratio


# ---------------------------------------------------------------------------
# Test families
# ---------------------------------------------------------------------------

@dataclass
class Candidate:
    """A drawn test function as coefficients plus the map back to a function."""

    coefficients: np.ndarray
    build: Callable[[np.ndarray], TestFunction]
    family_id: str

    def function(self) -> TestFunction:
        return self.build(self.coefficients)


class TestFamily(ABC):
    """Source of random test functions."""

    __test__ = False

    @property
    @abstractmethod
    def family_id(self) -> str:
        """Descriptor written to result tables."""

    @abstractmethod
    def draw(self, rng: np.random.Generator) -> Candidate:
        """Draw one candidate."""


class TrigFamily(TestFamily):
    """Trig polynomials with integer frequencies in [-window, window]^d."""

    def __init__(self, dim: int = 1, window: Optional[int] = None, terms: Optional[int] = None,
                 config: ConfigManager = None):
        config = config or get_config()
        self.dim = dim
        self.window = config.get_trig_window() if window is None else int(window)
        self.terms = config.get_trig_terms() if terms is None else int(terms)
        if self.window < 0 or self.terms < 1:
            raise ValueError("TrigFamily needs window >= 0 and terms >= 1")

    @property
    def family_id(self) -> str:
        return f"trig(window={self.window},terms={self.terms})"

    def draw(self, rng: np.random.Generator) -> Candidate:
        side = 2 * self.window + 1
        count = side ** self.dim
        picked = rng.choice(count, size=min(self.terms, count), replace=False)
        freqs = np.stack(np.unravel_index(picked, (side,) * self.dim), axis=1) - self.window
        freqs = freqs.astype(float)
        n = freqs.shape[0]
        coefficients = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return Candidate(coefficients, lambda c: TrigPolynomial(freqs, c), self.family_id)


class ModulatedBoxFamily(TestFamily):
    """g_T = c e_{-T} chi_box with T drawn from a fixed list."""

    def __init__(self, box, values: Optional[Sequence[float]] = None,
                 config: ConfigManager = None):
        config = config or get_config()
        self.box = np.asarray(box, dtype=float).reshape(-1, 2)
        self.values = list(config.get_modulation_values() if values is None else values)
        if not self.values:
            raise ValueError("ModulatedBoxFamily needs at least one T value")

    @property
    def family_id(self) -> str:
        return f"modulated_box(T={','.join(f'{t:g}' for t in self.values)})"

    def draw(self, rng: np.random.Generator) -> Candidate:
        T = self.values[int(rng.integers(len(self.values)))]
        g = modulated_box(self.box, T)
        coefficients = np.array([rng.standard_normal() + 1j * rng.standard_normal()])
        return Candidate(coefficients, lambda c: g * c[0], f"modulated_box(T={T:g})")


class AtomFamily(TestFamily):
    """Arbitrary values at the atoms of an atomic measure."""

    def __init__(self, measure: AtomicMeasure):
        self.measure = measure

    @property
    def family_id(self) -> str:
        return f"atoms(n={len(self.measure)})"

    def draw(self, rng: np.random.Generator) -> Candidate:
        n = len(self.measure)
        coefficients = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return Candidate(coefficients, lambda c: AtomSamples(self.measure, c), self.family_id)


class CompositeFamily(TestFamily):
    """Draws from one of its members, chosen at random per draw."""

    def __init__(self, members: Sequence[TestFamily]):
        self.members = list(members)
        if not self.members:
            raise ValueError("Test family is empty")

    @property
    def family_id(self) -> str:
        return "+".join(m.family_id for m in self.members)

    def draw(self, rng: np.random.Generator) -> Candidate:
        return self.members[int(rng.integers(len(self.members)))].draw(rng)


def default_family(mu: Measure, e: Optional[ExponentPair] = None,
                   config: ConfigManager = None) -> TestFamily:
    """Trig polynomials plus modulated boxes (plus atom samples for atomic mu)."""
    config = config or get_config()
    if isinstance(mu, SelfSimilarMeasure):
        terms = None if e is not None and e.p == 2 else 1
        return TrigFamily(mu.dim, terms=terms, config=config)
    members: List[TestFamily] = [TrigFamily(mu.dim, config=config)]
    if isinstance(mu, AtomicMeasure):
        members.append(AtomFamily(mu))
    else:
        try:
            members.append(ModulatedBoxFamily(mu.bounding_box(), config=config))
        except UnsupportedKindError:
            pass
    return CompositeFamily(members)


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------

class _StartResult(NamedTuple):
    index: int
    family_id: str
    upper: Sample
    upper_function: TestFunction
    lower: Sample
    lower_function: TestFunction


def _local_search(
    candidate: Candidate,
    objective: Callable[[TestFunction], Optional[Sample]],
    rng: np.random.Generator,
    steps: int,
    step: float,
    decay: float,
    maximize: bool,
) -> Optional[Tuple[Sample, TestFunction]]:
    coefficients = candidate.coefficients.astype(complex)
    current = objective(candidate.build(coefficients))
    if current is None:
        return None
    coefficients = coefficients / current.norm
    current = current.normalized()

    for _ in range(steps):
        j = int(rng.integers(coefficients.size))
        trial = coefficients.copy()
        trial[j] += step * (rng.standard_normal() + 1j * rng.standard_normal())
        result = objective(candidate.build(trial))
        if result is not None and (
            result.ratio > current.ratio if maximize else result.ratio < current.ratio
        ):
            coefficients = trial / result.norm
            current = result.normalized()
        else:
            step *= decay
    return current, candidate.build(coefficients)


def estimate_bounds(
    mu: Measure,
    nu: SpectrumOrMeasure,
    e: ExponentPair,
    family: Optional[TestFamily] = None,
    budget: Optional[int] = None,
    seed: int = 0,
    trunc: Optional[int] = None,
    refine_steps: Optional[int] = None,
    window=None,
    max_workers: Optional[int] = None,
    config: ConfigManager = None,
) -> BoundEstimate:
    """
    Empirical inner estimates of the optimal bounds A and B.

    Every random start draws one function from the family and runs two coordinate
    local searches from it, one maximizing and one minimizing the ratio
    functional / ||f||^q. Starts are evaluated in parallel and reduced by index,
    so the result depends on the seed only.

    Args:
        mu: Measure carrying the test functions
        nu: Candidate frame measure, or a spectrum truncated at `trunc`
        e: Exponent pair; p = 1 uses the sup-norm functional
        family: Test family (default_family(mu) when omitted)
        budget: Number of random starts (config default 200)
        seed: Seed of the whole run
        trunc: Truncation level for spectra
        refine_steps: Local search steps per start (config default 50)
        window: Frequency window of the (1, inf) pathway
        max_workers: Threads (FRAMELAB_THREADS when omitted)
        config: Configuration

    Returns:
        BoundEstimate with the per-start sample table

    Raises:
        ValueError: budget < 1
        DegenerateFunctionError: every draw had a norm below the floor
    """
    config = config or get_config()
    budget = config.get_random_starts() if budget is None else int(budget)
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    steps = config.get_refine_steps() if refine_steps is None else int(refine_steps)
    family = family or default_family(mu, e, config)
    workers = config.get_max_workers() if max_workers is None else max(1, int(max_workers))
    nu_measure, truncation = resolve_nu(nu, trunc)
    if window is None and e.is_endpoint:
        window = config.get_sup_window()

    def objective(f: TestFunction) -> Optional[Sample]:
        try:
            return evaluate_sample(f, mu, nu_measure, e, window=window, config=config)
        except DegenerateFunctionError:
            return None

    children = np.random.SeedSequence(seed).spawn(budget)

    def run_start(index: int) -> Optional[_StartResult]:
        rng = np.random.default_rng(children[index])
        candidate = family.draw(rng)
        up = _local_search(candidate, objective, rng, steps, config.get_initial_step(),
                           config.get_step_decay(), maximize=True)
        if up is None:
            logger.warning(f"Start {index}: degenerate draw from {candidate.family_id}, skipped")
            return None
        low = _local_search(candidate, objective, rng, steps, config.get_initial_step(),
                            config.get_step_decay(), maximize=False)
        return _StartResult(index, candidate.family_id, up[0], up[1], low[0], low[1])

    logger.info(f"Estimating bounds {e} with {budget} starts on {workers} worker(s)")
    results = [r for r in parallel_map(run_start, range(budget), workers) if r is not None]
    if not results:
        raise DegenerateFunctionError("Every draw of the test family was degenerate")

    best_up, best_low = results[0], results[0]
    for r in results[1:]:
        if r.upper.ratio > best_up.upper.ratio:
            best_up = r
        if r.lower.ratio < best_low.lower.ratio:
            best_low = r

    q = "inf" if e.is_endpoint else e.q
    level = truncation.get("level", np.nan)
    rows = []
    for r in results:
        for tag, s in (("max", r.upper), ("min", r.lower)):
            rows.append([f"{r.family_id}:{tag}", r.index, e.p, q, level,
                         s.functional, s.norm_q_power, s.ratio])
    samples = pd.DataFrame(rows, columns=SAMPLE_COLUMNS)

    estimate = BoundEstimate(
        lower_hat=best_low.lower.ratio,
        upper_hat=best_up.upper.ratio,
        sample_count=len(results),
        family=family.family_id,
        exponents=e,
        truncation=truncation,
        seed=seed,
        samples=samples,
        upper_function=best_up.upper_function,
        lower_function=best_low.lower_function,
    )
    logger.info(f"Estimated A ~ {estimate.lower_hat:.6g}, B ~ {estimate.upper_hat:.6g}")
    return estimate


# ---------------------------------------------------------------------------
# Certified calculators
# ---------------------------------------------------------------------------

def holder_bound(mu: Measure, nu: SpectrumOrMeasure, e: ExponentPair,
                 trunc: Optional[int] = None) -> BoundCertificate:
    """B = mass(mu) * mass(nu); B = 1 at the (1, inf) endpoint."""
    nu, meta = resolve_nu(nu, trunc)
    mu_mass, nu_mass = mu.mass(), nu.mass()
    premises = {"mass_mu": mu_mass, "mass_nu": nu_mass, **meta}
    if e.is_endpoint:
        return BoundCertificate(HOLDER, upper=1.0, exponents=e, premises=premises,
                                notes="|(f dmu)^(t)| <= ||f||_1")
    return BoundCertificate(HOLDER, upper=mu_mass * nu_mass, exponents=e, premises=premises)


def riesz_thorin(
    e0: ExponentPair, C0: float, e1: ExponentPair, C1: float, theta: float
) -> Tuple[ExponentPair, BoundCertificate]:
    """
    Interpolate Bessel bounds between two exponent pairs.

    The bound C_i of the functional becomes the operator-norm bound C_i^(1/q_i)
    (C_i itself at the (1, inf) endpoint); operator norms interpolate as
    op0^(1-theta) op1^theta and the functional bound is that to the power q.

    Raises:
        ValueError: equal exponents or theta outside (0, 1)
    """
    if e0.p == e1.p:
        raise ValueError("Riesz-Thorin needs two different exponent pairs")
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if C0 < 0 or C1 < 0:
        raise ValueError("Bessel bounds must be nonnegative")
    e = interpolated_exponent(e0, e1, theta)
    op0 = C0 if e0.is_endpoint else C0 ** (1.0 / e0.q)
    op1 = C1 if e1.is_endpoint else C1 ** (1.0 / e1.q)
    operator = op0 ** (1.0 - theta) * op1 ** theta
    certificate = BoundCertificate(
        RIESZ_THORIN,
        upper=operator ** e.q,
        exponents=e,
        premises={
            "p0": e0.p, "C0": C0, "p1": e1.p, "C1": C1, "theta": theta,
            "operator_norm_bound": operator,
        },
    )
    return e, certificate


def lattice_interpolation_bound(C: float, p: float) -> BoundCertificate:
    """
    Bessel bound at p in (1, 2) from the L^2 bound C and the L^1 -> L^inf bound 1.

    theta = 2/q, so the operator norm is at most C^(theta/2).
    """
    if not 1 < p < 2:
        raise ValueError(f"p must lie in (1, 2), got {p}")
    theta = 2.0 * (1.0 - 1.0 / p)
    _, certificate = riesz_thorin(ExponentPair(1.0), 1.0, ExponentPair(2.0), C, theta)
    return certificate


def union_endpoint_range(C_endpoint: float, C_two: float,
                         ps: Sequence[float]) -> List[BoundCertificate]:
    """Certificates for every p in [1, 2] from Bessel bounds at (1, inf) and (2, 2)."""
    e0, e1 = ExponentPair(1.0), ExponentPair(2.0)
    certificates = []
    for p in ps:
        if not 1 <= p <= 2:
            raise ValueError(f"p must lie in [1, 2], got {p}")
        if p in (1.0, 2.0):
            e = e0 if p == 1.0 else e1
            C = C_endpoint if p == 1.0 else C_two
            certificates.append(BoundCertificate(RIESZ_THORIN, upper=C, exponents=e,
                                                 premises={"p0": 1.0, "C0": C_endpoint,
                                                           "p1": 2.0, "C1": C_two}))
            continue
        theta = interpolation_parameter(e0, e1, p)
        certificates.append(riesz_thorin(e0, C_endpoint, e1, C_two, theta)[1])
    return certificates


def _expm1_or_inf(x: float) -> float:
    try:
        return math.expm1(x)
    except OverflowError:
        return math.inf


def perturbation_bound(
    B: float,
    e: ExponentPair,
    C: float,
    M: float,
    A: Optional[float] = None,
) -> BoundCertificate:
    """
    Bessel bound after moving every frequency by at most C (sup norm).

    With supp mu inside [-M, M]^d the perturbed bound is
    (B^(1/q) + (B (e^(C^p) - 1)^(q-1) (e^((2 pi M)^q) - 1))^(1/q))^q. Given a
    lower bound A, the frame survives when A^(1/q) exceeds the same error term.

    Raises:
        ValueError: p = 1, or negative C, M, B
    """
    if e.is_endpoint:
        raise ValueError("Perturbation bounds need finite p and q")
    if B < 0 or C < 0 or M < 0:
        raise ValueError("B, C and M must be nonnegative")
    p, q = e.p, e.q
    growth = _expm1_or_inf(C ** p)
    if growth == 0:
        error = 0.0
    else:
        support = _expm1_or_inf((2.0 * math.pi * M) ** q)
        error = (B * growth ** (q - 1.0) * support) ** (1.0 / q)
    upper = (B ** (1.0 / q) + error) ** q
    premises = {"B": B, "p": p, "q": q, "C": C, "M": M, "error_term": error}

    lower = None
    notes = ""
    if A is not None:
        premises["A"] = A
        root = A ** (1.0 / q) - error
        premises["frame_preserved"] = bool(root > 0)
        if root > 0:
            lower = root ** q
        else:
            notes = "frame-preservation condition fails"
    return BoundCertificate(PERTURBATION, upper=upper, lower=lower, exponents=e,
                            premises=premises, notes=notes)


def scaling_bound(certificate: BoundCertificate, alpha: float) -> BoundCertificate:
    """Bounds for mu scaled by alpha > 0: A -> alpha A, B -> alpha B."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return BoundCertificate(
        SCALING,
        upper=None if certificate.upper is None else alpha * certificate.upper,
        lower=None if certificate.lower is None else alpha * certificate.lower,
        exponents=certificate.exponents,
        premises={"alpha": alpha, "base_rule": certificate.rule,
                  "A": certificate.lower, "B": certificate.upper},
    )


def convolution_closure_bound(B: float, e: ExponentPair, rho_mass: float = 1.0) -> BoundCertificate:
    """nu * rho stays Bessel with bound B * mass(rho) (B itself for probability rho)."""
    if rho_mass <= 0:
        raise ValueError("rho must have positive mass")
    return BoundCertificate(CONVOLUTION_CLOSURE, upper=B * rho_mass, exponents=e,
                            premises={"B": B, "rho_mass": rho_mass})


def deconvolution_bound(
    B: float, e: ExponentPair, A: Optional[float] = None, c: Optional[float] = None
) -> BoundCertificate:
    """
    |mu'^|^q dnu keeps the Bessel bound B of (mu * mu', nu).

    A lower bound c*A follows when the P-operator satisfies ||P f|| >= c ||f||.
    """
    lower = A * c if A is not None and c is not None else None
    premises = {"B": B}
    if A is not None:
        premises["A"] = A
    if c is not None:
        premises["c"] = c
    return BoundCertificate(DECONVOLUTION, upper=B, lower=lower, exponents=e, premises=premises)


def weighted_exponential_bound(
    a: float, b: float, e: ExponentPair, base: Optional[Tuple[float, float]] = None
) -> BoundCertificate:
    """
    Bounds for {phi e_t} with a <= |phi| <= b.

    Upper factor b^p / a^(p-q), lower factor a^p / b^(p-q), applied to (A, B).
    """
    if a <= 0 or a > b:
        raise ValueError(f"Need 0 < a <= b, got a={a}, b={b}")
    if e.is_endpoint:
        raise ValueError("Weighted exponential bounds need finite p and q")
    A, B = base if base is not None else (1.0, 1.0)
    p, q = e.p, e.q
    upper_factor = b ** p / a ** (p - q)
    lower_factor = a ** p / b ** (p - q)
    return BoundCertificate(
        WEIGHTED_EXPONENTIAL,
        upper=upper_factor * B,
        lower=lower_factor * A,
        exponents=e,
        premises={"a": a, "b": b, "A": A, "B": B,
                  "upper_factor": upper_factor, "lower_factor": lower_factor},
    )


def weighted_exponential_sum(
    f: TestFunction, mu: Measure, phi: TestFunction, points, e: ExponentPair
) -> float:
    """sum_lambda |[f, phi e_lambda]|^q over the given frequencies."""
    freqs, _ = as_points(points, mu.dim)
    values = [abs(semi_inner_product(f, phi.modulate(t), mu, e)) ** e.q for t in freqs]
    return math.fsum(values)


# ---------------------------------------------------------------------------
# Constructions on nu
# ---------------------------------------------------------------------------

def deconvolution_weight(
    nu: Measure, mu_prime: Measure, e: ExponentPair, quadrature=None
) -> Measure:
    """
    The measure |mu'^(t)|^q dnu(t).

    Atomic nu is reweighted exactly (atoms whose weight vanishes are dropped);
    density nu gets its density multiplied pointwise, integrated on `quadrature`
    (nu's own rule by default).

    Raises:
        UnsupportedKindError: any other kind of nu
        ValueError: p = 1, or every atom lost its weight
    """
    if e.is_endpoint:
        raise ValueError("Deconvolution weights need finite q")
    q = e.q
    if isinstance(nu, AtomicMeasure):
        weights = nu.weights * np.abs(mu_prime.fourier_stieltjes(nu.points)) ** q
        keep = weights > 0
        if not keep.any():
            raise ValueError("mu'^ vanishes on every atom of nu")
        return AtomicMeasure(nu.points[keep], weights[keep])
    if isinstance(nu, DensityMeasure):
        base = nu

        def density(x: np.ndarray) -> np.ndarray:
            return base.density_at(x) * np.abs(mu_prime.fourier_stieltjes(x)) ** q

        return DensityMeasure(nu.box, density, quadrature or nu.quadrature, nu.breakpoints)
    raise UnsupportedKindError(f"Deconvolution weights are not defined for {nu.kind} measures")


# ---------------------------------------------------------------------------
# Envelopes and sigma-finiteness
# ---------------------------------------------------------------------------

def ball_net(dim: int, radius: float, probes: int) -> Tuple[np.ndarray, float]:
    """
    Deterministic net of the closed ball B(0, radius), origin included.

    In d = 1 `probes` points are spread evenly; in higher dimension about `probes`
    points of a cubic grid are kept. Returns the offsets and the covering radius.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if dim == 1:
        n = max(3, int(probes)) | 1
        return np.linspace(-radius, radius, n).reshape(-1, 1), radius / (n - 1)
    n = max(3, int(round(probes ** (1.0 / dim)))) | 1
    axis = np.linspace(-radius, radius, n)
    grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    spacing = 2.0 * radius / (n - 1)
    cover = 0.5 * spacing * math.sqrt(dim)
    return grid[np.linalg.norm(grid, axis=1) <= radius + cover], cover


def _l1_norm(f: TestFunction, mu: Measure) -> float:
    try:
        return norm_p(f, mu, ExponentPair(1.0))
    except UnsupportedKindError:
        return norm_p(f, mu, ExponentPair(2.0)) * math.sqrt(mu.mass())


def envelope_functional(
    f: TestFunction,
    mu: Measure,
    nu: SpectrumOrMeasure,
    e: ExponentPair,
    radius: float,
    probes: int = 17,
    certified: bool = True,
    trunc: Optional[int] = None,
    config: ConfigManager = None,
) -> Tuple[float, float]:
    """
    (integral inf_{|y|<=r} |F(x+y)|^q dnu, integral sup_{|y|<=r} |F(x+y)|^q dnu), F = (f dmu)^.

    Extremes are probed on a ball net; with `certified` they are widened by the
    Lipschitz constant 2 pi R_mu ||f||_1 of F times the net's covering radius, so
    inf_sum <= bessel_functional <= sup_sum always holds.
    """
    if e.is_endpoint:
        raise ValueError("Envelope sums need finite q")
    config = config or get_config()
    nu, _ = resolve_nu(nu, trunc)
    X, W = nu.nodes()
    net, cover = ball_net(mu.dim, radius, probes)
    P = net.shape[0]

    lows = np.empty(X.shape[0])
    highs = np.empty(X.shape[0])
    rows = max(1, config.get_batch_budget() // (P * 64))
    for start in range(0, X.shape[0], rows):
        block = X[start:start + rows]
        shifted = (block[:, None, :] + net[None, :, :]).reshape(-1, mu.dim)
        mags = np.abs(fourier_coefficient(f, shifted, mu)).reshape(block.shape[0], P)
        lows[start:start + rows] = mags.min(axis=1)
        highs[start:start + rows] = mags.max(axis=1)

    if certified:
        margin = 2.0 * math.pi * mu.support_radius() * _l1_norm(f, mu) * cover
        lows = np.maximum(lows - margin, 0.0)
        highs = highs + margin
    return float(W @ lows ** e.q), float(W @ highs ** e.q)


@dataclass
class SigmaFinitenessReport:
    """Outcome of the ball-mass probe of a Bessel measure."""

    epsilon: float
    delta: float
    bound: float
    threshold: float
    constant: float
    centers: int
    max_ball_mass: float
    violations: List[Tuple[List[float], float]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "bound": self.bound,
            "threshold": self.threshold,
            "constant": self.constant,
            "centers": self.centers,
            "max_ball_mass": self.max_ball_mass,
            "violations": [{"center": c, "mass": m} for c, m in self.violations],
            "passed": self.passed,
        }


def delta_for(eta: float, e: ExponentPair) -> float:
    """delta = (1 - eta)^q."""
    if not 0 <= eta < 1:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    if e.is_endpoint:
        raise ValueError("delta needs finite q")
    return (1.0 - eta) ** e.q


def transform_ball_radius(mu: Measure, eta: float, max_radius: float = 1.0,
                          probes: int = 257, halvings: int = 40) -> float:
    """Largest max_radius / 2^j with |mu^| >= 1 - eta on the probed ball."""
    radius = max_radius
    for _ in range(halvings + 1):
        net, _ = ball_net(mu.dim, radius, probes)
        if np.min(np.abs(mu.fourier_stieltjes(net))) >= 1.0 - eta:
            return radius
        radius *= 0.5
    raise ValueError(f"|mu^| drops below {1 - eta:g} on every probed ball")


def sigma_finiteness_probe(
    nu: SpectrumOrMeasure,
    mu: Measure,
    e: ExponentPair,
    B: float,
    eta: float,
    window,
    trunc: Optional[int] = None,
    config: ConfigManager = None,
) -> SigmaFinitenessReport:
    """
    Check nu(B(t, eps)) <= B / delta on a grid of centers covering the window.

    eps is found by halving from the configured radius until |mu^| >= 1 - eta on
    B(0, eps); a violation contradicts the premise that nu is B-Bessel for mu.

    Raises:
        ValueError: mu not a probability measure, or eta outside (0, 1)
    """
    config = config or get_config()
    if not mu.is_probability:
        raise ValueError("sigma-finiteness probe needs a probability measure mu")
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    nu, _ = resolve_nu(nu, trunc)
    delta = delta_for(eta, e)
    epsilon = transform_ball_radius(mu, eta, config.get_ball_search_radius(),
                                    config.get_ball_probes())
    threshold = B / delta

    dim = mu.dim
    box = np.tile([-float(window), float(window)], (dim, 1)) if np.isscalar(window) \
        else np.asarray(window, dtype=float).reshape(dim, 2)
    axes = [np.arange(lo, hi + 0.5 * epsilon, epsilon) for lo, hi in box]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)

    masses = np.array([nu.ball_mass(c, epsilon) for c in centers])
    bad = masses > threshold * (1.0 + 1e-12)
    violations = [(c.tolist(), float(m)) for c, m in zip(centers[bad], masses[bad])]
    if violations:
        logger.warning(f"{len(violations)} ball(s) exceed nu(B) <= {threshold:.6g}")
    return SigmaFinitenessReport(
        epsilon=epsilon,
        delta=delta,
        bound=B,
        threshold=threshold,
        constant=(2.0 / epsilon) ** dim * B / delta,
        centers=int(centers.shape[0]),
        max_ball_mass=float(masses.max()) if masses.size else 0.0,
        violations=violations,
    )


__all__ = [
    "BoundCertificate",
    "BoundEstimate",
    "RULES",
    "SAMPLE_COLUMNS",
    "resolve_nu",
    "bessel_functional",
    "endpoint_functional",
    "bessel_ratio",
    "evaluate_sample",
    "TestFamily",
    "TrigFamily",
    "ModulatedBoxFamily",
    "AtomFamily",
    "CompositeFamily",
    "default_family",
    "estimate_bounds",
    "holder_bound",
    "riesz_thorin",
    "lattice_interpolation_bound",
    "union_endpoint_range",
    "perturbation_bound",
    "scaling_bound",
    "convolution_closure_bound",
    "deconvolution_bound",
    "weighted_exponential_bound",
    "weighted_exponential_sum",
    "deconvolution_weight",
    "ball_net",
    "envelope_functional",
    "SigmaFinitenessReport",
    "delta_for",
    "transform_ball_radius",
    "sigma_finiteness_probe",
]
