#!/usr/bin/env python3
"""
test_constructions.py - Tests for discretization, smoothing, approximate identities and P
"""

import math

import numpy as np
import pytest

from framelab.core.bounds import (
    BUDGETED,
    TrigFamily,
    bessel_functional,
    envelope_functional,
    estimate_bounds,
)
from framelab.core.constructions import (
    ApproximateIdentity,
    DiscretizationSpec,
    approximate_identity,
    budgeted_bessel,
    convex_combine,
    discretize,
    p_operator,
    q_frame_from_discretization,
    smooth,
    window_average,
)
from framelab.core.errors import UnsupportedKindError
from framelab.core.functions import AtomSamples, TrigPolynomial
from framelab.core.measures import (
    AtomicMeasure,
    DensityMeasure,
    atomic,
    convolve,
    dirac,
    lebesgue,
    mass,
    self_similar,
    uniform,
)
from framelab.core.sip import ExponentPair, norm_p
from framelab.core.spectra import Lattice, as_atomic_measure


@pytest.fixture
def rng():
    return np.random.default_rng(77)


# ============================================================================
# Discretization
# ============================================================================

def test_discretize_single_cell():
    """Test Lebesgue on [0,1] with r = 1 and centers"""
    result = discretize(lebesgue([[0, 1]]), DiscretizationSpec(1.0))
    np.testing.assert_allclose(result.points, [[0.5]])
    np.testing.assert_allclose(result.weights, [1.0])


def test_discretize_half_cells_at_corners():
    """Test Lebesgue on [0,1] with r = 1/2 and corners"""
    result = discretize(lebesgue([[0, 1]]), DiscretizationSpec(0.5, "corner"))
    np.testing.assert_allclose(result.points, [[0.0], [0.5]])
    np.testing.assert_allclose(result.weights, [0.5, 0.5])


def test_discretize_window_gives_lattice():
    """Test Lebesgue on [0,N] with r = 1 and corners is sum of delta_k"""
    result = discretize(lebesgue([[0, 5]]), DiscretizationSpec(1.0, "corner"))
    np.testing.assert_allclose(result.points[:, 0], np.arange(5))
    np.testing.assert_allclose(result.weights, np.ones(5), atol=1e-14)


def test_discretize_atomic_is_exact():
    """Test exact binning of atoms and the window filter"""
    nu = atomic([0.1, 0.2, 1.5, 7.0], [1.0, 2.0, 3.0, 4.0])
    result = discretize(nu, DiscretizationSpec(1.0, window=((0.0, 2.0),)))
    np.testing.assert_allclose(result.points, [[0.5], [1.5]])
    np.testing.assert_allclose(result.weights, [3.0, 3.0])


def test_discretize_conserves_mass_2d():
    """Test mass conservation for a density on the unit square"""
    nu = uniform([[0, 1], [0, 1]])
    result = discretize(nu, DiscretizationSpec(0.25))
    assert len(result) == 16
    assert mass(result) == pytest.approx(1.0, abs=1e-12)


def test_discretize_explicit_representatives():
    """Test explicit points and their cell check"""
    spec = DiscretizationSpec(1.0, "explicit", {(0,): (0.3,), (1,): (1.9,)})
    result = discretize(lebesgue([[0, 2]]), spec)
    np.testing.assert_allclose(result.points, [[0.3], [1.9]])
    bad = DiscretizationSpec(1.0, "explicit", {(0,): (1.3,)})
    with pytest.raises(ValueError):
        discretize(lebesgue([[0, 1]]), bad)


def test_discretization_spec_validation():
    """Test rejection of malformed specs"""
    with pytest.raises(ValueError):
        DiscretizationSpec(0.0)
    with pytest.raises(ValueError):
        DiscretizationSpec(1.0, "random")
    with pytest.raises(ValueError):
        DiscretizationSpec(1.0, "explicit")
    assert DiscretizationSpec(0.5).reach(4) == pytest.approx(1.0)


def test_discretize_self_similar_unsupported():
    """Test that a measure without box masses cannot be discretized"""
    with pytest.raises(UnsupportedKindError):
        discretize(self_similar([[4]], [[0], [2]]), DiscretizationSpec(0.5))


def test_discretization_sandwich(rng):
    """Test the functional of nu' between the envelopes of nu at radius r sqrt(d)"""
    mu = uniform([[0, 1]])
    nu = lebesgue([[-4, 4]])
    spec = DiscretizationSpec(0.25, "corner")
    nu_prime = discretize(nu, spec)
    e = ExponentPair(1.5)
    for _ in range(3):
        f = TrigPolynomial.random(rng, degree=3, terms=3)
        value = bessel_functional(f, mu, nu_prime, e)
        low, high = envelope_functional(f, mu, nu, e, spec.reach(1), probes=9)
        assert low <= value * (1 + 1e-12)
        assert value <= high * (1 + 1e-12)


# ============================================================================
# q-frames from discretizations
# ============================================================================

def test_q_frame_coefficients():
    """Test c_k = w_k^(1/q)"""
    e = ExponentPair(1.5)
    unit = q_frame_from_discretization(atomic([0.0, 1.0]), e)
    np.testing.assert_allclose(unit.coefficients, [1.0, 1.0])
    weighted = q_frame_from_discretization(atomic([0.0, 1.0], [8.0, 27.0]), e)
    np.testing.assert_allclose(weighted.coefficients, [2.0, 3.0])
    assert len(weighted.functions()) == 2


def test_q_frame_sum_matches_functional(rng):
    """Test the rearranged sum against the functional with nu'"""
    mu = atomic([0.0, 0.3, 0.55], [0.2, 0.5, 0.3])
    nu_prime = atomic([-1.0, 0.5, 2.0, 3.5], [0.7, 1.3, 0.4, 2.0])
    for p in [1.5, 2.0, 3.0]:
        e = ExponentPair(p)
        family = q_frame_from_discretization(nu_prime, e)
        f = AtomSamples.random(rng, mu)
        expected = bessel_functional(f, mu, nu_prime, e)
        assert family.bessel_sum(f, mu) == pytest.approx(expected, rel=1e-12)


def test_q_frame_needs_atomic():
    """Test that q-frames come from atomic measures"""
    with pytest.raises(UnsupportedKindError):
        q_frame_from_discretization(uniform([[0, 1]]), ExponentPair(2))


# ============================================================================
# Smoothing
# ============================================================================

def test_window_average_of_dirac():
    """Test delta_0 * chi_[0,1] is the indicator of [0,1]"""
    first = window_average(dirac(0.0))
    assert isinstance(first, DensityMeasure)
    x = np.array([[-0.5], [0.0], [0.5], [0.99], [1.5]])
    np.testing.assert_allclose(first.density_at(x), [0, 1, 1, 1, 0])


def test_smooth_preserves_mass():
    """Test that smoothing keeps the total mass"""
    result = smooth(atomic([0.0, 2.0], [0.25, 0.75]))
    assert mass(result) == pytest.approx(1.0, abs=1e-2)
    values = result.density_at(np.linspace(-1, 4, 101).reshape(-1, 1))
    assert np.all(values >= 0)
    assert values.max() <= 0.75 + 1e-6


def test_smooth_rejects_unsupported_measures():
    """Test the one-dimensional, non-lazy pathway"""
    with pytest.raises(ValueError):
        smooth(uniform([[0, 1], [0, 1]]))
    with pytest.raises(UnsupportedKindError):
        smooth(self_similar([[4]], [[0], [2]]))


# ============================================================================
# Approximate identities
# ============================================================================

@pytest.mark.parametrize("kind", ["uniform", "atomic"])
def test_approximate_identity_converges(kind):
    """Test |integral f(x + t) dlambda_n(t) - f(x)| -> 0 along n = 1, 2, ..., 64"""
    f = TrigPolynomial.character(0.25)
    x = 0.3
    errors = []
    for n in [1, 2, 4, 8, 16, 32, 64]:
        lam = approximate_identity(kind, n)
        assert lam.is_probability
        value = lam.integrate(lambda t: f.evaluate(t + x))
        errors.append(abs(value - f(x)))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 3e-2


def test_approximate_identity_radius():
    """Test the support radius of lambda_n"""
    assert ApproximateIdentity("uniform").radius(4) == pytest.approx(0.25)
    assert ApproximateIdentity("uniform", dim=2).radius(4) == pytest.approx(math.sqrt(2) / 4)
    assert ApproximateIdentity("atomic").radius(8) == pytest.approx(0.125)
    box = approximate_identity("uniform", 4).bounding_box()
    np.testing.assert_allclose(box, [[-0.25, 0.25]])
    radii = [ApproximateIdentity("atomic").radius(n) for n in range(1, 10)]
    assert all(b <= a for a, b in zip(radii, radii[1:]))


def test_approximate_identity_validation():
    """Test rejection of unknown kinds and n < 1"""
    with pytest.raises(ValueError):
        ApproximateIdentity("gaussian")
    with pytest.raises(ValueError):
        approximate_identity("uniform", 0)


def test_convolution_with_approximate_identity_converges(rng):
    """Test functionals with nu * lambda_n tend to the functional with nu"""
    mu = uniform([[0, 1]])
    nu = as_atomic_measure(Lattice(1), 3)
    e = ExponentPair(2)
    f = TrigPolynomial.random(rng, degree=2, terms=3)
    target = bessel_functional(f, mu, nu, e)
    gaps = []
    for lam in ApproximateIdentity("uniform").sequence([2, 8, 32]):
        gaps.append(abs(bessel_functional(f, mu, convolve(nu, lam), e) - target))
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] < 1e-2 * target


# ============================================================================
# The P-operator
# ============================================================================

def test_p_operator_identity_for_dirac():
    """Test that mu' = delta_0 leaves f unchanged"""
    mu = atomic([0.0, 0.5], [0.5, 0.5])
    f = AtomSamples(mu, [1.0 + 1j, -2.0])
    Pf = p_operator(f, mu, dirac(0.0))
    np.testing.assert_allclose(Pf.evaluate(mu.points), f.values)


def test_p_operator_translates_for_single_atom():
    """Test that mu' = delta_y gives the translate of f"""
    mu = atomic([0.0, 0.5], [0.5, 0.5])
    f = AtomSamples(mu, [1.0, 2.0])
    Pf = p_operator(f, mu, dirac(3.0))
    np.testing.assert_allclose(Pf.evaluate(np.array([[3.0], [3.5]])), [1.0, 2.0])


def test_p_operator_conditional_average():
    """Test the three-atom closed form for mu = mu' = (delta_0 + delta_1)/2"""
    mu = atomic([0.0, 1.0], [0.5, 0.5])
    Pf = p_operator(AtomSamples(mu, [1.0, 3.0]), mu, mu)
    np.testing.assert_allclose(Pf.measure.points[:, 0], [0.0, 1.0, 2.0])
    np.testing.assert_allclose(Pf.measure.weights, [0.25, 0.5, 0.25])
    np.testing.assert_allclose(Pf.values, [1.0, 2.0, 3.0])


def test_p_operator_defining_identity(rng):
    """Test integral Pf e_s d(mu * mu') against the double integral"""
    mu = atomic([0.0, 1.0, 2.0], [0.2, 0.5, 0.3])
    mu_prime = atomic([0.0, 1.0, 0.5], [0.6, 0.3, 0.1])
    f = AtomSamples.random(rng, mu)
    Pf = p_operator(f, mu, mu_prime)
    rho = Pf.measure
    for s in [0.0, 0.35, -1.2]:
        lhs = np.sum(Pf.values * rho.weights * np.exp(2j * np.pi * s * rho.points[:, 0]))
        inner = np.sum(f.values * mu.weights * np.exp(2j * np.pi * s * mu.points[:, 0]))
        outer = np.sum(mu_prime.weights * np.exp(2j * np.pi * s * mu_prime.points[:, 0]))
        assert abs(lhs - inner * outer) < 1e-12


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_p_operator_contracts(rng, p):
    """Test ||Pf|| <= ||f|| on random functions"""
    mu = atomic([0.0, 1.0, 2.0], [0.25, 0.25, 0.5])
    mu_prime = atomic([0.0, 1.0], [0.4, 0.6])
    e = ExponentPair(p)
    for _ in range(10):
        f = AtomSamples.random(rng, mu)
        Pf = p_operator(f, mu, mu_prime)
        assert norm_p(Pf, Pf.measure, e) <= norm_p(f, mu, e) * (1 + 1e-12)


def test_p_operator_preconditions():
    """Test probability and kind requirements"""
    f = TrigPolynomial.constant()
    with pytest.raises(ValueError):
        p_operator(f, atomic([0.0, 1.0]), dirac(0.0))
    with pytest.raises(UnsupportedKindError):
        p_operator(f, uniform([[0, 1]]), uniform([[0, 1]]))


# ============================================================================
# Budgeted Bessel measures and convex combinations
# ============================================================================

def test_budgeted_weights():
    """Test equal weights summing to B / mass(mu)"""
    nu, cert = budgeted_bessel(uniform([[0, 1]]), 1.0, [0.0, 1.0, 2.0, 3.0], ExponentPair(2))
    np.testing.assert_allclose(nu.weights, [0.25] * 4)
    assert cert.rule == BUDGETED
    assert cert.upper == 1.0
    nu2, _ = budgeted_bessel(lebesgue([[0, 2]]), 3.0, [0.0, 1.0, 5.0], ExponentPair(2))
    assert mass(nu2) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        budgeted_bessel(uniform([[0, 1]]), 0.0, [0.0], ExponentPair(2))


def test_budgeted_bound_holds(rng):
    """Test the empirical estimate and the q-frame sum against B"""
    mu = uniform([[0, 1]])
    e = ExponentPair(1.5)
    nu, cert = budgeted_bessel(mu, 2.0, rng.uniform(-10, 10, size=6), e)
    estimate = estimate_bounds(mu, nu, e, family=TrigFamily(window=3, terms=3), budget=3,
                               seed=5, refine_steps=3, max_workers=1)
    assert estimate.upper_hat <= cert.upper
    family = q_frame_from_discretization(nu, e)
    f = TrigPolynomial.random(rng, degree=3, terms=2)
    assert family.bessel_sum(f, mu) <= cert.upper * norm_p(f, mu, e) ** e.q * (1 + 1e-9)


def test_convex_combine_atoms():
    """Test that half of two unit atoms at one point is a unit atom"""
    result = convex_combine(dirac(1.0), dirac(1.0), 0.5)
    assert isinstance(result, AtomicMeasure)
    np.testing.assert_allclose(result.weights, [1.0])
    with pytest.raises(ValueError):
        convex_combine(dirac(1.0), dirac(1.0), 1.0)


def test_convex_combine_pieces():
    """Test pointwise combination of piecewise-constant densities"""
    result = convex_combine(uniform([[0, 1]]), uniform([[0, 2]]), 0.25)
    assert isinstance(result, DensityMeasure)
    np.testing.assert_allclose(result.density_at(np.array([[0.5], [1.5]])), [0.625, 0.375])
    assert mass(result) == pytest.approx(1.0)


def test_convex_combine_is_linear(rng):
    """Test exact linearity of the functional in the combination"""
    mu = uniform([[0, 1]])
    e = ExponentPair(3)
    nu1 = atomic([0.0, 2.0], [1.0, 0.5])
    nu2 = uniform([[-1, 1]])
    f = TrigPolynomial.random(rng, degree=2, terms=2)
    lam = 0.4
    combined = bessel_functional(f, mu, convex_combine(nu1, nu2, lam), e)
    first = bessel_functional(f, mu, nu1, e)
    second = bessel_functional(f, mu, nu2, e)
    expected = lam * first + (1 - lam) * second
    assert combined == pytest.approx(expected, rel=1e-12)
