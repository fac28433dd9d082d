#!/usr/bin/env python3
"""
test_measures.py - Tests for measures, transforms and convolution
"""

import json

import numpy as np
import pytest

from framelab.core.config import ConfigManager
from framelab.core.errors import EvaluationError, UnsupportedKindError
from framelab.core.measures import (
    AtomicMeasure,
    DensityMeasure,
    SumMeasure,
    atomic,
    ball_mass,
    box_mass,
    convolve,
    dirac,
    embed,
    fourier_stieltjes,
    integrate,
    lebesgue,
    lebesgue_window,
    mass,
    merge_atoms,
    mixed_type,
    piecewise_constant,
    scale,
    self_similar,
    tabulated,
    uniform,
)
from framelab.core.quadrature import QuadratureSpec


def character(t):
    return lambda x: np.exp(-2j * np.pi * t * x[:, 0])


@pytest.fixture
def two_interval():
    return piecewise_constant([([[0, 1]], 0.5), ([[2, 3]], 0.5)])


@pytest.fixture
def mu4():
    return self_similar([[4]], [[0], [2]])


# ============================================================================
# Mass and integration
# ============================================================================

def test_atomic_mass():
    """Test that atomic mass is the sum of weights"""
    assert mass(atomic([0.0, 0.5], [0.5, 0.5])) == pytest.approx(1.0, abs=1e-15)


def test_two_interval_density_mass(two_interval):
    """Test the mass of the normalized two-interval density"""
    assert mass(two_interval) == pytest.approx(1.0, abs=1e-12)
    assert two_interval.is_probability
    value = integrate(two_interval, lambda x: np.ones(x.shape[0]))
    assert abs(value - 1.0) < 1e-12


def test_atomic_integration_is_exact():
    """Test atomic integration against a hand-summed value"""
    m = atomic([0.0, 0.5], [0.5, 0.5])
    assert integrate(m, lambda x: x[:, 0]) == 0.25


def test_full_period_character_integrates_to_zero():
    """Test that a character over a full period integrates to zero"""
    value = integrate(lebesgue([[0, 1]]), lambda x: np.exp(-2j * np.pi * x[:, 0]))
    assert abs(value) < 1e-12


def test_density_quadrature_on_trig_polynomial():
    """Test density quadrature error for a degree-64 trig polynomial"""
    g = lambda x: np.cos(2 * np.pi * 64 * x[:, 0]) + 3 * np.sin(2 * np.pi * 37 * x[:, 0]) + 2
    assert abs(integrate(lebesgue([[0, 1]]), g) - 2.0) < 1e-9


def test_non_finite_integrand_rejected():
    """Test that non-finite integrand values raise an evaluation error"""
    with pytest.raises(EvaluationError):
        integrate(dirac(0.0), lambda x: np.full(x.shape[0], np.inf))


def test_negative_density_rejected():
    """Test that a density with negative values fails on evaluation"""
    m = DensityMeasure([[0, 1]], lambda x: -np.ones(x.shape[0]))
    with pytest.raises(EvaluationError):
        m.mass()


def test_tabulated_density_mass():
    """Test the mass of a linearly interpolated hat density"""
    m = tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    assert mass(m) == pytest.approx(1.0, abs=1e-12)


def test_lebesgue_window_default():
    """Test the configured window half-width and explicit windows"""
    np.testing.assert_allclose(lebesgue_window().bounding_box(), [[-64, 64]])
    assert mass(lebesgue_window(2.0, dim=2)) == pytest.approx(16.0)
    with pytest.raises(ValueError):
        lebesgue_window(0.0)


def test_self_similar_integration_unsupported(mu4):
    """Test that a self-similar measure only integrates characters"""
    with pytest.raises(UnsupportedKindError):
        integrate(mu4, lambda x: x[:, 0])


# ============================================================================
# Fourier-Stieltjes transform
# ============================================================================

def test_dirac_at_origin_transform():
    """Test that the transform of delta_0 is one everywhere"""
    values = fourier_stieltjes(dirac(0.0), np.linspace(-5, 5, 11))
    np.testing.assert_allclose(values, np.ones(11), atol=1e-15)


def test_lebesgue_transform_vanishes_at_integers():
    """Test the unit-interval transform at nonzero integers"""
    values = fourier_stieltjes(lebesgue([[0, 1]]), np.array([-3.0, -1.0, 1.0, 2.0, 7.0]))
    assert np.max(np.abs(values)) < 1e-12


def test_single_frequency_returns_complex():
    """Test that a scalar frequency gives a complex scalar"""
    value = fourier_stieltjes(lebesgue([[0, 1]]), 0.0)
    assert isinstance(value, complex)
    assert value == pytest.approx(1.0)


def test_density_transform_matches_closed_form():
    """Test the piecewise-constant transform against quadrature of the character"""
    m = uniform([[-0.5, 1.5]])
    for t in [0.3, 1.7, 4.25]:
        closed = fourier_stieltjes(m, t)
        numeric = integrate(m, character(t))
        assert abs(closed - numeric) < 1e-9


def test_mu4_transform(mu4):
    """Test the quarter-Cantor transform at zero and at one"""
    assert abs(fourier_stieltjes(mu4, 0.0) - 1.0) < 1e-15
    assert abs(fourier_stieltjes(mu4, 1.0)) < 1e-12


def test_mu4_truncation_is_stable():
    """Test that deeper truncation changes the transform below tolerance"""
    t = np.array([0.37, 1.0, 2.5, 13.0])
    shallow = fourier_stieltjes(self_similar([[4]], [[0], [2]], depth=30), t)
    deep = fourier_stieltjes(self_similar([[4]], [[0], [2]], depth=60), t)
    adaptive = fourier_stieltjes(self_similar([[4]], [[0], [2]]), t)
    np.testing.assert_allclose(shallow, deep, atol=1e-12)
    np.testing.assert_allclose(adaptive, deep, atol=1e-10)


@pytest.mark.parametrize("matrix, digits", [
    ([[1]], [[0], [2]]),
    ([[4]], [[1], [2]]),
    ([[2.5]], [[0], [1]]),
    ([[4]], [[0], [0]]),
])
def test_self_similar_validation(matrix, digits):
    """Test rejection of malformed IFS data"""
    with pytest.raises(ValueError):
        self_similar(matrix, digits)


# ============================================================================
# Convolution, scaling, sums
# ============================================================================

def test_dirac_convolution_translates():
    """Test that delta_a * delta_b is delta_{a+b}"""
    result = convolve(dirac(0.25), dirac(1.5))
    assert isinstance(result, AtomicMeasure)
    np.testing.assert_allclose(result.points, [[1.75]])
    np.testing.assert_allclose(result.weights, [1.0])


def test_atomic_convolution_theorem():
    """Test the convolution theorem exactly for atomic measures"""
    a = atomic([0.0, 0.3], [0.5, 0.5])
    b = atomic([0.0, 1.1, 2.0], [0.2, 0.3, 0.5])
    t = np.linspace(-3, 3, 13)
    product = fourier_stieltjes(a, t) * fourier_stieltjes(b, t)
    np.testing.assert_allclose(fourier_stieltjes(convolve(a, b), t), product, atol=1e-14)
    assert mass(convolve(a, b)) == pytest.approx(1.0)


def test_atomic_convolution_merges_coincident_points():
    """Test that coincident sums are merged into one atom"""
    result = convolve(atomic([0.0, 1.0]), atomic([0.0, 1.0]))
    assert len(result) == 3
    np.testing.assert_allclose(result.weights, [1.0, 2.0, 1.0])


def test_atomic_density_convolution():
    """Test (delta_0 + delta_1)/2 * Lebesgue on [0,1] is half the indicator of [0,2]"""
    result = convolve(atomic([0.0, 1.0], [0.5, 0.5]), lebesgue([[0, 1]]))
    assert isinstance(result, DensityMeasure)
    grid = np.linspace(0.05, 1.95, 39).reshape(-1, 1)
    np.testing.assert_allclose(result.density_at(grid), 0.5, atol=1e-15)
    assert mass(result) == pytest.approx(1.0, abs=1e-12)


def test_density_convolution_is_distribution_of_windows():
    """Test nu * chi_[0,1] evaluates to t -> nu([t-1, t])"""
    nu = uniform([[0, 2]])
    result = convolve(nu, lebesgue([[0, 1]]))
    points = np.array([[0.5], [1.0], [1.5], [2.5]])
    expected = [box_mass(nu, t - 1, t) for t in points[:, 0]]
    np.testing.assert_allclose(result.density_at(points), expected, atol=1e-12)


def test_density_convolution_theorem():
    """Test the convolution theorem for two densities within quadrature tolerance"""
    a = lebesgue([[0, 1]])
    result = convolve(a, a)
    t = np.array([0.25, 0.5, 1.3, 2.0])
    product = fourier_stieltjes(a, t) ** 2
    np.testing.assert_allclose(fourier_stieltjes(result, t), product, atol=1e-9)
    assert mass(result) == pytest.approx(1.0, abs=1e-9)


def test_lazy_convolution_with_self_similar(mu4):
    """Test the lazy convolution node uses the product of transforms"""
    a = uniform([[0, 1]])
    result = convolve(mu4, a)
    t = np.array([0.1, 0.7, 3.0])
    product = fourier_stieltjes(mu4, t) * fourier_stieltjes(a, t)
    np.testing.assert_allclose(fourier_stieltjes(result, t), product, atol=1e-15)
    assert mass(result) == pytest.approx(1.0)


def test_constructors_follow_numerics_config(tmp_path, mu4):
    """Test that a custom numerics file reaches constructors and lazy convolutions"""
    numerics = {"quadrature": {"panels_per_unit": 2, "nodes_per_panel": 3}, "batch_budget": 10}
    (tmp_path / "numerics.json").write_text(json.dumps(numerics), encoding="utf-8")
    config = ConfigManager(config_dir=str(tmp_path))

    assert lebesgue([[0, 1]], config=config).quadrature == QuadratureSpec(2, 3)
    assert uniform([[0, 2]], config=config).quadrature == QuadratureSpec(2, 3)
    assert tabulated([0, 1], [1, 1], config=config).quadrature == QuadratureSpec(2, 3)
    assert lebesgue([[0, 1]], QuadratureSpec(5, 5), config).quadrature == QuadratureSpec(5, 5)

    lazy = convolve(mu4, lebesgue([[0, 1]], config=config), config)
    assert lazy.batch_budget == 10
    assert lazy.scale(2.0).batch_budget == 10
    pieces = SumMeasure((lebesgue([[0, 1]], config=config), lebesgue([[2, 3]], config=config)))
    with pytest.raises(EvaluationError):
        convolve(pieces, lebesgue([[0, 1]], config=config), config).nodes()


def test_convolution_dimension_mismatch():
    """Test that measures of different dimension cannot be convolved"""
    with pytest.raises(ValueError):
        convolve(dirac(0.0), dirac([0.0, 0.0]))


def test_scale_dirac():
    """Test scaling a point mass"""
    result = scale(dirac(0.0), 2.0)
    np.testing.assert_allclose(result.weights, [2.0])


def test_scale_normalizes_indicator():
    """Test that 1/|S| chi_S dx is a probability measure"""
    m = piecewise_constant([([[0, 1]], 1.0), ([[2, 3]], 1.0)])
    assert scale(m, 1.0 / mass(m)).is_probability


def test_scale_is_linear_in_mass():
    """Test mass(scale(m, a)) = a mass(m) for random a"""
    rng = np.random.default_rng(3)
    measures = [atomic([0.0, 1.0, 2.5]), uniform([[0, 2]]), self_similar([[4]], [[0], [2]])]
    for alpha in rng.uniform(0.1, 10.0, size=5):
        for m in measures:
            assert mass(scale(m, alpha)) == pytest.approx(alpha * mass(m), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.0, -1.0, np.inf])
def test_scale_rejects_bad_factor(alpha):
    """Test rejection of nonpositive or infinite factors"""
    with pytest.raises(ValueError):
        scale(dirac(0.0), alpha)


def test_merge_atoms_keeps_first_occurrence():
    """Test merging of atoms closer than the tolerance"""
    points = np.array([[1.0], [0.0], [1e-13], [1.0 + 5e-13]])
    merged_points, merged_weights = merge_atoms(points, np.array([1.0, 2.0, 3.0, 4.0]), 1e-12)
    np.testing.assert_allclose(merged_points, [[1.0], [0.0]])
    np.testing.assert_allclose(merged_weights, [5.0, 5.0])


def test_atomic_measure_rejects_duplicates():
    """Test that the raw constructor requires distinct points"""
    with pytest.raises(ValueError):
        AtomicMeasure([[0.0], [0.0]], [1.0, 1.0])
    with pytest.raises(ValueError):
        AtomicMeasure([[0.0]], [0.0])


# ============================================================================
# Mixed type and embedding
# ============================================================================

def test_mixed_type_of_diracs():
    """Test that delta_0 x delta_0 + delta_0 x delta_0 is 2 delta_0 in R^2"""
    result = mixed_type(dirac(0.0), dirac(0.0))
    assert isinstance(result, AtomicMeasure)
    np.testing.assert_allclose(result.points, [[0.0, 0.0]])
    np.testing.assert_allclose(result.weights, [2.0])


def test_mixed_type_mass_is_additive():
    """Test mass additivity of the mixed-type measure"""
    a = atomic([0.0, 1.0], [0.3, 0.4])
    b = uniform([[0, 1], [0, 1]])
    result = mixed_type(a, b)
    assert result.dim == 3
    assert mass(result) == pytest.approx(mass(a) + mass(b), abs=1e-12)


def test_mixed_type_integration_identity():
    """Test the defining identity with f(x, y) = x + y"""
    a = lebesgue([[0, 1]])
    result = mixed_type(a, a)
    assert isinstance(result, SumMeasure)
    value = integrate(result, lambda x: x[:, 0] + x[:, 1])
    assert abs(value - 1.0) < 1e-12


def test_mixed_type_transform():
    """Test the mixed-type transform is the sum of the factor transforms"""
    a = atomic([0.2, 0.9], [0.5, 0.5])
    b = lebesgue([[0, 1]])
    result = mixed_type(a, b)
    t = np.array([[0.3, 0.0], [1.5, 2.5], [0.0, 0.7]])
    expected = fourier_stieltjes(a, t[:, 0]) + fourier_stieltjes(b, t[:, 1])
    np.testing.assert_allclose(fourier_stieltjes(result, t), expected, atol=1e-12)


def test_embedded_box_mass():
    """Test box masses of a measure embedded along the second axis"""
    m = embed(lebesgue([[0, 1]]), [1], 2)
    assert box_mass(m, [-1, 0], [1, 1]) == pytest.approx(1.0)
    assert box_mass(m, [0.5, 0], [1, 1]) == 0.0


# ============================================================================
# Ball masses
# ============================================================================

def test_ball_mass_dirac():
    """Test the mass of a ball around a point mass"""
    assert ball_mass(dirac(0.0), 0.0, 1.0) == 1.0


def test_ball_mass_interval():
    """Test the mass of a ball inside the unit interval"""
    assert ball_mass(lebesgue([[0, 1]]), 0.5, 0.25) == pytest.approx(0.5, abs=1e-15)


def test_ball_mass_lattice_atoms():
    """Test counting integer atoms inside a ball"""
    m = atomic(np.arange(-10, 11))
    assert ball_mass(m, 0.0, 2.5) == 5.0


def test_ball_mass_open_ball():
    """Test that the ball is open"""
    assert ball_mass(atomic([0.0, 1.0]), 0.0, 1.0) == 1.0


def test_ball_mass_unsupported(mu4):
    """Test that self-similar measures report an unsupported kind"""
    with pytest.raises(UnsupportedKindError):
        ball_mass(mu4, 0.0, 1.0)


def test_ball_mass_rejects_nonpositive_radius():
    """Test that a nonpositive radius is rejected"""
    with pytest.raises(ValueError):
        ball_mass(dirac(0.0), 0.0, 0.0)
