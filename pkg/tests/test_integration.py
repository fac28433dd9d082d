"""Integration tests for framelab"""
import json

import pytest

from framelab.core.bounds import (
    TrigFamily,
    convolution_closure_bound,
    estimate_bounds,
    holder_bound,
    perturbation_bound,
)
from framelab.core.constructions import approximate_identity
from framelab.core.measures import convolve, lebesgue
from framelab.core.sip import ExponentPair
from framelab.core.spectra import Lattice, as_atomic_measure, perturb
from framelab.io import encode, estimate_payload, load_measure, load_spec, write_json


def test_imports_from_framelab_root():
    """Test that main classes can be imported from the root package"""
    from framelab import (
        ConfigManager,
        ExponentPair,
        Lattice,
        estimate_bounds,
        lebesgue,
        verify,
    )
    assert ConfigManager is not None
    assert ExponentPair(2).q == 2.0
    assert Lattice(1).dim == 1
    assert callable(estimate_bounds)
    assert lebesgue([[0, 1]]).mass() == pytest.approx(1.0)
    assert callable(verify)


def test_json_to_report_pipeline(tmp_path):
    """Test load, estimate, certify and write in one pass"""
    mu_path = tmp_path / "mu.json"
    nu_path = tmp_path / "nu.json"
    mu_path.write_text(json.dumps(encode(lebesgue([[0, 1]]))), encoding="utf-8")
    nu_path.write_text(json.dumps({"kind": "lattice"}), encoding="utf-8")

    mu, nu = load_measure(mu_path), load_spec(nu_path)
    e = ExponentPair(1.5)
    estimate = estimate_bounds(mu, nu, e, family=TrigFamily(window=4, terms=3), budget=4,
                               seed=1, trunc=8, refine_steps=3, max_workers=1)
    certificate = holder_bound(mu, nu, e, trunc=8)
    assert estimate.upper_hat <= certificate.upper

    path = write_json(estimate_payload(estimate, [certificate]), tmp_path / "out" / "run.json")
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["estimate"]["truncation"]["level"] == 8
    assert document["certificates"][0]["premises"]["mass_nu"] == 17.0


def test_plancherel_bound_survives_smoothing():
    """Test that nu * lambda_n keeps the Bessel bound 1 of Z for chi_[0,1]"""
    mu = lebesgue([[0, 1]])
    e = ExponentPair(2)
    nu = as_atomic_measure(Lattice(1), 12)
    certificate = convolution_closure_bound(1.0, e)
    for n in (2, 8):
        smoothed = convolve(nu, approximate_identity("uniform", n))
        estimate = estimate_bounds(mu, smoothed, e, family=TrigFamily(window=4, terms=3),
                                   budget=4, seed=n, refine_steps=3, max_workers=1)
        assert estimate.upper_hat <= certificate.upper * (1 + 1e-9)


def test_perturbed_lattice_stays_a_frame():
    """Test a small perturbation of the Parseval frame Z for chi_[0,1/4]"""
    mu = lebesgue([[0, 0.25]])
    e = ExponentPair(2)
    certificate = perturbation_bound(1.0, e, 0.01, 0.25, A=1.0)
    assert certificate.premises["frame_preserved"]
    assert 0 < certificate.lower < 1.0 < certificate.upper
    omega = perturb(Lattice(1), 0.01, 3)
    estimate = estimate_bounds(mu, omega, e, family=TrigFamily(window=2, terms=2), budget=3,
                               seed=0, trunc=40, refine_steps=2, max_workers=1)
    assert estimate.upper_hat <= certificate.upper * (1 + 1e-9)
