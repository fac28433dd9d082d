#!/usr/bin/env python3
"""
test_cli.py - Tests for the framelab command line
"""

import json

import pytest

from framelab.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, OutputFormatter, main
from framelab.core.bounds import HOLDER, PERTURBATION, RIESZ_THORIN, SAMPLE_COLUMNS

UNIT_INTERVAL = {"kind": "density", "box": [[0, 1]], "pieces": [{"box": [[0, 1]], "value": 1.0}]}
DELTA_0 = {"kind": "atomic", "atoms": [[[0.0], 1.0]]}


@pytest.fixture
def write_spec(tmp_path):
    def write(obj, name):
        path = tmp_path / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return str(path)
    return write


def run_json(capsys, argv):
    """Run a command printing JSON to stdout and parse it."""
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


# ============================================================================
# catalog
# ============================================================================

def test_catalog_list(capsys):
    """Test listing the catalog"""
    assert main(["catalog", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "two_atom" in out
    assert "cantor4" in out


def test_catalog_verify_writes_report(tmp_path, capsys):
    """Test verifying an entry and saving its report"""
    output = tmp_path / "report.json"
    assert main(["catalog", "verify", "dirac_tight", "--output", str(output)]) == EXIT_OK
    report = json.loads(output.read_text(encoding="utf-8"))
    assert report["id"] == "dirac_tight"
    assert report["pass"] is True
    assert "PASS" in capsys.readouterr().out


def test_catalog_verify_unknown(capsys):
    """Test the usage exit code for unknown ids"""
    assert main(["catalog", "verify", "nope"]) == EXIT_USAGE
    assert "catalog list" in capsys.readouterr().out


def test_catalog_verify_failure_exit_code(mocker):
    """Test that a failing report maps to exit code 1"""
    report = mocker.Mock(passed=False, id="two_atom", measured=1.0, expected=0.0,
                         tolerance=1e-12, truncation=None, runtime_ms=1.0)
    mocker.patch("framelab.cli.verify", return_value=report)
    assert main(["catalog", "verify", "two_atom"]) == EXIT_FAILED


# ============================================================================
# bounds
# ============================================================================

def test_bounds_json(tmp_path, write_spec):
    """Test a bounds run with certificates and the ordering check"""
    mu = write_spec(UNIT_INTERVAL, "mu.json")
    nu = write_spec(DELTA_0, "nu.json")
    output = tmp_path / "run"
    code = main(["bounds", "--mu", mu, "--nu", nu, "--p", "1.5", "--budget", "3",
                 "--refine-steps", "2", "--output", str(output)])
    assert code == EXIT_OK
    document = json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))
    assert document["estimate"]["sample_count"] == 3
    rules = [c["rule"] for c in document["certificates"]]
    assert rules[0] == HOLDER
    assert RIESZ_THORIN in rules
    assert document["ordering"]["holds"] is True


def test_bounds_csv_is_reproducible(tmp_path, write_spec):
    """Test that the csv export depends on the seed only"""
    mu = write_spec(UNIT_INTERVAL, "mu.json")
    nu = write_spec({"kind": "lattice"}, "z.json")
    paths = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        argv = ["bounds", "--mu", mu, "--nu", nu, "--p", "2", "--budget", "2", "--trunc", "3",
                "--refine-steps", "2", "--seed", "4", "--output", str(path), "--format", "csv"]
        assert main(argv) == EXIT_OK
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text(encoding="utf-8").splitlines()[0].split(",") == SAMPLE_COLUMNS


def test_bounds_perturbed_spectrum(tmp_path, write_spec):
    """Test that perturbed spectra also get a perturbation certificate"""
    mu = write_spec(UNIT_INTERVAL, "mu.json")
    nu = write_spec({"kind": "perturbed", "base": {"kind": "lattice"}, "C": 0.05, "seed": 1},
                    "omega.json")
    output = tmp_path / "run.json"
    code = main(["bounds", "--mu", mu, "--nu", nu, "--p", "2", "--budget", "2", "--trunc", "3",
                 "--refine-steps", "2", "--output", str(output)])
    assert code == EXIT_OK
    rules = [c["rule"] for c in json.loads(output.read_text(encoding="utf-8"))["certificates"]]
    assert rules == [HOLDER, PERTURBATION]


@pytest.mark.parametrize("argv", [
    ["--p", "0.5"],
    ["--p", "2", "--budget", "0"],
])
def test_bounds_bad_arguments(write_spec, argv):
    """Test usage errors from invalid exponents and budgets"""
    mu = write_spec(UNIT_INTERVAL, "mu.json")
    nu = write_spec(DELTA_0, "nu.json")
    assert main(["bounds", "--mu", mu, "--nu", nu] + argv) == EXIT_USAGE


def test_bounds_bad_files(tmp_path, write_spec):
    """Test missing files and dimension mismatches"""
    mu = write_spec(UNIT_INTERVAL, "mu.json")
    plane = write_spec({"kind": "lattice", "dim": 2}, "z2.json")
    missing = str(tmp_path / "missing.json")
    assert main(["bounds", "--mu", missing, "--nu", plane, "--p", "2"]) == EXIT_USAGE
    assert main(["bounds", "--mu", mu, "--nu", plane, "--p", "2"]) == EXIT_USAGE
    assert main(["bounds", "--mu", plane, "--nu", mu, "--p", "2"]) == EXIT_USAGE


# ============================================================================
# construct
# ============================================================================

def test_construct_interpolate(capsys):
    """Test the Riesz-Thorin certificate at theta = 1/2"""
    code, document = run_json(capsys, ["construct", "interpolate", "--p0", "1", "--p1", "2",
                                       "--c0", "1", "--c1", "1", "--theta", "0.5"])
    assert code == EXIT_OK
    assert document["rule"] == RIESZ_THORIN
    assert document["interpolated"]["q"] == pytest.approx(4.0)
    assert document["bounds"]["upper"] == pytest.approx(1.0)


def test_construct_discretize(capsys, write_spec):
    """Test discretizing Lebesgue measure on [0,1] at r = 1/2"""
    nu = write_spec(UNIT_INTERVAL, "leb01.json")
    code, document = run_json(capsys, ["construct", "discretize", "--nu", nu, "--r", "0.5",
                                       "--rule", "corner"])
    assert code == EXIT_OK
    assert document["atoms"] == [[[0.0], 0.5], [[0.5], 0.5]]


def test_construct_convolve(capsys, write_spec):
    """Test convolving two atomic measures"""
    a = write_spec({"kind": "atomic", "atoms": [[[0.0], 0.5], [[1.0], 0.5]]}, "a.json")
    code, document = run_json(capsys, ["construct", "convolve", "--a", a, "--b", a])
    assert code == EXIT_OK
    assert document["atoms"] == [[[0.0], 0.25], [[1.0], 0.5], [[2.0], 0.25]]


def test_construct_convolve_uses_config_dir(tmp_path, capsys, write_spec):
    """Test that --config-dir numerics reach measures loaded from JSON"""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    numerics = {"quadrature": {"panels_per_unit": 1, "nodes_per_panel": 2}}
    (config_dir / "numerics.json").write_text(json.dumps(numerics), encoding="utf-8")
    a = write_spec(UNIT_INTERVAL, "a.json")

    code, document = run_json(capsys, ["--config-dir", str(config_dir), "construct",
                                       "convolve", "--a", a, "--b", a])
    assert code == EXIT_OK
    assert document["quadrature"] == {"panels_per_unit": 1, "nodes_per_panel": 2}

    code, document = run_json(capsys, ["construct", "convolve", "--a", a, "--b", a])
    assert code == EXIT_OK
    assert document["quadrature"] == {"panels_per_unit": 64, "nodes_per_panel": 8}


def test_construct_deconvolve(capsys, write_spec):
    """Test the weight |mu'^|^q on the atoms of nu"""
    nu = write_spec({"kind": "atomic", "atoms": [[[0.0], 1.0], [[0.5], 1.0]]}, "nu.json")
    mu_prime = write_spec(UNIT_INTERVAL, "mu_prime.json")
    code, document = run_json(capsys, ["construct", "deconvolve", "--nu", nu,
                                       "--mu-prime", mu_prime, "--p", "2"])
    assert code == EXIT_OK
    weights = [w for _, w in document["atoms"]]
    assert weights == pytest.approx([1.0, 4.0 / 3.14159265358979 ** 2])


def test_construct_perturb(capsys):
    """Test a seeded perturbation of Z"""
    argv = ["construct", "perturb", "--lambda", "lattice", "--C", "0.1", "--seed", "7",
            "--level", "2"]
    code, document = run_json(capsys, argv)
    assert code == EXIT_OK
    assert document["kind"] == "perturbed"
    assert len(document["truncation"]["points"]) == 5
    assert document["truncation"]["max_offset"] <= 0.1
    assert run_json(capsys, argv)[1] == document


def test_construct_smooth_rejects_plane(capsys, write_spec):
    """Test that smoothing needs a measure on the line"""
    square = {"kind": "density", "box": [[0, 1], [0, 1]],
              "pieces": [{"box": [[0, 1], [0, 1]], "value": 1.0}]}
    nu = write_spec(square, "square.json")
    assert main(["construct", "smooth", "--nu", nu]) == EXIT_USAGE


# ============================================================================
# Parser and output
# ============================================================================

def test_missing_command_is_parse_error():
    """Test argparse exits with status 2"""
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_output_formatter_extension():
    """Test file extensions per format"""
    assert OutputFormatter("csv").get_file_extension() == ".csv"
    assert OutputFormatter("JSON").get_file_extension() == ".json"
