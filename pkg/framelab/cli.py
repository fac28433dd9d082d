#!/usr/bin/env python3
"""
framelab.cli - command-line front end
Catalog verification, bound sweeps and constructions with JSON/CSV output
"""

import argparse
import math
import sys
import traceback
from pathlib import Path
from typing import Dict, List, Optional

from framelab.core.bounds import (
    DEFAULT_TRUNCATION,
    BoundCertificate,
    BoundEstimate,
    deconvolution_weight,
    estimate_bounds,
    holder_bound,
    perturbation_bound,
    riesz_thorin,
    union_endpoint_range,
)
from framelab.core.catalog import VerificationReport, list_entries, verify
from framelab.core.config import ConfigManager
from framelab.core.constructions import DiscretizationSpec, discretize, smooth
from framelab.core.errors import FramelabError, SpecParseError, UnknownEntryError
from framelab.core.measures import convolve
from framelab.core.sip import ExponentPair
from framelab.core.spectra import Lattice, Perturbed, SpectrumSet, perturb
from framelab.io.codec import (
    load_measure,
    load_spec,
    measure_to_dict,
    spectrum_to_dict,
)
from framelab.io.results import estimate_payload, samples_csv, to_json, write_text
from framelab.utils import safe_print

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 130


class OutputFormatter:
    """Handle multiple output formats"""

    def __init__(self, format_type: str = "json", config: ConfigManager = None):
        self.format_type = format_type.lower()
        self.config = config

    def format_estimate(self, estimate: BoundEstimate, certificates: List[BoundCertificate],
                        ordering: Dict) -> str:
        """Sample table for csv, the full run for json"""
        if self.format_type == "csv":
            return samples_csv(estimate, self.config)
        return to_json(estimate_payload(estimate, certificates, ordering), self.config)

    def get_file_extension(self) -> str:
        """Get appropriate file extension"""
        return {"csv": ".csv", "json": ".json"}.get(self.format_type, ".json")


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        path = write_text(text, output)
        safe_print(f"💾 Saved to: {path}")
    else:
        safe_print(text)


def _number(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return "inf" if math.isinf(value) else f"{value:.10g}"


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def print_entries() -> None:
    """List catalog entries."""
    safe_print("\n" + "=" * 70)
    safe_print("📚 Catalog Entries")
    safe_print("=" * 70 + "\n")

    for entry in list_entries():
        safe_print(f"🔹 {entry.id}")
        safe_print(f"   {entry.description}")
        safe_print(f"   mu: {entry.mu}   nu: {entry.nu}")
        exponents = ", ".join(f"{p:g}" for p in entry.exponents)
        safe_print(f"   p: {exponents}   outcome: {entry.outcome}   "
                   f"tolerance: {entry.tolerance:g}")
        safe_print()


def print_report(report: VerificationReport) -> None:
    status = "✅ PASS" if report.passed else "❌ FAIL"
    safe_print("\n" + "=" * 70)
    safe_print(f"🔬 {report.id}: {status}")
    safe_print("=" * 70)
    safe_print(f"Measured:   {_number(report.measured)}")
    safe_print(f"Expected:   {_number(report.expected)}")
    safe_print(f"Tolerance:  {_number(report.tolerance)}")
    safe_print(f"Truncation: {report.truncation if report.truncation is not None else '-'}")
    safe_print(f"Runtime:    {report.runtime_ms:.1f} ms")
    safe_print("=" * 70 + "\n")


def cmd_catalog(args, config: ConfigManager) -> int:
    """catalog list | catalog verify ID"""
    if args.catalog_command == "list":
        print_entries()
        return EXIT_OK

    report = verify(args.id, level=args.level, config=config)
    print_report(report)
    if args.output:
        _emit(to_json(report.to_dict(), config), args.output)
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def applicable_certificates(mu, nu, e: ExponentPair, trunc: int) -> List[BoundCertificate]:
    """
    Hölder always, Riesz-Thorin between (1, inf) and (2, 2) for 1 < p < 2, and the
    perturbation of the unperturbed Hölder bound for perturbed spectra.
    """
    certificates = [holder_bound(mu, nu, e, trunc)]
    if 1 < e.p < 2:
        two = holder_bound(mu, nu, ExponentPair(2.0), trunc)
        certificates.extend(union_endpoint_range(1.0, two.upper, [e.p]))
    if isinstance(nu, Perturbed) and not e.is_endpoint:
        base = holder_bound(mu, nu.base, e, trunc)
        M = float(abs(mu.bounding_box()).max())
        certificates.append(perturbation_bound(base.upper, e, nu.radius, M))
    return certificates


def print_estimate(estimate: BoundEstimate, certificates: List[BoundCertificate],
                   ordering: Dict) -> None:
    safe_print("\n" + "=" * 70)
    safe_print(f"📐 Bound estimate {estimate.exponents}")
    safe_print("=" * 70)
    safe_print(f"Family:     {estimate.family}")
    safe_print(f"Starts:     {estimate.sample_count} (seed {estimate.seed})")
    safe_print(f"Truncation: {estimate.truncation}")
    safe_print(f"A (lower):  {_number(estimate.lower_hat)}")
    safe_print(f"B (upper):  {_number(estimate.upper_hat)}")
    safe_print("\n🎯 Certificates:")
    for certificate in certificates:
        safe_print(f"  • {certificate.rule}: B <= {_number(certificate.upper)}"
                   + (f", A >= {_number(certificate.lower)}" if certificate.lower else ""))
    status = "✅" if ordering["holds"] else "❌"
    safe_print(f"\n{status} upper_hat <= min B: {_number(estimate.upper_hat)} <= "
               f"{_number(ordering['min_upper'])}")
    safe_print("=" * 70 + "\n")


def cmd_bounds(args, config: ConfigManager) -> int:
    """Estimate bounds, list certificates and check their ordering."""
    mu = load_measure(args.mu, config)
    nu = load_spec(args.nu, config)
    e = ExponentPair(args.p)
    trunc = args.trunc if args.trunc is not None else DEFAULT_TRUNCATION
    if nu.dim != mu.dim:
        raise ValueError(f"mu and nu dimensions differ ({mu.dim} vs {nu.dim})")

    safe_print(f"\n🚀 Estimating bounds {e} with {args.budget or config.get_random_starts()} "
               "starts...")
    estimate = estimate_bounds(mu, nu, e, budget=args.budget, seed=args.seed, trunc=trunc,
                               refine_steps=args.refine_steps, window=args.window,
                               config=config)
    certificates = applicable_certificates(mu, nu, e, trunc)
    uppers = [c.upper for c in certificates if c.upper is not None]
    min_upper = min(uppers) if uppers else math.inf
    holds = estimate.upper_hat <= min_upper * (1.0 + 1e-9) + 1e-12
    ordering = {"min_upper": None if math.isinf(min_upper) else min_upper, "holds": holds}

    print_estimate(estimate, certificates, ordering)
    if args.output:
        formatter = OutputFormatter(args.format, config)
        output = args.output
        if not Path(output).suffix:
            output += formatter.get_file_extension()
        _emit(formatter.format_estimate(estimate, certificates, ordering), output)
    return EXIT_OK if holds else EXIT_FAILED


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------

def _spectrum_argument(value: str, dim: int, config: ConfigManager) -> SpectrumSet:
    if value == "lattice":
        return Lattice(dim)
    spectrum = load_spec(value, config)
    if not isinstance(spectrum, SpectrumSet):
        raise SpecParseError(f"{value} does not hold a spectrum specification")
    return spectrum


def construct_document(args, config: ConfigManager) -> Dict:
    """Run one construct subcommand and return its JSON document."""
    command = args.construct_command
    if command == "discretize":
        nu = load_measure(args.nu, config)
        return measure_to_dict(discretize(nu, DiscretizationSpec(args.r, args.rule)))
    if command == "convolve":
        a, b = load_measure(args.a, config), load_measure(args.b, config)
        return measure_to_dict(convolve(a, b, config))
    if command == "smooth":
        return measure_to_dict(smooth(load_measure(args.nu, config), args.width, config=config))
    if command == "deconvolve":
        e = ExponentPair(args.p)
        weighted = deconvolution_weight(load_measure(args.nu, config),
                                        load_measure(args.mu_prime, config), e)
        return measure_to_dict(weighted)
    if command == "perturb":
        moved = perturb(_spectrum_argument(args.spectrum, args.dim, config), args.C, args.seed)
        document = spectrum_to_dict(moved)
        points = moved.truncate(args.level)
        document["truncation"] = {
            "level": args.level,
            "points": points.tolist(),
            "max_offset": moved.max_offset(args.level),
        }
        return document
    if command == "interpolate":
        e, certificate = riesz_thorin(ExponentPair(args.p0), args.c0, ExponentPair(args.p1),
                                      args.c1, args.theta)
        document = certificate.to_dict()
        document["interpolated"] = e.to_dict()
        return document
    raise ValueError(f"Unknown construct command: {command}")


def cmd_construct(args, config: ConfigManager) -> int:
    document = construct_document(args, config)
    _emit(to_json(document, config), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framelab",
        description="framelab - (p,q)-Bessel and frame measures: bounds, constructions, catalog",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  framelab catalog list
  framelab catalog verify two_atom
  framelab bounds --mu mu.json --nu nu.json --p 1.5 --budget 50 --seed 0
  framelab bounds --mu mu.json --nu lattice.json --p 2 --output run.csv --format csv
  framelab construct interpolate --p0 1 --p1 2 --c0 1 --c1 1 --theta 0.5
  framelab construct discretize --nu leb01.json --r 0.5
  framelab construct perturb --lambda lattice --C 0.1 --seed 7

Exit codes: 0 success, 1 failed check, 2 usage or parse error.
Environment: FRAMELAB_THREADS caps the estimator's worker threads (default 1).
        """,
    )
    parser.add_argument("--config-dir", type=str, default=None,
                        help="Directory of config.json / numerics.json / estimation.json")
    parser.add_argument("-v", "--verbose", action="store_true", help="Verbose output")
    commands = parser.add_subparsers(dest="command", required=True)

    # catalog
    catalog = commands.add_parser("catalog", help="List or verify worked examples")
    catalog_commands = catalog.add_subparsers(dest="catalog_command", required=True)
    catalog_commands.add_parser("list", help="List catalog entries")
    verify_parser = catalog_commands.add_parser("verify", help="Verify one entry")
    verify_parser.add_argument("id", type=str, help="Catalog id")
    verify_parser.add_argument("--level", type=int, default=None,
                               help="Truncation override (default: the entry's schedule)")
    verify_parser.add_argument("--output", type=str, default=None,
                               help="Write the report JSON to this file")

    # bounds
    bounds = commands.add_parser("bounds", help="Estimate frame bounds and list certificates")
    bounds.add_argument("--mu", type=str, required=True, help="Measure JSON of mu")
    bounds.add_argument("--nu", type=str, required=True, help="Measure or spectrum JSON of nu")
    bounds.add_argument("--p", type=float, required=True, help="Exponent p >= 1")
    bounds.add_argument("--budget", type=int, default=None,
                        help="Random starts (default: 200 from estimation.json)")
    bounds.add_argument("--seed", type=int, default=0, help="Seed (default: 0)")
    bounds.add_argument("--trunc", type=int, default=None,
                        help=f"Truncation level of spectra (default: {DEFAULT_TRUNCATION})")
    bounds.add_argument("--refine-steps", type=int, default=None,
                        help="Local search steps per start (default: 50)")
    bounds.add_argument("--window", type=float, default=None,
                        help="Half-width of the sup-norm window for p = 1 (default: 64)")
    bounds.add_argument("--output", type=str, default=None, help="Output file")
    bounds.add_argument("--format", type=str, choices=["json", "csv"], default="json",
                        help="Output format (default: json)")

    # construct
    construct = commands.add_parser("construct", help="Build measures, spectra and certificates")
    construct_commands = construct.add_subparsers(dest="construct_command", required=True)

    discretize_parser = construct_commands.add_parser("discretize", help="Discretize a measure")
    discretize_parser.add_argument("--nu", type=str, required=True, help="Measure JSON")
    discretize_parser.add_argument("--r", type=float, required=True, help="Cell size r > 0")
    discretize_parser.add_argument("--rule", type=str, choices=["center", "corner"],
                                   default="center",
                                   help="Representative point (default: center)")

    convolve_parser = construct_commands.add_parser("convolve", help="Convolve two measures")
    convolve_parser.add_argument("--a", type=str, required=True, help="Measure JSON")
    convolve_parser.add_argument("--b", type=str, required=True, help="Measure JSON")

    smooth_parser = construct_commands.add_parser("smooth", help="Smooth a 1-d measure")
    smooth_parser.add_argument("--nu", type=str, required=True, help="Measure JSON")
    smooth_parser.add_argument("--width", type=float, default=0.5,
                               help="Half-width of the bump (default: 0.5)")

    deconvolve_parser = construct_commands.add_parser(
        "deconvolve", help="The measure |mu'^|^q dnu"
    )
    deconvolve_parser.add_argument("--nu", type=str, required=True, help="Measure JSON")
    deconvolve_parser.add_argument("--mu-prime", type=str, required=True, help="Measure JSON")
    deconvolve_parser.add_argument("--p", type=float, required=True, help="Exponent p > 1")

    perturb_parser = construct_commands.add_parser("perturb", help="Perturb a spectrum")
    perturb_parser.add_argument("--lambda", dest="spectrum", type=str, required=True,
                                help="'lattice' or a spectrum JSON")
    perturb_parser.add_argument("--C", type=float, required=True, help="Offset bound C >= 0")
    perturb_parser.add_argument("--seed", type=int, default=0, help="Seed (default: 0)")
    perturb_parser.add_argument("--dim", type=int, default=1,
                                help="Lattice dimension (default: 1)")
    perturb_parser.add_argument("--level", type=int, default=DEFAULT_TRUNCATION,
                                help=f"Truncation written out (default: {DEFAULT_TRUNCATION})")

    interpolate_parser = construct_commands.add_parser(
        "interpolate", help="Riesz-Thorin bound between two exponents"
    )
    interpolate_parser.add_argument("--p0", type=float, required=True, help="First p")
    interpolate_parser.add_argument("--p1", type=float, required=True, help="Second p")
    interpolate_parser.add_argument("--c0", type=float, required=True, help="Bound at p0")
    interpolate_parser.add_argument("--c1", type=float, required=True, help="Bound at p1")
    interpolate_parser.add_argument("--theta", type=float, required=True,
                                    help="Interpolation parameter in (0, 1)")

    for sub in (discretize_parser, convolve_parser, smooth_parser, deconvolve_parser,
                perturb_parser, interpolate_parser):
        sub.add_argument("--output", type=str, default=None,
                         help="Output file (default: stdout)")
    return parser


COMMANDS = {
    "catalog": cmd_catalog,
    "bounds": cmd_bounds,
    "construct": cmd_construct,
}


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = ConfigManager(args.config_dir, verbose=args.verbose)
        config.configure_logging(args.verbose)
    except Exception as e:
        safe_print(f"❌ Error initializing configuration: {e}")
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, config)
    except KeyboardInterrupt:
        safe_print("\n\n⚠️  Operation interrupted by user")
        return EXIT_INTERRUPTED
    except UnknownEntryError as e:
        safe_print(f"\n❌ {e.args[0]}")
        safe_print("💡 Tip: Use 'framelab catalog list' to see all entries")
        return EXIT_USAGE
    except (SpecParseError, ValueError, TypeError) as e:
        safe_print(f"\n❌ Error: {e}")
        if args.verbose:
            traceback.print_exc()
        return EXIT_USAGE
    except (FramelabError, ArithmeticError) as e:
        safe_print(f"\n❌ Error: {e}")
        if args.verbose:
            traceback.print_exc()
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
