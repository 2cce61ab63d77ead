"""
Command-line entry point for ferromagnetic Heisenberg block entanglement computations.

Subcommands:
    spectrum  print k, lambda_k for a sector, the equal-weight ensemble or a weight file
    entropy   print the block entropy in bits (optionally against the asymptotic form)
    scan      emit exact-versus-asymptotic CSV sweeps
    verify    run the brute-force oracle suite; exit 1 if any family fails
    bench     time the sector spectrum + entropy path

Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.
Data goes to stdout, diagnostics to stderr.

Usage:
    python HeisenbergEntropy_CLI.py entropy --L 4 --n 2 --N 2
    python HeisenbergEntropy_CLI.py scan --p 1/10 --L 200 --n-from 1 --n-to 100 --out -
"""

import argparse
import logging
import sys
from fractions import Fraction

import BlockEntropy as be
import EntropyScanReport as esr
import ExactDiagOracle as edo
import ReducedSpectrum as rs
from admintools.benchfunctions import DEFAULT_BENCH_REPEAT, time_sector_entropy
from LogCombinatorics import DomainError

logger = logging.getLogger("heisenberg_entropy")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
OUTPUT_FORMAT = ".12g"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class UsageError(Exception):
    """Raised for argument combinations argparse cannot express."""


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _oracle_length(text):
    value = _positive_int(text)
    if value > edo.ORACLE_MAX_L:
        raise argparse.ArgumentTypeError(f"--max-L is limited to {edo.ORACLE_MAX_L}")
    return value


def _fraction(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"filling must lie strictly between 0 and 1, got {text}")
    return value


def _add_selector_arguments(parser):
    parser.add_argument("--L", type=_positive_int, required=True, help="chain length")
    parser.add_argument("--n", type=_nonnegative_int, required=True, help="block size")
    selector = parser.add_mutually_exclusive_group(required=True)
    selector.add_argument("--N", type=_nonnegative_int, help="up-spin sector")
    selector.add_argument(
        "--equal-weight", action="store_true", help="uniform mixture over all sectors"
    )
    selector.add_argument("--weights", metavar="PATH", help="file with L+1 ensemble weights")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heisenberg-entropy",
        description="Block entanglement entropy of the ferromagnetic Heisenberg chain ground state.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug diagnostics on stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser("spectrum", help="reduced density matrix eigenvalues")
    _add_selector_arguments(spectrum)

    entropy = commands.add_parser("entropy", help="block entropy in bits")
    _add_selector_arguments(entropy)
    entropy.add_argument(
        "--asymptotic", action="store_true", help="add the closed-form value and its error"
    )

    scan = commands.add_parser("scan", help="exact versus asymptotic CSV sweep")
    mode = scan.add_mutually_exclusive_group(required=True)
    mode.add_argument("--L", type=_positive_int, help="finite chain length")
    mode.add_argument("--infinite", action="store_true", help="infinite chain")
    mode.add_argument("--preset", choices=("finite", "infinite"), help="standard curve family")
    scan.add_argument("--p", type=_fraction, help="filling as a fraction, e.g. 1/10")
    scan.add_argument("--n-from", type=_positive_int)
    scan.add_argument("--n-to", type=_positive_int)
    scan.add_argument("--step", type=_positive_int, default=1)
    scan.add_argument("--out", required=True, help="output path, or - for stdout")
    scan.add_argument("--workers", type=_positive_int, default=1)

    verify = commands.add_parser("verify", help="brute-force oracle suite")
    verify.add_argument("--max-L", type=_oracle_length, default=edo.DEFAULT_VERIFY_MAX_L)
    verify.add_argument("--workers", type=_positive_int, default=1)
    verify.add_argument("--seed", type=int, default=edo.DEFAULT_SEED)

    bench = commands.add_parser("bench", help="time sector spectrum + entropy")
    bench.add_argument("--L", type=_positive_int, required=True)
    bench.add_argument("--n", type=_nonnegative_int, required=True)
    bench.add_argument("--N", type=_nonnegative_int, required=True)
    bench.add_argument("--repeat", type=_positive_int, default=DEFAULT_BENCH_REPEAT)
    return parser


def _selected_spectrum(args):
    if args.n > args.L:
        raise DomainError(f"block size {args.n} exceeds chain length {args.L}")
    if args.N is not None:
        return rs.sector_spectrum(rs.SectorSpec(args.L, args.N, args.n))
    if args.equal_weight:
        return rs.equal_weight_spectrum(args.n)
    return rs.mixed_spectrum(args.L, args.n, rs.ingest_weights(args.weights, args.L))


def cmd_spectrum(args):
    spectrum = _selected_spectrum(args)
    for k, value in enumerate(spectrum.values()):
        print(f"{k} {value:{OUTPUT_FORMAT}}")
    return EXIT_OK


def cmd_entropy(args):
    if args.asymptotic and args.N is None:
        raise UsageError("--asymptotic needs a fixed sector (--N)")
    exact = be.shannon_entropy_bits(_selected_spectrum(args))
    if not args.asymptotic:
        print(f"{exact:{OUTPUT_FORMAT}}")
        return EXIT_OK
    asymptotic = be.asymptotic_entropy_finite(args.L, args.n, args.N / args.L)
    error = abs(exact - asymptotic)
    print(f"{exact:{OUTPUT_FORMAT}} {asymptotic:{OUTPUT_FORMAT}} {error:{OUTPUT_FORMAT}}")
    return EXIT_OK


def cmd_scan(args):
    if args.preset == "finite":
        rows = esr.preset_finite_rows(workers=args.workers)
    elif args.preset == "infinite":
        rows = esr.preset_infinite_rows(workers=args.workers)
    else:
        if args.p is None or args.n_from is None or args.n_to is None:
            raise UsageError("scan needs --p, --n-from and --n-to unless --preset is given")
        n_range = (args.n_from, args.n_to)
        if args.infinite:
            rows = esr.scan_infinite(args.p, n_range, args.step, workers=args.workers)
        else:
            rows = esr.scan_finite(args.L, args.p, n_range, args.step, workers=args.workers)
    if args.out == "-":
        count = esr.emit_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            count = esr.emit_csv(rows, handle)
    logger.info("wrote %d scan rows to %s", count, "stdout" if args.out == "-" else args.out)
    return EXIT_OK


def cmd_verify(args):
    results = edo.run_verification_suite(args.max_L, workers=args.workers, seed=args.seed)
    for family in results:
        status = "PASS" if family.passed else "FAIL"
        print(
            f"{status} {family.name} cases={family.cases} "
            f"failures={family.failures} max_deviation={family.max_deviation:.3g}"
        )
    return EXIT_OK if all(family.passed for family in results) else EXIT_FAILURE


def cmd_bench(args):
    result = time_sector_entropy(args.L, args.N, args.n, repeat=args.repeat)
    print(f"L={result.L} N={result.N} n={result.n} repeat={len(result.timings)}")
    print(f"best_s={result.best:.6f} mean_s={result.mean:.6f}")
    print(f"entropy_bits={result.entropy:{OUTPUT_FORMAT}} normalization_error={result.normalization_error:.3g}")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "entropy": cmd_entropy,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def run(argv=None):
    """
    Parses argv, dispatches one subcommand and returns the exit code.

    Args:
        argv (list, optional): argument list without the program name.
            Defaults to sys.argv[1:]

    Returns:
        int: EXIT_OK, EXIT_FAILURE or EXIT_USAGE
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    root = logging.getLogger()
    previous_level = root.level
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    logging.captureWarnings(True)

    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (edo.OracleError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_FAILURE
    finally:
        # leave the root logger as it was found
        logging.captureWarnings(False)
        root.removeHandler(handler)
        root.setLevel(previous_level)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
