"""
mg-secrecy command line.

    mg-secrecy asr       --config run.ini [--out asr.csv]
    mg-secrecy sop       --config run.ini
    mg-secrecy asymptote --config run.ini
    mg-secrecy sweep     --config run.ini --out nakagami_asr.csv
    mg-secrecy mc        --config run.ini --samples 1000000 --seed 7
    mg-secrecy validate  --config run.ini --samples 1000000 --seed 7

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validation FAIL.
"""
import argparse
import logging
import sys
from dataclasses import replace

from .config import ASR_OUTPUTS, SOP_OUTPUTS, load_config
from .errors import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, ConfigError, InvalidArgumentError,
                     NumericalError, OutOfDomainError, UnsupportedFamilyError, ValidationFailure)
from .sweep import ASYMPTOTE_COLUMNS, DEFAULT_SAMPLES, DEFAULT_SEED, SweepRunner, SweepSpec, write_table

COMMANDS = ("asr", "sop", "asymptote", "sweep", "validate", "mc")

_logger = logging.getLogger("mg_secrecy")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _samples(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("need at least 2 samples")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI run configuration")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="Monte Carlo seed (u64)")
    common.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES, help="Monte Carlo draws per point")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    common.add_argument("--debug", action="store_true", help="verbose logging")

    parser = argparse.ArgumentParser(prog="mg-secrecy",
                                     description="Secrecy rate and outage of square M-QAM over mixture-Gamma fading")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("asr", parents=[common], help="ASR, I_lim and I_con over the configured points")
    sub.add_parser("sop", parents=[common], help="SOP, 1 - F_E(H_M) and their gap over the configured points")
    sub.add_parser("asymptote", parents=[common], help="high-SNR coefficients of every group")
    sub.add_parser("sweep", parents=[common], help="every output listed in [sweep] outputs")
    sub.add_parser("mc", parents=[common], help="Monte Carlo estimates of [sweep] mc_metric")
    sub.add_parser("validate", parents=[common], help="quadrature versus Monte Carlo z-score report")
    return parser


def _restrict(spec: SweepSpec, command: str) -> SweepSpec:
    if command == "asr":
        return replace(spec, outputs=list(ASR_OUTPUTS))
    if command == "sop":
        return replace(spec, outputs=list(SOP_OUTPUTS))
    if command == "mc":
        return replace(spec, outputs=["mc"] + (["gaussian_baseline"] if spec.wants("gaussian_baseline") else []))
    return spec


def run(args) -> int:
    config = load_config(args.config)
    spec = SweepSpec.from_config(config)
    runner = SweepRunner(debug=args.debug)

    if args.command == "validate":
        report = runner.validate(spec, args.samples, args.seed)
        runner.write_report(report, spec, args.out, args.fmt)
        if not report.passed:
            raise ValidationFailure(report)
        return EXIT_OK

    if args.command == "asymptote":
        rows = runner.asymptotes(spec)
        write_table(args.out, ASYMPTOTE_COLUMNS, rows, spec.header, {}, args.fmt)
        return EXIT_OK

    if args.command == "sop" and config.constellation.target_rate is None:
        raise ConfigError("{}: [constellation] target_rate: required by the sop command".format(config.path))
    runner.run_sweep(_restrict(spec, args.command), args.out, args.fmt, args.samples, args.seed)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, InvalidArgumentError, OutOfDomainError, UnsupportedFamilyError) as e:
        _logger.error("%s", e)
        return EXIT_CONFIG
    except NumericalError as e:
        _logger.error("%s", e)
        return EXIT_NUMERICAL
    except ValidationFailure as e:
        _logger.error("%s", e)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
