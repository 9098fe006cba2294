import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Optional

from pydantic import ValidationError

from ivfalsify.cli.config import CliMethod, ConditionalMode, Dichotomize, OutputFormat, RunConfig, Subcommand
from ivfalsify.config import LOG_LEVELS, get_settings
from ivfalsify.exception import IvFalsifyError
from ivfalsify.falsify.procedures import (
    test_conditional_discrete,
    test_conditional_gs,
    test_conditional_perlevel,
    test_discrete,
    test_unconditional,
)
from ivfalsify.falsify.render import render_json, render_text
from ivfalsify.falsify.types import FalsifyReport
from ivfalsify.simlab.scenarios import run_scenarios
from ivfalsify.tabulate.ingest import bin_covariate, dichotomize_median, ingest_csv, tabulate
from ivfalsify.tabulate.types import ColumnMapping, StratifiedCounts

logger = logging.getLogger(__name__)

EXIT_NOT_REJECTED = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


def _parse_bin(raw: str) -> tuple[str, list[float]]:
    name, sep, edges = raw.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=e0,e1,..., got {raw!r}")
    try:
        return name, [float(edge) for edge in edges.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bin edges must be numbers, got {edges!r}") from None


def _comma_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivfalsify",
        description="Falsification tests of the instrumental variable model from unit-level CSV data.",
    )
    parser.add_argument(
        "--log-level", type=str.upper, choices=LOG_LEVELS, default=None, help="logging level on standard error"
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    for subcommand in (Subcommand.FALSIFY_UNCONDITIONAL, Subcommand.FALSIFY_CONDITIONAL, Subcommand.FALSIFY_DISCRETE):
        sub = subparsers.add_parser(subcommand.value)
        sub.add_argument("input", help="CSV file with a header row")
        sub.add_argument("--z", default="z", help="instrument column")
        sub.add_argument("--d", default="d", help="treatment column")
        sub.add_argument("--y", default="y", help="outcome column")
        sub.add_argument("--covariates", type=_comma_list, default=[], help="comma-separated covariate columns")
        sub.add_argument(
            "--bin",
            dest="bins",
            type=_parse_bin,
            action="append",
            default=[],
            metavar="NAME=e0,e1,...",
            help="discretise a numeric covariate at the given edges",
        )
        sub.add_argument("--alpha", type=float, default=None)
        sub.add_argument("--method", choices=[m.value for m in CliMethod], default=CliMethod.AUTO.value)
        sub.add_argument("--gamma", type=float, default=None, help="Berger-Boos confidence parameter")
        sub.add_argument("--dichotomize", choices=[m.value for m in Dichotomize], default=Dichotomize.NONE.value)
        sub.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default="text")
        if subcommand == Subcommand.FALSIFY_CONDITIONAL:
            sub.add_argument(
                "--mode",
                dest="conditional_mode",
                choices=[m.value for m in ConditionalMode],
                default=ConditionalMode.GAIL_SIMON.value,
            )

    simulate = subparsers.add_parser(Subcommand.SIMULATE.value)
    simulate.add_argument("--scenarios", required=True, help="JSON scenario file")
    simulate.add_argument("--log", required=True, help="CSV log the results are appended to")
    simulate.add_argument("--seed", type=int, default=None, help="master seed overriding the scenario seeds")
    simulate.add_argument("--workers", type=int, default=None)
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    values = {key: value for key, value in vars(args).items() if value is not None and key != "log_level"}
    if "bins" in values:
        values["bins"] = dict(values["bins"])
    return RunConfig.model_validate(values)


def _load(config: RunConfig) -> StratifiedCounts:
    mapping = ColumnMapping(z=config.z, d=config.d, y=config.y, covariates=config.covariates)
    records = ingest_csv(config.input, mapping)
    for name, edges in config.bins.items():
        records = bin_covariate(records, config.covariates.index(name), edges)
    if config.dichotomize == Dichotomize.MEDIAN:
        records = dichotomize_median(records)
    return tabulate(records, range(len(config.covariates)))


def falsify(config: RunConfig) -> FalsifyReport:
    strata = _load(config)
    method = config.test_method
    match config.subcommand:
        case Subcommand.FALSIFY_UNCONDITIONAL:
            return test_unconditional(strata.collapse(), config.alpha, method, config.gamma)
        case Subcommand.FALSIFY_CONDITIONAL if config.conditional_mode == ConditionalMode.GAIL_SIMON:
            return test_conditional_gs(strata, config.alpha)
        case Subcommand.FALSIFY_CONDITIONAL:
            return test_conditional_perlevel(strata, config.alpha, method, config.gamma)
        case Subcommand.FALSIFY_DISCRETE if config.covariates:
            return test_conditional_discrete(strata, config.alpha, method, config.gamma)
        case Subcommand.FALSIFY_DISCRETE:
            return test_discrete(strata.collapse(), config.alpha, method, config.gamma)
    raise ValueError(f"not a falsification subcommand: {config.subcommand}")


def run(config: RunConfig) -> int:
    """Execute one invocation and return its exit status; the report goes to standard output."""
    if config.subcommand == Subcommand.SIMULATE:
        results = run_scenarios(config.scenarios, config.log, config.workers, config.seed)
        for result in results:
            print(f"rate={result.rate:.4f} mc_se={result.mc_se:.4f} reps={result.reps} seed={result.seed}")
        return EXIT_NOT_REJECTED

    report = falsify(config)
    if config.output_format == OutputFormat.JSON:
        sys.stdout.write(render_json(report) + "\n")
    else:
        sys.stdout.write(render_text(report))
    return EXIT_REJECTED if report.overall_reject else EXIT_NOT_REJECTED


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        level = args.log_level or get_settings().log_level
        logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
        config = to_run_config(args)
        return run(config)
    except ValidationError as e:
        logger.error("Invalid configuration")
        print(f"ivfalsify: invalid configuration\n{e}", file=sys.stderr)
    except (IvFalsifyError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"ivfalsify: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
