"""Command-line entry point.

    python -m steen_lab run --config FILE [--suite default] [--out DIR] [--traces] [--no-timings] [--jobs N]
    python -m steen_lab steen verify --config FILE
    python -m steen_lab dirac monodromy --config FILE --lambda-grid SPEC
    python -m steen_lab deform verify --config FILE
    python -m steen_lab deform scan-alpha --config FILE --alpha-min A --alpha-max B --alpha-steps N
"""

import argparse
import json
import logging
import os
import sys
from typing import Callable, List, Optional

from dotenv import load_dotenv

from steen_lab import configure_level
from steen_lab.config.scenario_config import (
    DeformScenario,
    DiracScenario,
    FullChainScenario,
    ScenarioConfiguration,
    SteenScenario,
    alpha_range,
    parse_lambda_grid,
)
from steen_lab.errors import ConfigError
from steen_lab.potentials.potential import load_potential
from steen_lab.runner import emit_traces, run_scenarios, write_report
from steen_lab.suites import SUITES

logger = logging.getLogger("steen-lab")

DEFAULT_OUT = "./steen-lab-out"


def _add_output_options(parser: argparse.ArgumentParser, config_required: bool = True):
    parser.add_argument("--config", type=str, required=config_required, help="Scenario document (JSON or YAML).")
    parser.add_argument("--out", type=str, default=DEFAULT_OUT, help=f"Output directory (default: {DEFAULT_OUT}).")
    parser.add_argument("--traces", action="store_true", help="Also write CSV traces.")
    parser.add_argument("--no-timings", action="store_true", help="Omit wall-clock timings from the report.")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads (default: 1).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steen-lab",
        description="Verify Pinney superposition, Dirac monodromy invariants and deformed Dirac partial solutions.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run every scenario of a document and/or a bundled suite.")
    _add_output_options(run, config_required=False)
    run.add_argument("--suite", choices=sorted(SUITES), help="Bundled suite to run.")

    steen = commands.add_parser("steen", help="Oscillator superposition pipelines.").add_subparsers(
        dest="action", required=True)
    _add_output_options(steen.add_parser("verify", help="Run the steen scenarios of a document."))

    dirac = commands.add_parser("dirac", help="Monodromy pipelines.").add_subparsers(dest="action", required=True)
    monodromy = dirac.add_parser("monodromy", help="Monodromy checks over a grid of spectral parameters.")
    _add_output_options(monodromy)
    monodromy.add_argument("--lambda-grid", type=str, required=True,
                           help="'re0:re1:nre,im0:im1:nim' or a single complex 'a+bj'.")

    deform = commands.add_parser("deform", help="Deformed Dirac pipelines.").add_subparsers(dest="action", required=True)
    _add_output_options(deform.add_parser("verify", help="Run the deform scenarios of a document."))
    scan = deform.add_parser("scan-alpha", help="Deform scenarios with an explicit alpha_bar grid.")
    _add_output_options(scan)
    scan.add_argument("--alpha-min", type=float, default=-1.0)
    scan.add_argument("--alpha-max", type=float, default=1.0)
    scan.add_argument("--alpha-steps", type=int, default=41)
    return parser


def _load(path: Optional[str], suite: Optional[str] = None) -> ScenarioConfiguration:
    configuration = ScenarioConfiguration()
    if suite:
        configuration.load_from_dict(SUITES[suite]())
    if path:
        configuration.load_from_file(path)
    return configuration


def _load_dirac(path: str) -> ScenarioConfiguration:
    """A scenario document, or a bare potential document turned into one dirac scenario.

    Raises:
        ConfigError: If a JSON document is not an object (pointer '' for the document root).
    """
    with open(path, "r") as file:
        head = file.read()
    document = None
    if path.endswith(".json"):
        try:
            document = json.loads(head)
        except json.JSONDecodeError:
            pass  # the scenario loader reports it with its position
        else:
            if not isinstance(document, dict):
                raise ConfigError(f"'{path}' must hold a JSON object, got {type(document).__name__}.", "")
    if not (isinstance(document, dict) and "q1" in document):
        return _load(path)
    configuration = ScenarioConfiguration()
    name = os.path.splitext(os.path.basename(path))[0]
    configuration.scenarios.append(DiracScenario(name=name, potential=load_potential(path)))
    return configuration


def _select(configuration: ScenarioConfiguration, keep: Callable, update: Optional[dict] = None) -> ScenarioConfiguration:
    selected = ScenarioConfiguration()
    selected.integrator = configuration.integrator
    selected.scenarios = [s.model_copy(update=update) if update else s for s in configuration.scenarios if keep(s)]
    skipped = [f"{s.name} ({s.kind})" for s in configuration.scenarios if not keep(s)]
    if skipped:
        logger.warning(f"Skipping scenarios this command does not run: {', '.join(skipped)}")
    if not selected.scenarios:
        logger.warning("No scenario of the requested kind in the document.")
    return selected


def _execute(configuration: ScenarioConfiguration, args) -> int:
    result = run_scenarios(configuration, jobs=args.jobs)
    path = write_report(result, args.out, include_timings=not args.no_timings)
    if args.traces:
        emit_traces(result.reports, args.out)
    for report in result.reports:
        print(f"{report.scenario}: {'passed' if report.passed else 'FAILED'} ({len(report.records)} checks)")
    print(f"Report: {path}")
    return result.exit_status


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    # .env may set the level after the package logger was configured
    configure_level()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if not args.config and not args.suite:
                print("run needs --config, --suite, or both.", file=sys.stderr)
                return 2
            configuration = _load(args.config, args.suite)
        elif args.command == "steen":
            configuration = _select(_load(args.config), lambda s: isinstance(s, SteenScenario))
        elif args.command == "dirac":
            grid = parse_lambda_grid(args.lambda_grid)
            configuration = _select(_load_dirac(args.config), lambda s: isinstance(s, DiracScenario),
                                    {"lambdas": grid, "lambda_grid": None})
        elif args.action == "verify":
            configuration = _select(_load(args.config), lambda s: isinstance(s, (DeformScenario, FullChainScenario)))
        else:
            if args.alpha_steps < 1:
                print("--alpha-steps must be positive.", file=sys.stderr)
                return 2
            alphas = alpha_range(args.alpha_min, args.alpha_max, args.alpha_steps)
            configuration = _select(_load(args.config), lambda s: isinstance(s, (DeformScenario, FullChainScenario)),
                                    {"alpha_grid": alphas})
    except ConfigError as e:
        location = f" (at {e.pointer or 'the document root'})" if e.pointer is not None else ""
        print(f"Configuration error{location}: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    return _execute(configuration, args)


if __name__ == "__main__":
    sys.exit(main())
