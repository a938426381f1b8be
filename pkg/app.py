"""
Command-line entry point for the self-pumped microring photon-pair simulator
"""

import argparse
import logging
import sys
from dataclasses import asdict
from typing import List, Optional

from src.config.scenario_config import load_scenario, parse_scenario
from src.experiments.coincidence_runner import CoincidenceRunner
from src.experiments.common import RunContext
from src.experiments.jsd_runner import JsdRunner
from src.experiments.lasing_runner import LasingCurveRunner
from src.experiments.report_writer import ReportWriter, format_validation_report
from src.experiments.result_store import ResultStore
from src.experiments.schmidt_runner import SchmidtRunner
from src.experiments.spectra_runner import PumpSpectraRunner
from src.schema.data_models import Scenario
from src.tools.file_handler import FileHandler, Provenance
from src.tools.scheduler import Scheduler
from src.utils.config import config
from src.utils.errors import ConfigError
from src.utils.helpers import config_hash, get_timestamp

logger = logging.getLogger(__name__)

FIGURE_COMMANDS = ("lasing-curve", "pump-spectra", "jsd", "schmidt", "coincidences")
STOCHASTIC_COMMANDS = ("coincidences", "all")
RANDOM_PHASE_COMMANDS = ("jsd", "schmidt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringlase",
        description="Simulate a fiber-loop laser self-pumping a silicon microring photon-pair source")
    commands = parser.add_subparsers(dest="command", required=True)

    for command in FIGURE_COMMANDS + ("all",):
        sub = commands.add_parser(command)
        sub.add_argument("--config", required=True, help="scenario JSON file")
        sub.add_argument("--out", default=None, help="output directory")
        sub.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        sub.add_argument("--no-timestamp", action="store_true",
                         help="omit the generation time from output headers")
        if command in ("pump-spectra", "jsd", "schmidt"):
            sub.add_argument("--power", type=float, nargs="+", default=None,
                             help="ring input powers in mW (jsd: 0 forces a single-mode pump)")
        if command == "schmidt":
            sub.add_argument("--input", default=None, help="JSA or JSD matrix CSV to analyze")

    validate = commands.add_parser("validate")
    validate.add_argument("--config", required=True, help="scenario JSON file")
    return parser


def run_validate(path: str) -> int:
    try:
        with open(path, "r", encoding="utf-8") as f:
            _, report = parse_scenario(f.read())
    except OSError as e:
        print(f"ringlase: cannot read {path}: {e}", file=sys.stderr)
        return ConfigError.exit_code
    except ConfigError as e:
        print(f"ringlase: {e}", file=sys.stderr)
        return e.exit_code
    print(format_validation_report(path, report), end="")
    return 0 if report.valid else ConfigError.exit_code


def needs_seed(args: argparse.Namespace, scenario: Scenario) -> bool:
    """Stochastic commands, and theory spectra built from randomly phased pump modes"""
    if args.command in STOCHASTIC_COMMANDS:
        return True
    if args.command not in RANDOM_PHASE_COMMANDS or getattr(args, "input", None):
        return False
    return scenario.biphoton.theory_phase_model == "random"


def build_runners(command: str, context: RunContext, args: argparse.Namespace) -> list:
    powers = getattr(args, "power", None)
    powers_w = [p * 1e-3 for p in powers] if powers else None
    if command == "lasing-curve":
        return [LasingCurveRunner(context)]
    if command == "pump-spectra":
        return [PumpSpectraRunner(context, powers_w)]
    if command == "jsd":
        return [JsdRunner(context, powers_w)]
    if command == "schmidt":
        return [SchmidtRunner(context, powers_w, input_path=getattr(args, "input", None))]
    if command == "coincidences":
        return [CoincidenceRunner(context)]
    return [LasingCurveRunner(context), PumpSpectraRunner(context), JsdRunner(context),
            SchmidtRunner(context), CoincidenceRunner(context)]


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return run_validate(args.config)

    try:
        scenario, _ = load_scenario(args.config, stochastic=args.command in STOCHASTIC_COMMANDS,
                                    seed=args.seed)
        if scenario.seed is None and needs_seed(args, scenario):
            raise ConfigError("random pump phases need a seed",
                              issues=[("seed", "a seed is required when "
                                                "biphoton.theory_phase_model is 'random'")])
    except ConfigError as e:
        print(f"ringlase: configuration error: {e}", file=sys.stderr)
        return e.exit_code

    provenance = Provenance(config_hash=config_hash(scenario.to_dict()), seed=scenario.seed,
                            timestamp=None if args.no_timestamp else get_timestamp())
    handler = FileHandler(args.out or scenario.output_dir or config.output_dir, provenance)
    context = RunContext(scenario=scenario, handler=handler, scheduler=Scheduler())

    store = ResultStore()
    for runner in build_runners(args.command, context, args):
        logger.info(f"Starting stage {runner.name}")
        result = store.record(runner.run())
        if not result["success"]:
            print(f"ringlase: stage '{result['stage']}' failed: {result['message']}",
                  file=sys.stderr)
            break

    ReportWriter(handler).write_summary(scenario.name, store, provenance)
    store.save_manifest(handler.output_dir, asdict(provenance))
    return store.exit_code()


if __name__ == "__main__":
    sys.exit(main())
