"""Command line interface: ``lorprod run <scenario>`` and one subcommand per task."""

import argparse
import logging
import sys
from collections.abc import Sequence

from lorprod.scenario import EXIT_OK, EXIT_UNWRITABLE, OUT_ENV_VAR, RunResult, TaskKind, run_scenario


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="scenario file (JSON or YAML)")
    parser.add_argument("--out", default=None, help=f"output directory (default: scenario 'out', ${OUT_ENV_VAR}, ./lorprod_out)")
    parser.add_argument("--seed", type=int, default=None, help="sampling seed")
    parser.add_argument("--tol", type=float, default=None, help="numerical tolerance")
    parser.add_argument("--force", action="store_true", help="attempt push-up without a regularity certificate")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debugging")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorprod",
        description="Causal structure and curvature audits of discretised Lorentzian products.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    _add_common(commands.add_parser("run", help="run every task of a scenario"))
    for kind in TaskKind:
        _add_common(commands.add_parser(kind.value, help=f"run the scenario's {kind.value} task"))
    return parser


def _report(result: RunResult) -> None:
    for task in result.bundle.report.get("tasks", []):
        verdict = "pass" if task["passed"] else "FAIL"
        gating = "" if task["gating"] else " (not gating)"
        print(f"{task['name']}: {verdict}{gating}")  # noqa: T201
    if result.out_dir is not None and result.exit_code != EXIT_UNWRITABLE:
        print(f"report written to {result.out_dir}")  # noqa: T201
    if result.message:
        print(result.message, file=sys.stderr)  # noqa: T201


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    kind = None if args.command == "run" else TaskKind(args.command)
    result = run_scenario(args.scenario, out=args.out, seed=args.seed, tol=args.tol, force=args.force, kind=kind)
    _report(result)
    if result.exit_code != EXIT_OK:
        logging.getLogger(__name__).info("exit status %d", result.exit_code)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
