"""Command line entry point for ``opinion-pds``.

Each invocation runs one command. The JSON payload goes to stdout; logs and
errors go to stderr. Exit status: 0 ok, 2 configuration error, 3 runtime
error or failed checks, 4 generation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from . import __version__
from .api.commands import COMMANDS
from .config import validate_settings_on_startup
from .error_boundary import error_boundary, exit_code_for
from .exceptions import EXIT_OK, EXIT_RUNTIME, OpinionPDSError
from .infrastructure.repositories import ConfigRepository, dump_json
from .logging import derive_run_id, get_logger, set_run_id, setup_structured_logging, to_jsonable


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opinion-pds",
        description="Budgeted multi-topic opinion dynamics as a projected dynamical system.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a configured instance")
    p.add_argument("--config", required=True, help="run configuration (JSON or YAML)")
    p.add_argument("--out-dir", default=".", help="directory for the CSV and summary files")

    p = sub.add_parser("analyze", help="relations, equilibrium, partition and lemma verdicts")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="also write the report to this file")

    p = sub.add_parser("generate", help="write a seeded random run configuration")
    p.add_argument("--n", type=int, required=True, help="number of agents")
    p.add_argument("--m", type=int, required=True, help="number of topics")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--regime", default="a1", help="a1, a2, a3 or signed")
    p.add_argument("--budget-scale", type=float, default=1.0)
    p.add_argument("--density", type=float, default=0.5, help="extra edge probability")
    p.add_argument("--name")
    p.add_argument("--out", required=True)

    p = sub.add_parser("plot", help="render a trajectory CSV to SVG")
    p.add_argument("--traj", required=True)
    p.add_argument("--eq", help="JSON with an equilibrium, for the error panel")
    p.add_argument("--config", help="run configuration, for the allocation panel")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="run the acceptance checks")
    p.add_argument("--config", required=True)
    p.add_argument("--quick", action="store_true", help="scaled-down sweeps")
    p.add_argument("--instance-only", action="store_true", help="skip the randomized sweeps")
    p.add_argument("--out", help="also write the check report to this file")
    return parser


def _run_id(args: argparse.Namespace) -> str:
    config = getattr(args, "config", None)
    if config is not None:
        try:
            return derive_run_id(ConfigRepository().read_bytes(Path(config)))
        except OpinionPDSError:
            pass
    return derive_run_id(" ".join(f"{k}={v}" for k, v in sorted(vars(args).items())).encode())


def _report_error(exc: OpinionPDSError) -> None:
    sys.stderr.write(json.dumps(to_jsonable({"error": exc.to_dict()}), default=str) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one command and return its exit status."""
    args = build_parser().parse_args(argv)
    settings = validate_settings_on_startup()
    setup_structured_logging()
    set_run_id(_run_id(args))
    logger = get_logger(f"cli.{args.command}")

    try:
        with error_boundary(args.command, {"argv": list(argv) if argv is not None else sys.argv[1:]}):
            payload = COMMANDS[args.command](args=args, settings=settings, logger=logger)
    except OpinionPDSError as exc:
        _report_error(exc)
        return exit_code_for(exc)

    sys.stdout.write(dump_json(payload))
    if args.command == "check" and not payload["passed"]:
        failed = [c["name"] for c in payload["checks"] if not c["passed"]]
        sys.stderr.write(f"checks failed: {', '.join(failed)}\n")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
