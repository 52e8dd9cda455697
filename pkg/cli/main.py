# cli/main.py
"""Command-line front end: ``python run.py <command> [options]``.

Exit codes: 0 success, 1 a verify check failed, 2 invalid configuration,
3 a numerical error aborted the command.
"""

import argparse
import logging
import sys
from typing import List, Optional

from cli import __version__
from cli.commands import cmd_evolve, cmd_potential, cmd_propagator, cmd_verify
from utils.config import load_config
from utils.errors import ConfigError, PropagatorError

logger = logging.getLogger("cli")

COMMANDS = {
    "potential": cmd_potential,
    "propagator": cmd_propagator,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}

EXIT_OK, EXIT_CHECKS_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run.py",
        description="Exact propagators of complex SUSY partner potentials, with numerical cross-checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario TOML file (defaults apply when omitted)")
    common.add_argument("--out", help="output path, overriding the [output] entry of the command")
    common.add_argument("--threads", type=int, help="worker threads for lattice and kernel evaluation")
    common.add_argument("--seed", type=int, help="seed of the randomized verify checks")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    commands.add_parser("potential", parents=[common], help="tabulate the partner potential V_c")
    commands.add_parser("propagator", parents=[common], help="evaluate K_c on the configured lattice")
    commands.add_parser("evolve", parents=[common], help="evolve a packet with every configured method")
    verify = commands.add_parser("verify", parents=[common], help="run the verification suite")
    verify.add_argument("--pattern", help="only run checks whose name matches this glob")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    overrides = {"threads": args.threads, "seed": args.seed, "pattern": getattr(args, "pattern", None)}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        logger.error("❌ invalid configuration: %s", exc)
        return EXIT_CONFIG

    logger.info("🚀 %s (%s example)", args.command, cfg.example)
    try:
        result = COMMANDS[args.command](cfg, args.out)
    except PropagatorError as exc:
        logger.error("❌ %s failed [%s]: %s", args.command, exc.code, exc)
        return EXIT_NUMERICAL

    if args.command == "verify" and not result.all_pass:
        return EXIT_CHECKS_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
