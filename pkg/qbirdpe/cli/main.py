import argparse
import json
import logging
import sys
from typing import List, Optional

from qbirdpe.cli.commands import SAMPLERS, cmd_compare, cmd_inject, cmd_run
from qbirdpe.cli.config import load_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbirdpe",
        description="Quantum-walk Metropolis parameter estimation of inspiral signals",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML config or a run manifest")
    common.add_argument("--out", required=True, help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Override every seed")

    sub.add_parser("inject", parents=[common], help="Generate injected data")

    run = sub.add_parser("run", parents=[common], help="Run a sampler on the data")
    run.add_argument("--sampler", choices=SAMPLERS, default="qbird")
    run.add_argument("--shots", type=int, default=None, help="Estimate marginals from N shots")
    run.add_argument("--qubit-cap", type=int, default=None, help="Largest simulated register")

    compare = sub.add_parser("compare", parents=[common], help="Compare samples to a reference")
    compare.add_argument("--samples", required=True, help="Samples CSV under test")
    compare.add_argument("--reference", required=True, help="Samples or grid posterior CSV")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        format=LOG_FORMAT, level=logging.DEBUG if args.verbose else logging.INFO
    )
    logger.info("Starting %s", args.command)
    try:
        config = load_config(
            args.config,
            seed=args.seed,
            shots=getattr(args, "shots", None),
            qubit_cap=getattr(args, "qubit_cap", None),
        )
        if args.command == "inject":
            cmd_inject(config, args.out)
        elif args.command == "run":
            cmd_run(config, args.sampler, args.out, command=" ".join(sys.argv))
        else:
            cmd_compare(config, args.samples, args.reference, args.out)
    except Exception as exc:
        logger.debug("Command failed", exc_info=True)
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    logger.info("Finished %s", args.command)
    return 0


if __name__ == "__main__":
    sys.exit(main())
