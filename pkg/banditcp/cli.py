"""Command-line interface: run, replicate, sweep and inspect."""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from banditcp.config import config, parse_config
from banditcp.errors import BanditCPError, ConfigError
from banditcp.metrics.summary import read_summary
from banditcp.simulation.replication import replicate, run_single, sweep_eta2

logger = logging.getLogger("banditcp")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Flag destination -> configuration key
FLAG_KEYS = {
    "algorithm": "algorithm",
    "alpha": "alpha",
    "eta1": "eta1",
    "eta2": "eta2",
    "eta2_grid": "eta2_grid",
    "score": "score",
    "lam": "lambda",
    "kreg": "kreg",
    "policy": "policy",
    "floor": "floor",
    "data": "data",
    "gm_preset": "gm_preset",
    "hidden": "hidden",
    "T": "T",
    "batch": "batch",
    "reps": "reps",
    "seed": "seed",
    "out": "out",
    "log_every": "log_every",
    "delta": "delta",
    "trace": "trace",
    "snapshot": "snapshot",
    "label_audit": "label_audit",
    "workers": "workers",
}


def configure_logging(verbose: bool = False) -> None:
    """Set up root logging from the environment settings."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if config.log_file:
        handlers.append(logging.FileHandler(config.log_file))
    logging.basicConfig(
        level=getattr(logging, config.log_level),
        format=LOG_FORMAT,
        handlers=handlers,
    )
    if verbose:
        logging.getLogger("banditcp").setLevel(logging.DEBUG)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="Key=value run configuration file")
    parser.add_argument("--algorithm", choices=["alg1", "alg2"], help="Threshold algorithm")
    parser.add_argument("--alpha", type=float, help="Non-coverage rate")
    parser.add_argument("--eta1", type=float, help="Model learning rate")
    parser.add_argument("--eta2", type=float, help="Threshold learning rate (alg1)")
    parser.add_argument("--eta2-grid", type=str, help="Comma-separated expert learning rates")
    parser.add_argument("--score", choices=["softmax", "aps", "raps"], help="Conformity score")
    parser.add_argument("--lambda", dest="lam", type=float, help="RAPS penalty")
    parser.add_argument("--kreg", type=int, help="RAPS rank offset")
    parser.add_argument(
        "--policy",
        choices=["uniform", "softmax", "bayes", "label-oracle"],
        help="Arm-pulling policy",
    )
    parser.add_argument("--floor", type=float, help="Policy probability floor")
    parser.add_argument("--data", type=str, help="gm or file:PATH")
    parser.add_argument("--gm-preset", type=str, help="Gaussian-mixture preset")
    parser.add_argument("--hidden", type=int, help="Hidden units, 0 for a linear model")
    parser.add_argument("--T", dest="T", type=int, help="Number of stream instances")
    parser.add_argument("--batch", type=int, help="Batch size")
    parser.add_argument("--reps", type=int, help="Number of replications")
    parser.add_argument("--seed", type=int, help="Random seed for reproducibility")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument("--log-every", type=int, help="Batches between metric rows")
    parser.add_argument("--delta", type=float, help="Confidence level of the coverage bound")
    parser.add_argument("--trace", action="store_true", default=None, help="Write trace.csv")
    parser.add_argument(
        "--snapshot", action="store_true", default=None, help="Write the final model parameters"
    )
    parser.add_argument(
        "--label-audit",
        action="store_true",
        default=None,
        help="Fail on any label read outside feedback, metrics and oracles",
    )
    parser.add_argument("--workers", type=int, help="Parallel replication processes")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with its four subcommands."""
    parser = argparse.ArgumentParser(
        prog="banditcp",
        description="Online class-specific conformal prediction from bandit feedback",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(commands.add_parser("run", help="Run once with the given seed"))
    _add_run_flags(commands.add_parser("replicate", help="Run seeded replications"))
    _add_run_flags(commands.add_parser("sweep", help="Sweep eta2 over the grid (alg1)"))

    inspect = commands.add_parser("inspect", help="Pretty-print a summary file")
    inspect.add_argument("path", type=str, help="summary.txt or a run directory")
    inspect.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Configuration overrides for every flag that was given."""
    return {
        key: getattr(args, dest)
        for dest, key in FLAG_KEYS.items()
        if getattr(args, dest, None) is not None
    }


def _inspect(path: str) -> int:
    if os.path.isdir(path):
        path = os.path.join(path, "summary.txt")
    values = read_summary(path)
    width = max((len(key) for key in values), default=0)
    for key, value in values.items():
        print(f"{key.ljust(width)}  {value}")
    return EXIT_OK


def _run_command(args: argparse.Namespace) -> int:
    run_config = parse_config(args.config, overrides_from_args(args))
    logger.info(f"Configuration hash {run_config.config_hash()[:12]}")

    if args.command == "run":
        handle = run_single(run_config)
        print(handle.output_dir)
    elif args.command == "replicate":
        result = replicate(run_config)
        for handle in result.handles:
            print(f"{handle.run_id}\t{handle.status.value}")
    else:
        result = sweep_eta2(run_config)
        print(result.table.to_string(index=False))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the command-line interface.

    Returns:
        Exit code: 0 on success, 1 on a configuration error, 2 on a runtime error
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        if args.command == "inspect":
            return _inspect(args.path)
        return _run_command(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except BanditCPError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
