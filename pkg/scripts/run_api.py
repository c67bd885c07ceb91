#!/usr/bin/env python3
"""Serve the bandit conformal REST API with uvicorn."""

import argparse
import logging
import sys
from pathlib import Path

import uvicorn

# Add parent directory to Python path to allow imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from banditcp.cli import configure_logging
from banditcp.config import config

logger = logging.getLogger("banditcp-api")


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description="Serve the bandit conformal run API")
    parser.add_argument("--host", default=config.api.host, help="Bind address")
    parser.add_argument("--port", type=int, default=config.api.port, help="Bind port")
    parser.add_argument(
        "--reload", action="store_true", help="Reload on source changes (development)"
    )
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    configure_logging()

    logger.info(f"Serving run API on {args.host}:{args.port}")
    uvicorn.run(
        "banditcp.api.server:app",
        host=args.host,
        port=args.port,
        reload=args.reload,
        log_level=config.log_level.lower(),
    )


if __name__ == "__main__":
    main()
