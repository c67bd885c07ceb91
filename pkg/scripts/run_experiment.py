#!/usr/bin/env python3
"""Command-line script for running bandit conformal experiments."""

import sys
from pathlib import Path

# Add parent directory to Python path to allow imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from banditcp.cli import main

if __name__ == "__main__":
    sys.exit(main())
