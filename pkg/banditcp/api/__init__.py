"""
API module for bandit conformal runs.

This module provides a REST API for starting runs and retrieving their
metrics and diagnostics.
"""

from banditcp.api.server import app

__all__ = ["app"]
