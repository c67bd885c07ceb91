"""API route handlers for the bandit conformal API."""
