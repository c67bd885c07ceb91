"""Test suite for the bandit conformal package."""
