"""
Bandit Conformal Simulation.

Online class-specific conformal prediction trained from bandit feedback:
a softmax classifier learns from importance-weighted arm pulls while
per-class thresholds track the conformity-score quantiles.
"""

__version__ = "0.1.0"
