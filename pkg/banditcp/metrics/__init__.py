"""
Metrics for bandit conformal runs.

Accumulative coverage and set-size metrics, the coverage and regret
diagnostics, and run summaries with their output files.
"""

from banditcp.metrics.accumulator import (CoverageAccumulator, acum_cvg_extrema, acum_size,
                                          arm_accuracy, class_coverage, record_batch,
                                          record_step)
from banditcp.metrics.diagnostics import (TheoremDiagnostics, attach_expert_losses,
                                          bandit_regret, coverage_gap, expert_regret,
                                          expert_regret_bound, oracle_check_loss,
                                          oracle_tau_star, policy_constants,
                                          telescoping_residual, thm1_bound, zeta)
from banditcp.metrics.summary import (RunSummary, aggregate_runs, first_step_in_band,
                                      metrics_columns, read_metrics_csv, read_summary,
                                      size_oscillation, write_aggregate_csv,
                                      write_metrics_csv, write_summary)

__all__ = [
    "CoverageAccumulator",
    "record_step",
    "record_batch",
    "class_coverage",
    "acum_cvg_extrema",
    "acum_size",
    "arm_accuracy",
    "TheoremDiagnostics",
    "policy_constants",
    "coverage_gap",
    "oracle_tau_star",
    "oracle_check_loss",
    "bandit_regret",
    "zeta",
    "thm1_bound",
    "expert_regret",
    "expert_regret_bound",
    "telescoping_residual",
    "attach_expert_losses",
    "RunSummary",
    "metrics_columns",
    "write_metrics_csv",
    "read_metrics_csv",
    "write_summary",
    "read_summary",
    "aggregate_runs",
    "write_aggregate_csv",
    "first_step_in_band",
    "size_oscillation",
]
