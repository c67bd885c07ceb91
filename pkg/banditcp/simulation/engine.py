"""Online engine running the bandit conformal loop batch by batch."""

import logging
from typing import Dict, Optional

import numpy as np
import pandas as pd

from banditcp.config import Algorithm, RunConfig
from banditcp.conformal.experts import (ExpertBank, aggregate_quantile, expert_step,
                                        leading_expert)
from banditcp.conformal.prediction import predict_sets
from banditcp.conformal.quantile import QuantileBank, quantile_step
from banditcp.core.scores import score_batch
from banditcp.data.batching import batch_iterator
from banditcp.data.gaussian import gm_posterior
from banditcp.data.loaders import open_source
from banditcp.data.records import Batch, LabelSite
from banditcp.errors import BanditCPError, ConfigError, RunError
from banditcp.metrics.accumulator import (CoverageAccumulator, acum_cvg_extrema, acum_size,
                                          arm_accuracy, class_coverage, record_batch)
from banditcp.metrics.diagnostics import (TheoremDiagnostics, attach_expert_losses,
                                          bandit_regret, coverage_gap, expert_regret,
                                          expert_regret_bound, policy_constants,
                                          telescoping_residual, thm1_bound)
from banditcp.metrics.summary import RunSummary
from banditcp.model.network import (forward, init_parameters, per_instance_loss,
                                    update_from_arrays)
from banditcp.policy.base_policy import PolicyContext
from banditcp.policy.factory import PolicyFactory
from banditcp.policy.feedback import feedback_weights, sample_arms
from banditcp.simulation.state import EventRecord, RandomStreams, RunState

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["t", "class", "tau", "tau_bar"]


class OnlineEngine:
    """
    Runs one seeded pass of the online loop.

    Every batch is processed in six steps: forward pass with the current
    model, scores with fresh uniform draws, prediction sets and metrics,
    arm pulls with feedback, per-instance threshold updates in record order,
    and one mean-gradient model step.
    """

    def __init__(self, run_config: RunConfig, seed: Optional[int] = None):
        """
        Initialize the engine.

        Args:
            run_config: Resolved run configuration
            seed: Seed overriding ``run_config.seed``

        Raises:
            ConfigError: If the settings do not fit the data (for example a
                floor above 1/K)
        """
        self.config = run_config
        self.seed = run_config.seed if seed is None else seed
        self.streams = RandomStreams.from_seed(self.seed)

        self.source = open_source(run_config.data, self.streams.data, run_config.T)
        self.n_classes = self.source.n_classes
        if run_config.policy.floor > 1.0 / self.n_classes:
            raise ConfigError(
                "floor", f"{run_config.policy.floor} exceeds 1/K = {1.0 / self.n_classes}"
            )
        self.policy = PolicyFactory().create_policy(run_config.policy)

        priors = self.source.mixture.priors if self.source.mixture is not None else None
        floor, b_closed = policy_constants(run_config.policy, self.n_classes, priors)

        params = init_parameters(
            self.source.n_features, self.n_classes, run_config.hidden, self.streams.init
        )
        if run_config.algorithm == Algorithm.ALG1:
            bank = QuantileBank.initial(self.n_classes, run_config.alpha, run_config.eta2)
        else:
            bank = ExpertBank.initial(self.n_classes, run_config.alpha, run_config.eta2_grid)

        self.state = RunState(
            params=params,
            bank=bank,
            accumulator=CoverageAccumulator(self.n_classes),
            diagnostics=TheoremDiagnostics(
                n_classes=self.n_classes,
                alpha=run_config.alpha,
                delta_conf=run_config.delta,
                floor=floor,
                b_closed=b_closed,
                log_scores=run_config.log_scores,
            ),
            events=[] if run_config.event_log else None,
        )

    def run(self) -> RunSummary:
        """
        Run the loop over ``T`` instances.

        Returns:
            Summary with the logged series and final diagnostics

        Raises:
            RunError: If any step fails, naming the batch index
        """
        cfg = self.config
        logger.info(
            f"Starting {cfg.algorithm.value} run: seed={self.seed}, T={cfg.T}, "
            f"batch={cfg.batch_size}, K={self.n_classes}, policy={cfg.policy.kind.value}"
        )
        batches = batch_iterator(
            self.source.stream,
            cfg.batch_size,
            shuffle_buffer=cfg.data.shuffle_buffer,
            rng=self.streams.data,
            audit=cfg.label_audit,
        )
        index = 0
        try:
            for batch in batches:
                index = batch.index
                self.step(batch)
                if self.state.batch_index % cfg.log_every == 0:
                    self.state.snapshot_row()
        except BanditCPError as e:
            if isinstance(e, RunError):
                raise
            logger.error(f"Run with seed {self.seed} failed at batch {index}: {e}")
            raise RunError(index, str(e)) from e
        except (ValueError, FloatingPointError, IndexError) as e:
            logger.error(f"Run with seed {self.seed} failed at batch {index}: {e}")
            raise RunError(index, str(e)) from e

        # The last batch is always logged so the series ends on the final state
        if self.state.batch_index % cfg.log_every != 0:
            self.state.snapshot_row()

        summary = self._build_summary()
        logger.info(
            f"Finished run seed={self.seed}: acum_cvg_min={summary.final['acum_cvg_min']}, "
            f"acum_cvg_max={summary.final['acum_cvg_max']}, acum_size={summary.final['acum_size']}"
        )
        return summary

    def step(self, batch: Batch) -> None:
        """Process one batch."""
        cfg = self.config
        state = self.state
        n = len(batch)
        rows = np.arange(n)

        # 1. Posterior of the model before this batch's update
        features = batch.features
        probs = self._forward(features)

        # 2. Scores with one uniform draw per instance
        u = self.streams.u.random(n)
        scores = score_batch(probs, u, cfg.score)

        # 3. Prediction sets and metrics
        membership = predict_sets(scores, state.prediction_thresholds())
        labels = batch.reveal(LabelSite.METRICS)
        covered = membership[rows, labels]
        true_scores = scores[rows, labels]

        # 4. Arm pulls, feedback and the indicator estimate
        context = PolicyContext(n_classes=self.n_classes, model_probs=probs, n_rows=n)
        if self.policy.spec.needs_true_posterior:
            context.true_posterior = gm_posterior(self.source.mixture, features)
        if self.policy.spec.needs_labels:
            context.labels = batch.reveal(LabelSite.ORACLE)
        pi = self.policy.probabilities(context)
        arms = sample_arms(pi, self.streams.arms)
        correct = arms == batch.reveal(LabelSite.FEEDBACK)
        weights = feedback_weights(pi, arms, correct)

        ce_losses = per_instance_loss(probs, arms, weights, state.monitor)
        record_batch(state.accumulator, membership, labels, arms, ce_losses)
        state.diagnostics.record_coverage(labels, covered, true_scores)

        # 5. Threshold updates, one instance at a time in record order
        for i in range(n):
            t = state.instances + i + 1
            k = int(arms[i])
            weight = float(weights[i])
            self._update_thresholds(t, k, float(scores[i, k]), weight)
            if state.events is not None:
                state.events.append(
                    EventRecord(t=t, y=int(labels[i]), covered=bool(covered[i]), arm=k, weight=weight)
                )

        # 6. One model step on the batch mean
        state.params, _ = update_from_arrays(state.params, features, arms, weights, cfg.eta1)

        state.instances += n
        state.batch_index += 1
        logger.debug(
            f"Batch {batch.index}: instances={state.instances}, "
            f"covered={int(covered.sum())}/{n}, correct pulls={int(correct.sum())}"
        )

    def _forward(self, features: np.ndarray) -> np.ndarray:
        _, probs = forward(self.state.params, features)
        return probs

    def _update_thresholds(self, t: int, k: int, s_k: float, weight: float) -> None:
        state = self.state
        bank = state.bank
        if isinstance(bank, QuantileBank):
            state.diagnostics.record_update(k, s_k, weight, bank.tau[k])
            quantile_step(bank, k, s_k, weight)
            if self.config.trace and weight != 0:
                state.trace_rows.append((t, k, bank.tau[k], bank.tau[k]))
            return

        if weight != 0:
            state.diagnostics.record_update(k, s_k, weight, aggregate_quantile(bank, k))
        expert_step(bank, k, s_k, weight)
        if self.config.trace and weight != 0:
            lead = leading_expert(bank, k)
            state.trace_rows.append((t, k, bank.taus[lead, k], aggregate_quantile(bank, k)))

    def _build_summary(self) -> RunSummary:
        cfg = self.config
        state = self.state
        acc = state.accumulator
        diag = state.diagnostics
        bank = state.bank
        K = self.n_classes
        T = state.instances

        if isinstance(bank, ExpertBank):
            attach_expert_losses(diag, bank)
        thresholds = state.prediction_thresholds()
        lowest, highest = acum_cvg_extrema(acc)

        final: Dict[str, Optional[float]] = {
            "algorithm": cfg.algorithm.value,
            "acum_cvg_min": lowest,
            "acum_cvg_max": highest,
            "acum_size": acum_size(acc),
            "cum_ce_loss": acc.ce_loss_sum,
            "log_clamps": state.monitor.saturated,
        }
        coverage = class_coverage(acc)
        accuracy = arm_accuracy(acc)
        for k in range(K):
            final[f"cvg_class_{k}"] = coverage[k]
        for k in range(K):
            final[f"cvg_gap_{k}"] = coverage_gap(diag, k)
        for k in range(K):
            final[f"regret_{k}"] = bandit_regret(diag, k, T)
        for k in range(K):
            final[f"tau_final_{k}"] = float(thresholds[k])
        for k in range(K):
            final[f"arm_accuracy_{k}"] = accuracy[k]
        if isinstance(bank, QuantileBank):
            for k in range(K):
                final[f"thm1_bound_{k}"] = thm1_bound(diag, k, T, bank.eta2, bank.tau[k])
            for k in range(K):
                final[f"telescoping_residual_{k}"] = telescoping_residual(diag, bank, k)
        else:
            for k in range(K):
                final[f"expert_regret_{k}"] = expert_regret(diag, k)
            for k in range(K):
                final[f"expert_regret_bound_{k}"] = (
                    expert_regret_bound(diag.floor[k], T, bank.n_experts)
                    if diag.floor is not None and T > 0
                    else None
                )

        trace = None
        if cfg.trace:
            trace = pd.DataFrame(state.trace_rows, columns=TRACE_COLUMNS)
        return RunSummary(
            seed=self.seed,
            config_hash=cfg.config_hash(),
            n_classes=K,
            series=pd.DataFrame(state.rows),
            final=final,
            diagnostics=diag,
            thresholds=thresholds,
            trace=trace,
            events=state.events,
            params=state.params if cfg.snapshot else None,
        )


def run_online(run_config: RunConfig, seed: Optional[int] = None) -> RunSummary:
    """
    Run the online loop once.

    Args:
        run_config: Resolved run configuration
        seed: Seed overriding ``run_config.seed``

    Returns:
        The run summary
    """
    return OnlineEngine(run_config, seed=seed).run()
