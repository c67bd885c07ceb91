"""Tests for the online engine, replications and sweeps."""

import os

import numpy as np
import pandas as pd
import pytest

from banditcp.conformal import QuantileBank, split_thresholds
from banditcp.data import gm_sample, load_mixture_preset
from banditcp.errors import ConfigError, InvalidInputError, RunError
from banditcp.metrics import read_summary
from banditcp.simulation import (OnlineEngine, RandomStreams, RunStatus, replicate,
                                 replication_seeds, run_online, run_single, sweep_eta2)


def _cfg(base_config, **changes):
    return base_config.replace(**changes)


def test_engine_initialization(base_config):
    """The engine starts from zero thresholds and empty totals."""
    # Act
    engine = OnlineEngine(base_config)

    # Assert
    assert engine.n_classes == 3
    assert isinstance(engine.state.bank, QuantileBank)
    np.testing.assert_array_equal(engine.state.prediction_thresholds(), np.zeros(3))
    assert engine.state.instances == 0


def test_random_streams_are_independent_and_seeded():
    first, second = RandomStreams.from_seed(5), RandomStreams.from_seed(5)
    assert first.u.random() == second.u.random()
    streams = RandomStreams.from_seed(5)
    assert streams.u.random() != streams.arms.random()


def test_single_step_without_feedback_changes_nothing(base_config, monkeypatch):
    """A lone instance with no correct pull leaves the model and thresholds alone."""
    # Arrange
    cfg = _cfg(base_config, T=1, batch=1, score="softmax")
    monkeypatch.setattr(
        "banditcp.simulation.engine.feedback_weights",
        lambda pi, arms, correct: np.zeros(len(arms)),
    )
    engine = OnlineEngine(cfg)
    before = engine.state.params.copy()

    # Act
    summary = engine.run()

    # Assert
    for name, value in before.items():
        np.testing.assert_array_equal(engine.state.params.tensors[name], value)
    np.testing.assert_array_equal(engine.state.bank.tau, np.zeros(3))
    assert len(summary.series) == 1
    assert summary.series.loc[0, "step"] == 1
    # Softmax scores are non-negative, so the initial set holds every class
    assert summary.final["acum_size"] == 3.0


def test_series_logs_every_batch_and_the_last(base_config):
    summary = run_online(_cfg(base_config, T=100, batch=32, log_every=2))
    assert list(summary.series["step"]) == [64, 100]
    assert summary.steps == 100


def test_label_oracle_matches_full_feedback_tracking(base_config):
    """With the true label always pulled, alg1 is plain pinball-loss tracking."""
    cfg = _cfg(base_config, policy="label_oracle", T=2000, trace=True, eta2=0.05)
    summary = run_online(cfg)
    trace = summary.trace
    for k in range(3):
        tau = 0.0
        expected = []
        for s in summary.diagnostics.score_log[k]:
            tau = tau + cfg.eta2 * 1.0 * (cfg.alpha - float(s < tau))
            expected.append(tau)
        observed = trace.loc[trace["class"] == k, "tau"].to_numpy()
        assert np.array_equal(observed, np.array(expected))
        assert summary.final[f"tau_final_{k}"] == expected[-1]


def test_telescoping_identity_holds(base_config):
    summary = run_online(_cfg(base_config, T=10000, batch=256))
    for k in range(3):
        assert summary.final[f"telescoping_residual_{k}"] <= 1e-9


def test_label_audit_run_succeeds(base_config):
    summary = run_online(_cfg(base_config, label_audit=True, policy="bayes", floor=0.05))
    assert summary.steps == base_config.T


def test_event_log_replay_reproduces_coverage_gap(base_config):
    summary = run_online(_cfg(base_config, event_log=True))
    events = summary.events
    assert [e.t for e in events] == list(range(1, base_config.T + 1))
    for k in range(3):
        class_events = [e for e in events if e.y == k]
        misses = sum(1 for e in class_events if not e.covered)
        gap = abs(base_config.alpha - misses / len(class_events))
        assert summary.final[f"cvg_gap_{k}"] == gap


def test_floor_above_one_over_k(base_config):
    with pytest.raises(ConfigError) as excinfo:
        OnlineEngine(_cfg(base_config, policy="softmax", floor=0.4))
    assert excinfo.value.key == "floor"


def test_run_error_names_the_batch(base_config, monkeypatch):
    calls = {"n": 0}

    def _failing_scores(probs, u, spec):
        calls["n"] += 1
        if calls["n"] == 3:
            raise InvalidInputError("broken scores")
        return np.asarray(probs)

    monkeypatch.setattr("banditcp.simulation.engine.score_batch", _failing_scores)
    with pytest.raises(RunError) as excinfo:
        run_online(base_config)
    assert excinfo.value.step == 2


def test_alg2_meets_the_expert_regret_bound(base_config):
    cfg = _cfg(base_config, algorithm="alg2", T=3000, batch=64)
    summary = run_online(cfg)
    assert summary.final["algorithm"] == "alg2"
    for k in range(3):
        regret = summary.final[f"expert_regret_{k}"]
        bound = summary.final[f"expert_regret_bound_{k}"]
        assert regret is not None and bound is not None
        assert regret <= bound


def test_alg1_summary_carries_the_coverage_bound(base_config):
    summary = run_online(base_config)
    for k in range(3):
        assert summary.final[f"thm1_bound_{k}"] > 0
        assert summary.final[f"regret_{k}"] is not None
        assert 0.0 <= summary.final[f"cvg_class_{k}"] <= 1.0
    assert 0.0 <= summary.final["acum_size"] <= 3.0


def test_run_on_file_data(base_config, tmp_path):
    records = gm_sample(load_mixture_preset("binary"), np.random.default_rng(1), 200)
    path = tmp_path / "binary.csv"
    path.write_text("".join(f"{r.x[0]!r},{r.x[1]!r},{r.y + 1}\n" for r in records))
    summary = run_online(_cfg(base_config, data=f"file:{path}", classes=2, T=300))
    assert summary.n_classes == 2
    assert summary.steps == 300
    assert summary.final["thm1_bound_0"] is None


def test_hidden_layer_model_runs(base_config):
    summary = run_online(_cfg(base_config, hidden=8, score="raps", snapshot=True))
    assert summary.params.hidden_units == 8


def test_run_single_writes_outputs(base_config):
    handle = run_single(_cfg(base_config, trace=True, snapshot=True))
    assert handle.status == RunStatus.COMPLETED
    assert handle.run_id == "run_seed7"
    for name in ("metrics.csv", "summary.txt", "trace.csv", "params.txt"):
        assert os.path.exists(os.path.join(handle.output_dir, name))
    values = read_summary(handle.paths["summary"])
    assert values["seed"] == "7"
    assert values["config_hash"] == handle.summary.config_hash


@pytest.mark.parametrize("algorithm", ["alg1", "alg2"])
def test_same_seed_gives_identical_files(base_config, tmp_path, algorithm):
    cfg = _cfg(base_config, algorithm=algorithm)
    first = run_single(cfg, out_dir=str(tmp_path / "a"))
    second = run_single(cfg, out_dir=str(tmp_path / "b"))
    for name in ("metrics", "summary"):
        with open(first.paths[name], "rb") as f_a, open(second.paths[name], "rb") as f_b:
            assert f_a.read() == f_b.read()


def test_replicate_writes_one_directory_per_run(base_config):
    result = replicate(base_config)
    out = base_config.out
    assert [h.run_id for h in result.handles] == ["rep0_seed7", "rep1_seed8"]
    assert os.path.exists(os.path.join(out, "aggregate.csv"))
    for handle in result.handles:
        assert os.path.exists(handle.paths["summary"])
    assert replication_seeds(base_config) == [(0, 7), (1, 8)]


def test_single_replication_aggregate_is_the_run(base_config):
    result = replicate(_cfg(base_config, reps=1), out_dir="")
    series = result.summaries[0].series
    np.testing.assert_allclose(result.aggregate["acum_size_mean"], series["acum_size"])
    np.testing.assert_allclose(result.aggregate["acum_size_std"], 0.0)
    assert not os.path.exists(base_config.out)


def test_replicate_reports_partial_failures(base_config, monkeypatch):
    from banditcp.simulation import replication

    def _flaky(run_config, seed=None):
        if seed == 8:
            raise RunError(4, "diverged")
        return run_online(run_config, seed=seed)

    monkeypatch.setattr(replication, "run_online", _flaky)
    result = replicate(base_config, out_dir="")
    assert [h.status for h in result.handles] == [RunStatus.COMPLETED, RunStatus.FAILED]
    assert "diverged" in result.failures[0].error
    assert len(result.summaries) == 1


def test_sweep_writes_one_row_per_rate(base_config):
    cfg = _cfg(base_config, reps=1)
    result = sweep_eta2(cfg, grid=[0.1, 0.01])
    assert list(result.table["eta2"]) == [0.1, 0.01]
    assert os.path.exists(os.path.join(cfg.out, "sweep.csv"))
    assert os.path.exists(os.path.join(cfg.out, "eta2_0.1", "aggregate.csv"))
    written = pd.read_csv(os.path.join(cfg.out, "sweep.csv"), na_values=["NA"])
    assert len(written) == 2


def test_sweep_of_one_rate_matches_replicate(base_config):
    cfg = _cfg(base_config, reps=1, eta2=0.05)
    swept = sweep_eta2(cfg, grid=[0.05], out_dir="").results[0.05]
    direct = replicate(cfg, out_dir="")
    pd.testing.assert_frame_equal(swept.aggregate, direct.aggregate)


def test_sweep_rejects_alg2(base_config):
    with pytest.raises(ConfigError):
        sweep_eta2(_cfg(base_config, algorithm="alg2"), out_dir="")


@pytest.mark.slow
def test_alg1_thresholds_settle_on_the_split_conformal_quantile(base_config):
    """With the model frozen, each tau_k tracks the offline class-k threshold."""
    cfg = _cfg(base_config, T=100000, batch=500, eta1=0.0, eta2=0.0005, score_log=True)
    summary = run_online(cfg)

    score_log = summary.diagnostics.score_log
    labels = np.concatenate([np.full(len(s), k) for k, s in enumerate(score_log)])
    scores = np.full((labels.size, 3), np.nan)
    scores[np.arange(labels.size), labels] = np.concatenate(score_log)
    offline = split_thresholds(scores, labels, cfg.alpha)

    for k in range(3):
        assert summary.final[f"tau_final_{k}"] == pytest.approx(offline[k], abs=0.06)
