"""Tests for the command-line interface."""

import importlib.util
import os
from pathlib import Path

import pytest

from banditcp.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, build_parser, main, overrides_from_args

SHORT_RUN = ["--T", "96", "--batch", "32", "--policy", "uniform", "--score", "aps", "--seed", "3"]


def test_overrides_only_include_given_flags():
    args = build_parser().parse_args(["run", "--alpha", "0.1", "--lambda", "0.2", "--eta2-grid", "0.1,0.01"])
    assert overrides_from_args(args) == {"alpha": 0.1, "lambda": 0.2, "eta2_grid": "0.1,0.01"}


def test_run_command_writes_outputs(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["run", *SHORT_RUN, "--out", out]) == EXIT_OK
    run_dir = os.path.join(out, "run_seed3")
    assert os.path.exists(os.path.join(run_dir, "metrics.csv"))
    assert run_dir in capsys.readouterr().out


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha=1.5\n")
    out = str(tmp_path / "out")
    assert main(["run", "--config", str(cfg), *SHORT_RUN, "--out", out]) == EXIT_CONFIG
    assert main(["run", "--config", str(cfg), *SHORT_RUN, "--alpha", "0.1", "--out", out]) == EXIT_OK


def test_config_error_exit_code(tmp_path):
    assert main(["run", "--T", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_runtime_error_exit_code(tmp_path):
    missing = tmp_path / "missing.csv"
    assert main(["run", *SHORT_RUN, "--data", f"file:{missing}", "--out", str(tmp_path)]) == EXIT_RUNTIME


def test_replicate_and_inspect(tmp_path, capsys):
    out = str(tmp_path / "reps")
    assert main(["replicate", *SHORT_RUN, "--reps", "2", "--out", out]) == EXIT_OK
    assert os.path.exists(os.path.join(out, "aggregate.csv"))
    capsys.readouterr()

    assert main(["inspect", os.path.join(out, "rep0_seed3")]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "config_hash" in printed
    assert "acum_cvg_min" in printed


def test_sweep_command(tmp_path):
    out = str(tmp_path / "sweep")
    argv = ["sweep", *SHORT_RUN, "--reps", "1", "--eta2-grid", "0.1,0.01", "--out", out]
    assert main(argv) == EXIT_OK
    assert os.path.exists(os.path.join(out, "sweep.csv"))


def _load_api_script():
    path = Path(__file__).resolve().parent.parent / "scripts" / "run_api.py"
    module_spec = importlib.util.spec_from_file_location("run_api_script", path)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module


def test_api_script_accepts_only_bind_options():
    script = _load_api_script()
    args = script.parse_args(["--host", "127.0.0.1", "--port", "8123"])
    assert (args.host, args.port, args.reload) == ("127.0.0.1", 8123, False)
    with pytest.raises(SystemExit):
        script.parse_args(["--out", "elsewhere"])
