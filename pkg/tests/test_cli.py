"""End-to-end runs of the command-line driver."""

import numpy as np
import pytest

from sketchlab.cli import (EXIT_EXPERIMENT, EXIT_OK, EXIT_USAGE, main)

FAST = ["--n", "500", "--rows", "5", "--cols", "64", "--trials", "5",
        "--coords", "20", "--seed", "1"]


def _normalized(path):
    # drop metadata lines that echo run-specific paths
    return [ln for ln in path.read_text().splitlines()
            if not ln.startswith(("# out=", "# config="))]


def test_version_exits_ok(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.strip()


def test_missing_subcommand_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE


def test_unknown_flag_is_usage_error(capsys):
    assert main(["point-error", "--bogus"]) == EXIT_USAGE


def test_point_error_writes_metadata_and_histogram(tmp_path):
    out = tmp_path / "pe.csv"
    assert main(["point-error", *FAST, "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.startswith("# sketchlab")
    assert "# seed=1" in text
    assert "bin_left,bin_right,density" in text
    assert "mean_Ep_over_m," in text


def test_point_error_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["point-error", *FAST, "--out", str(a)]) == EXIT_OK
    assert main(["point-error", *FAST, "--out", str(b)]) == EXIT_OK
    assert _normalized(a) == _normalized(b)


def test_point_error_json(tmp_path):
    import json

    out = tmp_path / "pe.json"
    assert main(["point-error", *FAST, "--format", "json",
                 "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["meta"]["seed"] == 1
    assert len(payload["density"]) == 60


def test_point_error_pairs_suffixes_files(tmp_path):
    out = tmp_path / "pe.csv"
    assert main(["point-error", *FAST, "--pairs", "3x32,5x64",
                 "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "pe_R3C32.csv").exists()
    assert (tmp_path / "pe_R5C64.csv").exists()


def test_bad_pairs_is_usage_error(capsys):
    assert main(["point-error", "--pairs", "3x"]) == EXIT_USAGE
    assert main(["point-error", "--pairs", "oops"]) == EXIT_USAGE


def test_zero_trials_is_usage_error(capsys):
    assert main(["point-error", "--trials", "0"]) == EXIT_USAGE


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 500\nrows=5  # comment\ncols=64\ntrials=5\n"
                   "coords=20\nseed=1\n")
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["point-error", "--config", str(cfg),
                 "--out", str(out_a)]) == EXIT_OK
    assert main(["point-error", *FAST, "--out", str(out_b)]) == EXIT_OK
    assert _normalized(out_a) == _normalized(out_b)
    # command-line flags win over the file
    out_c = tmp_path / "c.csv"
    assert main(["point-error", "--config", str(cfg), "--seed", "2",
                 "--out", str(out_c)]) == EXIT_OK
    assert "# seed=2" in out_c.read_text()


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("rows five\n")
    assert main(["point-error", "--config", str(bad)]) == EXIT_USAGE
    bad.write_text("rows=five\n")
    assert main(["point-error", "--config", str(bad)]) == EXIT_USAGE
    assert main(["point-error", "--config", str(tmp_path / "nope.cfg")]) \
        == EXIT_USAGE


def test_topk_writes_four_tables(tmp_path):
    out = tmp_path / "tk.csv"
    code = main(["topk", "--n", "500", "--rows", "5", "--cols", "64",
                 "--k", "5", "--trials", "4", "--seed", "1",
                 "--r-sweep", "3", "--c-sweep", "32", "--k-sweep", "5",
                 "--out", str(out)])
    assert code == EXIT_OK
    for suffix in ("_dist", "_mean_vs_R", "_mean_vs_C", "_var_vs_k"):
        assert (tmp_path / f"tk{suffix}.csv").exists()
    assert "R,mean_Ek_normalized" in (tmp_path / "tk_mean_vs_R.csv").read_text()


def test_tailcurve_reports_slope(tmp_path):
    out = tmp_path / "tc.csv"
    code = main(["tailcurve", "--n", "2000", "--rows", "9", "--cols", "64",
                 "--k", "10", "--trials", "50", "--coords", "40",
                 "--t-grid", "1,2,4,8", "--seed", "1", "--out", str(out)])
    assert code == EXIT_OK
    text = out.read_text()
    assert "# slope=" in text
    assert "t,prob,ci_halfwidth" in text


def test_tailcurve_degenerate_is_experiment_error(capsys):
    # sketch far wider than the signal: every tail probability is zero
    code = main(["tailcurve", "--n", "200", "--rows", "5", "--cols", "4096",
                 "--k", "5", "--trials", "5", "--coords", "10",
                 "--t-grid", "2,3,4", "--seed", "1"])
    assert code == EXIT_EXPERIMENT
    assert "no usable probability window" in capsys.readouterr().err


def test_compare_cm_runs(tmp_path):
    out = tmp_path / "cm.csv"
    assert main(["compare-cm", *FAST, "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert "sketch_kind,bin_left,bin_right,density" in text
    assert "mean_ratio," in text


def test_concentration_suite_passes(tmp_path):
    out = tmp_path / "conc.txt"
    assert main(["concentration", "--trials", "2", "--seed", "1",
                 "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert "partitions=280" in text
    assert "FAIL" not in text
    assert text.count("PASS") >= 6


def test_concentration_force_fail(tmp_path, capsys):
    assert main(["concentration", "--trials", "2", "--force-fail",
                 "--out", str(tmp_path / "c.txt")]) == EXIT_EXPERIMENT
    assert "forced_failure" in capsys.readouterr().err


def test_stdout_when_no_out_flag(capsys):
    assert main(["point-error", *FAST]) == EXIT_OK
    assert "bin_left,bin_right,density" in capsys.readouterr().out
