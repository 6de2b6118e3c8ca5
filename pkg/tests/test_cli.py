import json
import subprocess
import sys

import pytest

from grwsim.cli import main

CAT = """
[scenario]
kind = cat

[state]
weight_1 = 0.5
"""

LG = """
[scenario]
kind = leggett_garg

[check]
k_min = 1.3
k_max = 1.7
"""


@pytest.fixture
def cat_config(tmp_path):
    path = tmp_path / "cat.ini"
    path.write_text(CAT, encoding="utf-8")
    return str(path)


@pytest.fixture
def lg_config(tmp_path):
    path = tmp_path / "lg.ini"
    path.write_text(LG, encoding="utf-8")
    return str(path)


def test_convert_prints_exact_amplified_rate(capsys):
    assert main(["convert", "--tau", "1e15", "--n-eff", "1e23"]) == 0
    table = json.loads(capsys.readouterr().out)
    assert table["mean_first_hit_si"] == 1e-8
    assert table["collective_rate_si"] == pytest.approx(1e8)


def test_run_writes_one_record(tmp_path, cat_config, capsys):
    out = tmp_path / "single"
    assert main(["run", "--config", cat_config, "--seed", "4",
                 "--out", str(out)]) == 0
    assert "outcome=" in capsys.readouterr().out
    lines = (out / "events.jsonl").read_text().splitlines()
    assert len(lines) == 1
    rec = json.loads(lines[0])
    assert rec["provenance"]["generator"] == "philox4x64"
    assert (out / "config.ini").exists()


def test_ensemble_writes_artifacts(tmp_path, cat_config):
    out = tmp_path / "ens"
    code = main(["ensemble", "--config", cat_config, "--trajectories", "30",
                 "--seed", "1", "--out", str(out)])
    assert code == 0
    for name in ("events.jsonl", "summary.json", "outcomes.csv", "config.ini"):
        assert (out / name).exists(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["trajectories"] == 30
    assert summary["config_digest"]


def test_ensemble_rejects_wrong_config_kind(tmp_path, lg_config):
    assert main(["ensemble", "--config", lg_config,
                 "--trajectories", "5"]) == 1


def test_check_gate_breach_exits_three(tmp_path):
    path = tmp_path / "gated.ini"
    path.write_text(CAT + "\n[check]\nmin_p_value = 1.1\n", encoding="utf-8")
    code = main(["ensemble", "--config", str(path), "--trajectories", "150",
                 "--seed", "2", "--check"])
    assert code == 3  # p-values never exceed 1, so this gate must trip


def test_check_gate_pass_exits_zero(tmp_path):
    path = tmp_path / "gated.ini"
    path.write_text(
        CAT + "\n[check]\nmax_undecided_fraction = 0.01\n", encoding="utf-8"
    )
    code = main(["ensemble", "--config", str(path), "--trajectories", "150",
                 "--seed", "2", "--check"])
    assert code == 0


def test_lg_subcommand(tmp_path, lg_config, capsys):
    out = tmp_path / "lg"
    code = main(["lg", "--config", lg_config, "--trajectories", "2000",
                 "--seed", "3", "--out", str(out), "--check"])
    assert code == 0
    assert "k=" in capsys.readouterr().out
    doc = json.loads((out / "summary.json").read_text())
    assert doc["trajectories"] == 2000
    assert 1.3 < doc["k"] < 1.7


def test_arrow_subcommand(tmp_path, capsys):
    out = tmp_path / "arrow"
    code = main(["arrow", "--sites", "1000", "--horizon", "200",
                 "--trials", "10", "--seed", "5", "--flip-rate", "0.01",
                 "--out", str(out), "--check"])
    assert code == 0
    doc = json.loads((out / "summary.json").read_text())
    assert doc["plain_excursion_fraction"] == 1.0


def test_arrow_check_breach(capsys):
    # without noise the kicked arm equals the plain arm: never equilibrates
    code = main(["arrow", "--sites", "500", "--horizon", "100",
                 "--trials", "5", "--flip-rate", "0.0", "--check"])
    assert code == 3


def test_parse_problems_exit_one(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nkynd = cat\n", encoding="utf-8")
    assert main(["run", "--config", str(bad)]) == 1
    assert main(["run", "--config", str(tmp_path / "absent.ini")]) == 1
    assert main(["ensemble", "--config", str(bad), "--trajectories", "x"]) == 1
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


def test_runtime_problems_exit_two(tmp_path):
    path = tmp_path / "short.ini"
    # rate 1/8 with a two-step horizon: almost everything stays undecided
    path.write_text(
        "[scenario]\nkind = cat\n\n[collapse]\ntau = 8\nn_eff = 1\n"
        "[run]\nhorizon = 0.0125\n\n[propagator]\ndt = 0.00625\n",
        encoding="utf-8",
    )
    code = main(["ensemble", "--config", str(path), "--trajectories", "40",
                 "--seed", "0"])
    assert code == 2


def test_out_root_env_redirects_relative_paths(tmp_path, cat_config, monkeypatch):
    monkeypatch.setenv("GRWSIM_OUT_ROOT", str(tmp_path))
    assert main(["run", "--config", cat_config, "--out", "nested/run1"]) == 0
    assert (tmp_path / "nested" / "run1" / "events.jsonl").exists()


def test_console_script_is_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "grwsim.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "ensemble" in proc.stdout
