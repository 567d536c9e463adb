import csv
import json
from pathlib import Path

import numpy as np
import pytest

import floqsim.cli as cli
from floqsim.errors import ConfigError, NumericError
from floqsim.harness import (
    ExperimentConfig,
    config_digest,
    default_config,
    realization_rng,
    resolve_workers,
    run_experiment,
    run_indexed,
)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

def test_realization_rng_reproducible():
    a = realization_rng(7, 3, "disorder").uniform(size=100)
    b = realization_rng(7, 3, "disorder").uniform(size=100)
    np.testing.assert_array_equal(a, b)


def test_realization_rng_streams_differ():
    base = realization_rng(7, 3, "disorder").uniform(size=50)
    assert not np.allclose(base, realization_rng(7, 4, "disorder").uniform(size=50))
    assert not np.allclose(base, realization_rng(8, 3, "disorder").uniform(size=50))
    assert not np.allclose(base, realization_rng(7, 3, "circuit").uniform(size=50))


def test_realization_rng_pairwise_decorrelated():
    n = 100_000
    x = realization_rng(0, 0, "disorder").uniform(size=n)
    y = realization_rng(0, 1, "disorder").uniform(size=n)
    rho = np.corrcoef(x, y)[0, 1]
    assert abs(rho) < 0.01


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------

calls = {"count": 0}


def _square_task(i):
    calls["count"] += 1
    return i * i


def _flaky_task(i, fail_at):
    calls["count"] += 1
    if calls["count"] == fail_at:
        raise RuntimeError("interrupted")
    return i * i


def test_run_indexed_checkpoint_resume(tmp_path):
    ckpt = tmp_path / "sweep.checkpoint.pkl"
    calls["count"] = 0
    with pytest.raises(RuntimeError):
        run_indexed(lambda i: _flaky_task(i, fail_at=8), 10,
                    checkpoint_path=ckpt, checkpoint_every=3, digest="d1")
    assert ckpt.exists()  # saved after 3 and 6 completions
    calls["count"] = 0
    out = run_indexed(_square_task, 10, checkpoint_path=ckpt,
                      checkpoint_every=3, digest="d1")
    assert out == [i * i for i in range(10)]
    assert calls["count"] == 4  # only the unfinished realizations re-ran
    assert not ckpt.exists()


def test_run_indexed_discards_stale_checkpoint(tmp_path):
    ckpt = tmp_path / "sweep.checkpoint.pkl"
    calls["count"] = 0
    with pytest.raises(RuntimeError):
        run_indexed(lambda i: _flaky_task(i, fail_at=5), 6,
                    checkpoint_path=ckpt, checkpoint_every=2, digest="old")
    calls["count"] = 0
    out = run_indexed(_square_task, 6, checkpoint_path=ckpt,
                      checkpoint_every=2, digest="new")
    assert out == [i * i for i in range(6)]
    assert calls["count"] == 6  # digest changed, so everything re-ran


def test_resolve_workers_env_cap(monkeypatch):
    monkeypatch.delenv("SIM_THREADS", raising=False)
    assert resolve_workers(3) == 3
    monkeypatch.setenv("SIM_THREADS", "2")
    assert resolve_workers(3) == 2
    assert resolve_workers(0) <= 2
    monkeypatch.setenv("SIM_THREADS", "1")
    assert resolve_workers(0) == 1


# ---------------------------------------------------------------------------
# experiment runs
# ---------------------------------------------------------------------------

def small_supremacy(tmp_path, name, **overrides):
    base = dict(L=4, D=6, m=3, seed=7, out=str(tmp_path / name), workers=1)
    base.update(overrides)
    return default_config("supremacy", **base)


def test_supremacy_run_deterministic(tmp_path):
    first = run_experiment(small_supremacy(tmp_path, "a"))
    second = run_experiment(small_supremacy(tmp_path, "b"))
    assert first["analog_kl"].read_bytes() == second["analog_kl"].read_bytes()
    assert first["hist"].read_bytes() == second["hist"].read_bytes()
    rows = read_rows(first["analog_kl"])
    assert [r["m"] for r in rows] == ["1", "2", "3"]
    assert all(float(r["kl_pooled"]) >= 0 for r in rows)


def test_supremacy_parallel_matches_serial(tmp_path, monkeypatch):
    monkeypatch.delenv("SIM_THREADS", raising=False)
    serial = run_experiment(small_supremacy(tmp_path, "serial", workers=1))
    parallel = run_experiment(small_supremacy(tmp_path, "parallel", workers=2))
    assert serial["analog_kl"].read_bytes() == parallel["analog_kl"].read_bytes()


def test_supremacy_digital_table(tmp_path):
    paths = run_experiment(small_supremacy(tmp_path, "dig", digital=True))
    rows = read_rows(paths["digital_kl"])
    assert len(rows) == 3
    assert set(rows[0]) == {"m", "L", "kl_pooled", "kl_mean", "kl_se", "undersampled"}


def test_csv_number_formatting(tmp_path):
    paths = run_experiment(small_supremacy(tmp_path, "fmt"))
    with open(paths["hist"], encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        first = fh.readline().strip().split(",")
    assert header == ["x_lo", "x_hi", "mass", "pt_mass"]
    assert first[0] == "0"
    assert first[1] == "0.25"
    assert len(first[3]) <= 18  # %.12g keeps numbers compact


def test_manifest_contents(tmp_path):
    config = small_supremacy(tmp_path, "man")
    paths = run_experiment(config)
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["experiment"] == "supremacy"
    assert manifest["seed"] == 7
    assert manifest["code_version"]
    assert manifest["config"]["L"] == 4
    assert manifest["config_digest"] == config_digest(config)
    assert manifest["integrator"]["substeps_per_cycle"] >= 256


def test_mbl_probe_single_point(tmp_path):
    config = default_config(
        "mbl-probe", L=4, D=4, m=2, W=1.5, W_list=None,
        out=str(tmp_path / "probe"), workers=1,
    )
    paths = run_experiment(config)
    rows = read_rows(paths["probe"])
    assert len(rows) == 1
    assert float(rows[0]["W"]) == 1.5
    assert 0.0 <= float(rows[0]["r_mean"]) <= 1.0
    hist_rows = read_rows(paths["spacing_hist"])
    assert {"W", "r_mid", "density", "coe", "poi"} == set(hist_rows[0])


def test_phase_diagram_grid(tmp_path):
    config = default_config(
        "phase-diagram", L=4, D=2, m=2,
        W_list=(1.0, 10.0), omega_list=(4.0, 8.0),
        out=str(tmp_path / "grid"), workers=1,
    )
    rows = read_rows(run_experiment(config)["grid"])
    assert len(rows) == 4
    assert {(r["W"], r["omega"]) for r in rows} == {
        ("1", "4"), ("1", "8"), ("10", "4"), ("10", "8")
    }


def test_magnus_experiment(tmp_path):
    config = default_config(
        "magnus", L=3, D=3, omega_list=(8.0, 32.0),
        out=str(tmp_path / "magnus"), workers=1,
    )
    rows = read_rows(run_experiment(config)["sweep"])
    assert [r["omega"] for r in rows] == ["8", "32"]
    for row in rows:
        assert 0.0 <= float(row["fid0_mean"]) <= 1.0
        assert 0.0 <= float(row["fid2_mean"]) <= 1.0


def test_train_experiment(tmp_path):
    config = default_config(
        "train", L=3, W=8.0, D=3, datasets=2, m_max=4, n_samples=60,
        substeps=32, auto_substeps=False,
        out=str(tmp_path / "train"), workers=1,
    )
    paths = run_experiment(config)
    trace = read_rows(paths["trace"])
    assert len(trace) == 2 * 4
    candidates = read_rows(paths["candidates"])
    assert len(candidates) == 4 * 3
    final = read_rows(paths["final"])
    assert len(final) == 2
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["mean_final_cost"] == pytest.approx(
        np.mean([float(r["final_cost"]) for r in final])
    )


def test_memory_experiment(tmp_path):
    config = default_config(
        "memory", L=3, W=8.0, D=3, m_ref_lo=2, m_ref_hi=3, dm_max=2,
        substeps=32, auto_substeps=False,
        out=str(tmp_path / "memory"), workers=1,
    )
    paths = run_experiment(config)
    rows = read_rows(paths["curve"])
    assert [r["dm"] for r in rows] == ["0", "1", "2"]
    assert float(rows[0]["kl_mean"]) == 0.0
    final = read_rows(paths["final_kl"])
    assert int(final[0]["m"]) == 5


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="nope", W=1.0)
    with pytest.raises(ConfigError):
        default_config("supremacy", envelope="triangle")
    with pytest.raises(ConfigError):
        default_config("supremacy", D=0)
    with pytest.raises(ConfigError):
        default_config("mbl-probe", W_list=None)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_cli_runs_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "cli"
    code = cli.main(
        ["supremacy", "--L", "4", "--D", "4", "--m", "2", "--seed", "3",
         "--out", str(out), "--workers", "1"]
    )
    assert code == 0
    assert (out / "analog_kl_vs_m.csv").exists()
    assert "manifest" in capsys.readouterr().out


def test_cli_config_file_and_flag_precedence(tmp_path):
    document = {"L": 5, "D": 3, "m": 2, "workers": 1}
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(document))
    out = tmp_path / "out"
    code = cli.main(
        ["supremacy", "--config", str(config_path), "--L", "4", "--out", str(out)]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["L"] == 4      # flag beats file
    assert manifest["config"]["D"] == 3      # file beats default


def test_cli_no_modulation_flag(tmp_path):
    out = tmp_path / "mem"
    code = cli.main(
        ["memory", "--L", "3", "--W", "8", "--D", "2", "--dm-max", "1",
         "--m-ref-lo", "2", "--m-ref-hi", "2", "--no-modulation",
         "--substeps", "32", "--no-auto-substeps", "--out", str(out), "--workers", "1"]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["envelope"] == "constant-half"


def test_cli_config_error_exit_code(tmp_path, capsys):
    code = cli.main(["train", "--datasets", "0", "--out", str(tmp_path / "x")])
    assert code == 2
    assert "configuration error" in capsys.readouterr().err
    code = cli.main(["supremacy", "--config", str(tmp_path / "missing.json")])
    assert code == 2


def test_cli_unknown_experiment_exits_two():
    with pytest.raises(SystemExit) as err:
        cli.main(["not-an-experiment"])
    assert err.value.code == 2


def test_cli_numeric_error_exit_code(monkeypatch, capsys):
    def boom(config):
        raise NumericError("unitarity lost")

    monkeypatch.setattr(cli, "run_experiment", boom)
    code = cli.main(["supremacy", "--L", "4"])
    assert code == 3
    assert "numeric failure" in capsys.readouterr().err


def test_cli_float_list_parsing():
    assert cli._float_list("1.5,5,20") == (1.5, 5.0, 20.0)
    assert cli._float_list("2") == (2.0,)
