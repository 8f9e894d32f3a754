"""Config handling, task selection, artifacts, exit codes, determinism."""

import json
import os
import subprocess
import sys

import pytest

from nspshock.cli import main
from nspshock.pipeline import ConfigError, load_config

REF_PARAMS = {"T": 1.0, "nu": 1.0, "eps": 1.0, "v_minus": 1.0,
              "u_minus": 0.0, "v_plus": 1.1}


def write_config(tmp_path, name="cfg.json", **overrides):
    cfg = {"params": dict(REF_PARAMS), "out": str(tmp_path / "out")}
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_lax_violation_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, params={**REF_PARAMS, "v_plus": 0.9})
    assert main(["run", "--config", str(cfg)]) == 2
    assert "Lax" in capsys.readouterr().err


def test_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["run", "--config", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2


def test_missing_params_block_exits_2(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"out": "o"}))
    assert main(["run", "--config", str(path)]) == 2


def test_unknown_task_rejected(tmp_path):
    cfg = write_config(tmp_path, tasks=["profile", "spectres"])
    with pytest.raises(ConfigError, match="spectres"):
        load_config(cfg)


def test_negative_numeric_rejected(tmp_path):
    cfg = write_config(tmp_path, numerics={"n": -5})
    with pytest.raises(ConfigError, match="positive"):
        load_config(cfg)


def test_unknown_numerics_key_rejected(tmp_path):
    cfg = write_config(tmp_path, numerics={"step": 0.1})
    with pytest.raises(ConfigError, match="step"):
        load_config(cfg)


def test_dispersion_only_writes_only_spectrum(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg), "--tasks", "dispersion"]) == 0
    out = tmp_path / "out"
    assert (out / "spectrum.csv").exists()
    assert (out / "report.json").exists()
    assert not (out / "profile.csv").exists()
    assert not (out / "evans.csv").exists()
    report = json.loads((out / "report.json").read_text())
    assert list(report["tasks"]) == ["dispersion"]


def test_dependency_auto_enabled(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg), "--tasks", "transversality"]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert list(report["tasks"]) == ["profile", "transversality"]
    assert (tmp_path / "out" / "profile.csv").exists()


def test_out_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path)
    other = tmp_path / "elsewhere"
    assert main(["run", "--config", str(cfg), "--tasks", "dispersion",
                 "--out", str(other)]) == 0
    assert (other / "report.json").exists()
    assert not (tmp_path / "out").exists()


def test_checks_carry_value_and_threshold(tmp_path):
    cfg = write_config(tmp_path, tasks=["profile", "dispersion", "poisson"])
    assert main(["run", "--config", str(cfg)]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["passed"] is True
    for entry in report["tasks"].values():
        assert entry["passed"] is True
        for check in entry["checks"].values():
            assert set(check) == {"value", "threshold", "pass"}


def test_report_deterministic_modulo_timings(tmp_path):
    cfg = write_config(tmp_path, tasks=["profile", "dispersion"])
    texts = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        del report["timings"]
        texts.append(json.dumps(report, sort_keys=True))
    assert texts[0] == texts[1]


def test_transversality_reports_gamma_consistency(tmp_path):
    cfg = write_config(
        tmp_path, tasks=["evans", "transversality"],
        numerics={"evans_n": 5601, "n_circle": 16})
    assert main(["run", "--config", str(cfg)]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    checks = report["tasks"]["transversality"]["checks"]
    assert checks["gamma_consistency"]["pass"] is True
    assert checks["gamma_consistency"]["value"] > 0.0


def test_thread_env_var_seeds_blas_caps():
    code = ("import os; os.environ['NSPSHOCK_THREADS']='3'; "
            "import nspshock; print(os.environ['OMP_NUM_THREADS'])")
    env = {k: v for k, v in os.environ.items() if "THREAD" not in k}
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "3"
