import json

import numpy as np
import pytest

from lbkan.cli import DEFAULTS, main, read_config_file, UsageError
from lbkan.serialize import load_params, save_params


def test_paper_defaults():
    assert DEFAULTS["dt"] == 0.001
    assert DEFAULTS["t_final"] == 100.0
    assert DEFAULTS["grid_size"] == 5
    assert DEFAULTS["spline_order"] == 3
    assert DEFAULTS["shape"] == "4,6,4,4"
    assert DEFAULTS["k_e"] == 11.0
    assert DEFAULTS["k_s"] == 0.01
    assert DEFAULTS["gamma"] == 4.2
    assert DEFAULTS["theta_bar"] == 5.0


def test_run_record_count(tmp_path):
    out = tmp_path / "o"
    rc = main(["run", "--t_final", "0.01", "--out", str(out)])
    assert rc == 0
    lines = (out / "run.csv").read_text().splitlines()
    assert len(lines) == 12  # header + 11 records
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["t_final"] == 0.01
    assert cfg["k_e"] == 11.0


def test_usage_error_on_bad_gain(tmp_path):
    rc = main(["run", "--k_e", "-1", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("nonsense_key=1\n")
    with pytest.raises(UsageError, match="nonsense_key"):
        read_config_file(cfg)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("gamma=20\nt_final=0.01\n")
    out = tmp_path / "o"
    rc = main(["run", "--config", str(cfg), "--gamma", "6", "--out", str(out)])
    assert rc == 0
    resolved = json.loads((out / "config.json").read_text())
    assert resolved["gamma"] == 6.0  # flag beats config file
    assert resolved["t_final"] == 0.01  # config file beats default


def test_config_file_comments_and_bool(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nsmooth_sgn = true\nk_s = 0.05  # inline\n")
    parsed = read_config_file(cfg)
    assert parsed == {"smooth_sgn": True, "k_s": 0.05}


def test_decompose_edge_files(tmp_path):
    out = tmp_path / "o"
    rc = main(["decompose", "--out", str(out)])
    assert rc == 0
    files = sorted(out.glob("edge_l*_j*_i*.csv"))
    assert len(files) == 24 + 24 + 16
    lines = files[0].read_text().splitlines()
    assert lines[0] == "eta,phi_value"
    assert len(lines) == 513


def test_compare_two_runs(tmp_path):
    out = tmp_path / "o"
    rc = main(
        [
            "compare",
            "--runs",
            "2",
            "--t_final",
            "0.05",
            "--num_candidates",
            "2",
            "--mc_horizon",
            "0.05",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    for name in ("kan", "dnn"):
        assert len(report["architectures"][name]["rows"]) == 2
    assert (out / "kan_run000.csv").exists()
    assert (out / "dnn_run001.csv").exists()


def test_run_with_saved_params(tmp_path):
    theta = np.linspace(-0.05, 0.05, 576)
    pfile = tmp_path / "theta.csv"
    save_params(theta, pfile)
    assert np.allclose(load_params(pfile), theta)
    out = tmp_path / "o"
    rc = main(["run", "--t_final", "0.005", "--params", str(pfile), "--out", str(out)])
    assert rc == 0


def test_binary_params_roundtrip(tmp_path):
    theta = np.random.default_rng(0).normal(size=100)
    pfile = tmp_path / "theta.bin"
    save_params(theta, pfile)
    assert np.array_equal(load_params(pfile), theta)


def test_mc_init_outputs(tmp_path):
    out = tmp_path / "o"
    rc = main(
        ["mc-init", "--num_candidates", "2", "--mc_horizon", "0.02", "--out", str(out)]
    )
    assert rc == 0
    assert load_params(out / "theta0.csv").size == 576
    lines = (out / "costs.csv").read_text().splitlines()
    assert lines[0] == "candidate,cost"
    assert len(lines) == 3
