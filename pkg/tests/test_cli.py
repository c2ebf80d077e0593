"""Command-line entry: exit codes, artifacts, validation, determinism."""
import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from shearwaves.cli import main

TWO_PI = 2.0 * math.pi


def run_cli(tmp_path, config, tag, command=None, extra=()):
    """Write the config, invoke main() in process, return (exit code, outdir)."""
    path = tmp_path / f"{tag}.json"
    path.write_text(json.dumps(config))
    out = tmp_path / f"out_{tag}"
    code = main([command or config["command"], "--config", str(path),
                 "--out", str(out), "--quiet", *extra])
    return code, out


def read_manifest(outdir):
    return json.loads((outdir / "manifest.json").read_text())


def read_csv_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data


def carroll_simulate_config(**overrides):
    cfg = {
        "command": "simulate",
        "system": "full",
        "modulus": {"kind": "cubic", "mu0": 1.0, "mu1": 0.5},
        "grid": {"n": 64, "a": 0.0, "b": TWO_PI, "boundary": "periodic"},
        "run": {"end": 1.0, "scheme": "muscl_minmod", "cfl": 0.45},
        "init": {"kind": "carroll", "amplitude": 1.0, "wavenumber": 1.0},
        "oracle_check": True,
    }
    cfg.update(overrides)
    return cfg


# ---------------------------------------------------------------------------
# happy paths


def test_simulate_carroll_artifacts(tmp_path):
    code, out = run_cli(tmp_path, carroll_simulate_config(), "sim")
    assert code == 0
    manifest = read_manifest(out)
    assert manifest["package"] == "shearwaves"
    assert manifest["command"] == "simulate"
    assert manifest["status"] == "ok"
    assert manifest["oracle_error_linf"] < 5e-2
    assert manifest["diagnostics"]["blowup_coordinate"] is None
    header, data = read_csv_columns(out / "snapshots.csv")
    assert header == ["coordinate", "cell_center", "U", "V", "M", "N"]
    assert data.shape[1] == 6
    # amplitude invariant carried by the circular wave, loosely at n=64
    s = data[:, 2] ** 2 + data[:, 3] ** 2
    assert np.max(np.abs(s - 1.0)) < 5e-2


def test_simulate_artifacts_deterministic(tmp_path):
    _, out1 = run_cli(tmp_path, carroll_simulate_config(), "det1")
    _, out2 = run_cli(tmp_path, carroll_simulate_config(), "det2")
    assert (out1 / "snapshots.csv").read_bytes() == (out2 / "snapshots.csv").read_bytes()
    assert (out1 / "manifest.json").read_bytes() == (out2 / "manifest.json").read_bytes()


def test_exact_constant_amplitude_rho_column_constant(tmp_path):
    cfg = {
        "command": "exact",
        "solution": {
            "kind": "constant_amplitude",
            "beta": 0.5,
            "amplitude": 1.25,
            "profile": {"kind": "sine", "amp": 1.0, "freq": 1.0},
            "X": {"min": 0.0, "max": 2.0, "n": 9},
            "tau": {"min": 0.0, "max": TWO_PI, "n": 33},
        },
    }
    code, out = run_cli(tmp_path, cfg, "exc")
    assert code == 0
    header, data = read_csv_columns(out / "samples.csv")
    rho = data[:, header.index("rho")]
    np.testing.assert_allclose(rho, 1.25, rtol=1e-12)


def test_hodograph_samples(tmp_path):
    cfg = {
        "command": "hodograph",
        "beta": 1.0,
        "phase": {"kind": "linear", "k": 1.0},
        "radial": {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]},
        "X": {"min": -0.55, "max": -0.45, "n": 7},
        "tau": {"min": -1.7, "max": -1.3, "n": 5},
        "seed": [0.5, 1.0],
    }
    code, out = run_cli(tmp_path, cfg, "hod")
    assert code == 0
    header, data = read_csv_columns(out / "samples.csv")
    assert header == ["X", "tau", "theta", "rho"]
    assert data.shape == (35, 4)
    assert np.all(data[:, 3] > 0)


def test_classify_ratio_flux_report(tmp_path):
    cfg = {
        "command": "classify",
        "flux": {"kind": "ratio"},
        "samples": {"u": {"min": 0.5, "max": 2.0, "n": 7},
                    "v": {"min": 0.5, "max": 2.0, "n": 7}},
    }
    code, out = run_cli(tmp_path, cfg, "cls")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["flags"]["completely_exceptional"] is True
    assert report["flags"]["equal_eigenvalues"] is True
    assert report["flags"]["decouples"] is None
    assert report["eigen"]["max_abs_grad2_dot_d2"] < 1e-10


def test_classify_constant_flux_special_case(tmp_path):
    cfg = {
        "command": "classify",
        "flux": {"kind": "poly", "coeffs": [[3.0]]},
        "samples": {"u": {"min": 0.5, "max": 2.0, "n": 5},
                    "v": {"min": 0.5, "max": 2.0, "n": 5}},
    }
    code, out = run_cli(tmp_path, cfg, "clc")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["constant_flux"] is True
    assert report["flags"]["completely_exceptional"] is True


def test_verify_positive_study(tmp_path):
    cfg = {
        "command": "verify",
        "study": "asymptotic",
        "beta": 0.5,
        "solution": {"kind": "constant_amplitude", "amplitude": 1.0,
                     "profile": {"kind": "sine", "amp": 1.0, "freq": 1.0}},
        "rectangle": {"coord": {"min": 0.0, "max": 1.0},
                      "point": {"min": 0.0, "max": TWO_PI}},
        "levels": [33, 65, 129],
    }
    code, out = run_cli(tmp_path, cfg, "ver")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert report["order"] > 1.8


def test_convergence_pass(tmp_path):
    cfg = {
        "command": "convergence",
        "system": "asymptotic",
        "beta": 0.5,
        "grid": {"a": 0.0, "b": TWO_PI},
        "run": {"end": 0.5, "scheme": "lax_friedrichs"},
        "levels": [16, 32, 64],
        "oracle": {"kind": "constant_amplitude", "amplitude": 1.0,
                   "profile": {"kind": "sine", "amp": 1.0, "freq": 1.0}},
        "order_target": 0.7,
    }
    code, out = run_cli(tmp_path, cfg, "cnv")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert len(report["linf"]) == 3


# ---------------------------------------------------------------------------
# failure exit codes


def test_verify_negative_control_exits_one(tmp_path):
    cfg = {
        "command": "verify",
        "study": "asymptotic",
        "beta": 0.5,
        "negative_control": True,
        "rectangle": {"coord": {"min": 0.0, "max": 1.0},
                      "point": {"min": 0.0, "max": TWO_PI}},
        "levels": [33, 65, 129],
    }
    code, out = run_cli(tmp_path, cfg, "vnc")
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is False
    assert report["control_confirmed"] is True


def test_convergence_missed_target_exits_one(tmp_path):
    cfg = {
        "command": "convergence",
        "system": "asymptotic",
        "beta": 0.5,
        "grid": {"a": 0.0, "b": TWO_PI},
        "run": {"end": 0.5, "scheme": "lax_friedrichs"},
        "levels": [16, 32],
        "oracle": {"kind": "constant_amplitude", "amplitude": 1.0,
                   "profile": {"kind": "sine", "amp": 1.0, "freq": 1.0}},
        "order_target": 3.0,
    }
    code, out = run_cli(tmp_path, cfg, "cnf")
    assert code == 1
    assert json.loads((out / "report.json").read_text())["passed"] is False


def test_negative_cfl_exits_two(tmp_path):
    cfg = carroll_simulate_config()
    cfg["run"]["cfl"] = -0.1
    code, _ = run_cli(tmp_path, cfg, "cfl")
    assert code == 2


def test_unknown_key_exits_two(tmp_path):
    cfg = carroll_simulate_config()
    cfg["extra_knob"] = 7
    code, _ = run_cli(tmp_path, cfg, "unk")
    assert code == 2


def test_command_mismatch_exits_two(tmp_path):
    code, _ = run_cli(tmp_path, carroll_simulate_config(), "mis", command="exact")
    assert code == 2


def test_missing_config_exits_two(tmp_path):
    out = tmp_path / "out_missing"
    code = main(["simulate", "--config", str(tmp_path / "nope.json"),
                 "--out", str(out), "--quiet"])
    assert code == 2


def test_malformed_json_exits_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code = main(["simulate", "--config", str(path),
                 "--out", str(tmp_path / "out_broken"), "--quiet"])
    assert code == 2


def test_missing_oracle_exits_two(tmp_path):
    cfg = {
        "command": "convergence",
        "system": "asymptotic",
        "beta": 0.5,
        "grid": {"a": 0.0, "b": TWO_PI},
        "run": {"end": 0.5},
        "levels": [16, 32],
    }
    code, _ = run_cli(tmp_path, cfg, "noor")
    assert code == 2


def test_simulate_blowup_exits_three(tmp_path):
    cfg = {
        "command": "simulate",
        "system": "asymptotic",
        "beta": 1.0,
        "grid": {"n": 128, "a": 0.0, "b": TWO_PI, "boundary": "periodic"},
        "run": {"end": 5.0, "scheme": "muscl_minmod", "blowup_factor": 5.0},
        "init": {"kind": "plane", "profile": {"kind": "sine", "amp": 1.0, "freq": 1.0}},
    }
    code, out = run_cli(tmp_path, cfg, "blow")
    assert code == 3
    manifest = read_manifest(out)
    assert manifest["status"] == "error"
    assert manifest["error"]["type"] == "BlowupDetected"
    assert 0.0 < manifest["error"]["coordinate"] < 5.0


def test_hodograph_fold_seed_exits_three(tmp_path):
    cfg = {
        "command": "hodograph",
        "beta": 1.0,
        "phase": {"kind": "linear", "k": 1.0},
        "radial": {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]},
        "X": {"min": -1.1, "max": -0.9, "n": 5},
        "tau": {"min": -0.1, "max": 0.1, "n": 5},
        "seed": [0.0, 1.0],
    }
    code, out = run_cli(tmp_path, cfg, "fold")
    assert code == 3
    manifest = read_manifest(out)
    assert manifest["status"] == "error"
    assert manifest["error"]["type"] == "SingularJacobian"


# ---------------------------------------------------------------------------
# packaging


def test_console_entry_point(tmp_path):
    cfg = {
        "command": "classify",
        "flux": {"kind": "product"},
        "samples": {"u": {"min": 0.5, "max": 2.0, "n": 5},
                    "v": {"min": 0.5, "max": 2.0, "n": 5}},
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    proc = subprocess.run(
        [sys.executable, "-m", "shearwaves", "classify",
         "--config", str(path), "--out", str(tmp_path / "o")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "o" / "report.json").exists()


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
