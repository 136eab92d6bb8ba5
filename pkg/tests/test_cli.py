import json
import subprocess
import sys

import numpy as np
import pytest

BASE = [sys.executable, "-m", "sffsim"]


def run_cli(*args, check=True):
    proc = subprocess.run(
        BASE + [str(a) for a in args], capture_output=True, text=True
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"cli failed ({proc.returncode}): {proc.stderr}")
    return proc


def sff_args(outdir, **over):
    params = {
        "q": 2,
        "L": 2,
        "ensemble": "haar",
        "t-max": 6,
        "moments": "1,2",
        "realizations": 25,
        "seed": 7,
        "workers": 1,
        "out": outdir,
    }
    params.update(over)
    args = ["sff"]
    for k, v in params.items():
        args += [f"--{k}", str(v)]
    return args


def test_sff_run_dir_structure(tmp_path):
    out = tmp_path / "run1"
    run_cli(*sff_args(out))
    assert (out / "meta.json").exists()
    lines = (out / "sff.csv").read_text().splitlines()
    assert lines[0] == "t,tau,m,K,stderr,kappa,delta_kappa,realizations"
    assert len(lines) - 1 == 6 * 2
    meta = json.loads((out / "meta.json").read_text())
    assert meta["schema_version"] == 1
    assert meta["command"] == "sff"
    assert meta["parameters"]["master_seed"] == 7
    assert meta["derived"]["N"] == 8


def test_sff_rerun_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_cli(*sff_args(out1))
    run_cli(*sff_args(out2))
    assert (out1 / "sff.csv").read_bytes() == (out2 / "sff.csv").read_bytes()


def test_sff_worker_count_byte_identical(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w4"
    run_cli(*sff_args(out1, workers=1))
    run_cli(*sff_args(out2, workers=4))
    assert (out1 / "sff.csv").read_bytes() == (out2 / "sff.csv").read_bytes()


def test_sff_tdual_manifest_records_chi(tmp_path):
    out = tmp_path / "td"
    run_cli(*sff_args(out, ensemble="tdual", J=3.1, **{"phase-dist": "uniform:-1:1"}))
    meta = json.loads((out / "meta.json").read_text())
    chi = meta["derived"]["chi"]
    assert chi["real"] == pytest.approx(np.sin(3.1) / 3.1, rel=1e-12)
    assert chi["imag"] == 0.0


def test_sff_times_flags(tmp_path):
    out = tmp_path / "times"
    run_cli("sff", "--q", 2, "--L", 2, "--times", "3,6,9", "--realizations", 5,
            "--seed", 1, "--workers", 1, "--out", out)
    rows = (out / "sff.csv").read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["3", "6", "9"]

    out2 = tmp_path / "multiples"
    run_cli("sff", "--q", 2, "--L", 3, "--times-multiples-of", 3, "--t-max", 12,
            "--realizations", 5, "--seed", 1, "--workers", 1, "--out", out2)
    rows = (out2 / "sff.csv").read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["3", "6", "9", "12"]


def test_sff_capacity_exit_code(tmp_path):
    proc = run_cli(*sff_args(tmp_path / "big", q=2, L=40), check=False)
    assert proc.returncode == 2
    assert "capacity" in proc.stderr.lower()
    assert not (tmp_path / "big" / "sff.csv").exists()


def test_usage_error_exit_code(tmp_path):
    proc = run_cli("sff", "--q", 2, check=False)
    assert proc.returncode == 1


def test_invalid_ensemble_rejected_before_compute(tmp_path):
    proc = run_cli(*sff_args(tmp_path / "bad", **{"phase-dist": "uniform:0:2"}), check=False)
    assert proc.returncode == 1
    assert not (tmp_path / "bad").exists()


def test_spacings_run(tmp_path):
    out = tmp_path / "sp"
    run_cli("spacings", "--q", 2, "--L", 3, "--ensemble", "haar",
            "--realizations", 30, "--seed", 3, "--workers", 1, "--out", out)
    lines = (out / "spacings.csv").read_text().splitlines()
    assert lines[0] == "s_mid,p_s,realizations,p_cue,p_poisson"
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    meta = json.loads((out / "meta.json").read_text())
    mass = np.sum(data[:, 1]) * 0.1 + meta["overflow_mass"]
    assert mass == pytest.approx(1.0, abs=1e-6)
    # overlay columns evaluate the reference densities at bin midpoints
    assert data[0, 3] == pytest.approx((32 / np.pi**2) * 0.05**2 * np.exp(-4 * 0.05**2 / np.pi))
    assert data[0, 4] == pytest.approx(np.exp(-0.05))


def test_spacings_single_realization_flagged(tmp_path):
    out = tmp_path / "sp1"
    run_cli("spacings", "--q", 2, "--L", 2, "--realizations", 1,
            "--seed", 3, "--workers", 1, "--out", out)
    meta = json.loads((out / "meta.json").read_text())
    assert meta["stderr"] == "n/a"
    assert meta["stderr_available"] is False


def test_theory_toy_row():
    proc = run_cli("theory", "--model", "toy", "--L", 4, "--t-max", 12)
    rows = dict(
        (int(ln.split(",")[0]), float(ln.split(",")[1]))
        for ln in proc.stdout.splitlines()[1:]
    )
    assert rows[6] == 108.0


def test_theory_tdual_exceeds_ramp():
    proc = run_cli("theory", "--model", "tdual", "--m", 1, "--L", 4, "--J", 3.1,
                   "--t-max", 50)
    lines = proc.stdout.splitlines()
    assert lines[0] == "t,value,model"
    for ln in lines[1:]:
        t, value, model = ln.split(",")
        assert model == "tdual"
        assert float(value) >= float(t)


def test_theory_cue_rows():
    proc = run_cli("theory", "--model", "cue", "--N", 81, "--t-max", 100)
    for ln in proc.stdout.splitlines()[1:]:
        t, value, _ = ln.split(",")
        assert float(value) == min(int(t), 81)


def test_oracle_passes():
    proc = run_cli("oracle")
    assert proc.returncode == 0
    assert "FAIL" not in proc.stdout
    assert "moment_double_sum_m2_experiment" in proc.stdout


def test_oracle_tamper_detected(tmp_path):
    report = tmp_path / "report.json"
    proc = run_cli("oracle", "--tamper", "--json", report, check=False)
    assert proc.returncode == 3
    assert "FAIL" in proc.stdout
    data = json.loads(report.read_text())
    two_body = next(e for e in data if e["identity"] == "two_body_trace_vs_circuit")
    assert two_body["passed"] is False


def test_oracle_json_report(tmp_path):
    report = tmp_path / "report.json"
    run_cli("oracle", "--json", report)
    data = json.loads(report.read_text())
    names = {e["identity"] for e in data}
    assert "two_body_trace_vs_circuit" in names
    assert "moment_double_sum_vs_closed_form" in names
    assert "fixed_point_census_vs_polynomial" in names
    for e in data:
        if e.get("tolerance") is not None:
            assert e["max_deviation"] <= e["tolerance"]
