import subprocess
import sys

import pytest


def primary_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "sffsim", *map(str, args)],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"sffsim failed ({proc.returncode}): {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def haar_run(tmp_path_factory):
    """Reduced-realization copy of the criterion-8 Haar run (same flags otherwise)."""
    out = tmp_path_factory.mktemp("runs") / "haar"
    primary_cli(
        "sff", "--q", 3, "--L", 3, "--ensemble", "haar",
        "--times", "5,7,11,20,100", "--moments", "1,2",
        "--realizations", 150, "--seed", 8, "--workers", 1, "--out", out,
    )
    return out


@pytest.fixture(scope="session")
def haar_spacing_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs") / "haar_sp"
    primary_cli(
        "spacings", "--q", 3, "--L", 3, "--ensemble", "haar",
        "--realizations", 100, "--seed", 80, "--workers", 1, "--out", out,
    )
    return out


@pytest.fixture(scope="session")
def tdual_run(tmp_path_factory):
    """Reduced-realization copy of the criterion-9 T-dual run."""
    out = tmp_path_factory.mktemp("runs") / "tdual"
    times = sorted({3 * k for k in range(1, 7)} | {t for t in range(10, 41) if t % 3})
    primary_cli(
        "sff", "--q", 3, "--L", 3, "--ensemble", "tdual", "--J", 3.1,
        "--phase-dist", "uniform:-1:1",
        "--times", ",".join(map(str, times)),
        "--realizations", 150, "--seed", 9, "--workers", 1, "--out", out,
    )
    return out


@pytest.fixture(scope="session")
def theory_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("theory") / "cue.csv"
    proc = primary_cli("theory", "--model", "cue", "--N", 81, "--t-max", 100)
    path.write_text(proc.stdout)
    return path
