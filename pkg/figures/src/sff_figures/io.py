"""Run-directory reading against the versioned CSV/JSON schema."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SUPPORTED_SCHEMA = 1

SFF_COLUMNS = ("t", "tau", "m", "K", "stderr", "kappa", "delta_kappa", "realizations")
SPACING_COLUMNS = ("s_mid", "p_s", "realizations", "p_cue", "p_poisson")
THEORY_COLUMNS = ("t", "value", "model")


class SchemaError(ValueError):
    """Input file does not match the expected run-directory schema."""


def _to_float(token: str) -> float:
    if token == "n/a":
        return float("nan")
    return float(token)


def load_table(path: Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Parse a CSV file into float columns, checking every required column."""
    if not path.exists():
        raise SchemaError(f"missing input file {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"empty input file {path}") from None
        for col in required:
            if col not in header:
                raise SchemaError(f"missing column {col!r} in {path.name}")
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"no data rows in {path.name}")
    data = {}
    for col in required:
        i = header.index(col)
        if col == "model":
            data[col] = np.array([row[i] for row in rows])
        else:
            data[col] = np.array([_to_float(row[i]) for row in rows])
    return data


def load_meta(run_dir: Path) -> dict:
    path = run_dir / "meta.json"
    if not path.exists():
        raise SchemaError(f"missing input file {path}")
    meta = json.loads(path.read_text())
    version = meta.get("schema_version")
    if version != SUPPORTED_SCHEMA:
        raise SchemaError(f"unsupported schema_version {version!r} in {path}")
    return meta


def load_sff_run(run_dir: Path):
    return load_meta(run_dir), load_table(run_dir / "sff.csv", SFF_COLUMNS)


def load_spacing_run(run_dir: Path):
    return load_meta(run_dir), load_table(run_dir / "spacings.csv", SPACING_COLUMNS)


def load_theory(path: Path):
    return load_table(path, THEORY_COLUMNS)
