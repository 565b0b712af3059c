"""Synthetic scorecard-like CSV files with a known net-price formula.

The label follows::

    net_price = 0.6 * COSTT4_A - 1500 * [CONTROL == 3] + 0.2 * TUITIONFEE_IN + N(0, noise^2)

and is written to ``NPT4_PUB`` for public rows (``CONTROL == 1``) and to
``NPT4_PRIV`` otherwise, mimicking the split label columns of the real data.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

HEADER = ["UNITID", "INSTNM", "CONTROL", "COSTT4_A", "TUITIONFEE_IN",
          "TUITIONFEE_OUT", "NPT4_PUB", "NPT4_PRIV"]

_TUITION_RANGE = {1: (4_000, 12_000), 2: (15_000, 45_000), 3: (10_000, 20_000)}


def generate_rows(n_rows: int, seed: int = 0, noise: float = 500.0,
                  missing_rate: float = 0.0, unlabeled_rate: float = 0.0) -> list[dict]:
    """Rows of raw string cells, one dict per institution-year."""
    rng = np.random.default_rng(seed)
    control = rng.choice([1, 2, 3], size=n_rows, p=[0.4, 0.35, 0.25])
    lo = np.array([_TUITION_RANGE[c][0] for c in control])
    hi = np.array([_TUITION_RANGE[c][1] for c in control])
    tuition_in = np.round(rng.uniform(lo, hi))
    tuition_out = np.where(control == 1, tuition_in + np.round(rng.uniform(5_000, 15_000, n_rows)),
                           tuition_in)
    cost = tuition_in + np.round(rng.uniform(10_000, 20_000, n_rows))
    label = 0.6 * cost - 1_500 * (control == 3) + 0.2 * tuition_in + rng.normal(0, noise, n_rows)
    label = np.maximum(np.round(label), 0)

    rows = []
    for i in range(n_rows):
        row = {
            "UNITID": str(100000 + i),
            "INSTNM": f"College {i}",
            "CONTROL": str(control[i]),
            "COSTT4_A": f"{cost[i]:.0f}",
            "TUITIONFEE_IN": f"{tuition_in[i]:.0f}",
            "TUITIONFEE_OUT": f"{tuition_out[i]:.0f}",
            "NPT4_PUB": f"{label[i]:.0f}" if control[i] == 1 else "NULL",
            "NPT4_PRIV": f"{label[i]:.0f}" if control[i] != 1 else "NULL",
        }
        for col in ("COSTT4_A", "TUITIONFEE_IN", "TUITIONFEE_OUT"):
            if rng.random() < missing_rate:
                row[col] = "NULL" if rng.random() < 0.5 else "PrivacySuppressed"
        if rng.random() < unlabeled_rate:
            row["NPT4_PUB"] = row["NPT4_PRIV"] = "PrivacySuppressed"
        rows.append(row)
    return rows


def write_scorecard(directory, years, rows_per_year: int, seed: int = 0, **kwargs) -> list[dict]:
    """Write one ``scorecard_<year>.csv`` per year; returns run-spec input entries."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    inputs = []
    for offset, year in enumerate(years):
        rows = generate_rows(rows_per_year, seed=seed + offset, **kwargs)
        path = directory / f"scorecard_{year}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=HEADER)
            writer.writeheader()
            writer.writerows(rows)
        inputs.append({"path": path.name, "year": int(year)})
    return inputs
