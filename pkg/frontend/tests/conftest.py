"""Shared fixtures: tiny real harness runs, one CSV shaped like each panel.

The harness is consumed strictly through its installed CLI (`labelshift`);
nothing from the harness package is imported. Grids are scaled down so the
whole session's worth of runs takes seconds.
"""

from __future__ import annotations

import json
import shutil
import subprocess

import pytest

PANEL_CONFIGS = {
    "fig1_left": {"n_p_grid": [30], "n_q_grid": [20, 40, 80],
                  "methods": ["supervised", "classical"]},
    "fig1_right": {"n_p_grid": [20, 40, 80], "n_q_grid": [30],
                   "methods": ["supervised", "classical"]},
    "fig2_left": {"n_p_grid": [25, 50, 100], "n_q_grid": [30],
                  "methods": ["unsupervised", "oracle"]},
    "fig2_right": {"n_p_grid": [60], "n_q_grid": [25, 50, 100],
                   "methods": ["unsupervised", "oracle"]},
}
COMMON = {"seeds": 3, "test_n": 300, "record_timing": False}

HEADER = "method,n_p,n_q,seed,excess_risk,wallclock_ms,flags\n"


@pytest.fixture(scope="session")
def harness_csvs(tmp_path_factory):
    """{panel: (csv_path, summary_stdout)} from real `labelshift sweep` runs."""
    if shutil.which("labelshift") is None:
        pytest.fail("labelshift CLI not on PATH; install the harness package first")
    root = tmp_path_factory.mktemp("harness")
    out = {}
    for panel, grid in PANEL_CONFIGS.items():
        cfg = root / f"{panel}.json"
        cfg.write_text(json.dumps(grid | COMMON))
        csv_path = root / f"{panel}.csv"
        proc = subprocess.run(
            ["labelshift", "sweep", "--config", str(cfg), "--out", str(csv_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        out[panel] = (csv_path, proc.stdout)
    return out


def parse_summary(stdout: str) -> dict[tuple[str, int, int], float]:
    """Median column of the harness summary table, keyed (method, n_p, n_q)."""
    table = {}
    for line in stdout.splitlines():
        parts = line.split()
        if len(parts) != 7:
            continue
        try:
            n_p, n_q = int(parts[1]), int(parts[2])
            median = float(parts[5])
        except ValueError:
            continue
        table[(parts[0], n_p, n_q)] = median
    return table
