"""Figure panels from labelshift harness CSVs.

Consumes the harness output format only (header
``method,n_p,n_q,seed,excess_risk,wallclock_ms,flags``); no import of the
harness itself. Each panel is one axes: per-method median excess risk
against a sample-size axis, with a shaded interquartile band over seeds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure
from matplotlib.ticker import ScalarFormatter

__all__ = [
    "PANELS",
    "PlotSpec",
    "PlotInputError",
    "MissingColumnError",
    "load_rows",
    "panel_series",
    "build_figure",
    "render",
]

# Default x-axis per panel. The fig1 panels plot against the pooled size
# (one of the two samples is held fixed, so the pooled axis and the growing
# axis order the cells identically); the fig2 panels plot against the axis
# that actually grows.
PANELS = {
    "fig1_left": "n_p_plus_n_q",
    "fig1_right": "n_p_plus_n_q",
    "fig2_left": "n_p",
    "fig2_right": "n_q",
}

X_LABELS = {
    "n_p_plus_n_q": "n_P + n_Q",
    "n_p": "n_P",
    "n_q": "n_Q",
}

REQUIRED_COLUMNS = ("method", "n_p", "n_q", "seed", "excess_risk")

# Stable colors so the same method looks the same across panels regardless
# of which other methods share the CSV.
METHOD_COLORS = {
    "supervised": "tab:blue",
    "classical": "tab:orange",
    "interpolation": "tab:green",
    "unsupervised": "tab:red",
    "oracle": "tab:purple",
    "bayes": "tab:gray",
}

SUPPORTED_SUFFIXES = (".png", ".svg")


class PlotInputError(Exception):
    """The CSV or the requested plot violates the input contract."""


class MissingColumnError(PlotInputError):
    def __init__(self, columns: tuple[str, ...]):
        self.columns = columns
        super().__init__(f"CSV is missing required column(s): {', '.join(columns)}")


@dataclass(frozen=True)
class PlotSpec:
    """One panel render: which CSV, which panel, where the image goes.

    ``x_axis`` defaults to the panel's natural axis and ``log_x`` to True
    (the grids are doubling sequences, so rate curves want a log axis).
    """

    input_csv: Path
    panel: str
    output: Path
    x_axis: str = ""
    log_x: bool | None = None

    def __post_init__(self) -> None:
        if self.panel not in PANELS:
            raise PlotInputError(
                f"unknown panel {self.panel!r} (expected one of {', '.join(sorted(PANELS))})"
            )
        object.__setattr__(self, "input_csv", Path(self.input_csv))
        object.__setattr__(self, "output", Path(self.output))
        if not self.x_axis:
            object.__setattr__(self, "x_axis", PANELS[self.panel])
        if self.x_axis not in X_LABELS:
            raise PlotInputError(
                f"unknown x_axis {self.x_axis!r} (expected one of {', '.join(sorted(X_LABELS))})"
            )
        if self.log_x is None:
            object.__setattr__(self, "log_x", True)
        suffix = self.output.suffix.lower()
        if suffix not in SUPPORTED_SUFFIXES:
            raise PlotInputError(
                f"unsupported output format {suffix!r} (use one of {', '.join(SUPPORTED_SUFFIXES)})"
            )


def load_rows(path: Path) -> list[dict]:
    """Read the harness CSV. Rejects a missing header, missing required
    columns, unparseable values, and a file with no data rows."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotInputError(f"{path}: empty file, no header row")
        missing = tuple(c for c in REQUIRED_COLUMNS if c not in reader.fieldnames)
        if missing:
            raise MissingColumnError(missing)
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            try:
                rows.append(
                    {
                        "method": raw["method"],
                        "n_p": int(raw["n_p"]),
                        "n_q": int(raw["n_q"]),
                        "seed": int(raw["seed"]),
                        "excess_risk": float(raw["excess_risk"]),
                    }
                )
            except (TypeError, ValueError) as exc:
                raise PlotInputError(f"{path}:{lineno}: malformed row: {exc}") from exc
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    return rows


def _x_value(row: dict, x_axis: str) -> int:
    if x_axis == "n_p_plus_n_q":
        return row["n_p"] + row["n_q"]
    return row[x_axis]


def panel_series(
    rows: list[dict], x_axis: str
) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Per method: sorted x values with median and quartiles of excess risk
    over seeds. NaN rows (failed fits) are dropped; a method whose rows are
    all NaN is an error because its line would be empty."""
    groups: dict[str, dict[int, list[float]]] = {}
    for row in rows:
        per_x = groups.setdefault(row["method"], {})
        value = row["excess_risk"]
        if math.isnan(value):
            continue
        per_x.setdefault(_x_value(row, x_axis), []).append(value)
    series = {}
    for method, per_x in groups.items():
        if not per_x:
            raise PlotInputError(f"method {method!r} has no finite excess_risk values")
        xs = np.array(sorted(per_x))
        stacked = [np.percentile(per_x[x], [50.0, 25.0, 75.0]) for x in xs]
        med, lo, hi = np.array(stacked).T
        series[method] = (xs, med, lo, hi)
    return series


def build_figure(spec: PlotSpec) -> Figure:
    """Load the CSV and draw the panel; the caller owns the Figure."""
    rows = load_rows(spec.input_csv)
    series = panel_series(rows, spec.x_axis)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    tick_values: set[int] = set()
    for method in sorted(series):
        xs, med, lo, hi = series[method]
        tick_values.update(int(x) for x in xs)
        (line,) = ax.plot(
            xs, med, marker="o", markersize=4, label=method,
            color=METHOD_COLORS.get(method),
        )
        ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color(), linewidth=0)
    if spec.log_x:
        ax.set_xscale("log", base=2)
        ax.xaxis.set_major_formatter(ScalarFormatter())
        ax.minorticks_off()
    ax.set_xticks(sorted(tick_values))
    ax.tick_params(axis="x", labelsize=9)
    ax.set_xlabel(X_LABELS[spec.x_axis])
    ax.set_ylabel("excess risk (median, IQR band)")
    ax.set_title(spec.panel)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> Path:
    """Render the panel to ``spec.output`` and return that path.

    Read-only on the CSV. Nothing is written until the figure is complete,
    so input errors never leave a file behind. Output bytes are a pure
    function of the CSV and the spec (SVG ids are salted with a constant
    and its date field is stripped; PNG carries no timestamp).
    """
    fig = build_figure(spec)
    try:
        if spec.output.suffix.lower() == ".svg":
            with matplotlib.rc_context({"svg.hashsalt": "plot_results"}):
                fig.savefig(spec.output, metadata={"Date": None})
        else:
            fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    return spec.output
