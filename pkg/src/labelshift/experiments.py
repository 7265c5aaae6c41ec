"""Excess-risk simulation harness: seeded grids over (n_P, n_Q), CSV output, summaries.

Risk is measured against the generator's analytic ground truth. For a fitted
classifier f and the true regression function eta, the excess risk over the
Bayes rule f* has the exact pointwise form

    E(f) = E[ |2*eta(X) - 1| * 1{f(X) != f*(X)} ],   X ~ target marginal,

so the harness scores predictions on a shared test draw using eta directly
instead of sampling labels. That keeps the estimator nonnegative and removes
the label-noise variance from method comparisons.

Determinism contract: every (cell, seed) work item derives its RNG streams
from SeedSequence((master_seed, cell_index, seed)), data never depends on the
method list, and records are emitted in grid order. With timing recording
switched off, rerunning a config yields a byte-identical CSV at any thread
count.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, TextIO

import numpy as np
from numpy.typing import NDArray

from .baselines import (
    classical_classify,
    classical_fit,
    interpolation_classify,
    interpolation_fit,
    oracle_classify,
    oracle_fit,
)
from .datagen import (
    SOURCE_CONFIG,
    TARGET_CONFIG,
    Dataset,
    GeneratorConfig,
    bayes_classify,
    generate,
    true_eta,
)
from .errors import (
    EmptyClassError,
    EmptyDatasetError,
    LabelShiftError,
    SingularConfusionError,
)
from .kernel_density import bandwidth_rule
from .shift_weights import fit_logistic_pilot
from .supervised_plugin import classify as supervised_classify
from .supervised_plugin import fit_supervised
from .unsupervised_plugin import classify_unsup, fit_unsupervised

METHOD_NAMES = ("supervised", "classical", "interpolation", "unsupervised", "oracle")
# "bayes" is also accepted (scores the analytic rule itself; useful as a null check).
GROWING_GRID = (100, 200, 400, 800, 1600, 3200, 6400)
MAX_REDRAWS = 100


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo risk of one classifier against the analytic Bayes rule."""

    excess_risk: float  # max(raw_excess, 0); raw is already >= 0 here by construction
    test_n: int
    bayes_risk: float
    method_risk: float
    raw_excess: float


def _risk_from_predictions(
    pred: NDArray[np.int64], eta: NDArray[np.float64], bayes_pred: NDArray[np.int64]
) -> RiskEstimate:
    margin = np.abs(2.0 * eta - 1.0)
    raw = float(np.mean(margin * (pred != bayes_pred)))
    bayes_risk = float(np.mean(np.minimum(eta, 1.0 - eta)))
    return RiskEstimate(
        excess_risk=max(raw, 0.0),
        test_n=len(pred),
        bayes_risk=bayes_risk,
        method_risk=bayes_risk + raw,
        raw_excess=raw,
    )


def estimate_excess_risk(
    classify_fn: Callable[[NDArray[np.float64]], NDArray[np.int64]],
    config: GeneratorConfig,
    test_n: int,
    rng: np.random.Generator,
) -> RiskEstimate:
    """Score a classifier on test_n fresh draws from the configured marginal."""
    if test_n < 1:
        raise ValueError(f"test_n must be >= 1, got {test_n}")
    test_x = generate(config, test_n, rng, domain="target").x
    eta = np.asarray(true_eta(config, test_x), dtype=float)
    bayes_pred = (eta > 0.5).astype(np.int64)
    pred = np.asarray(classify_fn(test_x), dtype=np.int64)
    if pred.shape != (test_n,):
        raise ValueError(f"classifier returned shape {pred.shape}, expected ({test_n},)")
    return _risk_from_predictions(pred, eta, bayes_pred)


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation grid: the cross product of n_p_grid and n_q_grid, seeded replicates.

    Every method gets its bandwidth from the n^(-1/6) rate rule scaled by the
    shared constant c1: the supervised plug-in on the pooled size n_P + n_Q,
    unsupervised/oracle on n_P, classical on n_Q, interpolation on both
    domain sizes. With the default c1 = 0.5 the kernel window on these 4-d
    grids is narrow (roughly n*h^4 ~ 1 sample points per window), so
    estimates ride on a few nearest neighbors; raising c1 trades that
    variance for smoothing bias. See the bandwidth note in the README.
    """

    n_p_grid: tuple[int, ...]
    n_q_grid: tuple[int, ...]
    methods: tuple[str, ...]
    seeds: int = 20
    test_n: int = 20_000
    master_seed: int = 0
    threads: int = 1
    record_timing: bool = True
    c1: float = 0.5
    preset: str = "custom"
    source: GeneratorConfig = field(default_factory=lambda: SOURCE_CONFIG)
    target: GeneratorConfig = field(default_factory=lambda: TARGET_CONFIG)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_p_grid", tuple(int(n) for n in self.n_p_grid))
        object.__setattr__(self, "n_q_grid", tuple(int(n) for n in self.n_q_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.n_p_grid or not self.n_q_grid:
            raise ValueError("sample-size grids must be nonempty")
        if min(self.n_p_grid) < 1 or min(self.n_q_grid) < 1:
            raise ValueError("sample sizes must be >= 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in METHOD_NAMES and m != "bayes":
                raise ValueError(f"unknown method {m!r}; choose from {METHOD_NAMES + ('bayes',)}")
        if self.seeds < 1:
            raise ValueError(f"seeds must be >= 1, got {self.seeds}")
        if self.test_n < 1:
            raise ValueError(f"test_n must be >= 1, got {self.test_n}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if not self.c1 > 0.0:
            raise ValueError(f"c1 must be > 0, got {self.c1}")
        if self.source.dim != self.target.dim:
            raise ValueError("source and target generators must share dim")

    @property
    def cells(self) -> list[tuple[int, int]]:
        return list(itertools.product(self.n_p_grid, self.n_q_grid))


_PRESET_FIELDS: dict[str, dict] = {
    "fig1_left": dict(
        n_p_grid=(100,),
        n_q_grid=GROWING_GRID,
        methods=("supervised", "classical", "interpolation"),
    ),
    "fig1_right": dict(
        n_p_grid=GROWING_GRID,
        n_q_grid=(100,),
        methods=("supervised", "classical", "interpolation"),
    ),
    "fig2_left": dict(
        n_p_grid=GROWING_GRID,
        n_q_grid=(100,),
        methods=("unsupervised", "oracle"),
    ),
    "fig2_right": dict(
        n_p_grid=(800,),
        n_q_grid=GROWING_GRID,
        methods=("unsupervised", "oracle"),
    ),
}

PRESET_NAMES = tuple(_PRESET_FIELDS)


def preset_config(name: str, **overrides) -> ExperimentConfig:
    """Named grid presets mirroring the reference figure panels; kwargs override fields."""
    if name not in _PRESET_FIELDS:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    cfg = ExperimentConfig(preset=name, **_PRESET_FIELDS[name])
    return replace(cfg, **overrides) if overrides else cfg


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from parsed structured data (the `sweep` CLI input).

    Recognized keys are the ExperimentConfig field names; `source` and
    `target` may be objects with GeneratorConfig field names. A `preset` key
    other than "custom" supplies defaults that the remaining keys override.
    """
    if not isinstance(raw, dict):
        raise ValueError("config root must be an object")
    data = dict(raw)
    preset = data.pop("preset", "custom")
    known = {
        "n_p_grid", "n_q_grid", "methods", "seeds", "test_n", "master_seed",
        "threads", "record_timing", "c1", "source", "target",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for gen_key in ("source", "target"):
        if gen_key in data:
            if not isinstance(data[gen_key], dict):
                raise ValueError(f"{gen_key} must be an object of generator fields")
            base = SOURCE_CONFIG if gen_key == "source" else TARGET_CONFIG
            fields = dict(data[gen_key])
            if "box" in fields:
                fields["box"] = tuple(fields["box"])
            try:
                data[gen_key] = replace(base, **fields)
            except TypeError as exc:
                raise ValueError(f"bad {gen_key} generator config: {exc}") from exc
    try:
        if preset != "custom":
            return preset_config(preset, **data)
        return ExperimentConfig(preset="custom", **data)
    except TypeError as exc:
        raise ValueError(f"bad config: {exc}") from exc


@dataclass(frozen=True)
class ExperimentRecord:
    """One (method, cell, seed) result; excess_risk is NaN when the fit failed."""

    method: str
    n_p: int
    n_q: int
    seed: int
    excess_risk: float
    wallclock_ms: float
    flags: tuple[str, ...] = ()


_ERROR_TOKENS = {
    SingularConfusionError: "singular-confusion",
    EmptyClassError: "empty-class",
    EmptyDatasetError: "empty-dataset",
}


def _error_token(exc: LabelShiftError) -> str:
    for klass, token in _ERROR_TOKENS.items():
        if isinstance(exc, klass):
            return token
    return type(exc).__name__.lower()


def _fit_and_predict(
    method: str,
    config: ExperimentConfig,
    source: Dataset,
    target: Dataset,
    test_x: NDArray[np.float64],
    cv_seed: np.random.SeedSequence,
) -> tuple[NDArray[np.int64], list[str]]:
    """Fit one method and predict the test features; returns (labels, flag tokens)."""
    flags: list[str] = []
    dim = target.dim
    if method == "supervised":
        pooled = bandwidth_rule(len(source) + len(target), 1.0, dim, config.c1)
        model = fit_supervised(source, target, bandwidth=pooled)
        pred = supervised_classify(model, test_x)
    elif method == "classical":
        model = classical_fit(target, bandwidth=bandwidth_rule(len(target), 1.0, dim, config.c1))
        pred = classical_classify(model, test_x)
    elif method == "interpolation":
        model = interpolation_fit(
            source,
            target,
            rng=np.random.default_rng(cv_seed),
            h_p=bandwidth_rule(len(source), 1.0, dim, config.c1),
            h_q=bandwidth_rule(len(target), 1.0, dim, config.c1),
        )
        if model.degenerate_cv:
            flags.append("cv-degenerate")
        pred = interpolation_classify(model, test_x)
    elif method == "unsupervised":
        pilot = fit_logistic_pilot(source)
        if not pilot.converged:
            flags.append("pilot-nonconverged")
        model = fit_unsupervised(source, target.without_labels(), pilot, c1=config.c1)
        if model.weights.clipped:
            flags.append("weight-clipped")
        pred = classify_unsup(model, test_x)
    elif method == "oracle":
        pi_p = config.source.class1_prior
        pi_q = config.target.class1_prior
        model = oracle_fit(source, (1.0 - pi_q) / (1.0 - pi_p), pi_q / pi_p, c1=config.c1)
        pred = oracle_classify(model, test_x)
    elif method == "bayes":
        pred = bayes_classify(config.target, test_x)
    else:  # pragma: no cover - rejected by config validation
        raise ValueError(f"unknown method {method!r}")
    return np.asarray(pred, dtype=np.int64), flags


def _run_work_item(args: tuple[ExperimentConfig, int, int, int, int]) -> list[ExperimentRecord]:
    config, cell_idx, n_p, n_q, seed = args
    root = np.random.SeedSequence((config.master_seed, cell_idx, seed))
    data_ss, test_ss, cv_ss = root.spawn(3)

    data_rng = np.random.default_rng(data_ss)
    source = generate(config.source, n_p, data_rng, domain="source")
    target = generate(config.target, n_q, data_rng, domain="target")
    redraws = 0
    # Tiny targets can come out single-label, collapsing pi_q_hat to 0 or 1;
    # redraw those (and say so) instead of letting one degenerate draw dominate.
    while n_q < 20 and len(np.unique(target.y)) < 2 and redraws < MAX_REDRAWS:
        target = generate(config.target, n_q, data_rng, domain="target")
        redraws += 1

    test_x = generate(config.target, config.test_n, np.random.default_rng(test_ss)).x
    eta = np.asarray(true_eta(config.target, test_x), dtype=float)
    bayes_pred = (eta > 0.5).astype(np.int64)

    base_flags = [f"redraw-count={redraws}"] if redraws else []
    records = []
    for method in config.methods:
        start = time.perf_counter()
        try:
            pred, flags = _fit_and_predict(method, config, source, target, test_x, cv_ss)
            excess = _risk_from_predictions(pred, eta, bayes_pred).excess_risk
        except LabelShiftError as exc:
            excess = math.nan
            flags = [f"failed={_error_token(exc)}"]
        elapsed_ms = (time.perf_counter() - start) * 1000.0 if config.record_timing else 0.0
        records.append(
            ExperimentRecord(
                method=method,
                n_p=n_p,
                n_q=n_q,
                seed=seed,
                excess_risk=excess,
                wallclock_ms=elapsed_ms,
                flags=tuple(base_flags + flags),
            )
        )
    return records


def evaluate_cell(config: ExperimentConfig, n_p: int, n_q: int, seed: int) -> list[ExperimentRecord]:
    """Run one work item outside a grid: cell index 0, the given seed index.

    Matches the records a 1x1 grid at this cell would produce for that seed.
    """
    if n_p < 1 or n_q < 1 or seed < 0:
        raise ValueError("need n_p >= 1, n_q >= 1, seed >= 0")
    return _run_work_item((config, 0, n_p, n_q, seed))


def run_grid(config: ExperimentConfig) -> list[ExperimentRecord]:
    """Run every (cell, seed) work item and return records in deterministic grid order.

    Work items are independent; with threads > 1 they run in a process pool.
    Ordering and RNG derivation are positional, so the records (and any CSV
    written from them) do not depend on the thread count. Per-item failures
    become NaN rows with a `failed=...` flag; the grid always completes.
    """
    items = [
        (config, cell_idx, n_p, n_q, seed)
        for cell_idx, (n_p, n_q) in enumerate(config.cells)
        for seed in range(config.seeds)
    ]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            per_item = list(pool.map(_run_work_item, items))
    else:
        per_item = [_run_work_item(item) for item in items]
    return [record for group in per_item for record in group]


def _fmt(value: float) -> str:
    return format(value, ".10g")


def write_csv(records: Sequence[ExperimentRecord], path: str) -> None:
    """Write records as CSV: 10-significant-digit floats, `;`-joined flags, UTF-8, LF."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("method,n_p,n_q,seed,excess_risk,wallclock_ms,flags\n")
        for r in records:
            fh.write(
                f"{r.method},{r.n_p},{r.n_q},{r.seed},"
                f"{_fmt(r.excess_risk)},{_fmt(r.wallclock_ms)},{';'.join(r.flags)}\n"
            )


@dataclass(frozen=True)
class SummaryRow:
    method: str
    n_p: int
    n_q: int
    n_seeds: int
    failures: int
    median: float  # NaN when every seed failed
    iqr: float


def summarize(records: Sequence[ExperimentRecord], stream: TextIO | None = None) -> list[SummaryRow]:
    """Median/IQR of excess risk per (method, n_p, n_q), printed as a table.

    Failed (NaN) rows are excluded from the quantiles and counted in the
    failures column. Returns the rows for programmatic use.
    """
    if stream is None:
        stream = sys.stdout
    groups: dict[tuple[str, int, int], list[float]] = {}
    for r in records:
        groups.setdefault((r.method, r.n_p, r.n_q), []).append(r.excess_risk)
    rows = []
    for (method, n_p, n_q), values in groups.items():
        arr = np.asarray(values)
        ok = arr[~np.isnan(arr)]
        if ok.size:
            median = float(np.median(ok))
            q25, q75 = np.percentile(ok, [25.0, 75.0])
            iqr = float(q75 - q25)
        else:
            median = math.nan
            iqr = math.nan
        rows.append(
            SummaryRow(
                method=method,
                n_p=n_p,
                n_q=n_q,
                n_seeds=len(values),
                failures=int(np.isnan(arr).sum()),
                median=median,
                iqr=iqr,
            )
        )
    header = f"{'method':<14} {'n_p':>6} {'n_q':>6} {'seeds':>5} {'fail':>4} {'median':>12} {'iqr':>12}"
    print(header, file=stream)
    for row in rows:
        print(
            f"{row.method:<14} {row.n_p:>6} {row.n_q:>6} {row.n_seeds:>5} "
            f"{row.failures:>4} {row.median:>12.6g} {row.iqr:>12.6g}",
            file=stream,
        )
    return rows
