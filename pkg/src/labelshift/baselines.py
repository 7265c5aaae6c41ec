"""Comparison classifiers: target-only kernel rule, source/target interpolation, oracle weights.

These are the rules the plug-in estimators are measured against:

* classical: Nadaraya-Watson regression on the target data alone, thresholded
  at 1/2. Ignores the source entirely.
* interpolation: thresholds eps * NW_source + (1 - eps) * NW_target, with eps
  picked by k-fold cross-validation on the target.
* oracle: the unsupervised pipeline with the true class-probability ratios
  substituted for the matched ones. Everything downstream of the weights is
  shared with the unsupervised classifier, so the pair isolates exactly the
  cost of weight estimation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .datagen import Dataset
from .kernel_density import Bandwidth, KernelSpec, bandwidth_rule, scaled_kernel_sum
from .shift_weights import ShiftWeights
from .unsupervised_plugin import UnsupervisedModel, classify_unsup, fit_with_weights

DEFAULT_EPSILON_GRID = tuple(round(0.1 * k, 1) for k in range(11))


@dataclass(frozen=True)
class NadarayaWatson:
    """Kernel-weighted label average; estimates the regression function."""

    kernel: KernelSpec
    bandwidth: Bandwidth
    points: NDArray[np.float64]
    labels: NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        lab = np.asarray(self.labels, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"points must be a nonempty (n, d) array, got {pts.shape}")
        if lab.shape != (pts.shape[0],):
            raise ValueError("labels must align with points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    def estimate(self, x: NDArray[np.float64]) -> np.float64 | NDArray[np.float64]:
        """sum_i y_i K_h(x - x_i) / sum_i K_h(x - x_i); 1/2 where the denominator is 0."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        num = scaled_kernel_sum(self.kernel, self.bandwidth, self.points, pts, weights=self.labels)
        den = scaled_kernel_sum(self.kernel, self.bandwidth, self.points, pts)
        vals = np.full(num.shape, 0.5)
        np.divide(num, den, out=vals, where=den > 0.0)
        return np.float64(vals[0]) if single else vals


def _fit_nw(data: Dataset, kernel: KernelSpec | None, bandwidth: Bandwidth | None) -> NadarayaWatson:
    y = data.require_labels()
    if kernel is None:
        kernel = KernelSpec("gaussian", data.dim)
    if bandwidth is None:
        bandwidth = bandwidth_rule(len(data), 1.0, data.dim, 0.5)
    return NadarayaWatson(kernel=kernel, bandwidth=bandwidth, points=data.x, labels=y.astype(float))


def classical_fit(
    target: Dataset, kernel: KernelSpec | None = None, bandwidth: Bandwidth | None = None
) -> NadarayaWatson:
    """Target-only kernel regressor; default bandwidth is the rate rule on n_Q."""
    return _fit_nw(target, kernel, bandwidth)


def classical_classify(model: NadarayaWatson, x: NDArray[np.float64]) -> np.int64 | NDArray[np.int64]:
    """1 where the regression estimate exceeds 1/2, else 0 (0/0 defaults to 1/2, hence 0)."""
    est = model.estimate(x)
    if np.ndim(est):
        return (np.asarray(est) > 0.5).astype(np.int64)
    return np.int64(est > 0.5)


@dataclass(frozen=True)
class InterpolationModel:
    epsilon: float
    source_nw: NadarayaWatson
    target_nw: NadarayaWatson
    cv_scores: tuple[float, ...]  # mean fold error rate per grid value, grid order
    epsilon_grid: tuple[float, ...]
    folds_used: int
    degenerate_cv: bool  # True when folds had to shrink to n_Q


def stratified_folds(y: NDArray[np.int64], folds: int, rng: np.random.Generator) -> NDArray[np.int64]:
    """Fold index per sample: a seeded shuffle within each class, dealt round-robin.

    Keeps class proportions near-equal across folds so a 0.9-prior target does
    not produce single-class folds at small n. Deterministic given the rng
    state.
    """
    assignment = np.empty(len(y), dtype=np.int64)
    offset = 0
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        rng.shuffle(idx)
        assignment[idx] = (offset + np.arange(idx.size)) % folds
        offset += idx.size
    return assignment


def interpolation_fit(
    source: Dataset,
    target: Dataset,
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID,
    folds: int = 5,
    rng: np.random.Generator | None = None,
    kernel: KernelSpec | None = None,
    h_p: Bandwidth | None = None,
    h_q: Bandwidth | None = None,
) -> InterpolationModel:
    """Pick eps minimizing k-fold CV misclassification of the mixed rule on the target.

    Folds split the target; the full source regressor participates in every
    fold. The CV score per eps is the unweighted mean of fold error rates;
    ties go to the smaller eps. When n_Q < folds the fold count drops to n_Q
    and the model is flagged degenerate.
    """
    y = target.require_labels()
    source.require_labels()
    if not epsilon_grid:
        raise ValueError("epsilon_grid must be nonempty")
    grid = tuple(sorted(float(e) for e in epsilon_grid))
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError(f"epsilon_grid must lie in [0, 1], got {grid}")
    if rng is None:
        rng = np.random.default_rng()
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    degenerate = len(target) < folds
    folds_used = min(folds, len(target))
    # Bandwidths come from the full-sample rules; the fold split tunes eps only.
    if h_p is None:
        h_p = bandwidth_rule(len(source), 1.0, target.dim, 0.5)
    if h_q is None:
        h_q = bandwidth_rule(len(target), 1.0, target.dim, 0.5)

    source_nw = _fit_nw(source, kernel, h_p)
    if folds_used >= 2:
        assignment = stratified_folds(y, folds_used, rng)
        fold_errors = np.zeros((folds_used, len(grid)))
        for k in range(folds_used):
            held = assignment == k
            train = Dataset(target.x[~held], y[~held], target.domain)
            nw_k = _fit_nw(train, kernel, h_q)
            p_est = np.asarray(source_nw.estimate(target.x[held]), dtype=float)
            q_est = np.asarray(nw_k.estimate(target.x[held]), dtype=float)
            truth = y[held]
            for e_idx, eps in enumerate(grid):
                pred = (eps * p_est + (1.0 - eps) * q_est > 0.5).astype(np.int64)
                fold_errors[k, e_idx] = np.mean(pred != truth)
        cv_scores = fold_errors.mean(axis=0)
    else:
        # Single-point target: no held-out fold can be formed; fall back to
        # the smallest eps and let the degenerate flag surface it.
        cv_scores = np.zeros(len(grid))
    best = 0
    for e_idx in range(1, len(grid)):
        if cv_scores[e_idx] < cv_scores[best]:
            best = e_idx
    target_nw = _fit_nw(target, kernel, h_q)
    return InterpolationModel(
        epsilon=grid[best],
        source_nw=source_nw,
        target_nw=target_nw,
        cv_scores=tuple(float(s) for s in cv_scores),
        epsilon_grid=grid,
        folds_used=folds_used,
        degenerate_cv=degenerate,
    )


def interpolation_estimate(model: InterpolationModel, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """eps * NW_source + (1 - eps) * NW_target at x."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    p_est = np.asarray(model.source_nw.estimate(pts), dtype=float)
    q_est = np.asarray(model.target_nw.estimate(pts), dtype=float)
    return model.epsilon * p_est + (1.0 - model.epsilon) * q_est


def interpolation_classify(
    model: InterpolationModel, x: NDArray[np.float64]
) -> np.int64 | NDArray[np.int64]:
    """Threshold the mixed estimate at 1/2 (tie to 0)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pred = (interpolation_estimate(model, x) > 0.5).astype(np.int64)
    return np.int64(pred[0]) if single else pred


def oracle_fit(
    source: Dataset,
    w0: float,
    w1: float,
    kernel: KernelSpec | None = None,
    alpha: float = 1.0,
    c1: float = 0.5,
    bandwidth: Bandwidth | None = None,
) -> UnsupervisedModel:
    """The unsupervised pipeline with known class ratios; no target data needed."""
    if w0 < 0 or w1 < 0:
        raise ValueError(f"class ratios must be nonnegative, got ({w0}, {w1})")
    weights = ShiftWeights(w0=float(w0), w1=float(w1))
    return fit_with_weights(source, weights, kernel=kernel, alpha=alpha, c1=c1, bandwidth=bandwidth)


def oracle_classify(model: UnsupervisedModel, x: NDArray[np.float64]) -> np.int64 | NDArray[np.int64]:
    """Same decision rule as the unsupervised classifier."""
    return classify_unsup(model, x)
