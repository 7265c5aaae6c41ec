"""Unsupervised label-shift classifier: source KDEs reweighted by matched class ratios.

No target labels are used anywhere. A pilot classifier turns the unlabeled
target into one number (its positive-prediction rate), distributional
matching turns that into class-probability ratios (w0, w1), and the
classifier is the plug-in

    eta_tilde(x) = pi_tilde * g1(x) / (pi_tilde * g1(x) + rho_tilde * g0(x))

with pi_tilde = pi_p_hat * w1 and rho_tilde = (1 - pi_p_hat) * w0, both KDEs
fit on source data only. An equivalent "raw" form, a weighted kernel
regression over the full source sample, is kept for verification; the two are
the same algebraic object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .datagen import Dataset
from .errors import EmptyClassError
from .kernel_density import (
    Bandwidth,
    KdeModel,
    KernelSpec,
    bandwidth_rule,
    density_at,
    scaled_kernel_sum,
)
from .shift_weights import (
    DEFAULT_DET_FLOOR,
    PilotClassifier,
    ShiftWeights,
    confusion_estimate,
    fit_logistic_pilot,
    solve_weights,
    xi_estimate,
)


@dataclass(frozen=True)
class UnsupervisedModel:
    weights: ShiftWeights
    pi_p_hat: float
    g0_tilde: KdeModel
    g1_tilde: KdeModel
    bandwidth_used: Bandwidth

    @property
    def pi_tilde(self) -> float:
        """Reweighted target class-1 prior estimate pi_p_hat * w1."""
        return self.pi_p_hat * self.weights.w1

    @property
    def rho_tilde(self) -> float:
        """Reweighted target class-0 prior estimate (1 - pi_p_hat) * w0."""
        return (1.0 - self.pi_p_hat) * self.weights.w0


def _fit_source_kdes(
    source: Dataset,
    weights: ShiftWeights,
    kernel: KernelSpec | None,
    alpha: float,
    c1: float,
    bandwidth: Bandwidth | None,
) -> UnsupervisedModel:
    y = source.require_labels()
    n1 = int(np.count_nonzero(y == 1))
    if n1 == 0 or n1 == len(source):
        raise EmptyClassError("source data must contain both labels")
    if kernel is None:
        kernel = KernelSpec("gaussian", source.dim)
    if bandwidth is None:
        bandwidth = bandwidth_rule(len(source), alpha, source.dim, c1)
    g0 = KdeModel(kernel, bandwidth, source.features_of(0))
    g1 = KdeModel(kernel, bandwidth, source.features_of(1))
    return UnsupervisedModel(
        weights=weights,
        pi_p_hat=n1 / len(source),
        g0_tilde=g0,
        g1_tilde=g1,
        bandwidth_used=bandwidth,
    )


def fit_unsupervised(
    source: Dataset,
    target_features: Dataset,
    pilot: PilotClassifier | None = None,
    kernel: KernelSpec | None = None,
    alpha: float = 1.0,
    c1: float = 0.5,
    det_floor: float = DEFAULT_DET_FLOOR,
    bandwidth: Bandwidth | None = None,
) -> UnsupervisedModel:
    """Run the full pipeline: confusion matrix, xi, weight solve, source KDEs.

    ``target_features`` may be unlabeled; only the pilot's predictions on it
    are used. ``pilot=None`` fits the logistic pilot on the source. The
    default bandwidth is the rate rule on n_P. Raises SingularConfusionError
    when the pilot's confusion matrix determinant falls below ``det_floor``
    and EmptyClassError when the source lacks a class.
    """
    if pilot is None:
        pilot = fit_logistic_pilot(source)
    c = confusion_estimate(source, pilot)
    xi = xi_estimate(target_features, pilot)
    weights = solve_weights(c, xi, det_floor=det_floor)
    return _fit_source_kdes(source, weights, kernel, alpha, c1, bandwidth)


def fit_with_weights(
    source: Dataset,
    weights: ShiftWeights,
    kernel: KernelSpec | None = None,
    alpha: float = 1.0,
    c1: float = 0.5,
    bandwidth: Bandwidth | None = None,
) -> UnsupervisedModel:
    """Skip matching and force the class ratios; the oracle baseline uses this."""
    return _fit_source_kdes(source, weights, kernel, alpha, c1, bandwidth)


def eta_hat_unsup(
    model: UnsupervisedModel, x: NDArray[np.float64], raw: bool = False
) -> np.float64 | NDArray[np.float64]:
    """Estimate of Q(Y=1 | X=x); 1/2 where numerator and denominator are both 0.

    ``raw=True`` evaluates the weighted kernel-regression form directly (one
    pass over the entire source sample instead of the per-class KDEs). The two
    forms are algebraically identical; the flag exists so tests can assert
    that.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if raw:
        vals = _eta_raw(model, pts)
    else:
        num = model.pi_tilde * np.asarray(density_at(model.g1_tilde, pts), dtype=float)
        den = num + model.rho_tilde * np.asarray(density_at(model.g0_tilde, pts), dtype=float)
        vals = np.full(num.shape, 0.5)
        np.divide(num, den, out=vals, where=den > 0.0)
    return np.float64(vals[0]) if single else vals


def _eta_raw(model: UnsupervisedModel, pts: NDArray[np.float64]) -> NDArray[np.float64]:
    # Weighted kernel regression over the concatenated source sample:
    #   num(x) = (1/n) sum_l w1 * y_l * K_h(x - x_l)
    #   den(x) = (1/n) sum_l (w1 * y_l + w0 * (1 - y_l)) * K_h(x - x_l)
    points = np.concatenate([model.g0_tilde.points, model.g1_tilde.points])
    y = np.concatenate(
        [np.zeros(model.g0_tilde.n), np.ones(model.g1_tilde.n)]
    )
    n = points.shape[0]
    sample_w = model.weights.w1 * y + model.weights.w0 * (1.0 - y)
    num = scaled_kernel_sum(
        model.g1_tilde.kernel, model.bandwidth_used, points, pts, weights=model.weights.w1 * y
    ) / n
    den = scaled_kernel_sum(
        model.g1_tilde.kernel, model.bandwidth_used, points, pts, weights=sample_w
    ) / n
    out = np.full(num.shape, 0.5)
    np.divide(num, den, out=out, where=den > 0.0)
    return out


def classify_unsup(model: UnsupervisedModel, x: NDArray[np.float64]) -> np.int64 | NDArray[np.int64]:
    """1 where eta_hat_unsup > 1/2, else 0 (ties to 0)."""
    eta = eta_hat_unsup(model, x)
    if np.ndim(eta):
        return (np.asarray(eta) > 0.5).astype(np.int64)
    return np.int64(eta > 0.5)
