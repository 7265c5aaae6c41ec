"""Supervised label-shift classifier: pooled per-class KDEs with a target-prior plug-in.

With labeled data from both domains and the label-shift assumption (shared
class conditionals), every labeled sample is evidence about g0 and g1
regardless of domain. The estimator pools source and target features by
label, fits one KDE per class, estimates the target class-1 prior from the
target labels alone, and classifies by thresholding

    eta_hat(x) = pi_hat * g1_hat(x) / (pi_hat * g1_hat(x) + (1 - pi_hat) * g0_hat(x))

at 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .datagen import Dataset
from .errors import EmptyClassError
from .kernel_density import Bandwidth, KdeModel, KernelSpec, bandwidth_rule, density_at


@dataclass(frozen=True)
class SupervisedModel:
    pi_q_hat: float
    g0_hat: KdeModel
    g1_hat: KdeModel
    bandwidth_used: Bandwidth
    m: int  # smaller of the two pooled class sizes; drives the default bandwidth


def estimate_pi(target: Dataset) -> float:
    """Fraction of target labels equal to 1."""
    y = target.require_labels()
    return float(np.count_nonzero(y == 1)) / len(target)


def fit_supervised(
    source: Dataset | None,
    target: Dataset,
    kernel: KernelSpec | None = None,
    alpha: float = 1.0,
    c1: float = 0.5,
    bandwidth: Bandwidth | None = None,
) -> SupervisedModel:
    """Fit the pooled plug-in model.

    The default bandwidth is the rate rule on m = min(n0, n1) over the pooled
    sample; pass ``bandwidth`` to pin it (the simulation presets use the
    pooled-size rule instead). ``source`` may be empty or None, in which case
    the model degenerates to a target-only plug-in; ``target`` must be labeled
    and nonempty, and the pool must contain both classes.
    """
    pi_q_hat = estimate_pi(target)
    if source is not None and len(source):
        source.require_labels()
        if source.dim != target.dim:
            raise ValueError(f"source dim {source.dim} != target dim {target.dim}")
        pooled_x = np.concatenate([source.x, target.x])
        pooled_y = np.concatenate([source.y, target.y])
    else:
        pooled_x, pooled_y = target.x, target.y
    n1 = int(np.count_nonzero(pooled_y == 1))
    n0 = len(pooled_y) - n1
    if n0 == 0 or n1 == 0:
        raise EmptyClassError(f"pooled data has class sizes n0={n0}, n1={n1}; need both")
    m = min(n0, n1)
    if kernel is None:
        kernel = KernelSpec("gaussian", target.dim)
    if bandwidth is None:
        bandwidth = bandwidth_rule(m, alpha, target.dim, c1)
    g0 = KdeModel(kernel, bandwidth, pooled_x[pooled_y == 0])
    g1 = KdeModel(kernel, bandwidth, pooled_x[pooled_y == 1])
    return SupervisedModel(pi_q_hat=pi_q_hat, g0_hat=g0, g1_hat=g1, bandwidth_used=bandwidth, m=m)


def plugin_eta(pi: float, g1_vals: NDArray, g0_vals: NDArray) -> NDArray[np.float64]:
    """pi*g1 / (pi*g1 + (1-pi)*g0) with the 0/0 convention eta = 1/2."""
    num = pi * np.asarray(g1_vals, dtype=float)
    den = num + (1.0 - pi) * np.asarray(g0_vals, dtype=float)
    out = np.full(num.shape, 0.5)
    np.divide(num, den, out=out, where=den > 0.0)
    return out


def eta_hat(model: SupervisedModel, x: NDArray[np.float64]) -> np.float64 | NDArray[np.float64]:
    """Plug-in estimate of Q(Y=1 | X=x); 1/2 where both density estimates underflow to 0."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    vals = plugin_eta(model.pi_q_hat, density_at(model.g1_hat, pts), density_at(model.g0_hat, pts))
    return np.float64(vals[0]) if single else vals


def classify(model: SupervisedModel, x: NDArray[np.float64]) -> np.int64 | NDArray[np.int64]:
    """1 where eta_hat > 1/2, else 0 (ties to 0)."""
    eta = eta_hat(model, x)
    if np.ndim(eta):
        return (np.asarray(eta) > 0.5).astype(np.int64)
    return np.int64(eta > 0.5)
