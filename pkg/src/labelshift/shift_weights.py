"""Distributional matching: recover target/source class-probability ratios without target labels.

A pilot classifier g is fixed (any deterministic rule works as long as its
source confusion matrix is invertible). Matching the source joint counts
C[i][j] = P-hat(g(X)=i, Y=j) against the target prediction rate
xi = Q-hat(g(X)=1) yields the linear system

    C @ (w0, w1) = (1 - xi, xi)

whose solution estimates w_k = Q(Y=k) / P(Y=k). Those ratios are all the
unsupervised plug-in classifier needs from the unlabeled target.

The default pilot is a logistic regression fit on the source by full-batch
Newton iterations with step halving, constrained to an L2 ball so perfectly
separable data cannot run the coefficients off to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from .datagen import Dataset
from .errors import EmptyClassError, SingularConfusionError

DEFAULT_DET_FLOOR = 1e-6
_NEWTON_RADIUS = 50.0  # L2 bound on (intercept, coefficients) during fitting


@dataclass(frozen=True)
class PilotClassifier:
    """Deterministic binary rule used only to produce matchable statistics.

    Either a linear rule 1{b0 + b1 . x > 0} (``coefficients`` holds
    (b0, b1...), intercept first) or an arbitrary decision function mapping an
    (n, d) array to (n,) labels in {0, 1}.
    """

    coefficients: NDArray[np.float64] | None = None
    decision_fn: Callable[[NDArray[np.float64]], NDArray[np.int64]] | None = None
    converged: bool = True

    def __post_init__(self) -> None:
        if (self.coefficients is None) == (self.decision_fn is None):
            raise ValueError("provide exactly one of coefficients or decision_fn")
        if self.coefficients is not None:
            b = np.asarray(self.coefficients, dtype=np.float64)
            if b.ndim != 1 or b.size < 2:
                raise ValueError("coefficients must be a 1-D array (intercept, slopes...)")
            object.__setattr__(self, "coefficients", b)

    @classmethod
    def linear(cls, coefficients: NDArray[np.float64], converged: bool = True) -> "PilotClassifier":
        return cls(coefficients=np.asarray(coefficients, dtype=np.float64), converged=converged)

    @classmethod
    def from_function(cls, fn: Callable[[NDArray], NDArray]) -> "PilotClassifier":
        return cls(decision_fn=fn)

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.int64]:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.coefficients is not None:
            b = self.coefficients
            if x.shape[1] != b.size - 1:
                raise ValueError(f"expected dim {b.size - 1}, got {x.shape[1]}")
            return (x @ b[1:] + b[0] > 0.0).astype(np.int64)
        out = np.asarray(self.decision_fn(x))
        if out.shape != (x.shape[0],) or (out.size and not np.isin(out, (0, 1)).all()):
            raise ValueError("decision_fn must return (n,) labels in {0, 1}")
        return out.astype(np.int64)


def _neg_log_likelihood(z: NDArray, y: NDArray) -> float:
    # mean over samples of log(1 + e^z) - y*z, numerically safe for large |z|
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def fit_logistic_pilot(
    source: Dataset, max_iters: int = 100, tol: float = 1e-8, radius: float = _NEWTON_RADIUS
) -> PilotClassifier:
    """Maximum-likelihood logistic pilot 1{b0 + b . x > 0} on the source data.

    Full-batch Newton with step halving on the negative mean log-likelihood;
    iterates are projected onto the L2 ball of the given radius. Declares
    convergence when the gradient infinity-norm drops below ``tol``; otherwise
    returns the final iterate with ``converged=False`` (e.g. under perfect
    separation, where the optimum sits on the ball boundary).
    """
    y = source.require_labels().astype(np.float64)
    if not (0 < y.sum() < len(y)):
        raise EmptyClassError("logistic pilot needs both labels in the source data")
    design = np.column_stack([np.ones(len(source)), source.x])
    n, p = design.shape
    b = np.zeros(p)
    z = design @ b
    nll = _neg_log_likelihood(z, y)
    converged = False
    for _ in range(max_iters):
        mu = expit(z)
        grad = design.T @ (mu - y) / n
        if np.abs(grad).max() < tol:
            converged = True
            break
        w = mu * (1.0 - mu)
        hess = (design * w[:, None]).T @ design / n
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(hess, -grad, rcond=None)
        # Step halving: accept the first scaled step (projected into the
        # trust ball) that lowers the objective.
        t = 1.0
        for _ in range(50):
            cand = b + t * step
            norm = np.linalg.norm(cand)
            if norm > radius:
                cand = cand * (radius / norm)
            cand_z = design @ cand
            cand_nll = _neg_log_likelihood(cand_z, y)
            if cand_nll < nll:
                b, z, nll = cand, cand_z, cand_nll
                break
            t *= 0.5
        else:
            break  # no descent direction left; report the best iterate
    return PilotClassifier.linear(b, converged=converged)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Empirical joint probabilities c[i][j] = fraction with prediction i and truth j."""

    c: NDArray[np.float64]

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=np.float64)
        if c.shape != (2, 2):
            raise ValueError(f"confusion matrix must be 2x2, got {c.shape}")
        if (c < 0).any() or c.max() > 1.0 + 1e-12:
            raise ValueError("entries must be probabilities")
        if abs(c.sum() - 1.0) > 1e-9:
            raise ValueError(f"entries must sum to 1, got {c.sum()}")
        object.__setattr__(self, "c", c)

    @property
    def det(self) -> float:
        return float(self.c[0, 0] * self.c[1, 1] - self.c[0, 1] * self.c[1, 0])


def confusion_estimate(source: Dataset, g: PilotClassifier) -> ConfusionMatrix:
    """c[i][j] = (1/n) #{l : g(x_l) = i and y_l = j} over the labeled source."""
    y = source.require_labels()
    pred = g.predict(source.x)
    n = len(source)
    c = np.empty((2, 2))
    for i in (0, 1):
        for j in (0, 1):
            c[i, j] = np.count_nonzero((pred == i) & (y == j)) / n
    return ConfusionMatrix(c)


def xi_estimate(target_features: Dataset, g: PilotClassifier) -> float:
    """Fraction of target points the pilot sends to class 1; labels are never read."""
    target_features.require_nonempty()
    pred = g.predict(target_features.x)
    return float(np.count_nonzero(pred == 1)) / len(target_features)


@dataclass(frozen=True)
class ShiftWeights:
    """Estimated ratios w_k = Q(Y=k) / P(Y=k), plus how they were obtained.

    ``det_used`` and ``xi_hat`` are None when the weights were supplied
    directly (the oracle path) rather than solved from a confusion matrix.
    ``clipped`` records that a negative solution component was raised to 0.
    """

    w0: float
    w1: float
    det_used: float | None = None
    xi_hat: float | None = None
    clipped: bool = False

    def __post_init__(self) -> None:
        if not (np.isfinite(self.w0) and np.isfinite(self.w1)):
            raise ValueError("weights must be finite")
        if self.w0 < 0 or self.w1 < 0:
            raise ValueError("weights must be nonnegative (clip before constructing)")


def solve_weights(
    c: ConfusionMatrix, xi: float, det_floor: float = DEFAULT_DET_FLOOR
) -> ShiftWeights:
    """Solve c @ w = (1 - xi, xi) by the 2x2 closed form.

    Raises SingularConfusionError when |det c| < det_floor. Negative solution
    components (possible at small samples: c and xi are noisy) are clipped to
    0 and flagged.
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must be a probability, got {xi}")
    if det_floor <= 0:
        raise ValueError(f"det_floor must be positive, got {det_floor}")
    det = c.det
    if abs(det) < det_floor:
        raise SingularConfusionError(
            f"|det| = {abs(det):.3g} below floor {det_floor:.3g}; pick a better pilot"
        )
    m = c.c
    w0 = float(m[1, 1] * (1.0 - xi) - m[0, 1] * xi) / det
    w1 = float(m[0, 0] * xi - m[1, 0] * (1.0 - xi)) / det
    clipped = w0 < 0.0 or w1 < 0.0
    return ShiftWeights(
        w0=max(w0, 0.0), w1=max(w1, 0.0), det_used=det, xi_hat=float(xi), clipped=clipped
    )
