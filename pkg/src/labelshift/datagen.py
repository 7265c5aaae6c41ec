"""Synthetic label-shift data: truncated-normal class conditionals with an analytic Bayes rule.

The generating family is fixed up to parameters: labels are Bernoulli(pi),
features are drawn coordinate-wise i.i.d. from a normal with class-dependent
mean, truncated to a common box. Because the family is known in closed form,
the true regression function eta(x) = Q(Y=1 | X=x) and the Bayes classifier
are available exactly; the evaluation harness uses them as ground truth.

Source and target domains share the class conditionals and differ only in the
class-1 prior, which is the label-shift assumption this package is built
around.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal, NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import ndtr, ndtri

from .errors import DomainError, EmptyDatasetError

DomainTag = Literal["source", "target"]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class TruncNormSpec:
    """Normal(mean, sd^2) conditioned to lie in [lower, upper]."""

    mean: float
    sd: float
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not np.isfinite([self.mean, self.sd, self.lower, self.upper]).all():
            raise ValueError("truncated-normal parameters must be finite")
        if self.sd <= 0:
            raise ValueError(f"sd must be positive, got {self.sd}")
        if not self.lower < self.upper:
            raise ValueError(f"need lower < upper, got [{self.lower}, {self.upper}]")
        if self.mass <= 0:
            raise ValueError("truncation interval carries no probability mass")

    @property
    def _a(self) -> float:
        return (self.lower - self.mean) / self.sd

    @property
    def _b(self) -> float:
        return (self.upper - self.mean) / self.sd

    @property
    def mass(self) -> float:
        """Probability mass the untruncated normal assigns to [lower, upper]."""
        return float(ndtr(self._b) - ndtr(self._a))

    def pdf(self, x: NDArray | float) -> NDArray | np.float64:
        """Density at x; zero outside [lower, upper]."""
        x = np.asarray(x, dtype=float)
        z = (x - self.mean) / self.sd
        log_phi = -0.5 * z * z - _LOG_SQRT_2PI
        dens = np.exp(log_phi) / (self.sd * self.mass)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, dens, 0.0)


def sample_truncnorm(
    spec: TruncNormSpec, rng: np.random.Generator, size: int | tuple[int, ...] | None = None
) -> float | NDArray[np.float64]:
    """Draw from a truncated normal by inverse CDF on the truncation mass.

    Exact up to floating point: u ~ U[0,1) is mapped through
    Phi^{-1}(Phi(a) + u * (Phi(b) - Phi(a))). The result is clamped to the
    interval only to guard against endpoint rounding when a bound sits many
    sigma out; no probability mass is moved.
    """
    fa = ndtr(spec._a)
    fb = ndtr(spec._b)
    u = rng.random(size)
    z = ndtri(fa + u * (fb - fa))
    x = np.clip(spec.mean + spec.sd * z, spec.lower, spec.upper)
    return float(x) if size is None else x


class LabeledSample(NamedTuple):
    """One feature vector with its binary label."""

    x: NDArray[np.float64]
    y: int


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus labels, tagged with the domain it was drawn from.

    ``y`` may be None for an unlabeled (target-features-only) view; fitting
    operations that need labels reject such datasets.
    """

    x: NDArray[np.float64]
    y: NDArray[np.int64] | None
    domain: DomainTag = "source"

    def __post_init__(self) -> None:
        x = np.ascontiguousarray(np.asarray(self.x, dtype=np.float64))
        if x.ndim != 2:
            raise ValueError(f"features must be a 2-D array, got shape {x.shape}")
        if not np.isfinite(x).all():
            raise ValueError("features must be finite")
        object.__setattr__(self, "x", x)
        if self.y is not None:
            y = np.asarray(self.y, dtype=np.int64)
            if y.shape != (x.shape[0],):
                raise ValueError(f"labels have shape {y.shape}, expected ({x.shape[0]},)")
            if y.size and not np.isin(y, (0, 1)).all():
                raise ValueError("labels must be 0 or 1")
            object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.shape[0]

    def __iter__(self) -> Iterator[LabeledSample]:
        if self.y is None:
            raise ValueError("dataset is unlabeled")
        return (LabeledSample(xi, int(yi)) for xi, yi in zip(self.x, self.y))

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def features_of(self, label: int) -> NDArray[np.float64]:
        """Features of all samples carrying the given label."""
        if self.y is None:
            raise ValueError("dataset is unlabeled")
        return self.x[self.y == label]

    def without_labels(self) -> "Dataset":
        """Unlabeled view of the same features (what an unsupervised fit may see)."""
        return Dataset(self.x, None, self.domain)

    def require_nonempty(self) -> None:
        if len(self) == 0:
            raise EmptyDatasetError(f"{self.domain} dataset is empty")

    def require_labels(self) -> NDArray[np.int64]:
        self.require_nonempty()
        if self.y is None:
            raise ValueError(f"{self.domain} dataset is unlabeled")
        return self.y


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the two-class truncated-normal family.

    Defaults follow the simulation setup used throughout: 4 coordinates,
    class means 0 and 0.4, unit sd, box [-6, 6] per coordinate.
    """

    dim: int = 4
    class1_prior: float = 0.5
    class0_mean: float = 0.0
    class1_mean: float = 0.4
    sd: float = 1.0
    box: tuple[float, float] = (-6.0, 6.0)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 0.0 < self.class1_prior < 1.0:
            raise ValueError(f"class1_prior must lie strictly in (0, 1), got {self.class1_prior}")
        if self.sd <= 0:
            raise ValueError(f"sd must be positive, got {self.sd}")
        lo, hi = self.box
        if not lo < hi:
            raise ValueError(f"invalid box [{lo}, {hi}]")
        # Both class means must sit inside the box or the spec below degenerates.
        self.class_spec(0)
        self.class_spec(1)

    def class_spec(self, label: int) -> TruncNormSpec:
        """Per-coordinate truncated-normal spec for the given class."""
        mean = self.class1_mean if label == 1 else self.class0_mean
        return TruncNormSpec(mean=mean, sd=self.sd, lower=self.box[0], upper=self.box[1])

    def _check_in_box(self, x: NDArray[np.float64]) -> None:
        lo, hi = self.box
        if (x < lo).any() or (x > hi).any():
            raise DomainError(f"query point outside box [{lo}, {hi}]")


def generate(
    config: GeneratorConfig,
    n: int,
    rng: np.random.Generator,
    domain: DomainTag = "source",
) -> Dataset:
    """Draw n labeled samples: y ~ Bernoulli(pi), x|y coordinate-wise truncated normal.

    Consumes exactly one uniform block for labels and one for features, so the
    stream position after a call depends only on n and dim.
    """
    if n < 1:
        raise EmptyDatasetError("cannot generate an empty dataset (n must be >= 1)")
    y = (rng.random(n) < config.class1_prior).astype(np.int64)
    spec0, spec1 = config.class_spec(0), config.class_spec(1)
    fa = np.where(y == 1, ndtr(spec1._a), ndtr(spec0._a))[:, None]
    fb = np.where(y == 1, ndtr(spec1._b), ndtr(spec0._b))[:, None]
    mean = np.where(y == 1, spec1.mean, spec0.mean)[:, None]
    u = rng.random((n, config.dim))
    x = mean + config.sd * ndtri(fa + u * (fb - fa))
    np.clip(x, config.box[0], config.box[1], out=x)
    return Dataset(x=x, y=y, domain=domain)


def _class_log_density(config: GeneratorConfig, x: NDArray[np.float64], label: int) -> NDArray[np.float64]:
    """log of the class-conditional density g_label at rows of x (n, d)."""
    spec = config.class_spec(label)
    z = (x - spec.mean) / spec.sd
    log_norm = np.log(spec.sd * spec.mass) + _LOG_SQRT_2PI
    return (-0.5 * z * z - log_norm).sum(axis=1)


def true_eta(config: GeneratorConfig, x: NDArray[np.float64]) -> np.float64 | NDArray[np.float64]:
    """Exact regression function pi*g1 / (pi*g1 + (1-pi)*g0) of the configured family.

    Accepts a single point (d,) or a batch (n, d). Points outside the box
    raise DomainError.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != config.dim:
        raise ValueError(f"expected dim {config.dim}, got {pts.shape[1]}")
    config._check_in_box(pts)
    pi = config.class1_prior
    # Work with the log likelihood ratio for stability in the far tails.
    log_ratio = _class_log_density(config, pts, 1) - _class_log_density(config, pts, 0)
    with np.errstate(over="ignore"):
        odds = np.exp(log_ratio + np.log(pi) - np.log1p(-pi))
    eta = np.where(np.isinf(odds), 1.0, odds / (1.0 + odds))
    return np.float64(eta[0]) if single else eta


def bayes_classify(config: GeneratorConfig, x: NDArray[np.float64]) -> np.int64 | NDArray[np.int64]:
    """Bayes-optimal label: 1 where true_eta > 1/2, 0 otherwise (ties to 0)."""
    eta = true_eta(config, x)
    return (np.asarray(eta) > 0.5).astype(np.int64) if np.ndim(eta) else np.int64(eta > 0.5)


# Default configurations of the simulation study: balanced source, 0.9-prior target.
SOURCE_CONFIG = GeneratorConfig(class1_prior=0.5)
TARGET_CONFIG = GeneratorConfig(class1_prior=0.9)
