"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written against different primitives than the
package: plain Python loops with math.exp/math.fsum instead of vectorized
kernel sums, scipy.stats.truncnorm instead of the hand-rolled ndtr formulas,
textbook Newton instead of the trust-ball solver, and grid convolution /
Sobol QMC for population quantities. Agreement between these and the library
is evidence, not tautology.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc, truncnorm


# ---------------------------------------------------------------------------
# double-loop kernel machinery
# ---------------------------------------------------------------------------

def kernel_term(family: str, dim: int, sq_dist: float, h: float) -> float:
    """h^-d K(u/h) for a single squared distance, scalar math only."""
    if family == "gaussian":
        const = (2.0 * math.pi) ** (-dim / 2.0)
        val = const * math.exp(-0.5 * sq_dist / (h * h))
    elif family == "exponential":
        # closed-form normalizer: 1 / (S_{d-1} Gamma(d)) with
        # S_{d-1} = 2 pi^{d/2} / Gamma(d/2)
        const = math.gamma(dim / 2.0) / (2.0 * math.pi ** (dim / 2.0) * math.gamma(dim))
        val = const * math.exp(-math.sqrt(sq_dist) / h)
    else:
        raise ValueError(family)
    return val * h ** (-dim)


def sq_dist(a, b) -> float:
    s = 0.0
    for j in range(len(a)):
        d = float(a[j]) - float(b[j])
        s += d * d
    return s


def kde_at(points, h: float, x, family: str = "gaussian") -> float:
    """(1/n) sum_l K_h(x - x_l) with exact (fsum) accumulation."""
    dim = len(x)
    terms = [kernel_term(family, dim, sq_dist(x, p), h) for p in points]
    return math.fsum(terms) / len(points)


def nw_at(points, labels, h: float, x, family: str = "gaussian") -> float:
    """Kernel-weighted label average; 1/2 when all weights underflow to zero."""
    dim = len(x)
    terms = [kernel_term(family, dim, sq_dist(x, p), h) for p in points]
    den = math.fsum(terms)
    if den == 0.0:
        return 0.5
    num = math.fsum(t * float(y) for t, y in zip(terms, labels))
    return num / den


def plugin_eta_at(pi: float, pts0, pts1, h: float, x, family: str = "gaussian") -> float:
    num = pi * kde_at(pts1, h, x, family)
    den = num + (1.0 - pi) * kde_at(pts0, h, x, family)
    return 0.5 if den == 0.0 else num / den


def weighted_plugin_eta_at(
    pi_tilde: float, rho_tilde: float, pts0, pts1, h: float, x, family: str = "gaussian"
) -> float:
    num = pi_tilde * kde_at(pts1, h, x, family)
    den = num + rho_tilde * kde_at(pts0, h, x, family)
    return 0.5 if den == 0.0 else num / den


# ---------------------------------------------------------------------------
# truncated-normal family ground truth (scipy.stats path)
# ---------------------------------------------------------------------------

def tn(mean: float, sd: float = 1.0, lo: float = -6.0, hi: float = 6.0):
    return truncnorm((lo - mean) / sd, (hi - mean) / sd, loc=mean, scale=sd)


def eta_scipy(pi: float, x, mean0: float = 0.0, mean1: float = 0.4) -> float:
    """Regression function via scipy.stats.truncnorm pdfs, per point."""
    g0 = np.prod(tn(mean0).pdf(np.asarray(x)))
    g1 = np.prod(tn(mean1).pdf(np.asarray(x)))
    num = pi * g1
    return float(num / (num + (1.0 - pi) * g0))


# ---------------------------------------------------------------------------
# textbook Newton logistic fit (no trust ball, no step halving)
# ---------------------------------------------------------------------------

def newton_logistic(x: np.ndarray, y: np.ndarray, iters: int = 60) -> np.ndarray:
    """Plain Newton iterations on the mean log-loss; returns (intercept, slopes)."""
    design = np.column_stack([np.ones(len(x)), x])
    b = np.zeros(design.shape[1])
    for _ in range(iters):
        z = design @ b
        mu = 1.0 / (1.0 + np.exp(-z))
        grad = design.T @ (mu - y) / len(y)
        w = mu * (1.0 - mu)
        hess = (design * w[:, None]).T @ design / len(y)
        b = b - np.linalg.solve(hess, grad)
        if np.abs(grad).max() < 1e-12:
            break
    return b


# ---------------------------------------------------------------------------
# population quantities of a sum-statistic pilot, by grid convolution
# ---------------------------------------------------------------------------

def sum_stat_tail(mean: float, dim: int, threshold: float, step: float = 2e-3) -> float:
    """P(sum of `dim` iid TN(mean,1,[-6,6]) coordinates > threshold).

    The sum's density is built by repeated grid convolution of the
    single-coordinate pdf; the tail is a trapezoid integral with linear
    interpolation at the cut point.
    """
    lo, hi = -6.0, 6.0
    grid = np.arange(lo, hi + step / 2, step)
    pdf = tn(mean).pdf(grid)
    dens = pdf
    for _ in range(dim - 1):
        dens = np.convolve(dens, pdf) * step
    support_lo = lo * dim
    points = support_lo + step * np.arange(dens.size)
    total = np.trapezoid(dens, points)
    dens = dens / total  # remove accumulated quadrature drift
    above = points >= threshold
    if not above.any():
        return 0.0
    first = int(np.argmax(above))
    tail = np.trapezoid(dens[above], points[above])
    if first > 0:
        # sliver between the threshold and the first grid point above it
        t0, t1 = points[first - 1], points[first]
        d_at = dens[first - 1] + (dens[first] - dens[first - 1]) * (threshold - t0) / (t1 - t0)
        tail += 0.5 * (d_at + dens[first]) * (t1 - threshold)
    return float(tail)


def population_confusion(pi_p: float, a0: float, a1: float) -> np.ndarray:
    """C[i][j] = P(g = i, Y = j) from per-class positive rates a_j = P(g=1 | Y=j)."""
    return np.array(
        [
            [(1.0 - a0) * (1.0 - pi_p), (1.0 - a1) * pi_p],
            [a0 * (1.0 - pi_p), a1 * pi_p],
        ]
    )


# ---------------------------------------------------------------------------
# Sobol QMC for target-marginal integrals
# ---------------------------------------------------------------------------

def qmc_target_mean(
    integrand, pi_q: float = 0.9, dim: int = 4, m: int = 20, mean0: float = 0.0, mean1: float = 0.4
) -> float:
    """E[f(X)] for X ~ the target marginal, by per-component Sobol sampling.

    The marginal is the two-component mixture pi_q * g1 + (1 - pi_q) * g0 of
    product truncated normals; each component is integrated with 2^m scrambled
    Sobol points mapped through the component's coordinate-wise PPF.
    """
    values = []
    for weight, mean in ((1.0 - pi_q, mean0), (pi_q, mean1)):
        sampler = qmc.Sobol(d=dim, scramble=True, seed=12345)
        u = sampler.random_base2(m=m)
        # keep strictly inside (0,1) for the PPF
        u = np.clip(u, 1e-15, 1.0 - 1e-15)
        x = tn(mean).ppf(u)
        values.append(weight * float(np.mean(integrand(x))))
    return float(sum(values))


def excess_risk_integrand(pi_q: float, predicted_fn):
    """2|eta - 1/2| 1{pred != bayes} as a function of an (n, d) batch."""

    def f(x: np.ndarray) -> np.ndarray:
        g0 = np.prod(tn(0.0).pdf(x), axis=1)
        g1 = np.prod(tn(0.4).pdf(x), axis=1)
        num = pi_q * g1
        eta = num / (num + (1.0 - pi_q) * g0)
        bayes = (eta > 0.5).astype(int)
        pred = predicted_fn(x, eta, bayes)
        return np.abs(2.0 * eta - 1.0) * (pred != bayes)

    return f
