import math

import numpy as np
import pytest
from scipy.integrate import quad

from labelshift import (
    Bandwidth,
    Dataset,
    EmptyClassError,
    KdeModel,
    KernelSpec,
    bandwidth_rule,
    density_at,
    fit_class_kde,
    kernel_value,
)
from labelshift.kernel_density import scaled_kernel_sum

from oracles import kde_at

GAUSS4 = KernelSpec("gaussian", 4)
GAUSS1 = KernelSpec("gaussian", 1)
EXP1 = KernelSpec("exponential", 1)
EXP4 = KernelSpec("exponential", 4)


def _surface_area(d):
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


# ---------------------------------------------------------------------------
# kernel_value
# ---------------------------------------------------------------------------

def test_gaussian_at_origin():
    val = kernel_value(GAUSS4, np.zeros((1, 4)))
    assert val[0] == pytest.approx((2 * math.pi) ** -2, rel=1e-14)


def test_exponential_at_origin_1d():
    # 1-D normalizer: 2 * integral of exp(-r) over r>0 equals 2, so C = 1/2
    val = kernel_value(EXP1, np.zeros((1, 1)))
    assert val[0] == pytest.approx(0.5, rel=1e-10)


def test_radial_symmetry():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(50, 4))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    for r in (0.3, 1.0, 2.5):
        vals = kernel_value(GAUSS4, r * u)
        assert np.ptp(vals) < 1e-15
        vals = kernel_value(EXP4, r * u)
        assert np.ptp(vals) < 1e-15 * vals[0] + 1e-18


def test_dim_mismatch():
    with pytest.raises(ValueError):
        kernel_value(GAUSS4, np.zeros((1, 3)))
    with pytest.raises(ValueError):
        KernelSpec("tricube", 4)


@pytest.mark.parametrize("family,d", [(f, d) for f in ("gaussian", "exponential") for d in (1, 2, 3, 4)])
def test_unit_mass_and_second_moment(family, d):
    # radial quadrature: integral of K over R^d via the surface-area formula
    spec = KernelSpec(family, d)

    def radial(r, power):
        x = np.zeros((1, d))
        x[0, 0] = r
        return kernel_value(spec, x)[0] * r ** (d - 1 + power) * _surface_area(d)

    mass, _ = quad(radial, 0, np.inf, args=(0,), limit=300)
    assert mass == pytest.approx(1.0, abs=1e-8)

    moment, _ = quad(radial, 0, np.inf, args=(2,), limit=300)
    expected = d if family == "gaussian" else d * (d + 1)
    assert moment == pytest.approx(expected, rel=1e-8)


# ---------------------------------------------------------------------------
# bandwidth_rule
# ---------------------------------------------------------------------------

def test_bandwidth_rule_values():
    # alpha=1, d=4 gives exponent -1/6; 64**(-1/6) = 0.5, halved by c1
    assert bandwidth_rule(64).h == pytest.approx(0.25, rel=1e-15)
    assert bandwidth_rule(1).h == pytest.approx(0.5, rel=1e-15)
    assert bandwidth_rule(10**6).h == pytest.approx(0.05, rel=1e-12)
    assert bandwidth_rule(1000, alpha=0.5, d=4, c1=1.0).h == pytest.approx(1000 ** (-1 / 5), rel=1e-14)


def test_bandwidth_rule_validation():
    with pytest.raises(ValueError):
        bandwidth_rule(0)
    with pytest.raises(ValueError):
        bandwidth_rule(10, alpha=0.0)
    with pytest.raises(ValueError):
        bandwidth_rule(10, c1=-1.0)
    with pytest.raises(ValueError):
        Bandwidth(0.0)


# ---------------------------------------------------------------------------
# fit / evaluate
# ---------------------------------------------------------------------------

def _toy_dataset():
    x = np.array([[0.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    return Dataset(x, np.array([1, 1, 0]))


def test_fit_class_kde_partitions():
    ds = _toy_dataset()
    m1 = fit_class_kde(ds, 1, GAUSS4, Bandwidth(1.0))
    m0 = fit_class_kde(ds, 0, GAUSS4, Bandwidth(1.0))
    assert m1.n == 2 and m0.n == 1
    with pytest.raises(EmptyClassError):
        fit_class_kde(Dataset(ds.x, np.array([1, 1, 1])), 0, GAUSS4, Bandwidth(1.0))


def test_density_single_point():
    model = KdeModel(GAUSS4, Bandwidth(1.0), np.zeros((1, 4)))
    at_center = density_at(model, np.zeros((1, 4)))
    assert at_center[0] == pytest.approx((2 * math.pi) ** -2, rel=1e-14)

    # h = 1/2 rescales by h^{-d} = 16 at the center
    model_h = KdeModel(GAUSS4, Bandwidth(0.5), np.zeros((1, 4)))
    assert density_at(model_h, np.zeros((1, 4)))[0] == pytest.approx(16 * (2 * math.pi) ** -2, rel=1e-13)


def test_density_uniform_recovery():
    # KDE of U[0,1] near the middle of the support should be close to 1
    rng = np.random.default_rng(42)
    pts = rng.uniform(0.0, 1.0, size=(10_000, 1))
    model = KdeModel(GAUSS1, Bandwidth(0.05), pts)
    val = density_at(model, np.array([[0.5]]))
    assert val[0] == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("family,d", [("gaussian", 1), ("gaussian", 4), ("exponential", 4)])
def test_density_matches_double_loop(family, d):
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(200, d))
    queries = rng.normal(size=(37, d))
    model = KdeModel(KernelSpec(family, d), Bandwidth(0.7), pts)
    fast = density_at(model, queries)
    slow = np.array([kde_at(pts, 0.7, q, family) for q in queries])
    assert np.allclose(fast, slow, rtol=0, atol=1e-12)


@pytest.mark.parametrize("family", ["gaussian", "exponential"])
def test_density_integrates_to_one(family):
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(40, 1))
    model = KdeModel(KernelSpec(family, 1), Bandwidth(0.3), pts)
    # the exponential kernel is non-smooth at each data point; tell quad
    total, _ = quad(
        lambda t: float(density_at(model, np.array([[t]]))[0]),
        -30, 30, limit=500, points=np.sort(pts[:, 0]),
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_h_scaling_identity():
    # K_h(x) = h^{-d} K(x / h) pushed through the whole sum
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(60, 4))
    q = rng.normal(size=(11, 4))
    h = 0.37
    a = density_at(KdeModel(GAUSS4, Bandwidth(h), pts), q)
    b = density_at(KdeModel(GAUSS4, Bandwidth(1.0), pts / h), q / h) / h**4
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_scaled_kernel_sum_weights():
    rng = np.random.default_rng(10)
    pts = rng.normal(size=(30, 4))
    q = rng.normal(size=(5, 4))
    w = rng.uniform(0.5, 2.0, size=30)
    weighted = scaled_kernel_sum(GAUSS4, Bandwidth(1.0), pts, q, weights=w)
    manual = np.zeros(5)
    for i, point in enumerate(pts):
        manual += w[i] * kernel_value(GAUSS4, q - point)
    assert np.allclose(weighted, manual, rtol=1e-12)


def test_consistency_improves_with_n():
    # L1 error of the density estimate at the rule bandwidth shrinks with n
    target = KernelSpec("gaussian", 1)
    grid = np.linspace(-3, 3, 61)[:, None]
    truth = np.exp(-0.5 * grid[:, 0] ** 2) / math.sqrt(2 * math.pi)

    med_err = []
    for n in (100, 1_000, 10_000):
        errs = []
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            pts = rng.normal(size=(n, 1))
            model = KdeModel(target, bandwidth_rule(n, alpha=1.0, d=1, c1=1.0), pts)
            est = density_at(model, grid)
            errs.append(np.mean(np.abs(est - truth)))
        med_err.append(np.median(errs))
    assert med_err[0] > med_err[1] > med_err[2]
