"""Calibration of the finite-difference metric calculus.

These tests pin the index and sign conventions of fdcheck against spaces
whose curvature is known exactly: flat space (everything vanishes) and the
ball model of curvature -kappa^2. Everything else in the suite compares
formulas to fdcheck, so the conventions locked here are load-bearing.
"""

import numpy as np
import pytest

from curvlab import fdcheck
from curvlab.spaceform import SpaceForm, gram_schmidt_frame, log_factor_gradient


def ball_metric(kappa):
    def metric(x):
        w = 0.5 * kappa * (1.0 - float(np.sum(x * x)))
        return np.eye(x.size) / w**2

    return metric


def test_flat_metric_has_no_curvature():
    metric = lambda x: np.eye(3)
    x = np.array([0.3, -0.2, 0.5])
    assert np.allclose(fdcheck.christoffels_fd(metric, x), 0.0, atol=1e-9)
    assert np.allclose(fdcheck.riemann_fd(metric, x), 0.0, atol=1e-6)


def test_christoffels_match_conformal_formula():
    """Gamma^k_ij = d^k_i phi_j + d^k_j phi_i - delta_ij phi^k for e^{2phi} delta."""
    space = SpaceForm(dim=3, kappa=1.0)
    metric = ball_metric(1.0)
    rng = np.random.default_rng(101)
    for _ in range(5):
        x = rng.uniform(-0.4, 0.4, size=3)
        ph = log_factor_gradient(space, x)
        expected = np.zeros((3, 3, 3))
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    expected[k, i, j] = (
                        (k == i) * ph[j] + (k == j) * ph[i] - (i == j) * ph[k]
                    )
        got = fdcheck.christoffels_fd(metric, x)
        assert np.allclose(got, expected, rtol=1e-7, atol=1e-8)


@pytest.mark.parametrize("kappa", [1.0, 2.0])
def test_sectional_curvature_of_ball(kappa):
    space = SpaceForm(dim=3, kappa=kappa)
    metric = ball_metric(kappa)
    rng = np.random.default_rng(55)
    for _ in range(4):
        x = rng.uniform(-0.35, 0.35, size=3)
        F = gram_schmidt_frame(space, x, seed=rng.normal(size=(3, 3)))
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            K = fdcheck.sectional_fd(metric, x, F[i], F[j])
            assert np.isclose(K, -kappa**2, rtol=2e-4)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_ricci_of_ball(dim):
    kappa = 1.0
    space = SpaceForm(dim=dim, kappa=kappa)
    metric = ball_metric(kappa)
    x = np.full(dim, 0.22)
    ric = fdcheck.ricci_fd(metric, x)
    G = space.metric_matrix(x)
    assert np.allclose(ric, -(dim - 1) * kappa**2 * G, rtol=2e-4, atol=1e-5)
    X = gram_schmidt_frame(space, x)[0]
    assert np.isclose(fdcheck.ricci_quadratic_fd(metric, x, X), -(dim - 1), rtol=2e-4)


def test_fd_gradient_and_hessian_on_polynomial():
    f = lambda x: x[0] ** 3 + 2.0 * x[0] * x[1] - x[1] ** 2
    x = np.array([0.7, -0.4])
    assert np.allclose(
        fdcheck.fd_gradient(f, x), [3 * 0.49 + 2 * (-0.4), 2 * 0.7 + 0.8], rtol=1e-8
    )
    assert np.allclose(
        fdcheck.fd_hessian(f, x), [[6 * 0.7, 2.0], [2.0, -2.0]], rtol=1e-6, atol=1e-6
    )


# ---------------------------------------------------------------------------
# parametric mean curvature
# ---------------------------------------------------------------------------


def circle_chart(rho):
    chart = lambda th: rho * np.array([np.cos(th[0]), np.sin(th[0])])
    dchart = lambda th: rho * np.array([[-np.sin(th[0])], [np.cos(th[0])]])
    d2chart = lambda th: rho * np.array([[[-np.cos(th[0]), -np.sin(th[0])]]])
    return chart, dchart, d2chart


def sphere_chart(rho):
    def chart(th):
        t, p = th
        return rho * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])

    def dchart(th):
        t, p = th
        return rho * np.array(
            [
                [np.cos(t) * np.cos(p), -np.sin(t) * np.sin(p)],
                [np.cos(t) * np.sin(p), np.sin(t) * np.cos(p)],
                [-np.sin(t), 0.0],
            ]
        )

    def d2chart(th):
        t, p = th
        dtt = rho * np.array([-np.sin(t) * np.cos(p), -np.sin(t) * np.sin(p), -np.cos(t)])
        dtp = rho * np.array([-np.cos(t) * np.sin(p), np.cos(t) * np.cos(p), 0.0])
        dpp = rho * np.array([-np.sin(t) * np.cos(p), -np.sin(t) * np.sin(p), 0.0])
        return np.array([[dtt, dtp], [dtp, dpp]])

    return chart, dchart, d2chart


def test_circle_mean_curvature_flat():
    rho = 0.8
    chart, dchart, d2chart = circle_chart(rho)
    metric = lambda x: np.eye(2)
    th = np.array([0.9])
    H, nu = fdcheck.parametric_mean_curvature(
        metric, chart, dchart, d2chart, th, inward_ref=-chart(th)
    )
    assert np.isclose(H, 1.0 / rho, rtol=1e-7)
    assert np.allclose(nu, -chart(th) / rho, atol=1e-9)
    # flipping the orientation flips the sign
    H_out, _ = fdcheck.parametric_mean_curvature(
        metric, chart, dchart, d2chart, th, inward_ref=chart(th)
    )
    assert np.isclose(H_out, -1.0 / rho, rtol=1e-7)


def test_sphere_mean_curvature_flat():
    rho = 1.3
    chart, dchart, d2chart = sphere_chart(rho)
    metric = lambda x: np.eye(3)
    for th in ([1.1, 0.4], [0.7, 2.0]):
        th = np.array(th)
        H, _ = fdcheck.parametric_mean_curvature(
            metric, chart, dchart, d2chart, th, inward_ref=-chart(th)
        )
        assert np.isclose(H, 2.0 / rho, rtol=1e-6)


def test_sphere_mean_curvature_hyperbolic():
    """Coordinate sphere of radius s about the origin: geodesic sphere of
    hyperbolic radius r = 2 artanh(s) (kappa = 1), inward H = 2 coth(r)."""
    s = 0.3
    chart, dchart, d2chart = sphere_chart(s)
    metric = ball_metric(1.0)
    r = 2.0 * np.arctanh(s)
    expected = 2.0 / np.tanh(r)
    for th in ([1.2, 0.5], [0.8, 1.9]):
        th = np.array(th)
        H, _ = fdcheck.parametric_mean_curvature(
            metric, chart, dchart, d2chart, th, inward_ref=-chart(th)
        )
        assert np.isclose(H, expected, rtol=1e-5)
