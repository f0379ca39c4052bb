"""Discrete curve machinery: quadrature, the exact length duality, stencil
tangents and covariant accelerations."""

import numpy as np
import pytest

from curvlab.curves import DiscreteCurve, fornberg_weights
from curvlab.fields import BallFactorField, ExpQuadraticField
from curvlab.spaceform import SpaceForm


def wiggly_curve(space, rng, n):
    t = np.linspace(0.0, 1.0, n + 1)
    base = np.stack([0.5 * t - 0.25, 0.2 * np.sin(2.5 * t)], axis=1)
    if space.dim == 3:
        base = np.column_stack([base, 0.15 * np.cos(3.0 * t) - 0.1])
    return DiscreteCurve(space, base)


def test_fornberg_reproduces_centered_weights():
    w1 = fornberg_weights(np.arange(5.0), 2.0, 1)
    assert np.allclose(w1, [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12], atol=1e-13)
    w2 = fornberg_weights(np.arange(5.0), 2.0, 2)
    assert np.allclose(w2, [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], atol=1e-13)
    w0 = fornberg_weights(np.arange(3.0), 1.0, 0)
    assert np.allclose(w0, [0.0, 1.0, 0.0], atol=1e-13)


@pytest.mark.parametrize("rule", ["midpoint", "simpson"])
@pytest.mark.parametrize("kappa", [0.0, 1.0])
def test_length_duality_exact(rule, kappa):
    """integral of u ds-tilde equals the g-length to roundoff, any factor."""
    space = SpaceForm(2, kappa)
    rng = np.random.default_rng(3)
    curve = wiggly_curve(space, rng, 57)
    curve.rule = rule
    M = rng.normal(size=(2, 2)) * 0.4
    u = ExpQuadraticField(a=rng.normal(size=2) * 0.5, B=0.5 * (M + M.T), c=0.2)
    L = curve.g_length()
    assert np.isclose(curve.integrate_ds_tilde(u, lambda x: u.value(x)), L, rtol=1e-14)


def test_flat_arc_length():
    space = SpaceForm(2, 0.0)
    rho, theta = 0.6, 1.8
    curve = DiscreteCurve.from_function(
        space, lambda t: rho * np.array([np.cos(t), np.sin(t)]), 0.0, theta, 256
    )
    assert np.isclose(curve.g_length(), rho * theta, rtol=1e-5)


def test_ball_diameter_length_both_rules():
    space = SpaceForm(2, 1.0)
    a, b = -0.3, 0.62
    exact = float(space.distance([a, 0.0], [b, 0.0]))
    fn = lambda t: np.array([t, 0.0])
    mid = DiscreteCurve.from_function(space, fn, a, b, 512, rule="midpoint")
    simp = DiscreteCurve.from_function(space, fn, a, b, 512, rule="simpson")
    assert np.isclose(mid.g_length(), exact, rtol=1e-5)
    assert np.isclose(simp.g_length(), exact, rtol=1e-10)


def test_tilde_length_recovers_hyperbolic_distance():
    """g flat, u the ball factor: tilde-length of a diameter chord must be
    the hyperbolic distance."""
    space = SpaceForm(2, 0.0)
    u = BallFactorField(kappa=1.0)
    a, b = -0.45, 0.3
    curve = DiscreteCurve.from_function(
        space, lambda t: np.array([t, 0.0]), a, b, 1024, rule="simpson"
    )
    exact = float(SpaceForm(2, 1.0).distance([a, 0.0], [b, 0.0]))
    assert np.isclose(curve.tilde_length(u), exact, rtol=1e-11)


def test_integrate_accepts_arrays_and_callables():
    space = SpaceForm(2, 0.0)
    curve = DiscreteCurve(space, np.array([[0.0, 0.0], [0.3, 0.0], [0.6, 0.1]]))
    f = lambda x: x[:, 0] ** 2
    vals = f(curve.quad_nodes())
    assert np.isclose(curve.integrate_ds(f), curve.integrate_ds(vals), rtol=1e-15)


def test_vertex_tangents_unit_and_accurate():
    space = SpaceForm(2, 1.0)
    rho = 0.4
    curve = DiscreteCurve.from_function(
        space, lambda t: rho * np.array([np.cos(t), np.sin(t)]), 0.0, np.pi / 2, 128
    )
    T, sigma = curve.vertex_tangents()
    norms = space.norm(curve.points, T)
    assert np.allclose(norms, 1.0, atol=1e-9)
    ts = np.linspace(0.0, np.pi / 2, 129)
    exact_dir = np.stack([-np.sin(ts), np.cos(ts)], axis=1)
    w0 = space.ambient_factor(curve.points)
    assert np.allclose(T, exact_dir * w0[:, None], atol=1e-6)
    # speed: |dx/dtau| / w0 with dtau the index step
    dt = (np.pi / 2) / 128
    assert np.allclose(sigma, rho * dt / w0, rtol=1e-6)


def test_straight_line_zero_acceleration_including_ends():
    space = SpaceForm(2, 0.0)
    pts = np.linspace(0.0, 1.0, 33)[:, None] * np.array([[0.8, 0.6]])
    curve = DiscreteCurve(space, pts)
    assert np.allclose(curve.vertex_acceleration(), 0.0, atol=1e-11)


def test_flat_circle_acceleration_points_inward():
    space = SpaceForm(2, 0.0)
    rho = 0.7
    curve = DiscreteCurve.from_function(
        space, lambda t: rho * np.array([np.cos(t), np.sin(t)]), 0.2, 1.9, 200
    )
    acc = curve.vertex_acceleration()
    expected = -curve.points / rho**2
    assert np.allclose(acc, expected, atol=1e-6)


def test_hyperbolic_radial_line_is_geodesic():
    space = SpaceForm(2, 1.0)
    e = np.array([0.6, 0.8])
    curve = DiscreteCurve.from_function(
        space, lambda t: np.tanh(t / 2.0) * e, 0.1, 1.4, 160
    )
    acc = curve.vertex_acceleration()
    assert np.max(space.norm(curve.points, acc)) < 1e-7


def test_geodesic_circle_curvature_matches_coth():
    """Coordinate circle of radius s: geodesic circle of hyperbolic radius
    2 artanh(s); counterclockwise traversal gives k_g = +coth toward the
    inward quarter-turn normal."""
    space = SpaceForm(2, 1.0)
    s = 0.35
    curve = DiscreteCurve.from_function(
        space, lambda t: s * np.array([np.cos(t), np.sin(t)]), 0.0, 2.0, 256
    )
    kg = curve.geodesic_curvature()
    expected = 1.0 / np.tanh(2.0 * np.arctanh(s))
    assert np.allclose(kg, expected, rtol=1e-6)


def test_resample_equalizes_segment_lengths():
    space = SpaceForm(2, 1.0)
    rng = np.random.default_rng(8)
    curve = wiggly_curve(space, rng, 64)
    even = curve.resample(48)
    lens = even.segment_lengths()
    assert np.max(lens) / np.min(lens) < 1.001
    assert np.allclose(even.points[0], curve.points[0])
    assert np.allclose(even.points[-1], curve.points[-1])
    # resampling in the tilde metric equalizes tilde lengths instead
    u = BallFactorField(kappa=1.3)
    even_t = curve.resample(48, u=u)
    lens_t = even_t.segment_lengths(u=u)
    assert np.max(lens_t) / np.min(lens_t) < 1.001


def test_curve_validation_errors():
    space = SpaceForm(2, 1.0)
    with pytest.raises(ValueError):
        DiscreteCurve(space, np.array([[0.0, 0.0]]))
    with pytest.raises(ValueError):
        DiscreteCurve(space, np.array([[0.0, 0.0], [1.2, 0.0]]))
    with pytest.raises(ValueError):
        DiscreteCurve(space, np.array([[0.0, 0.0], [0.5, 0.0]]), rule="gauss")
    curve = DiscreteCurve(space, np.array([[0.0, 0.0], [0.5, 0.0]]))
    from curvlab.fields import ConstantField

    with pytest.raises(ValueError):
        curve.integrate_ds_tilde(ConstantField(-1.0))
