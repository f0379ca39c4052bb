"""Acceptance suite: the contract-level checks, one test per criterion.

Each test prints a single summary line (visible with pytest -s, or in the
captured output of a failing test) before asserting, so a red criterion
still reports its measured numbers.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from curvlab import cli
from curvlab.cli import RunConfig
from curvlab.estimates import decay_scan, elementary_inequalities
from curvlab.fields import ConstantField
from curvlab.geodesic import GeodesicProblem, minimize_free_boundary
from curvlab.hypersurface import example_fixture
from curvlab.variation import TestFunction, crucial_bounds_scan, phi_calculus


def _ctx():
    return cli.CheckContext(RunConfig())


def _line(num, ok, detail):
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")


def _observed(report, part):
    return report.grid["parts"][part]["observed"]


# ---------------------------------------------------------------------------
# 1. conformal transformation laws against finite differences
# ---------------------------------------------------------------------------


def test_criterion_01_conformal_law_oracles():
    ctx = _ctx()
    reports = [
        cli._check_connection_law(ctx),
        cli._check_sectional_law(ctx),
        cli._check_ricci_law(ctx),
        cli._check_mean_curvature_law(ctx),
    ]
    errs = [_observed(r, "fd_relative_error") for r in reports]
    ok = all(e <= 1e-4 for e in errs)
    _line(1, ok, f"worst fd relative errors {['%.2e' % e for e in errs]}")
    for rep, err in zip(reports, errs):
        assert err <= 1e-4, rep.check


# ---------------------------------------------------------------------------
# 2. constant-curvature recovery from the ball factor
# ---------------------------------------------------------------------------


def test_criterion_02_poincare_recovery():
    rep = cli._check_poincare_recovery(_ctx())
    ric = _observed(rep, "ricci_constant_error")
    sph = _observed(rep, "sphere_mean_curvature_error")
    ok = ric <= 1e-4 and sph <= 1e-6
    _line(2, ok, f"Ricci error {ric:.2e}, sphere curvature error {sph:.2e}")
    assert ric <= 1e-4
    assert sph <= 1e-6


# ---------------------------------------------------------------------------
# 3. the equidistant-circle configurations are exactly sharp
# ---------------------------------------------------------------------------


def test_criterion_03_sharp_lens():
    rep = cli._check_sharp_lens(_ctx())
    errs = {
        name: _observed(rep, name)
        for name in ("mean_curvature_error", "distance_error",
                     "tanh_identity_error", "bound_gap")
    }
    ok = all(v <= 1e-6 for v in errs.values())
    _line(3, ok, ", ".join(f"{k} {v:.2e}" for k, v in errs.items()))
    for name, val in errs.items():
        assert val <= 1e-6, name


# ---------------------------------------------------------------------------
# 4. grid certificate for the sharp pointwise J bounds
# ---------------------------------------------------------------------------


def test_criterion_04_j_bounds_grid_certificate():
    n_r, n_t = 2000, 200
    worst = np.inf
    location_ok = True
    for n in (1, 2, 3):
        for R in (10.0, 100.0):
            flat = crucial_bounds_scan(n, R, model="euclid", n_r=n_r, n_t=n_t)
            hyp = crucial_bounds_scan(n, R, model="hyperbolic", n_r=n_r, n_t=n_t)
            for scan in (flat, hyp):
                worst = min(worst, min(c.min_slack for c in scan.checks.values()))
            # flat equality sits at r = R, |r_T| = 1, up to one grid cell
            c = flat.checks["j2_upper"]
            dr = R / (n_r - 1)
            dt = 2.0 / (n_t - 1)
            location_ok &= abs(c.at_r - R) <= dr + 1e-12
            location_ok &= 1.0 - abs(c.at_r_T) <= dt + 1e-12
    ok = worst >= -1e-12 and location_ok
    _line(4, ok, f"min slack {worst:.3e}, equality located {location_ok}")
    assert worst >= -1e-12
    assert location_ok


# ---------------------------------------------------------------------------
# 5. geodesic solver accuracy and the pointwise curvature law
# ---------------------------------------------------------------------------


def _max_discrete_curvature(space, curve):
    acc = curve.vertex_acceleration()[1:-1]
    return max(float(space.norm(x, a)) for x, a in zip(curve.points[1:-1], acc))


def test_criterion_05_solver_and_curvature_law():
    ctx = _ctx()
    slab = cli._check_slab_perpendicular(ctx)
    length_err = _observed(slab, "length_error")
    orth_err = _observed(slab, "orthogonality_error")

    law = cli._check_planar_curvature_law(ctx)
    bump_residual = _observed(law, "curvature_law_residual")

    # trivial-factor minimizer between the equidistant circles: the law
    # reduces to vanishing discrete geodesic curvature
    fx = example_fixture("poincare-circles", a=1.0)
    seeds = np.stack(
        [
            fx.pieces[0].chart_points(np.array([np.pi + 0.25]))[0],
            fx.pieces[1].chart_points(np.array([-0.2]))[0],
        ]
    )
    problem = GeodesicProblem(
        fx.space, ConstantField(1.0),
        piece_start=fx.pieces[0], piece_end=fx.pieces[1], endpoints=seeds,
    )
    res = minimize_free_boundary(problem, n_segments=256, gtol=1e-7)
    lens_residual = _max_discrete_curvature(fx.space, res.curve)

    short = cli._check_curve_shortness(ctx)
    margin = short.grid["budget"] - short.grid["sup_deviation"]

    law_worst = max(bump_residual, lens_residual)
    ok = (
        length_err <= 1e-8
        and orth_err <= 1e-6
        and res.converged
        and law_worst <= 1e-5
        and margin >= 0.0
    )
    _line(
        5, ok,
        f"length error {length_err:.2e}, orthogonality {orth_err:.2e}, "
        f"law residual {law_worst:.2e}, shortness margin {margin:.3f}",
    )
    assert length_err <= 1e-8
    assert orth_err <= 1e-6
    assert res.converged
    assert law_worst <= 1e-5
    assert margin >= 0.0


# ---------------------------------------------------------------------------
# 6. traced second variation against the brute-force oracle
# ---------------------------------------------------------------------------


def test_criterion_06_index_form_consistency():
    ctx = _ctx()
    flat = cli._check_index_form_flat_slab(ctx)
    nonneg = cli._check_index_form_nonnegative(ctx)
    fd_rel = max(_observed(flat, "fd_relative_error"),
                 _observed(flat, "fd_relative_error_cosh"))
    totals = [
        flat.grid["total"],
        flat.grid["total_cosh"],
        nonneg.grid["slab_total"],
        nonneg.grid["lens_total"],
    ]
    min_total = min(totals)
    ok = fd_rel <= 1e-4 and min_total >= -1e-6
    _line(6, ok, f"fd relative error {fd_rel:.2e}, smallest form value {min_total:.3e}")
    assert fd_rel <= 1e-4
    assert min_total >= -1e-6


# ---------------------------------------------------------------------------
# 7. weight-function calculus
# ---------------------------------------------------------------------------


def test_criterion_07_weight_calculus():
    rep = phi_calculus(2.0)
    Ls = np.geomspace(1e-2, 50.0, 120)
    closed = np.array([TestFunction.cosh_type(L).phi_sq_integral() for L in Ls])
    tf = TestFunction.cosh_type(2.0)
    val, _ = quad(lambda s: float(tf.phi(np.asarray(s))) ** 2, 0.0, 2.0, limit=200)
    quad_err = abs(tf.phi_sq_integral() - val)
    ok = (
        rep.endpoint_error <= 1e-12
        and bool(np.all(closed <= 1.2))
        and quad_err <= 1e-6
        and abs(tf.phi_sq_integral() - 1.1816) < 5e-5
    )
    _line(
        7, ok,
        f"endpoint error {rep.endpoint_error:.2e}, sup integral {closed.max():.5f}, "
        f"value at L=2 {tf.phi_sq_integral():.6f}",
    )
    assert rep.endpoint_error <= 1e-12
    assert np.all(closed <= 1.2)
    assert quad_err <= 1e-6
    assert abs(tf.phi_sq_integral() - 1.1816) < 5e-5


# ---------------------------------------------------------------------------
# 8. decay scans against the closed-form envelopes
# ---------------------------------------------------------------------------


def test_criterion_08_decay_scans():
    R_log = np.exp(np.linspace(4.0, 10.0, 7))
    log_scan = decay_scan(example_fixture("log-graph"), R_log, "sum-inverse-R")
    top = log_scan.R >= log_scan.R[-1] / np.exp(3.0)
    window_lo = float(np.min(log_scan.normalized[top]))
    window_hi = float(np.max(log_scan.normalized[top]))
    window_ok = 0.8 <= window_lo and window_hi <= 1.2

    rev_scan = decay_scan(
        example_fixture("revolution-r4"), R_log, "fitted-inverse-R2"
    )
    hyp_scan = decay_scan(
        example_fixture("hyperbolic-equidistant"),
        np.geomspace(2.0, 16.0, 5),
        "hyperbolic-saturation",
    )
    ok = (
        log_scan.passed
        and window_ok
        and rev_scan.passed
        and rev_scan.fit_drift <= 0.05
        and hyp_scan.passed
    )
    _line(
        8, ok,
        f"envelopes passed ({log_scan.passed}, {rev_scan.passed}, {hyp_scan.passed}), "
        f"fit drift {rev_scan.fit_drift:.4f}, "
        f"normalized window [{window_lo:.3f}, {window_hi:.3f}] vs [0.8, 1.2]",
    )
    assert log_scan.passed
    assert rev_scan.passed
    assert rev_scan.fit_drift <= 0.05
    assert hyp_scan.passed
    assert window_ok, (
        "normalized decay of the logarithmic graph does not enter the "
        f"[0.8, 1.2] window on the top half of the grid: [{window_lo:.3f}, "
        f"{window_hi:.3f}]"
    )


# ---------------------------------------------------------------------------
# 9. displayed curvature of the revolution surface
# ---------------------------------------------------------------------------


def test_criterion_09_revolution_formula():
    fx = example_fixture("revolution-r4")
    piece = fx.pieces[0]
    ts = np.linspace(0.5, 0.95, 50, endpoint=False)
    L = 1.0 / (1.0 - ts)
    h = np.exp(L)
    hp = h * L**2
    hpp = h * L**3 * (L + 2.0)
    principal = (2.0 * (1.0 + hp * hp) - h * hpp) / (h * (1.0 + hp * hp) ** 1.5)
    displayed = np.asarray(piece.h_exact(ts), dtype=float)
    rel = float(np.max(np.abs(displayed - principal) / np.abs(principal)))
    ok = rel <= 1e-10
    _line(9, ok, f"displayed vs principal-curvature formula, relative error {rel:.2e}")
    assert rel <= 1e-10


# ---------------------------------------------------------------------------
# 10. elementary inequalities with reported slack
# ---------------------------------------------------------------------------


def test_criterion_10_elementary_inequalities():
    rep = elementary_inequalities()
    slacks = {
        "shortness_factor": rep.grid["shortness_factor"]["min_slack"],
        "exp_linear": rep.grid["exp_linear"]["min_slack"],
        "coth_window": rep.grid["coth_window"]["min_slack"],
    }
    quarter = rep.grid["shortness_factor"]["slack_at_quarter"]
    quarter_ok = abs(quarter - 1.11e-3) <= 0.05 * 1.11e-3
    ok = all(s >= -1e-12 for s in slacks.values()) and quarter_ok
    _line(
        10, ok,
        "min slacks " + ", ".join(f"{k} {v:.3e}" for k, v in slacks.items())
        + f"; quarter-point slack {quarter:.4e}",
    )
    for name, s in slacks.items():
        assert s >= -1e-12, name
    assert quarter_ok


# ---------------------------------------------------------------------------
# 11. determinism of the reporting harness
# ---------------------------------------------------------------------------


def test_criterion_11_deterministic_outputs(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    s1 = cli.main(["--suite", "scan", "--out", str(out1), "--seed", "5"])
    s2 = cli.main(["--suite", "scan", "--out", str(out2), "--seed", "5"])
    tables = sorted(p.name for p in out1.glob("*.csv"))
    identical = all(
        (out1 / name).read_bytes() == (out2 / name).read_bytes() for name in tables
    )
    ok = s1 == 0 and s2 == 0 and bool(tables) and identical
    _line(11, ok, f"{len(tables)} tables byte-identical across runs: {identical}")
    assert s1 == 0 and s2 == 0
    assert tables
    assert identical
