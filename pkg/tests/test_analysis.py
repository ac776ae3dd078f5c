import math

import numpy as np
import pytest

import oracles as orc
from catalogue import CATALOGUE
from presets import INCONSISTENT, PRESETS, two_balls, two_balls_consistent
from splitfix.analysis import (
    MIN_TRACE,
    NoConvergenceError,
    cyclic_monotonicity_search,
    cyclic_sum,
    estimate_displacement,
    monotonicity_certificate,
    scaling_law_check,
    shadow_spread,
    solve_shifted_fixed_point,
    telescoping_terms,
    translation_identity_check,
)
from splitfix.geometry import Box, rotation
from splitfix.operators import (
    SkewLinearSpec,
    resolvent_rotation_ball,
    resolvent_skew_linear,
    rotation_halfspace_example,
    zero_operator,
)
from splitfix.splitting import SplittingOperator, StopRule, iterate

LONG = StopRule(max_iters=10_000, min_iters=MIN_TRACE)


def _v_est(spec, x0=None):
    tr = iterate(spec.split, spec.x0 if x0 is None else x0, LONG)
    return estimate_displacement(tr)


# --- estimate_displacement -----------------------------------------------------------

def test_displacement_consistent_two_balls():
    est = _v_est(two_balls_consistent()[0])
    assert np.linalg.norm(est.v) < 1e-6
    assert est.tail_residual >= 0


def test_displacement_inconsistent_two_balls():
    est = _v_est(two_balls()[0])
    assert np.linalg.norm(est.v - [1, 0]) < 1e-6
    np.testing.assert_allclose(est.v_lambda, 2 * 0.5 * est.v)


def test_displacement_line_box():
    est = _v_est(PRESETS["line_box"]()[0])
    assert np.linalg.norm(est.v - [0, -1]) < 1e-6


def test_displacement_rejects_peaceman_rachford():
    spec, _ = two_balls(lam=1.0)
    tr = iterate(spec.split, spec.x0, LONG)
    with pytest.raises(ValueError):
        estimate_displacement(tr)


def test_displacement_rejects_short_trace():
    spec, _ = two_balls()
    tr = iterate(spec.split, spec.x0, StopRule(max_iters=MIN_TRACE - 1))
    with pytest.raises(ValueError):
        estimate_displacement(tr)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_displacement_independent_of_start(name, rng):
    spec, ref = PRESETS[name]()
    e1 = _v_est(spec, rng.uniform(-5, 5, 2))
    e2 = _v_est(spec, rng.uniform(-5, 5, 2))
    assert np.linalg.norm(e1.v - e2.v) < 1e-6
    assert np.linalg.norm(e1.v - ref.v) < 1e-6


_SLOW_TAIL = pytest.mark.xfail(
    strict=True,
    reason="two_balls: x_n - x_{n+1} approaches 2 lam v sublinearly, so the spread of the "
    "last ten differences underestimates the distance to the limit",
)


@pytest.mark.parametrize(
    "name", [pytest.param(n, marks=_SLOW_TAIL) if n == "two_balls" else n for n in sorted(PRESETS)]
)
def test_displacement_start_spread_within_tail_residual(name, rng):
    spec, _ = PRESETS[name]()
    e1 = _v_est(spec, rng.uniform(-5, 5, 2))
    e2 = _v_est(spec, rng.uniform(-5, 5, 2))
    assert np.linalg.norm(e1.v - e2.v) <= 2 * max(e1.tail_residual, e2.tail_residual)


# --- scaling law --------------------------------------------------------------------

def test_scaling_law_two_balls():
    spec, _ = two_balls()
    rep = scaling_law_check(spec.A, spec.B, spec.x0, (0.25, 0.5, 0.75))
    assert rep.max_deviation < 1e-6
    assert np.all(np.linalg.norm(rep.normalized - [1, 0], axis=1) < 1e-6)


def test_scaling_law_consistent():
    spec, _ = two_balls_consistent()
    rep = scaling_law_check(spec.A, spec.B, spec.x0, (0.25, 0.5, 0.75))
    assert np.all(np.linalg.norm(rep.normalized, axis=1) < 1e-6)


def test_scaling_law_line_box():
    spec, _ = PRESETS["line_box"]()
    rep = scaling_law_check(spec.A, spec.B, spec.x0, (0.3, 0.6))
    assert np.all(np.linalg.norm(rep.normalized - [0, -1], axis=1) < 1e-6)


def test_scaling_law_rejects_lambda_one():
    spec, _ = two_balls()
    with pytest.raises(ValueError):
        scaling_law_check(spec.A, spec.B, spec.x0, (0.5, 1.0))


# --- normal solutions ------------------------------------------------------------------

def _two_balls_inclusion(spec, xbar, v):
    """dist(0, -v + A xbar + B(xbar - v)) from the geometric normal cones."""
    p = spec.params
    R = rotation(p["theta"])
    b = np.array([0.0, p["beta"]])
    c = np.array([p["gamma"], 0.0])
    assert np.linalg.norm(xbar) <= 1 + 1e-9
    assert np.linalg.norm(xbar - v - c) <= p["r"] + 1e-9
    rays = orc.ball_rays(xbar, [0, 0], 1.0) + orc.ball_rays(xbar - v, c, p["r"])
    return orc.cone_residual(v - R @ xbar - b, rays)


def _line_box_inclusion(spec, xbar, v):
    p = spec.params
    lo, hi = [p["a1"], p["a2"]], [p["b1"], p["b2"]]
    assert abs(xbar[1]) <= 1e-9
    w = np.array([p["w1"], 0.0])
    return orc.cone_residual(
        v - p["gamma"] * (xbar - w),
        orc.box_rays(xbar - v, lo, hi),
        lines=[[0.0, 1.0]],
    )


INCLUSION = {
    "two_balls": _two_balls_inclusion,
    "two_balls_consistent": _two_balls_inclusion,
    "line_box": _line_box_inclusion,
    "line_box_consistent": _line_box_inclusion,
}


def test_shifted_solve_two_balls():
    spec, ref = two_balls()
    sol = solve_shifted_fixed_point(spec.A, spec.B, 0.5, ref.v, spec.x0)
    assert np.linalg.norm(sol.xbar - [-1, 0]) < 1e-6
    assert sol.residual <= 1e-9
    np.testing.assert_allclose(sol.xbar, spec.A(sol.y), atol=1e-9)


def test_shifted_solve_line_box():
    spec, ref = PRESETS["line_box"]()
    sol = solve_shifted_fixed_point(spec.A, spec.B, 0.5, ref.v, spec.x0)
    assert np.linalg.norm(sol.xbar - [1, 0]) < 1e-6


def test_shifted_solve_consistent_zero_of_sum():
    spec, ref = two_balls_consistent()
    sol = solve_shifted_fixed_point(spec.A, spec.B, 0.5, ref.v, spec.x0)
    assert sol.residual < 1e-9
    assert _two_balls_inclusion(spec, sol.xbar, np.zeros(2)) < 1e-7


@pytest.mark.parametrize("name", sorted(PRESETS))
@pytest.mark.parametrize("lam", (0.3, 0.5, 0.8))
def test_normal_solution_inclusion(name, lam):
    spec, ref = PRESETS[name]()
    sol = solve_shifted_fixed_point(spec.A, spec.B, lam, ref.v, [0.4, 0.9])
    assert INCLUSION[name](spec, sol.xbar, ref.v) < 1e-7


def test_shifted_solve_fails_when_z_empty():
    spec, ref = two_balls(beta=0.0)
    assert not ref.z_nonempty
    with pytest.raises(NoConvergenceError) as info:
        solve_shifted_fixed_point(spec.A, spec.B, 0.5, ref.v, spec.x0, StopRule(max_iters=20_000))
    assert info.value.iterations == 20_000
    assert info.value.last_step > 1e-11


def test_shifted_solve_rejects_lambda_one():
    spec, ref = two_balls()
    with pytest.raises(ValueError):
        solve_shifted_fixed_point(spec.A, spec.B, 1.0, ref.v, spec.x0)


# --- translation identity ----------------------------------------------------------

def test_translation_identity_consistent():
    spec, ref = two_balls_consistent()
    sol = solve_shifted_fixed_point(spec.A, spec.B, 0.5, ref.v, spec.x0)
    assert translation_identity_check(spec.split, sol.y, ref.v, 100) < 1e-9


@pytest.mark.parametrize("name", INCONSISTENT)
@pytest.mark.parametrize("lam", (0.25, 0.5, 0.75))
def test_translation_identity_inconsistent(name, lam):
    spec, ref = PRESETS[name](lam=lam)
    sol = solve_shifted_fixed_point(spec.A, spec.B, lam, ref.v, spec.x0)
    assert translation_identity_check(spec.split, sol.y, ref.v, 50) < 1e-7
    assert shadow_spread(spec.split, sol.y, 50) < 1e-7


# --- Peaceman-Rachford vs Douglas-Rachford ---------------------------------------------

@pytest.mark.parametrize("name", sorted(PRESETS))
def test_peaceman_rachford_shadow_matches_douglas_rachford(name):
    dr, _ = PRESETS[name](lam=0.5)
    pr, _ = PRESETS[name](lam=1.0)
    s_dr = iterate(dr.split, dr.x0, StopRule(10_000)).shadow[-1]
    s_pr = iterate(pr.split, pr.x0, StopRule(10_000)).shadow[-1]
    assert np.linalg.norm(s_dr - s_pr) < 1e-6


# --- telescoping identity (small sample; the acceptance suite runs the full sweep) ----

@pytest.mark.parametrize("name", sorted(PRESETS))
def test_telescoping_identity_sample(name, rng):
    spec, _ = PRESETS[name](lam=0.4)
    for x, y in rng.uniform(-6, 6, size=(100, 2, 2)):
        t = telescoping_terms(spec.split, x, y)
        assert t.relative_residual < 1e-9
        assert t.a_product >= -1e-12 and t.b_product >= -1e-12
        assert t.a_slack >= -1e-10 and t.b_slack >= -1e-10


# --- cyclic monotonicity -----------------------------------------------------------

def test_cyclic_sum_two_cycle_is_monotonicity():
    pts = np.array([[0.0, 0.0], [1.0, 0.0]])
    duals = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert cyclic_sum(pts, duals) == pytest.approx(-2.0)


def test_cycle_found_for_rotation_halfspace_four_cycle():
    op = rotation_halfspace_example(math.pi / 3)
    hit = cyclic_monotonicity_search(op, cycle_len=4, trials=100_000, seed=1)
    assert hit is not None and hit.cyclic_sum > 1e-3
    # recompute on the returned cycle, independently of the search bookkeeping
    assert cyclic_sum(hit.points, hit.duals) == pytest.approx(hit.cyclic_sum)
    for p, d in zip(hit.points, hit.duals):
        np.testing.assert_allclose(op(p + d), p, atol=1e-12)


def test_cycle_found_for_rotation_ball_five_cycle():
    op = resolvent_rotation_ball(math.pi / 4)
    hit = cyclic_monotonicity_search(op, cycle_len=5, trials=100_000, seed=1)
    assert hit is not None and hit.cyclic_sum > 1e-6


def test_no_three_cycle_for_rotation_sixty():
    # a planar rotation by theta admits violating n-cycles only for theta > pi/n
    op = rotation_halfspace_example(math.pi / 3)
    assert cyclic_monotonicity_search(op, cycle_len=3, trials=20_000, seed=2) is None


def test_no_cycle_for_quadratic_gradient():
    op = resolvent_skew_linear(SkewLinearSpec(1.0, 0.0, 0.0))
    for n in (3, 4, 5):
        assert cyclic_monotonicity_search(op, cycle_len=n, trials=20_000, seed=n) is None


def test_cycle_search_is_deterministic():
    op = rotation_halfspace_example(math.pi / 3)
    a = cyclic_monotonicity_search(op, cycle_len=4, trials=50_000, seed=7)
    b = cyclic_monotonicity_search(op, cycle_len=4, trials=50_000, seed=7)
    assert a is not None and a.trial == b.trial
    np.testing.assert_array_equal(a.points, b.points)


def test_cycle_search_rejects_short_cycle():
    with pytest.raises(ValueError):
        cyclic_monotonicity_search(zero_operator(), cycle_len=2)


# --- monotonicity certificate ------------------------------------------------------

def test_certificate_zero_operator():
    assert monotonicity_certificate(zero_operator()) == 0.0


def test_certificate_rotation_ball_strong_modulus():
    theta = math.pi / 4
    op = resolvent_rotation_ball(theta)
    assert monotonicity_certificate(op, modulus=math.cos(theta) - 1e-9) >= -1e-10
    # a modulus above cos(theta) must fail somewhere (the bound is attained inside the ball)
    assert monotonicity_certificate(op, modulus=math.cos(theta) + 0.05) < 0


@pytest.mark.parametrize("name", sorted(CATALOGUE))
def test_certificate_catalogue(name):
    op = CATALOGUE[name]()[0]
    assert monotonicity_certificate(op, pairs=1000, sample_box=Box([-8, -8], [8, 8]), seed=3) >= -1e-10
