import math

import numpy as np
import pytest

from app.bidding.core import normalized_mass, values
from app.bidding.extrema import consistency_robustness
from app.errors import ConsistencyOutOfRangeError, DivergentTailError
from app.models.core import GridSpec
from app.models.tradeoff import ClassDParams, SlopeSequence
from app.numerics.roots import E, solve_r0, solve_work_bounds
from app.strategies.class_i import class_i_function, class_i_mass, class_i_pareto, integer_works, pareto_slopes
from app.strategies.classes import class_d, class_d_best, class_d_pareto, class_d_tradeoff, class_e
from app.strategies.tradeoff import r_grid, tradeoff_points, upper_bound_points

GRID = GridSpec(points_per_unit=512, half_width=8.0)


def test_class_e_on_both_work_bounds_has_mass_four():
    bounds = solve_work_bounds(4.0)
    ts = np.linspace(-2.0, 2.0, 9)
    for w in (bounds.w_lo, bounds.w_hi):
        assert np.allclose(normalized_mass(class_e(w), ts), 4.0, rtol=1e-9)


def test_doubling_tradeoff():
    cons, rob = class_d_tradeoff(ClassDParams(ell=0.0, h=math.log(2.0)))
    assert cons == pytest.approx(2.0, abs=1e-9)
    assert rob == pytest.approx(4.0, abs=1e-9)


def test_class_d_tradeoff_formula_matches_grid():
    params = ClassDParams(ell=0.6, h=0.3)
    cons, rob = class_d_tradeoff(params)
    expected = math.expm1(0.6) / 0.6 * math.exp(0.9) / math.expm1(0.9)
    assert cons == pytest.approx(expected, rel=1e-12)
    assert rob == pytest.approx(cons * math.exp(0.3), rel=1e-12)
    measured = consistency_robustness(class_d(params), GRID)
    assert measured.cons == pytest.approx(cons, abs=1e-8)
    assert measured.rob == pytest.approx(rob, abs=1e-8)


def test_class_d_pareto_deterministic_branch():
    params, r = class_d_pareto(1.5)
    assert params.ell == 0.0
    assert r == pytest.approx(4.5, rel=1e-12)
    _, r = class_d_pareto(1.2)
    assert r == pytest.approx(7.2, rel=1e-12)


def test_class_d_pareto_randomized_branch_beats_doubling():
    params, r = class_d_pareto(2.0)
    assert params.ell > 0
    assert r < 4.0
    assert class_d_tradeoff(params)[0] == pytest.approx(2.0, rel=1e-8)
    assert class_d_tradeoff(params)[1] == pytest.approx(r, rel=1e-8)


def test_class_d_pareto_rejects_out_of_range():
    with pytest.raises(ConsistencyOutOfRangeError):
        class_d_pareto(1.0)
    with pytest.raises(ConsistencyOutOfRangeError):
        class_d_pareto(3.0)


def test_class_d_best_inverts_pareto():
    for r in (3.2, 4.0, 6.0):
        params, c = class_d_best(r)
        assert class_d_tradeoff(params)[1] == pytest.approx(r, rel=1e-8)
        assert class_d_tradeoff(params)[0] == pytest.approx(c, rel=1e-8)


def test_class_i_at_four():
    _, c = pareto_slopes(4.0)
    assert c == pytest.approx(solve_work_bounds(4.0).w_lo + 1.0, rel=1e-12)
    assert c == pytest.approx(1.4643, abs=1e-3)
    B, _ = class_i_pareto(4.0, grid=GRID)
    measured = consistency_robustness(B, GRID)
    assert measured.cons == pytest.approx(c, abs=1e-8)
    assert measured.rob <= 4.0 + 1e-8


def test_class_i_branches_meet_at_r0():
    r0 = solve_r0()
    bounds = solve_work_bounds(r0)
    _, c_above = pareto_slopes(r0)
    _, c_below = pareto_slopes(r0 - 1e-9)
    assert c_above == pytest.approx(bounds.w_hi, abs=1e-8)
    assert c_below == pytest.approx(c_above, abs=1e-6)


def test_class_i_at_e_has_no_improvement():
    _, c = pareto_slopes(E)
    assert c == pytest.approx(E, rel=1e-12)


def test_class_i_small_regime_is_robust():
    r = 3.0
    B, c = class_i_pareto(r, grid=GRID)
    measured = consistency_robustness(B, GRID)
    assert measured.rob <= r * (1 + 1e-7)
    assert measured.cons == pytest.approx(c, abs=1e-7)
    assert c < E


def test_class_i_closed_form_mass_matches_function():
    slopes, _ = pareto_slopes(4.0)
    B = class_i_function(slopes)
    ts = np.linspace(-3.0, 3.0, 25) + 0.013
    assert np.allclose(class_i_mass(slopes, ts), normalized_mass(B, ts), rtol=1e-9)


def test_class_i_works_follow_recurrence():
    slopes = SlopeSequence(slopes={0: 0.5, 1: 0.2}, left_slope=1.5, right_slope=0.4, i_min=0, i_max=1)
    works = integer_works(slopes, -1, 3)
    assert works[-1] == pytest.approx(1.0 / 1.5)
    assert works[1] == pytest.approx(math.exp(-0.5) * (works[0] + math.expm1(0.5) / 0.5))


def test_zero_left_slope_diverges():
    slopes = SlopeSequence(slopes={0: 0.5}, left_slope=0.0, right_slope=0.4, i_min=0, i_max=0)
    with pytest.raises(DivergentTailError):
        class_i_mass(slopes, 0.5)
    with pytest.raises(DivergentTailError):
        class_i_function(slopes)


@pytest.mark.parametrize("params", [ClassDParams(ell=0.6, h=0.3), ClassDParams(ell=0.0, h=math.log(2.0))])
def test_class_d_mass_has_period_one(params):
    B = class_d(params)
    ts = np.linspace(-3.0, 3.0, 25) + 0.013
    assert np.allclose(normalized_mass(B, ts), normalized_mass(B, ts + 1.0), rtol=1e-9)


def test_doubling_levels_are_exact_powers_of_two():
    B = class_d(ClassDParams(ell=0.0, h=math.log(2.0)))
    ks = np.arange(-5, 6)
    assert list(values(B, ks.astype(float))) == [2.0**k for k in ks]
    assert B.tail_growth == 2.0


@pytest.mark.parametrize("r", [3.0, 4.0, 6.0])
def test_class_i_works_stay_between_work_bounds(r):
    bounds = solve_work_bounds(r)
    slopes, _ = pareto_slopes(r)
    works = integer_works(slopes, -3, 3)
    assert all(bounds.w_lo - 1e-9 <= w <= bounds.w_hi + 1e-9 for w in works.values())


def test_families_are_ordered_along_the_robustness_range():
    for r in r_grid(E, 8.0, 15):
        c = {point.source: point.c for point in upper_bound_points(r)}
        assert c["AlgorithmA"] <= min(c["ClassI"], c["ClassD"]) + 1e-7
        assert max(c["ClassI"], c["ClassD"]) <= E + 1e-7
        if r <= 4.7:
            assert c["ClassI"] <= c["ClassD"] + 1e-7
    at_eight = {point.source: point.c for point in upper_bound_points(8.0)}
    assert at_eight["ClassI"] > at_eight["ClassD"]


def test_lower_bound_sits_below_algorithm_a():
    points = tradeoff_points([3.2, 4.0], a=5, n=60)
    for r in (3.2, 4.0):
        lower = next(p.c for p in points if p.source == "LowerBound" and p.r == r)
        upper = next(p.c for p in points if p.source == "AlgorithmA" and p.r == r)
        assert lower <= upper + 1e-9
