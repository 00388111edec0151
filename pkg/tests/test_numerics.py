import math

import numpy as np
import pytest
from scipy.special import lambertw

from app.errors import NoSignChangeError, RobustnessBelowEError
from app.models.core import SolverConfig
from app.numerics.roots import E, TWO_OVER_LN2, find_root_bracketed, solve_r0, solve_work_bounds


def test_work_bounds_at_e_are_both_one():
    bounds = solve_work_bounds(E)
    assert bounds.w_lo == 1.0
    assert bounds.w_hi == 1.0


def test_work_bounds_at_four():
    bounds = solve_work_bounds(4.0)
    assert bounds.w_lo == pytest.approx(0.4643, abs=1e-3)
    assert bounds.w_hi == pytest.approx(2.7983, abs=1e-3)


def test_upper_work_bound_at_two_over_ln2_is_exact():
    assert solve_work_bounds(TWO_OVER_LN2).w_hi == pytest.approx(1.0 / math.log(2.0), rel=1e-10)


def test_work_bounds_on_a_grid_solve_the_equation_and_the_gap_shrinks():
    previous_hi, previous_gap = -math.inf, math.inf
    for r in np.linspace(E + 1e-6, 20.0, 60):
        bounds = solve_work_bounds(float(r))
        assert bounds.w_lo * math.exp(1.0 / bounds.w_lo) == pytest.approx(r, rel=1e-9)
        assert bounds.w_hi * math.exp(1.0 / bounds.w_hi) == pytest.approx(r, rel=1e-9)
        assert bounds.w_lo <= 1.0 <= bounds.w_hi
        assert bounds.w_hi > previous_hi
        assert r - bounds.w_hi < previous_gap
        previous_hi, previous_gap = bounds.w_hi, r - bounds.w_hi


def test_work_bounds_match_lambert_branches():
    for r in (3.0, 4.0, 7.5):
        bounds = solve_work_bounds(r)
        assert bounds.w_hi == pytest.approx(-1.0 / lambertw(-1.0 / r, 0).real, rel=1e-9)
        assert bounds.w_lo == pytest.approx(-1.0 / lambertw(-1.0 / r, -1).real, rel=1e-9)


def test_robustness_below_e_is_rejected():
    with pytest.raises(RobustnessBelowEError) as exc:
        solve_work_bounds(2.5)
    assert exc.value.code == "ROBUSTNESS_BELOW_E"


def test_robustness_just_below_e_is_clamped():
    bounds = solve_work_bounds(E - 1e-13, SolverConfig(abs_tol=1e-12))
    assert bounds.r == E
    assert bounds.w_lo == bounds.w_hi == 1.0


def test_r0_separates_work_bounds_by_one():
    r0 = solve_r0()
    bounds = solve_work_bounds(r0)
    assert E < r0 < 4.0
    assert r0 == pytest.approx(3.02, abs=0.03)
    assert bounds.w_hi - bounds.w_lo - 1.0 == pytest.approx(0.0, abs=1e-9)


def test_find_root_bracketed_examples():
    assert find_root_bracketed(lambda x: x - 2.0, 0.0, 5.0) == pytest.approx(2.0)
    assert find_root_bracketed(lambda x: x * math.exp(1.0 / x) - 4.0, 1.0, 10.0) == pytest.approx(2.7983, abs=1e-3)
    rho = find_root_bracketed(lambda x: x**10 - 40.0 * (x - 1.0), 1.0 + 1e-12, 1.1)
    assert 1.0 < rho < 1.1


def test_find_root_without_sign_change_raises():
    with pytest.raises(NoSignChangeError):
        find_root_bracketed(lambda x: x * x + 1.0, -1.0, 1.0)
