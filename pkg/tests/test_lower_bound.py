import csv
import json

import numpy as np
import pytest

from app.errors import FeasibilityViolationError, ParseError
from app.lower_bound.dual import (
    build_dual_certificate,
    certified_gap,
    dual_residuals,
    fixed_point_b,
    fixed_point_sweeps,
    lambda_limit,
    lower_bound_curve,
    read_certificate,
    rho_root,
    verify_certificate,
    write_certificate,
    write_curve_csv,
)
from app.lower_bound.primal import (
    build_primal,
    discretize_function,
    export_lp_text,
    parse_lp_text,
    primal_objective,
    primal_violation,
    solve_primal,
)
from app.numerics.roots import solve_work_bounds, w_hi
from app.strategies.pareto import build_algorithm_a


def test_single_step_fixed_point():
    assert fixed_point_b(1, 1, 4.0)[0] == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert fixed_point_b(1, 1, 4.0, method="sweep")[0] == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_banded_and_sweep_agree():
    banded = fixed_point_b(5, 40, 4.0)
    swept = fixed_point_b(5, 40, 4.0, method="sweep")
    assert np.allclose(banded, swept, rtol=1e-7)


def test_sweeps_increase_monotonically_from_zero():
    _, history = fixed_point_sweeps(3, 12, 4.0, keep_history=True)
    for before, after in zip(history, history[1:]):
        assert np.all(after >= before)


def test_rho_root():
    assert rho_root(1, 4.0) == pytest.approx(4.0 / 3.0)
    rho = rho_root(10, 4.0)
    assert 1.0 < rho < 1.1
    assert rho**10 == pytest.approx(40.0 * (rho - 1.0), rel=1e-9)


def test_small_certificate_is_feasible():
    cert = build_dual_certificate(1, 1, 4.0)
    assert cert.m == 0
    assert len(cert.beta) == 2
    assert len(cert.gamma) == 3
    assert cert.lam >= 1.0
    worst, _ = verify_certificate(cert)
    assert worst >= -1e-9


def test_certificate_matches_optimal_consistency_at_four():
    cert = build_dual_certificate(50, 2000, 4.0)
    optimum = 4.0 - solve_work_bounds(4.0).w_hi
    worst, _ = verify_certificate(cert)
    assert worst >= -1e-9
    assert cert.lam >= optimum - 0.01
    assert abs(cert.lam - optimum) <= 0.01
    assert np.all(np.asarray(cert.beta) >= 0)
    assert np.all(np.asarray(cert.gamma) >= 0)


def test_negative_component_is_rejected():
    cert = build_dual_certificate(3, 20, 4.0)
    beta = list(cert.beta)
    beta[0] = -1.0
    with pytest.raises(FeasibilityViolationError):
        verify_certificate(cert.model_copy(update={"beta": beta}))


def test_residual_count_matches_rows():
    cert = build_dual_certificate(4, 30, 5.0)
    assert dual_residuals(cert).shape == (cert.n + cert.m + 1,)


def test_certificate_file_round_trip(tmp_path):
    cert = build_dual_certificate(3, 20, 4.0)
    path = write_certificate(cert, tmp_path / "cert.json")
    assert "lambda" in json.loads(path.read_text(encoding="utf-8"))
    loaded = read_certificate(path)
    assert loaded.lam == cert.lam
    assert loaded.beta == cert.beta


def test_certificate_with_wrong_lengths_is_rejected(tmp_path):
    cert = build_dual_certificate(3, 20, 4.0)
    payload = json.loads(write_certificate(cert, tmp_path / "cert.json").read_text(encoding="utf-8"))
    payload["beta"] = payload["beta"][:-1]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ParseError):
        read_certificate(bad)


def test_lower_bound_curve_falls_as_robustness_loosens(tmp_path):
    points = lower_bound_curve([3.0, 4.0, 6.0], 10, 300, threads=2)
    assert [p.source for p in points] == ["LowerBound"] * 3
    assert [p.r for p in points] == [3.0, 4.0, 6.0]
    assert points[0].c > points[1].c > points[2].c
    path = write_curve_csv(points, 10, 300, tmp_path / "lb.csv")
    with path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["r", "lambda", "a", "n"]
    assert len(rows) == 4


def test_smallest_primal():
    p = build_primal(4.0, 1, 1, 0)
    assert p.row_names == ["lam", "gam_m1", "bet_m1", "bet_0", "theta"]
    assert p.a_ub.shape == (5, 3)
    value, z = solve_primal(p)
    assert value == pytest.approx(1.0)
    assert primal_violation(p, z) <= 1e-9


def test_primal_solve_lies_between_bounds():
    r = 4.0
    value, _ = solve_primal(build_primal(r, 10, 200, 9))
    assert 1.0 <= value <= r - solve_work_bounds(r).w_hi + 0.1


def test_discretized_function_is_primal_feasible():
    r, a, n, m = 4.0, 4, 40, 3
    p = build_primal(r, a, n, m)
    z = discretize_function(build_algorithm_a(r), a, n, m)
    cert = build_dual_certificate(a, n, r)
    assert z[n] == pytest.approx(1.0)
    assert primal_violation(p, z) <= 1e-9
    assert primal_objective(p, z) >= cert.lam - 1e-9


def test_lp_text_round_trip(tmp_path):
    p = build_primal(4.0, 3, 12, 2)
    path = export_lp_text(p, tmp_path / "primal.lp")
    text = path.read_text(encoding="utf-8")
    assert text.startswith("\\ bidding-lab primal")
    assert "Minimize\n obj: C\nSubject To\n" in text
    assert text.rstrip().endswith("End")
    parsed = parse_lp_text(path)
    assert parsed.row_names == p.row_names
    assert np.allclose(parsed.a_ub.toarray(), p.a_ub.toarray(), rtol=0, atol=0)
    assert np.array_equal(parsed.b_ub, p.b_ub)


def test_lp_text_without_header_is_rejected(tmp_path):
    path = tmp_path / "plain.lp"
    path.write_text("Minimize\n obj: C\nEnd\n", encoding="utf-8")
    with pytest.raises(ParseError):
        parse_lp_text(path)


def test_certificate_value_grows_with_truncation_to_its_limit():
    lams = [build_dual_certificate(5, n, 4.0).lam for n in (5, 10, 20, 40, 80, 160, 400)]
    assert all(later >= earlier - 1e-12 for earlier, later in zip(lams, lams[1:]))
    assert lams[-1] == pytest.approx(lambda_limit(5, 4.0), abs=1e-8)


def test_certified_gap_closes_as_the_window_refines():
    achievable = 4.0 - w_hi(4.0)
    gaps = []
    for a in (1, 5, 25):
        cert = build_dual_certificate(a, 40 * a, 4.0)
        gaps.append(certified_gap(cert))
        assert gaps[-1] == pytest.approx(abs(lambda_limit(a, 4.0) - achievable), abs=1e-6)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[0] == pytest.approx(0.2017, abs=1e-3)


def test_limit_gap_shrinks_with_window_count():
    achievable = 4.0 - w_hi(4.0)
    gaps = [achievable - lambda_limit(a, 4.0) for a in (1, 5, 25, 125)]
    assert all(gap > 0 for gap in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_equality_rows_are_tight_and_detect_a_shifted_objective():
    cert = build_dual_certificate(10, 200, 4.0)
    worst, equality = verify_certificate(cert)
    assert worst >= -1e-9
    assert equality <= 1e-9
    _, shifted = verify_certificate(cert.model_copy(update={"lam": cert.lam + 1e-3}))
    assert shifted > 1e-4
