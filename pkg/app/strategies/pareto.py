from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

from app.bidding.core import derivative, values
from app.bidding.extrema import consistency_robustness
from app.errors import NonConvergenceError, NumericOverflowError
from app.models.core import GridSpec, SolverConfig
from app.models.functions import BiddingFunction, Segment
from app.models.tradeoff import PolynomialFamily, RegimeParams, SeriesPiece
from app.numerics.roots import E, TWO_OVER_LN2, check_robustness, find_root_bracketed, solve_work_bounds

log = logging.getLogger(__name__)

COEFFICIENT_LIMIT = 1e15
MAX_PERIODS = 5000


def regime_params(r: float, cfg: SolverConfig | None = None) -> RegimeParams:
    r = check_robustness(r, cfg)
    w_hi = solve_work_bounds(r, cfg).w_hi
    alpha = 1.0 / w_hi
    if r >= TWO_OVER_LN2:
        return RegimeParams(r=r, regime="Large", w_hi=w_hi, alpha=alpha, mu=r - w_hi)
    # y + ln(2 - y) is increasing on [0, 1]; it is ln 2 at 0 and 1 at 1
    y = find_root_bracketed(lambda v: v + math.log(2.0 - v) - alpha, 0.0, 1.0, cfg)
    return RegimeParams(
        r=r,
        regime="Small",
        w_hi=w_hi,
        alpha=alpha,
        mu=math.exp(y) / alpha,
        y=y,
        ell_cap=max(0.0, 1.0 - y / alpha),
    )


def plateau_end(params: RegimeParams) -> float:
    """End of the constant run A = 1 that starts at t = 0."""
    return 1.0 if params.regime == "Large" else float(params.ell_cap)


def _initial_pieces(params: RegimeParams) -> list[SeriesPiece]:
    if params.regime == "Large":
        return [SeriesPiece(s_start=0.0, s_end=1.0, coefficients=[1.0])]
    ell_cap = plateau_end(params)
    pieces = []
    if ell_cap > 0:
        pieces.append(SeriesPiece(s_start=0.0, s_end=ell_cap, coefficients=[1.0]))
    pieces.append(SeriesPiece(s_start=ell_cap, s_end=1.0, coefficients=[0.0], exp_coef=1.0))
    return pieces


def _piece_mass(piece: SeriesPiece, rate: float) -> float:
    width = piece.s_end - piece.s_start
    mass = float(P.polyval(width, P.polyint(piece.coefficients)))
    if piece.exp_coef:
        mass += piece.exp_coef * math.expm1(rate * width) / rate
    return mass


def _value_at_zero(pieces: list[SeriesPiece]) -> float:
    first = pieces[0]
    return first.coefficients[0] + first.exp_coef


def next_pieces(pieces: list[SeriesPiece], anchor: float, x: float, rate: float) -> list[SeriesPiece]:
    """p(s) = anchor - x * integral of the previous polynomial over [s, 1]."""
    masses = [_piece_mass(piece, rate) for piece in pieces]
    after = np.concatenate((np.cumsum(masses[::-1])[::-1][1:], [0.0]))
    out = []
    for piece, mass, tail in zip(pieces, masses, after):
        exp_part = piece.exp_coef / rate if piece.exp_coef else 0.0
        coefficients = x * P.polyint(piece.coefficients)
        coefficients[0] += anchor - x * (mass + tail) - x * exp_part
        if np.max(np.abs(coefficients)) > COEFFICIENT_LIMIT:
            raise NumericOverflowError(f"polynomial coefficient above {COEFFICIENT_LIMIT:g}")
        out.append(
            SeriesPiece(
                s_start=piece.s_start,
                s_end=piece.s_end,
                coefficients=coefficients.tolist(),
                exp_coef=x * exp_part,
            )
        )
    return out


def polynomial_family(
    r: float,
    tail_tol: float = 1e-12,
    cfg: SolverConfig | None = None,
) -> tuple[RegimeParams, PolynomialFamily]:
    """p_0 ... p_K with R * q_K <= tail_tol, where q_k = p_k(0)."""
    if not tail_tol > 0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")
    params = regime_params(r, cfg)
    x = 1.0 / params.r
    rate = params.alpha if params.regime == "Small" else 0.0
    polys = [_initial_pieces(params)]
    q = [_value_at_zero(polys[0])]
    while params.r * q[-1] > tail_tol or len(polys) < 2:
        k = len(polys) - 1
        if k >= MAX_PERIODS:
            raise NonConvergenceError(f"R*q_k still above {tail_tol:g} after {MAX_PERIODS} periods")
        anchor = x * params.mu if k == 0 else q[k]
        pieces = next_pieces(polys[k], anchor, x, rate)
        value = _value_at_zero(pieces)
        if not 0.0 < value < q[-1]:
            raise NumericOverflowError(f"q_{k + 1}={value!r} breaks positivity or monotonicity")
        polys.append(pieces)
        q.append(value)
    family = PolynomialFamily(x=x, exp_rate=rate, polys=polys, q=q, k_max=len(polys) - 1)
    log.debug("polynomial_family r=%s regime=%s k_max=%s q_last=%.3g", params.r, params.regime, family.k_max, q[-1])
    return params, family


def build_algorithm_a(
    r: float,
    tail_tol: float = 1e-12,
    cfg: SolverConfig | None = None,
) -> BiddingFunction:
    """The R-robust bidding function whose consistency meets the lower bound.

    A(t) = p_k(t + k) on [-k, -k + 1], then 1 on the plateau, then an
    exponential of rate 1/w_hi.
    """
    params, family = polynomial_family(r, tail_tol, cfg)
    rate = family.exp_rate
    k_max = family.k_max
    # one step past the window gives the exact mass below it: F(-K) = R q_{K+1}
    beyond = next_pieces(family.polys[k_max], family.q[k_max], family.x, rate)
    q_beyond = _value_at_zero(beyond)

    segments: list[Segment] = []
    for k in range(k_max, 0, -1):
        for piece in family.polys[k]:
            segments.append(
                Segment(
                    t_start=-k + piece.s_start,
                    t_end=-k + piece.s_end,
                    kind="polynomial",
                    coefficients=piece.coefficients,
                    exp_coef=piece.exp_coef if rate else None,
                    exp_rate=rate if rate else None,
                )
            )
    flat = plateau_end(params)
    if flat > 0:
        segments.append(Segment(t_start=0.0, t_end=flat, kind="constant", value=1.0))
    segments.append(
        Segment(t_start=flat, t_end=math.inf, kind="exponential", value_at_start=1.0, exponent_slope=params.alpha)
    )
    B = BiddingFunction(
        segments=segments,
        tail_mass=params.r * q_beyond,
        tail_mass_bound=params.r * family.q[k_max],
        reference_point=0.0,
    )
    log.info(
        "algorithm_a_built r=%s regime=%s k_max=%s tail_bound=%.3g",
        params.r,
        params.regime,
        k_max,
        B.tail_mass_bound,
    )
    return B


def verify_delay_ode(B: BiddingFunction, r: float, grid: GridSpec | None = None) -> float:
    """Largest relative residual |R A'(t) - A(t+1)| / A(t+1) over non-integer t < 0."""
    grid = grid or GridSpec()
    lo = max(-20.0, B.t_first)
    count = max(2, int(round(-lo * min(grid.points_per_unit, 512))))
    ts = np.linspace(lo, 0.0, count, endpoint=False)[1:]
    bps = B.breakpoints()
    near = np.min(np.abs(ts[:, None] - bps[None, :]), axis=1) < 1e-9
    near |= np.min(np.abs(ts[:, None] + 1.0 - bps[None, :]), axis=1) < 1e-9
    ts = ts[~near]
    ahead = np.asarray(values(B, ts + 1.0))
    residual = np.abs(r * np.asarray(derivative(B, ts)) - ahead) / ahead
    return float(np.max(residual))


def predicted_consistency(params: RegimeParams) -> float:
    if params.regime == "Large":
        return params.r - params.w_hi
    return params.r / (2.0 - float(params.y))


def evaluate_guarantees(
    r: float,
    grid: GridSpec | None = None,
    cfg: SolverConfig | None = None,
) -> tuple[float, float, float]:
    """(measured consistency, predicted consistency, measured robustness)."""
    params = regime_params(r, cfg)
    extrema = consistency_robustness(build_algorithm_a(params.r, cfg=cfg), grid)
    predicted = predicted_consistency(params)
    log.info(
        "guarantees_checked r=%s cons=%.12g predicted=%.12g rob=%.12g",
        params.r,
        extrema.cons,
        predicted,
        extrema.rob,
    )
    return extrema.cons, predicted, extrema.rob


def asymptotic_consistency_curve(
    eps_list: list[float],
    grid: GridSpec | None = None,
) -> list[tuple[float, float, float]]:
    """Measured consistency at R = e + eps next to e - (2e)^{3/4} eps^{1/4}."""
    limit = TWO_OVER_LN2 - E
    rows = []
    for eps in eps_list:
        if not 0.0 <= eps <= limit:
            raise ValueError(f"eps {eps} outside [0, {limit}]")
        cons, _, _ = evaluate_guarantees(E + eps, grid)
        rows.append((eps, cons, E - (2.0 * E) ** 0.75 * eps**0.25))
    return rows


def tau_sequence(alpha: float, n: int) -> list[float]:
    """tau_k = e^alpha - sum_{j<=k} alpha^j/j! for k = 1..n, as tail sums."""
    terms = [1.0]
    for j in range(1, n + 60):
        terms.append(terms[-1] * alpha / j)
    tails = np.cumsum(terms[::-1])[::-1]
    return [float(tails[k + 1]) for k in range(1, n + 1)]


def denominator_series(alpha: float, n: int) -> list[float]:
    """Coefficients 0..n of (e^{alpha z} - z e^alpha) / (1 - z), i.e. 1 - sum tau_k z^k."""
    coefficients = []
    partial = 0.0
    term = 1.0
    for j in range(n + 1):
        partial += term - (math.exp(alpha) if j == 1 else 0.0)
        coefficients.append(partial)
        term *= alpha / (j + 1)
    return coefficients


def _reciprocal(tau: list[float], n: int) -> list[float]:
    # coefficients of 1 / (1 - sum tau_k z^k)
    g = [1.0]
    for m in range(1, n + 1):
        g.append(math.fsum(tau[j - 1] * g[m - j] for j in range(1, m + 1)))
    return g


def generating_q(r: float, n: int, cfg: SolverConfig | None = None) -> list[float]:
    """q_0..q_n read off the generating function of the delay polynomials.

    Large regime: e^{alpha k} q_k are the coefficients of 1 / (1 - sum tau_k z^k).
    Small regime: they are the coefficients of J(z) / D(z) with
    J(z) = theta z - sum_{j>=2} sigma_j z^j, and 1/D obtained from the same
    reciprocal by a running sum.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    params = regime_params(r, cfg)
    g = _reciprocal(tau_sequence(params.alpha, n), n)
    if params.regime == "Large":
        h = g
    else:
        y = float(params.y)
        inv_d = np.cumsum(g).tolist()
        theta = 1.0 + y - params.alpha
        y_tail = tau_sequence(y, n)
        sigma = {j: y_tail[j - 1] + params.alpha**j / math.factorial(j) for j in range(2, n + 1)}
        h = [1.0]
        for k in range(1, n + 1):
            h.append(math.fsum([theta * inv_d[k - 1]] + [-sigma[j] * inv_d[k - j] for j in range(2, k + 1)]))
    return [h[m] * math.exp(-params.alpha * m) for m in range(n + 1)]


def write_qk_csv(family: PolynomialFamily, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "q_k"])
        for k, value in enumerate(family.q):
            writer.writerow([k, f"{value:.17g}"])
    log.info("qk_written path=%s rows=%s", path, len(family.q))
    return path
