from __future__ import annotations

import logging
import math

import numpy as np

from app.bidding.extrema import consistency_robustness
from app.errors import DivergentTailError
from app.models.core import GridSpec, SolverConfig
from app.models.functions import BiddingFunction, Segment
from app.models.tradeoff import SlopeSequence
from app.numerics.roots import check_robustness, expm1_over, find_root_bracketed, solve_r0, solve_work_bounds
from app.strategies.classes import TAIL_FRACTION

log = logging.getLogger(__name__)


def next_work(w: float, ell: float) -> float:
    """g(w, l) = e^{-l} (w + (e^l - 1)/l): work one period later."""
    return math.exp(-ell) * (w + expm1_over(ell))


def integer_works(s: SlopeSequence, i_lo: int, i_hi: int) -> dict[int, float]:
    """w_i for i in [i_lo, i_hi]; w_i = 1/left_slope below i_min."""
    if s.left_slope <= 0:
        raise DivergentTailError("left-tail slope is zero, the integral below diverges")
    start = min(i_lo, s.i_min)
    works = {start: 1.0 / s.left_slope}
    w = works[start]
    for i in range(start, i_hi):
        w = 1.0 / s.left_slope if i + 1 <= s.i_min else next_work(w, s.slope(i))
        works[i + 1] = w
    return {i: works[i] for i in range(i_lo, i_hi + 1)}


def class_i_mass(s: SlopeSequence, t: float | np.ndarray) -> float | np.ndarray:
    """CR(t) = e^{(1-f) l_i} (w_{i+1} + (e^{f l_{i+1}} - 1)/l_{i+1}), i = floor(t), f = frac(t)."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    floors = np.floor(tt).astype(np.int64)
    works = integer_works(s, int(floors.min()), int(floors.max()) + 1)
    out = np.empty_like(tt)
    for k, (i, x) in enumerate(zip(floors.tolist(), tt.tolist())):
        f = x - i
        here, ahead = s.slope(i), s.slope(i + 1)
        out[k] = math.exp((1.0 - f) * here) * (works[i + 1] + expm1_over(ahead, f))
    if np.ndim(t) == 0:
        return float(out[0])
    return out


def class_i_function(s: SlopeSequence) -> BiddingFunction:
    """Piecewise exponential B with B(0) = 1 and slope l_i on [i, i+1)."""
    if s.left_slope <= 0 or s.right_slope <= 0:
        raise DivergentTailError("class-I functions need positive asymptotic slopes")
    lead = math.ceil(math.log(1.0 / TAIL_FRACTION) / s.left_slope) + 1
    t0 = s.i_min - lead
    log_b = {0: 0.0}
    for i in range(0, s.i_max + 2):
        log_b[i + 1] = log_b[i] + s.slope(i)
    for i in range(0, s.i_min - 1, -1):
        log_b[i - 1] = log_b[i] - s.slope(i - 1)
    # B(i_min) from the recorded integer values, then the left run down to t0
    b_imin = math.exp(log_b[s.i_min])
    segments = [
        Segment(
            t_start=float(t0),
            t_end=float(s.i_min),
            kind="exponential",
            value_at_start=b_imin * math.exp(-lead * s.left_slope),
            exponent_slope=s.left_slope,
        )
    ]
    for i in range(s.i_min, s.i_max + 1):
        ell = s.slope(i)
        value = math.exp(log_b[i])
        if ell > 0:
            segments.append(
                Segment(t_start=float(i), t_end=float(i + 1), kind="exponential", value_at_start=value, exponent_slope=ell)
            )
        else:
            segments.append(Segment(t_start=float(i), t_end=float(i + 1), kind="constant", value=value))
    segments.append(
        Segment(
            t_start=float(s.i_max + 1),
            t_end=math.inf,
            kind="exponential",
            value_at_start=math.exp(log_b[s.i_max + 1]),
            exponent_slope=s.right_slope,
        )
    )
    first = segments[0].value_at_start
    return BiddingFunction(
        segments=segments,
        tail_mass=first / s.left_slope,
        tail_growth=math.exp(s.left_slope),
        reference_point=0.0,
    )


def pareto_slopes(r: float, cfg: SolverConfig | None = None) -> tuple[SlopeSequence, float]:
    """Slopes of the R-robust class-I function with the best consistency, and that consistency."""
    r = check_robustness(r, cfg)
    bounds = solve_work_bounds(r, cfg)
    w_lo, w_hi = bounds.w_lo, bounds.w_hi
    r0 = solve_r0(cfg)
    if r >= r0:
        ell_star = 0.0
        c = w_lo + 1.0
    elif w_lo == w_hi:
        ell_star = 1.0
        c = w_lo + expm1_over(ell_star)
    else:
        ell_star = find_root_bracketed(lambda ell: next_work(w_lo, ell) - w_hi, 0.0, 1.0 / w_lo, cfg)
        c = w_lo + expm1_over(ell_star)
    slopes = SlopeSequence(
        slopes={0: ell_star},
        left_slope=1.0 / w_lo,
        right_slope=1.0 / w_hi,
        i_min=0,
        i_max=0,
    )
    return slopes, c


def class_i_pareto(
    r: float,
    cfg: SolverConfig | None = None,
    grid: GridSpec | None = None,
    verify: bool = True,
) -> tuple[BiddingFunction, float]:
    slopes, c = pareto_slopes(r, cfg)
    B = class_i_function(slopes)
    if verify:
        extrema = consistency_robustness(B, grid)
        if extrema.rob > r * (1 + 1e-6):
            log.warning("class_i_not_robust r=%s measured_rob=%s", r, extrema.rob)
        log.info("class_i_built r=%s c=%s measured_cons=%s measured_rob=%s", r, c, extrema.cons, extrema.rob)
    return B, c
