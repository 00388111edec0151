from __future__ import annotations

import logging
import math

from app.errors import ConsistencyOutOfRangeError
from app.models.core import SolverConfig
from app.models.functions import BiddingFunction, Segment
from app.models.tradeoff import ClassDParams
from app.numerics.roots import E, check_robustness, expm1_over, find_root_bracketed

log = logging.getLogger(__name__)

# the explicit window starts where the remaining mass is below this fraction of F(0)
TAIL_FRACTION = 1e-10
_TAIL_LOG = math.log(1.0 / TAIL_FRACTION)


def class_e(w: float) -> BiddingFunction:
    """B(t) = e^{t/w}; the normalized mass is w * e^{1/w} everywhere."""
    if not w > 0:
        raise ValueError(f"w must be positive, got {w}")
    t0 = -w * _TAIL_LOG
    v0 = math.exp(t0 / w)
    return BiddingFunction(
        segments=[Segment(t_start=t0, t_end=math.inf, kind="exponential", value_at_start=v0, exponent_slope=1.0 / w)],
        tail_mass=w * v0,
        tail_growth=math.exp(1.0 / w),
        reference_point=0.0,
    )


def _period_mass(ell: float) -> float:
    return expm1_over(ell)


def _period_growth(growth: float) -> float:
    # integral ratios such as doubling are kept exact so bid levels are exact powers
    base = math.exp(growth)
    nearest = round(base)
    if nearest >= 2 and abs(base - nearest) <= 1e-12 * base:
        return float(nearest)
    return base


def class_d(p: ClassDParams, periods: int | None = None) -> BiddingFunction:
    """B(t) = exp(floor(t)(l+h) + frac(t) l) on a window of whole periods around 0."""
    growth = p.ell + p.h
    base = _period_growth(growth)
    below = periods or max(1, math.ceil(_TAIL_LOG / growth))
    above = periods or max(40, below)
    segments = []
    for i in range(-below, above):
        start = base**i
        if p.ell > 0:
            seg = Segment(
                t_start=float(i), t_end=float(i + 1), kind="exponential", value_at_start=start, exponent_slope=p.ell
            )
        else:
            seg = Segment(t_start=float(i), t_end=float(i + 1), kind="constant", value=start)
        segments.append(seg)
    # F(-N) = B(-N) * m(l) / (e^{l+h} - 1)
    tail = base**-below * _period_mass(p.ell) / (base - 1.0)
    return BiddingFunction(
        segments=segments,
        tail_mass=tail,
        tail_growth=base,
        reference_point=0.0,
    )


def class_d_tradeoff(p: ClassDParams) -> tuple[float, float]:
    """Closed-form (cons, rob): cons = CR(0), rob = lim CR(t) as t -> 1-."""
    growth = p.ell + p.h
    work_at_zero = _period_mass(p.ell) / math.expm1(growth)
    cons = work_at_zero * math.exp(growth)
    return cons, cons * math.exp(p.h)


def _pareto_series(ell: float, terms: int = 40) -> float:
    # sum_i (3 + 2i)/(i + 2)! ell^i ; equals 3/2 at 0 and e at 1
    total = 0.0
    term_fact = 2.0
    power = 1.0
    for i in range(terms):
        total += (3 + 2 * i) / term_fact * power
        power *= ell
        term_fact *= i + 3
    return total


def class_d_pareto(c: float, cfg: SolverConfig | None = None) -> tuple[ClassDParams, float]:
    """Best class-D robustness for consistency c in (1, e]."""
    if not 1.0 < c <= E + 1e-12:
        raise ConsistencyOutOfRangeError(f"consistency {c} outside (1, e]")
    c = min(c, E)
    if c <= 1.5:
        h = math.log(c / (c - 1.0))
        return ClassDParams(ell=0.0, h=h), c * c / (c - 1.0)
    if _pareto_series(1.0) <= c:
        ell = 1.0
    else:
        ell = find_root_bracketed(lambda x: _pareto_series(x) - c, 0.0, 1.0, cfg)
    if ell == 0.0:
        return ClassDParams(ell=0.0, h=math.log(c / (c - 1.0))), c * c / (c - 1.0)
    denom = ell * c - math.expm1(ell)
    ratio = ell * c * math.exp(-ell) / denom
    h = max(0.0, math.log(ratio))
    return ClassDParams(ell=ell, h=h), c * ratio


def class_d_best(r: float, cfg: SolverConfig | None = None) -> tuple[ClassDParams, float]:
    """Smallest class-D consistency whose robustness is at most r."""
    r = check_robustness(r, cfg)
    if r >= 4.5:
        c = (r - math.sqrt(r * r - 4.0 * r)) / 2.0
        return ClassDParams(ell=0.0, h=math.log(c / (c - 1.0))), c
    if r == E:
        return ClassDParams(ell=1.0, h=0.0), E
    c = find_root_bracketed(lambda x: class_d_pareto(x, cfg)[1] - r, 1.5, E, cfg)
    params, _ = class_d_pareto(c, cfg)
    log.debug("class_d_best r=%s c=%s ell=%s h=%s", r, c, params.ell, params.h)
    return params, c
