from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from app.bidding.core import normalized_mass
from app.models.core import ExtremaResult, GridSpec
from app.models.functions import BiddingFunction

log = logging.getLogger(__name__)


def evaluation_window(B: BiddingFunction, grid: GridSpec) -> tuple[float, float]:
    lo = B.reference_point - grid.half_width
    hi = B.reference_point + grid.half_width
    if B.tail_growth is None:
        lo = max(lo, B.t_first)
    if math.isfinite(B.t_last):
        hi = min(hi, B.t_last - 1.0)
    if not hi > lo:
        raise ValueError(f"empty evaluation window [{lo}, {hi}]")
    return lo, hi


def grid_points(B: BiddingFunction, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grid over the evaluation window plus the breakpoints inside it."""
    lo, hi = evaluation_window(B, grid)
    count = int(round((hi - lo) * grid.points_per_unit)) + 1
    ts = np.linspace(lo, hi, count)
    bps = B.breakpoints()
    bps = bps[(bps >= lo) & (bps <= hi)]
    return ts, bps


def _refine(B: BiddingFunction, ts: np.ndarray, i: int, sign: float) -> tuple[float, float]:
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, ts.size - 1)]
    if not hi > lo:
        return float(ts[i]), float(sign * normalized_mass(B, float(ts[i])))
    result = minimize_scalar(
        lambda t: sign * normalized_mass(B, float(t)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(result.x), float(result.fun)


def _neighbour_gap(cr: np.ndarray, i: int) -> float:
    gaps = [abs(cr[j] - cr[i]) for j in (i - 1, i + 1) if 0 <= j < cr.size and not np.isnan(cr[j])]
    return 0.5 * float(min(gaps)) if gaps else 0.0


def consistency_robustness(B: BiddingFunction, grid: GridSpec | None = None) -> ExtremaResult:
    """Infimum and supremum of the normalized mass over the grid.

    Left limits are taken at every breakpoint; interior grid extrema are
    polished with a bounded scalar search.
    """
    grid = grid or GridSpec()
    ts, bps = grid_points(B, grid)
    cr = np.asarray(normalized_mass(B, ts))
    cr_right = np.asarray(normalized_mass(B, bps)) if bps.size else np.empty(0)
    cr_left = np.asarray(normalized_mass(B, bps, left=True)) if bps.size else np.empty(0)

    points = np.concatenate((ts, bps, bps))
    vals = np.concatenate((cr, cr_right, cr_left))
    if np.all(np.isnan(vals)):
        raise ValueError("normalized mass undefined on the whole grid")
    i_min = int(np.nanargmin(vals))
    i_max = int(np.nanargmax(vals))
    cons, rob = float(vals[i_min]), float(vals[i_max])
    arg_min, arg_max = float(points[i_min]), float(points[i_max])
    cons_err = rob_err = 0.0

    if i_min < ts.size:
        cons_err = _neighbour_gap(cr, i_min)
        if grid.refine:
            t_ref, v_ref = _refine(B, ts, i_min, 1.0)
            if v_ref < cons:
                cons_err = cons - v_ref
                cons, arg_min = v_ref, t_ref
    if i_max < ts.size:
        rob_err = _neighbour_gap(cr, i_max)
        if grid.refine:
            t_ref, v_ref = _refine(B, ts, i_max, -1.0)
            if -v_ref > rob:
                rob_err = -v_ref - rob
                rob, arg_max = -v_ref, t_ref

    log.debug(
        "extrema_done cons=%.12g at=%.6g rob=%.12g at=%.6g points=%s",
        cons,
        arg_min,
        rob,
        arg_max,
        points.size,
    )
    return ExtremaResult(
        cons=cons,
        rob=rob,
        argmin_t=arg_min,
        argmax_t=arg_max,
        cons_error=cons_err,
        rob_error=rob_err,
    )
