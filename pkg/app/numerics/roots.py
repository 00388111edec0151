from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from app.errors import NonConvergenceError, NoSignChangeError, RobustnessBelowEError
from app.models.core import SolverConfig, WorkBounds

log = logging.getLogger(__name__)

E = math.e
TWO_OVER_LN2 = 2.0 / math.log(2.0)
_MIN_RTOL = 4 * np.finfo(float).eps


def find_root_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: SolverConfig | None = None,
) -> float:
    """Root of ``f`` inside [lo, hi] by Brent's method.

    Raises:
        NoSignChangeError: if f(lo) and f(hi) share a strict sign.
        NonConvergenceError: if the iteration cap is hit.
    """
    cfg = cfg or SolverConfig()
    f_lo = float(f(lo))
    f_hi = float(f(hi))
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if math.isnan(f_lo) or math.isnan(f_hi) or (f_lo > 0) == (f_hi > 0):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f(lo)={f_lo} f(hi)={f_hi}")
    root, result = brentq(
        f,
        lo,
        hi,
        xtol=cfg.abs_tol,
        rtol=max(cfg.rel_tol, _MIN_RTOL),
        maxiter=cfg.max_iter,
        full_output=True,
        disp=False,
    )
    if not result.converged:
        raise NonConvergenceError(f"root search on [{lo}, {hi}] stopped after {result.iterations} iterations")
    return float(root)


def check_robustness(r: float, cfg: SolverConfig | None = None) -> float:
    """Validate r >= e, clamping values within abs_tol below e to e."""
    cfg = cfg or SolverConfig()
    if math.isnan(r) or r < E - cfg.abs_tol:
        raise RobustnessBelowEError(f"robustness {r} is below e")
    if r < E:
        log.debug("robustness_clamped r=%s to=e", r)
        return E
    return float(r)


def solve_work_bounds(r: float, cfg: SolverConfig | None = None) -> WorkBounds:
    """Both roots of w * exp(1/w) = r, solved as ln w + 1/w = ln r."""
    cfg = cfg or SolverConfig()
    r = check_robustness(r, cfg)
    if r == E:
        return WorkBounds(r=r, w_lo=1.0, w_hi=1.0)
    log_r = math.log(r)

    def phi(w: float) -> float:
        return math.log(w) + 1.0 / w - log_r

    # x - ln(2x) > 0 for every x > 0, so phi(1/(2 ln r)) > 0
    w_lo = find_root_bracketed(phi, 1.0 / (2.0 * log_r), 1.0, cfg)
    w_hi = find_root_bracketed(phi, 1.0, r, cfg)
    return WorkBounds(r=r, w_lo=w_lo, w_hi=w_hi)


def w_hi(r: float, cfg: SolverConfig | None = None) -> float:
    return solve_work_bounds(r, cfg).w_hi


@lru_cache(maxsize=8)
def solve_r0(cfg: SolverConfig | None = None) -> float:
    """Robustness at which the two work bounds are one unit apart."""
    cfg = cfg or SolverConfig()

    def gap(r: float) -> float:
        bounds = solve_work_bounds(r, cfg)
        return bounds.w_hi - bounds.w_lo - 1.0

    return find_root_bracketed(gap, E, 4.0, cfg)


def expm1_over(ell: float, x: float = 1.0) -> float:
    """(e^{x*ell} - 1)/ell with the ell -> 0 limit x."""
    if ell == 0.0:
        return x
    return math.expm1(x * ell) / ell
