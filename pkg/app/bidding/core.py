from __future__ import annotations

import math

import numpy as np

from app.errors import ThresholdOutOfRangeError
from app.models.functions import (
    KIND_EXPONENTIAL,
    BiddingFunction,
    segment_derivatives,
    segment_masses,
    segment_values,
)
from app.numerics.roots import find_root_bracketed

ArrayLike = float | np.ndarray


def _prepare(B: BiddingFunction, t: ArrayLike, left: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Map points to (segment index, local offset, scale, valid mask).

    Points below the window are folded upward by whole periods when the
    function declares a tail growth factor.
    """
    tab = B.table
    tt = np.array(t, dtype=float, copy=True).ravel()
    scale = np.ones_like(tt)
    below = tt <= B.t_first if left else tt < B.t_first
    if below.any() and B.tail_growth is not None:
        gap = B.t_first - tt[below]
        steps = np.floor(gap) + 1.0 if left else np.ceil(gap)
        tt[below] = tt[below] + steps
        scale[below] = B.tail_growth ** (-steps)
    side = "left" if left else "right"
    idx = np.searchsorted(tab.starts, tt, side=side) - 1
    safe_idx = np.clip(idx, 0, len(tab.starts) - 1)
    ends = tab.ends[safe_idx]
    inside_end = tt <= ends if left else tt < ends
    valid = (idx >= 0) & inside_end & np.isfinite(tt)
    u = np.where(valid, tt - tab.starts[safe_idx], 0.0)
    return safe_idx, u, scale, valid


def _finish(out: np.ndarray, t: ArrayLike) -> ArrayLike:
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(np.shape(t))


def values(B: BiddingFunction, t: ArrayLike, left: bool = False) -> ArrayLike:
    """B(t), right-continuous by default; ``left=True`` gives B(t-)."""
    tab = B.table
    idx, u, scale, valid = _prepare(B, t, left)
    out = np.full(idx.shape, np.nan)
    if valid.any():
        out[valid] = scale[valid] * segment_values(
            tab.kinds, tab.base, tab.slope, tab.coef, tab.exp_coef, tab.exp_rate, idx[valid], u[valid]
        )
    return _finish(out, t)


def derivative(B: BiddingFunction, t: ArrayLike, left: bool = False) -> ArrayLike:
    tab = B.table
    idx, u, scale, valid = _prepare(B, t, left)
    out = np.full(idx.shape, np.nan)
    if valid.any():
        out[valid] = scale[valid] * segment_derivatives(
            tab.kinds, tab.base, tab.slope, tab.coef, tab.exp_coef, tab.exp_rate, idx[valid], u[valid]
        )
    return _finish(out, t)


def cumulative_mass(B: BiddingFunction, t: ArrayLike) -> ArrayLike:
    """F(t), the integral of B over (-inf, t].

    Absolute error is at most ``B.tail_mass_bound`` when ``tail_mass`` is not exact.
    """
    tab = B.table
    idx, u, scale, valid = _prepare(B, t, left=False)
    out = np.full(idx.shape, np.nan)
    if valid.any():
        j = idx[valid]
        inner = segment_masses(tab.kinds, tab.base, tab.slope, tab.integ, tab.exp_coef, tab.exp_rate, j, u[valid])
        out[valid] = scale[valid] * (tab.cum_start[j] + inner)
    return _finish(out, t)


def normalized_mass(B: BiddingFunction, t: ArrayLike, left: bool = False) -> ArrayLike:
    """CR_B(t) = F(t+1) / B(t)."""
    ahead = np.asarray(t, dtype=float) + 1.0
    return cumulative_mass(B, ahead if np.ndim(t) else float(ahead)) / values(B, t, left=left)


def work(B: BiddingFunction, t: ArrayLike, left: bool = False) -> ArrayLike:
    """w_B(t) = F(t) / B(t)."""
    return cumulative_mass(B, t) / values(B, t, left=left)


def inverse(B: BiddingFunction, u: float) -> float:
    """Generalized inverse inf{t : B(t) >= u}."""
    if not u > 0:
        raise ThresholdOutOfRangeError(f"threshold {u} must be positive")
    tab = B.table
    if u <= tab.start_values[0]:
        if u == tab.start_values[0]:
            return B.t_first
        if B.tail_growth is None:
            raise ThresholdOutOfRangeError(f"threshold {u} below B(t_first)={tab.start_values[0]}")
        steps = math.ceil(math.log(tab.start_values[0] / u) / math.log(B.tail_growth))
        return inverse(B, u * B.tail_growth**steps) - steps
    reach = np.maximum(tab.start_values, tab.end_values)
    hits = np.flatnonzero(reach >= u)
    if hits.size == 0:
        raise ThresholdOutOfRangeError(f"threshold {u} above the represented horizon t={B.t_last}")
    j = int(hits[0])
    if tab.start_values[j] >= u:
        return float(tab.starts[j])
    length = tab.ends[j] - tab.starts[j]
    if tab.kinds[j] == KIND_EXPONENTIAL:
        return float(tab.starts[j] + math.log(u / tab.base[j]) / tab.slope[j])
    seg_idx = np.array([j])

    def gap(s: float) -> float:
        val = segment_values(
            tab.kinds, tab.base, tab.slope, tab.coef, tab.exp_coef, tab.exp_rate, seg_idx, np.array([s])
        )
        return float(val[0]) - u

    return float(tab.starts[j] + find_root_bracketed(gap, 0.0, float(length)))


def scaled(B: BiddingFunction, factor: float) -> BiddingFunction:
    """t -> factor * B(t)."""
    segments = []
    for seg in B.segments:
        update: dict[str, object] = {}
        if seg.kind == "exponential":
            update["value_at_start"] = seg.value_at_start * factor
        elif seg.kind == "constant":
            update["value"] = seg.value * factor
        else:
            update["coefficients"] = [c * factor for c in seg.coefficients]
            if seg.exp_coef is not None:
                update["exp_coef"] = seg.exp_coef * factor
        segments.append(seg.model_copy(update=update))
    # a fresh instance, so the cached segment table is rebuilt
    return BiddingFunction(
        segments=segments,
        tail_mass=B.tail_mass * factor,
        tail_mass_bound=B.tail_mass_bound * factor,
        tail_growth=B.tail_growth,
        reference_point=B.reference_point,
    )


def shifted(B: BiddingFunction, c: float) -> BiddingFunction:
    """t -> B(t + c)."""
    segments = [seg.model_copy(update={"t_start": seg.t_start - c, "t_end": seg.t_end - c}) for seg in B.segments]
    return BiddingFunction(
        segments=segments,
        tail_mass=B.tail_mass,
        tail_mass_bound=B.tail_mass_bound,
        tail_growth=B.tail_growth,
        reference_point=B.reference_point - c,
    )


def shift_to_prediction(B: BiddingFunction, u_hat: float, t_star: float | None = None) -> BiddingFunction:
    """Rescale B so that the consistency point maps to the prediction u_hat."""
    t_star = B.reference_point if t_star is None else t_star
    return scaled(B, u_hat / values(B, t_star))


def check_shape(B: BiddingFunction, points_per_segment: int = 64, rel_tol: float = 1e-12) -> None:
    """Positivity and monotonicity on a dense grid plus both sides of every breakpoint."""
    tab = B.table
    for j, seg in enumerate(B.segments):
        if tab.start_values[j] <= 0:
            raise ValueError(f"segment {j} starts at a nonpositive value")
        if seg.kind != "polynomial":
            continue
        length = seg.t_end - seg.t_start
        s = np.linspace(0.0, length, points_per_segment)
        idx = np.full(s.shape, j)
        vals = segment_values(tab.kinds, tab.base, tab.slope, tab.coef, tab.exp_coef, tab.exp_rate, idx, s)
        if np.any(vals <= 0):
            raise ValueError(f"segment {j} is not positive on [{seg.t_start}, {seg.t_end})")
        if np.any(np.diff(vals) < -rel_tol * np.abs(vals[1:])):
            raise ValueError(f"segment {j} decreases on [{seg.t_start}, {seg.t_end})")
    jumps = tab.start_values[1:] - tab.end_values[:-1]
    if np.any(jumps < -rel_tol * np.abs(tab.end_values[:-1])):
        bad = int(np.flatnonzero(jumps < -rel_tol * np.abs(tab.end_values[:-1]))[0]) + 1
        raise ValueError(f"function decreases across breakpoint t={tab.starts[bad]}")

