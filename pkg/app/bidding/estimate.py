from __future__ import annotations

import logging
import math

import numpy as np

from app.errors import InsufficientSamplesError
from app.models.functions import BidSequenceSample, BiddingFunction, Segment

log = logging.getLogger(__name__)

MIN_SAMPLES = 1000


def _coverage(samples: list[BidSequenceSample]) -> tuple[float, float]:
    lo = max(s.bids[0] for s in samples)
    hi = min(s.bids[-1] for s in samples)
    return lo, hi


def empirical_mass(samples: list[BidSequenceSample], v: float) -> float:
    """Signed mean count of bids between 1 and v.

    Counts bids in [1, v) for v >= 1 and minus the bids in [v, 1) for v < 1.
    """
    if v >= 1.0:
        total = sum(sum(1 for b in s.bids if 1.0 <= b < v) for s in samples)
        return total / len(samples)
    total = sum(sum(1 for b in s.bids if v <= b < 1.0) for s in samples)
    return -total / len(samples)


def estimate_function_from_samples(
    samples: list[BidSequenceSample],
    max_segments: int = 4096,
) -> BiddingFunction:
    """Generalized inverse of the empirical mean bid count, as a step function.

    Only values inside the range every sample covers are used.
    """
    if len(samples) < MIN_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    count = len(samples)
    v_lo, v_hi = _coverage(samples)
    if not v_hi > v_lo:
        raise InsufficientSamplesError(f"samples share no common value range ({v_lo} >= {v_hi})")

    pooled = np.sort(np.concatenate([np.asarray(s.bids, dtype=float) for s in samples]))
    below = pooled[pooled < v_lo]
    z = pooled[(pooled >= v_lo) & (pooled <= v_hi)]
    anchor = int(np.searchsorted(z, 1.0, side="left"))

    # B(t) = z_j on [(j-1-anchor)/count, (j-anchor)/count) for j = 1..len(z)
    stride = max(1, math.ceil(z.size / max_segments))
    starts = np.arange(0, z.size, stride)
    t_edges = np.append(starts, z.size).astype(float)
    t_edges = (t_edges - anchor) / count
    step_values = z[starts]

    segments: list[Segment] = []
    for j, value in enumerate(step_values):
        t0, t1 = float(t_edges[j]), float(t_edges[j + 1])
        if segments and segments[-1].value == value:
            segments[-1] = segments[-1].model_copy(update={"t_end": t1})
            continue
        segments.append(Segment(t_start=t0, t_end=t1, kind="constant", value=float(value)))
    tail = float(below.sum()) / count
    log.info(
        "function_estimated samples=%s bids=%s segments=%s range=[%.6g, %.6g]",
        count,
        z.size,
        len(segments),
        v_lo,
        v_hi,
    )
    return BiddingFunction(segments=segments, tail_mass=tail, tail_mass_bound=tail, reference_point=0.0)
