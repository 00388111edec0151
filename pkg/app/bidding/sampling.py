from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.bidding.core import inverse, values
from app.errors import ThresholdOutOfRangeError
from app.models.functions import BidSequenceSample, BiddingFunction

log = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    """PCG64 stream for ``seed``; ``spawn_key`` selects an independent child stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)))


def _check_threshold(B: BiddingFunction, threshold: float) -> None:
    low = float(values(B, B.t_first))
    if threshold < low:
        raise ThresholdOutOfRangeError(f"threshold {threshold} below B(t_first)={low}")
    if math.isfinite(B.t_last):
        high = float(values(B, B.t_last - 1.0))
        if threshold > high:
            raise ThresholdOutOfRangeError(f"threshold {threshold} above B(horizon - 1)={high}")


def _tail_for(B: BiddingFunction, first_bid: np.ndarray | float) -> np.ndarray | float:
    # bids below the window: exact geometric sum when the tail is self-similar
    if B.tail_growth is not None:
        return first_bid / (B.tail_growth - 1.0)
    return B.tail_mass + 0.0 * first_bid


def sample_sequence(
    B: BiddingFunction,
    rng_seed: int,
    threshold: float,
    lam: float | None = None,
) -> tuple[BidSequenceSample, float]:
    """Bids B(i + lam) from the window start until the first bid >= threshold.

    Returns the emitted sample and its cost, which includes the correction for
    bids below the window.
    """
    _check_threshold(B, threshold)
    if lam is None:
        lam = float(make_rng(rng_seed).random())
    i_min = math.ceil(B.t_first - lam)
    i_stop = math.ceil(inverse(B, threshold) - lam)
    last = i_stop + 1
    if math.isfinite(B.t_last):
        last = min(last, math.ceil(B.t_last - lam) - 1)
    index = np.arange(i_min, last + 1)
    bids = np.asarray(values(B, index + lam))
    hit = np.flatnonzero(bids >= threshold)
    if hit.size == 0:
        raise ThresholdOutOfRangeError(f"no bid reaches threshold {threshold} inside the window")
    stop = int(hit[0])
    emitted = bids[: stop + 1]
    cost = math.fsum(emitted.tolist()) + float(_tail_for(B, float(emitted[0])))
    sample = BidSequenceSample(lam=lam, bids=emitted.tolist(), window=(i_min, i_min + stop))
    log.debug("sample_drawn seed=%s lam=%.6f bids=%s cost=%.12g", rng_seed, lam, emitted.size, cost)
    return sample, cost


def normalized_costs(B: BiddingFunction, thresholds: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """cost(X_B, u)/u for paired draws, evaluated on one bid matrix."""
    u = np.asarray(thresholds, dtype=float)
    lam = np.asarray(lams, dtype=float)
    t_lo = B.t_first
    u_min = float(u.min())
    if u_min < float(values(B, B.t_first)):
        if B.tail_growth is None:
            raise ThresholdOutOfRangeError(f"threshold {u_min} below the represented window")
        t_lo = math.floor(inverse(B, u_min)) - 1.0
    t_hi = inverse(B, float(u.max()))
    if math.isfinite(B.t_last) and t_hi + 1.0 > B.t_last:
        raise ThresholdOutOfRangeError(f"threshold {float(u.max())} too close to the horizon t={B.t_last}")

    cols = np.arange(math.ceil(t_lo - 1.0), math.ceil(t_hi) + 2)
    tmat = cols[None, :] + lam[:, None]
    inside = tmat >= t_lo
    bidmat = np.where(inside, values(B, np.where(inside, tmat, t_lo)), 0.0)
    hit = bidmat >= u[:, None]
    stop = hit.argmax(axis=1)
    rows = np.arange(u.size)
    if not hit[rows, stop].all():
        raise ThresholdOutOfRangeError("some thresholds are not reached inside the window")
    spent = np.cumsum(bidmat, axis=1)[rows, stop]
    first = bidmat[rows, inside.argmax(axis=1)]
    return (spent + _tail_for(B, first)) / u


def chunk_sizes(n_trials: int, chunk: int) -> list[int]:
    full, rest = divmod(n_trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def expected_normalized_cost(
    B: BiddingFunction,
    threshold: float,
    n_trials: int,
    seed: int,
    chunk: int = 16384,
    threads: int = 1,
) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of cost/threshold over seeded lambda draws."""
    sizes = chunk_sizes(n_trials, chunk)

    def run(index: int) -> np.ndarray:
        lam = make_rng(seed, index).random(sizes[index])
        return normalized_costs(B, np.full(sizes[index], threshold), lam)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(run, range(len(sizes))))
    nc = np.concatenate(parts)
    return float(np.mean(nc)), float(np.std(nc, ddof=1) / math.sqrt(nc.size))
