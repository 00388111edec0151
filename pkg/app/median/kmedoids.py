from __future__ import annotations

import logging
import math

import numpy as np
from scipy import sparse

from app.bidding.sampling import make_rng
from app.models.graphs import MedoidSolution

log = logging.getLogger(__name__)

MAX_SWAPS = 10_000


def assignment_cost(dist: np.ndarray, facilities: list[int] | frozenset[int]) -> float:
    """Sum over vertices of the distance to the closest facility."""
    chosen = sorted(facilities)
    if not chosen:
        return math.inf
    return float(dist[chosen].min(axis=0).sum())


def _nearest_two(dist: np.ndarray, medoids: list[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sub = dist[medoids]
    if len(medoids) == 1:
        return sub[0], np.full(sub.shape[1], math.inf), np.zeros(sub.shape[1], dtype=np.int64)
    part = np.argpartition(sub, 1, axis=0)[:2]
    cols = np.arange(sub.shape[1])
    return sub[part[0], cols], sub[part[1], cols], part[0]


def seed_medoids(dist: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    """Greedy k-means++ seeding: draw candidates by distance, keep the one that lowers cost most."""
    n = dist.shape[0]
    first = int(rng.integers(n))
    medoids = [first]
    closest = dist[first].copy()
    trials = 2 + int(math.log(k))
    while len(medoids) < k:
        total = float(closest.sum())
        if total <= 0:
            taken = set(medoids)
            medoids.extend([v for v in range(n) if v not in taken][: k - len(medoids)])
            break
        candidates = rng.choice(n, size=trials, p=closest / total)
        costs = np.minimum(closest[None, :], dist[candidates]).sum(axis=1)
        best = int(candidates[int(np.argmin(costs))])
        medoids.append(best)
        closest = np.minimum(closest, dist[best])
    return medoids


def pam_swap(
    dist: np.ndarray,
    medoids: list[int],
    max_swaps: int = MAX_SWAPS,
    history: list[float] | None = None,
) -> tuple[list[int], int]:
    """Best-improvement swaps until no swap lowers the cost."""
    medoids = list(medoids)
    n, k = dist.shape[0], len(medoids)
    rows = np.arange(n)
    cost = assignment_cost(dist, medoids)
    if history is not None:
        history.append(cost)
    for swap in range(max_swaps):
        d1, d2, nearest = _nearest_two(dist, medoids)
        gain = np.minimum(0.0, dist - d1[None, :])
        shared = gain.sum(axis=1)
        # vertices served by the removed medoid fall back to their second choice
        own = np.minimum(d2[None, :], dist) - d1[None, :] - gain
        members = sparse.csr_matrix((np.ones(n), (rows, nearest)), shape=(n, k))
        delta = shared[:, None] + np.asarray(members.T @ own.T).T
        delta[medoids, :] = math.inf
        o, i = np.unravel_index(int(np.argmin(delta)), delta.shape)
        if not delta[o, i] < -1e-12 * max(cost, 1.0):
            return medoids, swap
        medoids[int(i)] = int(o)
        cost = assignment_cost(dist, medoids)
        if history is not None:
            history.append(cost)
    log.warning("pam_swap_capped swaps=%s k=%s", max_swaps, k)
    return medoids, max_swaps


def kmedoids(
    dist: np.ndarray,
    k: int,
    seed: int,
    init: list[int] | None = None,
    history: list[float] | None = None,
) -> MedoidSolution:
    """k-median baseline: seeded greedy start (or ``init``) refined by PAM swaps."""
    n = dist.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if k == n:
        return MedoidSolution(k=k, facilities=list(range(n)), cost=0.0, seed=seed)
    start = list(init) if init is not None else seed_medoids(dist, k, make_rng(seed, k))
    if len(set(start)) != k:
        raise ValueError(f"initial medoids must be {k} distinct vertices")
    medoids, swaps = pam_swap(dist, start, history=history)
    facilities = sorted(medoids)
    sol = MedoidSolution(k=k, facilities=facilities, cost=assignment_cost(dist, facilities), seed=seed, iterations=swaps)
    log.debug("kmedoids_done k=%s cost=%.6g swaps=%s", k, sol.cost, swaps)
    return sol


def medoid_ladder(dist: np.ndarray, seed: int, ks: list[int] | None = None) -> dict[int, MedoidSolution]:
    """Baselines for every k in ``ks`` (default 1..n), each warm-started from the previous one.

    The warm start adds the single vertex that lowers the previous cost most.
    """
    n = dist.shape[0]
    wanted = sorted(set(ks) if ks is not None else set(range(1, n + 1)))
    out: dict[int, MedoidSolution] = {}
    prev: MedoidSolution | None = None
    for k in wanted:
        if prev is None or k == n or k - prev.k != 1:
            sol = kmedoids(dist, k, seed)
        else:
            closest = dist[prev.facilities].min(axis=0)
            gains = np.minimum(closest[None, :], dist).sum(axis=1)
            gains[prev.facilities] = math.inf
            sol = kmedoids(dist, k, seed, init=prev.facilities + [int(np.argmin(gains))])
        out[k] = sol
        prev = sol
    log.info("medoid_ladder_done vertices=%s baselines=%s", n, len(out))
    return out
