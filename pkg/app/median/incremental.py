from __future__ import annotations

import logging
import math
from typing import Iterable

import numpy as np

from app.errors import MissingBaselineError
from app.median.kmedoids import assignment_cost
from app.models.graphs import IncrementalSolution, MedoidSolution

log = logging.getLogger(__name__)


def universe_costs(baselines: dict[int, MedoidSolution], n: int) -> list[float]:
    """[c_1, ..., c_n] with c_k the baseline cost for k facilities and c_n = 0."""
    missing = [k for k in range(1, n) if k not in baselines]
    if missing:
        raise MissingBaselineError(f"no baseline for k={missing[0]} ({len(missing)} missing)")
    return [baselines[k].cost for k in range(1, n)] + [0.0]


def project_bids(bids: Iterable[float], costs: list[float]) -> list[int]:
    """Indices i with some bid in [c_i, c_{i-1}), where c_0 = inf; n is always kept."""
    n = len(costs)
    upper = [math.inf] + costs[:-1]
    chosen = {n}
    values = np.sort(np.asarray(list(bids), dtype=float))
    for i in range(1, n):
        lo, hi = costs[i - 1], upper[i - 1]
        if not lo < hi:
            continue
        j = int(np.searchsorted(values, lo, side="left"))
        if j < values.size and values[j] < hi:
            chosen.add(i)
    return sorted(chosen)


def _nearest_in(dist: np.ndarray, points: Iterable[int], pool: list[int]) -> frozenset[int]:
    # pool is sorted, so argmin breaks distance ties by the smallest vertex id
    sub = dist[np.ix_(sorted(points), pool)]
    return frozenset(pool[j] for j in np.argmin(sub, axis=1).tolist())


def _greedy_order(dist: np.ndarray, order: list[int], block: list[int]) -> list[int]:
    closest = dist[order].min(axis=0) if order else np.full(dist.shape[0], math.inf)
    remaining = list(block)
    ranked: list[int] = []
    while remaining:
        totals = np.minimum(closest[None, :], dist[remaining]).sum(axis=1)
        pick = remaining.pop(int(np.argmin(totals)))
        ranked.append(pick)
        closest = np.minimum(closest, dist[pick])
    return ranked


def facility_order(solution: IncrementalSolution, dist: np.ndarray | None = None) -> list[int]:
    """Total order on vertices implied by the nested sets.

    New vertices of each constructed set follow in id order, or greedily by
    cost reduction when a distance table is given.
    """
    order: list[int] = []
    placed: set[int] = set()
    for k in solution.index_set:
        block = sorted(solution.prefix_sets[k] - placed)
        if dist is not None:
            block = _greedy_order(dist, order, block)
        order.extend(block)
        placed.update(block)
    return order


def build_incremental(
    dist: np.ndarray,
    index_set: Iterable[int],
    baselines: dict[int, MedoidSolution],
    greedy_fill: bool = False,
) -> IncrementalSolution:
    """Nested facility sets F_1 <= ... <= F_n from the projected index set.

    F_n is every vertex; walking K downward, each baseline set is projected
    onto the previously built set. Indices between two members of K reuse
    the set of the smaller one. With ``greedy_fill`` every F_i holds exactly
    i vertices, the first i of the greedy facility order.
    """
    n = dist.shape[0]
    costs = universe_costs(baselines, n)
    ks = sorted(set(index_set) | {n})
    if ks[0] < 1 or ks[-1] > n:
        raise ValueError(f"index set must lie in [1, {n}]")
    prefix: dict[int, frozenset[int]] = {n: frozenset(range(n))}
    pool = list(range(n))
    for k in reversed(ks[:-1]):
        prefix[k] = _nearest_in(dist, baselines[k].facilities, pool)
        pool = sorted(prefix[k])

    solution = IncrementalSolution(index_set=ks, prefix_sets=prefix, ratios={})
    if greedy_fill:
        order = facility_order(solution, dist)
        filled = {k: frozenset(order[:k]) for k in range(1, n + 1)}
        solution = IncrementalSolution(index_set=list(range(1, n + 1)), prefix_sets=filled, ratios={}, order=order)
    else:
        solution.order = facility_order(solution)

    built = {k: assignment_cost(dist, s) for k, s in solution.prefix_sets.items()}
    for k in range(1, n + 1):
        own = solution.holder(k)
        cost = built[own] if own is not None else math.inf
        base = costs[k - 1]
        solution.ratios[k] = 1.0 if cost == 0.0 and base == 0.0 else cost / base if base > 0 else math.inf
    log.debug("incremental_built vertices=%s constructed=%s", n, len(solution.prefix_sets))
    return solution
