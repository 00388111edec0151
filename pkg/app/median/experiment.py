from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from app.bidding.core import shift_to_prediction
from app.bidding.sampling import make_rng, sample_sequence
from app.db.store import BaselineCache
from app.evaluation.sweep import build_algorithm
from app.median.graph import graph_hash
from app.median.incremental import build_incremental, project_bids, universe_costs
from app.median.kmedoids import kmedoids, medoid_ladder
from app.median.shortest_paths import shortest_path_matrix
from app.models.core import SolverConfig
from app.models.evaluation import AlgorithmName
from app.models.graphs import MedoidSolution, WeightedGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RatioRow:
    algorithm: str
    k: int
    mean_ratio: float
    stderr: float


def load_baselines(
    dist: np.ndarray,
    seed: int,
    cache: BaselineCache | None = None,
    key: str = "",
) -> dict[int, MedoidSolution]:
    """Baselines for k = 1..n, computing only the ones the cache lacks."""
    n = dist.shape[0]
    found: dict[int, MedoidSolution] = {}
    if cache is not None:
        for k in range(1, n + 1):
            hit = cache.get(key, k, seed)
            if hit is not None:
                found[k] = hit
    missing = [k for k in range(1, n + 1) if k not in found]
    if missing:
        if cache is not None:
            log.warning("baseline_cache_miss graph=%s missing=%s", key[:12], len(missing))
        fresh = medoid_ladder(dist, seed, missing)
        found.update(fresh)
        if cache is not None:
            cache.put_many(key, list(fresh.values()))
    return found


def _summarize(samples: np.ndarray) -> tuple[float, float]:
    if samples.size < 2:
        return float(samples.mean()), 0.0
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(samples.size))


def run_experiment(
    g: WeightedGraph,
    r: float,
    k_hat: int,
    algorithms: list[AlgorithmName],
    trials: int,
    seed: int,
    cache: BaselineCache | None = None,
    greedy_fill: bool = False,
    threads: int = 1,
    cfg: SolverConfig | None = None,
    dist: np.ndarray | None = None,
    baselines: dict[int, MedoidSolution] | None = None,
) -> list[RatioRow]:
    """Mean incremental-to-baseline cost ratio per (algorithm, k).

    Each bidding function is rescaled so its consistency point bids the
    baseline cost at ``k_hat``. Trial t draws lambda from stream (seed, t), so
    every algorithm sees the same draws.
    """
    n = g.vertex_count
    if not 1 <= k_hat < n:
        raise ValueError(f"k_hat must be in [1, {n - 1}], got {k_hat}")
    if trials < 1:
        raise ValueError("trials must be positive")
    if dist is None:
        dist = shortest_path_matrix(g, threads=threads)
    if baselines is None:
        baselines = load_baselines(dist, seed, cache, graph_hash(g))
    costs = universe_costs(baselines, n)
    lams = [float(make_rng(seed, t).random()) for t in range(trials)]

    rows: list[RatioRow] = []
    for name in algorithms:
        aligned = shift_to_prediction(build_algorithm(name, r, cfg), costs[k_hat - 1])

        def trial(lam: float) -> list[float]:
            sample, _ = sample_sequence(aligned, seed, costs[0], lam=lam)
            solution = build_incremental(dist, project_bids(sample.bids, costs), baselines, greedy_fill)
            return [solution.ratios[k] for k in range(1, n + 1)]

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            table = np.asarray(list(pool.map(trial, lams)))
        for k in range(1, n + 1):
            mean, err = _summarize(table[:, k - 1])
            rows.append(RatioRow(algorithm=name, k=k, mean_ratio=mean, stderr=err))
        log.info(
            "median_algorithm_done algorithm=%s r=%s k_hat=%s ratio_at_k_hat=%.6g max_ratio=%.6g",
            name,
            r,
            k_hat,
            rows[-n + k_hat - 1].mean_ratio,
            float(table.max()),
        )
    return rows


def exact_baselines(dist: np.ndarray, seed: int = 0) -> dict[int, MedoidSolution]:
    """Exhaustive k-median optima for tiny graphs, as a drop-in for the PAM ladder."""
    n = dist.shape[0]
    out: dict[int, MedoidSolution] = {n: kmedoids(dist, n, seed)}
    for k in range(1, n):
        best = min(combinations(range(n), k), key=lambda f: float(dist[list(f)].min(axis=0).sum()))
        cost = float(dist[list(best)].min(axis=0).sum())
        out[k] = MedoidSolution(k=k, facilities=list(best), cost=cost, seed=seed)
    return out


def write_ratios_csv(rows: list[RatioRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "k", "mean_ratio", "stderr"])
        for row in rows:
            writer.writerow([row.algorithm, row.k, f"{row.mean_ratio:.12g}", f"{row.stderr:.12g}"])
    log.info("ratios_written path=%s rows=%s", path, len(rows))
    return path
