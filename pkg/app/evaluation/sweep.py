from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from app.bidding.core import shift_to_prediction
from app.bidding.sampling import chunk_sizes, normalized_costs
from app.evaluation.noise import paired_draws, thresholds
from app.models.core import SolverConfig
from app.models.evaluation import AlgorithmName, EvalResult, NoiseModel
from app.models.functions import BiddingFunction
from app.strategies.class_i import class_i_function, pareto_slopes
from app.strategies.classes import class_d, class_d_best
from app.strategies.pareto import build_algorithm_a

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 16384


def build_algorithm(name: AlgorithmName, r: float, cfg: SolverConfig | None = None, tail_tol: float = 1e-12) -> BiddingFunction:
    """The r-robust function of the named family with the best consistency."""
    if name == "D":
        params, _ = class_d_best(r, cfg)
        return class_d(params)
    if name == "I":
        slopes, _ = pareto_slopes(r, cfg)
        return class_i_function(slopes)
    if name == "A":
        return build_algorithm_a(r, tail_tol, cfg)
    raise ValueError(f"unknown algorithm {name!r}")


def simulate_expected_nc(
    B: BiddingFunction,
    noise: NoiseModel,
    n_trials: int,
    seed: int,
    algorithm: AlgorithmName = "A",
    r: float = math.nan,
    chunk: int = DEFAULT_CHUNK,
    threads: int = 1,
) -> EvalResult:
    """Monte-Carlo mean of cost/u with u = u_hat * base**eta, eta ~ N(0, sigma2).

    The function is rescaled so that its reference point bids exactly u_hat.
    Chunk j always draws from the stream (seed, j), so results do not depend on
    the thread count and every sigma2 reuses the same normals.
    """
    if n_trials < 2:
        raise ValueError("n_trials must be at least 2")
    aligned = shift_to_prediction(B, noise.u_hat)
    sizes = chunk_sizes(n_trials, chunk)

    def run(index: int) -> np.ndarray:
        lam, z = paired_draws(seed, index, sizes[index])
        return normalized_costs(aligned, thresholds(noise, z), lam)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(run, range(len(sizes))))
    nc = np.concatenate(parts)
    result = EvalResult(
        algorithm=algorithm,
        r=r,
        sigma2=noise.sigma2,
        mean_nc=float(np.mean(nc)),
        stderr=float(np.std(nc, ddof=1) / math.sqrt(nc.size)),
        n_trials=int(nc.size),
        seed=seed,
    )
    log.debug(
        "simulation_done algorithm=%s r=%s sigma2=%s mean=%.12g stderr=%.3g",
        algorithm,
        r,
        noise.sigma2,
        result.mean_nc,
        result.stderr,
    )
    return result


def sigma_grid(spec: str) -> list[float]:
    """Parse ``lo:hi:step`` (inclusive of hi) or a comma list."""
    if ":" not in spec:
        return [float(part) for part in spec.split(",") if part.strip()]
    lo, hi, step = (float(part) for part in spec.split(":"))
    if step <= 0 or hi < lo or lo < 0:
        raise ValueError(f"bad sigma2 grid {spec!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def sweep_sigma(
    algorithms: list[AlgorithmName],
    r: float,
    sigma2_grid: list[float],
    n_trials: int,
    seed: int,
    u_hat: float = 1.0,
    chunk: int = DEFAULT_CHUNK,
    threads: int = 1,
    cfg: SolverConfig | None = None,
    noise_base: float = 2.0,
) -> list[EvalResult]:
    """One row per (algorithm, sigma2), all on common random numbers."""
    results: list[EvalResult] = []
    for name in algorithms:
        B = build_algorithm(name, r, cfg)
        for sigma2 in sigma2_grid:
            noise = NoiseModel(u_hat=u_hat, sigma2=sigma2, base=noise_base)
            results.append(simulate_expected_nc(B, noise, n_trials, seed, name, r, chunk, threads))
        log.info("sweep_algorithm_done algorithm=%s r=%s cells=%s", name, r, len(sigma2_grid))
    return results


def write_sweep_csv(results: list[EvalResult], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "r", "sigma2", "mean_nc", "stderr", "n_trials"])
        for row in results:
            writer.writerow(
                [
                    row.algorithm,
                    f"{row.r:.12g}",
                    f"{row.sigma2:.12g}",
                    f"{row.mean_nc:.12g}",
                    f"{row.stderr:.12g}",
                    row.n_trials,
                ]
            )
    log.info("sweep_written path=%s rows=%s", path, len(results))
    return path


def crossover_sigma2(results: list[EvalResult], first: AlgorithmName, second: AlgorithmName) -> float | None:
    """Smallest grid sigma2 at which ``first`` costs more than ``second``; None if it never does."""
    by_sigma: dict[float, dict[str, float]] = {}
    for row in results:
        by_sigma.setdefault(row.sigma2, {})[row.algorithm] = row.mean_nc
    for sigma2 in sorted(by_sigma):
        cell = by_sigma[sigma2]
        if first in cell and second in cell and cell[first] > cell[second]:
            return sigma2
    return None
