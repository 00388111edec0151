from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from app.config import Settings, configure_logging
from app.evaluation.sweep import crossover_sigma2, sigma_grid, sweep_sigma
from app.median.experiment import run_experiment
from app.median.graph import grid_road_graph

CROSSOVER_BAND = (0.9, 1.5)


def check_noise_crossover(settings: Settings) -> None:
    results = sweep_sigma(
        ["A", "D"],
        4.0,
        sigma_grid("0:4:0.1"),
        1_000_000,
        seed=settings.rng_seed,
        chunk=settings.mc_chunk,
        threads=settings.effective_threads,
        noise_base=settings.noise_base,
    )
    crossover = crossover_sigma2(results, "A", "D")
    print(f"noise_crossover sigma2={crossover}")
    assert crossover is not None and CROSSOVER_BAND[0] <= crossover <= CROSSOVER_BAND[1]


def check_median_ladder(settings: Settings) -> None:
    g = grid_road_graph(30, 50, seed=7)
    k_hat = g.vertex_count // 2
    rows = run_experiment(g, 4.0, k_hat, ["A", "I", "D"], 50, seed=7, threads=settings.effective_threads)
    assert all(row.mean_ratio >= 1.0 - 1e-9 for row in rows)
    at_k_hat = {row.algorithm: row for row in rows if row.k == k_hat}
    a, i, d = at_k_hat["A"], at_k_hat["I"], at_k_hat["D"]
    assert a.mean_ratio <= i.mean_ratio + 3 * (a.stderr + i.stderr)
    assert i.mean_ratio <= d.mean_ratio + 3 * (i.stderr + d.stderr)
    ladder = [row.mean_ratio for row in rows if row.algorithm == "D"]
    peaks = sum(1 for left, mid, right in zip(ladder, ladder[1:], ladder[2:]) if mid > left and mid > right)
    print(f"median_ladder a={a.mean_ratio:.6g} i={i.mean_ratio:.6g} d={d.mean_ratio:.6g} d_peaks={peaks}")
    assert peaks >= 3


def run() -> None:
    settings = Settings()
    configure_logging(settings.dev_mode)
    check_noise_crossover(settings)
    check_median_ladder(settings)
    print("acceptance_passed")


if __name__ == "__main__":
    run()
