from app.evaluation.noise import paired_draws, thresholds
from app.evaluation.sweep import (
    build_algorithm,
    crossover_sigma2,
    sigma_grid,
    simulate_expected_nc,
    sweep_sigma,
    write_sweep_csv,
)

__all__ = [
    "build_algorithm",
    "crossover_sigma2",
    "paired_draws",
    "sigma_grid",
    "simulate_expected_nc",
    "sweep_sigma",
    "thresholds",
    "write_sweep_csv",
]
