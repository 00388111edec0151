from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from app.models.core import GridSpec, SolverConfig

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    return int(raw)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None:
        return default
    return float(raw)


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class Settings:
    dev_mode: bool = _env_bool("DEV_MODE", False)
    rng_seed: int = _env_int("RNG_SEED", 42)
    threads: int = _env_int("THREADS", 0)
    tail_tol: float = _env_float("TAIL_TOL", 1e-12)
    solver_abs_tol: float = _env_float("SOLVER_ABS_TOL", 1e-12)
    solver_rel_tol: float = _env_float("SOLVER_REL_TOL", 1e-12)
    solver_max_iter: int = _env_int("SOLVER_MAX_ITER", 200)
    grid_points_per_unit: int = _env_int("GRID_POINTS_PER_UNIT", 4096)
    grid_half_width: float = _env_float("GRID_HALF_WIDTH", 30.0)
    mc_chunk: int = _env_int("MC_CHUNK", 16384)
    noise_base: float = _env_float("NOISE_BASE", 2.0)
    baseline_cache: str = os.getenv("BASELINE_CACHE", "baselines.json")

    @property
    def effective_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        return max(1, min(8, os.cpu_count() or 1))

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            abs_tol=self.solver_abs_tol,
            rel_tol=self.solver_rel_tol,
            max_iter=self.solver_max_iter,
        )

    def grid_spec(self) -> GridSpec:
        return GridSpec(points_per_unit=self.grid_points_per_unit, half_width=self.grid_half_width)

    def redacted(self) -> dict[str, object]:
        return {
            "dev_mode": self.dev_mode,
            "rng_seed": self.rng_seed,
            "threads": self.effective_threads,
            "tail_tol": self.tail_tol,
            "solver_abs_tol": self.solver_abs_tol,
            "solver_rel_tol": self.solver_rel_tol,
            "solver_max_iter": self.solver_max_iter,
            "grid_points_per_unit": self.grid_points_per_unit,
            "grid_half_width": self.grid_half_width,
            "mc_chunk": self.mc_chunk,
            "noise_base": self.noise_base,
            "baseline_cache": self.baseline_cache,
        }


def configure_logging(dev_mode: bool, level_name: str | None = None) -> None:
    level = logging.DEBUG if dev_mode else logging.INFO
    if level_name:
        level = getattr(logging, level_name.upper(), level)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )
