from __future__ import annotations

import csv
import logging
from pathlib import Path

from app.lower_bound.dual import lower_bound_curve
from app.models.core import SolverConfig
from app.models.tradeoff import TradeoffPoint
from app.numerics.roots import E, check_robustness
from app.strategies.class_i import pareto_slopes
from app.strategies.classes import class_d_best
from app.strategies.pareto import predicted_consistency, regime_params

log = logging.getLogger(__name__)


def upper_bound_points(r: float, cfg: SolverConfig | None = None) -> list[TradeoffPoint]:
    """Best consistency reachable at robustness r by each strategy family."""
    r = check_robustness(r, cfg)
    _, c_d = class_d_best(r, cfg)
    _, c_i = pareto_slopes(r, cfg)
    c_a = predicted_consistency(regime_params(r, cfg))
    return [
        TradeoffPoint(r=r, c=E, source="ClassE"),
        TradeoffPoint(r=r, c=c_d, source="ClassD"),
        TradeoffPoint(r=r, c=c_i, source="ClassI"),
        TradeoffPoint(r=r, c=min(c_a, r), source="AlgorithmA"),
    ]


def tradeoff_points(
    r_list: list[float],
    a: int = 50,
    n: int = 2000,
    threads: int = 1,
    cfg: SolverConfig | None = None,
) -> list[TradeoffPoint]:
    """Upper-bound curves and the certified lower bound on a shared r grid."""
    points: list[TradeoffPoint] = []
    for r in r_list:
        points.extend(upper_bound_points(r, cfg))
    points.extend(lower_bound_curve(list(r_list), a, n, threads))
    log.info("tradeoff_points r_count=%s points=%s a=%s n=%s", len(r_list), len(points), a, n)
    return points


def r_grid(r_min: float, r_max: float, steps: int) -> list[float]:
    if not E <= r_min < r_max:
        raise ValueError(f"need e <= r_min < r_max, got {r_min}, {r_max}")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    width = (r_max - r_min) / (steps - 1)
    return [r_min + i * width for i in range(steps)]


def write_tradeoff_csv(points: list[TradeoffPoint], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "c", "source"])
        for point in points:
            writer.writerow([f"{point.r:.12g}", f"{point.c:.12g}", point.source])
    log.info("tradeoff_written path=%s rows=%s", path, len(points))
    return path
