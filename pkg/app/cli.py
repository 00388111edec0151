from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np
from pydantic import ValidationError

from app import FORMAT_VERSION, __version__
from app.bidding.core import normalized_mass, values, work
from app.bidding.extrema import consistency_robustness
from app.bidding.io import dump_function, load_function
from app.bidding.sampling import sample_sequence
from app.config import Settings
from app.db.store import BaselineCache
from app.errors import BiddingLabError
from app.evaluation.sweep import sigma_grid, sweep_sigma, write_sweep_csv
from app.lower_bound.dual import (
    build_dual_certificate,
    certified_gap,
    lower_bound_curve,
    write_certificate,
    write_curve_csv,
)
from app.lower_bound.primal import build_primal, export_lp_text, solve_primal
from app.median.experiment import run_experiment, write_ratios_csv
from app.median.graph import grid_road_graph, load_graph
from app.models.run import RunConfig
from app.numerics.roots import E
from app.strategies.pareto import build_algorithm_a, polynomial_family, predicted_consistency, write_qk_csv
from app.strategies.tradeoff import r_grid, tradeoff_points, write_tradeoff_csv

log = logging.getLogger(__name__)

INVALID_ARGUMENT_EXIT = 2


def _float_list(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}") from exc


def _algos(raw: str) -> list[str]:
    names = [part.strip().upper() for part in raw.split(",") if part.strip()]
    bad = [name for name in names if name not in {"A", "I", "D"}]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"algorithms must be drawn from A,I,D, got {raw!r}")
    return names


def _grid_shape(raw: str) -> tuple[int, int]:
    try:
        rows, cols = (int(part) for part in raw.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {raw!r}") from exc
    return rows, cols


def _write_rows(path: str | Path, header: list[str], rows: list[list[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def cmd_tradeoff(args: argparse.Namespace, settings: Settings) -> None:
    grid = r_grid(args.r_min, args.r_max, args.steps)
    points = tradeoff_points(grid, args.a, args.n, args.threads, settings.solver_config())
    write_tradeoff_csv(points, args.out)


def cmd_pareto(args: argparse.Namespace, settings: Settings) -> None:
    cfg = settings.solver_config()
    params, family = polynomial_family(args.r, args.tail_tol, cfg)
    B = build_algorithm_a(args.r, args.tail_tol, cfg)
    extrema = consistency_robustness(B, settings.grid_spec())
    if args.emit:
        dump_function(B, args.emit)
    if args.emit_qk:
        write_qk_csv(family, args.emit_qk)
    print(
        f"r={params.r:.12g} regime={params.regime} k_max={family.k_max} "
        f"cons={extrema.cons:.12g} predicted={predicted_consistency(params):.12g} "
        f"rob={extrema.rob:.12g} tail_bound={B.tail_mass_bound:.3g}"
    )


def cmd_mass(args: argparse.Namespace, settings: Settings) -> None:
    if args.step <= 0 or args.t_max < args.t_min:
        raise ValueError("need step > 0 and t_max >= t_min")
    B = load_function(args.function)
    ts = args.t_min + args.step * np.arange(int(np.floor((args.t_max - args.t_min) / args.step + 1e-9)) + 1)
    b, cr, w = values(B, ts), normalized_mass(B, ts), work(B, ts)
    rows = [[f"{t:.12g}", f"{v:.12g}", f"{c:.12g}", f"{x:.12g}"] for t, v, c, x in zip(ts, b, cr, w)]
    _write_rows(args.out, ["t", "B", "CR", "work"], rows)
    log.info("mass_written path=%s rows=%s", args.out, len(rows))


def cmd_sample(args: argparse.Namespace, settings: Settings) -> None:
    B = load_function(args.function)
    sample, cost = sample_sequence(B, args.seed, args.threshold, lam=args.lam)
    body = sample.model_dump(by_alias=True) | {"cost": cost, "normalized_cost": cost / args.threshold}
    text = json.dumps(body, sort_keys=True)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_lower_bound(args: argparse.Namespace, settings: Settings) -> None:
    if args.cert:
        if len(args.r) != 1:
            raise ValueError("--cert needs exactly one --r value")
        cert = build_dual_certificate(args.a, args.n, args.r[0], args.method)
        write_certificate(cert, args.cert)
        print(f"certificate={args.cert} lambda={cert.lam:.12g} gap={certified_gap(cert):.3g}")
    points = lower_bound_curve(args.r, args.a, args.n, args.threads)
    if args.out:
        write_curve_csv(points, args.a, args.n, args.out)
    for point in points:
        line = f"r={point.r:.12g} lambda={point.c:.12g}"
        if args.solve_primal_n:
            value, _ = solve_primal(build_primal(point.r, args.a, args.solve_primal_n, args.a - 1))
            line += f" primal={value:.12g}"
        print(line)


def cmd_export_lp(args: argparse.Namespace, settings: Settings) -> None:
    m = args.a - 1 if args.m is None else args.m
    export_lp_text(build_primal(args.r, args.a, args.n, m), args.out)


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> None:
    results = sweep_sigma(
        args.algos,
        args.r,
        sigma_grid(args.sigma2),
        args.trials,
        args.seed,
        u_hat=args.u_hat,
        chunk=settings.mc_chunk,
        threads=args.threads,
        cfg=settings.solver_config(),
        noise_base=args.noise_base,
    )
    write_sweep_csv(results, args.out)


def cmd_median(args: argparse.Namespace, settings: Settings) -> None:
    if args.graph:
        g = load_graph(args.graph)
    else:
        rows, cols = args.synthetic
        g = grid_road_graph(rows, cols, args.seed)
    cache = BaselineCache(args.cache or settings.baseline_cache)
    result = run_experiment(
        g,
        args.r,
        args.k_hat,
        args.algos,
        args.trials,
        args.seed,
        cache=cache,
        greedy_fill=args.greedy_fill,
        threads=args.threads,
        cfg=settings.solver_config(),
    )
    write_ratios_csv(result, args.out)


COMMANDS: dict[str, Callable[[argparse.Namespace, Settings], None]] = {
    "tradeoff": cmd_tradeoff,
    "pareto": cmd_pareto,
    "mass": cmd_mass,
    "sample": cmd_sample,
    "lower-bound": cmd_lower_bound,
    "export-lp": cmd_export_lp,
    "simulate": cmd_simulate,
    "median": cmd_median,
}


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bidding-lab", description="Learning-augmented online bidding toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (formats {FORMAT_VERSION})")
    parser.add_argument("--threads", type=int, default=settings.effective_threads, help="worker cap")
    parser.add_argument("--dev", action="store_true", default=settings.dev_mode, help="debug logging")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("tradeoff", help="consistency/robustness curves of every family")
    p.add_argument("--r-min", type=float, default=E)
    p.add_argument("--r-max", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--a", type=int, default=50)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pareto", help="build the optimal function for one robustness")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--tail-tol", type=float, default=settings.tail_tol)
    p.add_argument("--emit", default=None, help="write the function as JSON")
    p.add_argument("--emit-qk", default=None, help="write the q_k sequence as CSV")

    p = sub.add_parser("mass", help="tabulate B, CR and work of a function file")
    p.add_argument("--function", required=True)
    p.add_argument("--t-min", type=float, default=-3.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="draw one bid sequence and its cost")
    p.add_argument("--function", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--seed", type=int, default=settings.rng_seed)
    p.add_argument("--lam", type=float, default=None, help="fixed offset instead of a random draw")
    p.add_argument("--out", default=None)

    p = sub.add_parser("lower-bound", help="dual certificates for a list of robustness values")
    p.add_argument("--r", type=_float_list, required=True)
    p.add_argument("--a", type=int, default=50)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--method", choices=["banded", "sweep"], default="banded")
    p.add_argument("--solve-primal-n", type=int, default=None, help="also solve the primal LP with this n")
    p.add_argument("--cert", default=None, help="write the certificate JSON (single r only)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("export-lp", help="write the discretized primal in LP text format")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="defaults to a - 1")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="expected normalized cost under log-normal prediction noise")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--sigma2", default="0:2:0.25", help="lo:hi:step or comma list")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=settings.rng_seed)
    p.add_argument("--algos", type=_algos, default=["A", "I", "D"])
    p.add_argument("--u-hat", type=float, default=1.0)
    p.add_argument(
        "--noise-base", type=float, default=settings.noise_base, help="u = u_hat * base**eta; 2.718281828459045 for ln-noise"
    )
    p.add_argument("--out", required=True)

    p = sub.add_parser("median", help="incremental k-median experiment")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", default=None, help="edge list CSV u,v,weight")
    source.add_argument("--synthetic", type=_grid_shape, default=None, help="ROWSxCOLS road-like grid")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k-hat", type=int, required=True)
    p.add_argument("--algos", type=_algos, default=["A", "I", "D"])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=settings.rng_seed)
    p.add_argument("--cache", default=None, help=f"baseline cache (default {settings.baseline_cache})")
    p.add_argument("--greedy-fill", action="store_true", help="fill every F_i to exactly i facilities")
    p.add_argument("--out", required=True)
    return parser


# first file a subcommand writes; the run sidecar sits next to it
OUTPUT_FLAGS = ("out", "emit", "emit_qk", "cert")


def run_config(args: argparse.Namespace) -> RunConfig:
    skip = {"subcommand", "seed", "out", "threads", "dev", "log_level"}
    params = {key: value for key, value in sorted(vars(args).items()) if key not in skip}
    out_path = next((getattr(args, flag) for flag in OUTPUT_FLAGS if getattr(args, flag, None)), None)
    return RunConfig(
        subcommand=args.subcommand,
        seed=getattr(args, "seed", 0),
        out_path=out_path,
        threads=args.threads,
        params=params,
        version=__version__,
    )


def run_command(args: argparse.Namespace, settings: Settings) -> int:
    """Dispatch one parsed command line; returns the process exit status."""
    try:
        config = run_config(args)
        log.info(
            "command_start subcommand=%s seed=%s out=%s params=%s",
            config.subcommand,
            config.seed,
            config.out_path,
            config.params,
        )
        COMMANDS[args.subcommand](args, settings)
        config.write_sidecar()
    except BiddingLabError as exc:
        log.debug("command_failed code=%s", exc.code, exc_info=True)
        print(f"error code={exc.code} message={exc}", file=sys.stderr)
        return exc.exit_code
    except (ValidationError, ValueError) as exc:
        log.debug("command_invalid", exc_info=True)
        message = " ".join(str(exc).split())
        print(f"error code=INVALID_ARGUMENT message={message}", file=sys.stderr)
        return INVALID_ARGUMENT_EXIT
    log.info("command_done subcommand=%s", args.subcommand)
    return 0
