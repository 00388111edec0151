from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import ValidationError
from scipy.linalg import solve_banded

from app.errors import FeasibilityViolationError, NonConvergenceError, NumericOverflowError, ParseError
from app.models.core import SolverConfig
from app.models.lp import DualCertificate
from app.models.tradeoff import TradeoffPoint
from app.numerics.roots import check_robustness, find_root_bracketed, w_hi

log = logging.getLogger(__name__)

MAX_SWEEPS = 10**6
FEASIBILITY_TOL = 1e-9


def rho_root(a: int, r: float, cfg: SolverConfig | None = None) -> float:
    """Root of X^a - aR(X - 1) inside (1, 1 + 1/a)."""
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    r = check_robustness(r, cfg)
    if a == 1:
        return r / (r - 1.0)
    return find_root_bracketed(lambda x: x**a - a * r * (x - 1.0), 1.0 + 1e-15, 1.0 + 1.0 / a, cfg)


def lambda_limit(a: int, r: float) -> float:
    """Objective of the certificate as the truncation N grows: R - 1/(a(rho - 1))."""
    return r - 1.0 / (a * (rho_root(a, r) - 1.0))


def _sweep(b: np.ndarray, a: int, r: float) -> np.ndarray:
    size = b.size
    partial = np.concatenate(([0.0], np.cumsum(b)))
    reach = np.minimum(size, np.arange(1, size + 1) + a - 1)
    return (1.0 + partial[reach]) / (a * r)


def fixed_point_sweeps(
    a: int,
    n_cap: int,
    r: float,
    tol: float = 1e-13,
    max_sweeps: int = MAX_SWEEPS,
    keep_history: bool = False,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Iterate b <- F_N(b) from 0 until the relative sup-norm change is at most tol."""
    b = np.zeros(n_cap)
    history: list[np.ndarray] = [b] if keep_history else []
    for sweep in range(1, max_sweeps + 1):
        nxt = _sweep(b, a, r)
        if not np.all(np.isfinite(nxt)):
            raise NumericOverflowError(f"fixed point overflowed at sweep {sweep} (a={a} N={n_cap} r={r})")
        change = float(np.max(np.abs(nxt - b) / nxt))
        b = nxt
        if keep_history:
            history.append(b)
        if change <= tol:
            log.debug("fixed_point_converged a=%s n=%s r=%s sweeps=%s", a, n_cap, r, sweep)
            return b, history
    raise NonConvergenceError(f"fixed point not reached after {max_sweeps} sweeps (a={a} N={n_cap} r={r})")


def _solve_partial_sums(a: int, n_cap: int, r: float) -> np.ndarray:
    # S_n = b_1 + ... + b_n solves aR (S_n - S_{n-1}) - S_{min(N, n+a-1)} = 1
    upper = a - 1
    bands = np.zeros((upper + 2, n_cap))
    rows = np.arange(n_cap)
    reach = np.minimum(n_cap, rows + a) - 1
    diag = a * r - (reach == rows)
    bands[upper, :] = diag
    bands[upper + 1, :-1] = -a * r
    above = reach > rows
    bands[upper + rows[above] - reach[above], reach[above]] = -1.0
    return solve_banded((1, upper), bands, np.ones(n_cap))


def fixed_point_b(
    a: int,
    n_cap: int,
    r: float,
    tol: float = 1e-13,
    method: Literal["banded", "sweep"] = "banded",
) -> np.ndarray:
    """Positive b_1..b_N with aR b_n = 1 + sum_{m <= min(N, n+a-1)} b_m."""
    if n_cap < 1:
        raise ValueError(f"n_cap must be >= 1, got {n_cap}")
    r = check_robustness(r)
    if method == "sweep":
        b, _ = fixed_point_sweeps(a, n_cap, r, tol)
        return b
    partial = _solve_partial_sums(a, n_cap, r)
    b = np.diff(np.concatenate(([0.0], partial)))
    if not np.all(np.isfinite(b)) or np.any(b <= 0):
        raise NumericOverflowError(f"fixed point lost positivity (a={a} N={n_cap} r={r})")
    residual = np.max(np.abs(_sweep(b, a, r) - b) / b)
    if residual > max(tol, 1e-9):
        raise NonConvergenceError(f"banded fixed point residual {residual:.3g} (a={a} N={n_cap} r={r})")
    return b


def _suffix_sums(values: np.ndarray) -> np.ndarray:
    # out[i] = values[i] + ... + values[-1], with a trailing 0
    return np.concatenate((np.cumsum(values[::-1])[::-1], [0.0]))


def dual_residuals(cert: DualCertificate) -> np.ndarray:
    """LHS - RHS of every dual row k = -n..m, in index order."""
    a, n, m, r = cert.a, cert.n, cert.m, cert.r
    beta = np.asarray(cert.beta, dtype=float)
    gamma = np.asarray(cert.gamma, dtype=float)
    ks = np.arange(-n, m + 1)
    tails = _suffix_sums(beta)
    lo = np.maximum(ks + 1 - a, -n) + n
    lhs = (ks <= a - 1) / a + tails[lo] / a + gamma[ks + n + 1] - gamma[ks + n]
    rhs = cert.lam * (ks == 0) + r * beta
    return lhs - rhs


def verify_certificate(cert: DualCertificate) -> tuple[float, float]:
    """(smallest scaled residual over all rows, largest |scaled residual| over rows k <= 0)."""
    beta = np.asarray(cert.beta, dtype=float)
    if cert.lam < 0 or np.any(beta < 0) or np.any(np.asarray(cert.gamma) < 0):
        raise FeasibilityViolationError("certificate has a negative component")
    ks = np.arange(-cert.n, cert.m + 1)
    scale = 1.0 + cert.r * beta + cert.lam * (ks == 0)
    scaled = dual_residuals(cert) / scale
    return float(np.min(scaled)), float(np.max(np.abs(scaled[ks <= 0])))


def build_dual_certificate(a: int, n: int, r: float, method: Literal["banded", "sweep"] = "banded") -> DualCertificate:
    """Feasible dual point with m = a - 1; its objective bounds the consistency of any R-robust strategy."""
    r = check_robustness(r)
    b = fixed_point_b(a, n, r, method=method)
    m = a - 1
    padded = np.zeros(max(n, a))
    padded[:n] = b
    # beta_{-k} = b_k, beta_0..beta_m = 0
    beta = np.concatenate((b[::-1], np.zeros(m + 1)))
    head = np.concatenate(([0.0], np.cumsum(padded[: max(a - 1, 0)])))
    # gamma_i = (1/a) sum_{l=i+1}^{a-1} (1 + b_1 + ... + b_{a-1-l}) for 0 <= i <= a-2
    inner = np.array([1.0 + head[a - 1 - ell] for ell in range(1, a)])
    gamma_nonneg = np.concatenate((_suffix_sums(inner)[:-1], [0.0])) / a
    gamma = np.concatenate((np.zeros(n + 1), gamma_nonneg))
    weights = a - np.arange(1, a)
    lam = 1.0 + float(np.dot(weights, padded[: a - 1])) / a
    cert = DualCertificate(a=a, n=n, m=m, r=r, lam=lam, beta=beta.tolist(), gamma=gamma.tolist())
    worst, equality = verify_certificate(cert)
    if worst < -FEASIBILITY_TOL:
        raise FeasibilityViolationError(f"dual row violated by {-worst:.3g} (a={a} n={n} r={r})")
    log.info(
        "certificate_built a=%s n=%s r=%s lambda=%.12g limit=%.12g worst=%.3g equality=%.3g",
        a,
        n,
        r,
        lam,
        lambda_limit(a, r),
        worst,
        equality,
    )
    return cert.model_copy(update={"max_violation": max(0.0, -worst)})


def lower_bound_curve(r_list: list[float], a: int, n: int, threads: int = 1) -> list[TradeoffPoint]:
    def one(r: float) -> TradeoffPoint:
        cert = build_dual_certificate(a, n, r)
        return TradeoffPoint(r=cert.r, c=cert.lam, source="LowerBound")

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(one, r_list))


def certificate_to_dict(cert: DualCertificate) -> dict[str, object]:
    return cert.model_dump(by_alias=True)


def write_certificate(cert: DualCertificate, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(certificate_to_dict(cert), sort_keys=True) + "\n", encoding="utf-8")
    log.info("certificate_written path=%s a=%s n=%s", path, cert.a, cert.n)
    return path


def read_certificate(path: str | Path) -> DualCertificate:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        cert = DualCertificate.model_validate(payload)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise ParseError(f"cannot read certificate {path}: {exc}") from exc
    if len(cert.beta) != cert.n + cert.m + 1 or len(cert.gamma) != cert.n + cert.m + 2:
        raise ParseError(f"certificate {path} has vectors of the wrong length")
    return cert


def write_curve_csv(points: list[TradeoffPoint], a: int, n: int, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "lambda", "a", "n"])
        for point in points:
            writer.writerow([f"{point.r:.12g}", f"{point.c:.12g}", a, n])
    log.info("lower_bound_curve_written path=%s rows=%s", path, len(points))
    return path


def certified_gap(cert: DualCertificate) -> float:
    """Distance between the certificate objective and the achievable R - w_hi(R)."""
    return abs(cert.lam - (cert.r - w_hi(cert.r)))

