from __future__ import annotations

import logging
import re
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app.bidding.core import cumulative_mass
from app.errors import LPIOError, NonConvergenceError, ParseError
from app.models.functions import BiddingFunction
from app.models.lp import PrimalLP, row_label, variable_name
from app.numerics.roots import check_robustness

log = logging.getLogger(__name__)

_TERMS_PER_LINE = 8
_HEADER = re.compile(r"^\\\s*bidding-lab primal r=(\S+) a=(\d+) n=(\d+) m=(\d+)\s*$")
_TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+(\S+)")


def _check_sizes(a: int, n: int, m: int) -> None:
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")


def build_primal(r: float, a: int, n: int, m: int) -> PrimalLP:
    """Sparse rows of the discretized primal in ``A_ub @ z <= b_ub`` form.

    Columns are x_{-n}..x_m followed by C.
    """
    _check_sizes(a, n, m)
    r = check_robustness(r)
    col = {k: k + n for k in range(-n, m + 1)}
    c_col = n + m + 1
    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    rhs: list[float] = []
    names: list[str] = []

    def add_row(name: str, entries: list[tuple[int, float]], bound: float) -> None:
        row = len(names)
        for j, value in entries:
            rows.append(row)
            cols.append(j)
            data.append(value)
        rhs.append(bound)
        names.append(name)

    add_row("lam", [(col[0], -1.0)], -1.0)
    for k in range(-n, m):
        add_row(row_label("gam", k), [(col[k], 1.0), (col[k + 1], -1.0)], 0.0)
    for k in range(-n, m + 1):
        upper = min(m, k + a - 1)
        entries = [(col[j], 1.0 / a) for j in range(-n, upper + 1)]
        entries.append((col[k], -r))
        add_row(row_label("bet", k), entries, 0.0)
    theta = [(col[j], 1.0 / a) for j in range(-n, min(m, a - 1) + 1)]
    theta.append((c_col, -1.0))
    add_row("theta", theta, 0.0)

    # duplicate (row, col) pairs in bet rows are summed by the conversion
    a_ub = sparse.coo_matrix((data, (rows, cols)), shape=(len(names), n + m + 2)).tocsr()
    log.debug("primal_built r=%s a=%s n=%s m=%s rows=%s nnz=%s", r, a, n, m, len(names), a_ub.nnz)
    return PrimalLP(r=r, a=a, n=n, m=m, a_ub=a_ub, b_ub=np.asarray(rhs), row_names=names)


def _format_terms(coefs: np.ndarray, columns: np.ndarray, names: list[str]) -> list[str]:
    terms = []
    for j, value in zip(columns.tolist(), coefs.tolist()):
        sign = "-" if value < 0 else "+"
        terms.append(f"{sign} {abs(value):.17g} {names[j]}")
    return [" ".join(terms[i : i + _TERMS_PER_LINE]) for i in range(0, len(terms), _TERMS_PER_LINE)]


def export_lp_text(p: PrimalLP, path: str | Path) -> Path:
    """CPLEX-style LP file: Minimize C subject to the named rows, all variables >= 0."""
    path = Path(path)
    names = p.variable_names
    lines = [
        f"\\ bidding-lab primal r={p.r!r} a={p.a} n={p.n} m={p.m}",
        "Minimize",
        " obj: C",
        "Subject To",
    ]
    for i, name in enumerate(p.row_names):
        row = p.a_ub.getrow(i)
        coefs, bound, sense = row.data, float(p.b_ub[i]), "<="
        if name == "lam":
            coefs, bound, sense = -coefs, -bound, ">="
        chunks = _format_terms(coefs, row.indices, names)
        lines.append(f" {name}: {chunks[0]}")
        lines.extend(f"   {chunk}" for chunk in chunks[1:])
        lines.append(f"   {sense} {bound:.17g}")
    lines.append("Bounds")
    lines.extend(f" {name} >= 0" for name in names)
    lines.append("End")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise LPIOError(f"cannot write LP file {path}: {exc}") from exc
    log.info("lp_written path=%s rows=%s variables=%s", path, len(p.row_names), p.num_variables)
    return path


def parse_lp_text(path: str | Path) -> PrimalLP:
    """Read a file produced by ``export_lp_text`` back into a PrimalLP."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LPIOError(f"cannot read LP file {path}: {exc}") from exc
    lines = text.splitlines()
    header = _HEADER.match(lines[0]) if lines else None
    if header is None:
        raise ParseError(f"{path}: missing bidding-lab header line")
    r, a, n, m = float(header.group(1)), int(header.group(2)), int(header.group(3)), int(header.group(4))
    columns = {variable_name(k): k + n for k in range(-n, m + 1)}
    columns["C"] = n + m + 1

    try:
        start = lines.index("Subject To") + 1
        stop = lines.index("Bounds")
    except ValueError as exc:
        raise ParseError(f"{path}: missing section: {exc}") from exc

    bodies: list[tuple[str, str]] = []
    for line in lines[start:stop]:
        if ":" in line:
            name, body = line.split(":", 1)
            bodies.append((name.strip(), body))
        elif bodies:
            bodies[-1] = (bodies[-1][0], bodies[-1][1] + " " + line)

    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    rhs: list[float] = []
    names: list[str] = []
    for i, (name, body) in enumerate(bodies):
        match = re.search(r"(<=|>=)\s*(\S+)\s*$", body)
        if match is None:
            raise ParseError(f"{path}: row {name} has no sense")
        flip = -1.0 if match.group(1) == ">=" else 1.0
        for sign, value, var in _TERM.findall(body[: match.start()]):
            if var not in columns:
                raise ParseError(f"{path}: unknown variable {var} in row {name}")
            coef = float(value) * (-1.0 if sign == "-" else 1.0)
            rows.append(i)
            cols.append(columns[var])
            data.append(flip * coef)
        rhs.append(flip * float(match.group(2)))
        names.append(name)
    a_ub = sparse.csr_matrix((data, (rows, cols)), shape=(len(names), n + m + 2))
    return PrimalLP(r=r, a=a, n=n, m=m, a_ub=a_ub, b_ub=np.asarray(rhs), row_names=names)


def solve_primal(p: PrimalLP) -> tuple[float, np.ndarray]:
    """Optimal C and the optimal z, via HiGHS."""
    cost = np.zeros(p.num_variables)
    cost[-1] = 1.0
    result = linprog(cost, A_ub=p.a_ub, b_ub=p.b_ub, bounds=(0, None), method="highs")
    if not result.success:
        raise NonConvergenceError(f"primal LP not solved: {result.message}")
    log.info("primal_solved r=%s a=%s n=%s m=%s objective=%.12g", p.r, p.a, p.n, p.m, result.fun)
    return float(result.fun), np.asarray(result.x)


def discretize_function(B: BiddingFunction, a: int, n: int, m: int) -> np.ndarray:
    """z = (x_{-n}..x_m, C) with x_k = a * integral of B over [k/a, (k+1)/a], scaled to x_0 = 1."""
    _check_sizes(a, n, m)
    edges = np.arange(-n, m + 2, dtype=float) / a + B.reference_point
    mass = np.asarray(cumulative_mass(B, edges))
    if not np.all(np.isfinite(mass)):
        raise ValueError(f"function window does not cover [{edges[0]}, {edges[-1]}]")
    x = a * np.diff(mass)
    x = x / x[n]
    c = float(np.sum(x[: n + min(m, a - 1) + 1])) / a
    return np.append(x, c)


def primal_objective(p: PrimalLP, z: np.ndarray) -> float:
    return float(z[p.num_variables - 1])


def primal_violation(p: PrimalLP, z: np.ndarray) -> float:
    """Largest positive constraint or sign violation of z (0 when feasible)."""
    slack = p.a_ub @ z - p.b_ub
    return float(max(0.0, np.max(slack), np.max(-z)))
