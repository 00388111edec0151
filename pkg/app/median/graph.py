from __future__ import annotations

import csv
import hashlib
import logging
import math
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import minimum_spanning_tree

from app.bidding.sampling import make_rng
from app.errors import DisconnectedGraphError, NonpositiveWeightError, ParseError
from app.models.graphs import WeightedGraph

log = logging.getLogger(__name__)

EXPECTED_HEADER = ["u", "v", "weight"]


def adjacency(g: WeightedGraph) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.vertex_count)]
    for u, v, w in g.edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def is_connected(g: WeightedGraph) -> bool:
    adj = adjacency(g)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.vertex_count


def graph_from_edges(raw: list[tuple[int, int, float]]) -> WeightedGraph:
    """Relabel ids densely, merge both orientations by minimum weight, drop self-loops."""
    labels = sorted({u for u, _, _ in raw} | {v for _, v, _ in raw})
    if not labels:
        raise ParseError("graph has no edges")
    index = {label: i for i, label in enumerate(labels)}
    merged: dict[tuple[int, int], float] = {}
    for u, v, w in raw:
        if not w > 0 or math.isinf(w):
            raise NonpositiveWeightError(f"edge ({u}, {v}) has weight {w}")
        if u == v:
            continue
        key = (min(index[u], index[v]), max(index[u], index[v]))
        merged[key] = min(w, merged.get(key, math.inf))
    edges = [(a, b, w) for (a, b), w in sorted(merged.items())]
    g = WeightedGraph(vertex_count=len(labels), edges=edges, labels=labels)
    if not is_connected(g):
        raise DisconnectedGraphError(f"graph with {g.vertex_count} vertices is not connected")
    return g


def load_graph(path: str | Path) -> WeightedGraph:
    """Edge-list CSV with header ``u,v,weight``."""
    raw: list[tuple[int, int, float]] = []
    try:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = [cell.strip() for cell in next(reader, [])]
            if header != EXPECTED_HEADER:
                raise ParseError(f"{path}: expected header u,v,weight, got {','.join(header)}")
            for line_no, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != 3:
                    raise ParseError(f"{path}:{line_no}: expected 3 fields, got {len(row)}")
                try:
                    raw.append((int(row[0]), int(row[1]), float(row[2])))
                except ValueError as exc:
                    raise ParseError(f"{path}:{line_no}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read graph {path}: {exc}") from exc
    g = graph_from_edges(raw)
    log.info("graph_loaded path=%s vertices=%s edges=%s", path, g.vertex_count, len(g.edges))
    return g


def write_graph(g: WeightedGraph, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = g.labels or list(range(g.vertex_count))
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPECTED_HEADER)
        for u, v, w in g.edges:
            writer.writerow([labels[u], labels[v], repr(w)])
    return path


def graph_hash(g: WeightedGraph) -> str:
    digest = hashlib.sha256()
    digest.update(f"n={g.vertex_count}\n".encode())
    for u, v, w in sorted(g.edges):
        digest.update(f"{u},{v},{w!r}\n".encode())
    return digest.hexdigest()


def grid_road_graph(
    rows: int,
    cols: int,
    seed: int,
    drop_rate: float = 0.15,
    diagonal_rate: float = 0.05,
) -> WeightedGraph:
    """Perturbed grid with a few diagonal shortcuts and dropped streets; always connected."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least two vertices")
    rng = make_rng(seed)

    def vid(i: int, j: int) -> int:
        return i * cols + j

    streets = [(vid(i, j), vid(i, j + 1)) for i in range(rows) for j in range(cols - 1)]
    streets += [(vid(i, j), vid(i + 1, j)) for i in range(rows - 1) for j in range(cols)]
    weights = 1.0 + 0.5 * rng.random(len(streets))

    # a random spanning tree of the grid is never dropped
    n = rows * cols
    u_idx = np.array([u for u, _ in streets])
    v_idx = np.array([v for _, v in streets])
    order_keys = rng.random(len(streets)) + 1.0
    tree = minimum_spanning_tree(sparse.coo_matrix((order_keys, (u_idx, v_idx)), shape=(n, n))).tocoo()
    in_tree = {(min(a, b), max(a, b)) for a, b in zip(tree.row.tolist(), tree.col.tolist())}

    drops = rng.random(len(streets)) < drop_rate
    edges = [
        (u, v, float(w))
        for (u, v), w, drop in zip(streets, weights, drops)
        if (u, v) in in_tree or not drop
    ]
    for i in range(rows - 1):
        for j in range(cols - 1):
            if rng.random() < diagonal_rate:
                edges.append((vid(i, j), vid(i + 1, j + 1), float(math.sqrt(2.0) * (1.0 + 0.5 * rng.random()))))
    g = WeightedGraph(vertex_count=n, edges=edges, labels=list(range(n)))
    log.info("synthetic_graph rows=%s cols=%s seed=%s edges=%s", rows, cols, seed, len(edges))
    return g
