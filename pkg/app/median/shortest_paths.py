from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np

from app.errors import DisconnectedGraphError
from app.median.graph import adjacency
from app.models.graphs import WeightedGraph

log = logging.getLogger(__name__)


def dijkstra(adj: list[list[tuple[int, float]]], source: int) -> np.ndarray:
    """Single-source shortest path lengths by label setting on a binary heap."""
    dist = [math.inf] * len(adj)
    dist[source] = 0.0
    done = [False] * len(adj)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.asarray(dist)


def shortest_path_matrix(g: WeightedGraph, sources: Iterable[int] | None = None, threads: int = 1) -> np.ndarray:
    """Rows are distances from each source (all vertices when sources is None)."""
    src = list(range(g.vertex_count)) if sources is None else list(sources)
    if not src:
        raise ValueError("sources must be nonempty")
    adj = adjacency(g)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(lambda s: dijkstra(adj, s), src))
    table = np.vstack(rows)
    if not np.all(np.isfinite(table)):
        raise DisconnectedGraphError("some vertex is unreachable")
    log.debug("distance_table sources=%s vertices=%s", len(src), g.vertex_count)
    return table
