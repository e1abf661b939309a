"""Graph container and graph-theoretic primitives.

Undirected simple graphs over dense integer ids 0..n-1.  Everything here is
a pure function of its inputs; the containers are frozen and safe to share.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DisconnectedGraphError, GraphInputError

__all__ = [
    "Graph",
    "DistanceMatrix",
    "DegreeStats",
    "from_edge_list",
    "adjacency_matrix",
    "connected_components",
    "apsp",
    "induced_subgraph",
    "degree_stats",
    "generate_scale_free",
]


# ----------------------------------------------------------------------
# Containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: ``n`` vertices, deduplicated edge tuple.

    Edges are stored as sorted ``(u, v)`` pairs with ``u < v``; ``weights``
    is either ``None`` (all edges weigh 1) or a tuple parallel to ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: Optional[tuple[float, ...]] = None

    def weight_of(self, index: int) -> float:
        return 1.0 if self.weights is None else self.weights[index]

    def adjacency_list(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degree_of(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs shortest-path distances; symmetric, zero diagonal."""

    cells: np.ndarray
    connected: bool = True

    def __post_init__(self):
        self.cells.setflags(write=False)

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    def diameter(self) -> float:
        return float(self.cells.max()) if self.n else 0.0


@dataclass(frozen=True)
class DegreeStats:
    """Degree histogram plus an optional log-log power-law fit.

    ``alpha``/``beta`` are the least-squares estimates of the scale and
    exponent of ``frequency(d) ~ alpha * d**beta``; both are ``None`` when
    fewer than two distinct positive degrees are present.
    """

    histogram: dict[int, int]
    alpha: Optional[float] = None
    beta: Optional[float] = None


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------

def from_edge_list(pairs: Iterable[Sequence], n: int) -> Graph:
    """Build a Graph from ``(u, v)`` or ``(u, v, w)`` rows.

    Self-loops are dropped, (u,v)/(v,u) duplicates collapse to one edge
    (first weight wins).  Raises on ids outside 0..n-1 and on weights <= 0.
    """
    if n < 0:
        raise GraphInputError(f"vertex count must be >= 0, got {n}")
    seen: dict[tuple[int, int], float] = {}
    any_weight = False
    for row in pairs:
        if len(row) == 3:
            u, v, w = row
            w = float(w)
            any_weight = True
        else:
            u, v = row
            w = 1.0
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphInputError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if w <= 0:
            raise GraphInputError(f"edge ({u}, {v}) has non-positive weight {w}")
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key not in seen:
            seen[key] = w
    edges = tuple(sorted(seen))
    weights = tuple(seen[e] for e in edges) if any_weight else None
    return Graph(n=n, edges=edges, weights=weights)


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Dense 0/1 adjacency matrix (symmetric, zero diagonal)."""
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


# ----------------------------------------------------------------------
# Connectivity
# ----------------------------------------------------------------------

def connected_components(g: Graph, method: str = "dfs") -> list[list[int]]:
    """Partition vertices into connected components.

    Both traversals produce the same partition; components are ordered by
    their smallest member and each is sorted ascending.
    """
    if method not in ("dfs", "bfs"):
        raise GraphInputError(f"unknown traversal {method!r} (expected 'dfs' or 'bfs')")
    adj = g.adjacency_list()
    seen = [False] * g.n
    components: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        frontier = deque([start])
        members = [start]
        while frontier:
            v = frontier.pop() if method == "dfs" else frontier.popleft()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    members.append(w)
                    frontier.append(w)
        components.append(sorted(members))
    return components


def induced_subgraph(g: Graph, vs: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph on ``vs`` relabeled to 0..|vs|-1, plus the new->old id map."""
    id_map = sorted(set(vs))
    for v in id_map:
        if not (0 <= v < g.n):
            raise GraphInputError(f"vertex {v} outside 0..{g.n - 1}")
    new_id = {old: new for new, old in enumerate(id_map)}
    rows = []
    for i, (u, v) in enumerate(g.edges):
        if u in new_id and v in new_id:
            rows.append((new_id[u], new_id[v], g.weight_of(i)))
    sub = from_edge_list(rows, len(id_map))
    if g.weights is None:
        sub = Graph(n=sub.n, edges=sub.edges, weights=None)
    return sub, id_map


# ----------------------------------------------------------------------
# Shortest paths
# ----------------------------------------------------------------------

def apsp(g: Graph, method: str = "auto") -> DistanceMatrix:
    """All-pairs shortest-path distances.

    ``auto`` runs per-vertex BFS (hop counts) on unweighted graphs and
    Floyd-Warshall on weighted ones; ``bfs``/``floyd`` force a route.
    Raises :class:`DisconnectedGraphError` on disconnected input.
    """
    comps = connected_components(g)
    if len(comps) > 1:
        raise DisconnectedGraphError(comps)
    if method == "auto":
        method = "floyd" if g.weights is not None else "bfs"
    if method == "bfs":
        if g.weights is not None:
            raise GraphInputError("BFS distances require an unweighted graph")
        cells = _apsp_bfs(g)
    elif method == "floyd":
        cells = _apsp_floyd(g)
    else:
        raise GraphInputError(f"unknown APSP method {method!r}")
    return DistanceMatrix(cells=cells, connected=True)


def _apsp_bfs(g: Graph) -> np.ndarray:
    adj = g.adjacency_list()
    n = g.n
    cells = np.zeros((n, n))
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
        cells[s] = dist
    return cells


def _apsp_floyd(g: Graph) -> np.ndarray:
    n = g.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for i, (u, v) in enumerate(g.edges):
        w = g.weight_of(i)
        if w < d[u, v]:
            d[u, v] = w
            d[v, u] = w
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


# ----------------------------------------------------------------------
# Degree statistics
# ----------------------------------------------------------------------

def degree_stats(g: Graph) -> DegreeStats:
    """Exact degree histogram with a log-log least-squares power fit."""
    degrees = [0] * g.n
    for u, v in g.edges:
        degrees[u] += 1
        degrees[v] += 1
    histogram: dict[int, int] = {}
    for d in degrees:
        histogram[d] = histogram.get(d, 0) + 1
    points = [(d, c) for d, c in sorted(histogram.items()) if d > 0 and c > 0]
    if len(points) < 2:
        return DegreeStats(histogram=histogram)
    xs = [math.log(d) for d, _ in points]
    ys = [math.log(c) for _, c in points]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    beta = sxy / sxx
    alpha = math.exp(my - beta * mx)
    return DegreeStats(histogram=histogram, alpha=alpha, beta=beta)


# ----------------------------------------------------------------------
# Synthetic inputs
# ----------------------------------------------------------------------

def generate_scale_free(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment graph: (m+1)-clique seed, m edges per newcomer.

    Deterministic for a fixed seed; always connected.  Edge count is
    C(m+1, 2) + m * (n - m - 1).
    """
    if m < 1:
        raise GraphInputError(f"edges per vertex must be >= 1, got {m}")
    if n <= m:
        raise GraphInputError(f"need n > m, got n={n}, m={m}")
    rng = random.Random(seed)
    m0 = m + 1
    edges = [(u, v) for u in range(m0) for v in range(u + 1, m0)]
    # One entry per unit of degree: sampling uniformly from this list is
    # sampling vertices proportionally to their degree.
    repeated = [v for v in range(m0) for _ in range(m0 - 1)]
    for v in range(m0, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[rng.randrange(len(repeated))])
        for t in sorted(targets):
            edges.append((t, v))
            repeated.append(t)
        repeated.extend([v] * m)
    return from_edge_list(edges, n)
