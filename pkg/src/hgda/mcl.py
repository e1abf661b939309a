"""Markov clustering: stochastic flow simulation by expansion/inflation.

The flow matrix is dense and column-stochastic (columns sum to 1).  The
limit matrix is interpreted through its attractors: vertices that keep
self-flow seed the clusters, every other vertex joins the attractor that
receives most of its column's flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphInputError
from .graph import Graph, adjacency_matrix, connected_components, induced_subgraph

__all__ = [
    "MclParams",
    "Clustering",
    "build_stochastic",
    "expand",
    "inflate",
    "mcl_cluster",
]


@dataclass(frozen=True)
class MclParams:
    expansion: int = 2
    inflation: float = 2.0
    loop_weight: float = 1.0
    prune_threshold: float = 1e-6
    tol: float = 1e-8
    max_iter: int = 100
    attractor_threshold: float = 1e-6

    def __post_init__(self):
        if self.expansion < 2:
            raise GraphInputError(f"expansion power must be >= 2, got {self.expansion}")
        if self.inflation <= 1:
            raise GraphInputError(f"inflation power must be > 1, got {self.inflation}")
        if self.loop_weight <= 0:
            raise GraphInputError(f"loop weight must be > 0, got {self.loop_weight}")
        if self.prune_threshold < 0:
            raise GraphInputError("prune threshold must be >= 0")
        if self.tol <= 0 or self.max_iter < 1:
            raise GraphInputError("tol must be > 0 and max_iter >= 1")


@dataclass(frozen=True)
class Clustering:
    """Disjoint clusters (sorted by smallest member) with one attractor each."""

    clusters: tuple[tuple[int, ...], ...]
    attractors: tuple[int, ...]
    converged: bool = True
    iterations: int = 0


def build_stochastic(a: np.ndarray, loop_weight: float = 1.0) -> np.ndarray:
    """Column-normalize the adjacency matrix after adding self-loops."""
    if loop_weight <= 0:
        raise GraphInputError(f"loop weight must be > 0, got {loop_weight}")
    m = np.asarray(a, dtype=float) + loop_weight * np.eye(a.shape[0])
    return m / m.sum(axis=0, keepdims=True)


def expand(m: np.ndarray, e: int) -> np.ndarray:
    """Raise the flow matrix to an integer power (spreads flow along paths)."""
    return np.linalg.matrix_power(m, e)


def inflate(m: np.ndarray, r: float, prune: float = 0.0) -> np.ndarray:
    """Entrywise power, pruning of tiny entries, column renormalization."""
    out = np.power(m, r)
    if prune > 0.0:
        out[out < prune] = 0.0
    sums = out.sum(axis=0, keepdims=True)
    if np.any(sums == 0.0):
        dead = [int(j) for j in np.flatnonzero(sums[0] == 0.0)]
        raise GraphInputError(f"inflation pruned columns {dead} to zero; cannot renormalize")
    return out / sums


def mcl_cluster(g: Graph, p: MclParams = MclParams()) -> Clustering:
    """Run the expand/inflate loop to its limit and read off the clusters.

    Iterates until the max absolute cell change drops below ``p.tol`` or
    ``p.max_iter`` is hit (the best-effort result is then flagged
    unconverged).  Clusters whose induced subgraph is disconnected are
    split into their connected pieces so that each output cluster is
    connected.
    """
    n = g.n
    if n == 0:
        return Clustering(clusters=(), attractors=())
    m = build_stochastic(adjacency_matrix(g), p.loop_weight)
    converged = False
    iterations = 0
    for iterations in range(1, p.max_iter + 1):
        nxt = inflate(expand(m, p.expansion), p.inflation, p.prune_threshold)
        delta = float(np.max(np.abs(nxt - m)))
        m = nxt
        if delta < p.tol:
            converged = True
            break

    attractors = [v for v in range(n) if m[v, v] > p.attractor_threshold]
    members: dict[int, list[int]] = {}
    for u in range(n):
        if attractors:
            flows = m[attractors, u]
            best = int(np.argmax(flows))  # first max = lowest attractor id
            if flows[best] > 0.0:
                members.setdefault(attractors[best], []).append(u)
                continue
        # No attractor receives flow from u: keep it as its own cluster.
        members.setdefault(u, []).append(u)

    clusters: list[tuple[int, ...]] = []
    cluster_attractors: list[int] = []
    for attractor, vs in members.items():
        sub, id_map = induced_subgraph(g, vs)
        for piece in connected_components(sub):
            original = tuple(id_map[v] for v in piece)
            clusters.append(original)
            cluster_attractors.append(attractor if attractor in original else original[0])

    order = sorted(range(len(clusters)), key=lambda i: clusters[i][0])
    return Clustering(
        clusters=tuple(clusters[i] for i in order),
        attractors=tuple(cluster_attractors[i] for i in order),
        converged=converged,
        iterations=iterations,
    )
