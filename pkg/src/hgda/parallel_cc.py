"""Connected components via per-partition spanning forests merged with
find/union.

Edges are split into contiguous row blocks of the adjacency matrix, each
block yields a spanning forest over the full vertex set, and the forests
are merged pairwise up a balanced binary tree.  The merges are simulated
sequentially but each consumes two immutable forests and owns its
disjoint-set exclusively, so the tree is safe to evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import GraphInputError
from .graph import Graph

__all__ = [
    "DisjointSet",
    "SpanningForest",
    "MergeStats",
    "partition_edges",
    "spanning_forest",
    "merge_forests",
    "parallel_components",
    "parallel_components_detailed",
]


class DisjointSet:
    """Union-find over 0..n-1 with union by rank and path compression.

    ``find_calls`` counts find invocations; ``union_calls`` counts unions
    that actually joined two distinct sets.
    """

    __slots__ = ("parent", "rank", "find_calls", "union_calls")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.find_calls = 0
        self.union_calls = 0

    def find(self, x: int) -> int:
        self.find_calls += 1
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Unite the sets containing x and y; True if they were distinct."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self._link(rx, ry)
        return True

    def _link(self, rx: int, ry: int) -> None:
        # rx, ry must already be distinct roots
        self.union_calls += 1
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1

    def groups(self) -> list[list[int]]:
        by_root: dict[int, list[int]] = {}
        for v in range(len(self.parent)):
            by_root.setdefault(self.find(v), []).append(v)
        return sorted((sorted(g) for g in by_root.values()), key=lambda g: g[0])


@dataclass(frozen=True)
class SpanningForest:
    """Acyclic edge set over n vertices (at most n-1 edges)."""

    n: int
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class MergeStats:
    find_calls: int
    union_calls: int
    edges_examined: int


def partition_edges(g: Graph, p: int) -> list[list[tuple[int, int]]]:
    """Split the edge set into p parts by contiguous row blocks.

    Edge (u, v) with u < v belongs to the block containing row u; blocks
    are the even split of rows 0..n-1.  Parts may be empty.
    """
    if p < 1:
        raise GraphInputError(f"partition count must be >= 1, got {p}")
    parts: list[list[tuple[int, int]]] = [[] for _ in range(p)]
    if g.n == 0:
        return parts
    bounds = [(i * g.n) // p for i in range(p + 1)]

    def block_of(u: int) -> int:
        for b in range(p):
            if bounds[b] <= u < bounds[b + 1]:
                return b
        return p - 1

    for u, v in g.edges:
        parts[block_of(min(u, v))].append((u, v))
    return parts


def spanning_forest(edges: Iterable[tuple[int, int]], n: int) -> SpanningForest:
    """Forest spanning the components of the given partial edge set.

    Sequential union-find scan in sorted edge order; an edge is kept iff
    it joins two previously separate trees.
    """
    ds = DisjointSet(n)
    kept = []
    for u, v in sorted(edges):
        if u >= n or v >= n or u < 0 or v < 0:
            raise GraphInputError(f"edge ({u}, {v}) outside 0..{n - 1}")
        if ds.union(u, v):
            kept.append((u, v))
    return SpanningForest(n=n, edges=tuple(kept))


def merge_forests(a: SpanningForest, b: SpanningForest) -> tuple[SpanningForest, MergeStats]:
    """Merge two forests so the result spans the components of their union.

    Seeds a disjoint set from b's edges, then examines each edge of a with
    two finds, uniting (and keeping the edge) when the endpoints lie in
    different trees.  The returned stats expose the find/union counts,
    which are bounded by 2(n-1) + 2|a.edges| finds and n-1 unions.
    """
    if a.n != b.n:
        raise GraphInputError(f"cannot merge forests over {a.n} and {b.n} vertices")
    ds = DisjointSet(a.n)
    merged = list(b.edges)
    for u, v in b.edges:
        ru, rv = ds.find(u), ds.find(v)
        if ru == rv:
            raise GraphInputError("forest b contains a cycle")
        ds._link(ru, rv)
    for u, v in a.edges:
        ru, rv = ds.find(u), ds.find(v)
        if ru != rv:
            ds._link(ru, rv)
            merged.append((u, v))
    stats = MergeStats(find_calls=ds.find_calls, union_calls=ds.union_calls,
                       edges_examined=len(a.edges) + len(b.edges))
    return SpanningForest(n=a.n, edges=tuple(sorted(merged))), stats


def parallel_components_detailed(g: Graph, p: int) -> tuple[list[list[int]], list[MergeStats]]:
    """Components via the partition/forest/merge scheme, with merge stats."""
    parts = partition_edges(g, p)
    forests = [spanning_forest(part, g.n) for part in parts]
    stats: list[MergeStats] = []
    while len(forests) > 1:
        nxt = []
        for i in range(0, len(forests) - 1, 2):
            merged, st = merge_forests(forests[i], forests[i + 1])
            nxt.append(merged)
            stats.append(st)
        if len(forests) % 2:
            nxt.append(forests[-1])
        forests = nxt
    ds = DisjointSet(g.n)
    for u, v in forests[0].edges:
        ds.union(u, v)
    return ds.groups(), stats


def parallel_components(g: Graph, p: int) -> list[list[int]]:
    """Same partition as the sequential traversals, computed by forest merging."""
    return parallel_components_detailed(g, p)[0]
