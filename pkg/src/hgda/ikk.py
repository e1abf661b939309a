"""Layout for graphs whose vertices carry sizes (bounding-circle radii).

Sized vertices are reduced to the plain spring embedder on a weighted
graph with dimensionless vertices: every edge weight is raised to at
least the separation its endpoint circles require, the weighted distances
drive a standard layout round, and any circles still overlapping get
their connecting weights grown (or the whole canvass grown, when the
offenders are non-adjacent) before the next round.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphInputError
from .graph import Graph, apsp, connected_components
from .kk import KkParams, Layout, kk_layout

__all__ = ["SizedGraph", "IkkParams", "overlap_pairs", "ikk_layout"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SizedGraph:
    """Connected graph with positive edge weights and per-vertex radii."""

    base: Graph
    radii: np.ndarray

    def __post_init__(self):
        radii = np.ascontiguousarray(self.radii, dtype=float)
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)
        if radii.shape != (self.base.n,):
            raise GraphInputError("need exactly one radius per vertex")
        if self.base.n and np.min(radii) <= 0:
            raise GraphInputError("radii must be positive")
        if any(w <= 0 for w in (self.base.weights or ())):
            raise GraphInputError("edge weights must be positive")
        if self.base.n > 1 and len(connected_components(self.base)) != 1:
            raise GraphInputError("sized graph must be connected")


@dataclass(frozen=True)
class IkkParams:
    inner: KkParams = field(default_factory=KkParams)
    growth: float = 1.3
    max_rounds: int = 15
    clearance: float = 0.1

    def __post_init__(self):
        if self.growth <= 1:
            raise GraphInputError(f"growth must be > 1, got {self.growth}")
        if self.max_rounds < 1 or self.clearance < 0:
            raise GraphInputError("max_rounds must be >= 1 and clearance >= 0")


def required_gap(r_u: float, r_v: float, clearance: float) -> float:
    """Minimum center distance for two circles to count as separated."""
    return r_u + r_v + clearance * min(r_u, r_v)


def overlap_pairs(layout: Layout, radii: np.ndarray,
                  clearance: float = 0.0) -> list[tuple[int, int]]:
    """All vertex pairs whose circles sit closer than their required gap."""
    pos = layout.positions
    n = pos.shape[0]
    pairs = []
    for u in range(n):
        for v in range(u + 1, n):
            d = float(np.hypot(pos[u, 0] - pos[v, 0], pos[u, 1] - pos[v, 1]))
            if d < required_gap(radii[u], radii[v], clearance):
                pairs.append((u, v))
    return pairs


def ikk_layout(g: SizedGraph, p: IkkParams, seed: int) -> Layout:
    """Overlap-free placement of sized vertices, or a flagged best effort.

    Rounds: raise each edge weight to the separation its endpoints need,
    lay out the weighted graph, and stop once no circles overlap.  Leftover
    overlaps grow the incident weights (adjacent pairs) or the canvass
    scale (non-adjacent pairs) for the next round.  Never raises on
    non-convergence; the last layout comes back with the unresolved
    overlap count set.
    """
    n = g.base.n
    if n == 0:
        return kk_layout(apsp(g.base), p.inner, seed)
    radii = g.radii
    # Canvass big enough for all circles at desk scale; never smaller than
    # the configured side so the zero-size limit degenerates to plain KK.
    base_side = 2.0 * float(np.sum(radii))
    if n == 1:
        side = max(p.inner.L0, base_side)
        c = side / 2.0
        return Layout(positions=np.array([[c, c]]), canvass=side)

    weights = np.array([g.base.weight_of(i) for i in range(len(g.base.edges))])
    for i, (u, v) in enumerate(g.base.edges):
        weights[i] = max(weights[i], required_gap(radii[u], radii[v], p.clearance))
    edge_index = {e: i for i, e in enumerate(g.base.edges)}

    scale = 1.0
    layout = None
    leftover: list[tuple[int, int]] = []
    for round_no in range(p.max_rounds):
        side = max(p.inner.L0, base_side * scale)
        params = p.inner.with_canvass(side) if side != p.inner.L0 else p.inner
        weighted = Graph(n=n, edges=g.base.edges, weights=tuple(weights))
        layout = kk_layout(apsp(weighted), params, seed)
        leftover = overlap_pairs(layout, radii, p.clearance)
        if not leftover:
            return layout
        grew_scale = False
        for (u, v) in leftover:
            idx = edge_index.get((u, v))
            if idx is not None:
                weights[idx] *= p.growth
            elif not grew_scale:
                scale *= p.growth
                grew_scale = True
        log.debug("overlap round %d: %d pairs left", round_no + 1, len(leftover))

    log.warning("gave up separating circles after %d rounds (%d pairs overlap)",
                p.max_rounds, len(leftover))
    return Layout(positions=layout.positions, canvass=layout.canvass,
                  converged=layout.converged, residual=layout.residual,
                  unresolved_overlaps=len(leftover))
