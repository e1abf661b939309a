"""Seven-stage hybrid layout pipeline.

Stages: connected components -> per-component Markov clustering ->
per-cluster spring layout -> cluster proxy ("phantom") graph -> sized
layout of the proxies -> chaining of components into a path -> sized
layout of the chain.  The final drawing composes the three levels by
rigid per-cluster translation only, so every cluster keeps the exact
shape its own layout produced.

Coordinates and translation offsets are snapped to a fixed binary grid
(2^-40) before composing; sums of grid-aligned values are exact in
binary64 at desk scale, which keeps intra-cluster distances bit-identical
through composition.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import GraphInputError
from .graph import Graph, apsp, connected_components, induced_subgraph
from .ikk import IkkParams, SizedGraph, ikk_layout, overlap_pairs
from .kk import KkParams, Layout, kk_layout
from .mcl import Clustering, MclParams, mcl_cluster

__all__ = [
    "PhantomGraph",
    "HgdaConfig",
    "ComponentResult",
    "PipelineReport",
    "HgdaResult",
    "phantom_graph_for_component",
    "chain_components",
    "compose",
    "run_hgda",
    "snap_to_grid",
]

log = logging.getLogger(__name__)

GRID = 2.0 ** -40
RADIUS_MARGIN = 1.05
RADIUS_FLOOR_FACTOR = 0.05


def snap_to_grid(values: np.ndarray) -> np.ndarray:
    """Round coordinates to the composition grid (multiples of 2^-40)."""
    return np.round(np.asarray(values, dtype=float) / GRID) * GRID


def bounding_radius(points: np.ndarray, canvass: float) -> float:
    """Radius of the centroid-centered circle containing all points, with a
    5% margin; floored at 5% of the canvass so single points keep a size."""
    floor = RADIUS_FLOOR_FACTOR * canvass
    if len(points) == 0:
        return floor
    centroid = points.mean(axis=0)
    r = float(np.max(np.hypot(points[:, 0] - centroid[0], points[:, 1] - centroid[1])))
    return max(RADIUS_MARGIN * r, floor)


@dataclass(frozen=True)
class PhantomGraph:
    """Clusters or components abstracted to sized proxy vertices.

    ``provenance[i]`` lists what proxy vertex ``i`` stands for (original
    vertex ids at the cluster level, component indices at the chain level).
    """

    graph: Graph
    radii: np.ndarray
    provenance: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        radii = np.ascontiguousarray(self.radii, dtype=float)
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class HgdaConfig:
    kk: KkParams = field(default_factory=KkParams)
    mcl: MclParams = field(default_factory=MclParams)
    ikk: Optional[IkkParams] = None
    seed: int = 0

    def ikk_params(self) -> IkkParams:
        return self.ikk if self.ikk is not None else IkkParams(inner=self.kk)


@dataclass
class ComponentResult:
    vertices: tuple[int, ...]               # original vertex ids, ascending
    clustering: Clustering                  # component-local ids
    cluster_layouts: list[Layout]           # one grid-snapped layout per cluster
    phantom: PhantomGraph                   # provenance holds original ids
    phantom_layout: Layout                  # cluster centers, grid-snapped


@dataclass
class StageTiming:
    name: str
    seconds: float


@dataclass
class PipelineReport:
    component_count: int = 0
    cluster_counts: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timings: list[StageTiming] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return not self.warnings


@dataclass
class HgdaResult:
    final: Layout
    components: list[ComponentResult]
    chain: PhantomGraph
    chain_layout: Layout
    report: PipelineReport


# ----------------------------------------------------------------------
# Phantom construction
# ----------------------------------------------------------------------

def phantom_graph_for_component(component: Graph, clustering: Clustering,
                                cluster_layouts: list[Layout]) -> PhantomGraph:
    """One sized proxy vertex per cluster, joined wherever any original
    edge crosses between two clusters."""
    m = len(clustering.clusters)
    if m != len(cluster_layouts):
        raise GraphInputError(f"{m} clusters but {len(cluster_layouts)} layouts")
    for j, lay in enumerate(cluster_layouts):
        if lay.n != len(clustering.clusters[j]):
            raise GraphInputError(f"cluster {j} has {len(clustering.clusters[j])} "
                                  f"vertices but its layout has {lay.n}")
        if lay.n == 0:
            raise GraphInputError(f"cluster {j} has an empty layout")
    cluster_of = {}
    for j, members in enumerate(clustering.clusters):
        for v in members:
            cluster_of[v] = j
    crossing = set()
    for u, v in component.edges:
        ju, jv = cluster_of[u], cluster_of[v]
        if ju != jv:
            crossing.add((min(ju, jv), max(ju, jv)))
    radii = np.array([bounding_radius(lay.positions, lay.canvass)
                      for lay in cluster_layouts])
    return PhantomGraph(
        graph=Graph(n=m, edges=tuple(sorted(crossing)), weights=None),
        radii=radii,
        provenance=tuple(tuple(c) for c in clustering.clusters),
    )


def chain_components(phantoms: list[tuple[int, float]]) -> PhantomGraph:
    """Link component proxies into a simple path, largest radius first.

    The path has n-1 edges, max degree 2 and no cycles; ties in radius
    break toward the lower component index.
    """
    if not phantoms:
        raise GraphInputError("need at least one component")
    radius_of = dict(phantoms)
    if sorted(radius_of) != list(range(len(phantoms))):
        raise GraphInputError("component ids must be 0..n-1")
    order = sorted(radius_of, key=lambda i: (-radius_of[i], i))
    edges = tuple(sorted((min(a, b), max(a, b))
                         for a, b in zip(order, order[1:])))
    radii = np.empty(len(phantoms))
    for i, r in phantoms:
        radii[i] = r
    return PhantomGraph(
        graph=Graph(n=len(phantoms), edges=edges, weights=None),
        radii=radii,
        provenance=tuple((i,) for i in range(len(phantoms))),
    )


# ----------------------------------------------------------------------
# Composition
# ----------------------------------------------------------------------

def _cluster_offsets(cluster_layouts: list[Layout], centers: np.ndarray) -> np.ndarray:
    """Grid-snapped translation taking each cluster centroid to its center."""
    offsets = np.empty((len(cluster_layouts), 2))
    for j, lay in enumerate(cluster_layouts):
        offsets[j] = snap_to_grid(centers[j] - lay.positions.mean(axis=0))
    return offsets


def compose(n: int, chain: PhantomGraph, chain_layout: Layout,
            components: list[ComponentResult]) -> Layout:
    """Assemble the final drawing by per-cluster rigid translation.

    Every vertex lands at: cluster-local position + (cluster center -
    cluster centroid) + (component center - component centroid), with both
    offsets snapped to the composition grid so the additions are exact.
    """
    if chain.n != len(components):
        raise GraphInputError(f"chain has {chain.n} proxies but {len(components)} components")
    final = np.full((n, 2), np.nan)
    for ci in range(chain.n):
        comp_idx = chain.provenance[ci][0]
        comp = components[comp_idx]
        if len(comp.phantom.provenance) != len(comp.cluster_layouts):
            raise GraphInputError(f"component {comp_idx}: provenance/layout count mismatch")
        offsets = _cluster_offsets(comp.cluster_layouts, comp.phantom_layout.positions)
        placed = [lay.positions + offsets[j]
                  for j, lay in enumerate(comp.cluster_layouts)]
        all_points = np.concatenate(placed, axis=0)
        comp_offset = snap_to_grid(chain_layout.positions[ci] - all_points.mean(axis=0))
        for j, members in enumerate(comp.phantom.provenance):
            if len(members) != placed[j].shape[0]:
                raise GraphInputError(f"component {comp_idx} cluster {j}: provenance size "
                                      f"{len(members)} != layout size {placed[j].shape[0]}")
            for row, v in enumerate(members):
                if v >= n or not np.isnan(final[v, 0]):
                    raise GraphInputError(f"vertex {v} out of range or placed twice")
                final[v] = placed[j][row] + comp_offset
    if np.isnan(final).any():
        missing = [int(v) for v in np.flatnonzero(np.isnan(final[:, 0]))]
        raise GraphInputError(f"vertices {missing[:10]} received no position")
    return Layout(positions=final, canvass=chain_layout.canvass)


# ----------------------------------------------------------------------
# Pipeline driver
# ----------------------------------------------------------------------

def _snapped(layout: Layout) -> Layout:
    return replace(layout, positions=snap_to_grid(layout.positions))


def run_hgda(g: Graph, config: HgdaConfig = HgdaConfig()) -> HgdaResult:
    """Run all seven stages and compose the final drawing.

    Deterministic for a fixed (graph, config) pair; per-stage convergence
    problems are reported as warnings, never raised.
    """
    report = PipelineReport()
    ikk_params = config.ikk_params()

    t0 = time.perf_counter()
    comps = connected_components(g, method="dfs")
    report.timings.append(StageTiming("components", time.perf_counter() - t0))
    report.component_count = len(comps)
    if not comps:
        empty = Layout(positions=np.zeros((0, 2)), canvass=config.kk.L0)
        chain = PhantomGraph(graph=Graph(n=0, edges=()), radii=np.zeros(0), provenance=())
        return HgdaResult(final=empty, components=[], chain=chain,
                          chain_layout=empty, report=report)

    results: list[ComponentResult] = []
    comp_radii: list[tuple[int, float]] = []
    for idx, members in enumerate(comps):
        sub, id_map = induced_subgraph(g, members)

        t0 = time.perf_counter()
        clustering = mcl_cluster(sub, config.mcl)
        report.timings.append(StageTiming(f"mcl[{idx}]", time.perf_counter() - t0))
        if not clustering.converged:
            report.warnings.append(f"component {idx}: clustering hit the iteration cap")
        report.cluster_counts.append(len(clustering.clusters))

        t0 = time.perf_counter()
        layouts = []
        for members_c in clustering.clusters:
            csub, _ = induced_subgraph(sub, members_c)
            lay = _snapped(kk_layout(apsp(csub), config.kk, config.seed))
            if not lay.converged:
                report.warnings.append(
                    f"component {idx}: a cluster layout stopped at residual {lay.residual:.3e}")
            layouts.append(lay)
        report.timings.append(StageTiming(f"kk[{idx}]", time.perf_counter() - t0))

        phantom = phantom_graph_for_component(sub, clustering, layouts)
        # Express provenance in original vertex ids for composition.
        phantom = replace(phantom, provenance=tuple(
            tuple(id_map[v] for v in cluster) for cluster in phantom.provenance))

        t0 = time.perf_counter()
        phantom_layout = ikk_layout(
            SizedGraph(base=phantom.graph, radii=phantom.radii),
            ikk_params, config.seed)
        if phantom_layout.unresolved_overlaps:
            report.warnings.append(
                f"component {idx}: {phantom_layout.unresolved_overlaps} cluster "
                "circles still overlap")
        phantom_layout = _snapped(phantom_layout)
        report.timings.append(StageTiming(f"ikk[{idx}]", time.perf_counter() - t0))

        offsets = _cluster_offsets(layouts, phantom_layout.positions)
        placed = np.concatenate(
            [lay.positions + offsets[j] for j, lay in enumerate(layouts)], axis=0)
        comp_radii.append((idx, bounding_radius(placed, phantom_layout.canvass)))

        results.append(ComponentResult(
            vertices=tuple(members),
            clustering=clustering,
            cluster_layouts=layouts,
            phantom=phantom,
            phantom_layout=phantom_layout,
        ))

    t0 = time.perf_counter()
    chain = chain_components(comp_radii)
    chain_layout = ikk_layout(SizedGraph(base=chain.graph, radii=chain.radii),
                              ikk_params, config.seed)
    if chain_layout.unresolved_overlaps:
        report.warnings.append(
            f"{chain_layout.unresolved_overlaps} component circles still overlap")
    chain_layout = _snapped(chain_layout)
    report.timings.append(StageTiming("chain", time.perf_counter() - t0))

    final = compose(g.n, chain, chain_layout, results)
    for w in report.warnings:
        log.warning("%s", w)
    return HgdaResult(final=final, components=results, chain=chain,
                      chain_layout=chain_layout, report=report)
