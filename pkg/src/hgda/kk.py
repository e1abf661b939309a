"""Spring embedder: quadratic pair energy minimized by per-vertex Newton steps.

The model assigns every vertex pair a spring whose rest length is the
graph distance scaled to the canvass and whose strength decays with the
squared distance:

    E    = 1/2 * sum_{i<j} k_ij * (D_ij - unit * d_ij)^2
    unit = L0 / max_{i<j} d_ij
    k_ij = K / d_ij^2

where D_ij is the Euclidean distance in the drawing.  The layout loop
repeatedly picks the vertex with the largest gradient norm and relaxes it
with a damped 2x2 Newton iteration until every norm falls below epsilon.
The hot loop lives in the solver kernel (compiled when available).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ._backend import solve_layout
from .errors import GraphInputError
from .graph import DistanceMatrix

__all__ = [
    "KkParams",
    "SpringSystem",
    "Layout",
    "build_springs",
    "initial_circle_layout",
    "energy",
    "gradient",
    "newton_step",
    "kk_layout",
]

log = logging.getLogger(__name__)

GOLDEN_ANGLE = 2.399963229728653

# epsilon / jitter defaults as fractions of the canvass side
EPSILON_FACTOR = 1e-4
JITTER_FACTOR = 1e-6
MAX_OUTER_FACTOR = 10


@dataclass(frozen=True)
class KkParams:
    """Solver knobs.  ``epsilon``/``jitter``/``max_outer`` default to
    1e-4*L0, 1e-6*L0 and 10*n when left unset."""

    K: float = 1.0
    L0: float = 1.0
    epsilon: Optional[float] = None
    max_outer: Optional[int] = None
    max_inner: int = 50
    jitter: Optional[float] = None

    def __post_init__(self):
        if self.K <= 0 or self.L0 <= 0:
            raise GraphInputError("K and L0 must be positive")
        if self.epsilon is not None and self.epsilon <= 0:
            raise GraphInputError("epsilon must be positive")
        if self.max_inner < 1:
            raise GraphInputError("max_inner must be >= 1")

    @property
    def eps(self) -> float:
        return self.epsilon if self.epsilon is not None else EPSILON_FACTOR * self.L0

    @property
    def jitter_distance(self) -> float:
        return self.jitter if self.jitter is not None else JITTER_FACTOR * self.L0

    def outer_cap(self, n: int) -> int:
        return self.max_outer if self.max_outer is not None else MAX_OUTER_FACTOR * n

    def with_canvass(self, L0: float) -> "KkParams":
        """Same params rescaled to a different canvass side (epsilon and
        jitter keep their proportion of L0)."""
        factor = L0 / self.L0
        return replace(self, L0=L0, epsilon=self.eps * factor,
                       jitter=self.jitter_distance * factor)


@dataclass
class SpringSystem:
    """Pairwise rest lengths and strengths; ``unit`` is the scaled length
    of one graph-distance hop on the canvass."""

    lengths: np.ndarray
    strengths: np.ndarray
    unit: float
    trivial: bool = False

    @property
    def n(self) -> int:
        return self.lengths.shape[0]


@dataclass
class Layout:
    """Per-vertex drawing coordinates on a square canvass of side ``canvass``."""

    positions: np.ndarray
    canvass: float
    converged: bool = True
    residual: float = 0.0
    unresolved_overlaps: int = 0

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=float)
        self.positions.setflags(write=False)

    @property
    def n(self) -> int:
        return self.positions.shape[0]


def build_springs(d: DistanceMatrix, p: KkParams) -> SpringSystem:
    """Spring system from graph distances: lengths unit*d_ij, strengths K/d_ij^2."""
    n = d.n
    if n < 2:
        return SpringSystem(lengths=np.zeros((n, n)), strengths=np.zeros((n, n)),
                            unit=p.L0, trivial=True)
    cells = d.cells
    if not np.all(np.isfinite(cells)):
        raise GraphInputError("distance matrix has non-finite entries (disconnected input?)")
    diameter = float(cells.max())
    unit = p.L0 / diameter
    lengths = unit * cells
    with np.errstate(divide="ignore"):
        strengths = p.K / np.square(cells)
    np.fill_diagonal(strengths, 0.0)
    return SpringSystem(lengths=lengths, strengths=strengths, unit=unit)


def initial_circle_layout(n: int, p: KkParams, seed: int) -> Layout:
    """Seeded random placement on the circle inscribed in the canvass.

    A single vertex goes to the canvass center.  Colliding placements
    (closer than the jitter distance) are resampled, so the returned
    positions are pairwise distinct.
    """
    center = p.L0 / 2.0
    if n == 0:
        return Layout(positions=np.zeros((0, 2)), canvass=p.L0)
    if n == 1:
        return Layout(positions=np.array([[center, center]]), canvass=p.L0)
    rng = np.random.default_rng(seed)
    radius = p.L0 / 2.0
    min_gap = p.jitter_distance
    positions = np.empty((n, 2))
    for i in range(n):
        for _attempt in range(1000):
            theta = rng.uniform(0.0, 2.0 * math.pi)
            x = center + radius * math.cos(theta)
            y = center + radius * math.sin(theta)
            if i == 0 or np.min(np.hypot(positions[:i, 0] - x,
                                         positions[:i, 1] - y)) > min_gap:
                break
        positions[i, 0] = x
        positions[i, 1] = y
    return Layout(positions=positions, canvass=p.L0)


def energy(layout: Layout, s: SpringSystem) -> float:
    """Total spring energy of the drawing (the quantity being minimized)."""
    pos = layout.positions
    n = pos.shape[0]
    if n < 2 or s.trivial:
        return 0.0
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    iu = np.triu_indices(n, 1)
    dev = dist[iu] - s.lengths[iu]
    return float(0.5 * np.sum(s.strengths[iu] * dev * dev))


def _displacements(layout: Layout, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pos = layout.positions
    dx = pos[m, 0] - np.delete(pos[:, 0], m)
    dy = pos[m, 1] - np.delete(pos[:, 1], m)
    return dx, dy, np.sqrt(dx * dx + dy * dy)


def gradient(layout: Layout, s: SpringSystem, m: int) -> tuple[float, float]:
    """Partial derivatives of the energy with respect to vertex ``m``.

    A coincident pair (zero Euclidean distance) is resolved by nudging the
    moving vertex a jitter-sized step in a deterministic direction before
    evaluating; the event is logged.
    """
    n = layout.n
    if n < 2 or s.trivial:
        return (0.0, 0.0)
    work = layout
    dx, dy, dist = _displacements(work, m)
    bumps = 0
    while np.any(dist == 0.0):
        ang = GOLDEN_ANGLE * (m + 1 + bumps)
        jit = JITTER_FACTOR * layout.canvass
        moved = layout.positions.copy()
        moved[m, 0] += jit * math.cos(ang)
        moved[m, 1] += jit * math.sin(ang)
        log.warning("vertex %d coincides with another vertex; jittered before gradient", m)
        work = Layout(positions=moved, canvass=layout.canvass)
        dx, dy, dist = _displacements(work, m)
        bumps += 1
    k = np.delete(s.strengths[m], m)
    l = np.delete(s.lengths[m], m)
    gx = float(np.sum(k * (dx - l * dx / dist)))
    gy = float(np.sum(k * (dy - l * dy / dist)))
    return (gx, gy)


def _local_energy(pos_m: np.ndarray, others: np.ndarray, k: np.ndarray, l: np.ndarray) -> float:
    d = np.hypot(others[:, 0] - pos_m[0], others[:, 1] - pos_m[1])
    if np.any(d == 0.0):
        return math.inf
    dev = d - l
    return float(np.sum(k * dev * dev))


def newton_step(layout: Layout, s: SpringSystem, m: int, p: KkParams) -> tuple[float, float]:
    """One damped Newton relocation of vertex ``m``; returns its new position.

    Solves the 2x2 system of second partials for the step, falls back to a
    capped steepest-descent step when the Hessian is not positive definite,
    and halves the step (up to 20 times) while the energy restricted to
    springs at ``m`` would increase.  Requires the gradient norm at ``m``
    to exceed epsilon.
    """
    gx, gy = gradient(layout, s, m)
    delta = math.sqrt(gx * gx + gy * gy)
    if delta <= p.eps:
        raise GraphInputError(
            f"vertex {m} already satisfies the gradient threshold ({delta:.3e} <= {p.eps:.3e})")
    dx, dy, dist = _displacements(layout, m)
    k = np.delete(s.strengths[m], m)
    l = np.delete(s.lengths[m], m)
    d3 = dist * dist * dist
    dxx = float(np.sum(k * (1.0 - l * dy * dy / d3)))
    dyy = float(np.sum(k * (1.0 - l * dx * dx / d3)))
    dxy = float(np.sum(k * (l * dx * dy / d3)))
    det = dxx * dyy - dxy * dxy
    if dxx > 0.0 and det > 0.0:
        sx = (dxy * gy - dyy * gx) / det
        sy = (dxy * gx - dxx * gy) / det
    else:
        step = min(s.unit / 10.0, delta)
        sx = -gx / delta * step
        sy = -gy / delta * step

    pos = layout.positions
    others = np.delete(pos, m, axis=0)
    local_old = _local_energy(pos[m], others, k, l)
    x, y = float(pos[m, 0]), float(pos[m, 1])
    for _ in range(21):
        trial = np.array([x + sx, y + sy])
        if _local_energy(trial, others, k, l) <= local_old:
            return (float(trial[0]), float(trial[1]))
        sx *= 0.5
        sy *= 0.5
    return (x, y)  # no improving step found; stay put


def kk_layout(d: DistanceMatrix, p: KkParams, seed: int,
              energy_trace: Optional[list] = None) -> Layout:
    """Full spring-embedder run from a seeded circular start.

    Repeatedly relaxes the vertex with the largest gradient norm until all
    norms drop below epsilon; a layout that exhausts its relocation budget
    first is returned flagged unconverged with the residual norm.  When
    ``energy_trace`` is a list, the total energy after every accepted move
    is appended to it.
    """
    n = d.n
    layout = initial_circle_layout(n, p, seed)
    if n <= 1:
        return layout
    s = build_springs(d, p)
    pos = layout.positions.copy()
    converged, residual, selections, moves, jitters = solve_layout(
        pos, s.lengths, s.strengths, p.eps, p.outer_cap(n), p.max_inner,
        s.unit / 10.0, p.jitter_distance, energy_trace)
    if jitters:
        log.warning("layout run jittered coincident vertices %d time(s)", jitters)
    if not converged:
        log.info("layout did not converge: residual %.3e > %.3e after %d selections",
                 residual, p.eps, selections)
    log.debug("layout: n=%d selections=%d moves=%d converged=%s", n, selections,
              moves, converged)
    return Layout(positions=pos, canvass=p.L0, converged=converged, residual=residual)
