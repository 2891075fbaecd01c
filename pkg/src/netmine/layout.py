"""Force-directed placement of cluster metagraphs and test-overlay styling.

A spring-embedder in the Fruchterman-Reingold style: every meta-node pair
repels with k^2/d, every meta-edge attracts with d^2/k, displacement per
iteration is capped by a linearly cooling temperature. Disconnected
components are laid out independently in unit cells and packed on a grid.
All randomness comes from one seeded generator, so positions are
bit-reproducible for identical inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import ceil, log2, sqrt
from typing import Mapping

from .clustering import ClusterGraph
from .errors import EmptyClusterGraph, UnknownCategory, UnknownCluster
from .stats import TestOverlay

DEFAULT_ITERATIONS = 500
R_MIN = 0.01  # disk radius for the smallest possible cluster, frame units
R_MAX = 0.05  # disk radius for the largest cluster in the metagraph
THICKNESS_CAP = 12.0
_EPS = 1e-9
_JITTER = 1e-4  # times sqrt(area); separates coincident start positions


@dataclass(frozen=True)
class LayoutResult:
    """Positions, disk radii, and edge thicknesses for one metagraph."""

    positions: Mapping[int, tuple[float, float]]
    radii: Mapping[int, float]
    thickness: Mapping[tuple[int, int], float]
    bounding_box: tuple[float, float, float, float]
    iterations: int
    seed: int


@dataclass(frozen=True)
class StyledLayout:
    """A layout plus per-cluster visual encoding of test results.

    Without a category the encoding is darkness = 1 - p (all circles);
    with a category the shape carries the residual sign (circle above
    expectation, square below) and darkness grows with its magnitude.
    """

    layout: LayoutResult
    mode: str  # "p_value" | "residual"
    category: str | None
    alpha: float
    darkness: Mapping[int, float]
    shape: Mapping[int, str]  # "circle" | "square"
    atypical: Mapping[int, bool]
    value: Mapping[int, float | None]  # p-value or residual per cluster


def edge_thickness(weight: int) -> float:
    """Stroke width for a meta-edge bundling `weight` parallel edges."""
    return min(1.0 + 2.0 * log2(1.0 + weight), THICKNESS_CAP)


def _metagraph_components(cg: ClusterGraph) -> list[list[int]]:
    nbrs: dict[int, set[int]] = {c: set() for c in range(cg.k)}
    for (a, b) in cg.weights:
        nbrs[a].add(b)
        nbrs[b].add(a)
    seen: set[int] = set()
    comps: list[list[int]] = []
    for start in range(cg.k):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            cur = stack.pop()
            comp.append(cur)
            for nb in sorted(nbrs[cur]):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    comps.sort(key=lambda comp: (-sum(cg.sizes[c] for c in comp), comp[0]))
    return comps


def _run_fr(
    vs: list[int],
    edges: list[tuple[int, int]],
    pos: dict[int, tuple[float, float]],
    iterations: int,
) -> None:
    """Iterate forces over one component inside the unit frame, in place."""
    n = len(vs)
    k = sqrt(1.0 / n)
    t0 = 0.1
    for it in range(iterations):
        t = t0 * (1.0 - it / iterations)
        disp = {v: [0.0, 0.0] for v in vs}
        for i, u in enumerate(vs):
            xu, yu = pos[u]
            du = disp[u]
            for v in vs[i + 1 :]:
                dx = xu - pos[v][0]
                dy = yu - pos[v][1]
                d = sqrt(dx * dx + dy * dy)
                if d < _EPS:
                    d = _EPS
                    dx = _EPS
                    dy = 0.0
                f = k * k / (d * d)
                fx = dx * f
                fy = dy * f
                du[0] += fx
                du[1] += fy
                dv = disp[v]
                dv[0] -= fx
                dv[1] -= fy
        for a, b in edges:
            dx = pos[a][0] - pos[b][0]
            dy = pos[a][1] - pos[b][1]
            d = sqrt(dx * dx + dy * dy)
            if d < _EPS:
                d = _EPS
                dx = _EPS
                dy = 0.0
            f = d / k  # (d^2/k) / d: attraction along the unit vector
            fx = dx * f
            fy = dy * f
            da = disp[a]
            da[0] -= fx
            da[1] -= fy
            db = disp[b]
            db[0] += fx
            db[1] += fy
        for v in vs:
            dx, dy = disp[v]
            dl = sqrt(dx * dx + dy * dy)
            if dl <= 0.0:
                continue
            step = min(dl, t)
            x = pos[v][0] + dx / dl * step
            y = pos[v][1] + dy / dl * step
            pos[v] = (min(1.0, max(0.0, x)), min(1.0, max(0.0, y)))


def fr_layout(
    cg: ClusterGraph,
    seed: int,
    iterations: int = DEFAULT_ITERATIONS,
    initial: Mapping[int, tuple[float, float]] | None = None,
) -> LayoutResult:
    """Place every meta-node of `cg`; deterministic for a given seed.

    `initial` warm-starts from previous positions (new meta-nodes still
    start at random); otherwise positions start uniformly random in the
    frame. A component with a single meta-node sits at its cell center.
    """
    if cg.k == 0:
        raise EmptyClusterGraph("cannot lay out an empty metagraph")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    rng = random.Random(seed)
    comps = _metagraph_components(cg)
    cols = ceil(sqrt(len(comps)))
    rows = ceil(len(comps) / cols)
    positions: dict[int, tuple[float, float]] = {}
    for idx, comp in enumerate(comps):
        off_x = float(idx % cols)
        off_y = float(idx // cols)
        pos: dict[int, tuple[float, float]] = {}
        if len(comp) == 1 and (initial is None or comp[0] not in initial):
            pos[comp[0]] = (0.5, 0.5)
        else:
            for v in comp:
                if initial is not None and v in initial:
                    ix, iy = initial[v]
                    pos[v] = (
                        min(1.0, max(0.0, ix - off_x)),
                        min(1.0, max(0.0, iy - off_y)),
                    )
                else:
                    pos[v] = (rng.random(), rng.random())
            seen: set[tuple[float, float]] = set()
            for v in comp:
                while pos[v] in seen:
                    jx = (rng.random() - 0.5) * 2.0 * _JITTER
                    jy = (rng.random() - 0.5) * 2.0 * _JITTER
                    pos[v] = (
                        min(1.0, max(0.0, pos[v][0] + jx)),
                        min(1.0, max(0.0, pos[v][1] + jy)),
                    )
                seen.add(pos[v])
            comp_set = set(comp)
            comp_edges = [
                (a, b) for (a, b) in sorted(cg.weights) if a in comp_set
            ]
            _run_fr(comp, comp_edges, pos, iterations)
        for v, (x, y) in pos.items():
            positions[v] = (x + off_x, y + off_y)

    max_size = max(cg.sizes)
    scale = (R_MAX - R_MIN) / sqrt(max_size)
    radii = {c: R_MIN + scale * sqrt(cg.sizes[c]) for c in range(cg.k)}
    thickness = {
        (a, b): edge_thickness(w) for (a, b), w in sorted(cg.weights.items())
    }
    return LayoutResult(
        positions=positions,
        radii=radii,
        thickness=thickness,
        bounding_box=(0.0, 0.0, float(cols), float(rows)),
        iterations=iterations,
        seed=seed,
    )


def style_overlay(
    layout: LayoutResult,
    overlay: TestOverlay,
    category: str | None = None,
    alpha: float = 0.05,
) -> StyledLayout:
    """Attach darkness/shape encodings from a test overlay to a layout."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    for t in overlay.clusters:
        if t.cluster not in layout.positions:
            raise UnknownCluster(str(t.cluster))
    if category is not None and category not in overlay.categories:
        raise UnknownCategory(category)
    by_cluster = {t.cluster: t for t in overlay.clusters}
    darkness: dict[int, float] = {}
    shape: dict[int, str] = {}
    atypical: dict[int, bool] = {}
    value: dict[int, float | None] = {}
    for c in sorted(layout.positions):
        test = by_cluster.get(c)
        if test is None:
            darkness[c] = 0.0
            shape[c] = "circle"
            atypical[c] = False
            value[c] = None
            continue
        atypical[c] = test.p_value < alpha
        if category is None:
            darkness[c] = 1.0 - test.p_value
            shape[c] = "circle"
            value[c] = test.p_value
        else:
            residual = test.residuals.get(category)
            if residual is None:
                darkness[c] = 0.0
                shape[c] = "circle"
                value[c] = None
            else:
                darkness[c] = abs(residual) / (1.0 + abs(residual))
                shape[c] = "circle" if residual >= 0.0 else "square"
                value[c] = residual
    mode = "p_value" if category is None else "residual"
    return StyledLayout(
        layout=layout,
        mode=mode,
        category=category,
        alpha=alpha,
        darkness=darkness,
        shape=shape,
        atypical=atypical,
        value=value,
    )
