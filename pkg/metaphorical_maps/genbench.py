#!/usr/bin/env python3
"""
Benchmark graph generator

Delaunay triangulations of random points in the unit square, with an
optional share of points nested inside triangles of an initial
triangulation, uniform weights in [1, weight_ratio], and optional removal
of internal edges that keeps the graph biconnected.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import GENERATOR
from .geom import Point2, convex_hull
from .graphmodel import Vertex, WeightedPlaneGraph, normalize_edge
from .validation import GenerationError, InputValidator, format_error

logger = logging.getLogger(__name__)

Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class GenParams:
    n: int
    nest: float = 0.0
    weight_ratio: float = 5.0
    rem: float = 0.0
    seed: int = field(default=GENERATOR['DEFAULT_SEED'])

    def __post_init__(self):
        if not InputValidator.validate_gen_params(self):
            raise GenerationError(f"invalid generator parameters: {self}")


class _Triangulation:
    """Bowyer-Watson state: triangles stored counter-clockwise with cached circumcircles"""

    def __init__(self, points: np.ndarray, scale: float):
        self.points = points
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        center = (lo + hi) / 2.0
        span = max(float((hi - lo).max()), 1e-9) * scale
        n = len(points)
        super_pts = np.array([
            [center[0] - 2 * span, center[1] - span],
            [center[0] + 2 * span, center[1] - span],
            [center[0], center[1] + 2 * span],
        ])
        self.coords = np.vstack([points, super_pts])
        self.super_ids = (n, n + 1, n + 2)
        self.triangles: Dict[Triangle, Tuple[float, float, float]] = {}
        self._add(self.super_ids)

    def _add(self, tri: Triangle) -> None:
        a, b, c = (self.coords[i] for i in tri)
        d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-300:
            raise GenerationError(format_error('COLLINEAR_POINTS'))
        sa, sb, sc = a @ a, b @ b, c @ c
        ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
        uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
        r2 = (a[0] - ux) ** 2 + (a[1] - uy) ** 2
        self.triangles[tri] = (ux, uy, r2)

    def insert(self, idx: int) -> None:
        px, py = self.coords[idx]
        bad = [tri for tri, (ux, uy, r2) in self.triangles.items()
               if (px - ux) ** 2 + (py - uy) ** 2 < r2 * (1.0 - 1e-12)]
        if not bad:
            raise GenerationError(f"point {idx} lies outside the super triangle")

        edge_count: Dict[Tuple[int, int], int] = {}
        directed: List[Tuple[int, int]] = []
        for tri in bad:
            for k in range(3):
                e = (tri[k], tri[(k + 1) % 3])
                key = normalize_edge(*e)
                edge_count[key] = edge_count.get(key, 0) + 1
                directed.append(e)
        for tri in bad:
            del self.triangles[tri]
        for a, b in directed:
            if edge_count[normalize_edge(a, b)] == 1:
                self._add((a, b, idx))

    def result(self) -> List[Triangle]:
        supers = set(self.super_ids)
        return sorted(tuple(t) for t in self.triangles if not supers.intersection(t))


def delaunay_triangles(points: Sequence[Tuple[float, float]]) -> List[Triangle]:
    """
    Bowyer-Watson triangulation; triangles are index triples in
    counter-clockwise order. Raises GenerationError on degenerate input.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise GenerationError(format_error('COLLINEAR_POINTS'))
    hull = convex_hull([tuple(p) for p in pts])
    if len(hull) < 3:
        raise GenerationError(format_error('COLLINEAR_POINTS'))

    # a complete triangulation of n points with h on the hull has 2n - h - 2 triangles
    expected = 2 * len(pts) - len(hull) - 2
    count = 0
    for scale in GENERATOR['SUPER_TRIANGLE_SCALES']:
        tri = _Triangulation(pts, scale)
        for idx in range(len(pts)):
            tri.insert(idx)
        triangles = tri.result()
        count = len(triangles)
        if count == expected:
            return triangles
        logger.debug("super triangle at scale %g lost hull triangles (%d of %d)", scale, count, expected)
    raise GenerationError(f"degenerate triangulation: {count} triangles, expected {expected}")


def delaunay_triangulate(points: Sequence[Tuple[float, float]],
                         weights: Optional[Sequence[float]] = None) -> WeightedPlaneGraph:
    """Delaunay skeleton as a plane graph; unit weights unless given"""
    triangles = delaunay_triangles(points)
    edges = {normalize_edge(t[i], t[(i + 1) % 3]) for t in triangles for i in range(3)}
    weights = weights if weights is not None else [1.0] * len(points)
    vertices = [Vertex(i, float(weights[i]), Point2(float(p[0]), float(p[1])))
                for i, p in enumerate(points)]
    return WeightedPlaneGraph(vertices, edges)


def _sample_in_triangle(rng: np.random.Generator, tri: np.ndarray) -> np.ndarray:
    r1, r2 = rng.random(2)
    s = math.sqrt(r1)
    return (1 - s) * tri[0] + s * (1 - r2) * tri[1] + s * r2 * tri[2]


def _nested_points(rng: np.random.Generator, base: np.ndarray, count: int) -> np.ndarray:
    triangles = delaunay_triangles(base)
    placed: List[np.ndarray] = []
    min_gap = 1e-6
    for _ in range(count):
        for _attempt in range(GENERATOR['NESTING_RETRIES']):
            tri = base[list(triangles[int(rng.integers(len(triangles)))])]
            candidate = _sample_in_triangle(rng, tri)
            existing = np.vstack([base] + placed) if placed else base
            if np.min(np.linalg.norm(existing - candidate, axis=1)) > min_gap:
                placed.append(candidate[None, :])
                break
        else:
            raise GenerationError(format_error(
                'NESTING_FAILED', count=count, retries=GENERATOR['NESTING_RETRIES']))
    return np.vstack(placed) if placed else np.empty((0, 2))


def _remove_internal_edges(rng: np.random.Generator, graph: WeightedPlaneGraph,
                           rem: float) -> List[Tuple[int, int]]:
    outer = graph.outer_face
    outer_edges = {normalize_edge(outer[i], outer[(i + 1) % len(outer)]) for i in range(len(outer))}
    internal = [e for e in graph.edges if e not in outer_edges]
    quota = int(math.floor(rem * len(internal)))
    order = rng.permutation(len(internal))

    nxg = graph.to_networkx()
    removed = 0
    for k in order:
        if removed >= quota:
            break
        u, v = internal[int(k)]
        nxg.remove_edge(u, v)
        if nx.is_biconnected(nxg):
            removed += 1
        else:
            nxg.add_edge(u, v)
    logger.debug("removed %d of %d internal edges (quota %d)", removed, len(internal), quota)
    return sorted(normalize_edge(u, v) for u, v in nxg.edges())


def generate_benchmark_graph(p: GenParams) -> WeightedPlaneGraph:
    """
    Generate one benchmark graph; the output is fully determined by the
    parameters (including the seed).
    """
    rng = np.random.default_rng(p.seed)
    nested = min(int(math.ceil(p.nest * p.n)), p.n - 3)
    base_count = p.n - nested
    if nested:
        logger.debug("nesting %d of %d points uniformly inside base triangles", nested, p.n)

    last_error: Optional[GenerationError] = None
    for attempt in range(GENERATOR['DEGENERACY_RETRIES']):
        base = rng.random((base_count, 2))
        try:
            points = np.vstack([base, _nested_points(rng, base, nested)]) if nested else base
            if attempt:
                points = points + rng.normal(scale=GENERATOR['PERTURBATION'], size=points.shape)
            weights = rng.uniform(1.0, p.weight_ratio, size=p.n)
            graph = delaunay_triangulate([tuple(pt) for pt in points], list(weights))
            break
        except GenerationError as e:
            logger.debug("generation attempt %d failed: %s", attempt + 1, e)
            last_error = e
    else:
        raise GenerationError(f"generation failed after retries: {last_error}")

    if p.rem > 0:
        graph = graph.replace(edges=_remove_internal_edges(rng, graph, p.rem))
    return graph
