#!/usr/bin/env python3
"""
Initial metaphorical maps

The map type (a shared pool of boundary points plus polygonal regions)
and the constructions that produce a first planar subdivision from a
plane graph: the dual transform of a drawing, Steiner triangulation of
non-triangular faces, Tutte's barycentric embedding and the two
variants for non-triangulated input (point contacts or holes).
"""

import math
import logging
from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .geom import Point2, polygon_centroid, proper_intersection_matrix, signed_area
from .graphmodel import (
    Edge, Vertex, WeightedPlaneGraph, face_barycenter, face_visible_from_barycenter,
    is_internally_triangulated, normalize_edge, require_biconnected,
)
from .validation import (
    DegenerateMapError, DegeneratePolygonError, EmbeddingError, InitializationError, format_error,
)

logger = logging.getLogger(__name__)

INTERNAL = 'internal'
HOLE = 'hole'

# Residual tolerance of the barycentric solve, relative to the layout diameter
TUTTE_TOLERANCE = 1e-7


@dataclass
class Region:
    id: int
    kind: str
    boundary: List[int]
    target_weight: float
    source_vertex: Optional[int] = None

    @property
    def is_hole(self) -> bool:
        return self.kind == HOLE


def trace_outer_face(boundaries: Iterable[Sequence[int]]) -> List[int]:
    """
    Boundary of the unbounded face, traced clockwise.

    Region boundaries are counter-clockwise, so a segment used by exactly
    one region borders the outer face, which lies on its right.
    """
    directed: List[Tuple[int, int]] = []
    usage: Dict[Edge, int] = {}
    for boundary in boundaries:
        k = len(boundary)
        for i in range(k):
            a, b = boundary[i], boundary[(i + 1) % k]
            directed.append((a, b))
            key = normalize_edge(a, b)
            usage[key] = usage.get(key, 0) + 1

    successor: Dict[int, int] = {}
    for a, b in directed:
        if usage[normalize_edge(a, b)] == 1:
            if b in successor:
                raise DegenerateMapError(f"outer boundary touches itself at point {b}")
            successor[b] = a
    if not successor:
        return []

    start = min(successor)
    face = [start]
    current = successor[start]
    while current != start:
        if len(face) > len(successor):
            raise DegenerateMapError("outer boundary does not close")
        face.append(current)
        current = successor[current]
    if len(face) != len(successor):
        raise DegenerateMapError("outer boundary is not a single cycle")
    return face


class MetaphoricalMap:
    """Planar subdivision whose regions stand for the vertices of a graph"""

    def __init__(self, vertex_pool: Mapping[int, Sequence[float]], regions: Iterable[Region]):
        self.vertex_pool: Dict[int, Point2] = {
            int(k): Point2(float(p[0]), float(p[1])) for k, p in sorted(vertex_pool.items())
        }
        self.regions: List[Region] = sorted(regions, key=lambda r: r.id)

    @property
    def internal_regions(self) -> List[Region]:
        return [r for r in self.regions if not r.is_hole]

    @property
    def holes(self) -> List[Region]:
        return [r for r in self.regions if r.is_hole]

    @property
    def total_weight(self) -> float:
        return sum(r.target_weight for r in self.internal_regions)

    def region(self, region_id: int) -> Region:
        for r in self.regions:
            if r.id == region_id:
                return r
        raise KeyError(region_id)

    def polygon(self, region: Region) -> np.ndarray:
        return np.array([self.vertex_pool[p] for p in region.boundary], dtype=float)

    def area(self, region: Region) -> float:
        return abs(signed_area(self.polygon(region)))

    def segments(self) -> Dict[Edge, List[int]]:
        """Every boundary segment with the ids of the regions using it"""
        usage: Dict[Edge, List[int]] = {}
        for r in self.regions:
            k = len(r.boundary)
            for i in range(k):
                usage.setdefault(normalize_edge(r.boundary[i], r.boundary[(i + 1) % k]), []).append(r.id)
        return dict(sorted(usage.items()))

    def outer_boundary(self) -> List[int]:
        return trace_outer_face(r.boundary for r in self.regions)

    def average_segment_length(self) -> float:
        segs = list(self.segments())
        if not segs:
            return 0.0
        pts = self.vertex_pool
        return float(np.mean([math.dist(pts[a], pts[b]) for a, b in segs]))

    def crossing_segments(self) -> List[Tuple[Edge, Edge]]:
        segs = list(self.segments())
        if not segs:
            return []
        a = np.array([self.vertex_pool[u] for u, _ in segs])
        b = np.array([self.vertex_pool[v] for _, v in segs])
        hits = np.triu(proper_intersection_matrix(a, b, a, b), k=1)
        return [(segs[i], segs[j]) for i, j in zip(*np.nonzero(hits))]

    def copy(self) -> "MetaphoricalMap":
        return MetaphoricalMap(dict(self.vertex_pool),
                               [replace(r, boundary=list(r.boundary)) for r in self.regions])

    def scaled(self, factor: float, center: Optional[Sequence[float]] = None) -> "MetaphoricalMap":
        """Uniformly scaled copy about ``center`` (default: mean of all points)"""
        pts = np.array(list(self.vertex_pool.values()), dtype=float)
        c = np.asarray(center, dtype=float) if center is not None else pts.mean(axis=0)
        scaled = (pts - c) * factor + c
        pool = {pid: tuple(xy) for pid, xy in zip(self.vertex_pool, scaled)}
        return MetaphoricalMap(pool, [replace(r, boundary=list(r.boundary)) for r in self.regions])

    def validate(self) -> None:
        """Raise DegenerateMapError on the first violated subdivision invariant"""
        for r in self.regions:
            if len(r.boundary) < 3:
                raise DegenerateMapError(format_error('SHORT_BOUNDARY', region=r.id, count=len(r.boundary)),
                                         region=r.id)
            repeated = sorted(p for p, count in Counter(r.boundary).items() if count > 1)
            if repeated:
                raise DegenerateMapError(format_error('REPEATED_POINT', region=r.id, points=repeated),
                                         region=r.id)
            if not r.target_weight > 0:
                raise DegenerateMapError(f"region {r.id} has non-positive target weight", region=r.id)
            missing = [p for p in r.boundary if p not in self.vertex_pool]
            if missing:
                raise DegenerateMapError(f"region {r.id} references unknown points {missing}", region=r.id)
            try:
                area = signed_area(self.polygon(r))
            except DegeneratePolygonError as e:
                raise DegenerateMapError(str(e), region=r.id) from e
            if area < 0:
                raise DegenerateMapError(format_error('CLOCKWISE_REGION', region=r.id), region=r.id)
            if area == 0:
                raise DegenerateMapError(format_error('ZERO_AREA_REGION', region=r.id), region=r.id)
        for seg, users in self.segments().items():
            if len(users) > 2:
                raise DegenerateMapError(f"segment {seg} is shared by {len(users)} regions")
        crossings = self.crossing_segments()
        if crossings:
            first, second = crossings[0]
            raise DegenerateMapError(format_error('CROSSING_EDGES', first=first, second=second))
        self.outer_boundary()


class _PointRegistry:
    """Assigns pool ids to construction keys in first-use order"""

    def __init__(self):
        self.ids: Dict[Hashable, int] = {}
        self.pool: Dict[int, Point2] = {}

    def get(self, key: Hashable, position: Sequence[float]) -> int:
        if key not in self.ids:
            pid = len(self.ids)
            self.ids[key] = pid
            self.pool[pid] = Point2(float(position[0]), float(position[1]))
        return self.ids[key]


def hole_weight(adjacent_weights: Sequence[float], degree: int) -> float:
    """Target weight of a hole: (1 / (4 deg)) * (sum of sqrt(w))^2"""
    if degree < 3:
        raise ValueError(f"hole degree must be at least 3 (got {degree})")
    return (1.0 / (4.0 * degree)) * sum(math.sqrt(w) for w in adjacent_weights) ** 2


def dual_transform(g: WeightedPlaneGraph,
                   hole_vertices: Optional[Iterable[int]] = None) -> MetaphoricalMap:
    """
    Build one region per vertex from the drawing of ``g``.

    Region corners alternate between midpoints of incident edges and
    barycenters of incident inner faces; a vertex on the outer face keeps
    its own position as a corner. Vertices listed in ``hole_vertices``
    become holes whose target weight is the vertex weight.
    """
    holes = set(hole_vertices or ())
    faces = g.faces
    for face in faces.inner:
        if not face_visible_from_barycenter(g, face):
            raise InitializationError(format_error('VISIBILITY_VIOLATED', face=face), face=face)

    # the face on the left of each directed edge
    face_of: Dict[Tuple[int, int], int] = {}
    for idx, face in enumerate(faces.faces):
        for i in range(len(face)):
            face_of[(face[i], face[(i + 1) % len(face)])] = idx
    barycenters = {idx: face_barycenter(g, face) for idx, face in enumerate(faces.faces)
                   if idx != faces.outer_index}

    registry = _PointRegistry()
    regions: List[Region] = []
    for vid in g.vertex_ids:
        p = g.position(vid)
        boundary: List[int] = []
        for u in g.neighbors(vid):
            q = g.position(u)
            a, b = normalize_edge(vid, u)
            boundary.append(registry.get(('e', a, b), ((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)))
            fidx = face_of[(vid, u)]
            if fidx == faces.outer_index:
                boundary.append(registry.get(('v', vid), p))
            else:
                boundary.append(registry.get(('f', fidx), barycenters[fidx]))

        kind = HOLE if vid in holes else INTERNAL
        region = Region(id=vid, kind=kind, boundary=boundary, target_weight=g.weight(vid),
                        source_vertex=None if kind == HOLE else vid)
        area = signed_area([registry.pool[pid] for pid in boundary])
        if area <= 0:
            raise InitializationError(format_error('ZERO_AREA_REGION', region=vid), face=vid)
        regions.append(region)

    logger.debug("dual transform: %d regions (%d holes), %d points",
                 len(regions), len(holes), len(registry.pool))
    return MetaphoricalMap(registry.pool, regions)


def steiner_triangulate(g: WeightedPlaneGraph) -> Tuple[WeightedPlaneGraph, List[int]]:
    """
    Add one auxiliary vertex per non-triangular inner face, joined to
    every vertex of that face. The auxiliary vertex sits at the face's
    vertex mean and carries the hole weight of the face.
    """
    big_faces = [f for f in g.faces.inner if len(f) > 3]
    if not big_faces:
        return g, []

    rotation = g.rotation
    vertices = list(g.vertices.values())
    edges = list(g.edges)
    aux_ids: List[int] = []
    next_id = max(g.vertex_ids) + 1

    for face in big_faces:
        aux = next_id
        next_id += 1
        aux_ids.append(aux)
        weight = hole_weight([g.weight(v) for v in face], len(face))
        vertices.append(Vertex(aux, weight, face_barycenter(g, face)))
        k = len(face)
        for i, v in enumerate(face):
            edges.append((v, aux))
            # the face lies between face[i+1] and face[i-1] in v's rotation
            nxt = face[(i + 1) % k]
            nbrs = rotation[v]
            nbrs.insert(nbrs.index(nxt) + 1, aux)
        rotation[aux] = list(face)

    logger.debug("steiner triangulation added %d auxiliary vertices", len(aux_ids))
    extended = WeightedPlaneGraph(vertices, edges, rotation=rotation,
                                  outer_face=g.outer_face, validate=False)
    return extended, aux_ids


def tutte_embed(g: WeightedPlaneGraph) -> WeightedPlaneGraph:
    """
    Barycentric embedding: outer face on the unit circle in embedding
    order, every inner vertex at the mean of its neighbors.
    """
    outer_cw = g.outer_face
    outer = list(reversed(outer_cw))
    h = len(outer)
    positions: Dict[int, Tuple[float, float]] = {}
    for k, vid in enumerate(outer):
        angle = 2.0 * math.pi * k / h
        positions[vid] = (math.cos(angle), math.sin(angle))

    inner = [vid for vid in g.vertex_ids if vid not in positions]
    if inner:
        index = {vid: i for i, vid in enumerate(inner)}
        rows, cols, vals = [], [], []
        rhs = np.zeros((len(inner), 2))
        for vid in inner:
            i = index[vid]
            nbrs = g.neighbors(vid)
            rows.append(i)
            cols.append(i)
            vals.append(float(len(nbrs)))
            for u in nbrs:
                if u in index:
                    rows.append(i)
                    cols.append(index[u])
                    vals.append(-1.0)
                else:
                    rhs[i] += positions[u]
        laplacian = sp.csr_matrix((vals, (rows, cols)), shape=(len(inner), len(inner)))
        try:
            solution = np.column_stack([spsolve(laplacian, rhs[:, 0]), spsolve(laplacian, rhs[:, 1])])
        except RuntimeError as e:
            raise EmbeddingError(format_error('TUTTE_FAILED', details=str(e))) from e
        if not np.all(np.isfinite(solution)):
            raise EmbeddingError(format_error('TUTTE_FAILED', details='singular system'))
        for vid, xy in zip(inner, solution):
            positions[vid] = (float(xy[0]), float(xy[1]))

        residual = max(
            math.dist(positions[vid],
                      np.mean([positions[u] for u in g.neighbors(vid)], axis=0))
            for vid in inner)
        # the outer circle has diameter 2
        if residual > TUTTE_TOLERANCE * 2.0:
            raise EmbeddingError(format_error('TUTTE_FAILED', details=f"residual {residual:.3g}"))

    vertices = [Vertex(v.id, v.weight, Point2(*positions[v.id])) for v in g.vertices.values()]
    return g.replace(vertices=vertices, rotation=g.rotation, outer_face=outer_cw, validate=True)


def _drop_auxiliary(original: WeightedPlaneGraph, embedded: WeightedPlaneGraph) -> WeightedPlaneGraph:
    vertices = [Vertex(v.id, v.weight, embedded.position(v.id)) for v in original.vertices.values()]
    return original.replace(vertices=vertices, rotation=original.rotation,
                            outer_face=original.outer_face, validate=True)


def init_with_point_contacts(g: WeightedPlaneGraph) -> MetaphoricalMap:
    """
    Steiner-triangulate, embed, then forget the auxiliary vertices. Each
    non-triangular face collapses to a single point where all of its
    regions meet (the auxiliary position is the face's vertex mean).
    """
    require_biconnected(g)
    extended, aux_ids = steiner_triangulate(g)
    embedded = tutte_embed(extended)
    drawing = _drop_auxiliary(g, embedded) if aux_ids else embedded
    return dual_transform(drawing)


def init_with_holes(g: WeightedPlaneGraph) -> MetaphoricalMap:
    """Like init_with_point_contacts but auxiliary regions stay as weighted holes"""
    require_biconnected(g)
    extended, aux_ids = steiner_triangulate(g)
    embedded = tutte_embed(extended)
    return dual_transform(embedded, hole_vertices=aux_ids)


def initial_map(g: WeightedPlaneGraph, method: str = 'dual', tutte: bool = False) -> MetaphoricalMap:
    """Dispatch on the initializer name used by the CLI and the experiment presets"""
    if method == 'dual':
        require_biconnected(g)
        if not is_internally_triangulated(g):
            raise InitializationError(
                "graph has non-triangular inner faces; use init 'point-contacts' or 'holes'")
        return dual_transform(tutte_embed(g) if tutte else g)
    if method == 'point-contacts':
        return init_with_point_contacts(g)
    if method == 'holes':
        return init_with_holes(g)
    raise InitializationError(f"unknown initializer '{method}'")


def region_centroids(m: MetaphoricalMap) -> Dict[int, Point2]:
    return {r.id: polygon_centroid(m.polygon(r)) for r in m.regions}
