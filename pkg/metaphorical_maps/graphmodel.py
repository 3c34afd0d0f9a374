#!/usr/bin/env python3
"""
Vertex-weighted plane graphs

A WeightedPlaneGraph couples vertex weights and positions with a fixed
combinatorial embedding (rotation system). Faces are traced from the
rotation system; inner faces come out counter-clockwise and the outer
face clockwise.
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .geom import Point2, point_in_polygon, proper_intersection_matrix, signed_area
from .validation import (
    EmbeddingError, GraphValidationError, InputValidator, format_error
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Vertex:
    id: int
    weight: float
    position: Point2


@dataclass(frozen=True)
class FaceSet:
    faces: List[List[int]]
    outer_index: int

    @property
    def outer(self) -> List[int]:
        return self.faces[self.outer_index]

    @property
    def inner(self) -> List[List[int]]:
        return [f for i, f in enumerate(self.faces) if i != self.outer_index]


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _cyclic_equal(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b) or not a:
        return False
    try:
        start = list(b).index(a[0])
    except ValueError:
        return False
    return all(a[i] == b[(start + i) % len(b)] for i in range(len(a)))


class WeightedPlaneGraph:
    """Vertex-weighted graph with positions and a fixed planar embedding"""

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Tuple[int, int]],
                 rotation: Optional[Mapping[int, Sequence[int]]] = None,
                 outer_face: Optional[Sequence[int]] = None,
                 validate: bool = True):
        self._vertices: Dict[int, Vertex] = {v.id: v for v in sorted(vertices, key=lambda v: v.id)}
        self._edges: List[Edge] = sorted({normalize_edge(int(u), int(v)) for u, v in edges})
        self._adjacency: Dict[int, List[int]] = {vid: [] for vid in self._vertices}
        for u, v in self._edges:
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            for a, b in ((u, v), (v, u)):
                if a not in self._adjacency:
                    raise GraphValidationError(format_error('UNKNOWN_VERTEX', edge=(u, v), vertex=a))
                self._adjacency[a].append(b)

        self._check_vertices()
        geometric = self._geometric_rotation()
        if rotation is None:
            self._rotation = geometric
        else:
            self._rotation = {int(k): [int(x) for x in v] for k, v in rotation.items()}
            for vid, nbrs in self._adjacency.items():
                if sorted(self._rotation.get(vid, [])) != sorted(nbrs):
                    raise EmbeddingError(format_error('ROTATION_MISMATCH', vertex=vid))
            if validate:
                for vid in self._vertices:
                    if not _cyclic_equal(self._rotation[vid], geometric[vid]):
                        raise EmbeddingError(format_error('ROTATION_MISMATCH', vertex=vid))
        self._supplied_outer = list(outer_face) if outer_face is not None else None
        self._geometric = validate

        if validate:
            self.validate()

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def vertices(self) -> Dict[int, Vertex]:
        return dict(self._vertices)

    @property
    def vertex_ids(self) -> List[int]:
        return list(self._vertices)

    @property
    def edges(self) -> List[Edge]:
        return list(self._edges)

    @property
    def rotation(self) -> Dict[int, List[int]]:
        return {k: list(v) for k, v in self._rotation.items()}

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    def weight(self, vid: int) -> float:
        return self._vertices[vid].weight

    def position(self, vid: int) -> Point2:
        return self._vertices[vid].position

    def neighbors(self, vid: int) -> List[int]:
        """Neighbors in counter-clockwise rotation order"""
        return list(self._rotation[vid])

    def degree(self, vid: int) -> int:
        return len(self._adjacency[vid])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjacency.get(u, ())

    def positions(self) -> Dict[int, Point2]:
        return {vid: v.position for vid, v in self._vertices.items()}

    def total_weight(self) -> float:
        return sum(v.weight for v in self._vertices.values())

    @cached_property
    def faces(self) -> FaceSet:
        return extract_faces(self)

    @property
    def outer_face(self) -> List[int]:
        return self.faces.outer

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self._vertices)
        graph.add_edges_from(self._edges)
        return graph

    def replace(self, vertices: Optional[Iterable[Vertex]] = None,
                edges: Optional[Iterable[Edge]] = None,
                rotation: Optional[Mapping[int, Sequence[int]]] = None,
                outer_face: Optional[Sequence[int]] = None,
                validate: bool = True) -> "WeightedPlaneGraph":
        """New graph sharing whatever is not replaced; rotation is re-derived unless given"""
        return WeightedPlaneGraph(
            vertices if vertices is not None else self._vertices.values(),
            edges if edges is not None else self._edges,
            rotation=rotation,
            outer_face=outer_face,
            validate=validate,
        )

    def with_positions(self, positions: Mapping[int, Tuple[float, float]],
                       keep_rotation: bool = True) -> "WeightedPlaneGraph":
        """Same embedding, new coordinates; raises EmbeddingError if they disagree"""
        vertices = [Vertex(v.id, v.weight, Point2(float(positions[v.id][0]), float(positions[v.id][1])))
                    for v in self._vertices.values()]
        return self.replace(vertices=vertices,
                            rotation=self._rotation if keep_rotation else None)

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def _check_vertices(self) -> None:
        for vid, vertex in self._vertices.items():
            if not InputValidator.validate_weight(vertex.weight):
                raise GraphValidationError(
                    format_error('NON_POSITIVE_WEIGHT', vertex=vid, weight=vertex.weight))
            if not (InputValidator.validate_coordinate(vertex.position.x)
                    and InputValidator.validate_coordinate(vertex.position.y)):
                raise GraphValidationError(format_error('NON_FINITE_COORDINATE', vertex=vid))

    def _geometric_rotation(self) -> Dict[int, List[int]]:
        rotation = {}
        for vid, nbrs in self._adjacency.items():
            p = self._vertices[vid].position
            rotation[vid] = sorted(
                nbrs, key=lambda u: (math.atan2(self._vertices[u].position.y - p.y,
                                                self._vertices[u].position.x - p.x), u))
        return rotation

    def crossing_edges(self) -> List[Tuple[Edge, Edge]]:
        """Pairs of edges whose straight-line drawings properly intersect"""
        if not self._edges:
            return []
        pos = self.positions()
        a = np.array([pos[u] for u, _ in self._edges], dtype=float)
        b = np.array([pos[v] for _, v in self._edges], dtype=float)
        hits = np.triu(proper_intersection_matrix(a, b, a, b), k=1)
        return [(self._edges[i], self._edges[j]) for i, j in zip(*np.nonzero(hits))]

    def validate(self) -> None:
        """Raise GraphValidationError on the first violated invariant"""
        self._check_vertices()
        if self.n and not nx.is_connected(self.to_networkx()):
            raise GraphValidationError(format_error('DISCONNECTED'))
        crossings = self.crossing_edges()
        if crossings:
            first, second = crossings[0]
            raise GraphValidationError(format_error('CROSSING_EDGES', first=first, second=second))


def extract_faces(g: WeightedPlaneGraph) -> FaceSet:
    """
    Trace faces from the rotation system; every directed edge is used once.

    After arriving at v from u, the walk continues to the neighbor that
    precedes u in v's counter-clockwise rotation, which keeps the face on
    the left.
    """
    rotation = g.rotation
    index = {vid: {u: i for i, u in enumerate(nbrs)} for vid, nbrs in rotation.items()}
    used = set()
    faces: List[List[int]] = []

    for u, v in g.edges:
        for start in ((u, v), (v, u)):
            if start in used:
                continue
            face = []
            a, b = start
            while (a, b) not in used:
                used.add((a, b))
                face.append(a)
                nbrs = rotation[b]
                a, b = b, nbrs[(index[b][a] - 1) % len(nbrs)]
            if (a, b) != start:
                raise EmbeddingError(f"face walk from {start} did not close")
            low = face.index(min(face))
            faces.append(face[low:] + face[:low])

    if g.n - g.m + len(faces) != 2:
        raise EmbeddingError(format_error('EULER_MISMATCH', v=g.n, e=g.m, f=len(faces)))

    return FaceSet(faces, _outer_index(g, faces))


def _outer_index(g: WeightedPlaneGraph, faces: List[List[int]]) -> int:
    supplied = g._supplied_outer
    if supplied:
        for candidate in (supplied, list(reversed(supplied))):
            for i, face in enumerate(faces):
                if _cyclic_equal(candidate, face):
                    return i
        raise EmbeddingError(f"outer face {supplied} is not a face of the embedding")

    positions = g.positions()
    areas = [signed_area([positions[v] for v in face]) if len(face) >= 3 else 0.0
             for face in faces]
    # the outer face is traced clockwise and has the largest extent
    return int(np.argmin(areas))


def is_internally_triangulated(g: WeightedPlaneGraph) -> bool:
    return all(len(face) == 3 for face in g.faces.inner)


def is_connected(g: WeightedPlaneGraph) -> bool:
    return g.n > 0 and nx.is_connected(g.to_networkx())


def is_biconnected(g: WeightedPlaneGraph) -> bool:
    """True iff the graph is connected and has no cut vertex"""
    if g.n < 3:
        return False
    return nx.is_biconnected(g.to_networkx())


def require_biconnected(g: WeightedPlaneGraph) -> None:
    """Raise GraphValidationError unless the graph is biconnected"""
    if not is_biconnected(g):
        raise GraphValidationError(format_error('NOT_BICONNECTED'))


def face_barycenter(g: WeightedPlaneGraph, face: Sequence[int]) -> Point2:
    pts = np.array([g.position(v) for v in face], dtype=float)
    mean = pts.mean(axis=0)
    return Point2(float(mean[0]), float(mean[1]))


def face_visible_from_barycenter(g: WeightedPlaneGraph, face: Sequence[int]) -> bool:
    """Barycenter strictly inside and every open segment to a corner stays inside"""
    poly = np.array([g.position(v) for v in face], dtype=float)
    center = np.array(face_barycenter(g, face), dtype=float)
    if not point_in_polygon(center, poly):
        return False
    starts = np.repeat(center[None, :], len(poly), axis=0)
    hits = proper_intersection_matrix(starts, poly, poly, np.roll(poly, -1, axis=0))
    return not bool(hits.any())


def visibility_violations(g: WeightedPlaneGraph) -> List[List[int]]:
    """Inner faces whose barycenter does not see all of their corners"""
    return [face for face in g.faces.inner if not face_visible_from_barycenter(g, face)]


def barycenter_visibility_holds(g: WeightedPlaneGraph) -> bool:
    return not visibility_violations(g)
