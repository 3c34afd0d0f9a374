#!/usr/bin/env python3
"""
Force-directed simulation of metaphorical maps

Each iteration computes region pressures, updates the per-region
stiffness, accumulates four forces against a frozen snapshot of the
boundary points (vertex-vertex and vertex-segment repulsion within a
face, angular resolution, and the stiffness- and passage-weighted air
pressure), moves the points without breaking planarity and finally
merges short and splits long boundary segments.
"""

import math
import time
import logging
from dataclasses import dataclass, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import PERFORMANCE, SIMULATION
from .geom import PointLike, as_array, closest_points_on_segments, proper_intersection_matrix, proper_intersections
from .graphmodel import Edge, normalize_edge
from .initmap import MetaphoricalMap, Region, trace_outer_face
from .metrics import QualityReport, evaluate
from .validation import DegenerateMapError, InputValidator, ParameterError, format_error

logger = logging.getLogger(__name__)

OUTER_PRESSURE = 1.0
TRACE_COLUMNS = ['iteration', 'avg_error', 'max_error', 'avg_complexity', 'max_complexity',
                 'mean_stiffness', 'points']

_logged_decisions = set()


def _log_once(key: str, message: str) -> None:
    if key not in _logged_decisions:
        _logged_decisions.add(key)
        logger.debug(message)


@dataclass(frozen=True)
class SimParams:
    """Simulation constants; iterations=None means iter_base + iter_per_vertex * n"""
    c_vv: float = SIMULATION['C_VV']
    c_ve: float = SIMULATION['C_VE']
    c_p: float = SIMULATION['C_P']
    c_ang: float = SIMULATION['C_ANG']
    step: float = SIMULATION['STEP']
    s_high: float = SIMULATION['S_HIGH']
    iterations: Optional[int] = None
    iter_base: int = SIMULATION['ITER_BASE']
    iter_per_vertex: int = SIMULATION['ITER_PER_VERTEX']
    passage_fraction: float = SIMULATION['PASSAGE_FRACTION']
    pairing_threshold: float = SIMULATION['PAIRING_THRESHOLD']
    merge_fraction: float = SIMULATION['MERGE_FRACTION']
    split_factor: float = SIMULATION['SPLIT_FACTOR']
    displacement_cap: float = SIMULATION['DISPLACEMENT_CAP']
    max_backoff_halvings: int = SIMULATION['MAX_BACKOFF_HALVINGS']
    distance_floor: float = SIMULATION['DISTANCE_FLOOR']
    angle_floor: float = SIMULATION['ANGLE_FLOOR']
    normalized_edge_length: float = SIMULATION['NORMALIZED_EDGE_LENGTH']
    ms_mode: bool = False
    passage_correction: bool = True
    angular_on_degree_two: bool = SIMULATION['ANGULAR_ON_DEGREE_TWO']
    check_planarity: bool = False
    trace_every: int = 0

    def __post_init__(self):
        if not InputValidator.validate_sim_params(self):
            raise ParameterError(f"invalid simulation parameters: {self}")

    @property
    def s_low(self) -> float:
        return 1.0 / self.effective_s_high

    @property
    def effective_s_high(self) -> float:
        return 1.0 if self.ms_mode else self.s_high

    @property
    def uses_passage_correction(self) -> bool:
        return self.passage_correction and not self.ms_mode

    def iterations_for(self, n: int) -> int:
        if self.iterations is not None:
            return self.iterations
        return self.iter_base + self.iter_per_vertex * n

    def for_graph(self, n: int) -> "SimParams":
        return replace(self, iterations=self.iterations_for(n))

    @classmethod
    def ms_baseline(cls, **overrides) -> "SimParams":
        """Baseline configuration: no stiffness, no passage correction"""
        overrides.update(ms_mode=True, s_high=1.0)
        return cls(**overrides)

    def as_dict(self) -> Dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# ---------------------------------------------------------------------------
# Single-element force laws
# ---------------------------------------------------------------------------

def repulsion_vv(u: PointLike, v: PointLike, c_vv: float = SIMULATION['C_VV'],
                 floor: float = SIMULATION['DISTANCE_FLOOR']) -> np.ndarray:
    """Force on u pushing it away from v, magnitude c_vv / d^2"""
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    r = float(np.hypot(*d))
    if r == 0:
        return np.zeros(2)
    return c_vv / max(r, floor) ** 2 * d / r


def repulsion_ve(v: PointLike, a: PointLike, b: PointLike, c_ve: float = SIMULATION['C_VE'],
                 floor: float = SIMULATION['DISTANCE_FLOOR']) -> np.ndarray:
    """
    Force on v pushing it away from segment a-b: magnitude c_ve / |xv|^2
    scaled by the alignment of xv with the segment normal, where x is the
    closest point of the segment.
    """
    p = np.asarray(v, dtype=float)[None, :]
    seg_a = np.asarray(a, dtype=float)[None, :]
    seg_b = np.asarray(b, dtype=float)[None, :]
    x, dist, _ = closest_points_on_segments(p, seg_a, seg_b)
    r = float(dist[0, 0])
    if r == 0:
        return np.zeros(2)
    direction = (p[0] - x[0, 0]) / r
    tangent = seg_b[0] - seg_a[0]
    length = float(np.hypot(*tangent))
    alignment = 1.0 if length == 0 else abs(float(np.dot(direction, (-tangent[1], tangent[0]))) / length)
    return c_ve / max(r, floor) ** 2 * alignment * direction


def angular_force(u: PointLike, v: PointLike, w: PointLike, degree: int,
                  c_ang: float = SIMULATION['C_ANG'],
                  angle_floor: float = SIMULATION['ANGLE_FLOOR']) -> np.ndarray:
    """
    Force on v from the wedge that opens counter-clockwise from u to w,
    along the wedge bisector: c_ang * (2 pi / degree - alpha) / alpha.
    """
    v = np.asarray(v, dtype=float)
    theta_u = math.atan2(u[1] - v[1], u[0] - v[0])
    theta_w = math.atan2(w[1] - v[1], w[0] - v[0])
    alpha = (theta_w - theta_u) % (2.0 * math.pi)
    magnitude = c_ang * (2.0 * math.pi / degree - alpha) / max(alpha, angle_floor)
    bisector = theta_u + alpha / 2.0
    return magnitude * np.array([math.cos(bisector), math.sin(bisector)])


def corrective_coefficient(delta):
    """1 + sign(delta - 1) * ln(1 + |delta - 1|); works on scalars and arrays"""
    delta = np.asarray(delta, dtype=float)
    value = 1.0 + np.sign(delta - 1.0) * np.log1p(np.abs(delta - 1.0))
    return float(value) if value.ndim == 0 else value


def _pairing(poly: np.ndarray, threshold: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pairing edge and distance for every vertex of a polygon. Edges
    incident to the vertex are excluded; an edge qualifies when its
    Euclidean distance is below ``threshold`` times the shorter boundary
    walk to the closest point. Vertices without one get edge -1 and
    distance inf.
    """
    k = len(poly)
    starts = poly
    ends = np.roll(poly, -1, axis=0)
    lengths = np.linalg.norm(ends - starts, axis=1)
    circ = lengths.sum()
    idx = np.arange(k)
    if k < 3 or circ <= 0:
        return np.full(k, -1), np.full(k, np.inf)

    _, d_e, t = closest_points_on_segments(poly, starts, ends)
    arc = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    forward = np.mod(arc[None, :] - arc[:, None], circ) + t * lengths[None, :]
    d_p = np.minimum(forward, circ - forward)

    incident = (idx[None, :] == idx[:, None]) | (idx[None, :] == (idx[:, None] - 1) % k)
    masked = np.where(~incident & (d_e < threshold * d_p), d_e, np.inf)
    edge = np.argmin(masked, axis=1)
    dist = masked[idx, edge]
    return np.where(np.isfinite(dist), edge, -1), dist


def pairing_edge(poly: Sequence[PointLike], i: int,
                 threshold: float = SIMULATION['PAIRING_THRESHOLD']) -> Optional[Tuple[int, float]]:
    """
    Pairing edge of vertex ``i``: index j of edge (poly[j], poly[j+1]) and
    its distance, or None. Ties go to the lowest edge index.
    """
    edges, dists = _pairing(as_array(poly), threshold)
    if edges[i] < 0:
        return None
    return int(edges[i]), float(dists[i])


def _betas(poly: np.ndarray, rho: float, passage_fraction: float,
           pairing_threshold: float, floor: float) -> np.ndarray:
    _, dist = _pairing(poly, pairing_threshold)
    betas = np.ones(len(poly))
    found = np.isfinite(dist)
    if found.any():
        delta = passage_fraction * rho / np.maximum(dist[found], floor)
        betas[found] = corrective_coefficient(delta)
    return betas


def beta(poly: Sequence[PointLike], i: int, rho: float,
         passage_fraction: float = SIMULATION['PASSAGE_FRACTION'],
         pairing_threshold: float = SIMULATION['PAIRING_THRESHOLD'],
         floor: float = SIMULATION['DISTANCE_FLOOR']) -> float:
    """Corrective coefficient at vertex ``i``; 1 when it has no pairing edge"""
    return float(_betas(as_array(poly), rho, passage_fraction, pairing_threshold, floor)[i])


def ideal_radius(total_area: float) -> float:
    """Radius of the disc with the map's total area"""
    return math.sqrt(total_area / math.pi)


def _right_normals(poly: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    delta = np.roll(poly, -1, axis=0) - poly
    lengths = np.linalg.norm(delta, axis=1)
    normals = np.zeros_like(delta)
    nonzero = lengths > 0
    normals[nonzero, 0] = delta[nonzero, 1] / lengths[nonzero]
    normals[nonzero, 1] = -delta[nonzero, 0] / lengths[nonzero]
    return normals, lengths


def pressure_magnitudes(poly: Sequence[PointLike], pressure: float, stiffness: float,
                        betas: Optional[Sequence[float]] = None,
                        c_p: float = SIMULATION['C_P']) -> Tuple[np.ndarray, np.ndarray]:
    """
    Magnitudes applied by edge j = (poly[j], poly[j+1]) on its start and
    end point. Over the whole polygon they sum to 2 * c_p * P * s.
    """
    pts = as_array(poly)
    _, lengths = _right_normals(pts)
    b_start = np.ones(len(pts)) if betas is None else np.asarray(betas, dtype=float)
    b_end = np.roll(b_start, -1)
    normalizer = float((lengths * (b_start + b_end)).sum())
    if normalizer <= 0:
        return np.zeros(len(pts)), np.zeros(len(pts))
    coef = c_p * pressure * stiffness * 2.0 / normalizer
    return coef * b_start * lengths, coef * b_end * lengths


def air_pressure_forces(poly: Sequence[PointLike], pressure: float, stiffness: float,
                        betas: Optional[Sequence[float]] = None,
                        c_p: float = SIMULATION['C_P']) -> np.ndarray:
    """Per-vertex pressure forces of a region along the right-hand (outward) edge normals"""
    pts = as_array(poly)
    normals, _ = _right_normals(pts)
    start, end = pressure_magnitudes(pts, pressure, stiffness, betas, c_p)
    return start[:, None] * normals + np.roll(end[:, None] * normals, 1, axis=0)


def region_pressure(region: Optional[Region], m: MetaphoricalMap) -> float:
    """
    Normalized pressure (w / A) * (sum A / sum w). The sums run over the
    internal regions, so a hole compares its own weight against the density
    of the regions around it. ``None`` stands for the outer face.
    """
    if region is None:
        return OUTER_PRESSURE
    area = m.area(region)
    if area <= 0:
        raise DegenerateMapError(format_error('ZERO_AREA_REGION', region=region.id), region=region.id)
    reference = m.internal_regions or m.regions
    total_area = sum(m.area(r) for r in reference)
    total_weight = sum(r.target_weight for r in reference)
    return region.target_weight / area * total_area / total_weight


# ---------------------------------------------------------------------------
# Simulation state
# ---------------------------------------------------------------------------

class _Topology:
    """Index arrays derived from the region boundaries; rebuilt after split/merge"""

    def __init__(self, ids: List[int], regions: List[Region]):
        n = len(ids)
        index = {pid: i for i, pid in enumerate(ids)}
        faces = [np.array([index[p] for p in r.boundary], dtype=np.int64) for r in regions]
        faces.append(np.array([index[p] for p in trace_outer_face(r.boundary for r in regions)],
                              dtype=np.int64))
        self.faces = faces
        self.n_bounded = len(regions)
        self.n_faces = len(faces)

        sizes = np.array([len(f) for f in faces], dtype=np.int64)
        self.face_start = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self.fe_face = np.repeat(np.arange(self.n_faces), sizes)
        self.fe_a = np.concatenate(faces)
        self.fe_b = np.concatenate([np.roll(f, -1) for f in faces])
        local = np.arange(len(self.fe_a)) - self.face_start[self.fe_face]
        self.fe_next = self.face_start[self.fe_face] + (local + 1) % sizes[self.fe_face]

        keys = np.minimum(self.fe_a, self.fe_b) * n + np.maximum(self.fe_a, self.fe_b)
        unique, fe_seg = np.unique(keys, return_inverse=True)
        self.seg_a = unique // n
        self.seg_b = unique % n
        n_seg = len(unique)

        vv, ve, cx = [], [], []
        for f, face in enumerate(faces):
            k = len(face)
            ii, jj = np.meshgrid(np.arange(k), np.arange(k), indexing='ij')
            ii, jj = ii.ravel(), jj.ravel()
            pi, pj = face[ii], face[jj]
            vv.append((pi * n + pj)[pi != pj])
            segs = fe_seg[self.face_start[f] + jj]
            off = (pi != self.seg_a[segs]) & (pi != self.seg_b[segs])
            ve.append((pi * n_seg + segs)[off])
            s1 = fe_seg[self.face_start[f] + ii]
            lower = s1 < segs
            cx.append((s1 * n_seg + segs)[lower])

        vv_keys = np.unique(np.concatenate(vv))
        self.vv_i, self.vv_j = vv_keys // n, vv_keys % n
        ve_keys = np.unique(np.concatenate(ve))
        self.ve_p, self.ve_s = ve_keys // n_seg, ve_keys % n_seg
        cx_keys = np.unique(np.concatenate(cx))
        self.cx_1, self.cx_2 = cx_keys // n_seg, cx_keys % n_seg

        self.he_src = np.concatenate([self.seg_a, self.seg_b])
        self.he_dst = np.concatenate([self.seg_b, self.seg_a])
        self.degree = np.bincount(self.he_src, minlength=n)

        self.weights = np.array([r.target_weight for r in regions], dtype=float)
        self.is_hole = np.array([r.is_hole for r in regions], dtype=bool)


class SimState:
    """Mutable simulation state: point coordinates, regions, stiffness and pressures"""

    def __init__(self, m: MetaphoricalMap):
        self.regions: List[Region] = [replace(r, boundary=list(r.boundary)) for r in m.regions]
        used = sorted({p for r in self.regions for p in r.boundary})
        self.ids: List[int] = used
        self.coords = np.array([m.vertex_pool[p] for p in used], dtype=float).reshape(-1, 2)
        self.stiffness: Dict[int, float] = {r.id: 1.0 for r in self.regions}
        self.pressures: Dict[int, float] = {r.id: 1.0 for r in self.regions}
        self.iteration = 0
        self._topology: Optional[_Topology] = None

    @property
    def topology(self) -> _Topology:
        if self._topology is None:
            self._topology = _Topology(self.ids, self.regions)
        return self._topology

    def invalidate(self) -> None:
        self._topology = None

    @property
    def map(self) -> MetaphoricalMap:
        pool = {pid: (float(x), float(y)) for pid, (x, y) in zip(self.ids, self.coords)}
        return MetaphoricalMap(pool, [replace(r, boundary=list(r.boundary)) for r in self.regions])

    def average_segment_length(self) -> float:
        topo = self.topology
        return float(np.linalg.norm(self.coords[topo.seg_b] - self.coords[topo.seg_a], axis=1).mean())

    def mean_stiffness(self) -> float:
        values = [self.stiffness[r.id] for r in self.regions if not r.is_hole]
        return float(np.mean(values)) if values else 1.0


def _face_areas(topo: _Topology, coords: np.ndarray) -> np.ndarray:
    a, b = coords[topo.fe_a], coords[topo.fe_b]
    cross = a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]
    return np.bincount(topo.fe_face, weights=cross, minlength=topo.n_faces) / 2.0


def _bounded_pressures(state: SimState) -> Tuple[np.ndarray, np.ndarray]:
    topo = state.topology
    areas = _face_areas(topo, state.coords)[:topo.n_bounded]
    bad = np.nonzero(areas <= 0)[0]
    if len(bad):
        region = state.regions[int(bad[0])].id
        raise DegenerateMapError(format_error('ZERO_AREA_REGION', region=region), region=region)
    # holes carry synthetic weights; the density is taken over internal regions
    reference = ~topo.is_hole if (~topo.is_hole).any() else np.ones(len(areas), dtype=bool)
    density = areas[reference].sum() / topo.weights[reference].sum()
    pressures = topo.weights / areas * density
    return pressures, areas


def update_stiffness(state: SimState, params: SimParams) -> SimState:
    """
    Move each internal region's stiffness by +step when its last pressure
    was above 1 and -step when below, clamped to [1/s_high, s_high].
    Holes keep stiffness 1.
    """
    s_high = params.effective_s_high
    s_low = 1.0 / s_high
    for r in state.regions:
        if r.is_hole:
            state.stiffness[r.id] = 1.0
            continue
        alpha = float(np.sign(state.pressures[r.id] - 1.0))
        state.stiffness[r.id] = min(s_high, max(s_low, state.stiffness[r.id] + alpha * params.step))
    return state


def compute_forces(state: SimState, params: SimParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Resultant force on every point against the current snapshot, and the
    distance from each point to its nearest non-incident segment on a
    shared face (inf when there is none).
    """
    topo = state.topology
    x = state.coords
    n = len(x)
    forces = np.zeros((n, 2))
    lbar = state.average_segment_length()
    floor = params.distance_floor * lbar

    # vertex-vertex repulsion within faces
    d = x[topo.vv_i] - x[topo.vv_j]
    r = np.hypot(d[:, 0], d[:, 1])
    with np.errstate(divide='ignore', invalid='ignore'):
        unit = np.where(r[:, None] > 0, d / r[:, None], 0.0)
    np.add.at(forces, topo.vv_i, (params.c_vv / np.maximum(r, floor) ** 2)[:, None] * unit)

    # vertex-segment repulsion within faces
    p = x[topo.ve_p]
    a = x[topo.seg_a[topo.ve_s]]
    b = x[topo.seg_b[topo.ve_s]]
    seg = b - a
    length_sq = (seg ** 2).sum(axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(length_sq > 0, np.clip(((p - a) * seg).sum(axis=1) / length_sq, 0.0, 1.0), 0.0)
    away = p - (a + t[:, None] * seg)
    r = np.hypot(away[:, 0], away[:, 1])
    with np.errstate(divide='ignore', invalid='ignore'):
        unit = np.where(r[:, None] > 0, away / r[:, None], 0.0)
        normal = np.where(length_sq[:, None] > 0,
                          np.column_stack([-seg[:, 1], seg[:, 0]]) / np.sqrt(length_sq)[:, None], 0.0)
    alignment = np.abs((unit * normal).sum(axis=1))
    np.add.at(forces, topo.ve_p,
              (params.c_ve / np.maximum(r, floor) ** 2 * alignment)[:, None] * unit)
    clearance = np.full(n, np.inf)
    np.minimum.at(clearance, topo.ve_p, r)

    # angular resolution over consecutive neighbors in counter-clockwise order
    vec = x[topo.he_dst] - x[topo.he_src]
    theta = np.arctan2(vec[:, 1], vec[:, 0])
    order = np.lexsort((theta, topo.he_src))
    src, theta = topo.he_src[order], theta[order]
    deg = topo.degree[src]
    group_start = np.concatenate([[0], np.cumsum(topo.degree)[:-1]])[src]
    pos = np.arange(len(src)) - group_start
    nxt = group_start + (pos + 1) % deg
    alpha = np.mod(theta[nxt] - theta, 2.0 * math.pi)
    active = deg >= (2 if params.angular_on_degree_two else 3)
    if not params.angular_on_degree_two:
        _log_once('angular', "angular force disabled at degree-2 points")
    magnitude = params.c_ang * (2.0 * math.pi / deg - alpha) / np.maximum(alpha, params.angle_floor)
    bisector = theta + alpha / 2.0
    contrib = magnitude[:, None] * np.column_stack([np.cos(bisector), np.sin(bisector)])
    np.add.at(forces, src[active], contrib[active])

    # air pressure; the outer face has P = s = 1 and no passage correction
    pressures, areas = _bounded_pressures(state)
    state.pressures = {reg.id: float(pv) for reg, pv in zip(state.regions, pressures)}
    stiffness = np.array([state.stiffness[reg.id] for reg in state.regions] + [1.0])
    face_pressure = np.concatenate([pressures, [OUTER_PRESSURE]])

    betas = np.ones(len(topo.fe_a))
    if params.uses_passage_correction:
        rho = ideal_radius(float(areas.sum()))
        for f in range(topo.n_bounded):
            face = topo.faces[f]
            start = topo.face_start[f]
            betas[start:start + len(face)] = _betas(
                x[face], rho, params.passage_fraction, params.pairing_threshold, floor)

    delta = x[topo.fe_b] - x[topo.fe_a]
    lengths = np.hypot(delta[:, 0], delta[:, 1])
    with np.errstate(divide='ignore', invalid='ignore'):
        normals = np.where(lengths[:, None] > 0,
                           np.column_stack([delta[:, 1], -delta[:, 0]]) / lengths[:, None], 0.0)
    b_start, b_end = betas, betas[topo.fe_next]
    normalizer = np.bincount(topo.fe_face, weights=lengths * (b_start + b_end), minlength=topo.n_faces)
    coef = params.c_p * face_pressure * stiffness * 2.0 / np.where(normalizer > 0, normalizer, np.inf)
    per_edge = coef[topo.fe_face] * lengths
    np.add.at(forces, topo.fe_a, (per_edge * b_start)[:, None] * normals)
    np.add.at(forces, topo.fe_b, (per_edge * b_end)[:, None] * normals)

    return forces, clearance


def truncate_displacements(displacements: np.ndarray, clearance: np.ndarray,
                           lbar: float, params: SimParams) -> np.ndarray:
    """Cap each move at half its clearance and at displacement_cap * average segment length"""
    limit = np.minimum(0.5 * clearance, params.displacement_cap * lbar)
    length = np.hypot(displacements[:, 0], displacements[:, 1])
    with np.errstate(divide='ignore', invalid='ignore'):
        scale = np.where(length > limit, limit / length, 1.0)
    return displacements * scale[:, None]


def _offending_points(topo: _Topology, coords: np.ndarray) -> np.ndarray:
    """Endpoints of crossing segments on a shared face, plus every point of a flipped region"""
    s1, s2 = topo.cx_1, topo.cx_2
    hits = proper_intersections(coords[topo.seg_a[s1]], coords[topo.seg_b[s1]],
                                coords[topo.seg_a[s2]], coords[topo.seg_b[s2]])
    bad = [topo.seg_a[s1[hits]], topo.seg_b[s1[hits]], topo.seg_a[s2[hits]], topo.seg_b[s2[hits]]]
    areas = _face_areas(topo, coords)[:topo.n_bounded]
    for f in np.nonzero(areas <= 0)[0]:
        bad.append(topo.faces[f])
    return np.unique(np.concatenate(bad)) if bad else np.empty(0, dtype=np.int64)


def safe_apply_displacements(state: SimState, displacements: np.ndarray,
                             params: SimParams) -> SimState:
    """
    Move every point by its displacement, halving the moves of points
    involved in a crossing or a flipped region until the subdivision is
    planar again. A point halved max_backoff_halvings times stays put.
    """
    topo = state.topology
    moves = np.array(displacements, dtype=float).reshape(-1, 2)
    halvings = np.zeros(len(moves), dtype=np.int64)
    guard = len(moves) * (params.max_backoff_halvings + 1) + 1

    for _ in range(guard):
        offenders = _offending_points(topo, state.coords + moves)
        if not len(offenders):
            break
        logger.debug("iteration %d: backing off %d points", state.iteration, len(offenders))
        halvings[offenders] += 1
        moves[offenders] *= 0.5
        moves[halvings >= params.max_backoff_halvings] = 0.0
    else:
        logger.warning("iteration %d: back-off did not settle, holding all points", state.iteration)
        moves[:] = 0.0

    state.coords = state.coords + moves
    return state


def _insert_between(boundary: List[int], u: int, v: int, new: int) -> None:
    k = len(boundary)
    for i in range(k):
        if {boundary[i], boundary[(i + 1) % k]} == {u, v}:
            boundary.insert(i + 1, new)
            return


def split_and_merge(state: SimState, params: SimParams) -> SimState:
    """
    Remove degree-2 points closer than merge_fraction * average segment
    length to a neighbor (when the shortcut stays planar and every region
    keeps three corners), then split segments longer than split_factor *
    average segment length at their midpoint.
    """
    _log_once('lbar', "average segment length is recomputed at the start of split/merge")
    pos: Dict[int, np.ndarray] = {pid: xy.copy() for pid, xy in zip(state.ids, state.coords)}
    lbar = state.average_segment_length()
    regions = state.regions

    usage: Dict[Edge, List[int]] = {}
    members: Dict[int, set] = {}
    neighbors: Dict[int, set] = {}
    for ri, r in enumerate(regions):
        k = len(r.boundary)
        for i in range(k):
            a, b = r.boundary[i], r.boundary[(i + 1) % k]
            usage.setdefault(normalize_edge(a, b), []).append(ri)
            members.setdefault(a, set()).add(ri)
            neighbors.setdefault(a, set()).add(b)
            neighbors.setdefault(b, set()).add(a)

    changed = False
    merge_limit = params.merge_fraction * lbar
    for p in sorted(pos):
        if len(neighbors.get(p, ())) != 2:
            continue
        a, b = sorted(neighbors[p])
        if min(np.hypot(*(pos[p] - pos[a])), np.hypot(*(pos[p] - pos[b]))) >= merge_limit:
            continue
        shortcut = normalize_edge(a, b)
        if shortcut in usage:
            continue
        owners = members[p]
        if any(len(regions[ri].boundary) <= 3 for ri in owners):
            continue
        on_outer = len(usage[normalize_edge(p, a)]) == 1 or len(usage[normalize_edge(p, b)]) == 1
        check = [e for e, users in usage.items()
                 if p not in e and (on_outer and len(users) == 1 or owners.intersection(users))]
        if check:
            seg_a = np.array([pos[e[0]] for e in check])
            seg_b = np.array([pos[e[1]] for e in check])
            if proper_intersection_matrix(pos[a][None, :], pos[b][None, :], seg_a, seg_b).any():
                continue
        trial = {ri: [q for q in regions[ri].boundary if q != p] for ri in owners}
        if any(_signed_area_of(trial[ri], pos) <= 0 for ri in owners):
            continue

        for ri, boundary in trial.items():
            regions[ri].boundary = boundary
        users = usage.pop(normalize_edge(p, a))
        usage.pop(normalize_edge(p, b))
        usage[shortcut] = users
        neighbors[a].discard(p)
        neighbors[a].add(b)
        neighbors[b].discard(p)
        neighbors[b].add(a)
        del neighbors[p], members[p], pos[p]
        changed = True

    split_limit = params.split_factor * lbar
    next_id = max(pos) + 1
    for (u, v), users in sorted(usage.items()):
        if np.hypot(*(pos[u] - pos[v])) <= split_limit:
            continue
        pos[next_id] = (pos[u] + pos[v]) / 2.0
        for ri in users:
            _insert_between(regions[ri].boundary, u, v, next_id)
        next_id += 1
        changed = True

    if changed:
        state.ids = sorted(pos)
        state.coords = np.array([pos[pid] for pid in state.ids], dtype=float)
        state.invalidate()
    return state


def _signed_area_of(boundary: Sequence[int], pos: Dict[int, np.ndarray]) -> float:
    pts = np.array([pos[q] for q in boundary])
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def find_crossings(m: MetaphoricalMap) -> List[Tuple[Edge, Edge]]:
    """Exhaustive check over all segment pairs of the map"""
    return m.crossing_segments()


def normalize_scale(m: MetaphoricalMap, target: float) -> Tuple[MetaphoricalMap, float]:
    """Rescale about the mean point so the average segment length equals ``target``"""
    lbar = m.average_segment_length()
    if lbar <= 0:
        raise DegenerateMapError("map has no boundary segments of positive length")
    factor = target / lbar
    return m.scaled(factor), factor


def iterate(state: SimState, params: SimParams) -> SimState:
    """One iteration: pressures, stiffness, forces, safe move, split/merge"""
    pressures, _ = _bounded_pressures(state)
    state.pressures = {r.id: float(pv) for r, pv in zip(state.regions, pressures)}
    update_stiffness(state, params)
    forces, clearance = compute_forces(state, params)
    moves = truncate_displacements(forces, clearance, state.average_segment_length(), params)
    safe_apply_displacements(state, moves, params)
    return split_and_merge(state, params)


def run(m: MetaphoricalMap, params: Optional[SimParams] = None
        ) -> Tuple[MetaphoricalMap, QualityReport, pd.DataFrame]:
    """
    Run the simulation on a copy of ``m``. Returns the final map at the
    input's scale, its quality report and the metric trace (empty unless
    params.trace_every > 0).
    """
    params = params or SimParams()
    m.validate()
    n = len(m.internal_regions)
    iterations = params.iterations_for(n)
    center = np.array(list(m.vertex_pool.values())).mean(axis=0)
    working, factor = normalize_scale(m, params.normalized_edge_length)
    state = SimState(working)

    logger.info("Starting simulation: n=%d, iter=%d, s_high=%s, step=%s, ms_mode=%s",
                n, iterations, params.effective_s_high, params.step, params.ms_mode)
    start_time = time.time()
    trace_rows = []

    for it in range(1, iterations + 1):
        state.iteration = it
        iterate(state, params)

        if params.check_planarity:
            crossings = find_crossings(state.map)
            if crossings:
                raise DegenerateMapError(
                    f"iteration {it}: " + format_error('CROSSING_EDGES', first=crossings[0][0],
                                                       second=crossings[0][1]))
        if params.trace_every and it % params.trace_every == 0:
            report = evaluate(state.map)
            trace_rows.append([it, report.avg_error, report.max_error, report.avg_complexity,
                               report.max_complexity, state.mean_stiffness(), len(state.ids)])
        if it % PERFORMANCE['PROGRESS_INTERVAL'] == 0:
            logger.debug("iteration %d/%d: %d points, mean stiffness %.3f",
                         it, iterations, len(state.ids), state.mean_stiffness())

    final = state.map.scaled(1.0 / factor, center)
    report = evaluate(final)
    logger.info("Simulation finished in %.2fs: avg error %.4f, max error %.4f, "
                "avg complexity %.4f, max complexity %.4f",
                time.time() - start_time, report.avg_error, report.max_error,
                report.avg_complexity, report.max_complexity)
    return final, report, pd.DataFrame(trace_rows, columns=TRACE_COLUMNS)
