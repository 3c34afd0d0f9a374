#!/usr/bin/env python3
"""
Exchange formats

GraphFile and MapFile are versioned JSON documents written with sorted
keys, two-space indentation and shortest round-trip float formatting so
that equal inputs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from shapely.geometry import Polygon

from .config import GRAPH_FORMAT_VERSION, MAP_FORMAT_VERSION
from .geom import Point2
from .graphmodel import Vertex, WeightedPlaneGraph
from .initmap import HOLE, INTERNAL, MetaphoricalMap, Region
from .validation import DegenerateMapError, FormatError, InputValidator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _dump(document: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(document, sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def _read(path: PathLike, version: str) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror}", path=str(path)) from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, path=str(path), line=e.lineno) from e
    if not isinstance(document, dict):
        raise FormatError("top level must be an object", path=str(path))
    if document.get('version') != version:
        raise FormatError(f"expected version '{version}', got {document.get('version')!r}",
                          path=str(path), field='version')
    return document


def _number(value: Any, path: str, field: str) -> float:
    if not isinstance(value, (int, float)) or not InputValidator.validate_coordinate(value):
        raise FormatError(f"expected a finite number, got {value!r}", path=path, field=field)
    return float(value)


def _integer(value: Any, path: str, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"expected an integer, got {value!r}", path=path, field=field)
    return value


def _int_list(value: Any, path: str, field: str) -> List[int]:
    if not isinstance(value, list):
        raise FormatError("expected a list of ids", path=path, field=field)
    return [_integer(x, path, f"{field}[{i}]") for i, x in enumerate(value)]


# ---------------------------------------------------------------------------
# GraphFile
# ---------------------------------------------------------------------------

def graph_to_dict(g: WeightedPlaneGraph) -> Dict[str, Any]:
    return {
        'version': GRAPH_FORMAT_VERSION,
        'vertices': [
            {'id': v.id, 'weight': float(v.weight), 'x': float(v.position.x), 'y': float(v.position.y)}
            for v in g.vertices.values()
        ],
        'edges': [[u, v] for u, v in g.edges],
        'outer_face': list(g.outer_face),
    }


def graph_from_dict(document: Dict[str, Any], path: str = "<memory>") -> WeightedPlaneGraph:
    vertices = document.get('vertices')
    edges = document.get('edges')
    if not isinstance(vertices, list):
        raise FormatError("missing vertex list", path=path, field='vertices')
    if not isinstance(edges, list):
        raise FormatError("missing edge list", path=path, field='edges')

    parsed: List[Vertex] = []
    for i, item in enumerate(vertices):
        where = f"vertices[{i}]"
        if not isinstance(item, dict):
            raise FormatError("expected an object", path=path, field=where)
        for key in ('id', 'weight', 'x', 'y'):
            if key not in item:
                raise FormatError("missing value", path=path, field=f"{where}.{key}")
        parsed.append(Vertex(
            _integer(item['id'], path, f"{where}.id"),
            _number(item['weight'], path, f"{where}.weight"),
            Point2(_number(item['x'], path, f"{where}.x"), _number(item['y'], path, f"{where}.y")),
        ))
    if len({v.id for v in parsed}) != len(parsed):
        raise FormatError("duplicate vertex id", path=path, field='vertices')

    pairs = []
    for i, item in enumerate(edges):
        pair = _int_list(item, path, f"edges[{i}]")
        if len(pair) != 2:
            raise FormatError("an edge has exactly two endpoints", path=path, field=f"edges[{i}]")
        pairs.append((pair[0], pair[1]))

    outer = document.get('outer_face')
    outer_face = _int_list(outer, path, 'outer_face') if outer is not None else None
    return WeightedPlaneGraph(parsed, pairs, outer_face=outer_face)


def save_graph(g: WeightedPlaneGraph, path: PathLike) -> Path:
    return _dump(graph_to_dict(g), path)


def load_graph(path: PathLike) -> WeightedPlaneGraph:
    """Parse and validate a GraphFile; invariant violations raise GraphValidationError"""
    document = _read(path, GRAPH_FORMAT_VERSION)
    graph = graph_from_dict(document, str(path))
    logger.info("Loaded graph %s: %d vertices, %d edges", path, graph.n, graph.m)
    return graph


# ---------------------------------------------------------------------------
# MapFile
# ---------------------------------------------------------------------------

def map_to_dict(m: MetaphoricalMap) -> Dict[str, Any]:
    regions = []
    for r in m.regions:
        entry = {
            'id': r.id,
            'kind': r.kind,
            'target_weight': float(r.target_weight),
            'boundary': list(r.boundary),
        }
        if r.source_vertex is not None:
            entry['source_vertex'] = r.source_vertex
        regions.append(entry)
    return {
        'version': MAP_FORMAT_VERSION,
        'points': {str(pid): [float(p.x), float(p.y)] for pid, p in m.vertex_pool.items()},
        'regions': regions,
    }


def map_from_dict(document: Dict[str, Any], path: str = "<memory>") -> MetaphoricalMap:
    points = document.get('points')
    regions = document.get('regions')
    if not isinstance(points, dict):
        raise FormatError("missing point table", path=path, field='points')
    if not isinstance(regions, list):
        raise FormatError("missing region list", path=path, field='regions')

    pool = {}
    for key, xy in points.items():
        where = f"points.{key}"
        try:
            pid = int(key)
        except ValueError:
            raise FormatError("point ids must be integers", path=path, field=where) from None
        if not isinstance(xy, list) or len(xy) != 2:
            raise FormatError("expected [x, y]", path=path, field=where)
        pool[pid] = (_number(xy[0], path, where), _number(xy[1], path, where))

    parsed: List[Region] = []
    for i, item in enumerate(regions):
        where = f"regions[{i}]"
        if not isinstance(item, dict):
            raise FormatError("expected an object", path=path, field=where)
        kind = item.get('kind')
        if kind not in (INTERNAL, HOLE):
            raise FormatError(f"kind must be '{INTERNAL}' or '{HOLE}'", path=path, field=f"{where}.kind")
        weight = _number(item.get('target_weight'), path, f"{where}.target_weight")
        if not InputValidator.validate_weight(weight):
            raise FormatError("weight must be positive", path=path, field=f"{where}.target_weight")
        boundary = _int_list(item.get('boundary'), path, f"{where}.boundary")
        unknown = [p for p in boundary if p not in pool]
        if unknown:
            raise FormatError(f"unknown points {unknown}", path=path, field=f"{where}.boundary")
        source: Optional[int] = None
        if item.get('source_vertex') is not None:
            source = _integer(item['source_vertex'], path, f"{where}.source_vertex")
        if len(boundary) < 3 or not Polygon([pool[p] for p in boundary]).is_valid:
            raise FormatError("region boundary is not a simple polygon", path=path, field=f"{where}.boundary")
        parsed.append(Region(_integer(item.get('id'), path, f"{where}.id"), kind, boundary, weight, source))

    m = MetaphoricalMap(pool, parsed)
    try:
        m.validate()
    except DegenerateMapError as e:
        raise FormatError(str(e), path=path, field='regions') from e
    return m


def save_map(m: MetaphoricalMap, path: PathLike) -> Path:
    return _dump(map_to_dict(m), path)


def load_map(path: PathLike) -> MetaphoricalMap:
    document = _read(path, MAP_FORMAT_VERSION)
    m = map_from_dict(document, str(path))
    logger.info("Loaded map %s: %d regions, %d points", path, len(m.regions), len(m.vertex_pool))
    return m
