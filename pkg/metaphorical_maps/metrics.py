#!/usr/bin/env python3
"""
Quality measures for metaphorical maps

Normalized cartographic error of each region and the polygon
complexity of its boundary (vibration frequency, vibration amplitude and
convexity), aggregated over the non-hole regions of a map.
"""

import math
import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .geom import PointLike, as_array, convex_hull, min_enclosing_circle, polygon_perimeter, signed_area
from .initmap import MetaphoricalMap, Region
from .validation import DegenerateMapError, format_error

logger = logging.getLogger(__name__)

# Relative tolerance under which a vertex counts as collinear (hence convex)
COLLINEAR_TOLERANCE = 1e-9

_conv_vertex_count_logged = False


@dataclass(frozen=True)
class RegionQuality:
    region_id: int
    source_vertex: Optional[int]
    weight: float
    area: float
    normalized_area: float
    error: float
    signed_error: float
    complexity: float


@dataclass
class QualityReport:
    per_region: List[RegionQuality] = field(default_factory=list)
    avg_error: float = 0.0
    max_error: float = 0.0
    avg_complexity: float = 0.0
    max_complexity: float = 0.0

    def to_dataframe(self) -> pd.DataFrame:
        columns = [f.name for f in RegionQuality.__dataclass_fields__.values()]
        return pd.DataFrame([asdict(r) for r in self.per_region], columns=columns)

    def summary(self) -> dict:
        return {
            'avg_error': self.avg_error,
            'max_error': self.max_error,
            'avg_complexity': self.avg_complexity,
            'max_complexity': self.max_complexity,
        }


def _area_ratio(m: MetaphoricalMap) -> float:
    """Sum of weights over sum of areas, both over non-hole regions"""
    total_area = sum(m.area(r) for r in m.internal_regions)
    if total_area <= 0:
        raise DegenerateMapError(format_error('ZERO_TOTAL_AREA'))
    return m.total_weight / total_area


def normalized_area(region: Region, m: MetaphoricalMap) -> float:
    """Region area rescaled so that areas and weights have the same total"""
    return m.area(region) * _area_ratio(m)


def _error(normalized: float, weight: float) -> float:
    return abs(normalized - weight) / max(normalized, weight)


def cartographic_error(region: Region, m: MetaphoricalMap) -> float:
    return _error(normalized_area(region, m), region.target_weight)


def signed_error(region: Region, m: MetaphoricalMap) -> float:
    """Cartographic error, positive for oversized and negative for undersized regions"""
    a = normalized_area(region, m)
    return math.copysign(_error(a, region.target_weight), a - region.target_weight)


def concave_vertex_count(poly: Sequence[PointLike]) -> int:
    """
    Vertices whose interior angle exceeds 180 degrees. The turn at each
    vertex is compared with the polygon's orientation; collinear vertices
    count as convex.
    """
    pts = as_array(poly)
    orientation = math.copysign(1.0, signed_area(pts))
    prev_edge = pts - np.roll(pts, 1, axis=0)
    next_edge = np.roll(pts, -1, axis=0) - pts
    turn = prev_edge[:, 0] * next_edge[:, 1] - prev_edge[:, 1] * next_edge[:, 0]
    scale = np.linalg.norm(prev_edge, axis=1) * np.linalg.norm(next_edge, axis=1)
    reflex = (turn * orientation < 0) & (np.abs(turn) > COLLINEAR_TOLERANCE * scale)
    return int(reflex.sum())


def freq(poly: Sequence[PointLike]) -> float:
    """Frequency of the boundary's vibration, zero for convex polygons"""
    n = len(as_array(poly))
    if n <= 3:
        return 0.0
    share = concave_vertex_count(poly) / (n - 3)
    value = 1.0 + 16.0 * (share - 0.5) ** 4 - 8.0 * (share - 0.5) ** 2
    return min(1.0, max(0.0, value))


def ampl(poly: Sequence[PointLike]) -> float:
    """Amplitude of the vibration: relative perimeter excess over the hull"""
    perimeter = polygon_perimeter(poly)
    if perimeter <= 0:
        return 0.0
    hull = convex_hull(as_array(poly))
    value = (perimeter - polygon_perimeter(hull)) / perimeter
    return min(1.0, max(0.0, value))


def conv(poly: Sequence[PointLike]) -> float:
    """
    Convexity deficit against the regular polygon with the same vertex
    count inscribed in the smallest enclosing circle.
    """
    global _conv_vertex_count_logged
    pts = as_array(poly)
    n = len(pts)
    if not _conv_vertex_count_logged:
        logger.debug("conv counts every boundary vertex, collinear subdivision points included")
        _conv_vertex_count_logged = True
    circle = min_enclosing_circle(pts)
    reference = math.pi * circle.radius ** 2 * math.sin(2.0 * math.pi / n) * n / (2.0 * math.pi)
    if reference <= 0:
        return 0.0
    value = 1.0 - abs(signed_area(pts)) / reference
    return min(1.0, max(0.0, value))


def polygon_complexity(poly: Sequence[PointLike]) -> float:
    value = 0.8 * ampl(poly) * freq(poly) + 0.2 * conv(poly)
    return min(1.0, max(0.0, value))


def evaluate(m: MetaphoricalMap) -> QualityReport:
    """Per-region errors and complexities plus aggregates over non-hole regions"""
    ratio = _area_ratio(m)
    rows: List[RegionQuality] = []
    for region in m.internal_regions:
        poly = m.polygon(region)
        area = abs(signed_area(poly))
        normalized = area * ratio
        error = _error(normalized, region.target_weight)
        rows.append(RegionQuality(
            region_id=region.id,
            source_vertex=region.source_vertex,
            weight=region.target_weight,
            area=area,
            normalized_area=normalized,
            error=error,
            signed_error=math.copysign(error, normalized - region.target_weight),
            complexity=polygon_complexity(poly),
        ))

    if not rows:
        return QualityReport()
    errors = np.array([r.error for r in rows])
    complexities = np.array([r.complexity for r in rows])
    return QualityReport(
        per_region=rows,
        avg_error=float(errors.mean()),
        max_error=float(errors.max()),
        avg_complexity=float(complexities.mean()),
        max_complexity=float(complexities.max()),
    )
