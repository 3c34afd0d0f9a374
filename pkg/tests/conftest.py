"""Shared fixtures: small hand-built graphs and maps plus seeded benchmarks"""

import math
import os

os.environ.setdefault('METAMAP_ENV', 'testing')

import numpy as np
import pytest

from metaphorical_maps.genbench import GenParams, generate_benchmark_graph
from metaphorical_maps.geom import Point2
from metaphorical_maps.graphmodel import Vertex, WeightedPlaneGraph
from metaphorical_maps.initmap import HOLE, INTERNAL, MetaphoricalMap, Region

# Full-size acceptance suites only run when explicitly requested
FULL_ACCEPTANCE = os.getenv('METAMAP_FULL_ACCEPTANCE') == '1'


def make_graph(points, edges, weights=None):
    weights = weights or [1.0] * len(points)
    vertices = [Vertex(i, float(w), Point2(float(x), float(y)))
                for i, ((x, y), w) in enumerate(zip(points, weights))]
    return WeightedPlaneGraph(vertices, edges)


def star_polygon(rng: np.random.Generator, k: int, r_min: float = 0.3) -> np.ndarray:
    """Random star-shaped (hence simple) polygon, counter-clockwise"""
    # one corner per sector keeps every angular gap below pi, so the origin sees all corners
    angles = (np.arange(k) + rng.uniform(0.1, 0.9, size=k)) * 2.0 * math.pi / k
    radii = rng.uniform(r_min, 1.0, size=k)
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


@pytest.fixture
def triangle_graph():
    """K3 at (0,0), (2,0), (0,2)"""
    return make_graph([(0, 0), (2, 0), (0, 2)], [(0, 1), (1, 2), (0, 2)], [1.0, 2.0, 3.0])


@pytest.fixture
def wheel_graph():
    """Five rim vertices around a hub (id 5); internally triangulated"""
    rim = [(math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5)) for k in range(5)]
    edges = [(k, (k + 1) % 5) for k in range(5)] + [(k, 5) for k in range(5)]
    return make_graph(rim + [(0.0, 0.0)], edges, [2.0, 1.0, 3.0, 1.0, 2.0, 4.0])


@pytest.fixture
def quad_graph():
    """Hexagon with a hub joined to every other rim vertex: three quadrilateral faces"""
    rim = [(math.cos(math.pi * k / 3), math.sin(math.pi * k / 3)) for k in range(6)]
    edges = [(k, (k + 1) % 6) for k in range(6)] + [(0, 6), (2, 6), (4, 6)]
    return make_graph(rim + [(0.0, 0.0)], edges, [1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 2.0])


@pytest.fixture
def bowtie_graph():
    """Two triangles sharing vertex 0: connected but not biconnected"""
    return make_graph([(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)],
                      [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])


@pytest.fixture
def two_rectangles():
    """Unit square next to a 3x1 rectangle, both with target weight 1"""
    pool = {0: (0, 0), 1: (1, 0), 2: (4, 0), 3: (4, 1), 4: (1, 1), 5: (0, 1)}
    regions = [
        Region(0, INTERNAL, [0, 1, 4, 5], 1.0, source_vertex=0),
        Region(1, INTERNAL, [1, 2, 3, 4], 1.0, source_vertex=1),
    ]
    return MetaphoricalMap(pool, regions)


@pytest.fixture
def matched_rectangles():
    """Unit square and 3x1 rectangle with weights proportional to their areas"""
    pool = {0: (0, 0), 1: (1, 0), 2: (4, 0), 3: (4, 1), 4: (1, 1), 5: (0, 1)}
    regions = [
        Region(0, INTERNAL, [0, 1, 4, 5], 2.0, source_vertex=0),
        Region(1, INTERNAL, [1, 2, 3, 4], 6.0, source_vertex=1),
    ]
    return MetaphoricalMap(pool, regions)


@pytest.fixture
def framed_hole_map():
    """3x3 square split into a ring of four regions around a unit hole"""
    pool = {
        0: (0, 0), 1: (3, 0), 2: (3, 3), 3: (0, 3),
        4: (1, 1), 5: (2, 1), 6: (2, 2), 7: (1, 2),
    }
    regions = [
        Region(0, INTERNAL, [0, 1, 5, 4], 2.0, source_vertex=0),
        Region(1, INTERNAL, [1, 2, 6, 5], 2.0, source_vertex=1),
        Region(2, INTERNAL, [2, 3, 7, 6], 2.0, source_vertex=2),
        Region(3, INTERNAL, [3, 0, 4, 7], 2.0, source_vertex=3),
        Region(4, HOLE, [4, 5, 6, 7], 1.0),
    ]
    return MetaphoricalMap(pool, regions)


@pytest.fixture(scope='session')
def small_benchmark():
    return generate_benchmark_graph(GenParams(n=12, seed=7))


@pytest.fixture(scope='session')
def sparse_benchmark():
    return generate_benchmark_graph(GenParams(n=20, rem=0.4, seed=11))
