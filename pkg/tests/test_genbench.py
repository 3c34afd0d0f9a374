"""Tests for :mod:`metaphorical_maps.genbench`"""

import math

import numpy as np
import pytest
from scipy.spatial import Delaunay

from metaphorical_maps import geom
from metaphorical_maps.genbench import (
    delaunay_triangles, delaunay_triangulate, GenParams, generate_benchmark_graph
)
from metaphorical_maps.graphmodel import is_biconnected, is_internally_triangulated
from metaphorical_maps.validation import GenerationError


@pytest.mark.parametrize('seed, n', [(0, 5), (1, 12), (2, 30), (3, 60)])
def test_triangles_match_scipy(seed, n):
    pts = np.random.default_rng(seed).random((n, 2))
    ours = {frozenset(t) for t in delaunay_triangles(pts)}
    reference = {frozenset(int(i) for i in simplex) for simplex in Delaunay(pts).simplices}
    assert ours == reference


def test_triangles_are_counter_clockwise():
    pts = np.random.default_rng(5).random((25, 2))
    for tri in delaunay_triangles(pts):
        assert geom.signed_area([pts[i] for i in tri]) > 0


def test_triangles_are_sorted():
    pts = np.random.default_rng(6).random((15, 2))
    triangles = delaunay_triangles(pts)
    assert triangles == sorted(triangles)


@pytest.mark.parametrize('points', [
    [(0, 0), (1, 1), (2, 2), (3, 3)],
    [(0, 0), (1, 0)],
])
def test_degenerate_input_rejected(points):
    with pytest.raises(GenerationError):
        delaunay_triangles(points)


def test_delaunay_triangulate_unit_weights():
    g = delaunay_triangulate([(0, 0), (1, 0), (0, 1), (1, 1.1)])
    assert g.n == 4
    assert g.m == 5
    assert all(g.weight(v) == 1.0 for v in g.vertex_ids)
    assert is_internally_triangulated(g)


def test_generator_is_deterministic():
    params = GenParams(n=25, nest=0.2, rem=0.3, seed=42)
    a = generate_benchmark_graph(params)
    b = generate_benchmark_graph(params)
    assert a.edges == b.edges
    assert a.positions() == b.positions()
    assert [a.weight(v) for v in a.vertex_ids] == [b.weight(v) for v in b.vertex_ids]


def test_different_seeds_differ():
    a = generate_benchmark_graph(GenParams(n=10, seed=1))
    b = generate_benchmark_graph(GenParams(n=10, seed=2))
    assert a.positions() != b.positions()


@pytest.mark.parametrize('ratio', [1.0, 5.0, 20.0])
def test_weights_within_ratio(ratio):
    g = generate_benchmark_graph(GenParams(n=40, weight_ratio=ratio, seed=9))
    weights = [g.weight(v) for v in g.vertex_ids]
    assert g.n == 40
    assert min(weights) >= 1.0
    assert max(weights) <= ratio


def test_benchmark_is_triangulated(small_benchmark):
    assert small_benchmark.n == 12
    assert is_internally_triangulated(small_benchmark)
    assert is_biconnected(small_benchmark)
    pts = small_benchmark.positions().values()
    assert all(0 <= p.x <= 1 and 0 <= p.y <= 1 for p in pts)


def test_nested_points_stay_inside_base_hull():
    n, nest = 30, 0.5
    g = generate_benchmark_graph(GenParams(n=n, nest=nest, seed=3))
    base_count = n - math.ceil(nest * n)
    base = [g.position(v) for v in g.vertex_ids if v < base_count]
    nested = [g.position(v) for v in g.vertex_ids if v >= base_count]
    hull = geom.convex_hull(base)
    assert g.n == n
    assert is_internally_triangulated(g)
    assert all(geom.point_in_polygon(p, hull) for p in nested)


def test_edge_removal_keeps_base_triangulation(sparse_benchmark):
    full = generate_benchmark_graph(GenParams(n=20, seed=11))
    assert sparse_benchmark.positions() == full.positions()
    assert set(sparse_benchmark.edges) < set(full.edges)

    outer = full.outer_face
    outer_edges = {tuple(sorted((outer[i], outer[(i + 1) % len(outer)]))) for i in range(len(outer))}
    assert outer_edges <= set(sparse_benchmark.edges)
    internal = full.m - len(outer_edges)
    assert full.m - sparse_benchmark.m <= math.floor(0.4 * internal)


def test_edge_removal_keeps_biconnectivity(sparse_benchmark):
    assert is_biconnected(sparse_benchmark)
    assert not is_internally_triangulated(sparse_benchmark)


@pytest.mark.parametrize('kwargs', [
    dict(n=3),
    dict(n=10, nest=1.5),
    dict(n=10, nest=-0.1),
    dict(n=10, weight_ratio=0.5),
    dict(n=10, rem=1.0),
    dict(n=10, rem=-0.2),
    dict(n=10, seed=-1),
])
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(GenerationError):
        GenParams(**kwargs)
