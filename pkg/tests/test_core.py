"""Tests for :mod:`metaphorical_maps.core`"""

import pandas as pd
import pytest

from metaphorical_maps.core import LOG_COLUMNS, MetaphoricalMapGenerator, match_external_map
from metaphorical_maps.forcesim import SimParams
from metaphorical_maps.genbench import GenParams
from metaphorical_maps.graphmodel import Vertex, WeightedPlaneGraph
from metaphorical_maps.initmap import INTERNAL, MetaphoricalMap, Region, dual_transform
from metaphorical_maps.validation import InitializationError


def _read_log(generator):
    return pd.read_csv(generator.log_file, keep_default_na=False)


def test_external_map_takes_graph_weights(triangle_graph):
    external = dual_transform(triangle_graph)
    reweighted = WeightedPlaneGraph([Vertex(v.id, 5.0, v.position) for v in triangle_graph.vertices.values()],
                                    triangle_graph.edges)
    matched = match_external_map(reweighted, external)
    assert [r.target_weight for r in matched.regions] == [5.0, 5.0, 5.0]
    assert [r.target_weight for r in external.regions] == [1.0, 2.0, 3.0]
    assert matched.vertex_pool == external.vertex_pool


def test_external_map_must_cover_graph(triangle_graph, wheel_graph):
    with pytest.raises(InitializationError, match="missing"):
        match_external_map(wheel_graph, dual_transform(triangle_graph))


def test_external_map_needs_sources(triangle_graph):
    m = MetaphoricalMap({0: (0, 0), 1: (1, 0), 2: (0, 1)}, [Region(0, INTERNAL, [0, 1, 2], 1.0)])
    with pytest.raises(InitializationError, match="no source vertex"):
        match_external_map(triangle_graph, m)


def test_unknown_initializer_rejected():
    with pytest.raises(InitializationError):
        MetaphoricalMapGenerator(init='spiral')


def test_file_initializer_needs_map(triangle_graph):
    generator = MetaphoricalMapGenerator(init='file')
    with pytest.raises(InitializationError):
        generator.build_initial_map(triangle_graph)


def test_layout(wheel_graph):
    generator = MetaphoricalMapGenerator(SimParams(iterations=5, trace_every=5))
    result = generator.layout(wheel_graph)
    assert result.params.iterations == 5
    assert len(result.initial.regions) == 6
    assert len(result.final.regions) == 6
    assert list(result.trace['iteration']) == [5]
    assert result.report.max_error >= 0.0
    assert result.duration >= 0.0


def test_layout_from_file_map(wheel_graph):
    external = dual_transform(wheel_graph)
    generator = MetaphoricalMapGenerator(SimParams(iterations=3), init='file')
    result = generator.layout(wheel_graph, external)
    assert result.initial.vertex_pool == external.vertex_pool


def test_layout_with_holes(quad_graph):
    result = MetaphoricalMapGenerator(SimParams(iterations=3), init='holes').layout(quad_graph)
    assert len(result.final.holes) == 3
    assert len(result.report.per_region) == quad_graph.n


def test_run_log(tmp_path, wheel_graph):
    generator = MetaphoricalMapGenerator(SimParams(iterations=3), log_folder=tmp_path / 'logs')
    assert generator.initialize_log()
    assert generator.log_file.name.endswith('-layout_log.csv')

    generator.generate(GenParams(n=8, seed=4))
    generator.layout(wheel_graph, graph_id='wheel')
    log = _read_log(generator)
    assert list(log.columns) == LOG_COLUMNS
    assert list(log['Event_Type']) == ['GENERATE', 'LAYOUT']
    assert log['Graph_ID'].tolist() == ['seed-4', 'wheel']
    assert log['Status'][1].startswith('avg_error=')


def test_failed_layout_is_logged(tmp_path, quad_graph):
    generator = MetaphoricalMapGenerator(SimParams(iterations=3), log_folder=tmp_path)
    generator.initialize_log()
    with pytest.raises(InitializationError):
        generator.layout(quad_graph, graph_id='quads')
    log = _read_log(generator)
    assert log['Status'].tolist() == ['FAILED']
    assert 'non-triangular' in log['Error_Message'][0]


def test_log_event_without_log_is_silent(wheel_graph):
    generator = MetaphoricalMapGenerator(SimParams(iterations=2))
    generator.log_event("LAYOUT", graph_id='x')
    assert generator.log_file is None
