"""
End-to-end quality checks on seeded benchmark suites.

The default run holds one full-length triangulated layout and one
full-length layout with holes to the quality thresholds. The remaining
suites are small and short and only check that every stage completes
with well-formed results. Set METAMAP_FULL_ACCEPTANCE=1 to run the
full-size suites against the thresholds.
"""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from metaphorical_maps.experiment import expand_grid, run_experiment
from metaphorical_maps.forcesim import SimParams, find_crossings, pressure_magnitudes, run
from metaphorical_maps.formats import save_graph, save_map
from metaphorical_maps.genbench import GenParams, generate_benchmark_graph
from metaphorical_maps.graphmodel import barycenter_visibility_holds
from metaphorical_maps.initmap import (
    _drop_auxiliary, hole_weight, initial_map, steiner_triangulate, tutte_embed
)
from metaphorical_maps.metrics import ampl, concave_vertex_count, conv, freq, polygon_complexity
from metaphorical_maps.utils import file_digest

from .conftest import FULL_ACCEPTANCE, star_polygon
from .test_metrics import _enclosing_radius, _reflex_count, regular_polygon

pytestmark = pytest.mark.slow

SUITE_GRAPHS = 50 if FULL_ACCEPTANCE else 3
SUITE_N = 20 if FULL_ACCEPTANCE else 10
SUITE_ITERATIONS = None if FULL_ACCEPTANCE else 40
BASE_SEED = 1000


def _suite_graphs():
    return [generate_benchmark_graph(GenParams(n=SUITE_N, weight_ratio=5.0, seed=BASE_SEED + g))
            for g in range(SUITE_GRAPHS)]


def _run_suite(graphs, params):
    reports = []
    for graph in graphs:
        final, report, _ = run(initial_map(graph, 'dual'), params)
        assert len(final.internal_regions) == graph.n
        assert 0.0 <= report.avg_error <= report.max_error
        assert 0.0 <= report.avg_complexity <= report.max_complexity <= 1.0
        reports.append(report)
    return reports


def _mean(reports, attribute):
    return float(np.mean([getattr(r, attribute) for r in reports]))


@pytest.fixture(scope='module')
def suite():
    return _suite_graphs()


@pytest.fixture(scope='module')
def stiffness_reports(suite):
    return _run_suite(suite, SimParams(iterations=SUITE_ITERATIONS))


@pytest.fixture(scope='module')
def baseline_reports(suite):
    return _run_suite(suite, SimParams.ms_baseline(iterations=SUITE_ITERATIONS))


def test_single_triangulated_layout_meets_thresholds():
    graph = generate_benchmark_graph(GenParams(n=20, weight_ratio=5.0, seed=BASE_SEED))
    params = SimParams()
    final, report, _ = run(initial_map(graph, 'dual'), params)
    assert params.iterations_for(graph.n) == 1000
    assert report.avg_error <= 0.01
    assert report.avg_complexity <= 0.2
    final.validate()


def test_single_layout_with_holes_meets_threshold():
    graph = generate_benchmark_graph(GenParams(n=40, weight_ratio=5.0, rem=0.4, seed=3000))
    final, report, _ = run(initial_map(graph, 'holes'), SimParams(iterations=1200))
    assert len(report.per_region) == graph.n
    assert report.avg_error <= 0.02
    final.validate()


def test_stiffness_reaches_small_error(stiffness_reports):
    if FULL_ACCEPTANCE:
        assert max(r.avg_error for r in stiffness_reports) <= 0.01
        assert _mean(stiffness_reports, 'avg_error') <= 0.005


def test_baseline_leaves_larger_error(baseline_reports):
    if FULL_ACCEPTANCE:
        assert all(0.03 <= r.avg_error <= 0.35 for r in baseline_reports)
        assert _mean(baseline_reports, 'avg_error') >= 0.05


def test_complexity_cost_is_small(stiffness_reports, baseline_reports):
    increase = _mean(stiffness_reports, 'avg_complexity') - _mean(baseline_reports, 'avg_complexity')
    if FULL_ACCEPTANCE:
        assert _mean(stiffness_reports, 'avg_complexity') <= 0.25
        assert increase <= 0.12


def test_error_complexity_trade_off(suite):
    errors, complexities = [], []
    for s_high in (1.0, 2.0, 4.0, 8.0):
        reports = _run_suite(suite, SimParams(s_high=s_high, iterations=SUITE_ITERATIONS))
        errors.append(_mean(reports, 'avg_error'))
        complexities.append(_mean(reports, 'avg_complexity'))
    if FULL_ACCEPTANCE:
        assert all(b <= a for a, b in zip(errors, errors[1:]))
        assert all(b >= a for a, b in zip(complexities, complexities[1:]))
        assert errors[-1] < errors[0]


def test_simulation_never_breaks_planarity():
    runs = 20 if FULL_ACCEPTANCE else 2
    for g in range(runs):
        graph = generate_benchmark_graph(GenParams(n=SUITE_N, weight_ratio=5.0, seed=2000 + g))
        final, _, _ = run(initial_map(graph, 'dual'),
                          SimParams(iterations=SUITE_ITERATIONS or 200, check_planarity=True))
        assert find_crossings(final) == []


def test_pressure_budget_over_random_regions():
    rng = np.random.default_rng(7)
    for _ in range(10_000 if FULL_ACCEPTANCE else 500):
        poly = star_polygon(rng, int(rng.integers(3, 20)))
        betas = rng.uniform(0.5, 4.0, size=len(poly))
        pressure = float(rng.uniform(0.05, 20.0))
        stiffness = float(rng.uniform(0.125, 8.0))
        start, end = pressure_magnitudes(poly, pressure, stiffness, betas, c_p=3.0)
        assert start.sum() + end.sum() == pytest.approx(6.0 * pressure * stiffness, rel=1e-9)


def test_metrics_match_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(1000 if FULL_ACCEPTANCE else 50):
        k = int(rng.integers(4, 11))
        poly = star_polygon(rng, k)
        shape = Polygon(poly)
        reflex = _reflex_count(poly)
        assert concave_vertex_count(poly) == reflex

        share = reflex / (k - 3)
        expected_freq = min(1.0, max(0.0, 1.0 + 16.0 * (share - 0.5) ** 4 - 8.0 * (share - 0.5) ** 2))
        expected_ampl = (shape.length - shape.convex_hull.exterior.length) / shape.length
        radius = _enclosing_radius(poly)
        reference = k / 2.0 * radius ** 2 * math.sin(2.0 * math.pi / k)
        expected_conv = min(1.0, max(0.0, 1.0 - shape.area / reference))

        assert freq(poly) == pytest.approx(expected_freq, abs=1e-9)
        assert ampl(poly) == pytest.approx(expected_ampl, abs=1e-9)
        assert conv(poly) == pytest.approx(expected_conv, abs=1e-9)
        assert polygon_complexity(poly) == pytest.approx(
            0.8 * expected_ampl * expected_freq + 0.2 * expected_conv, abs=1e-9)

    for n in range(3, 13):
        assert polygon_complexity(regular_polygon(n, radius=2.5)) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize('rem', [0.2, 0.4, 0.6])
def test_non_triangulated_pipeline(rem):
    graphs = 10 if FULL_ACCEPTANCE else 1
    n = 40 if FULL_ACCEPTANCE else 16
    params = SimParams(iterations=1200 if FULL_ACCEPTANCE else 30)
    for g in range(graphs):
        graph = generate_benchmark_graph(GenParams(n=n, weight_ratio=5.0, rem=rem, seed=3000 + g))
        open_faces = [face for face in graph.faces.inner if len(face) > 3]

        contacts = initial_map(graph, 'point-contacts')
        contacts.validate()
        assert contacts.holes == []
        final, _, _ = run(contacts, params)
        final.validate()

        holes = initial_map(graph, 'holes')
        holes.validate()
        assert len(holes.holes) == len(open_faces)
        expected = sorted(hole_weight([graph.weight(v) for v in face], len(face)) for face in open_faces)
        actual = sorted(r.target_weight for r in holes.holes)
        assert actual == pytest.approx(expected, rel=1e-9)

        final, report, _ = run(holes, params)
        final.validate()
        assert len(report.per_region) == graph.n
        if FULL_ACCEPTANCE:
            assert report.avg_error <= 0.02


def test_tutte_drawings_keep_barycenter_visibility():
    for g in range(50 if FULL_ACCEPTANCE else 5):
        graph = generate_benchmark_graph(GenParams(n=20, rem=0.5, seed=4000 + g))
        extended, aux_ids = steiner_triangulate(graph)
        embedded = tutte_embed(extended)
        drawing = _drop_auxiliary(graph, embedded) if aux_ids else embedded
        assert barycenter_visibility_holds(drawing)


def test_outputs_are_reproducible(tmp_path):
    digests = []
    for attempt in ('a', 'b'):
        folder = tmp_path / attempt
        graph = generate_benchmark_graph(GenParams(n=12, nest=0.3, rem=0.2, seed=55))
        final, _, _ = run(initial_map(graph, 'holes'), SimParams(iterations=20))
        rows = run_experiment(expand_grid({'n': [8], 'weight_ratio': [5.0], 's_high': [4.0],
                                           'step': [0.02], 'iter': [5]}, graphs=2, base_seed=9),
                              workers=1)
        folder.mkdir()
        table = folder / 'runs.csv'
        rows.drop(columns='wall_time_seconds').to_csv(table, index=False)
        digests.append((file_digest(save_graph(graph, folder / 'graph.json')),
                        file_digest(save_map(final, folder / 'map.json')),
                        file_digest(table)))
    assert digests[0] == digests[1]
