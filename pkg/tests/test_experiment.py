"""Tests for :mod:`metaphorical_maps.experiment`"""

import pandas as pd
import pytest

from metaphorical_maps.experiment import (
    expand_grid, expand_preset, plateau_iterations, ROW_COLUMNS, run_experiment, run_one, RunSpec,
    spec_table, summarize, write_results
)
from metaphorical_maps.genbench import GenParams, generate_benchmark_graph
from metaphorical_maps.validation import ParameterError

TINY_GRID = {
    'n': [8], 'weight_ratio': [5.0], 's_high': [2.0, 4.0], 'step': [0.02], 'iter': [5],
    'compare_ms': True,
}


def tiny_spec(**overrides):
    values = dict(graph=0, seed=5, n=8, nest=0.0, weight_ratio=5.0, rem=0.0, init='dual',
                  s_high=2.0, step=0.02, iterations=5, ms_mode=False)
    values.update(overrides)
    return RunSpec(**values)


def test_grid_expansion_order():
    specs = expand_grid(TINY_GRID, graphs=2, base_seed=100)
    assert [(s.s_high, s.graph, s.ms_mode) for s in specs] == [
        (2.0, 0, False), (1.0, 0, True), (2.0, 1, False), (1.0, 1, True),
        (4.0, 0, False), (4.0, 1, False),
    ]
    assert [s.seed for s in specs] == [100, 100, 101, 101, 100, 101]
    assert all(s.init == 'dual' and s.nest == 0.0 and s.rem == 0.0 for s in specs)


def test_grid_needs_simulation_keys():
    with pytest.raises(ParameterError, match="missing s_high"):
        expand_grid({'n': [8], 'weight_ratio': [5.0], 'step': [0.02]})


@pytest.mark.parametrize('name, graphs, runs', [
    ('nesting', 1, 22),
    ('stiffness', 2, 8),
    ('step', 1, 12),
    ('nontriangulated', 1, 8),
    ('size', 1, 28),
])
def test_preset_sizes(name, graphs, runs):
    assert len(expand_preset(name, graphs=graphs)) == runs


def test_step_preset_traces():
    assert {s.trace_every for s in expand_preset('step', graphs=1)} == {10}
    assert {s.trace_every for s in expand_preset('weights', graphs=1)} == {0}


@pytest.mark.parametrize('name, graphs', [('unknown', 1), ('nesting', 0)])
def test_bad_preset_arguments(name, graphs):
    with pytest.raises(ParameterError):
        expand_preset(name, graphs=graphs)


def test_run_spec_sim_params():
    params = tiny_spec(iterations=None, n=20).sim_params()
    assert params.iterations == 1000
    baseline = tiny_spec(ms_mode=True, s_high=1.0).sim_params()
    assert baseline.ms_mode and baseline.effective_s_high == 1.0


def test_run_one():
    row = run_one(tiny_spec())
    assert row['status'] == 'SUCCESS'
    assert row['error'] == ''
    assert row['iter'] == 5
    assert row['holes'] == 0
    assert 0.0 <= row['avg_error'] <= row['max_error']
    assert row['wall_time_seconds'] > 0.0


def test_dual_falls_back_on_sparse_graphs():
    row = run_one(tiny_spec(n=12, rem=0.5))
    assert row['status'] == 'SUCCESS'
    assert row['holes'] == 0


def test_holes_count_matches_faces():
    spec = tiny_spec(n=12, rem=0.5, init='holes')
    graph = generate_benchmark_graph(GenParams(spec.n, spec.nest, spec.weight_ratio, spec.rem, spec.seed))
    expected = sum(1 for face in graph.faces.inner if len(face) > 3)
    row = run_one(spec)
    assert row['status'] == 'SUCCESS'
    assert row['holes'] == expected > 0


def test_failures_are_recorded():
    row = run_one(tiny_spec(n=3))
    assert row['status'] == 'FAILED'
    assert row['error'].startswith('GenerationError')
    assert row['avg_error'] is None


def test_traced_run_reports_plateaus():
    row = run_one(tiny_spec(iterations=6, trace_every=2))
    assert row['status'] == 'SUCCESS'
    for column in ('plateau_avg_error', 'plateau_max_error', 'plateau_avg_compl', 'plateau_max_compl'):
        assert row[column] in (2, 4, 6)


def test_plateau_iterations():
    trace = pd.DataFrame({
        'iteration': [10, 20, 30, 40],
        'avg_error': [0.5, 0.3, 0.298, 0.297],
        'max_error': [0.4, 0.4, 0.4, 0.4],
    })
    result = plateau_iterations(trace, threshold=0.005)
    assert result['avg_error'] == 20
    assert result['max_error'] == 10
    assert result['avg_complexity'] is None
    assert all(v is None for v in plateau_iterations(pd.DataFrame()).values())


def test_run_experiment_in_process():
    seen = []
    specs = [tiny_spec(), tiny_spec(graph=1, seed=6), tiny_spec(n=3)]
    rows = run_experiment(specs, workers=1, on_row=seen.append)
    assert list(rows.columns) == ROW_COLUMNS
    assert list(rows['seed']) == [5, 6, 5]
    assert list(rows['status']) == ['SUCCESS', 'SUCCESS', 'FAILED']
    assert len(seen) == 3


def _rows():
    base = dict(graph=0, seed=1, n=20, nest=0.0, weight_ratio=5.0, rem=0.0, init='dual', s_high=8.0,
                step=0.02, iter=1000, ms_mode=False, avg_error=0.1, max_error=0.2, avg_compl=0.3,
                max_compl=0.4, wall_time_seconds=1.0, holes=0, status='SUCCESS', error='')
    rows = [dict(base), dict(base, graph=1, avg_error=0.3, wall_time_seconds=3.0),
            dict(base, graph=2, status='FAILED', avg_error=None),
            dict(base, s_high=1.0, ms_mode=True, avg_error=0.5)]
    return pd.DataFrame(rows, columns=ROW_COLUMNS)


def test_summarize():
    summary = summarize(_rows())
    assert len(summary) == 2
    cell = summary[summary['ms_mode'] == False].iloc[0]  # noqa: E712
    assert cell['runs'] == 2
    assert cell['avg_error_mean'] == pytest.approx(0.2)
    assert cell['avg_error_min'] == pytest.approx(0.1)
    assert cell['avg_error_max'] == pytest.approx(0.3)
    assert cell['wall_time_seconds_mean'] == pytest.approx(2.0)


def test_write_results_csv(tmp_path):
    paths = write_results(_rows(), tmp_path / 'out' / 'weights.csv')
    assert [p.name for p in paths] == ['weights.csv', 'weights_summary.csv']
    assert len(pd.read_csv(paths[0])) == 4
    assert len(pd.read_csv(paths[1])) == 2


def test_write_results_excel(tmp_path):
    paths = write_results(_rows(), tmp_path / 'weights.xlsx')
    sheets = pd.read_excel(paths[0], sheet_name=None, engine='openpyxl')
    assert list(sheets) == ['runs', 'summary']
    assert len(sheets['runs']) == 4


def test_spec_table():
    table = spec_table(expand_grid(TINY_GRID, graphs=1, base_seed=0))
    assert len(table) == 3
    assert {'graph', 'seed', 'n', 's_high', 'ms_mode', 'trace_every'} <= set(table.columns)
