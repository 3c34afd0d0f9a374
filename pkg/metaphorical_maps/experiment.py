#!/usr/bin/env python3
"""
Experiment harness

Expands the evaluation protocols into deterministic lists of runs,
executes them on a process pool, and writes one row per (graph,
configuration) plus per-cell summaries as CSV or Excel.
"""

import time
import logging
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd

from .config import EXPERIMENT
from .forcesim import SimParams, run
from .genbench import GenParams, generate_benchmark_graph
from .graphmodel import is_internally_triangulated
from .initmap import initial_map
from .utils import default_worker_count, memory_usage_mb
from .validation import ParameterError

logger = logging.getLogger(__name__)

CONFIG_COLUMNS = ['n', 'nest', 'weight_ratio', 'rem', 'init', 's_high', 'step', 'iter', 'ms_mode']
METRIC_COLUMNS = ['avg_error', 'max_error', 'avg_compl', 'max_compl', 'wall_time_seconds']
ROW_COLUMNS = (['graph', 'seed'] + CONFIG_COLUMNS + METRIC_COLUMNS
               + ['holes', 'status', 'error'])
PLATEAU_METRICS = {
    'avg_error': 'plateau_avg_error',
    'max_error': 'plateau_max_error',
    'avg_complexity': 'plateau_avg_compl',
    'max_complexity': 'plateau_max_compl',
}


@dataclass(frozen=True)
class RunSpec:
    graph: int
    seed: int
    n: int
    nest: float
    weight_ratio: float
    rem: float
    init: str
    s_high: float
    step: float
    iterations: Optional[int]
    ms_mode: bool
    trace_every: int = 0

    def sim_params(self) -> SimParams:
        if self.ms_mode:
            params = SimParams.ms_baseline(step=self.step, iterations=self.iterations,
                                           trace_every=self.trace_every)
        else:
            params = SimParams(s_high=self.s_high, step=self.step, iterations=self.iterations,
                               trace_every=self.trace_every)
        return params.for_graph(self.n)


def expand_preset(name: str, graphs: Optional[int] = None,
                  base_seed: Optional[int] = None) -> List[RunSpec]:
    """Run specs of a named protocol, in grid order"""
    presets = EXPERIMENT['PRESETS']
    if name not in presets:
        raise ParameterError(f"unknown experiment preset '{name}' (choose from {', '.join(presets)})")
    return expand_grid(presets[name], graphs, base_seed)


def expand_grid(grid: Dict[str, Any], graphs: Optional[int] = None,
                base_seed: Optional[int] = None) -> List[RunSpec]:
    """
    Cartesian product of the grid lists times ``graphs`` seeded graphs.
    Graph g of every cell uses seed base_seed + g. With compare_ms, each
    graph also gets one baseline run per generator cell and initializer.
    """
    graphs = graphs if graphs is not None else EXPERIMENT['GRAPHS_PER_CELL']
    base_seed = base_seed if base_seed is not None else EXPERIMENT['BASE_SEED']
    if graphs < 1:
        raise ParameterError(f"graphs per cell must be positive (got {graphs})")
    trace_every = EXPERIMENT['TRACE_EVERY'] if grid.get('trace') else 0

    specs: List[RunSpec] = []
    seen_baselines = set()
    keys = ['n', 'nest', 'weight_ratio', 'rem', 'init', 'iter', 's_high', 'step']
    defaults = {'init': ['dual'], 'iter': [None], 'nest': [0.0], 'rem': [0.0]}
    missing = [k for k in keys if k not in grid and k not in defaults]
    if missing:
        raise ParameterError(f"experiment grid is missing {', '.join(missing)}")
    values = [grid.get(k, defaults.get(k)) for k in keys]
    for n, nest, ratio, rem, init, iterations, s_high, step in itertools.product(*values):
        for g in range(graphs):
            common = dict(graph=g, seed=base_seed + g, n=n, nest=nest, weight_ratio=ratio, rem=rem,
                          init=init, iterations=iterations, trace_every=trace_every)
            specs.append(RunSpec(s_high=s_high, step=step, ms_mode=False, **common))
            if grid.get('compare_ms'):
                key = (n, nest, ratio, rem, init, iterations, step, g)
                if key not in seen_baselines:
                    seen_baselines.add(key)
                    specs.append(RunSpec(s_high=1.0, step=step, ms_mode=True, **common))
    return specs


def plateau_iterations(trace: pd.DataFrame,
                       threshold: float = EXPERIMENT['PLATEAU_THRESHOLD']) -> Dict[str, Optional[int]]:
    """
    For each traced metric, the first iteration after which it never
    changes by more than ``threshold`` between consecutive samples.
    """
    result: Dict[str, Optional[int]] = {}
    for metric in PLATEAU_METRICS:
        if trace.empty or metric not in trace:
            result[metric] = None
            continue
        values = trace[metric].to_numpy()
        iterations = trace['iteration'].to_numpy()
        moving = [i for i in range(1, len(values)) if abs(values[i] - values[i - 1]) > threshold]
        result[metric] = int(iterations[moving[-1]]) if moving else int(iterations[0])
    return result


def run_one(spec: RunSpec) -> Dict[str, Any]:
    """Generate, initialize and simulate one run; failures are recorded in the row"""
    params = spec.sim_params()
    row: Dict[str, Any] = {
        'graph': spec.graph, 'seed': spec.seed, 'n': spec.n, 'nest': spec.nest,
        'weight_ratio': spec.weight_ratio, 'rem': spec.rem, 'init': spec.init,
        's_high': params.effective_s_high, 'step': spec.step, 'iter': params.iterations,
        'ms_mode': spec.ms_mode,
        'avg_error': None, 'max_error': None, 'avg_compl': None, 'max_compl': None,
        'wall_time_seconds': None, 'holes': 0, 'status': 'SUCCESS', 'error': '',
    }
    start = time.perf_counter()
    try:
        graph = generate_benchmark_graph(GenParams(spec.n, spec.nest, spec.weight_ratio, spec.rem, spec.seed))
        method = spec.init
        if method == 'dual' and not is_internally_triangulated(graph):
            method = 'point-contacts'
        m = initial_map(graph, method)
        _, report, trace = run(m, params)
        row.update(avg_error=report.avg_error, max_error=report.max_error,
                   avg_compl=report.avg_complexity, max_compl=report.max_complexity,
                   holes=len(m.holes))
        if spec.trace_every:
            for metric, value in plateau_iterations(trace).items():
                row[PLATEAU_METRICS[metric]] = value
    except Exception as e:
        logger.warning("run failed (seed %d, n %d): %s", spec.seed, spec.n, e)
        row.update(status='FAILED', error=f"{type(e).__name__}: {e}")
    row['wall_time_seconds'] = time.perf_counter() - start
    return row


def run_experiment(specs: Iterable[RunSpec], workers: Optional[int] = None,
                   on_row=None) -> pd.DataFrame:
    """
    Execute specs on ``workers`` processes (1 runs in-process). Rows come
    back in spec order whatever the completion order.
    """
    specs = list(specs)
    workers = workers or default_worker_count()
    logger.info("Running %d runs on %d worker(s)", len(specs), workers)
    start = time.time()
    rows: List[Dict[str, Any]] = []

    def collect(results):
        for i, row in enumerate(results, 1):
            rows.append(row)
            if on_row is not None:
                on_row(row)
            if i % 10 == 0 or i == len(specs):
                failed = sum(1 for r in rows if r['status'] != 'SUCCESS')
                logger.info("Progress: %d/%d runs (%d failed)", i, len(specs), failed)

    if workers == 1:
        collect(run_one(spec) for spec in specs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            collect(pool.map(run_one, specs))

    logger.info("Experiment finished in %.1fs (memory %.0f MB)", time.time() - start, memory_usage_mb())
    columns = ROW_COLUMNS + [c for c in PLATEAU_METRICS.values() if any(c in r for r in rows)]
    return pd.DataFrame(rows, columns=columns)


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """Mean, min and max of every metric and the wall time per configuration"""
    ok = rows[rows['status'] == 'SUCCESS']
    metrics = [c for c in METRIC_COLUMNS + list(PLATEAU_METRICS.values()) if c in ok]
    grouped = ok.groupby(CONFIG_COLUMNS, sort=False, dropna=False)[metrics]
    summary = grouped.agg(['mean', 'min', 'max'])
    summary.columns = [f"{metric}_{stat}" for metric, stat in summary.columns]
    summary.insert(0, 'runs', grouped.size())
    return summary.reset_index()


def write_results(rows: pd.DataFrame, path: Union[str, Path]) -> List[Path]:
    """
    Write the raw rows and the summary. A .xlsx path gives one workbook
    with two sheets; otherwise two CSV files (the summary with a
    ``_summary`` suffix).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    summary = summarize(rows)
    if path.suffix.lower() == '.xlsx':
        with pd.ExcelWriter(path, engine='openpyxl') as writer:
            rows.to_excel(writer, sheet_name='runs', index=False)
            summary.to_excel(writer, sheet_name='summary', index=False)
        logger.info("Wrote %d rows to %s", len(rows), path)
        return [path]

    summary_path = path.with_name(f"{path.stem}_summary.csv")
    rows.to_csv(path, index=False)
    summary.to_csv(summary_path, index=False)
    logger.info("Wrote %d rows to %s and summary to %s", len(rows), path, summary_path)
    return [path, summary_path]


def spec_table(specs: Iterable[RunSpec]) -> pd.DataFrame:
    return pd.DataFrame([asdict(s) for s in specs])
