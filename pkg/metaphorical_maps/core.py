#!/usr/bin/env python3
"""
Metaphorical Map Generator

End-to-end pipeline behind the CLI and the Python API:
graph -> initial map -> force simulation -> quality report, with an
optional CSV event log of every run.
"""

import csv
import time
import logging
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from .config import DIRECTORIES
from .forcesim import SimParams, run
from .genbench import GenParams, generate_benchmark_graph
from .graphmodel import WeightedPlaneGraph
from .initmap import INTERNAL, MetaphoricalMap, initial_map
from .metrics import QualityReport
from .utils import format_timestamp
from .validation import InitializationError

logger = logging.getLogger(__name__)

INIT_METHODS = ('dual', 'point-contacts', 'holes', 'file')

LOG_COLUMNS = [
    'Timestamp',
    'Session_ID',
    'Event_Type',
    'Graph_ID',
    'Init',
    'Regions',
    'Status',
    'Output_File',
    'Error_Message',
    'Duration_Seconds',
]


@dataclass
class LayoutResult:
    graph: WeightedPlaneGraph
    initial: MetaphoricalMap
    final: MetaphoricalMap
    report: QualityReport
    trace: pd.DataFrame
    params: SimParams
    duration: float


def match_external_map(g: WeightedPlaneGraph, m: MetaphoricalMap) -> MetaphoricalMap:
    """
    Use a supplied map as the initial layout: one internal region per
    graph vertex, matched by source_vertex; target weights come from the
    graph.
    """
    by_source = {}
    for r in m.internal_regions:
        if r.source_vertex is None:
            raise InitializationError(f"region {r.id} has no source vertex")
        if r.source_vertex in by_source:
            raise InitializationError(f"vertex {r.source_vertex} has more than one region")
        by_source[r.source_vertex] = r
    missing = sorted(set(g.vertex_ids) - set(by_source))
    extra = sorted(set(by_source) - set(g.vertex_ids))
    if missing or extra:
        raise InitializationError(
            f"map regions do not match graph vertices (missing {missing}, unknown {extra})")

    regions = [replace(r, target_weight=g.weight(r.source_vertex)) if r.kind == INTERNAL else r
               for r in m.copy().regions]
    return MetaphoricalMap(m.vertex_pool, regions)


class MetaphoricalMapGenerator:
    """Runs the layout pipeline and keeps an optional CSV log of runs"""

    def __init__(self, params: Optional[SimParams] = None, init: str = 'dual',
                 tutte: bool = False, log_folder: Optional[Union[str, Path]] = None):
        if init not in INIT_METHODS:
            raise InitializationError(f"unknown initializer '{init}' (choose from {', '.join(INIT_METHODS)})")
        self.params = params or SimParams()
        self.init = init
        self.tutte = tutte
        self.log_folder = Path(log_folder) if log_folder else None
        self.log_file: Optional[Path] = None
        self.session_id = datetime.now().strftime("%Y%m%d_%H%M%S")

    def initialize_log(self) -> bool:
        """Create the CSV event log with its header row"""
        if self.log_folder is None:
            self.log_folder = Path.cwd() / DIRECTORIES['LOG_FOLDER']
        try:
            self.log_folder.mkdir(parents=True, exist_ok=True)
            timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
            self.log_file = self.log_folder / f"{timestamp}-layout_log.csv"
            with open(self.log_file, 'w', newline='', encoding='utf-8') as csvfile:
                csv.writer(csvfile).writerow(LOG_COLUMNS)
            logger.info("Logging runs to: %s", self.log_file)
            return True
        except OSError as e:
            logger.warning("Could not initialize log file: %s", e)
            self.log_file = None
            return False

    def log_event(self, event_type: str, graph_id: Optional[str] = None,
                  regions: Optional[int] = None, status: str = "SUCCESS",
                  output_file: Optional[str] = None, error_message: Optional[str] = None,
                  duration: Optional[float] = None) -> None:
        if not self.log_file:
            return
        try:
            with open(self.log_file, 'a', newline='', encoding='utf-8') as csvfile:
                csv.writer(csvfile).writerow([
                    format_timestamp(),
                    self.session_id,
                    event_type,
                    graph_id or "",
                    self.init,
                    regions if regions is not None else "",
                    status,
                    output_file or "",
                    error_message or "",
                    f"{duration:.2f}" if duration is not None else "",
                ])
        except OSError as e:
            logger.warning("Could not write to log file: %s", e)

    def generate(self, gen_params: GenParams) -> WeightedPlaneGraph:
        start = time.time()
        graph = generate_benchmark_graph(gen_params)
        self.log_event("GENERATE", graph_id=f"seed-{gen_params.seed}", regions=graph.n,
                       duration=time.time() - start)
        return graph

    def build_initial_map(self, graph: WeightedPlaneGraph,
                          external: Optional[MetaphoricalMap] = None) -> MetaphoricalMap:
        if self.init == 'file':
            if external is None:
                raise InitializationError("init 'file' needs an initial map")
            return match_external_map(graph, external)
        return initial_map(graph, self.init, tutte=self.tutte)

    def layout(self, graph: WeightedPlaneGraph, external: Optional[MetaphoricalMap] = None,
               graph_id: Optional[str] = None) -> LayoutResult:
        """Build the initial map, run the simulation and evaluate the result"""
        start = time.time()
        try:
            initial = self.build_initial_map(graph, external)
            params = self.params.for_graph(graph.n)
            final, report, trace = run(initial, params)
        except Exception as e:
            self.log_event("LAYOUT", graph_id=graph_id, regions=graph.n, status="FAILED",
                           error_message=str(e), duration=time.time() - start)
            raise
        duration = time.time() - start
        self.log_event("LAYOUT", graph_id=graph_id, regions=len(final.internal_regions),
                       status=f"avg_error={report.avg_error:.5f}", duration=duration)
        return LayoutResult(graph, initial, final, report, trace, params, duration)
