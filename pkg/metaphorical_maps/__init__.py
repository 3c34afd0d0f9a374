#!/usr/bin/env python3
"""
Metaphorical Map Generator Package

Computes area-proportional metaphorical maps (contact representations)
of vertex-weighted plane graphs with a force-directed simulation.

Features:
- Adaptive region stiffness and narrow-passage correction
- Dual, point-contact and holes initial maps (Steiner + Tutte for
  non-triangulated graphs)
- Benchmark graph generator and polygon quality metrics
- JSON exchange formats, SVG heat maps and a batch experiment harness
"""

import logging

from .config import (
    APP_NAME,
    APP_VERSION,
    APP_AUTHOR,
    SIMULATION,
    GENERATOR,
    EXPERIMENT,
    PERFORMANCE,
    LOGGING,
    DIRECTORIES,
    RENDERING,
)

__version__ = APP_VERSION
__author__ = APP_AUTHOR
__license__ = "MIT"

from .validation import (
    MetaMapError,
    DegeneratePolygonError,
    EmbeddingError,
    GraphValidationError,
    GenerationError,
    InitializationError,
    DegenerateMapError,
    FormatError,
    ParameterError,
    InputValidator,
)
from .graphmodel import Vertex, WeightedPlaneGraph
from .genbench import GenParams, generate_benchmark_graph, delaunay_triangulate
from .initmap import MetaphoricalMap, Region, initial_map, steiner_triangulate, tutte_embed
from .metrics import QualityReport, evaluate
from .forcesim import SimParams, SimState, run
from .formats import load_graph, save_graph, load_map, save_map
from .render import RenderStyle, render_svg, write_svg
from .core import MetaphoricalMapGenerator, LayoutResult

__all__ = [
    # Pipeline
    "MetaphoricalMapGenerator",
    "LayoutResult",

    # Model
    "Vertex",
    "WeightedPlaneGraph",
    "MetaphoricalMap",
    "Region",
    "QualityReport",

    # Operations
    "GenParams",
    "generate_benchmark_graph",
    "delaunay_triangulate",
    "initial_map",
    "steiner_triangulate",
    "tutte_embed",
    "evaluate",
    "SimParams",
    "SimState",
    "run",
    "load_graph",
    "save_graph",
    "load_map",
    "save_map",
    "RenderStyle",
    "render_svg",
    "write_svg",

    # Errors
    "MetaMapError",
    "DegeneratePolygonError",
    "EmbeddingError",
    "GraphValidationError",
    "GenerationError",
    "InitializationError",
    "DegenerateMapError",
    "FormatError",
    "ParameterError",
    "InputValidator",

    # Configuration
    "APP_NAME",
    "APP_VERSION",
    "SIMULATION",
    "GENERATOR",
    "EXPERIMENT",
    "PERFORMANCE",
    "LOGGING",
    "DIRECTORIES",
    "RENDERING",

    # Package metadata
    "__version__",
    "__author__",
    "__license__",
]

# Package-level logger; handlers are configured by the CLI via utils.setup_logging
logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())
