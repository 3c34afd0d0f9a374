#!/usr/bin/env python3
"""
Command Line Interface for the Metaphorical Map Generator

Subcommands: generate (benchmark graph), layout (graph -> map),
metrics (map quality report), render (map -> SVG) and experiment
(batch protocols -> CSV / Excel).
"""

import sys
import argparse
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from .config import DIRECTORIES, EXPERIMENT, GENERATOR, SIMULATION
from .core import INIT_METHODS, MetaphoricalMapGenerator, match_external_map
from .experiment import expand_preset, run_experiment, spec_table, write_results
from .forcesim import SimParams
from .formats import load_graph, load_map, save_graph, save_map
from .genbench import GenParams
from .metrics import evaluate
from .render import RenderStyle, write_svg
from .utils import get_version_info, setup_logging
from .validation import FormatError, GenerationError, GraphValidationError, MetaMapError, ParameterError
from . import __version__, __author__

logger = logging.getLogger(__name__)

# Errors caused by the user's input rather than by a failed computation
VALIDATION_ERRORS = (GraphValidationError, FormatError, GenerationError, ParameterError)


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser"""
    parser = argparse.ArgumentParser(
        prog='metamap',
        description='Compute area-proportional metaphorical maps of weighted plane graphs',
        epilog=f'Metaphorical Map Generator v{__version__} by {__author__}',
        formatter_class=argparse.RawDescriptionHelpFormatter
    )

    parser.add_argument(
        '--version',
        action='version',
        version=f'%(prog)s {__version__}'
    )

    # Logging options
    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Enable verbose logging (DEBUG level)'
    )

    parser.add_argument(
        '-q', '--quiet',
        action='store_true',
        help='Suppress all output except errors'
    )

    parser.add_argument(
        '--log-file',
        action='store_true',
        help='Also write the log to Logs/metaphorical_maps.log'
    )

    parser.add_argument(
        '--info',
        action='store_true',
        help='Show package information and exit'
    )

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')

    # generate
    gen = commands.add_parser('generate', help='Generate a benchmark graph')
    gen.add_argument('-n', '--n', type=int, required=True, help='Number of vertices')
    gen.add_argument('--nest', type=float, default=0.0, help='Nesting ratio in [0, 1]')
    gen.add_argument('--weight-ratio', type=float, default=5.0, help='Maximum over minimum weight')
    gen.add_argument('--rem', type=float, default=0.0, help='Fraction of internal edges to remove')
    gen.add_argument('--seed', type=int, default=GENERATOR['DEFAULT_SEED'], help='Random seed')
    gen.add_argument('-o', '--output', type=str, help='GraphFile to write')

    # layout
    lay = commands.add_parser('layout', help='Compute a metaphorical map of a graph')
    lay.add_argument('graph', help='Input GraphFile')
    lay.add_argument('--init', choices=INIT_METHODS, default='dual', help='Initial map construction')
    lay.add_argument('--initial-map', type=str, help="MapFile used as the initial map (implies --init file)")
    lay.add_argument('--tutte', action='store_true', help='Re-embed the graph with Tutte before the dual transform')
    lay.add_argument('--iterations', type=int, help='Iteration count (default iter_base + iter_per_vertex * n)')
    lay.add_argument('--s-high', type=float, default=SIMULATION['S_HIGH'], help='Upper stiffness bound')
    lay.add_argument('--step', type=float, default=SIMULATION['STEP'], help='Stiffness step per iteration')
    lay.add_argument('--c-vv', type=float, default=SIMULATION['C_VV'], help='Vertex-vertex repulsion')
    lay.add_argument('--c-ve', type=float, default=SIMULATION['C_VE'], help='Vertex-edge repulsion')
    lay.add_argument('--c-p', type=float, default=SIMULATION['C_P'], help='Air pressure multiplier')
    lay.add_argument('--c-ang', type=float, default=SIMULATION['C_ANG'], help='Angular force multiplier')
    lay.add_argument('--ms-mode', action='store_true', help='Baseline mode: no stiffness, no passage correction')
    lay.add_argument('--no-passage-correction', action='store_true', help='Disable the narrow-passage correction')
    lay.add_argument('--no-angular-degree-two', action='store_true',
                     help='Skip the angular force at points of degree two')
    lay.add_argument('--check-planarity', action='store_true', help='Audit all segment pairs after every iteration')
    lay.add_argument('--trace', type=str, help='CSV file for the per-iteration metric trace')
    lay.add_argument('--trace-every', type=int, default=EXPERIMENT['TRACE_EVERY'],
                     help='Iterations between trace samples')
    lay.add_argument('--svg', type=str, help='Also render the final map to this SVG file')
    lay.add_argument('--run-log', action='store_true', help='Append the run to a CSV event log in Logs/')
    lay.add_argument('-o', '--output', type=str, help='MapFile to write')

    # metrics
    met = commands.add_parser('metrics', help='Report cartographic error and polygon complexity')
    met.add_argument('map', help='MapFile to evaluate')
    met.add_argument('graph', nargs='?', help='GraphFile whose weights are the targets')
    met.add_argument('--csv', type=str, help='Write per-region rows and the aggregates as CSV')

    # render
    ren = commands.add_parser('render', help='Render a map as SVG')
    ren.add_argument('map', help='MapFile to render')
    ren.add_argument('-o', '--output', type=str, help='SVG file to write')
    ren.add_argument('--heatmap', action='store_true', help='Fill regions by signed cartographic error')
    ren.add_argument('--labels', action='store_true', help='Label regions with their vertex ids')
    ren.add_argument('--show-points', action='store_true', help='Draw the subdivision points')
    ren.add_argument('--width', type=int, default=RenderStyle.width, help='Canvas width')
    ren.add_argument('--height', type=int, default=RenderStyle.height, help='Canvas height')

    # experiment
    exp = commands.add_parser('experiment', help='Run an evaluation protocol')
    exp.add_argument('preset', choices=sorted(EXPERIMENT['PRESETS']), help='Protocol to run')
    exp.add_argument('--graphs', type=int, help='Graphs per configuration cell')
    exp.add_argument('--base-seed', type=int, help='Seed of the first graph of every cell')
    exp.add_argument('--workers', type=int, help='Worker processes (default METAMAP_WORKERS or cores)')
    exp.add_argument('-o', '--output', type=str, help='CSV or .xlsx results file')
    exp.add_argument('--dry-run', action='store_true', help='List the runs without executing them')

    return parser


def setup_cli_logging(verbose: bool = False, quiet: bool = False, log_to_file: bool = False) -> None:
    """Setup logging for CLI usage"""
    if quiet:
        log_level = 'ERROR'
    elif verbose:
        log_level = 'DEBUG'
    else:
        log_level = 'INFO'

    setup_logging(log_level=log_level, log_to_file=log_to_file)


def show_info() -> None:
    """Display package information"""
    info = get_version_info()

    print("Metaphorical Map Generator - Package Information")
    print("=" * 50)
    print(f"Version: {info['package_version']}")
    print(f"Author: {info['author']}")
    print(f"Python: {info['python_version']}")
    print(f"Platform: {info['platform']}")
    print()
    print("Dependencies:")
    for key, value in info.items():
        if key.endswith('_version') and key not in ('package_version', 'python_version'):
            print(f"  - {key[:-len('_version')]}: {value}")


def print_parameters(title: str, values: Dict[str, Any]) -> None:
    print(f"{title}:")
    for key in sorted(values):
        print(f"  {key} = {values[key]}")


def _default_output(name: str) -> Path:
    return Path.cwd() / DIRECTORIES['OUTPUT_FOLDER'] / name


def sim_params_from_args(args: argparse.Namespace) -> SimParams:
    overrides = dict(
        c_vv=args.c_vv, c_ve=args.c_ve, c_p=args.c_p, c_ang=args.c_ang, step=args.step,
        iterations=args.iterations, passage_correction=not args.no_passage_correction,
        angular_on_degree_two=not args.no_angular_degree_two,
        check_planarity=args.check_planarity,
        trace_every=args.trace_every if args.trace else 0,
    )
    if args.ms_mode:
        return SimParams.ms_baseline(**overrides)
    return SimParams(s_high=args.s_high, **overrides)


def run_generate(args: argparse.Namespace) -> int:
    params = GenParams(n=args.n, nest=args.nest, weight_ratio=args.weight_ratio, rem=args.rem, seed=args.seed)
    print_parameters("Generator parameters", asdict(params))
    generator = MetaphoricalMapGenerator()
    graph = generator.generate(params)
    output = Path(args.output) if args.output else _default_output(f"graph-n{params.n}-seed{params.seed}.json")
    save_graph(graph, output)
    print(f"Graph with {graph.n} vertices and {graph.m} edges written to {output}")
    return 0


def run_layout(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    init = 'file' if args.initial_map else args.init
    external = load_map(args.initial_map) if args.initial_map else None
    params = sim_params_from_args(args)

    generator = MetaphoricalMapGenerator(params, init=init, tutte=args.tutte)
    if args.run_log and not generator.initialize_log():
        print("WARNING: Could not initialize run log")

    effective = params.for_graph(graph.n).as_dict()
    effective.update(init=init, tutte=args.tutte, graph=args.graph)
    print_parameters("Simulation parameters", effective)

    result = generator.layout(graph, external, graph_id=Path(args.graph).stem)
    output = Path(args.output) if args.output else _default_output(f"{Path(args.graph).stem}-map.json")
    save_map(result.final, output)
    print(f"Map written to {output} ({result.duration:.1f}s)")

    if args.trace:
        trace_path = Path(args.trace)
        trace_path.parent.mkdir(parents=True, exist_ok=True)
        result.trace.to_csv(trace_path, index=False)
        print(f"Trace written to {trace_path}")
    if args.svg:
        write_svg(result.final, args.svg, RenderStyle(heatmap=True))
        print(f"SVG written to {args.svg}")

    print_report(result.report.summary())
    return 0


def print_report(summary: Dict[str, float]) -> None:
    print()
    print(f"  Average error:      {summary['avg_error']:.4%}")
    print(f"  Maximum error:      {summary['max_error']:.4%}")
    print(f"  Average complexity: {summary['avg_complexity']:.4f}")
    print(f"  Maximum complexity: {summary['max_complexity']:.4f}")


def run_metrics(args: argparse.Namespace) -> int:
    m = load_map(args.map)
    if args.graph:
        m = match_external_map(load_graph(args.graph), m)
    report = evaluate(m)
    table = report.to_dataframe()

    print(table.to_string(index=False, float_format=lambda x: f"{x:.6f}"))
    print_report(report.summary())

    if args.csv:
        summary = {'region_id': 'all', **report.summary()}
        summary['error'] = summary.pop('avg_error')
        summary['complexity'] = summary.pop('avg_complexity')
        rows = table.to_dict('records') + [summary]
        out = Path(args.csv)
        out.parent.mkdir(parents=True, exist_ok=True)
        columns = list(table.columns) + ['max_error', 'max_complexity']
        pd.DataFrame(rows, columns=columns).to_csv(out, index=False)
        print(f"Report written to {out}")
    return 0


def run_render(args: argparse.Namespace) -> int:
    m = load_map(args.map)
    style = RenderStyle(width=args.width, height=args.height, heatmap=args.heatmap,
                        labels=args.labels, show_points=args.show_points)
    output = Path(args.output) if args.output else Path(args.map).with_suffix('.svg')
    write_svg(m, output, style)
    print(f"SVG written to {output}")
    return 0


def run_experiment_command(args: argparse.Namespace) -> int:
    preset = EXPERIMENT['PRESETS'][args.preset]
    specs = expand_preset(args.preset, args.graphs, args.base_seed)
    workers = args.workers if args.workers is not None else preset.get('workers')
    if workers is not None and workers < 1:
        raise ParameterError(f"workers must be positive (got {workers})")

    print_parameters(f"Experiment '{args.preset}'", {
        **{k: v for k, v in preset.items() if k != 'workers'},
        'graphs': args.graphs or EXPERIMENT['GRAPHS_PER_CELL'],
        'base_seed': args.base_seed if args.base_seed is not None else EXPERIMENT['BASE_SEED'],
        'runs': len(specs),
        'workers': workers or 'auto',
    })
    if args.dry_run:
        print(spec_table(specs).to_string(index=False))
        return 0

    rows = run_experiment(specs, workers=workers)
    output = (Path(args.output) if args.output
              else Path.cwd() / DIRECTORIES['EXPERIMENT_FOLDER'] / f"{args.preset}.csv")
    for path in write_results(rows, output):
        print(f"Results written to {path}")
    failed = int((rows['status'] != 'SUCCESS').sum())
    print("\nProcessing complete:")
    print(f"  Successful: {len(rows) - failed}")
    print(f"  Failed: {failed}")
    return 0


COMMANDS = {
    'generate': run_generate,
    'layout': run_layout,
    'metrics': run_metrics,
    'render': run_render,
    'experiment': run_experiment_command,
}


def run_command(args: argparse.Namespace) -> int:
    """Run a subcommand and translate failures into exit codes"""
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\nOperation cancelled by user")
        return 1
    except VALIDATION_ERRORS as e:
        print(f"ERROR: {e}", file=sys.stderr)
        logger.debug("Validation failure", exc_info=True)
        return 1
    except MetaMapError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        logger.exception("Run failed")
        return 2
    except Exception as e:
        print(f"ERROR: {e}", file=sys.stderr)
        logger.exception("Unexpected error in CLI")
        return 2


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main CLI entry point

    Args:
        argv: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 2 runtime failure)
    """
    if argv is None:
        argv = sys.argv[1:]

    parser = create_parser()
    args = parser.parse_args(argv)

    setup_cli_logging(args.verbose, args.quiet, args.log_file)

    if args.info:
        show_info()
        return 0

    if args.command is None:
        parser.print_help()
        return 1

    return run_command(args)


if __name__ == '__main__':
    sys.exit(main())
