#!/usr/bin/env python3
"""
Configuration File for the Metaphorical Map Generator

Centralized defaults for the force simulation, the benchmark generator,
the experiment harness, rendering and application behavior.
"""

import os

# Application Information
APP_NAME = "Metaphorical Map Generator"
APP_VERSION = "1.0.0"
APP_AUTHOR = "Graph Drawing Lab"

# File format version tags
GRAPH_FORMAT_VERSION = "metamap-graph/1"
MAP_FORMAT_VERSION = "metamap-map/1"

# Force simulation defaults
SIMULATION = {
    # Force multipliers
    'C_VV': 25.0,    # vertex-vertex repulsion
    'C_VE': 10.0,    # vertex-edge repulsion
    'C_P': 3.0,      # air pressure
    'C_ANG': 0.5,    # angular resolution

    # Stiffness schedule
    'STEP': 0.02,
    'S_HIGH': 8.0,
    'ITER_BASE': 800,
    'ITER_PER_VERTEX': 10,

    # Narrow-passage correction
    'PASSAGE_FRACTION': 0.05,
    'PAIRING_THRESHOLD': 0.9,

    # Subdivision maintenance (fractions of the average segment length)
    'MERGE_FRACTION': 0.1,
    'SPLIT_FACTOR': 2.0,

    # Planarity guard
    'DISPLACEMENT_CAP': 0.5,
    'MAX_BACKOFF_HALVINGS': 20,

    # Numerical floors
    'DISTANCE_FLOOR': 1e-6,   # times the average segment length
    'ANGLE_FLOOR': 1e-3,      # radians

    # Average segment length the initial map is rescaled to
    'NORMALIZED_EDGE_LENGTH': 10.0,

    'ANGULAR_ON_DEGREE_TWO': True,
}

# Benchmark generator defaults
GENERATOR = {
    'DEFAULT_SEED': 20240601,
    'NESTING_RETRIES': 100,
    'DEGENERACY_RETRIES': 10,
    'PERTURBATION': 1e-9,
    # super-triangle size relative to the point spread, tried in order
    'SUPER_TRIANGLE_SCALES': (1e2, 1e4, 1e6),
}

# Experiment protocols (grids reproduce the published evaluation)
EXPERIMENT = {
    'GRAPHS_PER_CELL': 50,
    'BASE_SEED': 1000,
    'PRESETS': {
        'nesting': {
            'n': [20], 'nest': [round(0.1 * i, 1) for i in range(11)],
            'weight_ratio': [5.0], 'rem': [0.0], 's_high': [8.0],
            'step': [0.02], 'iter': [None], 'compare_ms': True,
        },
        'weights': {
            'n': [20], 'nest': [0.0], 'weight_ratio': [5.0, 10.0, 15.0, 20.0],
            'rem': [0.0], 's_high': [8.0], 'step': [0.02], 'iter': [None],
            'compare_ms': True,
        },
        'size': {
            'n': list(range(15, 81, 5)), 'nest': [0.0], 'weight_ratio': [5.0],
            'rem': [0.0], 's_high': [8.0], 'step': [0.02], 'iter': [None],
            'compare_ms': True,
        },
        'stiffness': {
            'n': [20], 'nest': [0.0], 'weight_ratio': [5.0], 'rem': [0.0],
            's_high': [1.0, 2.0, 4.0, 8.0], 'step': [0.02], 'iter': [None],
            'compare_ms': False,
        },
        'step': {
            'n': [20], 'nest': [0.0], 'weight_ratio': [5.0], 'rem': [0.0],
            's_high': [2.0, 4.0, 8.0], 'step': [0.01, 0.02, 0.04],
            'iter': [5000], 'compare_ms': True, 'trace': True,
        },
        'nontriangulated': {
            'n': [40], 'nest': [0.0], 'weight_ratio': [5.0],
            'rem': [0.0, 0.2, 0.4, 0.6], 's_high': [8.0], 'step': [0.02],
            'iter': [1200], 'init': ['point-contacts', 'holes'],
            'compare_ms': False,
        },
        'timing': {
            'n': list(range(15, 81, 5)), 'nest': [0.0], 'weight_ratio': [5.0],
            'rem': [0.0], 's_high': [8.0], 'step': [0.02], 'iter': [None],
            'compare_ms': True, 'workers': 1,
        },
    },
    'PLATEAU_THRESHOLD': 0.005,
    'TRACE_EVERY': 10,
}

# Performance Configuration
PERFORMANCE = {
    'MAX_WORKERS': 4,
    'PROGRESS_INTERVAL': 100,   # iterations between progress log lines
}

# Logging Configuration
LOGGING = {
    'LEVEL': 'INFO',
    'FORMAT': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'MAX_LOG_SIZE_MB': 10,
    'BACKUP_COUNT': 5,
    'LOG_TO_FILE': False,
    'LOG_TO_CONSOLE': True,
}

# Directory Configuration
DIRECTORIES = {
    'OUTPUT_FOLDER': 'Maps',
    'EXPERIMENT_FOLDER': 'Experiments',
    'LOG_FOLDER': 'Logs',
}

# SVG rendering
RENDERING = {
    'WIDTH': 800,
    'HEIGHT': 800,
    'MARGIN': 20,
    'STROKE': '#333333',
    'STROKE_WIDTH': 1.0,
    'FILL': '#e8e4d8',
    'HOLE_HATCH': '#999999',
    'COLORMAP': 'RdBu_r',
    'ERROR_RANGE': 0.3,   # |signed error| mapped to the ends of the palette
    'LEGEND_STEPS': 7,
    'FONT_SIZE': 10,
}

# Error Messages
ERROR_MESSAGES = {
    'DEGENERATE_POLYGON': 'polygon needs at least 3 points, got {count}',
    'NON_POSITIVE_WEIGHT': 'vertex {vertex}: weight must be positive (got {weight})',
    'NON_FINITE_COORDINATE': 'vertex {vertex}: coordinates must be finite',
    'CROSSING_EDGES': 'edges {first} and {second} cross',
    'DISCONNECTED': 'graph is not connected',
    'NOT_BICONNECTED': 'graph is not biconnected',
    'UNKNOWN_VERTEX': 'edge {edge} references unknown vertex {vertex}',
    'ROTATION_MISMATCH': 'rotation at vertex {vertex} disagrees with positions',
    'EULER_MISMATCH': 'Euler check failed: V={v} E={e} F={f}',
    'VISIBILITY_VIOLATED': 'face {face} violates barycenter visibility',
    'ZERO_AREA_REGION': 'region {region} has zero area',
    'CLOCKWISE_REGION': 'region {region} is oriented clockwise',
    'REPEATED_POINT': 'region {region} repeats boundary points {points}',
    'SHORT_BOUNDARY': 'region {region} has {count} boundary points, needs at least 3',
    'ZERO_TOTAL_AREA': 'map has zero total area',
    'NESTING_FAILED': 'could not place {count} nested points after {retries} attempts',
    'COLLINEAR_POINTS': 'all points are collinear',
    'TUTTE_FAILED': 'Tutte embedding failed: {details}',
    'INVALID_PARAMETER': 'invalid parameter {name}={value}',
}


# Environment-specific overrides
def load_environment_config():
    """Load environment-specific configuration overrides"""
    env = os.getenv('METAMAP_ENV', 'production').lower()

    if env == 'development':
        LOGGING['LEVEL'] = 'DEBUG'
    elif env == 'testing':
        LOGGING['LEVEL'] = 'WARNING'
        LOGGING['LOG_TO_FILE'] = False

    workers = os.getenv('METAMAP_WORKERS')
    if workers and workers.isdigit() and int(workers) > 0:
        PERFORMANCE['MAX_WORKERS'] = int(workers)


# Load environment config on import
load_environment_config()
