#!/usr/bin/env python3
"""
Validation Utilities Module

Exception hierarchy and input validation helpers shared by the loaders,
the generator and the simulation. Validators return booleans; callers
raise the typed exception with a message from ``ERROR_MESSAGES``.
"""

import math
import logging
from typing import Any, Optional

from .config import ERROR_MESSAGES

validation_logger = logging.getLogger(__name__)


class MetaMapError(Exception):
    """Base class for every error raised by the package"""
    pass


class DegeneratePolygonError(MetaMapError):
    """Polygon with fewer than three points or zero extent"""
    pass


class EmbeddingError(MetaMapError):
    """Rotation system, face structure or Tutte solve is inconsistent"""
    pass


class GraphValidationError(MetaMapError):
    """Input graph violates a structural invariant"""
    pass


class ParameterError(MetaMapError, ValueError):
    """Simulation or experiment parameter outside its valid range"""
    pass


class GenerationError(MetaMapError):
    """Benchmark generation could not satisfy its parameters"""
    pass


class InitializationError(MetaMapError):
    """Initial map construction failed; names the offending face"""

    def __init__(self, message: str, face: Optional[Any] = None):
        super().__init__(message)
        self.face = face


class DegenerateMapError(MetaMapError):
    """Map became degenerate; names the offending region when known"""

    def __init__(self, message: str, region: Optional[int] = None):
        super().__init__(message)
        self.region = region


class FormatError(MetaMapError):
    """Malformed exchange file; carries path, line and field context"""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        context = []
        if path:
            context.append(str(path))
        if line is not None:
            context.append(f"line {line}")
        if field:
            context.append(f"field '{field}'")
        full = f"{': '.join(context)}: {message}" if context else message
        super().__init__(full)
        self.path = path
        self.line = line
        self.field = field


def format_error(key: str, **kwargs: Any) -> str:
    """Render one of the configured error messages"""
    return ERROR_MESSAGES[key].format(**kwargs)


class InputValidator:
    """Input validation utilities"""

    @staticmethod
    def validate_weight(weight: Any) -> bool:
        """Weights must be finite and strictly positive"""
        try:
            value = float(weight)
        except (TypeError, ValueError):
            return False
        return math.isfinite(value) and value > 0

    @staticmethod
    def validate_coordinate(value: Any) -> bool:
        """Coordinates must be finite reals"""
        if isinstance(value, bool):
            return False
        try:
            return math.isfinite(float(value))
        except (TypeError, ValueError):
            return False

    @staticmethod
    def validate_fraction(value: Any, allow_one: bool = True) -> bool:
        """Fractions live in [0, 1] (or [0, 1) when allow_one is False)"""
        try:
            num = float(value)
        except (TypeError, ValueError):
            return False
        if not math.isfinite(num) or num < 0:
            return False
        return num <= 1 if allow_one else num < 1

    @staticmethod
    def validate_ratio(value: Any) -> bool:
        """Ratios of maximum to minimum are at least one"""
        try:
            num = float(value)
        except (TypeError, ValueError):
            return False
        return math.isfinite(num) and num >= 1

    @staticmethod
    def validate_positive(value: Any) -> bool:
        """Strictly positive finite real"""
        try:
            num = float(value)
        except (TypeError, ValueError):
            return False
        return math.isfinite(num) and num > 0

    @staticmethod
    def validate_positive_int(value: Any, minimum: int = 1) -> bool:
        """Integer not below ``minimum``"""
        if isinstance(value, bool) or not isinstance(value, int):
            return False
        return value >= minimum

    @staticmethod
    def validate_sim_params(params: Any) -> bool:
        """Check the SimParams invariants: s_high >= 1, step > 0, iter >= 1"""
        checks = {
            's_high': InputValidator.validate_ratio(params.s_high),
            'step': InputValidator.validate_positive(params.step),
            'passage_fraction': InputValidator.validate_positive(params.passage_fraction),
            'pairing_threshold': InputValidator.validate_positive(params.pairing_threshold),
            'merge_fraction': InputValidator.validate_fraction(params.merge_fraction),
            'split_factor': InputValidator.validate_ratio(params.split_factor),
            'normalized_edge_length': InputValidator.validate_positive(params.normalized_edge_length),
        }
        if params.iterations is not None:
            checks['iterations'] = InputValidator.validate_positive_int(params.iterations)
        for name, ok in checks.items():
            if not ok:
                validation_logger.warning(
                    format_error('INVALID_PARAMETER', name=name, value=getattr(params, name)))
                return False
        return True

    @staticmethod
    def validate_gen_params(params: Any) -> bool:
        """Check the GenParams invariants"""
        checks = {
            'n': InputValidator.validate_positive_int(params.n, minimum=4),
            'nest': InputValidator.validate_fraction(params.nest),
            'weight_ratio': InputValidator.validate_ratio(params.weight_ratio),
            'rem': InputValidator.validate_fraction(params.rem, allow_one=False),
            'seed': isinstance(params.seed, int) and 0 <= params.seed < 2 ** 64,
        }
        for name, ok in checks.items():
            if not ok:
                validation_logger.warning(
                    format_error('INVALID_PARAMETER', name=name, value=getattr(params, name)))
                return False
        return True
