"""Random walk in random scenery: exact inference of the origin color from
the color record, cut-time audits, deviation rates and probe records."""

__version__ = "0.1.0"

from .core import Color, ColorRecord, InducedColoring, StepDistribution, WalkPath
from .grammar import parse_record, render
from .inference import (
    ConditionalResult,
    ImpossibleRecord,
    brute_force_conditional,
    conditional_color_at_origin,
    conditional_event,
    delta,
    enumerate_compatible,
)

__all__ = [
    "Color",
    "ColorRecord",
    "ConditionalResult",
    "ImpossibleRecord",
    "InducedColoring",
    "StepDistribution",
    "WalkPath",
    "brute_force_conditional",
    "conditional_color_at_origin",
    "conditional_event",
    "delta",
    "enumerate_compatible",
    "parse_record",
    "render",
]
