"""Figure rendering for the benchmark CSV files written by the `epls` CLI.

The package communicates with the estimation library exclusively through
its documented CSV schemas; it never imports it.
"""

from .figspec import FigureSpec, SpecError, load_specs
from .render import SchemaError, build_figure, render

__all__ = [
    "FigureSpec",
    "SpecError",
    "SchemaError",
    "load_specs",
    "build_figure",
    "render",
]
