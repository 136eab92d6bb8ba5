"""Static figures for sffsim run directories."""

__version__ = "0.1.0"

from .io import SchemaError, load_sff_run, load_spacing_run, load_theory
from .render import KINDS, FigureSpec, render

__all__ = [
    "__version__",
    "KINDS",
    "FigureSpec",
    "SchemaError",
    "load_sff_run",
    "load_spacing_run",
    "load_theory",
    "render",
]
