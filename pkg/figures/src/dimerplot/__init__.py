"""dimerplot: static figures from dimergate CSV files.

Reads the CSV tables written by the dimergate CLI and renders the three
standard figure kinds (eigenstate coefficient panels, fluorescence spectra,
gate time traces).  Never recomputes physics: every number shown comes from
the CSV.
"""

__version__ = "0.1.0"

from .render import FigureRecipe, SchemaError, main, read_table, render

__all__ = ["__version__", "FigureRecipe", "SchemaError", "main",
           "read_table", "render"]
