"""Figure generation from serialized edgemodes results.

This package reads only the published CSV/JSON result schema; no simulation
code is imported across the boundary.
"""

__version__ = "0.1.0"

from .render import (  # noqa: F401
    EmptyDataError,
    FigureRecipe,
    MissingColumnError,
    SchemaVersionError,
    load_run,
    render,
)
