"""Publication-style figures from rabi-critic output files.

Rendering never recomputes physics: pixel content derives only from the
input CSV/JSON files and their metadata sidecars.
"""

from .render import FigureSpec, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "render", "__version__"]
