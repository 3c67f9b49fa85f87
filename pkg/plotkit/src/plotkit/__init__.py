"""Figure rendering for rsbits benchmark CSV files."""

from .core import PlotError, PlotSpec, load_rows, pareto_front, render

__all__ = ["PlotError", "PlotSpec", "load_rows", "pareto_front", "render"]
