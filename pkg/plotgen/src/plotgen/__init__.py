"""Deterministic figures from the simulation harness's CSV outputs."""

__version__ = "1.0.0"

from .figures import FIGURES, FigureSpec, read_csv, render, rescale

__all__ = ["FIGURES", "FigureSpec", "read_csv", "render", "rescale"]
