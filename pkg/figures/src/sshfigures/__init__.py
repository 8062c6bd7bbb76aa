"""Figure rendering for sshlight outputs."""

from .render import FigureInputError, FigureJob, render

__all__ = ["FigureInputError", "FigureJob", "render"]
