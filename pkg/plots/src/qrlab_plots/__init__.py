"""qrlab-plots: static figures from qrlab CSV outputs."""

from .figures import KINDS, FigureError, FigureSpec, render

__version__ = "0.1.0"
