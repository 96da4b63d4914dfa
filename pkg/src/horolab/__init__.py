"""Numerical hyperbolic dynamics: flows, Fuchsian group balls, limit points."""

__version__ = "0.1.0"
