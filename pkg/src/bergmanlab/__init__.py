"""Numerical lab for Bergman kernels of cusp forms on PSL_2(Z) and on the
Hilbert modular group of Q(sqrt 5)."""

from . import bergman1, errors, geometry, heat_model, modforms1

__all__ = ["bergman1", "errors", "geometry", "heat_model", "modforms1", "hilbert2", "cli"]
__version__ = "0.1.0"
