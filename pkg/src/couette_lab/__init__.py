"""Pseudo-spectral simulator and verification lab for 2D shear-flow perturbations.

Perturbations of plane Couette flow in a channel, Fourier in x and
Chebyshev collocation in y, with Dirichlet vorticity at the walls.
"""

from couette_lab.grid import Grid, Field, make_grid, transform_x, derivative
from couette_lab.grid import inner_product, sobolev_norm, compute_E0

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "transform_x",
    "derivative",
    "inner_product",
    "sobolev_norm",
    "compute_E0",
]

__version__ = "0.1.0"
