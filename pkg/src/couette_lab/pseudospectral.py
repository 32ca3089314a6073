"""Pseudo-spectral products: advection u . grad omega with 2/3-rule
dealiasing in x.  y-products are formed at collocation nodes (no
y-dealiasing; resolution margin is a configuration concern)."""

from __future__ import annotations

import numpy as np

from couette_lab.grid import Field, SPECTRAL, to_physical, derivative

__all__ = ["advection", "dealiased_product"]


def dealiased_product(a: Field, b: Field) -> Field:
    """Pointwise product of two spectral-x fields, 2/3-rule dealiased."""
    prod = to_physical(a).data * to_physical(b).data
    g = a.grid
    out = np.fft.fft(prod, axis=0) * g.dx
    out[~g.dealias_mask(), :] = 0.0
    return a.with_data(out)


def advection(u1: Field, u2: Field, omega: Field) -> Field:
    """u . grad omega in the spectral-x frame, dealiased by the 2/3 rule."""
    if omega.frame != SPECTRAL:
        raise ValueError("advection expects spectral-x fields")
    wx = derivative(omega, "x", 1)
    wy = derivative(omega, "y", 1)
    prod = (to_physical(u1).data * to_physical(wx).data
            + to_physical(u2).data * to_physical(wy).data)
    g = omega.grid
    out = np.fft.fft(prod, axis=0) * g.dx
    out[~g.dealias_mask(), :] = 0.0
    return omega.with_data(out)
