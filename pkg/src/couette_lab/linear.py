"""Closed-form shear-diffusion propagator, homogeneous solution
operator, hypocoercivity functional, and the error source E_r.

Per x-mode the modified linear equation

    d_t w + nu (1 - t^2 d_x^2) w + y d_x w = 0

has the exact solution

    w_k(t, y) = exp(-nu t - nu k^2 t^3 / 3) exp(-i k y t) w_in(k, y),

which serves as the reference oracle for the time steppers.  The
residual it leaves in the true linear equation is

    Er_L_k = -nu (1 + t^2 k^2) w_k - nu (d^2_y - k^2) w_k,

and the full error source is E_r = Er_L + u_L . grad omega_L.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from couette_lab.grid import Field, Grid, SPECTRAL, to_spectral
from couette_lab.elliptic import HelmholtzSolver, dyk_norm
from couette_lab.pseudospectral import advection
from couette_lab.stepping import StrangStepper

__all__ = [
    "LinearState",
    "make_linear_state",
    "propagate_omega_L",
    "solve_homogeneous",
    "phi_functional",
    "compute_Er",
    "linear_fields",
    "GAMMA0",
    "ALPHA0",
    "BETA0",
]

GAMMA0 = 1.0 / 600.0
ALPHA0 = 12.0 * GAMMA0
BETA0 = 5.0 * GAMMA0


@dataclass
class LinearState:
    """Initial vorticity in the spectral frame plus cached mode norms."""

    omega_in: Field           # spectral-x frame
    nu: float
    solver: HelmholtzSolver
    _A: dict = dfield(default_factory=dict)

    def A_j(self, j: int) -> np.ndarray:
        """A_j(k) = ||(d_y, k)^j w_in_k||_{L2_y} for every grid k."""
        if j not in self._A:
            g = self.omega_in.grid
            vals = np.array([
                dyk_norm(g, self.omega_in.data[i], abs(g.k_values[i]), j)
                for i in range(g.n_x)])
            self._A[j] = vals
        return self._A[j]


def make_linear_state(omega_in: Field, nu: float,
                      solver: HelmholtzSolver | None = None) -> LinearState:
    w = to_spectral(omega_in)
    return LinearState(omega_in=w, nu=nu,
                       solver=solver or HelmholtzSolver(w.grid))


def propagate_omega_L(st: LinearState, t: float) -> Field:
    """Exact closed-form propagation of the modified linear equation."""
    g = st.omega_in.grid
    k = g.k_values
    amp = np.exp(-st.nu * t - st.nu * (k ** 2) * t ** 3 / 3.0)
    phase = np.exp(-1j * t * np.outer(k, g.y_nodes))
    return st.omega_in.with_data(amp[:, None] * phase * st.omega_in.data)


def solve_homogeneous(h: Field, s: float, t: float, nu: float,
                      dt: float | None = None) -> Field:
    """Solution operator S(t, s) of the homogeneous per-mode equation
    d_t f - nu (d^2_y - k^2) f + i k y f = 0, time-stepped with the
    Strang scheme (zero forcing)."""
    if t < s:
        raise ValueError("need t >= s")
    f = to_spectral(h)
    if t == s:
        return f
    if dt is None:
        dt = min(0.5 / max(f.grid.k_max, 1.0), 0.1)
    n_steps = max(1, int(np.ceil((t - s) / dt - 1e-12)))
    dt = (t - s) / n_steps
    stepper = StrangStepper(f.grid, nu, dt)
    data = f.data
    for n in range(n_steps):
        data = stepper.step(data, s + n * dt)
    return f.with_data(data)


def phi_functional(grid: Grid, f: np.ndarray, k: float, t: float,
                   nu: float) -> tuple[float, float]:
    """Hypocoercivity functional and its lower-bound comparator.

    Phi = (1 + g0 nu k^2 t^3) ||f||^2 + a0 nu t ||(d_y,k) f||^2
          + b0 nu t^2 Re< i k f, d_y f >
    with g0 = 1/600, a0 = 12 g0, b0 = 5 g0; comparator
    (1 + g0 nu k^2 t^3 / 4) ||f||^2 + a0 nu t ||(d_y,k) f||^2 / 4.
    """
    f = np.asarray(f, dtype=complex)
    w = grid.w_quad
    fy = grid.D_y @ f
    n2 = float(np.sum(np.abs(f) ** 2 * w))
    g2 = float(np.sum(np.abs(fy) ** 2 * w)) + k * k * n2
    cross = float(np.real(np.sum(1j * k * f * np.conj(fy) * w)))
    kt3 = nu * k * k * t ** 3
    phi = (1.0 + GAMMA0 * kt3) * n2 + ALPHA0 * nu * t * g2 \
        + BETA0 * nu * t * t * cross
    comp = (1.0 + 0.25 * GAMMA0 * kt3) * n2 + 0.25 * ALPHA0 * nu * t * g2
    return phi, comp


def linear_fields(st: LinearState, t: float):
    """omega_L, (u1_L, u2_L) and E_r at time t (spectral frame)."""
    wL = propagate_omega_L(st, t)
    u1, u2 = st.solver.velocity(wL)
    g = wL.grid
    k = g.k_values
    k2 = k ** 2
    D2 = st.solver.D2
    # closed-form residual of the modified linear flow in the true
    # linear equation
    erl = (-st.nu * (1.0 + t * t * k2)[:, None] * wL.data
           - st.nu * (wL.data @ D2.T - k2[:, None] * wL.data))
    adv = advection(u1, u2, wL)
    er = wL.with_data(erl + adv.data)
    return wL, (u1, u2), er


def compute_Er(st: LinearState, t: float) -> Field:
    """E_r = Er_L + u_L . grad omega_L in the spectral frame."""
    _, _, er = linear_fields(st, t)
    return er
