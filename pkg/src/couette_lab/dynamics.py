"""Time integration of the full vorticity equation, the error equation,
and the dyadically gated reaction companions.

Full equation:    d_t w + u.grad w - nu lap w + y d_x w = 0
Error equation:   d_t w_e - nu lap w_e + y d_x w_e
                      + u.grad w_e + u_e.grad w_L + E_r = 0
Companions:       d_t w_2 - nu lap w_2 + y d_x w_2 = t u2_e d_x w_L,
                  with the right side gated by chi_j for each w_{2,j};
                  w_1 is maintained implicitly as w_e - w_2.

All states live in the spectral-x frame.  The shared scheme (exact
phase / Crank-Nicolson / Heun) is second order; companions see the same
midpoint source samples as w_2, so their superposition matches w_2 to
rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dfield, replace

import numpy as np

from couette_lab.grid import (Field, derivative, field_from_dict,
                              field_to_dict, linf_norm)
from couette_lab.elliptic import HelmholtzSolver
from couette_lab.linear import LinearState, linear_fields
from couette_lab.multipliers import DyadicPartition, chi_j
from couette_lab.pseudospectral import advection, dealiased_product
from couette_lab.stepping import CflError, StrangStepper

__all__ = [
    "SimState",
    "ErrorState",
    "make_sim_state",
    "make_error_state",
    "nonlinear_term",
    "step_full",
    "step_error",
    "evolve_omega2",
    "CFL_SAFETY",
]

CFL_SAFETY = 0.5  # C_cfl of the advective step policy


def nonlinear_term(omega: Field, u: tuple[Field, Field]) -> Field:
    """u . grad omega, pseudo-spectral with 2/3 dealiasing in x."""
    return advection(u[0], u[1], omega)


def default_dt(grid) -> float:
    return min(0.5 / grid.k_max, 0.1)


@dataclass
class SimState:
    """Full nonlinear simulation state."""

    t: float
    omega: Field
    nu: float
    dt: float
    solver: HelmholtzSolver
    _stepper: StrangStepper | None = None

    def stepper(self) -> StrangStepper:
        if self._stepper is None or self._stepper.dt != self.dt \
                or self._stepper.nu != self.nu:
            self._stepper = StrangStepper(self.omega.grid, self.nu, self.dt)
        return self._stepper


def make_sim_state(omega: Field, nu: float, dt: float | None = None,
                   solver: HelmholtzSolver | None = None) -> SimState:
    from couette_lab.grid import to_spectral
    w = to_spectral(omega)
    return SimState(t=0.0, omega=w, nu=nu,
                    dt=dt if dt is not None else default_dt(w.grid),
                    solver=solver or HelmholtzSolver(w.grid))


def _max_speed(solver: HelmholtzSolver, omega: Field) -> float:
    u1, u2 = solver.velocity(omega)
    return max(linf_norm(u1), linf_norm(u2))


def step_full(st: SimState) -> SimState:
    """One Strang step of the full vorticity equation.

    Raises CflError when dt violates the advective policy
    dt <= C_cfl / (k_max (1 + max|u|)); callers halve dt and retry.
    """
    g = st.omega.grid
    umax = _max_speed(st.solver, st.omega)
    if st.dt > CFL_SAFETY / (g.k_max * (1.0 + umax)) + 1e-15:
        raise CflError(
            f"dt={st.dt:g} exceeds CFL limit "
            f"{CFL_SAFETY / (g.k_max * (1.0 + umax)):g} (max|u|={umax:g})")

    def rhs(w_data: np.ndarray, t_mid: float) -> np.ndarray:
        w = st.omega.with_data(w_data)
        u = st.solver.velocity(w)
        return -nonlinear_term(w, u).data

    data = st.stepper().step(st.omega.data, st.t, rhs)
    return replace(st, t=st.t + st.dt, omega=st.omega.with_data(data))


@dataclass
class ErrorState:
    """State of the error equation plus optional reaction companions."""

    t: float
    omega_e: Field
    linear: LinearState
    nu: float
    partition: DyadicPartition | None = None
    omega2: Field | None = None
    omega2j: dict = dfield(default_factory=dict)
    _stepper: StrangStepper | None = None

    @property
    def omega1(self) -> Field:
        """w_1 = w_e - w_2 (maintained implicitly)."""
        if self.omega2 is None:
            return self.omega_e
        return self.omega_e.with_data(self.omega_e.data - self.omega2.data)

    def stepper(self, dt: float) -> StrangStepper:
        if self._stepper is None or self._stepper.dt != dt:
            self._stepper = StrangStepper(self.omega_e.grid, self.nu, dt)
        return self._stepper


def make_error_state(linear: LinearState,
                     partition: DyadicPartition | None = None) -> ErrorState:
    """Error state at t = 0 with w_e = 0 (the paper's initial condition)."""
    zero = linear.omega_in.with_data(
        np.zeros_like(linear.omega_in.data))
    st = ErrorState(t=0.0, omega_e=zero, linear=linear, nu=linear.nu,
                    partition=partition)
    if partition is not None:
        st.omega2 = zero
    return st


def step_error(st: ErrorState, dt: float) -> ErrorState:
    """Advance w_e (and active companions) by one step of the shared
    scheme, with sources -u_e.grad w_L - E_r and advection u_L + u_e."""
    solver = st.linear.solver
    t_mid = st.t + 0.5 * dt
    wL_mid, (u1L, u2L), er_mid = linear_fields(st.linear, t_mid)

    def rhs(w_data: np.ndarray, _t: float) -> np.ndarray:
        we = st.omega_e.with_data(w_data)
        u1e, u2e = solver.velocity(we)
        full = advection(u1L.with_data(u1L.data + u1e.data),
                         u2L.with_data(u2L.data + u2e.data), we)
        react = advection(u1e, u2e, wL_mid)
        return -(full.data + react.data + er_mid.data)

    stepper = st.stepper(dt)
    we_new = st.omega_e.with_data(stepper.step(st.omega_e.data, st.t, rhs))

    new = replace(st, t=st.t + dt, omega_e=we_new)
    if st.partition is not None:
        _step_companions(st, new, stepper, wL_mid, t_mid, dt)
    return new


def _step_companions(old: ErrorState, new: ErrorState,
                     stepper: StrangStepper, wL_mid: Field,
                     t_mid: float, dt: float) -> None:
    """Advance w_2 and the w_{2,j}; all see identical source samples."""
    part = old.partition
    solver = old.linear.solver
    we_mid = old.omega_e.with_data(
        0.5 * (old.omega_e.data + new.omega_e.data))
    _, u2e_mid = solver.velocity(we_mid)
    force = dealiased_product(u2e_mid, derivative(wL_mid, "x", 1))
    force = force.with_data(t_mid * force.data)

    gates = {j: chi_j(t_mid, j, part) for j in range(1, part.j_max + 1)}
    total_gate = sum(gates.values())

    def lin_step(w: Field, gate: float) -> Field:
        rhs = (lambda _w, _t: gate * force.data) if gate else None
        return w.with_data(stepper.step(w.data, old.t, rhs))

    new.omega2 = lin_step(old.omega2, float(total_gate))
    new.omega2j = {}
    for j, g in gates.items():
        if j in old.omega2j:
            new.omega2j[j] = lin_step(old.omega2j[j], float(g))
        elif g:
            zero = old.omega_e.with_data(np.zeros_like(old.omega_e.data))
            new.omega2j[j] = lin_step(zero, float(g))


def evolve_omega2(st: ErrorState, part: DyadicPartition, dt: float,
                  t_end: float, sample_hook=None) -> ErrorState:
    """Drive the error system with companions enabled up to t_end.

    sample_hook(state) is called after every step; the final state's
    omega2 / omega2j / omega1 carry the decomposition.
    """
    if st.partition is None:
        zero = st.omega_e.with_data(np.zeros_like(st.omega_e.data))
        st = replace(st, partition=part, omega2=zero)
    n_steps = int(np.ceil((t_end - st.t) / dt - 1e-12))
    for _ in range(n_steps):
        st = step_error(st, dt)
        if sample_hook is not None:
            sample_hook(st)
    return st


# ---------------------------------------------------------------------------
# checkpoints: JSON containers with the fields plus scalar metadata
# ---------------------------------------------------------------------------

def save_checkpoint(st: SimState, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"container": "sim-checkpoint", "version": 1,
                   "t": st.t, "nu": st.nu, "dt": st.dt,
                   "omega": field_to_dict(st.omega)}, fh)


def load_checkpoint(path: str) -> SimState:
    with open(path) as fh:
        d = json.load(fh)
    if d.get("container") != "sim-checkpoint":
        raise ValueError("not a simulation checkpoint")
    omega = field_from_dict(d["omega"])
    return SimState(t=d["t"], omega=omega, nu=d["nu"], dt=d["dt"],
                    solver=HelmholtzSolver(omega.grid))
