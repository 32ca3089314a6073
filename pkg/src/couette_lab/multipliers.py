"""Fourier multipliers, time weights, space-time norms and dyadic times.

The low-frequency multiplier M(k) = |k|^{2/3} chi(k) + 1 - chi(k) uses a
cut-off chi equal to 1 for |k| <= 1/2 and 0 for |k| >= 1, bridged on
(1/2, 1) by the cubic Hermite smoothstep

    chi(k) = 1 - (3 s^2 - 2 s^3),   s = 2(|k| - 1/2).

M1(k) = |k|^{1/2} + |k|.  The time weight is (1 + nu^{1/3} t M(k))^theta.

Space-time norms are accumulated sample by sample with trapezoid time
integration:

    X  = sup_t ||f|| + nu^{1/2} ||grad f||_{L2L2}
         + ||M1 grad inv-lap f||_{L2L2} + nu^{1/2} ||d_x f||_{L1L2}
    Y  = the first three of those components
    X_theta, Y_theta = the same with the weighted field.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from couette_lab.grid import Field, SPECTRAL

__all__ = [
    "WeightSpec",
    "DyadicPartition",
    "SpaceTimeAccumulator",
    "multiplier_M",
    "multiplier_M1",
    "weight",
    "dyadic_times",
    "chi_j",
    "accumulate",
]


def _chi(k):
    """Cut-off: 1 on |k|<=1/2, 0 on |k|>=1, cubic smoothstep between."""
    a = np.abs(k)
    s = np.clip(2.0 * (a - 0.5), 0.0, 1.0)
    return 1.0 - (3.0 * s * s - 2.0 * s ** 3)


@dataclass(frozen=True)
class WeightSpec:
    nu: float
    theta: float = 1.0 / 32.0

    def __post_init__(self):
        if not (0.0 <= self.theta < 1.0 / 16.0):
            raise ValueError(f"theta must lie in [0, 1/16), got {self.theta}")
        if not (0.0 < self.nu < 1.0):
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")


def multiplier_M(k, spec: WeightSpec | None = None):
    """Low-frequency multiplier |k|^{2/3} chi + 1 - chi."""
    c = _chi(k)
    return np.abs(k) ** (2.0 / 3.0) * c + 1.0 - c


def multiplier_M1(k):
    """|k|^{1/2} + |k|."""
    a = np.abs(k)
    return np.sqrt(a) + a


def weight(t, k, spec: WeightSpec):
    """(1 + nu^{1/3} t M(k))^theta; equals 1 at t=0 or theta=0."""
    return (1.0 + spec.nu ** (1.0 / 3.0) * t * multiplier_M(k)) ** spec.theta


@dataclass(frozen=True)
class DyadicPartition:
    """Times T_0 = nu^{-1/6}, T_j = 2^j nu^{-1/3}, j = 1..j_max."""

    nu: float
    j_max: int
    T: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.T) <= 0):
            raise ValueError("partition times must be strictly increasing")


def dyadic_times(nu: float, j_max: int) -> DyadicPartition:
    if not (0.0 < nu < 1.0):
        raise ValueError(f"nu must lie in (0, 1), got {nu}")
    T0 = nu ** (-1.0 / 6.0)
    T = np.array([T0] + [2.0 ** j * nu ** (-1.0 / 3.0)
                         for j in range(1, j_max + 1)])
    return DyadicPartition(nu=nu, j_max=j_max, T=T)


def chi_j(t: float, j: int, part: DyadicPartition) -> int:
    """Indicator of t in (T_{j-1}, T_j] (half-open on the left)."""
    if not (1 <= j <= part.j_max):
        raise ValueError(f"j must lie in 1..{part.j_max}, got {j}")
    return int(part.T[j - 1] < t <= part.T[j])


# ---------------------------------------------------------------------------
# space-time norm accumulator
# ---------------------------------------------------------------------------

class SpaceTimeAccumulator:
    """Running space-time norm components, updated by the sampling loop.

    Single-writer: feed samples in increasing t through accumulate().
    Component values are monotone non-decreasing as samples accrue.
    """

    _INT_KEYS = ("grad_sq", "m1_sq", "w_grad_sq", "w_m1_sq")
    _L1_KEYS = ("dx_l1", "w_dx_l1")

    def __init__(self, spec: WeightSpec):
        self.spec = spec
        self.sample_times: list[float] = []
        self.sup_l2 = 0.0
        self.sup_w_l2 = 0.0
        self.integrals = {k: 0.0 for k in self._INT_KEYS + self._L1_KEYS}
        self._prev: dict[str, float] | None = None

    # instantaneous scalars for one sample -------------------------------
    def _instantaneous(self, omega: Field, aux) -> dict[str, float]:
        if omega.frame != SPECTRAL:
            raise ValueError("accumulate expects spectral-x fields")
        g = omega.grid
        w = g.w_quad[None, :]
        kv = g.k_values
        nu13t = self.spec.nu ** (1.0 / 3.0)

        def colsum(a):
            # per-k squared L2_y column norms
            return np.sum((a.real ** 2 + a.imag ** 2) * w, axis=1)

        d = omega.data
        dy = d @ g.D_y.T
        l2_k = colsum(d)
        dx_k = kv ** 2 * l2_k
        grad_k = colsum(dy) + dx_k

        psi = aux.solve_field(omega).data
        psiy = psi @ g.D_y.T
        m1_k = multiplier_M1(kv) ** 2 * (colsum(psiy) + kv ** 2 * colsum(psi))

        t = self._t_current
        wgt2 = weight(t, kv, self.spec) ** 2
        out = {
            "l2": np.sum(l2_k) / g.L_x,
            "grad_sq": np.sum(grad_k) / g.L_x,
            "dx_sq": np.sum(dx_k) / g.L_x,
            "m1_sq": np.sum(m1_k) / g.L_x,
            "w_l2": np.sum(wgt2 * l2_k) / g.L_x,
            "w_grad_sq": np.sum(wgt2 * grad_k) / g.L_x,
            "w_dx_sq": np.sum(wgt2 * dx_k) / g.L_x,
            "w_m1_sq": np.sum(wgt2 * m1_k) / g.L_x,
        }
        # l2 entries above are squared norms
        return out

    def add_sample(self, t: float, omega: Field, aux) -> "SpaceTimeAccumulator":
        if self.sample_times and t <= self.sample_times[-1]:
            raise ValueError("sample times must be strictly increasing")
        self._t_current = t
        cur = self._instantaneous(omega, aux)
        self.sup_l2 = max(self.sup_l2, np.sqrt(cur["l2"]))
        self.sup_w_l2 = max(self.sup_w_l2, np.sqrt(cur["w_l2"]))
        if self._prev is not None:
            dt = t - self.sample_times[-1]
            for key in self._INT_KEYS:
                self.integrals[key] += 0.5 * dt * (self._prev[key] + cur[key])
            self.integrals["dx_l1"] += 0.5 * dt * (
                np.sqrt(self._prev["dx_sq"]) + np.sqrt(cur["dx_sq"]))
            self.integrals["w_dx_l1"] += 0.5 * dt * (
                np.sqrt(self._prev["w_dx_sq"]) + np.sqrt(cur["w_dx_sq"]))
        self.sample_times.append(t)
        self._prev = cur
        return self

    # component read-out --------------------------------------------------
    def components(self) -> dict[str, float]:
        nu = self.spec.nu
        c = {
            "linf_l2": self.sup_l2,
            "visc_grad_l2l2": np.sqrt(nu * self.integrals["grad_sq"]),
            "m1_inv_lap_l2l2": np.sqrt(self.integrals["m1_sq"]),
            "visc_dx_l1l2": np.sqrt(nu) * self.integrals["dx_l1"],
            "w_linf_l2": self.sup_w_l2,
            "w_visc_grad_l2l2": np.sqrt(nu * self.integrals["w_grad_sq"]),
            "w_m1_inv_lap_l2l2": np.sqrt(self.integrals["w_m1_sq"]),
            "w_visc_dx_l1l2": np.sqrt(nu) * self.integrals["w_dx_l1"],
        }
        return {k: float(v) for k, v in c.items()}

    def x_norm(self) -> float:
        c = self.components()
        return (c["linf_l2"] + c["visc_grad_l2l2"]
                + c["m1_inv_lap_l2l2"] + c["visc_dx_l1l2"])

    def y_norm(self) -> float:
        c = self.components()
        return c["linf_l2"] + c["visc_grad_l2l2"] + c["m1_inv_lap_l2l2"]

    def x_theta_norm(self) -> float:
        c = self.components()
        return (c["w_linf_l2"] + c["w_visc_grad_l2l2"]
                + c["w_m1_inv_lap_l2l2"] + c["w_visc_dx_l1l2"])


def accumulate(acc: SpaceTimeAccumulator, t: float, omega: Field,
               aux) -> SpaceTimeAccumulator:
    """Feed one sample; aux is an elliptic solver supplying inv-lap."""
    return acc.add_sample(t, omega, aux)
