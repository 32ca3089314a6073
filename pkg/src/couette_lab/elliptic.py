"""Streamfunction solves, Green's kernel, the singular operator J_k,
boundary harmonics, and the streamfunction decay-inequality checks.

Per x-mode the streamfunction solves (d^2_y - k^2) psi = w with
homogeneous Dirichlet data, discretized by dense Chebyshev collocation
with boundary rows.  The closed-form Green's kernel

    G_k(y, y') = - sinh(k (1 - y_>)) sinh(k (1 + y_<)) / (k sinh 2k)

provides an independent quadrature path, and the principal-value
operator

    J_k[f](y) = sgn(k) |k| p.v. int G_k(y,y') f(y') / (2i (y - y')) dy'

is realized by splitting the kernel into its diagonal value times a
finite-interval Hilbert transform plus a bounded difference-quotient
remainder, each integrated on refined auxiliary grids.
"""

from __future__ import annotations

from math import comb

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from couette_lab.grid import Field, Grid, SPECTRAL

__all__ = [
    "HelmholtzSolver",
    "green_kernel",
    "green_solve",
    "poisson_solve",
    "velocity",
    "apply_Jk",
    "jk_matrix",
    "boundary_harmonic",
    "check_psi_inequalities",
    "dyk_norm",
]


class HelmholtzSolver:
    """Cached per-k factorizations of (d^2_y - k^2) with Dirichlet rows.

    Immutable after construction; the factorization cache only grows.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        self.D2 = grid.D_y @ grid.D_y
        self._lu_cache: dict[float, tuple] = {}
        self._batch: dict[tuple, tuple[np.ndarray, np.ndarray]] = None
        self._batch_key = None

    def _operator(self, k: float) -> np.ndarray:
        n = self.grid.n_y
        A = self.D2 - (k * k) * np.eye(n)
        A[0, :] = 0.0
        A[-1, :] = 0.0
        A[0, 0] = 1.0
        A[-1, -1] = 1.0
        return A

    def _lu(self, k: float):
        key = float(abs(k))
        if key not in self._lu_cache:
            self._lu_cache[key] = lu_factor(self._operator(key))
        return self._lu_cache[key]

    def solve_profile(self, w: np.ndarray, k: float) -> np.ndarray:
        """psi with (d^2_y - k^2) psi = w, psi(+-1) = 0."""
        rhs = np.asarray(w, dtype=complex).copy()
        rhs[0] = 0.0
        rhs[-1] = 0.0
        return lu_solve(self._lu(k), rhs)

    # batched all-k solve ---------------------------------------------------
    def _batch_inverses(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked inverses for every unique |k| on the grid."""
        key = self.grid.key
        if self._batch_key != key:
            kabs = np.abs(self.grid.k_values)
            uniq, inv = np.unique(kabs, return_inverse=True)
            n = self.grid.n_y
            mats = np.empty((len(uniq), n, n))
            for i, k in enumerate(uniq):
                mats[i] = np.linalg.inv(self._operator(k))
            self._batch = (mats, inv)
            self._batch_key = key
        return self._batch

    def solve_field(self, omega: Field) -> Field:
        """Streamfunction field: per-mode Dirichlet Helmholtz solve."""
        if omega.frame != SPECTRAL:
            raise ValueError("solve_field expects the spectral-x frame")
        mats, inv = self._batch_inverses()
        rhs = omega.data.copy()
        rhs[:, 0] = 0.0
        rhs[:, -1] = 0.0
        psi = np.matmul(mats[inv], rhs[:, :, None])[:, :, 0]
        return omega.with_data(psi)

    def velocity(self, omega: Field) -> tuple[Field, Field]:
        """u = (d_y psi, -d_x psi) per mode; divergence-free by design."""
        psi = self.solve_field(omega)
        u1 = psi.with_data(psi.data @ self.grid.D_y.T)
        u2 = psi.with_data(-1j * self.grid.k_values[:, None] * psi.data)
        return u1, u2


def poisson_solve(grid_or_solver, w: np.ndarray, k: float) -> np.ndarray:
    """Profile-level Dirichlet solve of (d^2_y - k^2) psi = w."""
    solver = (grid_or_solver if isinstance(grid_or_solver, HelmholtzSolver)
              else HelmholtzSolver(grid_or_solver))
    return solver.solve_profile(w, k)


def velocity(solver: HelmholtzSolver, omega: Field) -> tuple[Field, Field]:
    return solver.velocity(omega)


def green_kernel(k: float, y: np.ndarray, yp: np.ndarray) -> np.ndarray:
    """G_k(y, y'), vanishing at y = +-1, symmetric in (y, y')."""
    if k == 0:
        raise ValueError("Green kernel requires k != 0")
    ka = abs(k)
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    hi = np.maximum(y, yp)
    lo = np.minimum(y, yp)
    return -np.sinh(ka * (1.0 - hi)) * np.sinh(ka * (1.0 + lo)) / (
        ka * np.sinh(2.0 * ka))


def green_solve(grid: Grid, f: np.ndarray, k: float,
                n_quad: int = 96) -> np.ndarray:
    """Streamfunction by Green's-kernel quadrature.

    G_k(y, .) has a derivative kink at y' = y, so the integral is taken
    piecewise on [-1, y] and [y, 1] (Gauss-Legendre on each side, with
    the profile interpolated barycentrically); plain single-rule
    quadrature would stall at low order on the kink.
    """
    y = grid.y_nodes
    f = np.asarray(f, dtype=complex)
    key = (grid.key, float(k), n_quad)
    G = _GREEN_CACHE.get(key)
    if G is None:
        xq, wq = np.polynomial.legendre.leggauss(n_quad)
        # segment endpoints (a, b) = (-1, y_i) and (y_i, 1) for every node
        a = np.stack([np.full_like(y, -1.0), y])          # (2, n_y)
        b = np.stack([y, np.full_like(y, 1.0)])
        yq = 0.5 * (b - a)[:, :, None] * xq + 0.5 * (a + b)[:, :, None]
        wt = 0.5 * (b - a)[:, :, None] * wq               # (2, n_y, n_quad)
        wt = wt * green_kernel(k, y[None, :, None], yq)
        P = _barycentric_matrix(y, yq.ravel())            # (2*n_y*nq, n_y)
        G = np.einsum("sit,sitj->ij",
                      wt, P.reshape(2, len(y), n_quad, len(y)))
        G[0, :] = G[-1, :] = 0.0
        _GREEN_CACHE[key] = G
    return G @ f


# ---------------------------------------------------------------------------
# singular operator J_k
# ---------------------------------------------------------------------------

def _barycentric_matrix(nodes: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Interpolation matrix from CGL nodes to arbitrary targets."""
    n = len(nodes)
    bw = (-1.0) ** np.arange(n)
    bw[0] *= 0.5
    bw[-1] *= 0.5
    diff = targets[:, None] - nodes[None, :]
    exact_t, exact_n = np.nonzero(np.abs(diff) < 1e-14)
    diff[exact_t, exact_n] = 1.0  # placeholder, rows overwritten below
    terms = bw[None, :] / diff
    P = terms / terms.sum(axis=1)[:, None]
    P[exact_t, :] = 0.0
    P[exact_t, exact_n] = 1.0
    return P


def _gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


_GREEN_CACHE: dict[tuple, np.ndarray] = {}

_JK_CACHE: dict[tuple, np.ndarray] = {}


def jk_matrix(grid: Grid, k: float, n_quad: int = 96) -> np.ndarray:
    """Dense matrix of J_k acting on y-profiles at the CGL nodes.

    Split into G_k(y,y) times the finite Hilbert transform (computed with
    the singularity subtracted analytically) plus the bounded
    difference-quotient kernel, integrated piecewise on either side of
    the diagonal where it is smooth.
    """
    if k == 0:
        raise ValueError("J_k requires k != 0")
    key = (grid.key, float(k), n_quad)
    if key in _JK_CACHE:
        return _JK_CACHE[key]

    y = grid.y_nodes
    n = grid.n_y
    ka = abs(k)
    J = np.zeros((n, n), dtype=complex)

    # global fine grid for the Hilbert-transform part
    yf, wf = _gauss_legendre(4 * n_quad, -1.0, 1.0)
    Pf = _barycentric_matrix(y, yf)

    for i in range(n):
        yi = y[i]
        gd = green_kernel(k, yi, yi)
        row = np.zeros(n, dtype=complex)
        # diagonal part: G(yi,yi) * p.v. int f(y')/(yi - y') dy'
        #   = G(yi,yi) * [ int (f(y')-f(yi))/(yi-y') dy'
        #                  + f(yi) log((1+yi)/(1-yi)) ]
        if abs(gd) > 0.0:
            coef = wf / (yi - yf)
            h_row = coef @ Pf
            h_row[i] -= np.sum(coef)
            h_row[i] += np.log((1.0 + yi) / (1.0 - yi))
            row = row + gd * h_row
        # remainder: int (G(yi,y') - G(yi,yi))/(yi - y') f(y') dy',
        # smooth on each side of y' = yi
        for (a, b) in ((-1.0, yi), (yi, 1.0)):
            if b - a < 1e-14:
                continue
            yq, wq = _gauss_legendre(n_quad, a, b)
            Kq = (green_kernel(k, yi, yq) - gd) / (yi - yq)
            row = row + (wq * Kq) @ _barycentric_matrix(y, yq)
        J[i, :] = row
    J *= np.sign(k) * ka / (2.0j)
    _JK_CACHE[key] = J
    return J


def apply_Jk(grid: Grid, f: np.ndarray, k: float) -> np.ndarray:
    """J_k applied to a y-profile sampled at the CGL nodes."""
    return jk_matrix(grid, k) @ np.asarray(f, dtype=complex)


def jk_operator_norm(grid: Grid, k: float) -> float:
    """L2(w_quad)-operator norm of the dense J_k matrix."""
    sw = np.sqrt(grid.w_quad)
    S = sw[:, None] * jk_matrix(grid, k) / sw[None, :]
    return float(np.linalg.svd(S, compute_uv=False)[0])


def boundary_harmonic(grid: Grid, k: float, j: int) -> np.ndarray:
    """gamma_j with (d^2_y - k^2) gamma_j = 0, gamma_j(j) = 1,
    gamma_j(-j) = 0; affine limit (y + j)/(2j) at k = 0."""
    if j not in (1, -1):
        raise ValueError("j must be +1 or -1")
    y = grid.y_nodes
    if k == 0:
        return (y + j) / (2.0 * j)
    return np.sinh(k * (y + j)) / (j * np.sinh(2.0 * k))


# ---------------------------------------------------------------------------
# streamfunction decay inequalities
# ---------------------------------------------------------------------------

def dyk_norm(grid: Grid, g: np.ndarray, k: float, j: int,
             shift: float = 0.0) -> float:
    """|| (d_y, k)^j g ||: stacked norm with binomial multiplicity,
    sum_i C(j,i) k^{2i} ||d_y^{j-i} g||^2.

    With shift = c, the derivative is taken as d_y + ic, which equals
    the norm of (d_y, k)^j (e^{icy} g) without sampling the oscillation
    (the modulus of the phase is one).
    """
    w = grid.w_quad
    total = 0.0
    d = np.asarray(g, dtype=complex)
    derivs = [d]
    for _ in range(j):
        derivs.append(grid.D_y @ derivs[-1] + 1j * shift * derivs[-1])
    for i in range(j + 1):
        nrm2 = float(np.sum(np.abs(derivs[j - i]) ** 2 * w))
        total += comb(j, i) * (k ** (2 * i)) * nrm2
    return float(np.sqrt(total))


def check_psi_inequalities(grid: Grid, w: np.ndarray, k: float,
                           t: float) -> dict:
    """LHS/RHS ratios of the streamfunction decay inequalities.

    Uses psi = -(d^2_y - k^2)^{-1} w (the sign convention of the source
    lemma; ratios are sign-independent).  Low (|k| <= 1) and high
    (|k| >= 1) frequency branches; entries are dicts with lhs, rhs,
    ratio (None marks a vacuous row with vanishing RHS).
    """
    w = np.asarray(w, dtype=complex)
    solver = HelmholtzSolver(grid)
    psi = -solver.solve_profile(w, k)
    D = grid.D_y
    wq = grid.w_quad

    def nrm(v):
        return float(np.sqrt(np.sum(np.abs(v) ** 2 * wq)))

    kt_shift = k * t  # tilted norms via the shifted derivative d_y + ikt
    psy = D @ psi
    xi = psy + 1j * k * t * psi  # (d_y + ikt) psi

    report = {}

    def add(name, lhs, rhs):
        report[name] = {
            "lhs": lhs, "rhs": rhs,
            "ratio": (lhs / rhs) if rhs > 1e-300 else None,
        }

    ka = abs(k)
    if ka >= 1.0:
        add("hi_grad_psi", ka ** 2 * dyk_norm(grid, psi, k, 1),
            dyk_norm(grid, w, k, 1, shift=kt_shift) / (1.0 + t))
        add("hi_grad_xi", ka ** 2 * dyk_norm(grid, xi, k, 1),
            dyk_norm(grid, w, k, 2, shift=kt_shift) / (1.0 + t))
        add("hi_psi", ka ** 4 * nrm(psi),
            dyk_norm(grid, w, k, 2, shift=kt_shift) / (1.0 + t) ** 2)
        add("hi_xi", ka ** 4 * nrm(xi),
            dyk_norm(grid, w, k, 3, shift=kt_shift) / (1.0 + t) ** 2)
    if ka <= 1.0:
        kt = abs(k * t)
        add("lo_grad_psi", dyk_norm(grid, psi, 1.0, 1),
            dyk_norm(grid, w, 1.0, 1, shift=kt_shift) / (1.0 + kt))
        add("lo_grad_xi", dyk_norm(grid, xi, 1.0, 1),
            dyk_norm(grid, w, 1.0, 2, shift=kt_shift) / (1.0 + kt))
        add("lo_psi", nrm(psi),
            dyk_norm(grid, w, 1.0, 2, shift=kt_shift) / (1.0 + kt) ** 2)
        add("lo_xi", nrm(xi),
            dyk_norm(grid, w, 1.0, 3, shift=kt_shift) / (1.0 + kt) ** 2)
    return report
