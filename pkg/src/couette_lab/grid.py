"""Grids, transforms, differentiation, quadrature and Sobolev norms.

The domain is a periodic box of length ``L_x`` in x (a truncation of the
real line) crossed with the channel cross-section [-1, 1] in y.  Fields
are stored as complex arrays indexed (x index or k index, y index) and
carry a frame tag telling whether the x axis is physical or spectral.

Conventions fixed here and used repo-wide:

* forward x-transform:  f_hat(k, y) = dx * FFT(f(x, y)) over the box,
  the discrete analogue of the line integral of e^{-ikx} f;
* inverse transform divides by dx, so forward o inverse is the identity;
* L2 norms:  ||f||^2 = dx * sum_x sum_y w_y |f|^2  in the physical frame
  and (1/L_x) * sum_k sum_y w_y |f_hat|^2 in the spectral frame (the two
  agree by Parseval);
* inner products conjugate the SECOND argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "cheb_diff_matrix",
    "clenshaw_curtis_weights",
    "transform_x",
    "derivative",
    "inner_product",
    "l2_norm",
    "linf_norm",
    "sobolev_norm",
    "compute_E0",
    "h3y_profile_norms",
    "save_field",
    "load_field",
    "field_to_dict",
    "field_from_dict",
]

PHYSICAL = "physical-x"
SPECTRAL = "spectral-x"


def cheb_diff_matrix(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Gauss-Lobatto nodes cos(pi*m/(n-1)) and the dense
    collocation differentiation matrix (Trefethen's construction)."""
    N = n - 1
    if N == 0:
        return np.array([1.0]), np.zeros((1, 1))
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Clenshaw-Curtis quadrature weights on the CGL nodes (sum = 2)."""
    N = n - 1
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for j in range(1, N // 2):
            v -= 2.0 * np.cos(2 * j * theta[1:N]) / (4 * j * j - 1)
        v -= np.cos(N * theta[1:N]) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for j in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * j * theta[1:N]) / (4 * j * j - 1)
    w[1:N] = 2.0 * v / N
    return w


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor grid: uniform periodic x-axis times CGL y-axis.

    Attributes
    ----------
    L_x : float
        Box length in x.
    n_x : int
        Even number of x points / Fourier modes.
    n_y : int
        Number of y collocation nodes.
    k_values : ndarray
        Wavenumbers 2*pi*j/L_x in FFT ordering, j in [-n_x/2, n_x/2).
    x_nodes : ndarray
        Uniform x nodes, spacing dx = L_x/n_x.
    y_nodes : ndarray
        CGL nodes, strictly decreasing from 1 to -1.
    w_quad : ndarray
        Clenshaw-Curtis weights matching y_nodes.
    D_y : ndarray
        Dense y differentiation matrix.
    """

    L_x: float
    n_x: int
    n_y: int
    k_values: np.ndarray
    x_nodes: np.ndarray
    y_nodes: np.ndarray
    w_quad: np.ndarray
    D_y: np.ndarray

    @property
    def dx(self) -> float:
        return self.L_x / self.n_x

    @property
    def k_max(self) -> float:
        return float(np.max(np.abs(self.k_values)))

    @property
    def k_min(self) -> float:
        """Smallest nonzero |k|."""
        return 2.0 * np.pi / self.L_x

    @property
    def key(self) -> tuple:
        return (self.L_x, self.n_x, self.n_y)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask over k (True = keep)."""
        return np.abs(self.k_values) <= (2.0 / 3.0) * self.k_max


def make_grid(L_x: float, n_x: int, n_y: int) -> Grid:
    if n_x % 2 != 0 or n_x < 8:
        raise ValueError(f"n_x must be even and >= 8, got {n_x}")
    if n_y < 8:
        raise ValueError(f"n_y must be >= 8, got {n_y}")
    if L_x <= 0:
        raise ValueError(f"L_x must be positive, got {L_x}")
    k = 2.0 * np.pi * np.fft.fftfreq(n_x, d=1.0 / n_x) / L_x
    x = np.arange(n_x) * (L_x / n_x)
    y, D = cheb_diff_matrix(n_y)
    w = clenshaw_curtis_weights(n_y)
    return Grid(L_x=float(L_x), n_x=n_x, n_y=n_y, k_values=k,
                x_nodes=x, y_nodes=y, w_quad=w, D_y=D)


@dataclass(frozen=True)
class Field:
    """Complex scalar field on a Grid, tagged with its x-frame."""

    data: np.ndarray
    frame: str
    grid: Grid

    def __post_init__(self):
        if self.frame not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.data.shape != (self.grid.n_x, self.grid.n_y):
            raise ValueError(
                f"data shape {self.data.shape} does not match grid "
                f"({self.grid.n_x}, {self.grid.n_y})")

    def with_data(self, data: np.ndarray) -> "Field":
        return Field(data=data, frame=self.frame, grid=self.grid)


def transform_x(f: Field, direction: str) -> Field:
    """Transform along x.  direction: 'forward' (physical -> spectral)
    or 'inverse' (spectral -> physical)."""
    if direction == "forward":
        if f.frame != PHYSICAL:
            raise ValueError("forward transform expects a physical-x field")
        data = np.fft.fft(f.data, axis=0) * f.grid.dx
        return Field(data=data, frame=SPECTRAL, grid=f.grid)
    if direction == "inverse":
        if f.frame != SPECTRAL:
            raise ValueError("inverse transform expects a spectral-x field")
        data = np.fft.ifft(f.data, axis=0) / f.grid.dx
        return Field(data=data, frame=PHYSICAL, grid=f.grid)
    raise ValueError(f"unknown direction {direction!r}")


def to_spectral(f: Field) -> Field:
    return f if f.frame == SPECTRAL else transform_x(f, "forward")


def to_physical(f: Field) -> Field:
    return f if f.frame == PHYSICAL else transform_x(f, "inverse")


def derivative(f: Field, axis: str, order: int = 1) -> Field:
    """Spectral x-derivative (exact per mode) or dense collocation
    y-derivative.  axis='x' requires the spectral frame."""
    if order not in (1, 2, 3):
        raise ValueError(f"unsupported derivative order {order}")
    if axis == "x":
        if f.frame != SPECTRAL:
            raise ValueError("x-derivative requires the spectral-x frame")
        kv = f.grid.k_values.copy()
        if order % 2 == 1:
            # odd derivative of the unpaired Nyquist mode is not
            # representable; zero it out (standard convention)
            kv[f.grid.n_x // 2] = 0.0
        mult = (1j * kv) ** order
        return f.with_data(f.data * mult[:, None])
    if axis == "y":
        Dn = np.linalg.matrix_power(f.grid.D_y, order)
        return f.with_data(f.data @ Dn.T)
    raise ValueError(f"unknown axis {axis!r}")


def inner_product(f: Field, g: Field) -> complex:
    """Quadrature-weighted L2 pairing over the box; conjugates g."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    if f.frame != g.frame:
        raise ValueError("frame mismatch")
    w = f.grid.w_quad
    s = np.sum(f.data * np.conj(g.data) * w[None, :])
    if f.frame == PHYSICAL:
        return complex(s * f.grid.dx)
    return complex(s / f.grid.L_x)


def l2_norm(f: Field) -> float:
    w = f.grid.w_quad
    s = np.sum((f.data.real ** 2 + f.data.imag ** 2) * w[None, :])
    scale = f.grid.dx if f.frame == PHYSICAL else 1.0 / f.grid.L_x
    return float(np.sqrt(scale * s))


def linf_norm(f: Field) -> float:
    """Max pointwise modulus on the collocation grid (physical frame)."""
    g = to_physical(f)
    return float(np.max(np.abs(g.data)))


def sobolev_norm(f: Field, s: int) -> float:
    """H^s norm: sum of ||d^a_x d^b_y f||^2 over all a+b <= s."""
    if s not in (0, 1, 2, 3):
        raise ValueError(f"s must be in 0..3, got {s}")
    fs = to_spectral(f)
    k = fs.grid.k_values
    total = 0.0
    dyb = fs.data
    for b in range(s + 1):
        if b > 0:
            dyb = dyb @ fs.grid.D_y.T
        # x-derivatives of the y-differentiated data, all orders a <= s-b
        for a in range(s - b + 1):
            mult = np.abs(k) ** a
            w = fs.grid.w_quad
            total += np.sum((np.abs(dyb) ** 2) * (mult[:, None] ** 2)
                            * w[None, :]) / fs.grid.L_x
    return float(np.sqrt(total))


def h3y_profile_norms(f: Field, s: int = 3) -> np.ndarray:
    """Per-x-column H^s_y norms ||f(x_i, .)||_{H^s_y} (physical frame)."""
    g = to_physical(f)
    w = g.grid.w_quad
    total = np.zeros(g.grid.n_x)
    dyb = g.data
    for b in range(s + 1):
        if b > 0:
            dyb = dyb @ g.grid.D_y.T
        total += np.sum((np.abs(dyb) ** 2) * w[None, :], axis=1)
    return np.sqrt(total)


def boundary_trace(f: Field) -> float:
    """Max modulus of the field on the walls y = +-1."""
    return float(max(np.max(np.abs(f.data[:, 0])),
                     np.max(np.abs(f.data[:, -1]))))


def compute_E0(omega_in: Field) -> float:
    """H^3_{x,y} norm plus the mixed L1_x H^3_y norm of the initial
    vorticity.  Requires the physical frame and zero wall trace."""
    if omega_in.frame != PHYSICAL:
        raise ValueError("compute_E0 expects the physical-x frame")
    scale = max(1.0, float(np.max(np.abs(omega_in.data))))
    if boundary_trace(omega_in) > 1e-8 * scale:
        raise ValueError("initial vorticity violates the wall Dirichlet trace")
    h3 = sobolev_norm(omega_in, 3)
    l1h3 = float(np.sum(h3y_profile_norms(omega_in, 3)) * omega_in.grid.dx)
    return h3 + l1h3


# ---------------------------------------------------------------------------
# serialization: self-describing JSON container.  Layout:
#   {"container": "field", "version": 1,
#    "grid": {"L_x":..., "n_x":..., "n_y":...},
#    "frame": "physical-x"|"spectral-x",
#    "data_re": [...row-major...], "data_im": [...row-major...]}
# ---------------------------------------------------------------------------

def field_to_dict(f: Field) -> dict:
    return {
        "container": "field",
        "version": 1,
        "grid": {"L_x": f.grid.L_x, "n_x": f.grid.n_x, "n_y": f.grid.n_y},
        "frame": f.frame,
        "data_re": f.data.real.ravel(order="C").tolist(),
        "data_im": f.data.imag.ravel(order="C").tolist(),
    }


def field_from_dict(d: dict, grid: Grid | None = None) -> Field:
    if d.get("container") != "field":
        raise ValueError("not a field container")
    g = d["grid"]
    if grid is None:
        grid = make_grid(g["L_x"], g["n_x"], g["n_y"])
    elif (grid.L_x, grid.n_x, grid.n_y) != (g["L_x"], g["n_x"], g["n_y"]):
        raise ValueError("grid metadata mismatch")
    shape = (grid.n_x, grid.n_y)
    data = (np.array(d["data_re"]).reshape(shape)
            + 1j * np.array(d["data_im"]).reshape(shape))
    return Field(data=data, frame=d["frame"], grid=grid)


def save_field(f: Field, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(field_to_dict(f), fh)


def load_field(path: str, grid: Grid | None = None) -> Field:
    with open(path) as fh:
        return field_from_dict(json.load(fh), grid)
