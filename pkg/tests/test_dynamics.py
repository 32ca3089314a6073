import numpy as np
import pytest

from couette_lab.dynamics import (default_dt, evolve_omega2,
                                  load_checkpoint, make_error_state,
                                  make_sim_state, nonlinear_term,
                                  save_checkpoint, step_error, step_full)
from couette_lab.grid import (Field, PHYSICAL, inner_product, l2_norm,
                              make_grid, to_physical, to_spectral)
from couette_lab.linear import make_linear_state
from couette_lab.multipliers import dyadic_times
from couette_lab.stepping import CflError, KModeStepper, StrangStepper


def gaussian_cos(grid, amp=0.05, sigma=2.0):
    x0 = 0.5 * grid.L_x
    data = amp * np.outer(np.exp(-(grid.x_nodes - x0) ** 2 / sigma ** 2),
                          np.cos(0.5 * np.pi * grid.y_nodes))
    return Field(data=data.astype(complex), frame=PHYSICAL, grid=grid)


@pytest.fixture
def small_sim():
    grid = make_grid(8.0 * np.pi, 32, 32)
    return make_sim_state(gaussian_cos(grid), nu=1e-2)


class TestSteppers:
    def test_kmode_pure_diffusion_eigenfunction(self):
        # k = 0: w(t,y) = e^{-nu pi^2 t/4} cos(pi y/2) exactly solves the
        # heat equation with Dirichlet walls; CN reproduces it to O(dt^2)
        grid = make_grid(2.0 * np.pi, 8, 64)
        nu, dt, n = 0.1, 1e-3, 200
        stepper = KModeStepper(grid, 0.0, nu, dt)
        f = np.cos(0.5 * np.pi * grid.y_nodes).astype(complex)
        for _ in range(n):
            f = stepper.step(f)
        exact = np.exp(-nu * (np.pi / 2) ** 2 * n * dt) \
            * np.cos(0.5 * np.pi * grid.y_nodes)
        assert np.abs(f - exact).max() < 1e-6

    def test_strang_zero_forcing_contracts(self, small_sim):
        st = small_sim
        stepper = StrangStepper(st.omega.grid, st.nu, 0.05)
        data = st.omega.data
        n0 = l2_norm(st.omega)
        for i in range(20):
            data = stepper.step(data, i * 0.05)
        assert l2_norm(st.omega.with_data(data)) < n0

    def test_boundary_rows_stay_zero(self, small_sim):
        st = small_sim
        stepper = StrangStepper(st.omega.grid, st.nu, 0.05)
        data = stepper.step(st.omega.data, 0.0)
        assert np.abs(data[:, [0, -1]]).max() < 1e-12


class TestNonlinearTerm:
    def test_advection_skew_symmetry(self, small_sim):
        # <u . grad w, w> = 0 for divergence-free u with impermeable walls
        st = small_sim
        u = st.solver.velocity(st.omega)
        adv = nonlinear_term(st.omega, u)
        ip = inner_product(adv, st.omega)
        scale = l2_norm(adv) * l2_norm(st.omega) + 1e-30
        assert abs(ip) / scale < 1e-10

    def test_reality_preserved(self, small_sim):
        st = small_sim
        u = st.solver.velocity(st.omega)
        adv = to_physical(nonlinear_term(st.omega, u))
        assert np.abs(adv.data.imag).max() < 1e-12


class TestFullStep:
    def test_enstrophy_decays(self, small_sim):
        st = small_sim
        n0 = l2_norm(st.omega)
        for _ in range(40):
            st = step_full(st)
        assert l2_norm(st.omega) < n0

    def test_cfl_guard(self, small_sim):
        st = small_sim
        st.dt = 100.0
        with pytest.raises(CflError):
            step_full(st)

    def test_default_dt_policy(self, small_sim):
        g = small_sim.omega.grid
        assert default_dt(g) == pytest.approx(min(0.5 / g.k_max, 0.1))


class TestErrorDecomposition:
    def test_superposition_short_run(self):
        # omega_2 equals the sum of its dyadic pieces after evolution
        grid = make_grid(8.0 * np.pi, 32, 32)
        nu = 1e-2
        lin = make_linear_state(gaussian_cos(grid, amp=0.01), nu)
        part = dyadic_times(nu, 3)
        st = make_error_state(lin, part)
        st = evolve_omega2(st, part, dt=0.05, t_end=6.0)
        total = st.omega2.data
        parts = sum(st.omega2j[j].data for j in st.omega2j)
        scale = max(np.abs(total).max(), 1e-30)
        assert np.abs(total - parts).max() / scale < 1e-10

    def test_omega1_complement(self):
        grid = make_grid(8.0 * np.pi, 32, 32)
        nu = 1e-2
        lin = make_linear_state(gaussian_cos(grid, amp=0.01), nu)
        st = make_error_state(lin, dyadic_times(nu, 2))
        st = step_error(st, 0.05)
        assert np.abs(st.omega1.data
                      - (st.omega_e.data - st.omega2.data)).max() < 1e-15


class TestCheckpoint:
    def test_roundtrip(self, small_sim, tmp_path):
        st = small_sim
        st = step_full(st)
        p = str(tmp_path / "ck.json")
        save_checkpoint(st, p)
        back = load_checkpoint(p)
        assert back.t == st.t
        assert back.nu == st.nu and back.dt == st.dt
        assert back.omega.grid == st.omega.grid
        assert np.abs(back.omega.data - st.omega.data).max() < 1e-15

    def test_rejects_wrong_container(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"container": "field"}')
        with pytest.raises(ValueError):
            load_checkpoint(str(p))

    def test_resumed_run_matches(self, small_sim, tmp_path):
        st = small_sim
        for _ in range(5):
            st = step_full(st)
        p = str(tmp_path / "mid.json")
        save_checkpoint(st, p)
        a = step_full(step_full(st))
        b = step_full(step_full(load_checkpoint(p)))
        assert np.abs(a.omega.data - b.omega.data).max() < 1e-14
