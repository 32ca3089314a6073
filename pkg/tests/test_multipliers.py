import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from couette_lab.grid import Field, SPECTRAL, make_grid, to_spectral, PHYSICAL
from couette_lab.elliptic import HelmholtzSolver
from couette_lab.multipliers import (DyadicPartition, SpaceTimeAccumulator,
                                     WeightSpec, accumulate, chi_j,
                                     dyadic_times, multiplier_M,
                                     multiplier_M1, weight)


class TestMultiplierM:
    def test_plateaus(self):
        # |k| <= 1/2: pure |k|^{2/3}; |k| >= 1: identically 1
        assert multiplier_M(0.25) == pytest.approx(0.25 ** (2.0 / 3.0))
        assert multiplier_M(0.5) == pytest.approx(0.5 ** (2.0 / 3.0))
        assert multiplier_M(1.0) == pytest.approx(1.0)
        assert multiplier_M(7.0) == pytest.approx(1.0)
        assert multiplier_M(0.0) == pytest.approx(0.0)

    def test_bridge_value(self):
        # at |k|=3/4 the smoothstep sits at its midpoint: chi = 1/2
        k = 0.75
        expect = 0.5 * k ** (2.0 / 3.0) + 0.5
        assert multiplier_M(k) == pytest.approx(expect, rel=1e-12)

    def test_even(self):
        ks = np.linspace(0.0, 3.0, 50)
        assert multiplier_M(-ks) == pytest.approx(multiplier_M(ks))

    def test_continuity_at_junctions(self):
        for k0 in (0.5, 1.0):
            lo = multiplier_M(k0 - 1e-9)
            hi = multiplier_M(k0 + 1e-9)
            assert hi == pytest.approx(lo, abs=1e-7)

    @given(st.floats(min_value=1e-6, max_value=100.0))
    @settings(max_examples=100, deadline=None)
    def test_upper_bound(self, k):
        # M(k) <= 3 |k|^{2/3} everywhere
        assert multiplier_M(k) <= 3.0 * k ** (2.0 / 3.0) + 1e-12


class TestM1AndWeight:
    def test_m1_values(self):
        assert multiplier_M1(4.0) == pytest.approx(6.0)
        assert multiplier_M1(-0.25) == pytest.approx(0.75)

    def test_weight_identity_cases(self):
        spec = WeightSpec(nu=1e-3, theta=1.0 / 32.0)
        assert weight(0.0, 2.0, spec) == pytest.approx(1.0)
        assert weight(5.0, 2.0, WeightSpec(nu=1e-3, theta=0.0)) \
            == pytest.approx(1.0)

    def test_weight_closed_form(self):
        spec = WeightSpec(nu=1e-3, theta=1.0 / 32.0)
        t, k = 100.0, 2.0
        expect = (1.0 + 1e-1 * t * 1.0) ** (1.0 / 32.0)
        assert weight(t, k, spec) == pytest.approx(expect, rel=1e-12)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            WeightSpec(nu=1e-3, theta=1.0 / 16.0)
        with pytest.raises(ValueError):
            WeightSpec(nu=2.0)

    @given(st.floats(min_value=-8, max_value=8),
           st.floats(min_value=-8, max_value=8),
           st.floats(min_value=0.0, max_value=1e4))
    @settings(max_examples=100, deadline=None)
    def test_weight_submultiplicative(self, k, ell, t):
        # w(k) <= C w(k-l) w(l) with C close to 1; generous slack here,
        # the tight constant is measured by the verification suite
        spec = WeightSpec(nu=1e-3, theta=1.0 / 32.0)
        lhs = weight(t, k, spec)
        rhs = weight(t, k - ell, spec) * weight(t, ell, spec)
        assert lhs <= 1.05 * rhs


class TestDyadicPartition:
    def test_times(self):
        part = dyadic_times(1e-3, 3)
        assert part.T[0] == pytest.approx(1e-3 ** (-1.0 / 6.0))
        assert part.T[1] == pytest.approx(2.0 * 10.0)
        assert part.T[2] == pytest.approx(4.0 * 10.0)
        assert part.T[3] == pytest.approx(8.0 * 10.0)

    def test_indicator_half_open(self):
        part = dyadic_times(1e-3, 2)
        T0, T1 = part.T[0], part.T[1]
        assert chi_j(T0, 1, part) == 0       # left end excluded
        assert chi_j(T0 + 1e-9, 1, part) == 1
        assert chi_j(T1, 1, part) == 1       # right end included
        assert chi_j(T1, 2, part) == 0
        assert chi_j(T1 + 1e-9, 2, part) == 1

    def test_partition_of_unity(self):
        part = dyadic_times(1e-2, 4)
        ts = np.linspace(part.T[0] + 1e-6, part.T[-1], 200)
        for t in ts:
            assert sum(chi_j(float(t), j, part)
                       for j in range(1, part.j_max + 1)) == 1

    def test_rejects_bad_j(self):
        part = dyadic_times(1e-2, 2)
        with pytest.raises(ValueError):
            chi_j(1.0, 0, part)
        with pytest.raises(ValueError):
            chi_j(1.0, 3, part)

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            DyadicPartition(nu=0.5, j_max=1, T=np.array([2.0, 1.0]))


class TestAccumulator:
    def _field(self, grid, scale=1.0):
        data = scale * np.outer(np.cos(2 * np.pi * grid.x_nodes / grid.L_x),
                                np.cos(0.5 * np.pi * grid.y_nodes))
        return to_spectral(Field(data=data.astype(complex), frame=PHYSICAL,
                                 grid=grid))

    def test_monotone_components(self):
        grid = make_grid(4.0 * np.pi, 16, 24)
        solver = HelmholtzSolver(grid)
        acc = SpaceTimeAccumulator(WeightSpec(nu=1e-2))
        f = self._field(grid)
        prev = None
        for t in (0.0, 0.5, 1.0, 2.0):
            accumulate(acc, t, f, solver)
            cur = acc.components()
            if prev is not None:
                for key, val in cur.items():
                    assert val >= prev[key] - 1e-14
            prev = cur

    def test_requires_increasing_times(self):
        grid = make_grid(4.0 * np.pi, 16, 24)
        solver = HelmholtzSolver(grid)
        acc = SpaceTimeAccumulator(WeightSpec(nu=1e-2))
        f = self._field(grid)
        accumulate(acc, 1.0, f, solver)
        with pytest.raises(ValueError):
            accumulate(acc, 1.0, f, solver)

    def test_sup_component_matches_l2(self):
        from couette_lab.grid import l2_norm
        grid = make_grid(4.0 * np.pi, 16, 24)
        solver = HelmholtzSolver(grid)
        acc = SpaceTimeAccumulator(WeightSpec(nu=1e-2))
        f = self._field(grid, scale=3.0)
        accumulate(acc, 0.0, f, solver)
        assert acc.components()["linf_l2"] == pytest.approx(l2_norm(f),
                                                            rel=1e-12)

    def test_x_norm_composition(self):
        grid = make_grid(4.0 * np.pi, 16, 24)
        solver = HelmholtzSolver(grid)
        acc = SpaceTimeAccumulator(WeightSpec(nu=1e-2))
        accumulate(acc, 0.0, self._field(grid), solver)
        accumulate(acc, 1.0, self._field(grid, 0.5), solver)
        c = acc.components()
        assert acc.x_norm() == pytest.approx(
            c["linf_l2"] + c["visc_grad_l2l2"] + c["m1_inv_lap_l2l2"]
            + c["visc_dx_l1l2"])
        assert acc.y_norm() <= acc.x_norm() + 1e-15
