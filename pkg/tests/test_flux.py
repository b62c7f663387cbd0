import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cslag.flux import (
    CflViolation,
    Displacements,
    Scheme,
    advect_profile,
    characteristic_feet,
    hermite_flux,
    hermite_flux_batch,
    primitive_update_oracle,
    sweep,
    sweep_batch,
)
from cslag.limiters import LimiterConfig, LimiterKind
from cslag.mesh import Boundary, CellProfile, build_grid1d
from cslag.reconstruction import lag_face_values, psm_face_values


def random_case(seed: int, boundary: Boundary):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 65))
    grid = build_grid1d(0.0, 1.0, n, boundary)
    values = rng.standard_normal(n)
    beta = rng.uniform(-1.0, 1.0, n + 1)
    if boundary is Boundary.PERIODIC:
        beta[-1] = beta[0]
    return grid, values, beta


class TestHermiteFlux:
    def test_constant_state(self):
        assert hermite_flux(2.0, 2.0, 2.0, 0.2, 1) == pytest.approx(0.4)

    def test_full_cell_swept(self):
        # beta = +-1 returns the upwind average exactly
        assert hermite_flux(7.0, -3.0, 11.0, 1.0, 1) == pytest.approx(7.0)
        assert hermite_flux(7.0, -3.0, 11.0, -1.0, 0) == pytest.approx(-7.0)

    def test_half_parabola(self):
        # P(z) = 6z - 6z^2 on the unit cell integrates to 1/2 over [1/2, 1]
        assert hermite_flux(1.0, 0.0, 0.0, 0.5, 1) == pytest.approx(0.5)

    def test_zero_beta(self):
        assert hermite_flux(3.0, 1.0, 2.0, 0.0, 1) == 0.0


class TestCharacteristicFeet:
    def test_zero_velocity(self):
        grid = build_grid1d(0.0, 1.0, 10, Boundary.PERIODIC)
        d = characteristic_feet(np.zeros(11), 0.1, grid)
        assert np.all(d.beta == 0.0)
        assert np.all(d.delta == 0)

    def test_uniform_fifth_cell(self):
        grid = build_grid1d(0.0, 1.0, 10, Boundary.PERIODIC)
        d = characteristic_feet(np.ones(11), 0.2 * grid.dx, grid)
        assert np.allclose(d.beta, 0.2)
        assert np.all(d.delta == 1)

    def test_cfl_violation(self):
        grid = build_grid1d(0.0, 1.0, 10, Boundary.PERIODIC)
        with pytest.raises(CflViolation):
            characteristic_feet(np.full(11, 2.0), grid.dx, grid)

    def test_rejects_nonpositive_dt(self):
        grid = build_grid1d(0.0, 1.0, 10, Boundary.PERIODIC)
        with pytest.raises(ValueError):
            characteristic_feet(np.ones(11), 0.0, grid)


class TestSweep:
    def test_zero_displacement_identity(self):
        grid, values, _ = random_case(1, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        out, flux = advect_profile(prof, Displacements(np.zeros(grid.n_faces)),
                                   Scheme.PSM)
        assert np.array_equal(out.values, values)
        assert np.all(flux.phi == 0.0)

    def test_constant_profile_uniform_beta(self):
        grid = build_grid1d(0.0, 1.0, 20, Boundary.PERIODIC)
        prof = CellProfile(grid, np.full(20, 4.0))
        disp = Displacements(np.full(21, 0.3))
        out, flux = advect_profile(prof, disp, Scheme.PSM)
        assert np.allclose(out.values, 4.0, rtol=0, atol=1e-13)
        assert np.allclose(flux.phi, 0.3 * 4.0 * grid.dx, rtol=1e-13)

    @pytest.mark.parametrize("scheme", [Scheme.PSM, Scheme.LAG])
    @pytest.mark.parametrize("seed", range(8))
    def test_periodic_conservation(self, scheme, seed):
        grid, values, beta = random_case(seed, Boundary.PERIODIC)
        new, _ = sweep_batch(values, beta, grid.boundary, grid.dx, scheme,
                             LimiterConfig.none())
        assert np.sum(new) == pytest.approx(np.sum(values), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("scheme", [Scheme.PSM, Scheme.LAG])
    @pytest.mark.parametrize("seed", range(8))
    def test_natural_mass_budget(self, scheme, seed):
        # mass change equals the net boundary flux exactly
        grid, values, beta = random_case(seed, Boundary.NATURAL)
        new, h = sweep_batch(values, beta, grid.boundary, grid.dx, scheme,
                             LimiterConfig.none())
        change = np.sum(new) - np.sum(values)
        assert change == pytest.approx(h[0] - h[-1], rel=1e-12, abs=1e-13)

    def test_sweep_checks_cfl(self):
        grid, values, beta = random_case(3, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        faces = psm_face_values(prof)
        with pytest.raises(CflViolation):
            sweep(prof, faces, Displacements(1.5 * np.ones(grid.n_faces)))

    def test_sweep_with_precomputed_faces_matches_advect(self):
        grid, values, beta = random_case(4, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        disp = Displacements(beta)
        for scheme, recon in ((Scheme.PSM, psm_face_values),
                              (Scheme.LAG, lag_face_values)):
            out1, f1 = sweep(prof, recon(prof), disp)
            out2, f2 = advect_profile(prof, disp, scheme)
            assert np.allclose(out1.values, out2.values, atol=1e-15)
            assert np.allclose(f1.phi, f2.phi, atol=1e-15)

    def test_step_benchmark_overshoots_but_conserves(self):
        # 80 periodic cells, 0.2 cells per iteration, 100 sweeps
        grid = build_grid1d(0.0, 1.0, 80, Boundary.PERIODIC)
        x = grid.cell_centers()
        values = np.where(np.abs(x - 0.5) < 0.125, 1.0, 0.0)
        mass0 = np.sum(values) * grid.dx
        beta = np.full(81, 0.2)
        for _ in range(100):
            values, _ = sweep_batch(values, beta, grid.boundary, grid.dx,
                                    Scheme.PSM, LimiterConfig.none())
        assert np.sum(values) * grid.dx == pytest.approx(mass0, rel=1e-12)
        assert values.min() < 0.0 and values.max() > 1.0


class TestPrimitiveOracle:
    def test_zero_displacement_identity(self):
        grid, values, _ = random_case(5, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        for scheme in (Scheme.PSM, Scheme.LAG):
            out = primitive_update_oracle(prof, Displacements(np.zeros(grid.n_faces)),
                                          scheme)
            assert np.allclose(out.values, values, rtol=0, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_flux_form_equals_primitive_form_periodic(self, seed):
        grid, values, beta = random_case(seed, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        disp = Displacements(beta)
        scale = max(1.0, np.abs(values).max())
        for scheme in (Scheme.PSM, Scheme.LAG):
            flux_form, _ = sweep_batch(values, beta, grid.boundary, grid.dx,
                                       scheme, LimiterConfig.none())
            oracle = primitive_update_oracle(prof, disp, scheme)
            assert np.max(np.abs(flux_form - oracle.values)) <= 1e-12 * scale

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_flux_form_equals_primitive_form_natural(self, seed):
        grid, values, beta = random_case(seed, Boundary.NATURAL)
        prof = CellProfile(grid, values)
        disp = Displacements(beta)
        scale = max(1.0, np.abs(values).max())
        for scheme in (Scheme.PSM, Scheme.LAG):
            flux_form, _ = sweep_batch(values, beta, grid.boundary, grid.dx,
                                       scheme, LimiterConfig.none())
            oracle = primitive_update_oracle(prof, disp, scheme)
            assert np.max(np.abs(flux_form - oracle.values)) <= 1e-12 * scale


class TestDisplacements:
    def test_delta_flags(self):
        d = Displacements(np.array([-0.5, 0.0, 0.5]))
        assert list(d.delta) == [0, 0, 1]

    def test_check_cfl_boundary_inclusive(self):
        Displacements(np.array([1.0, -1.0])).check_cfl()  # no raise
        with pytest.raises(CflViolation):
            Displacements(np.array([1.0 + 1e-9])).check_cfl()


class TestHermiteBatchBoundaries:
    def test_natural_inflow_uses_edge_average(self):
        grid = build_grid1d(0.0, 1.0, 8, Boundary.NATURAL)
        values = np.arange(1.0, 9.0)
        prof = CellProfile(grid, values)
        faces = psm_face_values(prof)
        beta = np.zeros(9)
        beta[0] = 0.25    # inflow at the left wall
        beta[-1] = -0.5   # inflow at the right wall
        h = hermite_flux_batch(values, faces.g_minus, faces.g_plus, beta,
                               grid.boundary)
        assert h[0] == pytest.approx(0.25 * values[0])
        assert h[-1] == pytest.approx(-0.5 * values[-1])

    def test_periodic_face_zero_equals_face_n(self):
        grid, values, beta = random_case(6, Boundary.PERIODIC)
        prof = CellProfile(grid, values)
        faces = psm_face_values(prof)
        h = hermite_flux_batch(values, faces.g_minus, faces.g_plus, beta,
                               grid.boundary)
        assert h[0] == h[-1]
