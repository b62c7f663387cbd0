import numpy as np
import pytest

from cslag.mesh import (
    Boundary,
    CellProfile,
    FaceField,
    Field4D,
    Grid4D,
    build_grid1d,
    extract_pencils,
    matrix_to_field,
    pencil_matrix,
    read_snapshot,
    write_snapshot,
)


def small_grid4d(nr=4, ntheta=4, nz=4, nv=4, r_min=1.0):
    return Grid4D(
        r=build_grid1d(r_min, r_min + 4.0, nr, Boundary.NATURAL),
        theta=build_grid1d(0.0, 2 * np.pi, ntheta, Boundary.PERIODIC),
        z=build_grid1d(0.0, 10.0, nz, Boundary.PERIODIC),
        v=build_grid1d(-3.0, 3.0, nv, Boundary.NATURAL),
    )


class TestGrid1D:
    def test_paper_step_grid(self):
        g = build_grid1d(0.0, 1.0, 80, Boundary.PERIODIC)
        assert g.dx == pytest.approx(0.0125, abs=0)
        assert g.n_faces == 81

    def test_natural_four_cells(self):
        g = build_grid1d(0.0, 1.0, 4, Boundary.NATURAL)
        assert g.dx == 0.25

    def test_rejects_too_few_cells(self):
        with pytest.raises(ValueError):
            build_grid1d(0.0, 1.0, 3, Boundary.PERIODIC)

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            build_grid1d(1.0, 0.0, 8, Boundary.PERIODIC)
        with pytest.raises(ValueError):
            build_grid1d(0.0, np.inf, 8, Boundary.PERIODIC)

    @pytest.mark.parametrize("n", [4, 7, 80, 256])
    def test_face_cell_counts(self, n):
        g = build_grid1d(0.0, 1.0, n, Boundary.PERIODIC)
        assert g.n_faces == g.n_cells + 1
        assert g.face_positions().shape == (n + 1,)
        assert g.cell_centers().shape == (n,)
        # centers sit halfway between faces
        f = g.face_positions()
        assert np.allclose(g.cell_centers(), 0.5 * (f[:-1] + f[1:]))


class TestProfileAndFaces:
    def test_profile_length_checked(self):
        g = build_grid1d(0.0, 1.0, 8, Boundary.PERIODIC)
        with pytest.raises(ValueError):
            CellProfile(g, np.zeros(7))

    def test_profile_mass(self):
        g = build_grid1d(0.0, 2.0, 8, Boundary.PERIODIC)
        p = CellProfile(g, np.full(8, 3.0))
        assert p.mass == pytest.approx(6.0)

    def test_facefield_shape_checked(self):
        with pytest.raises(ValueError):
            FaceField(np.zeros(5), np.zeros(4))

    def test_facefield_continuity_flag(self):
        f = FaceField(np.ones(5), np.ones(5))
        assert f.is_continuous()
        f.g_plus[2] += 1e-9
        assert not f.is_continuous()


class TestGrid4D:
    def test_boundary_kinds_enforced(self):
        with pytest.raises(ValueError):
            Grid4D(
                r=build_grid1d(1.0, 2.0, 4, Boundary.PERIODIC),
                theta=build_grid1d(0.0, 1.0, 4, Boundary.PERIODIC),
                z=build_grid1d(0.0, 1.0, 4, Boundary.PERIODIC),
                v=build_grid1d(-1.0, 1.0, 4, Boundary.NATURAL),
            )

    def test_positive_r_required(self):
        with pytest.raises(ValueError):
            small_grid4d(r_min=-0.5)

    def test_field_shape_checked(self):
        g = small_grid4d()
        with pytest.raises(ValueError):
            Field4D(g, np.zeros((4, 4, 4, 5)))


class TestPencils:
    def test_pencil_counts(self):
        g = small_grid4d()
        fld = Field4D(g, np.arange(256.0).reshape(4, 4, 4, 4))
        for axis in range(4):
            pencils = list(extract_pencils(fld, axis))
            assert len(pencils) == 64
            assert all(p.values.shape == (4,) for p, _ in pencils)

    def test_constant_field_constant_pencils(self):
        g = small_grid4d()
        fld = Field4D(g, np.full(g.shape, 2.5))
        for axis in ("r", "theta", "z", "v"):
            for prof, _ in extract_pencils(fld, axis):
                assert np.all(prof.values == 2.5)

    @pytest.mark.parametrize("axis", [0, 1, 2, 3])
    def test_round_trip_identity(self, axis):
        rng = np.random.default_rng(11 + axis)
        g = small_grid4d(5, 6, 4, 7) if axis != 1 else small_grid4d(4, 8, 5, 4)
        fld = Field4D(g, rng.standard_normal(g.shape))
        rebuilt = np.empty_like(fld.values)
        for prof, idx in extract_pencils(fld, axis):
            full = list(idx)
            full.insert(axis, slice(None))
            rebuilt[tuple(full)] = prof.values
        assert np.array_equal(rebuilt, fld.values)

    @pytest.mark.parametrize("axis", [0, 1, 2, 3])
    def test_matrix_round_trip(self, axis):
        rng = np.random.default_rng(axis)
        arr = rng.standard_normal((3, 4, 5, 6))
        mat = pencil_matrix(arr, axis)
        assert mat.shape[-1] == arr.shape[axis]
        assert np.array_equal(matrix_to_field(mat, arr.shape, axis), arr)


class TestSnapshots:
    def test_round_trip(self, tmp_path):
        g = small_grid4d(5, 4, 4, 6)
        rng = np.random.default_rng(0)
        vals = rng.standard_normal(g.shape)
        write_snapshot(tmp_path / "snap", vals, list(g.axes),
                       ("r", "theta", "z", "v"), time=1.25, step=42)
        back, grids, t, step = read_snapshot(tmp_path / "snap")
        assert np.array_equal(back, vals)
        assert t == 1.25 and step == 42
        assert [gr.n_cells for gr in grids] == [5, 4, 4, 6]
        assert grids[0].boundary is Boundary.NATURAL
        assert grids[1].boundary is Boundary.PERIODIC

    def test_header_is_text(self, tmp_path):
        g = small_grid4d()
        write_snapshot(tmp_path / "s", np.zeros(g.shape), list(g.axes),
                       ("r", "theta", "z", "v"), 0.0, 0)
        text = (tmp_path / "s.header.txt").read_text()
        for key in ("axes", "r.n_cells", "time", "step", "v.boundary"):
            assert key in text
