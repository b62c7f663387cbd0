"""Advection velocity fields for the drift-kinetic model.

The guiding-center drift in a constant axial magnetic field B_z reads
v_r = -(1/(r B_z)) d_theta(Phi) and v_gc_theta = (1/B_z) d_r(Phi).  The
theta sweep advects the angular velocity omega = v_gc_theta / r so every
direction is a plain 1D advection; the cylindrical Jacobian enters only
diagnostics and the quasi-neutrality solve (the conservative split form
omits it, which is documented behaviour).

All derivatives use one fixed family of second-order stencils (centred
inside, one-sided at natural edges), so the discrete cylindrical divergence
of the constructed field vanishes to round-off by operator commutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Boundary, Field4D, Grid4D

__all__ = [
    "d_periodic",
    "d_natural",
    "Potential3D",
    "guiding_center_velocities",
    "parallel_acceleration",
    "AdvectionField4D",
    "build_advection_field",
    "discrete_divergence",
    "face_average",
]


@dataclass
class Potential3D:
    """Electric potential on the (r, theta, z) cell centres of a Grid4D."""

    grid: Grid4D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape[:3]:
            raise ValueError(
                f"potential shape {self.values.shape} does not match "
                f"{self.grid.shape[:3]}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("potential must be finite everywhere")


def d_periodic(arr: np.ndarray, dx: float, axis: int) -> np.ndarray:
    """Centred second-order derivative on a periodic axis."""
    return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2.0 * dx)


def d_natural(arr: np.ndarray, dx: float, axis: int) -> np.ndarray:
    """Centred derivative with one-sided second-order ends."""
    arr = np.moveaxis(arr, axis, 0)
    out = np.empty_like(arr)
    out[1:-1] = (arr[2:] - arr[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * arr[0] + 4.0 * arr[1] - arr[2]) / (2.0 * dx)
    out[-1] = (3.0 * arr[-1] - 4.0 * arr[-2] + arr[-3]) / (2.0 * dx)
    return np.moveaxis(out, 0, axis)


def guiding_center_velocities(phi: np.ndarray, r: np.ndarray, b_z: float,
                              dr: float, dtheta: float) -> tuple[np.ndarray, np.ndarray]:
    """(v_r, v_gc_theta) from a potential phi(r, theta, ...) on cell centres.

    ``r`` broadcasts against phi's leading axis.  theta (axis 1) is
    periodic; r (axis 0) uses one-sided stencils at its natural edges.
    """
    shape = (-1,) + (1,) * (phi.ndim - 1)
    r_col = np.asarray(r, dtype=float).reshape(shape)
    v_r = -d_periodic(phi, dtheta, axis=1) / (r_col * b_z)
    v_gc_theta = d_natural(phi, dr, axis=0) / b_z
    return v_r, v_gc_theta


def parallel_acceleration(phi: np.ndarray, q_over_m: float,
                          dz: float) -> np.ndarray:
    """dv_par/dt = (q/m) E_z = -(q/m) d_z(Phi), periodic in z (axis 2)."""
    return -q_over_m * d_periodic(phi, dz, axis=2)


@dataclass
class AdvectionField4D:
    """The four 1D advection velocities of the drift-kinetic split.

    ``v_r`` and ``a_v`` live on the (r, theta, z) mesh (independent of
    v_par); ``omega`` is the angular velocity v_gc_theta / r; ``v_z`` is the
    v_par cell-centre array itself (dz/dt = v_par, independent of z).
    """

    grid: Grid4D
    v_r: np.ndarray
    omega: np.ndarray
    v_z: np.ndarray
    a_v: np.ndarray

    def face_velocity(self, axis: int) -> np.ndarray:
        """Velocity at the faces of ``axis``, broadcast to the full 4D shape.

        Interior faces take the midpoint average of the adjacent cell
        values.  Both natural-axis walls get zero face velocity: at the
        radial walls this is exact (the potential is Dirichlet there, so no
        E x B drift crosses), and at the v_par ends it is the zero-flux
        closure of the truncated velocity domain.  Closed walls are what
        make the coordinate-space mass an exact invariant of the step.
        """
        nr, ntheta, nz, nv = self.grid.shape
        if axis == 0:
            fa = face_average(self.v_r, 0, Boundary.NATURAL, edge="zero")
            return np.broadcast_to(fa[..., None], (nr + 1, ntheta, nz, nv))
        if axis == 1:
            fa = face_average(self.omega, 1, Boundary.PERIODIC)
            return np.broadcast_to(fa[..., None], (nr, ntheta + 1, nz, nv))
        if axis == 2:
            return np.broadcast_to(self.v_z[None, None, None, :],
                                   (nr, ntheta, nz + 1, nv))
        if axis == 3:
            fa = np.concatenate([
                np.zeros_like(self.a_v[..., None]),
                np.broadcast_to(self.a_v[..., None], (nr, ntheta, nz, nv - 1)),
                np.zeros_like(self.a_v[..., None]),
            ], axis=-1)
            return fa
        raise ValueError(f"axis {axis} out of range")

    def max_speed(self, axis: int) -> float:
        arrs = {0: self.v_r, 1: self.omega, 2: self.v_z, 3: self.a_v}
        return float(np.max(np.abs(arrs[axis]))) if arrs[axis].size else 0.0


def face_average(values: np.ndarray, axis: int, boundary: Boundary,
                 edge: str = "copy") -> np.ndarray:
    """Second-order midpoint interpolation of cell values to faces."""
    v = np.moveaxis(values, axis, 0)
    n = v.shape[0]
    out = np.empty((n + 1,) + v.shape[1:], dtype=v.dtype)
    out[1:-1] = 0.5 * (v[:-1] + v[1:])
    if boundary is Boundary.PERIODIC:
        out[0] = 0.5 * (v[-1] + v[0])
        out[-1] = out[0]
    elif edge == "zero":
        out[0] = 0.0
        out[-1] = 0.0
    else:
        out[0] = v[0]
        out[-1] = v[-1]
    return np.moveaxis(out, 0, axis)


def build_advection_field(grid: Grid4D, phi: np.ndarray | Potential3D,
                          b_z: float, q_over_m: float) -> AdvectionField4D:
    """Assemble the four split velocities from a potential on (r, theta, z)."""
    phi = getattr(phi, "values", phi)
    if phi.shape != grid.shape[:3]:
        raise ValueError(f"phi shape {phi.shape} does not match {grid.shape[:3]}")
    r = grid.r.cell_centers()
    v_r, v_gc_theta = guiding_center_velocities(phi, r, b_z, grid.r.dx,
                                                grid.theta.dx)
    omega = v_gc_theta / r[:, None, None]
    a_v = parallel_acceleration(phi, q_over_m, grid.z.dx)
    return AdvectionField4D(grid=grid, v_r=v_r, omega=omega,
                            v_z=grid.v.cell_centers(), a_v=a_v)


def discrete_divergence(adv: AdvectionField4D) -> np.ndarray:
    """Cylindrical divergence of the 4D field with the construction stencils.

    (1/r) d_r(r v_r) + (1/r) d_theta(v_gc_theta) + d_z(v_z) + d_v(a_v),
    returned on the full 4D mesh.  Vanishes to round-off for any potential
    because d_r and d_theta commute and the z/v terms are structurally zero.
    """
    grid = adv.grid
    r = grid.r.cell_centers()[:, None, None]
    term_r = d_natural(r * adv.v_r, grid.r.dx, axis=0) / r
    term_theta = d_periodic(adv.omega * r, grid.theta.dx, axis=1) / r
    div3 = term_r + term_theta
    nr, ntheta, nz, nv = grid.shape
    out = np.empty(grid.shape)
    out[:] = div3[..., None]
    v4 = np.broadcast_to(adv.v_z[None, None, None, :], grid.shape)
    out += d_periodic(v4, grid.z.dx, axis=2)
    a4 = np.broadcast_to(adv.a_v[..., None], grid.shape)
    out += d_natural(a4, grid.v.dx, axis=3)
    return out
