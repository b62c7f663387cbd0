"""Quasi-neutrality solve for the electric potential.

Solves   -(1/(B omega_i)) div_perp(n0 grad_perp Phi)
         + (e/(kappa T_e)) (Phi - <Phi>_z)  =  n_i - n0

by Fourier decomposition in theta and z and a tridiagonal radial solve per
mode.  grad_perp only acts in (r, theta), so the radial operator depends on
the theta mode number m alone; the z decomposition enters solely through the
adiabatic term, which the z average cancels exactly on every n = 0 mode.
Phi is pinned to zero on the radial walls (homogeneous Dirichlet, imposed
through ghost reflection about the wall faces), which keeps every mode
regular, including (0, 0).

Radial profiles (n0, T_e, T_i) and the Maxwellian equilibrium are bundled in
EquilibriumProfiles; f_eq is renormalized so its midpoint-rule velocity
integral matches n0 exactly, making the unperturbed state a fixed point of
the discrete system to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import Potential3D
from .mesh import Field4D, Grid1D, Grid4D

__all__ = [
    "SingularModeError",
    "tanh_profile",
    "maxwellian_equilibrium",
    "EquilibriumProfiles",
    "make_equilibrium",
    "ion_density",
    "QNSolver",
    "qn_solve",
]


class SingularModeError(np.linalg.LinAlgError):
    """A per-mode radial operator lost its pivot (should not occur with
    Dirichlet walls)."""


def tanh_profile(kappa: float, delta: float, r_peak: float) -> Callable[[np.ndarray], np.ndarray]:
    """exp(-kappa*delta*tanh((r - r_peak)/delta)): peak gradient kappa at r_peak."""
    def profile(r: np.ndarray) -> np.ndarray:
        return np.exp(-kappa * delta * np.tanh((np.asarray(r, dtype=float) - r_peak) / delta))
    return profile


def maxwellian_equilibrium(n0: np.ndarray, t_i: np.ndarray, m_i: float,
                           v_grid: Grid1D, normalize: bool = True) -> np.ndarray:
    """Maxwellian f_eq(r, v) with density n0(r) and temperature T_i(r).

    With ``normalize`` the analytic prefactor is rescaled per radius so the
    midpoint-rule integral over the finite v grid reproduces n0 exactly
    (the truncated tails and coarse v spacing would otherwise leave a
    relative defect far above round-off).
    """
    v = v_grid.cell_centers()
    t_col = np.asarray(t_i, dtype=float)[:, None]
    n_col = np.asarray(n0, dtype=float)[:, None]
    f_eq = n_col / np.sqrt(2.0 * np.pi * t_col / m_i) * np.exp(
        -m_i * v[None, :] ** 2 / (2.0 * t_col))
    if normalize:
        dens = v_grid.dx * np.sum(f_eq, axis=1, keepdims=True)
        f_eq *= n_col / dens
    return f_eq


@dataclass
class EquilibriumProfiles:
    """Radial equilibrium profiles, physical constants and f_eq."""

    grid: Grid4D
    n0: np.ndarray           # (nr,) on cell centres
    n0_face: np.ndarray      # (nr+1,) on radial faces
    t_e: np.ndarray          # (nr,)
    t_i: np.ndarray          # (nr,)
    b_z: float = 1.0
    q_i: float = 1.0
    m_i: float = 1.0
    e: float = 1.0
    kappa: float = 1.0
    f_eq: np.ndarray = field(default=None)  # (nr, nv)

    def __post_init__(self) -> None:
        if np.any(self.n0 <= 0.0) or np.any(self.t_e <= 0.0) or np.any(self.t_i <= 0.0):
            raise ValueError("n0, T_e, T_i must be strictly positive")
        if self.f_eq is None:
            self.f_eq = maxwellian_equilibrium(self.n0, self.t_i, self.m_i,
                                               self.grid.v)

    @property
    def omega_i(self) -> float:
        """Ion cyclotron frequency q_i B / m_i."""
        return self.q_i * self.b_z / self.m_i

    @property
    def q_over_m(self) -> float:
        return self.q_i / self.m_i


def make_equilibrium(grid: Grid4D,
                     n0_fn: Callable[[np.ndarray], np.ndarray],
                     t_e_fn: Callable[[np.ndarray], np.ndarray],
                     t_i_fn: Callable[[np.ndarray], np.ndarray],
                     b_z: float = 1.0, q_i: float = 1.0, m_i: float = 1.0,
                     e: float = 1.0, kappa: float = 1.0) -> EquilibriumProfiles:
    r = grid.r.cell_centers()
    return EquilibriumProfiles(
        grid=grid,
        n0=np.asarray(n0_fn(r), dtype=float),
        n0_face=np.asarray(n0_fn(grid.r.face_positions()), dtype=float),
        t_e=np.asarray(t_e_fn(r), dtype=float),
        t_i=np.asarray(t_i_fn(r), dtype=float),
        b_z=b_z, q_i=q_i, m_i=m_i, e=e, kappa=kappa)


def ion_density(fld: Field4D) -> np.ndarray:
    """Midpoint-rule velocity integral dv * sum_l f, shape (nr, ntheta, nz)."""
    return fld.grid.v.dx * np.sum(fld.values, axis=3)


class QNSolver:
    """Precomputed quasi-neutrality solver for one equilibrium.

    The off-diagonals of every per-mode radial matrix coincide, so one
    batched Thomas elimination with per-mode diagonals (precomputed pivots)
    solves all (m, n) modes simultaneously.
    """

    def __init__(self, profiles: EquilibriumProfiles):
        self.profiles = profiles
        grid = profiles.grid
        nr, ntheta, nz, _ = grid.shape
        self.nr, self.ntheta, self.nz = nr, ntheta, nz
        dr = grid.r.dx
        r = grid.r.cell_centers()
        r_face = grid.r.face_positions()
        c = 1.0 / (profiles.b_z * profiles.omega_i)

        w = r_face * profiles.n0_face                 # r n0 on faces
        base = c / (r * dr * dr)
        self._sub = -base[1:] * w[1:-1]               # coupling to i-1
        self._sup = -base[:-1] * w[1:-1]              # coupling to i+1
        diag0 = base * (w[1:] + w[:-1])
        # ghost reflection Phi_{-1} = -Phi_0 doubles the wall-face coupling
        diag0 = diag0.copy()
        diag0[0] += base[0] * w[0]
        diag0[-1] += base[-1] * w[-1]
        self._diag_base = diag0
        self._m2_coeff = c * profiles.n0 / r**2        # multiplies m^2
        self._adia = profiles.e / (profiles.kappa * profiles.t_e)

        m_int = np.fft.fftfreq(ntheta, d=1.0 / ntheta).round().astype(int)
        n_int = np.fft.fftfreq(nz, d=1.0 / nz).round().astype(int)
        m2 = (m_int[:, None] ** 2 * np.ones(nz, dtype=int)[None, :]).reshape(-1)
        nonzero_n = (np.zeros(ntheta, dtype=bool)[:, None]
                     | (n_int != 0)[None, :]).reshape(-1)
        diag = (self._diag_base[:, None]
                + self._m2_coeff[:, None] * m2[None, :]
                + np.where(nonzero_n[None, :], self._adia[:, None], 0.0))
        self._diag = diag

        # factor once: pivots and multipliers per mode column
        piv = np.empty_like(diag)
        low = np.empty((nr - 1, diag.shape[1]))
        piv[0] = diag[0]
        for i in range(1, nr):
            if np.any(piv[i - 1] == 0.0):
                raise SingularModeError("zero pivot in radial factorization")
            low[i - 1] = self._sub[i - 1] / piv[i - 1]
            piv[i] = diag[i] - low[i - 1] * self._sup[i - 1]
        if np.any(piv[-1] == 0.0):
            raise SingularModeError("zero pivot in radial factorization")
        self._piv = piv
        self._low = low

    # -- linear algebra -----------------------------------------------------

    def mode_matrix(self, m: int, adiabatic: bool) -> np.ndarray:
        """Dense radial matrix of one (|m|, n != 0) mode, for verification."""
        nr = self.nr
        diag = (self._diag_base + self._m2_coeff * m * m
                + (self._adia if adiabatic else 0.0))
        a = np.diag(diag)
        a += np.diag(self._sub, -1) + np.diag(self._sup, 1)
        return a

    def apply_operator(self, phi: np.ndarray) -> np.ndarray:
        """Discrete left-hand side applied to phi(r, theta, z)."""
        phi_hat = np.fft.fft2(phi, axes=(1, 2)).reshape(self.nr, -1)
        out = self._diag * phi_hat
        out[:-1] += self._sup[:, None] * phi_hat[1:]
        out[1:] += self._sub[:, None] * phi_hat[:-1]
        out = out.reshape(self.nr, self.ntheta, self.nz)
        return np.real(np.fft.ifft2(out, axes=(1, 2)))

    def solve(self, n_i: np.ndarray) -> Potential3D:
        """Potential from the ion density; rhs of the solve is n_i - n0."""
        rhs = n_i - self.profiles.n0[:, None, None]
        b = np.fft.fft2(rhs, axes=(1, 2)).reshape(self.nr, -1)
        y = np.empty_like(b)
        y[0] = b[0]
        for i in range(1, self.nr):
            y[i] = b[i] - self._low[i - 1] * y[i - 1]
        x = np.empty_like(y)
        x[-1] = y[-1] / self._piv[-1]
        for i in range(self.nr - 2, -1, -1):
            x[i] = (y[i] - self._sup[i] * x[i + 1]) / self._piv[i]
        phi = np.real(np.fft.ifft2(x.reshape(self.nr, self.ntheta, self.nz),
                                   axes=(1, 2)))
        return Potential3D(self.profiles.grid, phi)


def qn_solve(n_i: np.ndarray, profiles: EquilibriumProfiles) -> Potential3D:
    """One-shot quasi-neutrality solve (builds a fresh QNSolver)."""
    return QNSolver(profiles).solve(n_i)
