"""Hermite flux kernel, characteristic feet and the finite-volume 1D sweep.

The displacement at face m is beta_m = (x_m - x*_m)/dx in [-1, 1], where
x*_m is the foot of the characteristic through the face.  beta_m > 0 means
the flow crosses the face from the left, so the upwind cell is m-1
(delta = 1); beta_m < 0 takes cell m (delta = 0).  One cubic formula in
beta covers both reconstructions once the upwind cell's face anchors
(g_minus at its left face, g_plus at its right face) and average are known.

Fluxes are handled normalized (phi/dx) internally, matching the update
``gbar_i -= H_{i+1} - H_i``; FluxVector reports physical phi = H*dx.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

from . import limiters as lim
from .mesh import Boundary, CellProfile, FaceField, Grid1D
from .reconstruction import lag_faces_batch, psm_faces_batch

__all__ = [
    "Scheme",
    "CflViolation",
    "Displacements",
    "FluxVector",
    "characteristic_feet",
    "hermite_flux",
    "hermite_flux_batch",
    "flux_from_faces",
    "sweep_batch",
    "sweep",
    "advect_profile",
    "primitive_update_oracle",
]


class Scheme(Enum):
    PSM = "psm"
    LAG = "lag"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown scheme: {text!r}") from None


class CflViolation(RuntimeError):
    """A normalized displacement left [-1, 1]; the time step was too large."""


@dataclass
class Displacements:
    """Normalized characteristic displacements beta at every face."""

    beta: np.ndarray

    def __post_init__(self) -> None:
        self.beta = np.asarray(self.beta, dtype=float)

    @property
    def delta(self) -> np.ndarray:
        """Upwind flag per face: 1 where the foot lies left of the face."""
        return (self.beta > 0.0).astype(int)

    def check_cfl(self) -> None:
        worst = float(np.max(np.abs(self.beta))) if self.beta.size else 0.0
        if worst > 1.0:
            raise CflViolation(f"max |beta| = {worst:.6g} exceeds 1")


@dataclass
class FluxVector:
    """Physical fluxes phi (density * length) through every face."""

    phi: np.ndarray


def characteristic_feet(face_velocity: np.ndarray, dt: float,
                        grid: Grid1D) -> Displacements:
    """First-order feet x* = x - a(x) dt expressed as normalized displacements."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    beta = np.asarray(face_velocity, dtype=float) * (dt / grid.dx)
    disp = Displacements(beta)
    disp.check_cfl()
    return disp


def hermite_flux(gbar_up, g_minus, g_plus, beta, delta):
    """Normalized flux phi/dx through one face from its upwind cell.

    ``g_minus``/``g_plus`` are the upwind cell's left/right face anchors and
    ``gbar_up`` its average; ``delta`` is 1 for beta > 0 (upwind cell left of
    the face) and 0 for beta < 0.  Pure arithmetic, broadcasts over arrays.
    """
    b2 = beta * beta
    b3 = b2 * beta
    return (g_minus * (beta * (1 - delta) + b2 * (2 - 3 * delta) + b3)
            + g_plus * (beta * delta + b2 * (1 - 3 * delta) + b3)
            + gbar_up * (b2 * (6 * delta - 3) - 2 * b3))


def _apply_natural_inflow(h: np.ndarray, values: np.ndarray,
                          beta: np.ndarray) -> np.ndarray:
    """Boundary-face fluxes on natural grids: inflow carries the edge average."""
    b0 = beta[..., 0]
    bn = beta[..., -1]
    h[..., 0] = np.where(b0 > 0.0, b0 * values[..., 0], h[..., 0])
    h[..., -1] = np.where(bn < 0.0, bn * values[..., -1], h[..., -1])
    return h


def hermite_flux_batch(values: np.ndarray, g_minus: np.ndarray,
                       g_plus: np.ndarray, beta: np.ndarray,
                       boundary: Boundary) -> np.ndarray:
    """Normalized fluxes at all n_cells+1 faces of a pencil batch.

    ``values`` has shape (..., n); face arrays and ``beta`` shape (..., n+1)
    (beta may broadcast).  Periodic grids evaluate the distinct faces and
    copy face 0 to face n; natural grids apply the inflow rule at the
    boundary faces.
    """
    n = values.shape[-1]
    beta = np.broadcast_to(np.asarray(beta, dtype=float),
                           values.shape[:-1] + (n + 1,))
    if boundary is Boundary.PERIODIC:
        bd = beta[..., :n]
        gm_d = g_minus[..., :n]
        gp_d = g_plus[..., :n]
        h_pos = hermite_flux(np.roll(values, 1, axis=-1),
                             np.roll(gm_d, 1, axis=-1), gp_d, bd, 1)
        h_neg = hermite_flux(values, gm_d, np.roll(gp_d, -1, axis=-1), bd, 0)
        h = np.where(bd > 0.0, h_pos, np.where(bd < 0.0, h_neg, 0.0))
        return np.concatenate([h, h[..., :1]], axis=-1)
    pad = np.zeros_like(values[..., :1])
    h_pos = hermite_flux(np.concatenate([pad, values], axis=-1),
                         np.concatenate([pad, g_minus[..., :-1]], axis=-1),
                         g_plus, beta, 1)
    h_neg = hermite_flux(np.concatenate([values, pad], axis=-1),
                         g_minus,
                         np.concatenate([g_plus[..., 1:], pad], axis=-1),
                         beta, 0)
    h = np.where(beta > 0.0, h_pos, np.where(beta < 0.0, h_neg, 0.0))
    return _apply_natural_inflow(h, values, beta)


def flux_from_faces(values: np.ndarray, g_minus: np.ndarray, g_plus: np.ndarray,
                    beta: np.ndarray, boundary: Boundary, dx: float,
                    limiter: lim.LimiterConfig) -> np.ndarray:
    """Limited normalized fluxes given precomputed face anchors.

    For OSL the provided faces must be the continuous PSM values (the LAG
    candidates are rebuilt internally); for UMEDA the faces are ignored.
    """
    kind = limiter.kind
    if kind is lim.LimiterKind.UMEDA:
        n = values.shape[-1]
        beta = np.broadcast_to(np.asarray(beta, dtype=float),
                               values.shape[:-1] + (n + 1,))
        h = lim.umeda_batch(values, beta, boundary, limiter.literal_paper_mode)
    elif kind is lim.LimiterKind.OSL:
        lag_m, lag_p = lag_faces_batch(values, boundary)
        gm, gp = lim.osl_batch(g_minus, lag_m, lag_p, values, boundary,
                               limiter.c, limiter.literal_paper_mode)
        h = hermite_flux_batch(values, gm, gp, beta, boundary)
    else:
        h = hermite_flux_batch(values, g_minus, g_plus, beta, boundary)
        if kind is lim.LimiterKind.ENT:
            h = lim.ent_batch(h, values, beta, boundary)
        elif kind is lim.LimiterKind.SLS:
            h = lim.sls_batch(h, values, beta, boundary, limiter.k, dx,
                              limiter.literal_paper_mode)
    if boundary is Boundary.NATURAL:
        n = values.shape[-1]
        beta = np.broadcast_to(np.asarray(beta, dtype=float),
                               values.shape[:-1] + (n + 1,))
        h = _apply_natural_inflow(h, values, beta)
    return h


def sweep_batch(values: np.ndarray, beta: np.ndarray, boundary: Boundary,
                dx: float, scheme: Scheme,
                limiter: lim.LimiterConfig) -> tuple[np.ndarray, np.ndarray]:
    """One conservative finite-volume update of a pencil batch.

    Returns (new cell averages, normalized fluxes).  ``beta`` must already
    satisfy |beta| <= 1; callers produce it through characteristic_feet.
    """
    if float(np.max(np.abs(beta))) > 1.0:
        raise CflViolation(f"max |beta| = {float(np.max(np.abs(beta))):.6g} exceeds 1")
    if limiter.kind is lim.LimiterKind.UMEDA:
        g_minus = g_plus = values[..., :0]  # unused
    elif scheme is Scheme.PSM or limiter.kind is lim.LimiterKind.OSL:
        g_minus = g_plus = psm_faces_batch(values, boundary)
    else:
        g_minus, g_plus = lag_faces_batch(values, boundary)
    h = flux_from_faces(values, g_minus, g_plus, beta, boundary, dx, limiter)
    new = values - (h[..., 1:] - h[..., :-1])
    return new, h


def sweep(profile: CellProfile, faces: FaceField, disp: Displacements,
          limiter: lim.LimiterConfig = lim.LimiterConfig.none(),
          ) -> tuple[CellProfile, FluxVector]:
    """Finite-volume update of one pencil from precomputed face values."""
    disp.check_cfl()
    grid = profile.grid
    h = flux_from_faces(profile.values, faces.g_minus, faces.g_plus,
                        disp.beta, grid.boundary, grid.dx, limiter)
    new = profile.values - (h[..., 1:] - h[..., :-1])
    return CellProfile(grid, new), FluxVector(phi=h * grid.dx)


def advect_profile(profile: CellProfile, disp: Displacements, scheme: Scheme,
                   limiter: lim.LimiterConfig = lim.LimiterConfig.none(),
                   ) -> tuple[CellProfile, FluxVector]:
    """Reconstruct, limit and sweep one pencil in one call."""
    disp.check_cfl()
    grid = profile.grid
    new, h = sweep_batch(profile.values, disp.beta, grid.boundary, grid.dx,
                         scheme, limiter)
    return CellProfile(grid, new), FluxVector(phi=h * grid.dx)


# ---------------------------------------------------------------------------
# Primitive-function oracle: the original semi-Lagrangian update, used to
# check the flux form against an independent interpolation path.
# ---------------------------------------------------------------------------

# Cubic Lagrange interpolation of the primitive G at a foot x = x_m - beta*dx.
# Positive beta interpolates on faces (m-2 .. m+1), negative on (m-1 .. m+2);
# coefficients follow from the product form of the Lagrange basis.


def _lagrange_primitive_at_feet(g_ext: np.ndarray, m_idx: np.ndarray,
                                beta: np.ndarray) -> np.ndarray:
    """Evaluate the Lagrange cubic of the primitive at each face's foot.

    ``g_ext`` is the primitive at faces extended by two ghost faces on each
    side; ``m_idx`` maps each requested face to its position in g_ext.
    """
    gm2 = g_ext[m_idx - 2]
    gm1 = g_ext[m_idx - 1]
    g0 = g_ext[m_idx]
    gp1 = g_ext[m_idx + 1]
    gp2 = g_ext[m_idx + 2]
    b = beta
    b2 = b * b
    b3 = b2 * b
    pos = (b3 * (gm2 / 6 - gm1 / 2 + g0 / 2 - gp1 / 6)
           + b2 * (gm1 / 2 - g0 + gp1 / 2)
           + b * (-gm2 / 6 + gm1 - g0 / 2 - gp1 / 3)
           + g0)
    neg = (b3 * (gm1 / 6 - g0 / 2 + gp1 / 2 - gp2 / 6)
           + b2 * (gm1 / 2 - g0 + gp1 / 2)
           + b * (gm1 / 3 + g0 / 2 - gp1 + gp2 / 6)
           + g0)
    return np.where(b >= 0.0, pos, neg)


def primitive_update_oracle(profile: CellProfile, disp: Displacements,
                            scheme: Scheme) -> CellProfile:
    """Semi-Lagrangian update through the primitive function.

    Builds G at the faces by prefix sums, interpolates it at the
    characteristic feet (periodic/natural cubic spline for PSM, cubic
    Lagrange polynomials for LAG) and differences the result.  Feet outside
    a natural domain use a linear extension with the edge cell average,
    mirroring the sweep's inflow rule.
    """
    disp.check_cfl()
    grid = profile.grid
    v = profile.values
    n = grid.n_cells
    dx = grid.dx
    x_faces = grid.face_positions()
    g_faces = np.concatenate([[0.0], dx * np.cumsum(v)])
    feet = x_faces - disp.beta * dx

    if scheme is Scheme.PSM:
        if grid.boundary is Boundary.PERIODIC:
            total = g_faces[-1]
            ramp = (total / grid.length) * (x_faces - grid.x_min)
            tilde = g_faces - ramp
            tilde[-1] = tilde[0]  # exact periodicity despite cumsum round-off
            spline = CubicSpline(x_faces, tilde, bc_type="periodic")
            wrapped = grid.x_min + np.mod(feet - grid.x_min, grid.length)
            g_star = spline(wrapped) + (total / grid.length) * (feet - grid.x_min)
        else:
            spline = CubicSpline(x_faces, g_faces, bc_type="natural")
            g_star = spline(np.clip(feet, grid.x_min, grid.x_max))
            below = feet < grid.x_min
            above = feet > grid.x_max
            g_star = np.where(below, (feet - grid.x_min) * v[0], g_star)
            g_star = np.where(above, g_faces[-1] + (feet - grid.x_max) * v[-1],
                              g_star)
    else:
        if grid.boundary is Boundary.PERIODIC:
            total = g_faces[-1]
            g_ext = np.concatenate([g_faces[n - 2:n] - total, g_faces,
                                    g_faces[1:3] + total])
        else:
            g_ext = np.concatenate([
                [g_faces[0] - 2 * dx * v[0], g_faces[0] - dx * v[0]],
                g_faces,
                [g_faces[-1] + dx * v[-1], g_faces[-1] + 2 * dx * v[-1]],
            ])
        m_idx = np.arange(n + 1) + 2
        g_star = _lagrange_primitive_at_feet(g_ext, m_idx, disp.beta)

    new = (g_star[1:] - g_star[:-1]) / dx
    return CellProfile(grid, new)
