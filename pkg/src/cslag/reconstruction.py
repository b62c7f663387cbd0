"""Face-value reconstructions: PSM cubic-spline continuity and explicit LAG.

Both reconstructions take cell averages and produce values at the faces that
anchor a per-cell parabola (see :class:`cslag.mesh.FaceField` for the
anchoring convention).  PSM enforces a continuous first derivative across
faces, which couples all faces through a tridiagonal (natural) or cyclic
tridiagonal (periodic) system; LAG is explicit and generally discontinuous.

Batched variants operate on ``(n_pencils, n_cells)`` matrices so that whole
field sweeps amortize the Python-level loop over the system dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .mesh import Boundary, CellProfile, FaceField

__all__ = [
    "ParabolaCoefficients",
    "parabola",
    "FactorKind",
    "TridiagonalFactorization",
    "factor_natural_lu",
    "factor_periodic_ldl",
    "psm_factorization",
    "psm_faces_batch",
    "psm_face_values",
    "lag_faces_batch",
    "lag_face_values",
]


@dataclass(frozen=True)
class ParabolaCoefficients:
    """Per-cell parabola P(z) = c + b z + a z^2 on z in [0, dx].

    P(0) equals the left-face anchor, P(dx) the right-face anchor, and the
    cell average of P equals gbar exactly (mass constraint).
    """

    a: float
    b: float
    c: float

    def __call__(self, z):
        return self.c + z * (self.b + z * self.a)


def parabola(g_minus_left: float, g_plus_right: float, gbar: float,
             dx: float) -> ParabolaCoefficients:
    """Parabola anchored at the cell's face values with the exact cell mean."""
    if not dx > 0:
        raise ValueError("dx must be positive")
    a = (3.0 * g_minus_left + 3.0 * g_plus_right - 6.0 * gbar) / dx**2
    b = (-4.0 * g_minus_left - 2.0 * g_plus_right + 6.0 * gbar) / dx
    return ParabolaCoefficients(a=a, b=b, c=g_minus_left)


# ---------------------------------------------------------------------------
# Tridiagonal factorizations for the PSM face-value systems
# ---------------------------------------------------------------------------


class FactorKind(Enum):
    NATURAL_LU = "natural_lu"
    PERIODIC_LDL = "periodic_ldl"


class TridiagonalFactorization:
    """Precomputed solver for one PSM face-value system.

    NATURAL_LU factors the tridiagonal matrix with rows
    ``[4 2 | 1 4 1 | ... | 1 4 1 | 2 4]`` (dimension n_cells + 1) as L U
    without pivoting (the matrix is strictly diagonally dominant).

    PERIODIC_LDL factors the symmetric cyclic matrix with diagonal 4,
    off-diagonals 1 and corner entries 1 (dimension n_cells) as L D L^T
    where L is unit lower bidiagonal plus a dense fill-in last row.

    ``solve`` accepts a 1D right-hand side (scalar fast path) or a 2D array
    of shape (n_rhs, dim) solved column-parallel.
    """

    def __init__(self, kind: FactorKind, dim: int):
        self.kind = kind
        self.dim = dim
        # natural: low/piv/sup are the Thomas multipliers, pivots and the
        # (constant after row 0) superdiagonal.  periodic: low/piv are the
        # bidiagonal multipliers and pivots, fill is the dense last row of L
        # (length dim-2 ending with the lm multiplier).
        self.low: np.ndarray
        self.piv: np.ndarray
        self.sup: np.ndarray | None = None
        self.fill: np.ndarray | None = None
        # list copies for the single-rhs fast path
        self._low_l: list[float] = []
        self._piv_l: list[float] = []
        self._sup_l: list[float] = []
        self._fill_l: list[float] = []

    def _finalize(self) -> None:
        self._low_l = self.low.tolist()
        self._piv_l = self.piv.tolist()
        if self.sup is not None:
            self._sup_l = self.sup.tolist()
        if self.fill is not None:
            self._fill_l = self.fill.tolist()

    # -- solves -------------------------------------------------------------

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[-1] != self.dim:
            raise ValueError(f"rhs length {rhs.shape[-1]} != system dim {self.dim}")
        single = rhs.ndim == 1
        if self.kind is FactorKind.NATURAL_LU:
            out = self._solve_natural_scalar(rhs.tolist()) if single \
                else self._solve_natural_batch(rhs)
        else:
            out = self._solve_periodic_scalar(rhs.tolist()) if single \
                else self._solve_periodic_batch(rhs)
        return np.asarray(out, dtype=float)

    def _solve_natural_scalar(self, b: list[float]) -> list[float]:
        m = self.dim
        low, piv, sup = self._low_l, self._piv_l, self._sup_l
        y = [0.0] * m
        y[0] = b[0]
        for i in range(1, m):
            y[i] = b[i] - low[i - 1] * y[i - 1]
        y[m - 1] /= piv[m - 1]
        for i in range(m - 2, -1, -1):
            y[i] = (y[i] - sup[i] * y[i + 1]) / piv[i]
        return y

    def _solve_natural_batch(self, b: np.ndarray) -> np.ndarray:
        m = self.dim
        low, piv, sup = self.low, self.piv, self.sup
        y = b.copy()
        for i in range(1, m):
            y[:, i] -= low[i - 1] * y[:, i - 1]
        y[:, m - 1] /= piv[m - 1]
        for i in range(m - 2, -1, -1):
            y[:, i] = (y[:, i] - sup[i] * y[:, i + 1]) / piv[i]
        return y

    def _solve_periodic_scalar(self, b: list[float]) -> list[float]:
        m = self.dim
        low, piv, fill = self._low_l, self._piv_l, self._fill_l
        lm = fill[-1]
        z = [0.0] * m
        z[0] = b[0]
        for i in range(1, m - 1):
            z[i] = b[i] - low[i - 1] * z[i - 1]
        acc = 0.0
        for k in range(m - 1):     # fill[-1] = lm multiplies z[m-2]
            acc += fill[k] * z[k]
        z[m - 1] = b[m - 1] - acc
        for i in range(m):
            z[i] /= piv[i]
        x = z
        x[m - 2] -= lm * x[m - 1]
        for i in range(m - 3, -1, -1):
            x[i] -= low[i] * x[i + 1] + fill[i] * x[m - 1]
        return x

    def _solve_periodic_batch(self, b: np.ndarray) -> np.ndarray:
        m = self.dim
        low, piv, fill = self.low, self.piv, self.fill
        z = b.copy()
        for i in range(1, m - 1):
            z[:, i] -= low[i - 1] * z[:, i - 1]
        z[:, m - 1] -= z[:, : m - 1] @ fill
        z /= piv
        z[:, m - 2] -= fill[-1] * z[:, m - 1]
        for i in range(m - 3, -1, -1):
            z[:, i] -= low[i] * z[:, i + 1] + fill[i] * z[:, m - 1]
        return z


def factor_natural_lu(sub: np.ndarray, diag: np.ndarray,
                      sup: np.ndarray) -> TridiagonalFactorization:
    """Thomas LU of a general tridiagonal matrix (no pivoting)."""
    diag = np.asarray(diag, dtype=float)
    sub = np.asarray(sub, dtype=float)
    sup = np.asarray(sup, dtype=float)
    m = diag.size
    if sub.size != m - 1 or sup.size != m - 1:
        raise ValueError("sub/sup must have length dim-1")
    piv = np.empty(m)
    low = np.empty(m - 1)
    piv[0] = diag[0]
    for i in range(1, m):
        if piv[i - 1] == 0.0:
            raise np.linalg.LinAlgError("singular tridiagonal factorization")
        low[i - 1] = sub[i - 1] / piv[i - 1]
        piv[i] = diag[i] - low[i - 1] * sup[i - 1]
    fac = TridiagonalFactorization(FactorKind.NATURAL_LU, m)
    fac.low, fac.piv, fac.sup = low, piv, sup.copy()
    fac._finalize()
    return fac


def factor_periodic_ldl(q: float, p: float, corner: float,
                        m: int) -> TridiagonalFactorization:
    """L D L^T of the symmetric cyclic tridiagonal [q on diag, p off, corner]."""
    if m < 4:
        raise ValueError("periodic factorization needs dimension >= 4")
    d = np.empty(m)
    low = np.empty(m - 2)          # low[i-1] multiplies row i-1 in row i, i=1..m-2
    fill = np.empty(m - 1)         # fill[0..m-3] = last-row fill, fill[-1] = lm
    d[0] = q
    w_prev = corner / d[0]
    fill[0] = w_prev
    for i in range(1, m - 1):
        low[i - 1] = p / d[i - 1]
        d[i] = q - p * low[i - 1]
        if i <= m - 3:
            w = -w_prev * p / d[i]
            fill[i] = w
            w_prev = w
    lm = (p - fill[m - 3] * d[m - 3] * low[m - 3]) / d[m - 2]
    fill[m - 2] = lm
    d[m - 1] = q - float(np.dot(fill[: m - 2] ** 2, d[: m - 2])) - lm * lm * d[m - 2]
    fac = TridiagonalFactorization(FactorKind.PERIODIC_LDL, m)
    fac.low, fac.piv, fac.fill = low, d, fill
    fac._finalize()
    return fac


@lru_cache(maxsize=None)
def psm_factorization(n_cells: int, boundary: Boundary) -> TridiagonalFactorization:
    """Cached factorization of the PSM system for one grid size and kind."""
    if boundary is Boundary.PERIODIC:
        return factor_periodic_ldl(4.0, 1.0, 1.0, n_cells)
    m = n_cells + 1
    diag = np.full(m, 4.0)
    sub = np.ones(m - 1)
    sup = np.ones(m - 1)
    sup[0] = 2.0
    sub[-1] = 2.0
    return factor_natural_lu(sub, diag, sup)


# ---------------------------------------------------------------------------
# PSM face values
# ---------------------------------------------------------------------------


def psm_rhs_batch(values: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Right-hand sides 3(gbar_{m-1} + gbar_m) with the boundary closures."""
    n = values.shape[-1]
    if boundary is Boundary.PERIODIC:
        return 3.0 * (np.roll(values, 1, axis=-1) + values)
    rhs = np.empty(values.shape[:-1] + (n + 1,))
    rhs[..., 0] = 6.0 * values[..., 0]
    rhs[..., 1:n] = 3.0 * (values[..., :-1] + values[..., 1:])
    rhs[..., n] = 6.0 * values[..., -1]
    return rhs


def psm_faces_batch(values: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Continuous PSM face values, shape (..., n_cells + 1).

    Periodic grids solve the cyclic system for the n_cells distinct faces and
    duplicate face 0 at the end; natural grids solve the full
    (n_cells + 1)-dimensional system including the 4,2 / 2,4 closure rows.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    fac = psm_factorization(n, boundary)
    rhs = psm_rhs_batch(values, boundary)
    sol = fac.solve(rhs)
    if boundary is Boundary.PERIODIC:
        return np.concatenate([sol, sol[..., :1]], axis=-1)
    return sol


def psm_face_values(profile: CellProfile) -> FaceField:
    """PSM face values of one pencil (g_plus == g_minus)."""
    faces = psm_faces_batch(profile.values, profile.grid.boundary)
    return FaceField(g_minus=faces, g_plus=faces.copy())


# ---------------------------------------------------------------------------
# LAG face values
# ---------------------------------------------------------------------------

# Cell k's anchors in terms of its neighbours:
#   left  anchor (at face k):    gbar_{k-1}/3 + 5 gbar_k/6 - gbar_{k+1}/6
#   right anchor (at face k+1): -gbar_{k-1}/6 + 5 gbar_k/6 + gbar_{k+1}/3
# Natural boundaries replicate the edge cell average into out-of-range slots.


def lag_faces_batch(values: np.ndarray,
                    boundary: Boundary) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if boundary is Boundary.PERIODIC:
        prev1 = np.roll(values, 1, axis=-1)
        next1 = np.roll(values, -1, axis=-1)
        gm = prev1 / 3.0 + 5.0 * values / 6.0 - next1 / 6.0
        gp = -np.roll(values, 2, axis=-1) / 6.0 + 5.0 * prev1 / 6.0 + values / 3.0
        g_minus = np.concatenate([gm, gm[..., :1]], axis=-1)
        g_plus = np.concatenate([gp, gp[..., :1]], axis=-1)
        return g_minus, g_plus
    faces = np.arange(n + 1)
    clamp = lambda idx: values[..., np.clip(idx, 0, n - 1)]
    g_minus = clamp(faces - 1) / 3.0 + 5.0 * clamp(faces) / 6.0 - clamp(faces + 1) / 6.0
    g_plus = -clamp(faces - 2) / 6.0 + 5.0 * clamp(faces - 1) / 6.0 + clamp(faces) / 3.0
    return g_minus, g_plus


def lag_face_values(profile: CellProfile) -> FaceField:
    """Explicit third-order Lagrange face values of one pencil."""
    if profile.grid.n_cells < 3:
        raise ValueError("LAG reconstruction needs at least 3 cells")
    g_minus, g_plus = lag_faces_batch(profile.values, profile.grid.boundary)
    return FaceField(g_minus=g_minus, g_plus=g_plus)
