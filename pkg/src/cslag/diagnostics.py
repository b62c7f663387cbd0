"""Conservation and quality diagnostics: mass, TV, L2, entropy, energies, Q.

Conventions (documented because two of them are deliberate quirks):

* The 1D total variation carries a 1/dx prefactor, matching the printed
  discrete formula it is compared against; pass
  ``include_dx_prefactor=False`` for the prefactor-free variant.
* ``l2`` is the *squared* norm (no square root), again as printed.
* The 4D ``mass`` uses the uniform coordinate-space measure
  dr dtheta dz dv.  That is the exact invariant of the split conservative
  sweeps (the model's conservative form carries no r Jacobian); the
  Jacobian-weighted L2/entropy/energy integrals keep the cylindrical
  measure r dr dtheta dz dv.

All reductions use numpy's pairwise summation in a fixed traversal order,
so repeated runs and pencil-order permutations agree to round-off.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import Boundary, Field4D

__all__ = [
    "DiagnosticsRecord",
    "DiagnosticsWriter",
    "CSV_COLUMNS",
    "mass_1d",
    "tv_norm_1d",
    "tv_norm_plane",
    "mass_4d",
    "l2_norm",
    "entropy",
    "energies",
    "quality_factor",
]

CSV_COLUMNS = ("step", "time", "mass", "l2", "entropy", "tv",
               "e_kin", "e_pot", "e_tot", "q_factor")


@dataclass
class DiagnosticsRecord:
    step: int
    time: float
    mass: float
    l2: float
    entropy: float
    tv: float
    e_kin: float
    e_pot: float
    e_tot: float
    q_factor: float

    def __post_init__(self) -> None:
        # e_tot is stored as the exact sum of its parts
        self.e_tot = self.e_kin + self.e_pot


class DiagnosticsWriter:
    """Appends one CSV row per diagnostic interval.

    Plain '.' decimals and newline endings; an infinite quality factor
    (tv = 0) is written as an empty cell.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", newline="\n") as fh:
            csv.writer(fh, lineterminator="\n").writerow(CSV_COLUMNS)

    def append(self, rec: DiagnosticsRecord) -> None:
        row = []
        for name in CSV_COLUMNS:
            val = getattr(rec, name)
            if name == "q_factor" and not math.isfinite(val):
                row.append("")
            elif name == "step":
                row.append(str(val))
            else:
                row.append(repr(float(val)))
        with open(self.path, "a", newline="\n") as fh:
            csv.writer(fh, lineterminator="\n").writerow(row)


# ---------------------------------------------------------------------------
# 1D and plane norms
# ---------------------------------------------------------------------------


def mass_1d(values: np.ndarray, dx: float) -> float:
    return dx * float(np.sum(values))


def tv_norm_1d(values: np.ndarray, dx: float, boundary: Boundary,
               include_dx_prefactor: bool = True) -> float:
    """Sum of absolute neighbour jumps, wrapped on periodic grids."""
    jumps = float(np.sum(np.abs(np.diff(values))))
    if boundary is Boundary.PERIODIC:
        jumps += abs(float(values[0]) - float(values[-1]))
    return jumps / dx if include_dx_prefactor else jumps


def tv_norm_plane(plane: np.ndarray, dr: float, dtheta: float) -> float:
    """Gradient-magnitude total variation of an (r, theta) plane.

    Forward differences; theta (second axis) wraps, the radial difference
    of the last row is zero (one-sided stop at the natural boundary).
    """
    diff_r = np.zeros_like(plane)
    diff_r[:-1, :] = (plane[1:, :] - plane[:-1, :]) / dr
    diff_t = (np.roll(plane, -1, axis=1) - plane) / dtheta
    return float(np.sum(np.hypot(diff_r, diff_t)))


# ---------------------------------------------------------------------------
# 4D reductions (cylindrical measure r dr dtheta dz dv unless noted)
# ---------------------------------------------------------------------------


def _cell_measures(fld: Field4D) -> tuple[np.ndarray, float]:
    g = fld.grid
    coord = g.cell_volume()
    r_weight = g.r.cell_centers()[:, None, None, None]
    return r_weight, coord


def mass_4d(fld: Field4D) -> float:
    """Coordinate-space integral of f (the invariant of the split sweeps)."""
    return fld.grid.cell_volume() * float(np.sum(fld.values))


def l2_norm(fld: Field4D) -> float:
    """Squared L2 norm with the cylindrical measure."""
    r_w, coord = _cell_measures(fld)
    return coord * float(np.sum(fld.values**2 * r_w))


def entropy(fld: Field4D, floor: float,
            return_floored_count: bool = False):
    """S = -sum f~ log f~ over the cylindrical measure, f~ = max(f, floor).

    The floor keeps the integrand defined where the scheme produced
    negative or zero values (the oscillations under study); the count of
    floored cells is available on request.
    """
    if not floor > 0.0:
        raise ValueError("entropy floor must be positive")
    clipped = np.maximum(fld.values, floor)
    r_w, coord = _cell_measures(fld)
    s = -coord * float(np.sum(clipped * np.log(clipped) * r_w))
    if return_floored_count:
        return s, int(np.count_nonzero(fld.values < floor))
    return s


def energies(fld: Field4D, f_eq: np.ndarray, phi: np.ndarray,
             n_i: np.ndarray, n0: np.ndarray, m_i: float = 1.0,
             e: float = 1.0) -> tuple[float, float, float]:
    """(kinetic, potential, total) energy of the perturbation.

    e_kin integrates (1/2) m v^2 (f - f_eq) over phase space, e_pot
    integrates (1/2) e Phi (n_i - n0) over configuration space.
    """
    g = fld.grid
    r_w, coord = _cell_measures(fld)
    v2 = g.v.cell_centers()[None, None, None, :] ** 2
    df = fld.values - f_eq[:, None, None, :]
    e_kin = 0.5 * m_i * coord * float(np.sum(v2 * df * r_w))
    spatial = g.r.dx * g.theta.dx * g.z.dx
    r_w3 = g.r.cell_centers()[:, None, None]
    dn = n_i - n0[:, None, None]
    e_pot = 0.5 * e * spatial * float(np.sum(phi * dn * r_w3))
    return e_kin, e_pot, e_kin + e_pot


def quality_factor(l2: float, tv: float) -> float:
    """Q = L2 / TV; +inf sentinel where TV vanishes (flat field)."""
    if tv < 0.0:
        raise ValueError("tv must be nonnegative")
    if tv == 0.0:
        return math.inf
    return l2 / tv
