"""Uniform 1D/4D meshes, pencil extraction and snapshot I/O.

Index conventions (fixed throughout the package):

* A 1D grid of ``n_cells`` cells has cells ``i = 0 .. n_cells-1`` and
  ``n_faces = n_cells + 1`` faces ``m = 0 .. n_cells``.  Face ``m`` sits at
  ``x_min + m*dx``; cell ``i`` spans faces ``i`` and ``i+1`` and has its
  center at ``x_min + (i + 1/2)*dx``.  On a periodic grid face ``0`` and
  face ``n_cells`` are the same physical location and face arrays carry the
  value twice.
* 4D fields are stored C-ordered as ``values[r, theta, z, v]`` so the
  parallel-velocity axis varies fastest in memory, then z, theta, r.  This
  order is part of the snapshot format and must not change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator

import numpy as np

__all__ = [
    "Boundary",
    "Grid1D",
    "build_grid1d",
    "CellProfile",
    "FaceField",
    "Grid4D",
    "Field4D",
    "AXIS_NAMES",
    "axis_index",
    "extract_pencils",
    "pencil_matrix",
    "matrix_to_field",
    "write_snapshot",
    "read_snapshot",
]

AXIS_NAMES = ("r", "theta", "z", "v")

# Reconstruction stencils (PSM system rows, LAG 3-cell formulas with the
# 5-cell Umeda variant) need at least this many cells per swept direction.
MIN_CELLS = 4


class Boundary(Enum):
    PERIODIC = "periodic"
    NATURAL = "natural"

    @classmethod
    def parse(cls, text: str) -> "Boundary":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown boundary kind: {text!r}") from None


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell mesh on [x_min, x_max] with a boundary kind."""

    x_min: float
    x_max: float
    n_cells: int
    boundary: Boundary

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def n_faces(self) -> int:
        return self.n_cells + 1

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def cell_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def face_positions(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_faces) * self.dx


def build_grid1d(x_min: float, x_max: float, n_cells: int,
                 boundary: Boundary = Boundary.PERIODIC) -> Grid1D:
    """Validated Grid1D constructor."""
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        raise ValueError("grid bounds must be finite")
    if not x_max > x_min:
        raise ValueError(f"x_max={x_max} must exceed x_min={x_min}")
    if int(n_cells) != n_cells or n_cells < MIN_CELLS:
        raise ValueError(f"n_cells={n_cells}: at least {MIN_CELLS} cells required")
    if not isinstance(boundary, Boundary):
        boundary = Boundary.parse(str(boundary))
    return Grid1D(float(x_min), float(x_max), int(n_cells), boundary)


@dataclass
class CellProfile:
    """Cell-averaged values along one pencil of a grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_cells,):
            raise ValueError(
                f"profile length {self.values.shape} does not match "
                f"{self.grid.n_cells} cells")

    @property
    def mass(self) -> float:
        return self.grid.dx * float(np.sum(self.values))


@dataclass
class FaceField:
    """Reconstruction values at the faces of a 1D grid.

    ``g_minus[m]`` anchors the parabola of the cell *right* of face ``m`` at
    its left edge; ``g_plus[m]`` anchors the parabola of the cell *left* of
    face ``m`` at its right edge.  A continuous reconstruction (PSM) has
    ``g_minus == g_plus``; LAG produces genuinely two-sided values.
    """

    g_minus: np.ndarray
    g_plus: np.ndarray

    def __post_init__(self) -> None:
        self.g_minus = np.asarray(self.g_minus, dtype=float)
        self.g_plus = np.asarray(self.g_plus, dtype=float)
        if self.g_minus.shape != self.g_plus.shape:
            raise ValueError("g_minus and g_plus must have the same shape")

    @property
    def n_faces(self) -> int:
        return self.g_minus.shape[-1]

    def is_continuous(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.g_minus - self.g_plus) <= tol))


@dataclass(frozen=True)
class Grid4D:
    """Product mesh over (r, theta, z, v_parallel).

    Boundary kinds are fixed by the model: r natural, theta periodic,
    z periodic, v natural.  r_min must be positive (cylindrical Jacobian).
    """

    r: Grid1D
    theta: Grid1D
    z: Grid1D
    v: Grid1D

    def __post_init__(self) -> None:
        expected = (Boundary.NATURAL, Boundary.PERIODIC,
                    Boundary.PERIODIC, Boundary.NATURAL)
        for ax, want in zip(self.axes, expected):
            if ax.boundary is not want:
                raise ValueError(
                    f"axis boundaries must be (natural, periodic, periodic, "
                    f"natural); got {[a.boundary.value for a in self.axes]}")
        if self.r.x_min <= 0.0:
            raise ValueError("r_min must be positive")

    @property
    def axes(self) -> tuple[Grid1D, Grid1D, Grid1D, Grid1D]:
        return (self.r, self.theta, self.z, self.v)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(ax.n_cells for ax in self.axes)

    def cell_volume(self) -> float:
        """Uniform coordinate-space cell measure dr*dtheta*dz*dv."""
        return math.prod(ax.dx for ax in self.axes)


@dataclass
class Field4D:
    """Dense cell-average field on a Grid4D, stored as values[r, theta, z, v]."""

    grid: Grid4D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.grid.shape}")

    def copy(self) -> "Field4D":
        return Field4D(self.grid, self.values.copy())


def axis_index(axis: int | str) -> int:
    if isinstance(axis, str):
        try:
            return AXIS_NAMES.index(axis)
        except ValueError:
            raise ValueError(f"unknown axis {axis!r}; use one of {AXIS_NAMES}") from None
    if axis not in (0, 1, 2, 3):
        raise ValueError(f"axis index {axis} out of range")
    return int(axis)


def pencil_matrix(values: np.ndarray, axis: int) -> np.ndarray:
    """All pencils along ``axis`` as rows of a (n_pencils, n_cells) matrix.

    The row order is the C-order iteration of the remaining axes, which
    ``matrix_to_field`` inverts exactly.
    """
    moved = np.moveaxis(values, axis, -1)
    return np.ascontiguousarray(moved).reshape(-1, values.shape[axis])


def matrix_to_field(matrix: np.ndarray, shape: tuple[int, ...], axis: int) -> np.ndarray:
    """Inverse of pencil_matrix: rebuild the N-D array from pencil rows."""
    moved_shape = tuple(s for i, s in enumerate(shape) if i != axis) + (shape[axis],)
    return np.moveaxis(matrix.reshape(moved_shape), -1, axis)


def extract_pencils(fld: Field4D, axis: int | str) -> Iterator[tuple[CellProfile, tuple[int, ...]]]:
    """Yield every 1D line of the field along ``axis`` exactly once.

    The line index is the tuple of the remaining three axis indices in
    their original axis order.  Writing a returned profile's values back at
    that index reconstructs the field bit-exactly.
    """
    ax = axis_index(axis)
    grid = fld.grid.axes[ax]
    other_shape = tuple(s for i, s in enumerate(fld.values.shape) if i != ax)
    for flat in range(int(np.prod(other_shape))):
        idx = np.unravel_index(flat, other_shape)
        full: list[object] = list(idx)
        full.insert(ax, slice(None))
        yield CellProfile(grid, fld.values[tuple(full)].copy()), idx


# ---------------------------------------------------------------------------
# Snapshot format: raw little-endian float64 dump in storage order plus a
# plain-text sidecar header.  Works for any rank; the 4D scenario uses it for
# full fields, the 1D/2D scenarios for their lower-rank states.
# ---------------------------------------------------------------------------

_HEADER_SUFFIX = ".header.txt"
_DATA_SUFFIX = ".bin"


def write_snapshot(path_base: str | Path, values: np.ndarray,
                   grids: list[Grid1D] | tuple[Grid1D, ...],
                   axis_names: tuple[str, ...],
                   time: float, step: int) -> tuple[Path, Path]:
    """Dump cell averages as <base>.bin with a <base>.header.txt sidecar."""
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.shape != tuple(g.n_cells for g in grids):
        raise ValueError("values shape does not match grids")
    base = Path(path_base)
    data_path = base.with_name(base.name + _DATA_SUFFIX)
    header_path = base.with_name(base.name + _HEADER_SUFFIX)
    lines = [
        "format = cslag-snapshot-1",
        "dtype = little-endian float64",
        "order = C (last named axis fastest)",
        f"axes = {','.join(axis_names)}",
    ]
    for name, g in zip(axis_names, grids):
        lines.append(f"{name}.min = {g.x_min!r}")
        lines.append(f"{name}.max = {g.x_max!r}")
        lines.append(f"{name}.n_cells = {g.n_cells}")
        lines.append(f"{name}.boundary = {g.boundary.value}")
    lines.append(f"time = {time!r}")
    lines.append(f"step = {step}")
    header_path.write_text("\n".join(lines) + "\n")
    values.tofile(data_path)
    return data_path, header_path


def read_snapshot(path_base: str | Path) -> tuple[np.ndarray, list[Grid1D], float, int]:
    """Read back a snapshot written by write_snapshot."""
    base = Path(path_base)
    header_path = base.with_name(base.name + _HEADER_SUFFIX)
    data_path = base.with_name(base.name + _DATA_SUFFIX)
    entries: dict[str, str] = {}
    for line in header_path.read_text().splitlines():
        if "=" in line:
            key, _, val = line.partition("=")
            entries[key.strip()] = val.strip()
    names = entries["axes"].split(",")
    grids = [
        Grid1D(float(entries[f"{n}.min"]), float(entries[f"{n}.max"]),
               int(entries[f"{n}.n_cells"]), Boundary.parse(entries[f"{n}.boundary"]))
        for n in names
    ]
    shape = tuple(g.n_cells for g in grids)
    values = np.fromfile(data_path, dtype="<f8").reshape(shape)
    return values, grids, float(entries["time"]), int(entries["step"])
