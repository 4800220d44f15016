"""Planar sampling geometries: the RIS cell lattice and the desk location grid.

Both are rectangular lattices spanned by two orthonormal axes from an origin
point. Points are enumerated row-major: index ``r * cols + c`` for the
lattice point ``origin + r*spacing*axis_u + c*spacing*axis_v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

AXIS_TOL = 1e-12


def as_point(p, name: str = "point") -> np.ndarray:
    """Return ``p`` as a finite float array of shape (3,)."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise ContractError(f"{name} must have 3 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite coordinates: {arr.tolist()}")
    return arr


def _check_axes(u: np.ndarray, v: np.ndarray) -> None:
    if abs(np.dot(u, u) - 1.0) > AXIS_TOL or abs(np.dot(v, v) - 1.0) > AXIS_TOL:
        raise ContractError("grid axes must be unit vectors")
    if abs(np.dot(u, v)) > AXIS_TOL:
        raise ContractError("grid axes must be orthogonal")


def _lattice(origin, axis_u, axis_v, n_u: int, n_v: int, spacing: float) -> np.ndarray:
    r, c = np.meshgrid(np.arange(n_u), np.arange(n_v), indexing="ij")
    r = r.reshape(-1, 1) * spacing
    c = c.reshape(-1, 1) * spacing
    return origin + r * axis_u + c * axis_v


@dataclass(frozen=True, eq=False)
class _Lattice:
    origin: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    spacing: float

    def _validate(self, n_u: int, n_v: int) -> None:
        object.__setattr__(self, "origin", as_point(self.origin, "origin"))
        object.__setattr__(self, "axis_u", as_point(self.axis_u, "axis_u"))
        object.__setattr__(self, "axis_v", as_point(self.axis_v, "axis_v"))
        object.__setattr__(self, "spacing", float(self.spacing))
        _check_axes(self.axis_u, self.axis_v)
        if int(n_u) != n_u or int(n_v) != n_v or n_u < 1 or n_v < 1:
            raise ContractError(f"grid dimensions must be positive integers, got {n_u}x{n_v}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ContractError(f"spacing must be > 0, got {self.spacing}")

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.axis_u, self.axis_v)


@dataclass(frozen=True, eq=False)
class RisGeometry(_Lattice):
    """Rectangular RIS of ``rows x cols`` cells with center-to-center ``spacing``."""

    rows: int = 1
    cols: int = 1

    def __post_init__(self):
        self._validate(self.rows, self.cols)
        object.__setattr__(self, "rows", int(self.rows))
        object.__setattr__(self, "cols", int(self.cols))

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def points(self) -> np.ndarray:
        return _lattice(self.origin, self.axis_u, self.axis_v, self.rows, self.cols, self.spacing)


@dataclass(frozen=True, eq=False)
class DeskGrid(_Lattice):
    """``nx x ny`` grid of predefined locations (also used as a field-map sampling plane)."""

    nx: int = 1
    ny: int = 1

    def __post_init__(self):
        self._validate(self.nx, self.ny)
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return self.nx, self.ny

    def points(self) -> np.ndarray:
        return _lattice(self.origin, self.axis_u, self.axis_v, self.nx, self.ny, self.spacing)

    def location(self, n: int) -> np.ndarray:
        """Position of the 1-based location index ``n``."""
        if not 1 <= n <= self.size:
            raise ContractError(f"location index {n} outside [1, {self.size}]")
        i, j = divmod(n - 1, self.ny)
        return self.origin + i * self.spacing * self.axis_u + j * self.spacing * self.axis_v

    def index_of(self, i: int, j: int) -> int:
        """1-based location index of grid cell ``(i, j)``."""
        return i * self.ny + j + 1

    def within_one_cell(self, i: int, j: int, point) -> bool:
        """True if ``point`` projects within one spacing of grid cell (i, j) along both axes."""
        p = as_point(point) - self.origin
        du = np.dot(p, self.axis_u) / self.spacing - i
        dv = np.dot(p, self.axis_v) / self.spacing - j
        return abs(du) <= 1 + 1e-9 and abs(dv) <= 1 + 1e-9


def cell_centers(geometry: RisGeometry) -> np.ndarray:
    """Centers of all RIS cells, shape (M, 3), row-major."""
    return geometry.points()
