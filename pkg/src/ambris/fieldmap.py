"""dB maps of the RIS-reflected field over a planar sampling grid."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .geometry import DeskGrid, cell_centers
from .propagation import Scenario, path_channels

DEFAULT_FLOOR_DB = -120.0


@dataclass(frozen=True, eq=False)
class FieldMap:
    grid: DeskGrid
    values: np.ndarray  # (nx, ny) in dB
    floor_db: float = DEFAULT_FLOOR_DB

    def value_at(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def nearest(self, point) -> tuple[int, int]:
        """Grid indices of the sample closest to ``point`` (clamped to the grid)."""
        p = np.asarray(point, dtype=float) - self.grid.origin
        i = int(np.clip(np.rint(np.dot(p, self.grid.axis_u) / self.grid.spacing), 0, self.grid.nx - 1))
        j = int(np.clip(np.rint(np.dot(p, self.grid.axis_v) / self.grid.spacing), 0, self.grid.ny - 1))
        return i, j


def to_db(magnitude, floor_db: float = DEFAULT_FLOOR_DB) -> np.ndarray:
    return 20.0 * np.log10(np.maximum(np.abs(magnitude), 10.0 ** (floor_db / 20.0)))


def reflected_field(s: Scenario, u, points, include_direct: bool = False) -> np.ndarray:
    """Complex RIS-reflected field ``sum_m h_s_ris[m] u[m] h(cell_m, x)`` at each point."""
    cells = cell_centers(s.ris)
    u = np.asarray(u, dtype=complex)
    if u.shape != (cells.shape[0],):
        raise ContractError(f"weights have shape {u.shape}, expected ({cells.shape[0]},)")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lam, law = s.wavelength, s.amplitude_law
    incident = path_channels(s.source_pos, cells, lam, law) * u
    out = np.empty(points.shape[0], dtype=complex)
    for k, x in enumerate(points):
        out[k] = np.sum(incident * path_channels(cells, x, lam, law))
    if include_direct:
        out = out + path_channels(s.source_pos, points, lam, law)
    return out


def reflected_field_map(
    s: Scenario,
    u,
    grid: DeskGrid | None = None,
    floor_db: float = DEFAULT_FLOOR_DB,
    include_direct: bool = False,
    workers: int = 1,
) -> FieldMap:
    """Map of ``|RIS-reflected field|`` in dB over ``grid`` (the desk grid by default).

    Rows of the map may be computed on ``workers`` threads; each sample's
    value does not depend on the partition.
    """
    grid = s.desk if grid is None else grid
    pts = grid.points().reshape(grid.nx, grid.ny, 3)

    def row(i):
        return reflected_field(s, u, pts[i], include_direct)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(grid.nx)))
    else:
        rows = [row(i) for i in range(grid.nx)]
    return FieldMap(grid, to_db(np.array(rows), floor_db), float(floor_db))


def map_peak(fm: FieldMap) -> tuple[int, int, float]:
    """Location and value of the map maximum; ties go to the first in row-major order."""
    if fm.values.size == 0:
        raise ContractError("empty field map")
    i, j = np.unravel_index(int(np.argmax(fm.values)), fm.values.shape)
    return int(i), int(j), float(fm.values[i, j])


def write_fieldmap_csv(fm: FieldMap, path) -> None:
    pts = fm.grid.points().reshape(fm.grid.nx, fm.grid.ny, 3)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "x", "y", "z", "db"])
        for i in range(fm.grid.nx):
            for j in range(fm.grid.ny):
                x, y, z = pts[i, j]
                w.writerow([i, j] + [f"{v:.12g}" for v in (x, y, z, fm.values[i, j])])


def pgm_samples(fm: FieldMap) -> np.ndarray:
    """16-bit samples mapping [floor_db, max] affinely onto [0, 65535]."""
    top = float(np.max(fm.values))
    span = top - fm.floor_db
    if span <= 0:
        return np.zeros(fm.values.shape, dtype=np.uint16)
    scaled = np.rint((fm.values - fm.floor_db) / span * 65535.0)
    return np.clip(scaled, 0, 65535).astype(np.uint16)


def write_fieldmap_pgm(fm: FieldMap, path, sidecar=None) -> None:
    """Binary 16-bit PGM (P5, big-endian); image rows are grid index ``i``.

    A sidecar text file records the dB values of black and white.
    """
    samples = pgm_samples(fm)
    h, w = samples.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(samples.astype(">u2").tobytes())
    if sidecar is not None:
        with open(sidecar, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"min_db={fm.floor_db:.12g}\nmax_db={float(np.max(fm.values)):.12g}\n")
            fh.write("mapping=sample = round((db - min_db) / (max_db - min_db) * 65535)\n")
            fh.write(f"width={w}\nheight={h}\nrows=i\ncolumns=j\n")


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise ContractError("not a binary PGM file")
    w, h, maxval = (int(t) for t in tokens[1:])
    dtype = ">u2" if maxval > 255 else "u1"
    # exactly one whitespace byte separates the header from the samples
    return np.frombuffer(data[pos + 1:], dtype=dtype).reshape(h, w)
