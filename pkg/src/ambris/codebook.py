"""Near-field focusing codebook, common phase-shift grid and weight composition."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .geometry import cell_centers
from .propagation import COINCIDENCE_TOL, Scenario, distance

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class Codebook:
    """N focusing beams, one row of M unit-modulus coefficients per desk location.

    ``beams[n - 1]`` targets the 1-based desk location ``n``.
    """

    beams: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.beams, dtype=complex)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ContractError(f"codebook must be a nonempty (N, M) array, got shape {b.shape}")
        if np.max(np.abs(np.abs(b) - 1.0)) > 1e-12:
            raise ContractError("codebook entries must have unit modulus")
        object.__setattr__(self, "beams", b)

    @property
    def num_beams(self) -> int:
        return self.beams.shape[0]

    @property
    def num_cells(self) -> int:
        return self.beams.shape[1]

    def beam(self, n: int) -> np.ndarray:
        """Beam vector for the 1-based index ``n``."""
        if not 1 <= n <= self.num_beams:
            raise ContractError(f"beam index {n} outside [1, {self.num_beams}]")
        return self.beams[n - 1]


@dataclass(frozen=True)
class PhaseGrid:
    """``P`` equispaced common phase shifts ``2*pi*p/P``, p = 0..P-1."""

    P: int

    def __post_init__(self):
        if int(self.P) != self.P or self.P < 1:
            raise ContractError(f"phase grid size must be a positive integer, got {self.P}")

    @property
    def values(self) -> np.ndarray:
        return TWO_PI * np.arange(self.P) / self.P

    def __len__(self) -> int:
        return self.P


def phase_grid(P: int) -> PhaseGrid:
    return PhaseGrid(P)


def focusing_beams(source, cells, targets, wavelength: float) -> np.ndarray:
    """Spherical-wave focusing coefficients, shape (len(targets), len(cells)).

    ``b[n, m] = exp(-j*2*pi*(|source - cell_m| + |cell_m - target_n|) / wavelength)``
    """
    cells = np.asarray(cells, dtype=float)
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    d_in = distance(source, cells)
    d_out = distance(cells[None, :, :], targets[:, None, :])
    if np.any(d_in <= COINCIDENCE_TOL) or np.any(d_out <= COINCIDENCE_TOL):
        raise DomainError("source or a focusing target coincides with an RIS cell")
    return np.exp(-1j * (TWO_PI * (d_in[None, :] + d_out) / wavelength))


def quantize_phases(beams: np.ndarray, bits: int) -> np.ndarray:
    """Round each coefficient's phase to the nearest of ``2**bits`` uniform levels."""
    if bits < 1:
        raise ContractError(f"phase quantizer needs bits >= 1, got {bits}")
    step = TWO_PI / 2**bits
    k = np.round(np.mod(np.angle(beams), TWO_PI) / step)
    return np.exp(1j * (k * step))


def build_codebook(s: Scenario, phase_bits: int | None = None) -> Codebook:
    """One focusing beam per desk location of ``s``, in row-major location order.

    ``phase_bits`` optionally quantizes the cell phases (continuous by default).
    """
    beams = focusing_beams(s.source_pos, cell_centers(s.ris), s.desk.points(), s.wavelength)
    if phase_bits is not None:
        beams = quantize_phases(beams, phase_bits)
    return Codebook(beams)


def compose_weights(b, delta: float) -> np.ndarray:
    """Reflection weights ``u = b * exp(j*delta)``."""
    return np.asarray(b, dtype=complex) * np.exp(1j * delta)


def write_codebook_csv(cb: Codebook, path) -> None:
    """Export as ``beam_index,cell_index,phase_rad`` (1-based beams, 0-based cells)."""
    phases = np.mod(np.angle(cb.beams), TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative angles
    phases[phases >= TWO_PI] = 0.0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["beam_index", "cell_index", "phase_rad"])
        for n in range(cb.num_beams):
            for m in range(cb.num_cells):
                w.writerow([n + 1, m, f"{phases[n, m]:.12g}"])


def read_codebook_csv(path) -> Codebook:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    n_beams = max(int(r["beam_index"]) for r in rows)
    n_cells = max(int(r["cell_index"]) for r in rows) + 1
    phases = np.zeros((n_beams, n_cells))
    for r in rows:
        phases[int(r["beam_index"]) - 1, int(r["cell_index"])] = float(r["phase_rad"])
    return Codebook(np.exp(1j * phases))
