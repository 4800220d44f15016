"""Line-of-sight channel coefficients and the four-path received signal.

Every single-hop coefficient is ``h = a(d) * exp(+j*2*pi*d/lam)``. The positive
phase sign is deliberate: the focusing codebook uses ``exp(-j*...)`` to cancel
it, so both must change together.

The received baseband coefficient at the reader is

    g = h_sr + gamma*Gamma*h_st*h_tr
        + sum_m h_s_ris[m] u[m] h_ris_r[m]
        + gamma*Gamma*(sum_m h_s_ris[m] u[m] h_ris_t[m]) * h_tr

with ``gamma`` in {0, 1} the tag state and ``Gamma`` the tag reflection
coefficient (1 for an ideal tag).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError, DomainError
from .geometry import DeskGrid, RisGeometry, as_point, cell_centers

SPEED_OF_LIGHT = 299_792_458.0
COINCIDENCE_TOL = 1e-12


class AmplitudeLaw(enum.Enum):
    """Amplitude as a function of distance for a single LOS hop."""

    FREE_SPACE = "free_space"  # a(d) = lam / (4 pi d)
    UNIT = "unit"  # a(d) = 1

    def amplitude(self, d, wavelength: float):
        d = np.asarray(d, dtype=float)
        if self is AmplitudeLaw.UNIT:
            return np.ones_like(d)
        if np.any(d <= COINCIDENCE_TOL):
            raise DomainError("singular distance: coincident points under the free-space law")
        return wavelength / (4.0 * np.pi * d)


def distance(a, b) -> np.ndarray:
    """Euclidean distance along the last axis (broadcasts)."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def path_channels(a, b, wavelength: float, law: AmplitudeLaw = AmplitudeLaw.FREE_SPACE) -> np.ndarray:
    """Vectorized :func:`path_channel` over broadcastable point arrays."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    d = distance(a, b)
    return law.amplitude(d, wavelength) * np.exp(1j * (2.0 * np.pi * d / wavelength))


def path_channel(a, b, wavelength: float, law: AmplitudeLaw = AmplitudeLaw.FREE_SPACE) -> complex:
    """Complex LOS coefficient between points ``a`` and ``b``.

    Parameters
    ----------
    a, b : array_like, shape (3,)
        End points in meters.
    wavelength : float
        Carrier wavelength in meters.
    law : AmplitudeLaw
        Amplitude model.

    Returns
    -------
    complex
        ``a(d) * exp(j * 2 pi d / wavelength)`` with ``d = |a - b|``.

    Raises
    ------
    DomainError
        If the points coincide under the free-space law.
    """
    return complex(path_channels(as_point(a, "a"), as_point(b, "b"), wavelength, law))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete simulation geometry and link parameters."""

    source_pos: np.ndarray
    tag_pos: np.ndarray
    reader_pos: np.ndarray
    wavelength: float
    ris: RisGeometry
    desk: DeskGrid
    noise_sigma: float = 1.0
    amplitude_law: AmplitudeLaw = AmplitudeLaw.FREE_SPACE
    tag_reflection: complex = 1.0 + 0.0j

    def __post_init__(self):
        for name in ("source_pos", "tag_pos", "reader_pos"):
            object.__setattr__(self, name, as_point(getattr(self, name), name))
        object.__setattr__(self, "wavelength", float(self.wavelength))
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))
        object.__setattr__(self, "tag_reflection", complex(self.tag_reflection))
        if not (np.isfinite(self.wavelength) and self.wavelength > 0):
            raise DomainError(f"wavelength must be > 0, got {self.wavelength}")
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma > 0):
            raise DomainError(f"noise_sigma must be > 0, got {self.noise_sigma}")
        if abs(self.tag_reflection) > 1.0 + 1e-12:
            raise DomainError(f"|tag_reflection| must be <= 1, got {abs(self.tag_reflection)}")
        named = {"source": self.source_pos, "tag": self.tag_pos, "reader": self.reader_pos}
        keys = list(named)
        for i, ka in enumerate(keys):
            for kb in keys[i + 1:]:
                if distance(named[ka], named[kb]) <= COINCIDENCE_TOL:
                    raise DomainError(f"{ka} and {kb} positions coincide")
        cells = cell_centers(self.ris)
        for k, p in named.items():
            if np.any(distance(cells, p) <= COINCIDENCE_TOL):
                raise DomainError(f"{k} position coincides with an RIS cell")

    @property
    def num_cells(self) -> int:
        return self.ris.size

    @property
    def num_locations(self) -> int:
        return self.desk.size

    def with_sigma(self, sigma: float) -> "Scenario":
        return replace(self, noise_sigma=sigma)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """All single-hop coefficients of one scenario.

    Scalars: ``h_sr``, ``h_st``, ``h_tr``. Length-M vectors: ``h_s_ris`` (source
    to each cell), ``h_ris_r`` (each cell to reader), ``h_ris_t`` (each cell to tag).
    """

    h_sr: complex
    h_st: complex
    h_tr: complex
    h_s_ris: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))
    h_ris_r: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))
    h_ris_t: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))

    def __post_init__(self):
        for name in ("h_sr", "h_st", "h_tr"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        vecs = []
        for name in ("h_s_ris", "h_ris_r", "h_ris_t"):
            v = np.atleast_1d(np.asarray(getattr(self, name), dtype=complex))
            if v.ndim != 1:
                raise ContractError(f"{name} must be a vector")
            object.__setattr__(self, name, v)
            vecs.append(v)
        if len({v.size for v in vecs}) != 1 or vecs[0].size < 1:
            raise ContractError("RIS channel vectors must share a length M >= 1")

    @property
    def num_cells(self) -> int:
        return self.h_s_ris.size


def build_channel_set(s: Scenario) -> ChannelSet:
    """Compute every single-hop coefficient of scenario ``s``."""
    cells = cell_centers(s.ris)
    lam, law = s.wavelength, s.amplitude_law
    return ChannelSet(
        h_sr=path_channel(s.source_pos, s.reader_pos, lam, law),
        h_st=path_channel(s.source_pos, s.tag_pos, lam, law),
        h_tr=path_channel(s.tag_pos, s.reader_pos, lam, law),
        h_s_ris=path_channels(s.source_pos, cells, lam, law),
        h_ris_r=path_channels(cells, s.reader_pos, lam, law),
        h_ris_t=path_channels(cells, s.tag_pos, lam, law),
    )


def cascade_tag(h_st: complex, h_tr: complex, reflection: complex = 1.0) -> complex:
    """Source-tag-reader coefficient ``Gamma * h_st * h_tr``."""
    return complex(reflection) * complex(h_st) * complex(h_tr)


def ris_cascade(h_in, u, h_out) -> complex:
    """``sum_m h_in[m] * u[m] * h_out[m]`` (the diagonal RIS matrix stored as a vector)."""
    h_in, u, h_out = (np.atleast_1d(np.asarray(x, dtype=complex)) for x in (h_in, u, h_out))
    if not (h_in.shape == u.shape == h_out.shape) or h_in.ndim != 1:
        raise ContractError(
            f"RIS cascade length mismatch: {h_in.shape}, {u.shape}, {h_out.shape}"
        )
    return complex(np.sum(h_in * u * h_out))


def ris_terms(cs: ChannelSet, u, reflection: complex = 1.0) -> tuple[complex, complex]:
    """RIS-controlled terms ``(leakage, tag_path)`` for weights ``u``.

    ``leakage`` is the RIS-reflected path reaching the reader directly and
    ``tag_path`` the RIS-reflected path modulated by the tag (including ``Gamma``
    and ``h_tr``). Passing ``u=None`` means no RIS: both terms are zero.
    """
    if u is None:
        return 0j, 0j
    leak = ris_cascade(cs.h_s_ris, u, cs.h_ris_r)
    tag = complex(reflection) * ris_cascade(cs.h_s_ris, u, cs.h_ris_t) * cs.h_tr
    return leak, tag


def total_g(cs: ChannelSet, u, gamma: int, reflection: complex = 1.0) -> complex:
    """Received coefficient for tag state ``gamma`` (0 transparent, 1 backscattering).

    ``u=None`` models the configuration without an RIS.
    """
    if gamma not in (0, 1):
        raise ContractError(f"tag state must be 0 or 1, got {gamma}")
    leak, tag = ris_terms(cs, u, reflection)
    return cs.h_sr + gamma * cascade_tag(cs.h_st, cs.h_tr, reflection) + leak + gamma * tag
