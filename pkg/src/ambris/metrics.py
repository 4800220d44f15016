"""Energy-detector contrast and BER, closed-form common phase shifts, beam typing."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcinv

from .errors import DomainError
from .propagation import ChannelSet, cascade_tag, ris_terms, total_g

TWO_PI = 2.0 * np.pi
DEFAULT_HOT = 0.1
DEFAULT_DUAL = 0.25


def _wrap(angle: float) -> float:
    a = float(np.mod(angle, TWO_PI))
    return 0.0 if a >= TWO_PI else a


def _arg(z: complex, what: str) -> float:
    if z == 0:
        raise DomainError(f"undefined argument: {what} is zero")
    return float(np.angle(z))


def _mag(z) -> float:
    # one magnitude routine everywhere so scalar and grid paths agree bit for bit
    return float(np.abs(np.complex128(z)))


def direct_sum(cs: ChannelSet, reflection: complex = 1.0) -> complex:
    """Non-RIS part of the backscattering-state signal, ``h_sr + h_str``."""
    return cs.h_sr + cascade_tag(cs.h_st, cs.h_tr, reflection)


def contrast_ref(cs: ChannelSet, reflection: complex = 1.0) -> float:
    """Contrast without RIS: ``| |h_sr + h_str| - |h_sr| |``."""
    return abs(_mag(direct_sum(cs, reflection)) - _mag(cs.h_sr))


def contrast_ris(cs: ChannelSet, u, reflection: complex = 1.0) -> float:
    """Contrast ``| |g(gamma=1)| - |g(gamma=0)| |`` with RIS weights ``u``."""
    return abs(_mag(total_g(cs, u, 1, reflection)) - _mag(total_g(cs, u, 0, reflection)))


def ber_from_contrast(contrast, sigma: float):
    """Energy-detector bit error rate ``0.5 * erfc(contrast / sigma)``.

    Works elementwise on arrays.
    """
    if not sigma > 0:
        raise DomainError(f"noise sigma must be > 0, got {sigma}")
    if np.ndim(contrast):
        return 0.5 * erfc(np.asarray(contrast, dtype=float) / sigma)
    return float(0.5 * erfc(float(contrast) / sigma))


def sigma_for_ber(contrast: float, target_ber: float) -> float:
    """Noise level at which ``contrast`` yields exactly ``target_ber``."""
    if not 0 < target_ber < 0.5:
        raise DomainError(f"target BER must lie in (0, 0.5), got {target_ber}")
    if not contrast > 0:
        raise DomainError("cannot calibrate sigma against a zero contrast")
    return float(contrast / erfcinv(2.0 * target_ber))


@dataclass(frozen=True)
class LinkReport:
    g_abs_on: float
    g_abs_off: float
    contrast: float
    ber: float


def link_report(cs: ChannelSet, u, sigma: float, reflection: complex = 1.0) -> LinkReport:
    on = _mag(total_g(cs, u, 1, reflection))
    off = _mag(total_g(cs, u, 0, reflection))
    dg = abs(on - off)
    return LinkReport(on, off, dg, ber_from_contrast(dg, sigma))


def hotspot_delta(cs: ChannelSet, b, reflection: complex = 1.0) -> float:
    """Common phase shift aligning the RIS tag path with the direct two-path sum.

    Returns ``arg(h_sr + h_str) - arg(RIS tag path under b)`` in [0, 2*pi).
    Optimal when the RIS leakage to the reader vanishes and the tag interferes
    constructively; see :func:`coherent_delta` otherwise.
    """
    _, tag = ris_terms(cs, b, reflection)
    return _wrap(
        _arg(direct_sum(cs, reflection), "direct two-path sum") - _arg(tag, "RIS tag-path term")
    )


def coherent_delta(cs: ChannelSet, b, reflection: complex = 1.0) -> float:
    """Common phase shift putting the whole RIS-controlled sum in phase with the direct sum."""
    leak, tag = ris_terms(cs, b, reflection)
    return _wrap(
        _arg(direct_sum(cs, reflection), "direct two-path sum")
        - _arg(leak + tag, "RIS-controlled sum")
    )


def check_coherence(cs: ChannelSet, u, tol: float, reflection: complex = 1.0) -> bool:
    """True if the RIS-controlled sum under ``u`` is within ``tol`` rad of the direct sum's phase."""
    leak, tag = ris_terms(cs, u, reflection)
    diff = _arg(direct_sum(cs, reflection), "direct two-path sum") - _arg(
        leak + tag, "RIS-controlled sum"
    )
    diff = (diff + np.pi) % TWO_PI - np.pi
    return abs(diff) <= tol


class BeamType(enum.Enum):
    HOT_SPOT = "HotSpot"
    COHERENT_SPOT = "CoherentSpot"
    OTHER = "Other"


@dataclass(frozen=True)
class BeamClass:
    kind: BeamType
    leakage_ratio: float


def classify_beam(
    cs: ChannelSet,
    b,
    eps_hot: float = DEFAULT_HOT,
    eps_dual: float = DEFAULT_DUAL,
    reflection: complex = 1.0,
) -> BeamClass:
    """Sort a beam into hot-spot, coherent-spot or other.

    The leakage ratio is ``|leakage| / |RIS tag path|`` and does not depend on
    the common phase shift. Hot spot is tested first.
    """
    leak, tag = ris_terms(cs, b, reflection)
    a_leak, a_tag = abs(leak), abs(tag)
    if a_tag == 0:
        raise DomainError("undefined leakage ratio: RIS tag-path term is zero")
    ratio = a_leak / a_tag
    if ratio <= eps_hot:
        kind = BeamType.HOT_SPOT
    elif min(a_leak, a_tag) > eps_dual * max(a_leak, a_tag):
        kind = BeamType.COHERENT_SPOT
    else:
        kind = BeamType.OTHER
    return BeamClass(kind, ratio)
