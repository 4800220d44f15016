"""Exhaustive (beam, common phase) evaluation and the reader-feedback search protocol.

Beam indices are 1-based (they name desk locations), phase indices 0-based.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, PhaseGrid, compose_weights
from .errors import ContractError
from .metrics import ber_from_contrast, contrast_ref, contrast_ris, direct_sum
from .propagation import ChannelSet, Scenario, build_channel_set


@dataclass(frozen=True)
class TrialMsg:
    """Controller -> reader: 'the RIS now applies this (beam, phase) pair'."""

    trial_id: int
    beam_index: int
    phase_index: int

    def line(self) -> str:
        return f"trial,{self.trial_id},{self.beam_index},{self.phase_index}"


@dataclass(frozen=True)
class FeedbackMsg:
    """Reader -> controller: quantized contrast level measured for a trial."""

    trial_id: int
    level: int

    def line(self) -> str:
        return f"feedback,{self.trial_id},{self.level}"


@dataclass(frozen=True)
class Quantizer:
    """Uniform ``bits``-bit quantizer on ``[0, range_max]``; inputs are clipped."""

    bits: int
    range_max: float

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 1:
            raise ContractError(f"quantizer bits must be an integer >= 1, got {self.bits}")
        if not (math.isfinite(self.range_max) and self.range_max > 0):
            raise ContractError(f"quantizer range_max must be > 0, got {self.range_max}")

    @property
    def levels(self) -> int:
        return 2**self.bits

    def midpoint(self, level: int) -> float:
        return (level + 0.5) * self.range_max / self.levels


def quantize(q: Quantizer, contrast: float) -> int:
    x = min(max(contrast, 0.0), q.range_max)
    return min(int(math.floor(x / q.range_max * q.levels)), q.levels - 1)


def contrast_upper_bound(cs: ChannelSet, reflection: complex = 1.0) -> float:
    """An upper bound on the contrast over every possible set of RIS weights.

    By the triangle inequality the contrast never exceeds ``|g_on - g_off|``,
    which is at most ``|Gamma| |h_tr| (|h_st| + sum_m |h_s_ris[m]| |h_ris_t[m]|)``.
    """
    return abs(reflection) * abs(cs.h_tr) * (
        abs(cs.h_st) + float(np.sum(np.abs(cs.h_s_ris) * np.abs(cs.h_ris_t)))
    )


@dataclass(frozen=True, eq=False)
class SearchResult:
    contrast: np.ndarray  # (N, P)
    ber: np.ndarray  # (N, P)
    best_beam: int  # 1-based
    best_phase: int  # 0-based
    ref_contrast: float
    ref_ber: float
    sigma: float
    transcript: tuple = ()

    @property
    def best_contrast(self) -> float:
        return float(self.contrast[self.best_beam - 1, self.best_phase])

    @property
    def best_ber(self) -> float:
        return float(self.ber[self.best_beam - 1, self.best_phase])


def _contrast_rows(cs: ChannelSet, beams: np.ndarray, deltas: np.ndarray, reflection: complex):
    d = direct_sum(cs, reflection)
    rot = np.exp(1j * deltas)
    out = np.empty((beams.shape[0], deltas.size))
    fixed = cs.h_s_ris * cs.h_ris_r
    fixed_t = cs.h_s_ris * cs.h_ris_t
    for k, b in enumerate(beams):
        # per-row reductions keep results independent of how rows are chunked
        leak = np.sum(fixed * b)
        tag = reflection * np.sum(fixed_t * b) * cs.h_tr
        out[k] = np.abs(np.abs(d + (leak + tag) * rot) - np.abs(cs.h_sr + leak * rot))
    return out


def evaluate_channels(
    cs: ChannelSet,
    cb: Codebook,
    pg: PhaseGrid,
    sigma: float,
    reflection: complex = 1.0,
    workers: int = 1,
) -> SearchResult:
    """Contrast and BER for every (beam, phase) pair of a precomputed channel set."""
    if cb.num_cells != cs.num_cells:
        raise ContractError(
            f"codebook has {cb.num_cells} cells but the channel set has {cs.num_cells}"
        )
    deltas = pg.values
    n = cb.num_beams
    workers = max(1, min(int(workers), n))
    if workers == 1:
        contrast = _contrast_rows(cs, cb.beams, deltas, reflection)
    else:
        contrast = np.empty((n, deltas.size))
        bounds = np.linspace(0, n, workers + 1).astype(int)

        def run(lo, hi):
            contrast[lo:hi] = _contrast_rows(cs, cb.beams[lo:hi], deltas, reflection)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for f in [pool.submit(run, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]:
                f.result()
    flat = int(np.argmax(contrast))  # first maximizer in row-major order
    ref = contrast_ref(cs, reflection)
    return SearchResult(
        contrast=contrast,
        ber=ber_from_contrast(contrast, sigma),
        best_beam=flat // deltas.size + 1,
        best_phase=flat % deltas.size,
        ref_contrast=ref,
        ref_ber=ber_from_contrast(ref, sigma),
        sigma=sigma,
    )


def evaluate_grid(s: Scenario, cb: Codebook, pg: PhaseGrid, workers: int = 1) -> SearchResult:
    """Exhaustively evaluate all N x P (beam, phase) pairs of scenario ``s``."""
    return evaluate_channels(
        build_channel_set(s), cb, pg, s.noise_sigma, s.tag_reflection, workers=workers
    )


def feedback_search_channels(
    cs: ChannelSet,
    cb: Codebook,
    pg: PhaseGrid,
    q: Quantizer,
    budget: int,
    sigma: float,
    reflection: complex = 1.0,
) -> SearchResult:
    """Simulate the RIS controller / reader exchange on a channel set.

    Trials run beam-major, then phase. The reader measures the true contrast
    and answers with its quantized level; the controller keeps the first pair
    reaching the highest level. Untested pairs are NaN in the returned matrices;
    tested ones hold the midpoint of their reported level.
    """
    if cb.num_cells != cs.num_cells:
        raise ContractError(
            f"codebook has {cb.num_cells} cells but the channel set has {cs.num_cells}"
        )
    if budget < 1:
        raise ContractError(f"search budget must be >= 1, got {budget}")
    deltas = pg.values
    n_beams, n_phases = cb.num_beams, deltas.size
    levels = np.full((n_beams, n_phases), np.nan)
    transcript = []
    best, best_level = None, -1
    for trial_id in range(1, min(budget, n_beams * n_phases) + 1):
        n, p = divmod(trial_id - 1, n_phases)
        trial = TrialMsg(trial_id, n + 1, p)
        transcript.append(trial)
        # reader side
        measured = contrast_ris(cs, compose_weights(cb.beams[n], deltas[p]), reflection)
        reply = FeedbackMsg(trial.trial_id, quantize(q, measured))
        transcript.append(reply)
        # controller side
        if reply.trial_id != trial.trial_id:
            raise ContractError("feedback does not answer the pending trial")
        levels[n, p] = q.midpoint(reply.level)
        if reply.level > best_level:
            best, best_level = (n + 1, p), reply.level
    ref = contrast_ref(cs, reflection)
    return SearchResult(
        contrast=levels,
        ber=ber_from_contrast(levels, sigma),
        best_beam=best[0],
        best_phase=best[1],
        ref_contrast=ref,
        ref_ber=ber_from_contrast(ref, sigma),
        sigma=sigma,
        transcript=tuple(transcript),
    )


def feedback_search(
    s: Scenario, cb: Codebook, pg: PhaseGrid, q: Quantizer, budget: int
) -> SearchResult:
    return feedback_search_channels(
        build_channel_set(s), cb, pg, q, budget, s.noise_sigma, s.tag_reflection
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_result_csv(result: SearchResult, path) -> None:
    """Write ``beam_index,phase_index,contrast,ber,improvement`` rows plus a summary line.

    ``improvement`` is the sign of ``ref_ber - ber`` (+1 better than no RIS,
    -1 worse, 0 equal or untested). The summary is a final ``#``-prefixed line.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["beam_index", "phase_index", "contrast", "ber", "improvement"])
        n_beams, n_phases = result.contrast.shape
        for n in range(n_beams):
            for p in range(n_phases):
                c, b = result.contrast[n, p], result.ber[n, p]
                imp = 0 if np.isnan(b) else int(np.sign(result.ref_ber - b))
                w.writerow([n + 1, p, _fmt(c), _fmt(b), imp])
        fh.write(
            f"# summary best_beam={result.best_beam} best_phase={result.best_phase}"
            f" best_contrast={_fmt(result.best_contrast)} best_ber={_fmt(result.best_ber)}"
            f" ref_contrast={_fmt(result.ref_contrast)} ref_ber={_fmt(result.ref_ber)}"
            f" sigma={_fmt(result.sigma)}\n"
        )


def write_transcript(result: SearchResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for msg in result.transcript:
            fh.write(msg.line() + "\n")
