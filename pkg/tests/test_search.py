import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambris.codebook import Codebook, build_codebook, phase_grid
from ambris.errors import ContractError
from ambris.metrics import ber_from_contrast, contrast_ris
from ambris.propagation import ChannelSet, build_channel_set
from ambris.search import (
    FeedbackMsg,
    Quantizer,
    TrialMsg,
    contrast_upper_bound,
    evaluate_channels,
    evaluate_grid,
    feedback_search,
    quantize,
    write_result_csv,
)
from ambris.codebook import compose_weights

from conftest import brute_contrast, toy_scenario


def test_quantize_examples():
    assert quantize(Quantizer(1, 1.0), 0.7) == 1
    assert quantize(Quantizer(2, 1.0), 0.26) == 1
    assert quantize(Quantizer(3, 2.0), 2.0) == 7
    assert quantize(Quantizer(3, 2.0), 5.0) == 7
    assert quantize(Quantizer(3, 2.0), 0.0) == 0


@given(st.integers(1, 16), st.floats(1e-3, 10), st.floats(0, 20), st.floats(0, 20))
def test_quantize_monotone(bits, rmax, a, b):
    q = Quantizer(bits, rmax)
    lo, hi = sorted((a, b))
    assert 0 <= quantize(q, lo) <= quantize(q, hi) <= q.levels - 1


def test_quantizer_validation():
    with pytest.raises(ContractError):
        Quantizer(0, 1.0)
    with pytest.raises(ContractError):
        Quantizer(4, 0.0)


def test_degenerate_ris_single_pair_equals_reference():
    cs = ChannelSet(0.3 + 0.4j, 0.2, 0.5j)
    r = evaluate_channels(cs, Codebook(np.ones((1, 1))), phase_grid(1), sigma=0.1)
    assert r.contrast.shape == (1, 1)
    assert r.contrast[0, 0] == r.ref_contrast
    assert r.ber[0, 0] == r.ref_ber
    assert (r.best_beam, r.best_phase) == (1, 0)


def test_ties_resolve_to_first_pair():
    cs = ChannelSet(1.0, 0.2, 0.5)
    r = evaluate_channels(cs, Codebook(np.ones((3, 1))), phase_grid(4), sigma=0.1)
    assert np.all(r.contrast == r.ref_contrast)
    assert (r.best_beam, r.best_phase) == (1, 0)


def test_toy_matrix_against_nested_loops():
    s = toy_scenario()
    s1 = type(s)(s.source_pos, s.tag_pos, s.reader_pos, s.wavelength, s.ris,
                 type(s.desk)(origin=s.desk.origin, axis_u=s.desk.axis_u, axis_v=s.desk.axis_v,
                              spacing=s.desk.spacing, nx=1, ny=1), s.noise_sigma)
    r = evaluate_grid(s1, build_codebook(s1), phase_grid(2))
    oracle = brute_contrast(s1, s1.ris.points(), s1.desk.points(), [0.0, np.pi])
    np.testing.assert_allclose(r.contrast, oracle, rtol=0, atol=1e-12)
    np.testing.assert_allclose(r.ber, ber_from_contrast(oracle, s1.noise_sigma), atol=1e-12)


def test_argmax_dominates(default_cfg):
    s = default_cfg.scenario
    r = evaluate_grid(s, build_codebook(s), phase_grid(default_cfg.phases))
    assert r.best_contrast == r.contrast.max()
    n, p = np.unravel_index(np.argmax(r.contrast), r.contrast.shape)
    assert (r.best_beam, r.best_phase) == (n + 1, p)


def test_grid_agrees_with_per_pair_contrast(default_cfg):
    s = default_cfg.scenario
    cs = build_channel_set(s)
    cb = build_codebook(s)
    pg = phase_grid(default_cfg.phases)
    r = evaluate_grid(s, cb, pg)
    for n, p in [(0, 0), (18, 5), (63, 15), (30, 7)]:
        u = compose_weights(cb.beams[n], pg.values[p])
        assert r.contrast[n, p] == pytest.approx(contrast_ris(cs, u), rel=1e-10, abs=1e-16)


def test_dimension_mismatch(default_cfg):
    s = default_cfg.scenario
    with pytest.raises(ContractError):
        evaluate_grid(s, Codebook(np.ones((2, 3))), phase_grid(4))


@pytest.mark.parametrize("workers", [2, 3, 8, 64])
def test_worker_count_does_not_change_bits(default_cfg, workers):
    s = default_cfg.scenario
    cb, pg = build_codebook(s), phase_grid(16)
    a = evaluate_grid(s, cb, pg, workers=1)
    b = evaluate_grid(s, cb, pg, workers=workers)
    assert a.contrast.tobytes() == b.contrast.tobytes()
    assert (a.best_beam, a.best_phase) == (b.best_beam, b.best_phase)


def test_default_scenario_improves_and_degrades(default_cfg):
    s = default_cfg.scenario
    r = evaluate_grid(s, build_codebook(s), phase_grid(16))
    assert np.any(r.contrast > r.ref_contrast)
    assert np.any(r.contrast < r.ref_contrast)


# ---- feedback protocol ---------------------------------------------------------

def _toy_n1_p2():
    s = toy_scenario()
    desk = type(s.desk)(origin=s.desk.origin, axis_u=s.desk.axis_u, axis_v=s.desk.axis_v,
                        spacing=s.desk.spacing, nx=1, ny=1)
    s = type(s)(s.source_pos, s.tag_pos, s.reader_pos, s.wavelength, s.ris, desk, s.noise_sigma)
    truth = brute_contrast(s, s.ris.points(), s.desk.points(), [0.0, np.pi])[0]
    return s, truth


def test_feedback_faithful_quantizer_matches_exhaustive():
    s = toy_scenario()
    cb, pg = build_codebook(s), phase_grid(4)
    exact = evaluate_grid(s, cb, pg)
    q = Quantizer(16, contrast_upper_bound(build_channel_set(s)))
    levels = {quantize(q, x) for x in exact.contrast.ravel()}
    assert len(levels) == exact.contrast.size  # injective on this instance
    r = feedback_search(s, cb, pg, q, budget=8)
    assert (r.best_beam, r.best_phase) == (exact.best_beam, exact.best_phase)


@pytest.mark.parametrize("scale", [1.1, 1.5, 1.9, 2.5])
def test_feedback_one_bit_hand_trace(scale):
    s, truth = _toy_n1_p2()
    rmax = scale * truth.max()
    r = feedback_search(s, build_codebook(s), phase_grid(2), Quantizer(1, rmax), budget=2)
    above = [p for p in range(2) if truth[p] >= rmax / 2]
    expected = above[0] if above else 0
    assert (r.best_beam, r.best_phase) == (1, expected)


def test_feedback_budget_one():
    s = toy_scenario()
    r = feedback_search(s, build_codebook(s), phase_grid(4), Quantizer(4, 1.0), budget=1)
    assert (r.best_beam, r.best_phase) == (1, 0)
    assert r.transcript == (TrialMsg(1, 1, 0), FeedbackMsg(1, r.transcript[1].level))
    assert np.isnan(r.contrast).sum() == r.contrast.size - 1


def test_feedback_transcript_order_and_midpoints():
    s = toy_scenario()
    q = Quantizer(6, contrast_upper_bound(build_channel_set(s)))
    r = feedback_search(s, build_codebook(s), phase_grid(4), q, budget=100)
    trials = r.transcript[0::2]
    replies = r.transcript[1::2]
    assert len(trials) == 8
    assert [t.trial_id for t in trials] == list(range(1, 9))
    assert [(t.beam_index, t.phase_index) for t in trials] == [(n, p) for n in (1, 2) for p in range(4)]
    assert all(f.trial_id == t.trial_id for t, f in zip(trials, replies))
    for t, f in zip(trials, replies):
        assert r.contrast[t.beam_index - 1, t.phase_index] == q.midpoint(f.level)


@pytest.mark.parametrize("bits", [1, 2, 3, 5])
def test_feedback_returned_pair_beats_lower_levels(default_cfg, bits):
    s = default_cfg.scenario
    cs = build_channel_set(s)
    cb, pg = build_codebook(s), phase_grid(8)
    truth = evaluate_grid(s, cb, pg).contrast
    q = Quantizer(bits, contrast_upper_bound(cs))
    r = feedback_search(s, cb, pg, q, budget=cb.num_beams * 8)
    best_true = truth[r.best_beam - 1, r.best_phase]
    best_level = quantize(q, best_true)
    lower = [truth[n, p] for n in range(truth.shape[0]) for p in range(8)
             if quantize(q, truth[n, p]) < best_level]
    assert all(best_true >= x for x in lower)


def test_contrast_upper_bound_holds(default_cfg):
    s = default_cfg.scenario
    r = evaluate_grid(s, build_codebook(s), phase_grid(64))
    assert r.contrast.max() <= contrast_upper_bound(build_channel_set(s))


def test_result_csv_layout(tmp_path, default_cfg):
    s = default_cfg.scenario
    r = evaluate_grid(s, build_codebook(s), phase_grid(16))
    path = tmp_path / "r.csv"
    write_result_csv(r, path)
    lines = path.read_text().split("\n")
    assert lines[-1] == ""
    lines = lines[:-1]
    assert lines[0] == "beam_index,phase_index,contrast,ber,improvement"
    assert len(lines) == 1 + 64 * 16 + 1
    assert lines[-1].startswith("# summary best_beam=")
    row = lines[1].split(",")
    assert row[:2] == ["1", "0"] and row[4] in {"-1", "0", "1"}
