"""Receiver schedules: counters, degeneracy, priors, validation."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from dbicm.channel import awgn, trial_rng
from dbicm.framing import DelayScheme, TransmissionPlan, known_fill_bits, transmit_stream
from dbicm.ldpc import peg_construct
from dbicm.schedulers import (
    SCHEME_RUNNERS,
    ReceiverConfig,
    _Receiver,
    run_bicm,
    run_dbicm_id,
    run_dbicm_windowed,
    run_genie_bound,
    scheme_delays,
)


def _setup(constellation, code, delays, t_n, seed=3, noise_var=0.35, **cfg_kw):
    """One transmitted stream plus a receiver config for it."""
    plan = TransmissionPlan(DelayScheme(delays), code.n // len(delays), t_n)
    rng = trial_rng(seed, 0, 0)
    info = rng.integers(0, 2, (plan.n_codewords, code.k), dtype=np.uint8)
    tx = transmit_stream(info, code, constellation, plan)
    y = awgn(tx.frames, noise_var, rng)
    cfg = ReceiverConfig(code=code, constellation=constellation, plan=plan,
                         noise_var=max(noise_var, 1e-3), **cfg_kw)
    return info, tx, y, cfg


def test_frozen_trace_counters(qam16, code48):
    """Operation counters of the two window schedules on a pinned toy
    config with noise heavy enough that no decode converges early."""
    _, _, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 9, seed=7,
                          noise_var=1e12, window=3, iters=2, bp_iters=4)
    wd = run_dbicm_windowed(y, cfg)
    assert (wd.counters.demap_passes, wd.counters.point_evals,
            wd.counters.decode_calls, wd.bp_iterations) == (172, 15168, 60, 240)
    idr = run_dbicm_id(y, cfg)
    assert (idr.counters.demap_passes, idr.counters.point_evals,
            idr.counters.decode_calls, idr.bp_iterations) == (144, 27648, 26, 104)


def test_counter_walk_qpsk(qpsk, code48):
    """Hand-walked schedule counts for T=(0,1), t_n=6, W=2, one iteration.

    Windowed: slide positions P = F-W+1 = 4. Table builds are W-1 = 1
    initial at the first position, P-1 = 3 on later slides, and 2W = 4
    per position/iteration (forward undelayed + backward delayed), so
    1+3+16 = 20 builds of n*2^m = 96 point evaluations; the forward and
    backward demaps serve one position each and the initial builds serve
    two, giving 24 passes. Decodes: 2W-1 = 3 per position.

    ID: every in-window slot position gets its own build per iteration;
    edge fill drops one at slot 0 and the final window adds the tail
    slot, 16 builds total, with W-t_max = 1 decode per interior position
    and W = 2 in the final one.
    """
    _, _, y, cfg = _setup(qpsk, code48, (0, 1), 6, noise_var=1e12,
                          window=2, iters=1, bp_iters=4)
    wd = run_dbicm_windowed(y, cfg)
    assert wd.counters.demap_passes == 24
    assert wd.counters.point_evals == 20 * 24 * 4
    assert wd.counters.decode_calls == 12
    assert wd.bp_iterations == 12 * 4
    idr = run_dbicm_id(y, cfg)
    assert idr.counters.demap_passes == 16
    assert idr.counters.point_evals == 16 * 24 * 4
    assert idr.counters.decode_calls == 5
    assert idr.bp_iterations == 5 * 4


def test_zero_delay_schedules_identical(qam16, code96):
    """With an all-zero delay scheme a single detection pass carries no
    priors, so every schedule degenerates to the plain chain, bit for
    bit. From the second iteration the ID schedule feeds a codeword's
    own extrinsics back to its demapper (that is its job), so identity
    is pinned at one iteration; the window recursions have no feedback
    path at zero delay and stay identical at any budget."""
    for trial_seed in (3, 4, 5):
        info, tx, y, cfg = _setup(qam16, code96, (0, 0, 0, 0), 6,
                                  seed=trial_seed, window=2, iters=1,
                                  bp_iters=10)
        ref = run_bicm(y, cfg)
        for name in ("dbicm", "dbicm-wd", "dbicm-id"):
            out = SCHEME_RUNNERS[name](y, cfg, true_slot_bits=tx.slot_bits)
            assert np.array_equal(out.info_bits, ref.info_bits), name
        wd3 = run_dbicm_windowed(y, replace(cfg, iters=3))
        assert np.array_equal(wd3.info_bits, ref.info_bits)


def test_noiseless_all_schemes_exact(qam16, code48):
    info, tx, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7,
                              noise_var=0.0, window=3, iters=2)
    for name, runner in SCHEME_RUNNERS.items():
        out = runner(y, cfg, true_slot_bits=tx.slot_bits)
        assert np.array_equal(out.info_bits, info), name


def test_early_exit_skips_iterations(qam16, code48):
    """On a clean channel every layer converges in the first outer
    iteration, so the iteration budget must not inflate the decode
    count: P*(2W-1) calls regardless of iters."""
    _, _, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7, noise_var=0.0,
                          window=3, iters=4)
    out = run_dbicm_windowed(y, cfg)
    p = cfg.plan.n_codewords - cfg.window + 1
    assert out.counters.decode_calls == p * (2 * cfg.window - 1)
    assert out.layer_iterations == [1] * cfg.plan.n_codewords
    assert run_bicm(y, cfg).layer_iterations is None


def test_genie_requires_truth(qam16, code48):
    _, tx, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7)
    with pytest.raises(ValueError):
        run_genie_bound(y, cfg)
    with pytest.raises(ValueError):
        run_genie_bound(y, cfg, true_slot_bits=tx.slot_bits[:-1])


def test_window_validation(qam16, code48):
    _, _, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7)
    for runner in (run_dbicm_windowed, run_dbicm_id):
        with pytest.raises(ValueError):
            runner(y, replace(cfg, window=1))  # below t_max + 1
        with pytest.raises(ValueError):
            runner(y, replace(cfg, window=7))  # above n_codewords
        with pytest.raises(ValueError):
            runner(y, replace(cfg, iters=0))
    # schemes with t_max > 1 are outside the window recursions
    _, _, y2, cfg2 = _setup(qam16, code48, (0, 2, 0, 1), 8, window=3)
    with pytest.raises(ValueError):
        run_dbicm_windowed(y2, cfg2)
    with pytest.raises(ValueError):
        run_dbicm_id(y2, cfg2)
    # but the single-pass schedules accept them
    run_dbicm_conventional_ok = SCHEME_RUNNERS["dbicm"](y2, cfg2)
    assert run_dbicm_conventional_ok.info_bits.shape == (6, code48.k)


def test_receiver_shape_validation(qam16, code48):
    _, _, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7)
    with pytest.raises(ValueError):
        run_bicm(y[:-1], cfg)
    bad_plan = TransmissionPlan(DelayScheme((0, 1, 0, 1)), 10, 7)
    with pytest.raises(ValueError):
        run_bicm(y, replace(cfg, plan=bad_plan))


def test_prior_sentinels_match_fill(qam16, code48):
    """Fill positions present infinite-confidence priors with signs set by
    the known pattern; data positions start at zero extrinsics."""
    _, _, y, cfg = _setup(qam16, code48, (0, 1, 0, 1), 7)
    rx = _Receiver(y, cfg)
    prior = rx.prior_for(0, 1)
    fill = known_fill_bits(0, 1, rx.n)
    assert np.all(np.isinf(prior))
    assert np.array_equal(prior > 0, fill == 0)
    assert np.all(rx.prior_for(0, 0) == 0.0)
    # last slot: undelayed position past the final codeword is fill
    assert np.all(np.isinf(rx.prior_for(6, 0)))


def test_scheme_delays():
    assert scheme_delays("bicm", None, 4) == (0, 0, 0, 0)
    assert scheme_delays("dbicm-wd", (0, 1, 0, 1), 4) == (0, 1, 0, 1)
    with pytest.raises(ValueError):
        scheme_delays("dbicm", None, 4)
