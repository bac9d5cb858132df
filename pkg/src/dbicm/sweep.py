"""Monte Carlo BER/FER sweeps with reproducible, worker-count-independent
results.

Each (point, trial) pair draws its randomness from a dedicated substream,
and the stopping rule consumes trials strictly in index order, so a sweep
produces byte-identical CSV whether it runs on one worker or many.
"""

from __future__ import annotations

import csv
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .channel import awgn, ebn0_to_noise_var, trial_rng
from .constellation import (
    Constellation,
    build_apsk32_dvbs2,
    build_gray_qam,
)
from .framing import (
    DelayScheme,
    TransmissionPlan,
    spectral_efficiency,
    transmit_stream,
)
from .ldpc import LdpcCode, load_alist, peg_construct
from .schedulers import SCHEME_RUNNERS, ReceiverConfig, scheme_delays

__all__ = [
    "SimConfig",
    "SweepRecord",
    "SweepCancelled",
    "CSV_COLUMNS",
    "build_constellation",
    "parse_code_spec",
    "build_context",
    "run_sweep",
    "emit_csv",
]

CSV_COLUMNS = [
    "scheme", "mod", "delay", "N", "K", "tn", "W", "iters", "ebn0_db",
    "eta", "frames", "bit_errors", "frame_errors", "ber", "fer",
    "mean_bp_iters", "demap_passes", "point_evals", "decode_calls",
    "truncated",
]

_WINDOWED_SCHEMES = ("dbicm-wd", "dbicm-id")


class SweepCancelled(Exception):
    """Raised when a should_stop hook interrupts a running sweep."""


@dataclass
class SimConfig:
    scheme: str = "dbicm-wd"
    mod: str = "qam16"
    apsk_rate: str = "2/3"
    delays: Optional[tuple] = (0, 1, 0, 1)
    t_n: int = 101
    window: int = 5
    iters: int = 5
    bp_iters: int = 50
    bp_variant: str = "sumprod"
    demap_mode: str = "exact"
    code_spec: str = "peg:3,6,1200"
    interleaver: str = "auto"
    master_seed: int = 1
    min_error_frames: int = 100
    max_frames: int = 100000


@dataclass
class SweepRecord:
    scheme: str
    mod: str
    delay: str
    n: int
    k: int
    t_n: int
    window: Optional[int]
    iters: Optional[int]
    ebn0_db: float
    eta: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    mean_bp_iters: float
    demap_passes: int
    point_evals: int
    decode_calls: int
    truncated: bool

    def to_row(self) -> list:
        return [
            self.scheme,
            self.mod,
            self.delay,
            str(self.n),
            str(self.k),
            str(self.t_n),
            "" if self.window is None else str(self.window),
            "" if self.iters is None else str(self.iters),
            f"{self.ebn0_db:g}",
            f"{self.eta:.6g}",
            str(self.frames),
            str(self.bit_errors),
            str(self.frame_errors),
            f"{self.ber:.6g}",
            f"{self.fer:.6g}",
            f"{self.mean_bp_iters:.6g}",
            str(self.demap_passes),
            str(self.point_evals),
            str(self.decode_calls),
            "true" if self.truncated else "false",
        ]


def build_constellation(mod: str, apsk_rate: str = "2/3") -> Constellation:
    if mod == "qpsk":
        return build_gray_qam(2)
    if mod == "qam16":
        return build_gray_qam(4)
    if mod == "qam64":
        return build_gray_qam(6)
    if mod == "apsk32":
        return build_apsk32_dvbs2(apsk_rate)
    raise ValueError(f"unknown modulation {mod!r}")


def parse_code_spec(spec: str) -> LdpcCode:
    """`peg:<dv>,<dc>,<N>` builds a regular code; anything else is an
    alist path."""
    if spec.startswith("peg:"):
        body = spec[len("peg:"):]
        try:
            dv, dc, n = (int(x) for x in body.split(","))
        except ValueError as exc:
            raise ValueError(f"bad PEG code spec {spec!r}") from exc
        if dv < 1 or dc <= dv or n < dc:
            raise ValueError(f"bad PEG degrees in {spec!r}")
        if (n * dv) % dc != 0:
            raise ValueError(
                f"peg:{dv},{dc},{n}: {n}*{dv} edges not divisible by dc={dc}"
            )
        return peg_construct(n, n * dv // dc, dv, seed=1)
    return load_alist(spec)


@dataclass
class SimContext:
    """Heavy objects shared by every trial of a sweep."""

    cfg: SimConfig
    code: LdpcCode
    constellation: Constellation
    plan: TransmissionPlan
    interleaver: np.ndarray
    rcfg: ReceiverConfig
    eta: float


def build_context(cfg: SimConfig) -> SimContext:
    if cfg.scheme not in SCHEME_RUNNERS:
        raise ValueError(
            f"unknown scheme {cfg.scheme!r}; "
            f"choose from {sorted(SCHEME_RUNNERS)}"
        )
    constellation = build_constellation(cfg.mod, cfg.apsk_rate)
    m = constellation.m
    delays = scheme_delays(cfg.scheme, cfg.delays, m)
    if len(delays) != m:
        raise ValueError(
            f"delay scheme has {len(delays)} entries, modulation needs {m}"
        )
    code = parse_code_spec(cfg.code_spec)
    if code.n % m != 0:
        raise ValueError(f"code length {code.n} not divisible by m={m}")
    scheme = DelayScheme(delays)
    plan = TransmissionPlan(scheme, code.n // m, cfg.t_n)
    interleaver = _make_interleaver(cfg, code)
    rcfg = ReceiverConfig(
        code=code,
        constellation=constellation,
        plan=plan,
        noise_var=1.0,  # replaced per point
        interleaver=interleaver,
        demap_mode=cfg.demap_mode,
        bp_iters=cfg.bp_iters,
        bp_variant=cfg.bp_variant,
        window=cfg.window,
        iters=cfg.iters,
    )
    if cfg.scheme in _WINDOWED_SCHEMES:
        # fail fast on bad window geometry instead of mid-sweep
        if not scheme.t_max + 1 <= cfg.window <= plan.n_codewords:
            raise ValueError(
                f"window {cfg.window} outside "
                f"[{scheme.t_max + 1}, {plan.n_codewords}]"
            )
    eta = spectral_efficiency(m, code.rate, cfg.t_n, scheme.t_max)
    return SimContext(cfg, code, constellation, plan, interleaver, rcfg, eta)


def _make_interleaver(cfg: SimConfig, code: LdpcCode) -> np.ndarray:
    mode = cfg.interleaver
    if mode == "auto":
        mode = "identity" if cfg.code_spec.startswith("peg:") else "random"
    if mode == "identity":
        return np.arange(code.n)
    if mode == "random":
        ss = np.random.SeedSequence(entropy=cfg.master_seed,
                                    spawn_key=(10**9, 7))
        return np.random.default_rng(ss).permutation(code.n)
    raise ValueError(f"unknown interleaver mode {cfg.interleaver!r}")


# -- one trial ---------------------------------------------------------------


def _run_trial(ctx: SimContext, point_idx: int, trial_idx: int,
               noise_var: float) -> tuple:
    rng = trial_rng(ctx.cfg.master_seed, point_idx, trial_idx)
    plan = ctx.plan
    k = ctx.code.k
    info = rng.integers(0, 2, size=(plan.n_codewords, k), dtype=np.uint8)
    tx = transmit_stream(info, ctx.code, ctx.constellation, plan,
                         ctx.interleaver)
    y = awgn(tx.frames, noise_var, rng)
    rcfg = replace(ctx.rcfg, noise_var=noise_var)
    runner = SCHEME_RUNNERS[ctx.cfg.scheme]
    res = runner(y, rcfg, true_slot_bits=tx.slot_bits)
    wrong = res.info_bits != info
    bit_errors = int(wrong.sum())
    frame_errors = int(np.any(wrong, axis=1).sum())
    c = res.counters
    return (
        bit_errors, frame_errors, res.bp_iterations,
        c.demap_passes, c.point_evals, c.decode_calls,
    )


# -- per-point accumulation ---------------------------------------------------


class _PointAccumulator:
    def __init__(self, ctx: SimContext):
        self.frames_per_trial = ctx.plan.n_codewords
        self.k = ctx.code.k
        self.min_error_frames = ctx.cfg.min_error_frames
        self.max_frames = ctx.cfg.max_frames
        self.frames = 0
        self.bit_errors = 0
        self.frame_errors = 0
        self.bp_iterations = 0
        self.demap_passes = 0
        self.point_evals = 0
        self.decode_calls = 0

    def add(self, stats: tuple) -> None:
        self.frames += self.frames_per_trial
        self.bit_errors += stats[0]
        self.frame_errors += stats[1]
        self.bp_iterations += stats[2]
        self.demap_passes += stats[3]
        self.point_evals += stats[4]
        self.decode_calls += stats[5]

    def done(self) -> bool:
        if self.frame_errors >= self.min_error_frames:
            return True
        return self.frames >= self.max_frames

    @property
    def truncated(self) -> bool:
        return self.frame_errors < self.min_error_frames

    def record(self, ctx: SimContext, ebn0_db: float) -> SweepRecord:
        cfg = ctx.cfg
        bits = self.frames * self.k
        windowed = cfg.scheme in _WINDOWED_SCHEMES
        return SweepRecord(
            scheme=cfg.scheme,
            mod=cfg.mod,
            delay=str(ctx.plan.scheme),
            n=ctx.code.n,
            k=self.k,
            t_n=cfg.t_n,
            window=cfg.window if windowed else None,
            iters=cfg.iters if windowed else None,
            ebn0_db=ebn0_db,
            eta=ctx.eta,
            frames=self.frames,
            bit_errors=self.bit_errors,
            frame_errors=self.frame_errors,
            ber=self.bit_errors / bits if bits else 0.0,
            fer=self.frame_errors / self.frames if self.frames else 0.0,
            mean_bp_iters=(self.bp_iterations / self.decode_calls
                           if self.decode_calls else 0.0),
            demap_passes=self.demap_passes,
            point_evals=self.point_evals,
            decode_calls=self.decode_calls,
            truncated=self.truncated,
        )


# -- worker plumbing ----------------------------------------------------------

_WORKER_CTX: Optional[SimContext] = None


def _init_worker(ctx: SimContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _worker_trial(args: tuple) -> tuple:
    point_idx, trial_idx, noise_var = args
    return _run_trial(_WORKER_CTX, point_idx, trial_idx, noise_var)


def _point_serial(ctx, point_idx, noise_var, should_stop):
    acc = _PointAccumulator(ctx)
    trial = 0
    while True:
        if should_stop is not None and should_stop():
            raise SweepCancelled
        acc.add(_run_trial(ctx, point_idx, trial, noise_var))
        trial += 1
        if acc.done():
            return acc


def _point_parallel(executor, workers, ctx, point_idx, noise_var, should_stop):
    acc = _PointAccumulator(ctx)
    horizon = 2 * workers
    pending = {}
    submitted = 0
    consumed = 0
    try:
        while True:
            if should_stop is not None and should_stop():
                raise SweepCancelled
            while submitted < consumed + horizon:
                pending[submitted] = executor.submit(
                    _worker_trial, (point_idx, submitted, noise_var))
                submitted += 1
            # consume strictly in trial order so the stopping boundary is
            # identical to a serial run
            acc.add(pending.pop(consumed).result())
            consumed += 1
            if acc.done():
                return acc
    finally:
        for fut in pending.values():
            fut.cancel()


def run_sweep(
    cfg: SimConfig,
    ebn0_points: Sequence[float],
    workers: int = 1,
    progress_cb: Optional[Callable] = None,
    should_stop: Optional[Callable] = None,
) -> list:
    """Simulate every Eb/N0 point and return one SweepRecord per point.

    progress_cb(point_idx, record) fires after each finished point;
    should_stop() is polled between trials and aborts via SweepCancelled.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    ctx = build_context(cfg)
    records = []
    if workers == 1:
        for idx, ebn0_db in enumerate(ebn0_points):
            noise_var = ebn0_to_noise_var(ebn0_db, ctx.eta)
            acc = _point_serial(ctx, idx, noise_var, should_stop)
            rec = acc.record(ctx, ebn0_db)
            records.append(rec)
            if progress_cb is not None:
                progress_cb(idx, rec)
        return records
    mp_ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=mp_ctx,
        initializer=_init_worker, initargs=(ctx,),
    ) as executor:
        for idx, ebn0_db in enumerate(ebn0_points):
            noise_var = ebn0_to_noise_var(ebn0_db, ctx.eta)
            acc = _point_parallel(executor, workers, ctx, idx, noise_var,
                                  should_stop)
            rec = acc.record(ctx, ebn0_db)
            records.append(rec)
            if progress_cb is not None:
                progress_cb(idx, rec)
    return records


def emit_csv(records: Sequence[SweepRecord], fileobj) -> None:
    """Write records in the canonical column order; commas inside the
    delay field are quoted by the csv module."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.to_row())
