"""Receiver schedules over one transmission: how demapping and decoding
interleave across slots.

Five schedules share one receiver core:

* ``bicm``: demap each slot once without priors, decode each codeword once.
* ``dbicm``: conventional delayed decoding; undelayed positions are
  demapped with the extrinsics of the already-decoded co-located delayed
  sub-blocks, each codeword is decoded once.
* ``dbicm-wd``: windowed decoding; per window position, iterate a forward
  recursion (decode layers in time order, refreshing undelayed LLRs with
  the newest delayed extrinsics) and a backward recursion (refresh delayed
  LLRs with undelayed extrinsics from the later slot, re-decode), then
  emit the window's oldest layer and slide.
* ``dbicm-id``: iterative detection with the same latency; every position
  of every in-window slot is re-demapped per iteration using the latest
  extrinsics of all other co-located sub-blocks, then every in-window
  codeword is decoded.
* ``genie``: lower bound; demap every position with all other co-located
  bits pinned to their true values, decode once.

Counters: ``point_evals`` advances by n * 2^m per likelihood-table build
(one build serves every target sharing a prior configuration), and
``demap_passes`` by the number of per-position LLR sequences produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constellation import Constellation
from .demapper import demap_positions
from .framing import TransmissionPlan, known_fill_bits
from .ldpc import LdpcCode, LdpcDecoder

__all__ = [
    "OpCounters",
    "ReceiverConfig",
    "SchedulerResult",
    "run_bicm",
    "run_dbicm_conventional",
    "run_dbicm_windowed",
    "run_dbicm_id",
    "run_genie_bound",
    "SCHEME_RUNNERS",
    "scheme_delays",
]


@dataclass
class OpCounters:
    demap_passes: int = 0
    point_evals: int = 0
    decode_calls: int = 0

    def merge(self, other: "OpCounters") -> None:
        self.demap_passes += other.demap_passes
        self.point_evals += other.point_evals
        self.decode_calls += other.decode_calls


@dataclass
class ReceiverConfig:
    """Everything a schedule needs besides the received frames."""

    code: LdpcCode
    constellation: Constellation
    plan: TransmissionPlan
    noise_var: float
    interleaver: np.ndarray | None = None
    demap_mode: str = "exact"
    bp_iters: int = 50
    bp_variant: str = "sumprod"
    window: int = 2
    iters: int = 1


@dataclass
class SchedulerResult:
    info_bits: np.ndarray  # (n_codewords, k) decoded info bits
    counters: OpCounters
    bp_iterations: int  # summed over decode calls
    layer_iterations: list | None = None  # outer iterations at emission


class _Receiver:
    """Shared state: per-slot per-position LLRs, per-codeword extrinsics."""

    def __init__(self, y_frames: np.ndarray, cfg: ReceiverConfig):
        plan = cfg.plan
        y = np.asarray(y_frames, dtype=np.complex128)
        if y.shape != (plan.t_n, plan.n_symbols):
            raise ValueError(
                f"expected ({plan.t_n}, {plan.n_symbols}) received frames, "
                f"got {y.shape}"
            )
        if cfg.code.n != plan.m * plan.n_symbols:
            raise ValueError("code length does not match plan geometry")
        self.y = y
        self.cfg = cfg
        self.plan = plan
        self.m = plan.m
        self.n = plan.n_symbols
        self.f = plan.n_codewords
        self.interleaver = (
            np.arange(cfg.code.n) if cfg.interleaver is None else cfg.interleaver
        )
        self.llr = np.zeros((plan.t_n, self.m, self.n))
        self.ext = np.zeros((self.f, self.m, self.n))  # transmit-domain
        self.hard = np.zeros((self.f, cfg.code.n), dtype=np.uint8)  # code-domain
        self.converged = np.zeros(self.f, dtype=bool)
        self.decoder = LdpcDecoder(cfg.code, cfg.bp_iters, cfg.bp_variant)
        self.counters = OpCounters()
        self.bp_iterations = 0
        self._ch_buf = np.empty(cfg.code.n)

    # -- priors and demapping ---------------------------------------------

    def data_positions(self, t: int) -> list:
        return [i for i in range(self.m) if not self.plan.is_fill(t, i)]

    def prior_for(self, t: int, pos: int):
        """Extrinsic prior stream for (slot, position): signed infinite
        sentinels matching the known fill bits when the position carries
        fill, else the source codeword's latest extrinsics (zero until
        first decoded)."""
        u = self.plan.source_index(t, pos)
        if u < 0 or u >= self.f:
            fill = known_fill_bits(t, pos, self.n)
            return np.where(fill == 0, np.inf, -np.inf)
        return self.ext[u, pos]

    def demap(self, t: int, targets: list, prior_positions: tuple) -> None:
        """One table build covering `targets` of slot t; updates the LLR
        buffer in place and advances the counters."""
        if not targets:
            return
        priors = {p: self.prior_for(t, p) for p in prior_positions}
        out = demap_positions(
            self.y[t], self.cfg.constellation, self.cfg.noise_var,
            targets, priors, self.cfg.demap_mode,
        )
        for row, pos in enumerate(targets):
            self.llr[t, pos] = out[row]
        self.counters.demap_passes += len(targets)
        self.counters.point_evals += self.n * (2**self.m)

    def demap_initial(self, t: int) -> None:
        self.demap(t, self.data_positions(t), ())

    # -- decoding -----------------------------------------------------------

    def decode_layer(self, u: int) -> None:
        """Gather codeword u's LLRs from its slots, BP-decode, store the
        extrinsics/hard decision."""
        delays = self.plan.scheme.delays
        tx = np.empty((self.m, self.n))
        for pos in range(self.m):
            tx[pos] = self.llr[u + delays[pos], pos]
        self._ch_buf[self.interleaver] = tx.reshape(-1)
        res = self.decoder.decode(self._ch_buf)
        self.ext[u] = res.extrinsic[self.interleaver].reshape(self.m, self.n)
        self.hard[u] = res.hard_bits
        self.converged[u] = res.converged
        self.counters.decode_calls += 1
        self.bp_iterations += res.iterations

    def result(self, layer_iterations: list | None = None) -> SchedulerResult:
        info = self.hard[:, self.cfg.code.info_positions]
        return SchedulerResult(
            info_bits=np.ascontiguousarray(info),
            counters=self.counters,
            bp_iterations=self.bp_iterations,
            layer_iterations=layer_iterations,
        )


def _check_window(cfg: ReceiverConfig, name: str) -> tuple:
    scheme = cfg.plan.scheme
    w = cfg.window
    if scheme.t_max > 1:
        raise ValueError(f"{name} supports delay schemes with t_max <= 1")
    if not scheme.t_max + 1 <= w <= cfg.plan.n_codewords:
        raise ValueError(
            f"window {w} outside [{scheme.t_max + 1}, {cfg.plan.n_codewords}]"
        )
    if cfg.iters < 1:
        raise ValueError(f"need at least one iteration, got {cfg.iters}")
    return scheme.undelayed_positions, scheme.delayed_positions


def run_bicm(y_frames, cfg: ReceiverConfig, true_slot_bits=None) -> SchedulerResult:
    """Prior-free reference receiver: every slot is demapped once without
    a-priori information and every codeword decoded once from its slots.

    With an all-zero delay scheme this is classic BICM. With a delayed
    scheme it receives the same transmission as the other schedules but
    ignores the delay structure, which isolates the a-priori demapping
    gain in scheme comparisons at a common spectral efficiency.
    """
    rx = _Receiver(y_frames, cfg)
    for t in range(cfg.plan.t_n):
        rx.demap_initial(t)
    for u in range(rx.f):
        rx.decode_layer(u)
    return rx.result()


def run_dbicm_conventional(y_frames, cfg: ReceiverConfig,
                           true_slot_bits=None) -> SchedulerResult:
    """Decode codewords in time order, passing each delayed sub-block's
    extrinsics forward exactly once; delayed positions keep their
    prior-free LLRs."""
    rx = _Receiver(y_frames, cfg)
    scheme = cfg.plan.scheme
    delayed_done = np.zeros(cfg.plan.t_n, dtype=bool)
    for u in range(rx.f):
        for pos in scheme.delayed_positions:
            t = u + scheme.delays[pos]
            if not delayed_done[t]:
                targets = [
                    p for p in scheme.delayed_positions
                    if not cfg.plan.is_fill(t, p)
                ]
                rx.demap(t, targets, ())
                delayed_done[t] = True
        rx.demap(u, list(scheme.undelayed_positions), scheme.delayed_positions)
        rx.decode_layer(u)
    return rx.result()


def run_genie_bound(y_frames, cfg: ReceiverConfig,
                    true_slot_bits=None) -> SchedulerResult:
    """Lower bound: every position demapped with all other co-located bits
    pinned to their true values (simulation-side knowledge)."""
    if true_slot_bits is None:
        raise ValueError("genie schedule needs the transmitted slot bits")
    rx = _Receiver(y_frames, cfg)
    bits = np.asarray(true_slot_bits, dtype=np.uint8)
    if bits.shape != (cfg.plan.t_n, rx.m, rx.n):
        raise ValueError(f"true_slot_bits has shape {bits.shape}")
    for t in range(cfg.plan.t_n):
        for pos in rx.data_positions(t):
            priors = {
                p: np.where(bits[t, p] == 0, np.inf, -np.inf)
                for p in range(rx.m)
                if p != pos
            }
            out = demap_positions(
                rx.y[t], cfg.constellation, cfg.noise_var,
                [pos], priors, cfg.demap_mode,
            )
            rx.llr[t, pos] = out[0]
            rx.counters.demap_passes += 1
            rx.counters.point_evals += rx.n * (2**rx.m)
    for u in range(rx.f):
        rx.decode_layer(u)
    return rx.result()


def run_dbicm_windowed(y_frames, cfg: ReceiverConfig,
                       true_slot_bits=None) -> SchedulerResult:
    """Windowed decoding with forward/backward recursions.

    A window position t covers decoding layers t..t+W-1. Per iteration the
    forward recursion decodes layers in time order and refreshes the
    undelayed LLRs of each slot with the newest delayed extrinsics; the
    backward recursion walks the slots in reverse, refreshing delayed LLRs
    with the co-located undelayed extrinsics from the later slot and
    re-decoding. The oldest layer is emitted on its first zero-syndrome
    decode or when the iteration budget runs out; the final window emits
    every remaining layer. LLRs survive the slide, so retained frames are
    never recomputed from scratch.
    """
    und, dly = _check_window(cfg, "run_dbicm_windowed")
    rx = _Receiver(y_frames, cfg)
    w_len = cfg.window
    f = rx.f
    last = f - w_len  # final window position
    layer_iters = [0] * f
    for t in range(last + 1):
        if t == 0:
            for w in range(1, w_len):
                rx.demap_initial(t + w)
        else:
            rx.demap_initial(t + w_len - 1)
        emit = range(t, t + 1) if t < last else range(t, f)
        for it in range(1, cfg.iters + 1):
            for w in range(w_len):
                if w > 0:
                    rx.decode_layer(t + w - 1)
                slot = t + w
                if slot < f:
                    rx.demap(slot, list(und), dly)
            for w in range(w_len, 0, -1):
                slot = t + w
                if slot < cfg.plan.t_n:
                    targets = [p for p in dly if not cfg.plan.is_fill(slot, p)]
                    rx.demap(slot, targets, und)
                rx.decode_layer(t + w - 1)
            if all(rx.converged[u] for u in emit) or it == cfg.iters:
                for u in emit:
                    layer_iters[u] = it
                break
    return rx.result(layer_iterations=layer_iters)


def run_dbicm_id(y_frames, cfg: ReceiverConfig,
                 true_slot_bits=None) -> SchedulerResult:
    """Iterative detection over the window: each iteration re-demaps every
    position of every in-window slot using the latest extrinsics of all
    other co-located sub-blocks (one table build per position), then
    decodes every in-window codeword. Extrinsics of not-yet-emitted
    codewords restart at zero when the window slides."""
    _, _ = _check_window(cfg, "run_dbicm_id")
    rx = _Receiver(y_frames, cfg)
    plan = cfg.plan
    w_len = cfg.window
    f = rx.f
    t_max = plan.scheme.t_max
    last = f - w_len
    layer_iters = [0] * f
    for t in range(last + 1):
        final = t == last
        slots = range(t, plan.t_n if final else t + w_len)
        layers = range(t, f if final else t + w_len - t_max)
        emit = range(t, t + 1) if not final else range(t, f)
        for u in layers:
            rx.ext[u] = 0.0
            rx.converged[u] = False
        for it in range(1, cfg.iters + 1):
            for slot in slots:
                for pos in rx.data_positions(slot):
                    priors = {p: rx.prior_for(slot, p)
                              for p in range(rx.m) if p != pos}
                    out = demap_positions(
                        rx.y[slot], cfg.constellation, cfg.noise_var,
                        [pos], priors, cfg.demap_mode,
                    )
                    rx.llr[slot, pos] = out[0]
                    rx.counters.demap_passes += 1
                    rx.counters.point_evals += rx.n * (2**rx.m)
            for u in layers:
                rx.decode_layer(u)
            if all(rx.converged[u] for u in emit) or it == cfg.iters:
                for u in emit:
                    layer_iters[u] = it
                break
    return rx.result(layer_iterations=layer_iters)


def scheme_delays(scheme_name: str, delays: "tuple | None", m: int) -> tuple:
    """Canonical delay tuple: the scheme tag selects the receiver, the
    delay tuple the transmission framing. Only `bicm` has a fallback
    (all-zero, the classic chain) when no delays are given."""
    if delays is None:
        if scheme_name == "bicm":
            return tuple([0] * m)
        raise ValueError(f"scheme {scheme_name!r} needs an explicit delay scheme")
    return tuple(delays)


SCHEME_RUNNERS = {
    "bicm": run_bicm,
    "dbicm": run_dbicm_conventional,
    "dbicm-wd": run_dbicm_windowed,
    "dbicm-id": run_dbicm_id,
    "genie": run_genie_bound,
}
