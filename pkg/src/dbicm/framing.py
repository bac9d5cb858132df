"""Delay-scheme framing between codewords and transmitted symbol slots.

A delay scheme T assigns label position i of every slot to the sub-block
of the codeword sent T_i slots earlier. A transmission of t_n slots then
carries t_n - max(T) complete codewords: the first slots pad not-yet-sent
delayed positions with known fill, the last slots pad already-finished
undelayed positions the same way, and both ends are exactly what the
receiver pins with infinite prior sentinels.

Fill bits are a fixed pseudorandom pattern (seeded per slot and position
by a protocol constant) rather than a constant value: a constant would
restrict the edge slots' symbols to a low-energy constellation subset
and systematically weaken the co-located data sub-blocks of the first
and last codewords.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constellation import Constellation, map_symbols
from .ldpc import LdpcCode

__all__ = [
    "DelayScheme",
    "TransmissionPlan",
    "SubBlockGroup",
    "partition",
    "group_at",
    "known_fill_bits",
    "transmit_stream",
    "spectral_efficiency",
    "TransmissionResult",
]

# Protocol constant seeding the known fill pattern at the stream edges.
_FILL_SEED = 0xDB1C


def known_fill_bits(t: int, pos: int, n_symbols: int) -> np.ndarray:
    """Known fill bits for label position pos of slot t, shape (n_symbols,)."""
    seq = np.random.SeedSequence(entropy=_FILL_SEED, spawn_key=(t, pos))
    return np.random.default_rng(seq).integers(0, 2, n_symbols, dtype=np.uint8)


@dataclass(frozen=True)
class DelayScheme:
    """Per-label-position slot delays, e.g. (0, 1, 0, 1)."""

    delays: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.delays)
        object.__setattr__(self, "delays", d)
        if len(d) < 1:
            raise ValueError("delay scheme must cover at least one position")
        if any(x < 0 for x in d):
            raise ValueError(f"delays must be non-negative, got {d}")
        if min(d) != 0:
            raise ValueError(f"at least one position must be undelayed, got {d}")

    @classmethod
    def parse(cls, text: str) -> "DelayScheme":
        """Parse a comma-separated form such as "0,1,0,1"."""
        try:
            return cls(tuple(int(x) for x in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad delay scheme {text!r}: {exc}") from exc

    @property
    def m(self) -> int:
        return len(self.delays)

    @property
    def t_max(self) -> int:
        return max(self.delays)

    @property
    def delayed_positions(self) -> tuple:
        return tuple(i for i, d in enumerate(self.delays) if d > 0)

    @property
    def undelayed_positions(self) -> tuple:
        return tuple(i for i, d in enumerate(self.delays) if d == 0)

    def __str__(self) -> str:
        return ",".join(str(d) for d in self.delays)


@dataclass(frozen=True)
class TransmissionPlan:
    """Geometry of one transmission: slots, codewords, symbols per slot."""

    scheme: DelayScheme
    n_symbols: int  # symbols per slot (= codeword length / m)
    t_n: int  # transmitted time slots

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ValueError("need at least one symbol per slot")
        if self.t_n <= self.scheme.t_max:
            raise ValueError(
                f"t_n={self.t_n} leaves no room for codewords under "
                f"t_max={self.scheme.t_max}"
            )

    @property
    def m(self) -> int:
        return self.scheme.m

    @property
    def n_codewords(self) -> int:
        """Complete codewords carried by the t_n slots."""
        return self.t_n - self.scheme.t_max

    def source_index(self, t: int, pos: int) -> int:
        """Codeword index feeding label position pos of slot t (may be
        outside [0, n_codewords), which means known fill)."""
        return t - self.scheme.delays[pos]

    def is_fill(self, t: int, pos: int) -> bool:
        u = self.source_index(t, pos)
        return u < 0 or u >= self.n_codewords


@dataclass
class SubBlockGroup:
    """Sub-blocks sharing the symbols of one slot."""

    t: int
    positions: list = field(default_factory=list)  # (pos, source_time, known)
    bits: np.ndarray | None = None  # (m, n) label bit rows


def partition(codeword_bits: np.ndarray, m: int) -> np.ndarray:
    """Split an interleaved codeword into m contiguous sub-blocks."""
    c = np.asarray(codeword_bits, dtype=np.uint8)
    if c.ndim != 1 or c.size % m != 0:
        raise ValueError(f"cannot split {c.shape} into {m} equal sub-blocks")
    return c.reshape(m, c.size // m)


def group_at(plan: TransmissionPlan, t: int, subblocks: np.ndarray) -> SubBlockGroup:
    """Assemble the label bits of slot t from stored codeword sub-blocks.

    Args:
        plan: transmission geometry.
        t: slot index in [0, t_n).
        subblocks: (n_codewords, m, n) partitioned interleaved codewords.

    Returns:
        SubBlockGroup with (pos, source_time, known) rows and the (m, n)
        bit matrix; fill positions carry the known pseudorandom pattern.
    """
    if not 0 <= t < plan.t_n:
        raise ValueError(f"slot {t} outside transmission of {plan.t_n} slots")
    g = SubBlockGroup(t=t)
    bits = np.zeros((plan.m, plan.n_symbols), dtype=np.uint8)
    for pos in range(plan.m):
        u = plan.source_index(t, pos)
        known = plan.is_fill(t, pos)
        if known:
            bits[pos] = known_fill_bits(t, pos, plan.n_symbols)
        else:
            bits[pos] = subblocks[u, pos]
        g.positions.append((pos, u, known))
    g.bits = bits
    return g


@dataclass
class TransmissionResult:
    frames: np.ndarray  # (t_n, n) complex symbols
    slot_bits: np.ndarray  # (t_n, m, n) label bits incl. fill
    subblocks: np.ndarray  # (n_codewords, m, n) interleaved codeword bits
    codewords: np.ndarray  # (n_codewords, code.n) pre-interleave bits


def transmit_stream(
    info_blocks: np.ndarray,
    code: LdpcCode,
    constellation: Constellation,
    plan: TransmissionPlan,
    interleaver: np.ndarray | None = None,
) -> TransmissionResult:
    """Encode, interleave, partition, group, and map one transmission.

    Args:
        info_blocks: (n_codewords, k) info bits, one row per codeword.
        code: LDPC code; code.n must equal m * plan.n_symbols.
        constellation: point set with m = plan.m.
        plan: transmission geometry.
        interleaver: permutation of code.n (transmit-domain bit j comes
            from codeword bit interleaver[j]); identity when omitted.

    Returns:
        TransmissionResult with plan.t_n symbol frames (one per slot).
    """
    info = np.asarray(info_blocks, dtype=np.uint8)
    f = plan.n_codewords
    if info.shape != (f, code.k):
        raise ValueError(
            f"expected ({f}, {code.k}) info blocks for this plan, got {info.shape}"
        )
    if constellation.m != plan.m:
        raise ValueError("constellation and delay scheme disagree on m")
    if code.n != plan.m * plan.n_symbols:
        raise ValueError(
            f"code length {code.n} does not fill {plan.m} x {plan.n_symbols} slots"
        )
    if interleaver is None:
        interleaver = np.arange(code.n)
    codewords = code.encode(info)
    subblocks = np.stack(
        [partition(cw[interleaver], plan.m) for cw in codewords]
    )
    frames = np.empty((plan.t_n, plan.n_symbols), dtype=np.complex128)
    slot_bits = np.empty((plan.t_n, plan.m, plan.n_symbols), dtype=np.uint8)
    for t in range(plan.t_n):
        g = group_at(plan, t, subblocks)
        slot_bits[t] = g.bits
        frames[t] = map_symbols(g.bits, constellation)
    return TransmissionResult(frames, slot_bits, subblocks, codewords)


def spectral_efficiency(m: int, rate: float, t_n: int, t_max: int) -> float:
    """Information bits per symbol of a t_n-slot transmission.

    The t_n slots carry t_n - t_max codewords of m * n * rate info bits
    over t_n * n symbols.
    """
    if t_n <= t_max:
        raise ValueError(f"t_n={t_n} must exceed t_max={t_max}")
    return m * rate * (t_n - t_max) / t_n
