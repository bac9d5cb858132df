"""Bitwise soft demapping with optional per-position a-priori information.

One kernel serves every demapping flavor in the package: with no priors it
is plain max-log/exact bitwise demapping; with extrinsic LLRs attached to
other label positions it weights each constellation point by the prior
probability of that point's bits; +/-inf priors pin known bits and reduce
the marginalization to the consistent half/quarter constellation.

LLR sign convention: positive means bit 0 is more likely.
"""

from __future__ import annotations

from typing import Mapping, Sequence, Union

import numpy as np

from .constellation import Constellation

__all__ = [
    "PriorSet",
    "extrinsic_to_prob",
    "demap_positions",
    "demap_no_prior",
    "demap_with_priors",
]

# position -> extrinsic LLR (scalar, or one value per symbol of the frame)
PriorSet = Mapping[int, Union[float, np.ndarray]]


def extrinsic_to_prob(l_e, bit: int):
    """Probability that a bit takes value `bit` given its extrinsic LLR.

    l_e = +inf pins the bit to 0 (probability 1 for bit=0); l_e = 0 gives
    one half. Accepts scalars or arrays.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    l_e = np.asarray(l_e, dtype=np.float64)
    # sigmoid(l_e) for bit 0, sigmoid(-l_e) for bit 1, via stable logaddexp
    signed = l_e if bit == 0 else -l_e
    out = np.exp(-np.logaddexp(0.0, -signed))
    return out if out.ndim else float(out)


def _log_bit_probs(l_e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log P(bit=0) and log P(bit=1) from an extrinsic LLR array."""
    return -np.logaddexp(0.0, -l_e), -np.logaddexp(0.0, l_e)


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise log-sum-exp that maps all -inf rows to -inf, never NaN."""
    peak = np.max(a, axis=1)
    finite = peak > -np.inf
    out = np.full(a.shape[0], -np.inf)
    if np.any(finite):
        sub = a[finite] - peak[finite, None]
        out[finite] = peak[finite] + np.log(np.sum(np.exp(sub), axis=1))
    return out


def demap_positions(
    y,
    constellation: Constellation,
    noise_var: float,
    targets: Sequence[int],
    priors: PriorSet | None = None,
    mode: str = "exact",
) -> np.ndarray:
    """Demap one symbol sequence for a set of target label positions.

    All targets share a single likelihood table: the per-point metric
    -|y - x|^2 / (2 noise_var) plus the log prior probability of the point's
    bits at every prior position. Each target is then marginalized from
    that table, so co-located targets with a common prior configuration
    cost one table build.

    Args:
        y: received symbol or (n,) sequence.
        constellation: point set with labels.
        noise_var: per-dimension noise variance (> 0).
        targets: label positions to produce LLRs for.
        priors: extrinsic LLRs keyed by label position; must not include a
            target. Entries that are exactly zero everywhere are dropped:
            a flat prior scales both LLR halves by the same factor.
        mode: "exact" (log-sum-exp) or "maxlog".

    Returns:
        (len(targets), n) float array of LLRs; +/-inf are legal outputs.
    """
    if mode not in ("exact", "maxlog"):
        raise ValueError(f"mode must be 'exact' or 'maxlog', got {mode!r}")
    if noise_var <= 0:
        raise ValueError(f"noise_var must be positive, got {noise_var}")
    m = constellation.m
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target position")
    for pos in targets:
        if not 0 <= pos < m:
            raise ValueError(f"target position {pos} out of range for m={m}")
    y = np.atleast_1d(np.asarray(y, dtype=np.complex128))
    n = y.shape[0]

    d = y[:, None] - constellation.points[None, :]
    metric = -(d.real**2 + d.imag**2) / (2.0 * noise_var)

    if priors:
        target_set = set(targets)
        for pos, l_e in priors.items():
            if not 0 <= pos < m:
                raise ValueError(f"prior position {pos} out of range for m={m}")
            if pos in target_set:
                raise ValueError(f"prior attached to target position {pos}")
            l_e = np.broadcast_to(np.asarray(l_e, dtype=np.float64), (n,))
            if not np.any(l_e):
                continue
            logp0, logp1 = _log_bit_probs(l_e)
            bit_row = constellation.bits[:, pos]
            metric = metric + np.where(
                bit_row[None, :] == 0, logp0[:, None], logp1[:, None]
            )

    out = np.empty((len(targets), n))
    for row, pos in enumerate(targets):
        zero = metric[:, constellation.zero_sets[pos]]
        one = metric[:, constellation.one_sets[pos]]
        if mode == "maxlog":
            out[row] = np.max(zero, axis=1) - np.max(one, axis=1)
        else:
            out[row] = _logsumexp_rows(zero) - _logsumexp_rows(one)
    return out


def demap_no_prior(y, constellation: Constellation, noise_var: float,
                   target_pos: int, mode: str = "exact"):
    """Prior-free bitwise LLR for one label position.

    Scalar y gives a scalar LLR; an (n,) sequence gives an (n,) array.
    """
    llr = demap_positions(y, constellation, noise_var, [target_pos], None, mode)[0]
    return float(llr[0]) if np.isscalar(y) or np.asarray(y).ndim == 0 else llr


def demap_with_priors(y, constellation: Constellation, noise_var: float,
                      target_pos: int, priors: PriorSet, mode: str = "exact"):
    """Bitwise LLR for one label position given co-located extrinsic LLRs."""
    llr = demap_positions(y, constellation, noise_var, [target_pos], priors, mode)[0]
    return float(llr[0]) if np.isscalar(y) or np.asarray(y).ndim == 0 else llr
