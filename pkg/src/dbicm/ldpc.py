"""LDPC machinery: alist I/O, PEG construction, encoding, BP decoding.

The parity-check matrix lives as per-node neighbor lists (the alist view).
Encoding uses GF(2) Gaussian elimination to pick an invertible parity
column set, with a back-substitution fast path when the parity part is
dual-diagonal (IRA-structured codes); decoding is a flooding sum-product
over flat edge arrays so one iteration is a handful of numpy passes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LdpcCode",
    "DecodeResult",
    "LdpcDecoder",
    "load_alist",
    "save_alist",
    "peg_construct",
    "encode",
    "bp_decode",
    "syndrome",
]

LLR_CLIP = 38.0  # message clip; tanh(19) saturates float64 anyway
_TINY = 1e-300


class LdpcCode:
    """Sparse parity-check matrix with cached encode/decode structure."""

    def __init__(self, n_vars: int, n_checks: int, check_neighbors: list):
        if n_vars < 1 or n_checks < 1:
            raise ValueError("need at least one variable and one check")
        if len(check_neighbors) != n_checks:
            raise ValueError(
                f"expected {n_checks} check rows, got {len(check_neighbors)}"
            )
        self.n = int(n_vars)
        self.m_checks = int(n_checks)
        self.check_neighbors = []
        var_lists: list[list[int]] = [[] for _ in range(self.n)]
        for c, row in enumerate(check_neighbors):
            arr = np.unique(np.asarray(row, dtype=np.int64))
            if arr.size == 0:
                raise ValueError(f"check {c} has no variables")
            if arr.size != len(row):
                raise ValueError(f"check {c} lists a variable twice")
            if arr[0] < 0 or arr[-1] >= self.n:
                raise ValueError(f"check {c} references a variable out of range")
            self.check_neighbors.append(arr)
            for v in arr:
                var_lists[v].append(c)
        if any(len(lst) == 0 for lst in var_lists):
            raise ValueError("every variable must appear in at least one check")
        self.var_neighbors = [np.asarray(lst, dtype=np.int64) for lst in var_lists]
        self.k = self.n - self.m_checks
        self._encoder = None
        # flat edge arrays in check-major order
        self.edge_var = np.concatenate(self.check_neighbors)
        self.check_degrees = np.array([a.size for a in self.check_neighbors])
        self.var_degrees = np.array([a.size for a in self.var_neighbors])
        self.edge_check = np.repeat(np.arange(self.m_checks), self.check_degrees)
        self.check_starts = np.concatenate(
            ([0], np.cumsum(self.check_degrees)[:-1])
        )

    @property
    def rate(self) -> float:
        return self.k / self.n

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        """H @ bits over GF(2); zero vector means a valid codeword."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (self.n,):
            raise ValueError(f"expected {self.n} bits, got shape {bits.shape}")
        return np.bitwise_xor.reduceat(bits[self.edge_var], self.check_starts)

    # -- encoding ---------------------------------------------------------

    def _detect_dual_diagonal(self):
        """Accumulator chain: parity column k+j sits in checks j and j+1,
        so check j reads p_{j-1} xor p_j and a forward cumulative xor of
        the per-check info sums solves the chain."""
        if self.k < 1:
            return None
        for j in range(self.m_checks):
            want = (
                np.array([j])
                if j == self.m_checks - 1
                else np.array([j, j + 1])
            )
            if not np.array_equal(self.var_neighbors[self.k + j], want):
                return None
        # edges from checks into info columns only, check-major for reduceat
        mask = self.edge_var < self.k
        return self.edge_var[mask], self.edge_check[mask]

    def _build_encoder(self):
        ira = self._detect_dual_diagonal()
        if ira is not None:
            self._encoder = ("ira", ira)
            return
        # GF(2) Gaussian elimination; prefer rightmost columns as pivots so
        # info bits stay at the front when the matrix allows it.
        w = np.zeros((self.m_checks, self.n), dtype=np.uint8)
        for c, row in enumerate(self.check_neighbors):
            w[c, row] = 1
        pivot_cols: list[int] = []
        row = 0
        for col in range(self.n - 1, -1, -1):
            if row >= self.m_checks:
                break
            hits = np.flatnonzero(w[row:, col]) + row
            if hits.size == 0:
                continue
            if hits[0] != row:
                w[[row, hits[0]]] = w[[hits[0], row]]
            others = np.flatnonzero(w[:, col])
            others = others[others != row]
            if others.size:
                w[others] ^= w[row]
            pivot_cols.append(col)
            row += 1
        if row < self.m_checks:
            raise ValueError(
                "parity-check matrix is rank deficient; no systematic encoder"
            )
        pivots = np.array(pivot_cols)
        info_positions = np.setdiff1d(np.arange(self.n), pivots)
        self._encoder = ("dense", (info_positions, pivots, w[:, info_positions]))

    @property
    def info_positions(self) -> np.ndarray:
        """Columns holding information bits in encoded codewords."""
        if self._encoder is None:
            self._build_encoder()
        if self._encoder[0] == "ira":
            return np.arange(self.k)
        return self._encoder[1][0]

    def encode(self, info_bits: np.ndarray) -> np.ndarray:
        """Encode info bits (k,) or a batch (num, k) into codewords."""
        if self._encoder is None:
            self._build_encoder()
        u = np.asarray(info_bits, dtype=np.uint8)
        single = u.ndim == 1
        u = np.atleast_2d(u)
        if u.shape[1] != self.k:
            raise ValueError(f"expected {self.k} info bits, got {u.shape[1]}")
        out = np.zeros((u.shape[0], self.n), dtype=np.uint8)
        kind, data = self._encoder
        if kind == "ira":
            evar, echk = data
            sums = np.zeros((u.shape[0], self.m_checks), dtype=np.int64)
            np.add.at(sums.T, echk, u[:, evar].T)
            parity = (np.cumsum(sums, axis=1) & 1).astype(np.uint8)
            out[:, : self.k] = u
            out[:, self.k :] = parity
        else:
            info_positions, pivots, table = data
            parity = (u.astype(np.int64) @ table.T.astype(np.int64)) & 1
            out[:, info_positions] = u
            out[:, pivots] = parity.astype(np.uint8)
        return out[0] if single else out


@dataclass
class DecodeResult:
    hard_bits: np.ndarray
    posterior: np.ndarray
    extrinsic: np.ndarray
    converged: bool
    iterations: int


class LdpcDecoder:
    """Flooding BP decoder over flat edge arrays, reusable across calls."""

    def __init__(self, code: LdpcCode, max_iters: int = 50, variant: str = "sumprod"):
        if variant not in ("sumprod", "minsum"):
            raise ValueError(f"variant must be 'sumprod' or 'minsum', got {variant!r}")
        if max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {max_iters}")
        self.code = code
        self.max_iters = int(max_iters)
        self.variant = variant
        # check-major edge order is native; build the var-major view
        self._to_var_order = np.argsort(code.edge_var, kind="stable")
        self._var_starts = np.concatenate(([0], np.cumsum(code.var_degrees)[:-1]))
        self._edge_var = code.edge_var
        self._edge_check = code.edge_check
        self._check_starts = code.check_starts

    def decode(self, channel_llr: np.ndarray, max_iters: int | None = None) -> DecodeResult:
        code = self.code
        ch = np.asarray(channel_llr, dtype=np.float64)
        if ch.shape != (code.n,):
            raise ValueError(f"expected {code.n} LLRs, got shape {ch.shape}")
        iters = self.max_iters if max_iters is None else max_iters
        c2v = np.zeros(code.edge_var.size)
        posterior = ch.copy()
        hard = (posterior < 0).astype(np.uint8)
        converged = False
        it = 0
        for it in range(1, iters + 1):
            sums = np.add.reduceat(c2v[self._to_var_order], self._var_starts)
            posterior = ch + sums
            hard = (posterior < 0).astype(np.uint8)
            if not np.any(
                np.bitwise_xor.reduceat(hard[self._edge_var], self._check_starts)
            ):
                converged = True
                break
            v2c = posterior[self._edge_var] - c2v
            c2v = self._check_update(v2c)
        extrinsic = posterior - ch
        return DecodeResult(hard, posterior, extrinsic, converged, it)

    def _check_update(self, v2c: np.ndarray) -> np.ndarray:
        neg = v2c < 0
        neg_counts = np.add.reduceat(neg.astype(np.int64), self._check_starts)
        sign = np.where((neg_counts[self._edge_check] - neg) & 1, -1.0, 1.0)
        if self.variant == "minsum":
            a = np.abs(np.clip(v2c, -LLR_CLIP, LLR_CLIP))
            m1 = np.minimum.reduceat(a, self._check_starts)
            at_min = a == m1[self._edge_check]
            n_min = np.add.reduceat(at_min.astype(np.int64), self._check_starts)
            m2 = np.minimum.reduceat(np.where(at_min, np.inf, a), self._check_starts)
            mag = np.where(
                at_min & (n_min[self._edge_check] == 1),
                m2[self._edge_check],
                m1[self._edge_check],
            )
            return sign * np.minimum(mag, LLR_CLIP)
        t = np.tanh(0.5 * np.clip(v2c, -LLR_CLIP, LLR_CLIP))
        # floor |tanh| so zero-LLR edges keep the algebra finite; their
        # outgoing effect still rounds to exactly zero where it should
        log_mag = np.log(np.maximum(np.abs(t), _TINY))
        seg = np.add.reduceat(log_mag, self._check_starts)
        excl = np.minimum(seg[self._edge_check] - log_mag, 0.0)
        # 2*atanh(exp(excl)) written to stay accurate as excl -> 0
        mag = np.log1p(np.exp(excl)) - np.log(np.maximum(-np.expm1(excl), _TINY))
        return sign * np.minimum(mag, LLR_CLIP)


def syndrome(code: LdpcCode, bits: np.ndarray) -> np.ndarray:
    """Module-level alias for LdpcCode.syndrome."""
    return code.syndrome(bits)


def encode(code: LdpcCode, info_bits: np.ndarray) -> np.ndarray:
    """Module-level alias for LdpcCode.encode."""
    return code.encode(info_bits)


def bp_decode(
    code: LdpcCode,
    channel_llr: np.ndarray,
    max_iters: int = 50,
    variant: str = "sumprod",
) -> DecodeResult:
    """One-shot BP decode; builds a decoder on the fly."""
    return LdpcDecoder(code, max_iters=max_iters, variant=variant).decode(channel_llr)


# -- alist I/O -------------------------------------------------------------


def load_alist(path) -> LdpcCode:
    """Read a parity-check matrix in alist format.

    Layout: "n m" / "max_dv max_dc" / n column degrees / m row degrees /
    n column neighbor lists / m row neighbor lists, all 1-based; rows may
    be zero-padded to the maximum degree.
    """
    with open(path) as fh:
        rows = [line.split() for line in fh if line.strip()]
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        col_deg = [int(x) for x in rows[2][:n]]
        row_deg = [int(x) for x in rows[3][:m]]
        col_rows = rows[4 : 4 + n]
        row_rows = rows[4 + n : 4 + n + m]
        if len(col_rows) < n or len(row_rows) < m:
            raise IndexError
        check_neighbors = []
        for c in range(m):
            ids = [int(x) for x in row_rows[c] if int(x) != 0]
            if len(ids) != row_deg[c]:
                raise ValueError(
                    f"row {c}: degree {row_deg[c]} but {len(ids)} entries"
                )
            check_neighbors.append([i - 1 for i in ids])
        # cross-check the column view against the row view
        code = LdpcCode(n, m, check_neighbors)
        for v in range(n):
            ids = sorted(int(x) - 1 for x in col_rows[v] if int(x) != 0)
            if len(ids) != col_deg[v] or not np.array_equal(
                np.asarray(ids), code.var_neighbors[v]
            ):
                raise ValueError(f"column {v} disagrees with the row lists")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed alist file {path}: {exc}") from exc
    return code


def save_alist(code: LdpcCode, path) -> None:
    """Write the matrix in alist format (rows zero-padded to max degree)."""
    max_dv = int(code.var_degrees.max())
    max_dc = int(code.check_degrees.max())
    lines = [
        f"{code.n} {code.m_checks}",
        f"{max_dv} {max_dc}",
        " ".join(str(int(d)) for d in code.var_degrees),
        " ".join(str(int(d)) for d in code.check_degrees),
    ]
    for v in range(code.n):
        ids = [str(c + 1) for c in code.var_neighbors[v]]
        lines.append(" ".join(ids + ["0"] * (max_dv - len(ids))))
    for c in range(code.m_checks):
        ids = [str(v + 1) for v in code.check_neighbors[c]]
        lines.append(" ".join(ids + ["0"] * (max_dc - len(ids))))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- PEG construction -------------------------------------------------------


def peg_construct(
    n_vars: int, n_checks: int, var_degrees, seed: int = 1
) -> LdpcCode:
    """Progressive edge growth: greedily place edges maximizing local girth.

    Each new edge for a variable lands on a check outside the variable's
    current BFS reach (breaking ties by lowest check degree, then by a
    seeded draw), which avoids 4-cycles whenever the graph leaves room.

    Args:
        n_vars: number of variable nodes.
        n_checks: number of check nodes.
        var_degrees: one degree for all variables, or a per-variable list.
        seed: tie-break RNG seed; the same seed reproduces the edge set.
    """
    if np.isscalar(var_degrees):
        degrees = np.full(n_vars, int(var_degrees))
    else:
        degrees = np.asarray(var_degrees, dtype=np.int64)
        if degrees.shape != (n_vars,):
            raise ValueError("var_degrees must be scalar or length n_vars")
    if np.any(degrees < 1) or np.any(degrees > n_checks):
        raise ValueError("variable degrees must lie in [1, n_checks]")
    rng = np.random.default_rng(seed)
    var_adj: list[list[int]] = [[] for _ in range(n_vars)]
    chk_adj: list[list[int]] = [[] for _ in range(n_checks)]
    chk_deg = np.zeros(n_checks, dtype=np.int64)

    def pick(candidates: np.ndarray) -> int:
        degs = chk_deg[candidates]
        lows = candidates[degs == degs.min()]
        return int(lows[rng.integers(lows.size)])

    for v in range(n_vars):
        for edge_i in range(int(degrees[v])):
            if edge_i == 0:
                c = pick(np.arange(n_checks))
            else:
                reach = np.zeros(n_checks, dtype=bool)
                seen_v = np.zeros(n_vars, dtype=bool)
                seen_v[v] = True
                frontier = list(var_adj[v])
                reach[frontier] = True
                while True:
                    new_vars = []
                    for cc in frontier:
                        for vv in chk_adj[cc]:
                            if not seen_v[vv]:
                                seen_v[vv] = True
                                new_vars.append(vv)
                    new_checks = []
                    for vv in new_vars:
                        for cc in var_adj[vv]:
                            if not reach[cc]:
                                new_checks.append(cc)
                    if not new_checks:
                        break
                    if reach.sum() + len(set(new_checks)) >= n_checks:
                        # expanding further would cover every check; stop
                        # one level early so a cycle-free candidate remains
                        break
                    reach[new_checks] = True
                    frontier = new_checks
                outside = np.flatnonzero(~reach)
                c = pick(outside if outside.size else np.arange(n_checks))
            var_adj[v].append(c)
            chk_adj[c].append(v)
            chk_deg[c] += 1
    if np.any(chk_deg == 0):
        raise ValueError("construction left a check unconnected; add degrees")
    return LdpcCode(n_vars, n_checks, [sorted(a) for a in chk_adj])
