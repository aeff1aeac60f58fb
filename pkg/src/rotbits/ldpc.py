"""Binary LDPC codes: PEG construction, systematic encoding, syndromes and
sum-product decoding.

The parity-check matrix is stored as sparse row/column index lists. The hot
loops (PEG tree expansion, flooding SPA) are compiled with numba.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba as nb
import numpy as np

LLR_CLAMP = 30.0
TANH_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Sparse binary M x N parity-check matrix.

    ``rows[i]`` holds the sorted variable indices of check ``i`` and
    ``cols[j]`` the sorted check indices of variable ``j``. Both views are
    validated against each other on construction.
    """

    n_cols: int
    n_rows: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows or len(self.cols) != self.n_cols:
            raise ValueError("row/column list count does not match matrix shape")
        for name, lists, bound in (("row", self.rows, self.n_cols), ("column", self.cols, self.n_rows)):
            for idx, entries in enumerate(lists):
                if len(set(entries)) != len(entries):
                    raise ValueError(f"duplicate index in {name} {idx}")
                if any(e < 0 or e >= bound for e in entries):
                    raise ValueError(f"index out of range in {name} {idx}")
        transposed = [[] for _ in range(self.n_cols)]
        for i, entries in enumerate(self.rows):
            for j in entries:
                transposed[j].append(i)
        if any(sorted(t) != list(c) for t, c in zip(transposed, self.cols)):
            raise ValueError("row and column index lists are inconsistent")

    @classmethod
    def from_rows(cls, n_cols, rows):
        rows = tuple(tuple(sorted(int(j) for j in r)) for r in rows)
        cols = [[] for _ in range(n_cols)]
        for i, r in enumerate(rows):
            for j in r:
                if not 0 <= j < n_cols:
                    raise ValueError(f"index out of range in row {i}")
                cols[j].append(i)
        return cls(n_cols, len(rows), rows, tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, h):
        h = np.asarray(h)
        if h.ndim != 2 or not np.isin(h, (0, 1)).all():
            raise ValueError("dense parity-check matrix must be a 2-D 0/1 array")
        return cls.from_rows(h.shape[1], [np.flatnonzero(r).tolist() for r in h])

    def to_dense(self):
        h = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            h[i, list(r)] = 1
        return h

    @property
    def nnz(self):
        """Number of nonzero entries (delta)."""
        return int(sum(len(r) for r in self.rows))

    @property
    def col_degrees(self):
        return np.array([len(c) for c in self.cols])

    @property
    def row_degrees(self):
        return np.array([len(r) for r in self.rows])

    def regularity(self):
        """Return ``(gamma, rho)`` if the matrix is regular, else ``None``."""
        cd, rd = set(self.col_degrees.tolist()), set(self.row_degrees.tolist())
        if len(cd) == 1 and len(rd) == 1:
            return cd.pop(), rd.pop()
        return None

    @cached_property
    def _edges(self):
        # edges ordered by check; edge_var[e] is the variable of edge e
        check_ptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        check_ptr[1:] = np.cumsum([len(r) for r in self.rows])
        edge_var = np.fromiter((j for r in self.rows for j in r), dtype=np.int64, count=int(check_ptr[-1]))
        return check_ptr, edge_var

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (self.n_cols, self.n_rows, self.rows) == (other.n_cols, other.n_rows, other.rows)

    def __hash__(self):
        return hash((self.n_cols, self.n_rows, self.rows))


# ---------------------------------------------------------------------------
# PEG construction
# ---------------------------------------------------------------------------


@nb.njit(cache=True)
def _peg_kernel(n_vars, n_checks, col_degree, row_degree, rank):
    var_checks = np.full((n_vars, col_degree), -1, dtype=np.int64)
    check_vars = np.full((n_checks, row_degree), -1, dtype=np.int64)
    var_deg = np.zeros(n_vars, dtype=np.int64)
    check_deg = np.zeros(n_checks, dtype=np.int64)
    check_mark = np.zeros(n_checks, dtype=np.int64)
    var_mark = np.zeros(n_vars, dtype=np.int64)
    frontier = np.empty(n_checks, dtype=np.int64)
    nxt = np.empty(n_checks, dtype=np.int64)
    stamp = 0
    n_avail = n_checks

    for v in range(n_vars):
        for k in range(col_degree):
            stamp += 1
            var_mark[v] = stamp
            n_front = 0
            reached_avail = 0
            for a in range(var_deg[v]):
                c = var_checks[v, a]
                check_mark[c] = stamp
                frontier[n_front] = c
                n_front += 1
                if check_deg[c] < row_degree:
                    reached_avail += 1
            if reached_avail == n_avail:
                return var_checks, check_vars, v
            # expand the tree until it stops growing or covers every open check
            use_frontier = False
            while True:
                n_next = 0
                new_avail = 0
                for f in range(n_front):
                    c = frontier[f]
                    for b in range(check_deg[c]):
                        u = check_vars[c, b]
                        if var_mark[u] == stamp:
                            continue
                        var_mark[u] = stamp
                        for a in range(var_deg[u]):
                            c2 = var_checks[u, a]
                            if check_mark[c2] != stamp:
                                check_mark[c2] = stamp
                                nxt[n_next] = c2
                                n_next += 1
                                if check_deg[c2] < row_degree:
                                    new_avail += 1
                if n_next == 0:
                    break
                if reached_avail + new_avail == n_avail:
                    use_frontier = True
                    for f in range(n_next):
                        frontier[f] = nxt[f]
                    n_front = n_next
                    break
                reached_avail += new_avail
                for f in range(n_next):
                    frontier[f] = nxt[f]
                n_front = n_next

            best = -1
            if use_frontier:
                # every open check is reachable: pick among the deepest level
                for f in range(n_front):
                    c = frontier[f]
                    if check_deg[c] >= row_degree:
                        continue
                    if best < 0 or check_deg[c] < check_deg[best] or (
                        check_deg[c] == check_deg[best] and rank[c] < rank[best]
                    ):
                        best = c
            else:
                for c in range(n_checks):
                    if check_mark[c] == stamp or check_deg[c] >= row_degree:
                        continue
                    if best < 0 or check_deg[c] < check_deg[best] or (
                        check_deg[c] == check_deg[best] and rank[c] < rank[best]
                    ):
                        best = c

            var_checks[v, var_deg[v]] = best
            var_deg[v] += 1
            check_vars[best, check_deg[best]] = v
            check_deg[best] += 1
            if check_deg[best] == row_degree:
                n_avail -= 1
    return var_checks, check_vars, -1


def _regular_row_degree(n_vars, n_checks, col_degree):
    if not 0 < n_checks < n_vars:
        raise ValueError("need 0 < n_checks < n_vars")
    if col_degree < 1 or col_degree > n_checks:
        raise ValueError("column degree must lie in 1..n_checks")
    if (n_vars * col_degree) % n_checks:
        raise ValueError(
            f"n_vars*col_degree = {n_vars * col_degree} is not divisible by n_checks = {n_checks}; "
            "no regular row degree exists"
        )
    row_degree = n_vars * col_degree // n_checks
    if row_degree > n_vars:
        raise ValueError("row degree exceeds code length")
    return row_degree


def peg_construct(n_vars, n_checks, col_degree, seed=0):
    """Build a regular parity-check matrix with progressive edge growth.

    Edges are placed variable by variable in increasing index order. Each new
    edge goes to a check outside the current computation tree of the variable
    (or at its deepest level once every open check is reachable), choosing the
    lowest-degree candidate. Remaining ties go to the lowest check index under
    a seed-driven relabeling of the checks. Checks that already hold
    ``n_vars * col_degree / n_checks`` edges are closed, which keeps the row
    degree exactly regular.

    Parameters
    ----------
    n_vars : int
        Code length N.
    n_checks : int
        Number of parity checks M, ``M < N``.
    col_degree : int
        Variable-node degree gamma.
    seed : int
        Seed for the tie-breaking check relabeling.

    Returns
    -------
    ParityCheckMatrix
        A (gamma, rho)-regular matrix.

    Raises
    ------
    ValueError
        If the degree sequence cannot be regular, or greedy placement runs out
        of open checks for some variable.
    """
    row_degree = _regular_row_degree(n_vars, n_checks, col_degree)
    rng = np.random.default_rng(seed)
    rank = rng.permutation(n_checks).astype(np.int64)
    var_checks, check_vars, stuck = _peg_kernel(n_vars, n_checks, col_degree, row_degree, rank)
    if stuck >= 0:
        raise ValueError(f"PEG placement ran out of open checks at variable {stuck}")
    return ParityCheckMatrix.from_rows(n_vars, [sorted(r) for r in check_vars.tolist()])


def four_cycle_count(h):
    """Count 4-cycles: pairs of checks sharing two or more variables."""
    dense = h.to_dense().astype(np.int64)
    overlap = dense @ dense.T
    iu = np.triu_indices(h.n_rows, k=1)
    o = overlap[iu]
    return int((o * (o - 1) // 2).sum())


# ---------------------------------------------------------------------------
# Systematic encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Encoder:
    """Systematic encoder for a full-rank parity-check matrix.

    ``info_positions`` and ``parity_positions`` index codeword bits in the
    original column order of ``matrix``; ``parity_map`` gives the parity bits
    as ``parity_map @ u mod 2``.
    """

    matrix: ParityCheckMatrix
    info_positions: np.ndarray
    parity_positions: np.ndarray
    parity_map: np.ndarray

    @property
    def n(self):
        return self.matrix.n_cols

    @property
    def k(self):
        return int(self.info_positions.size)

    @property
    def column_permutation(self):
        """Codeword order ``[information | parity]`` as original column indices."""
        return np.concatenate([self.info_positions, self.parity_positions])


def gf2_rref(a):
    """Reduced row echelon form over GF(2) with column pivoting.

    Returns the reduced matrix and the list of pivot columns. The input is not
    modified.
    """
    a = np.array(a, dtype=bool)
    n_rows, n_cols = a.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def build_encoder(h):
    """Derive a systematic encoder for ``h`` by Gauss-Jordan elimination.

    Raises
    ------
    ValueError
        If ``h`` is not of full row rank over GF(2).
    """
    reduced, pivots = gf2_rref(h.to_dense())
    rank = len(pivots)
    if rank < h.n_rows:
        raise ValueError(f"parity-check matrix is rank deficient: rank {rank} < {h.n_rows} rows")
    parity_positions = np.array(pivots, dtype=np.int64)
    mask = np.ones(h.n_cols, dtype=bool)
    mask[parity_positions] = False
    info_positions = np.flatnonzero(mask).astype(np.int64)
    # row i of the reduced matrix reads: c[pivot_i] + sum_j A[i, j] u_j = 0
    parity_map = reduced[:, info_positions].astype(np.int32)
    return Encoder(h, info_positions, parity_positions, parity_map)


def encode(enc, u):
    """Encode information bits ``u`` (length K) into a length-N codeword."""
    u = np.asarray(u)
    if u.shape != (enc.k,):
        raise ValueError(f"expected {enc.k} information bits, got shape {u.shape}")
    c = np.zeros(enc.n, dtype=np.uint8)
    c[enc.info_positions] = u
    c[enc.parity_positions] = (enc.parity_map @ u.astype(np.int32)) & 1
    return c


def extract_info(enc, c):
    """Read the information bits back from a codeword."""
    return np.asarray(c)[enc.info_positions].astype(np.uint8)


@dataclass(frozen=True)
class LdpcCode:
    """A parity-check matrix paired with its encoder."""

    h: ParityCheckMatrix
    encoder: Encoder

    @property
    def n(self):
        return self.h.n_cols

    @property
    def k(self):
        return self.encoder.k

    @property
    def rate(self):
        return self.k / self.n


def peg_code(n_vars, n_checks, col_degree, seed=0, retries=10):
    """PEG-construct a code and its encoder.

    A rank-deficient or stuck construction is retried with ``seed + 1``, up
    to ``retries`` times.
    """
    _regular_row_degree(n_vars, n_checks, col_degree)
    errors = []
    for s in range(seed, seed + retries + 1):
        try:
            h = peg_construct(n_vars, n_checks, col_degree, s)
            return LdpcCode(h, build_encoder(h))
        except ValueError as exc:
            errors.append(f"seed {s}: {exc}")
    raise ValueError("PEG construction failed after retries: " + "; ".join(errors))


# ---------------------------------------------------------------------------
# Syndromes and decoding
# ---------------------------------------------------------------------------


def syndrome(c_hat, h):
    """Syndrome vector ``c_hat H^T`` over GF(2)."""
    c_hat = np.asarray(c_hat)
    if c_hat.shape != (h.n_cols,):
        raise ValueError(f"expected {h.n_cols} bits, got shape {c_hat.shape}")
    check_ptr, edge_var = h._edges
    bits = (c_hat[edge_var] & 1).astype(np.int64)
    return (np.add.reduceat(bits, check_ptr[:-1]) & 1).astype(np.uint8) if edge_var.size else np.zeros(h.n_rows, np.uint8)


def syndrome_weight(c_hat, h):
    """Number of unsatisfied parity checks of a hard-decision word."""
    return int(syndrome(c_hat, h).sum())


@dataclass(frozen=True)
class DecodeResult:
    hard_bits: np.ndarray
    converged: bool
    iterations_used: int


@nb.njit(cache=True)
def _syndrome_ok(hard, check_ptr, edge_var):
    for c in range(check_ptr.size - 1):
        acc = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            acc ^= hard[edge_var[e]]
        if acc:
            return False
    return True


@nb.njit(cache=True)
def _spa_kernel(llr, check_ptr, edge_var, max_iters, llr_clamp, tanh_clamp):
    n = llr.size
    n_edges = edge_var.size
    ch = np.minimum(np.maximum(llr, -llr_clamp), llr_clamp)
    post = ch.copy()
    hard = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        hard[i] = 1 if post[i] < 0.0 else 0
    if _syndrome_ok(hard, check_ptr, edge_var):
        return hard, True, 0

    c2v = np.zeros(n_edges)
    t = np.empty(n_edges)
    prefix = np.empty(n_edges + 1)
    for it in range(1, max_iters + 1):
        for e in range(n_edges):
            m = post[edge_var[e]] - c2v[e]
            if m > llr_clamp:
                m = llr_clamp
            elif m < -llr_clamp:
                m = -llr_clamp
            t[e] = np.tanh(0.5 * m)
        for c in range(check_ptr.size - 1):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            # leave-one-out products via prefix and suffix sweeps
            acc = 1.0
            for e in range(lo, hi):
                prefix[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                p = prefix[e] * acc
                acc *= t[e]
                if p > tanh_clamp:
                    p = tanh_clamp
                elif p < -tanh_clamp:
                    p = -tanh_clamp
                c2v[e] = 2.0 * np.arctanh(p)
        for i in range(n):
            post[i] = ch[i]
        for e in range(n_edges):
            post[edge_var[e]] += c2v[e]
        for i in range(n):
            hard[i] = 1 if post[i] < 0.0 else 0
        if _syndrome_ok(hard, check_ptr, edge_var):
            return hard, True, it
    return hard, False, max_iters


def sum_product_decode(llrs, h, max_iters=50):
    """Flooding sum-product decoding.

    Parameters
    ----------
    llrs : array_like of float, shape (N,)
        Channel LLRs, positive meaning bit 0 is more likely.
    h : ParityCheckMatrix
    max_iters : int
        Iteration cap. The hard decision on the channel LLRs is checked first,
        so an input that is already a codeword returns with 0 iterations.

    Returns
    -------
    DecodeResult
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (h.n_cols,):
        raise ValueError(f"expected {h.n_cols} LLRs, got shape {llrs.shape}")
    if not np.isfinite(llrs).all():
        raise ValueError("LLRs must be finite")
    check_ptr, edge_var = h._edges
    hard, ok, iters = _spa_kernel(llrs, check_ptr, edge_var, int(max_iters), LLR_CLAMP, TANH_CLAMP)
    return DecodeResult(hard, bool(ok), int(iters))


# ---------------------------------------------------------------------------
# alist I/O
# ---------------------------------------------------------------------------


class AlistError(ValueError):
    """Malformed alist content; carries the 1-based line number."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_alist(h):
    """Serialize ``h`` in MacKay's alist format (no zero padding)."""
    cd, rd = h.col_degrees, h.row_degrees
    out = [
        f"{h.n_cols} {h.n_rows}",
        f"{int(cd.max(initial=0))} {int(rd.max(initial=0))}",
        " ".join(map(str, cd.tolist())),
        " ".join(map(str, rd.tolist())),
    ]
    out += [" ".join(str(i + 1) for i in c) for c in h.cols]
    out += [" ".join(str(j + 1) for j in r) for r in h.rows]
    return "\n".join(out) + "\n"


def parse_alist(text):
    """Parse alist text into a validated ParityCheckMatrix.

    Zero entries in the index lists are treated as padding. Blank lines are
    skipped but still counted for error line numbers.
    """
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    pos = 0
    last_line = len(text.splitlines())

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(last_line + 1, f"unexpected end of file, expected {what}")
        no, toks = lines[pos]
        pos += 1
        try:
            return no, [int(t) for t in toks]
        except ValueError:
            raise AlistError(no, f"non-integer token in {what}") from None

    no, dims = take("'N M' header")
    if len(dims) != 2 or min(dims) <= 0:
        raise AlistError(no, "header must be two positive integers 'N M'")
    n, m = dims
    no, maxes = take("max degree line")
    if len(maxes) != 2:
        raise AlistError(no, "max degree line must hold two integers")
    no, col_deg = take("column degree list")
    if len(col_deg) != n:
        raise AlistError(no, f"expected {n} column degrees, got {len(col_deg)}")
    no, row_deg = take("row degree list")
    if len(row_deg) != m:
        raise AlistError(no, f"expected {m} row degrees, got {len(row_deg)}")

    def index_lists(count, degrees, bound, kind):
        result = []
        for idx in range(count):
            no, vals = take(f"{kind} {idx + 1} index list")
            entries = [v - 1 for v in vals if v != 0]
            if len(entries) != degrees[idx]:
                raise AlistError(no, f"{kind} {idx + 1} lists {len(entries)} entries, degree says {degrees[idx]}")
            if any(e < 0 or e >= bound for e in entries):
                raise AlistError(no, f"{kind} {idx + 1} has an index outside 1..{bound}")
            if len(set(entries)) != len(entries):
                raise AlistError(no, f"duplicate index in {kind} {idx + 1}")
            result.append(tuple(sorted(entries)))
        return no, result

    _, cols = index_lists(n, col_deg, m, "column")
    no, rows = index_lists(m, row_deg, n, "row")
    try:
        return ParityCheckMatrix(n, m, tuple(rows), tuple(cols))
    except ValueError as exc:
        raise AlistError(no, str(exc)) from None


def export_matrix(h, path):
    with open(path, "w") as f:
        f.write(format_alist(h))


def import_matrix(path):
    with open(path) as f:
        return parse_alist(f.read())
