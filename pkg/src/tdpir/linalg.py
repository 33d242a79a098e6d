"""Exact dense linear algebra over prime fields GF(p).

Matrices are plain 2-D integer numpy arrays with entries in [0, p).  Over
GF(2) the reduction runs on bit-packed rows.  Every rank, echelon form and
kernel uses the leftmost-pivot convention, so results are canonical.

``rank_p`` also accepts an iterable of row chunks, which is how the large
incidence matrices are reduced without ever being held in memory at once:
only the (at most ``ncols``) pivot rows are kept.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

import numpy as np

from . import kernels


class RowReducer:
    """Incrementally maintained row space of a GF(p) matrix.

    Rows can be fed as unpacked arrays (``add_rows``) or, for p = 2, as
    packed uint64 words (``add_packed``).
    """

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.rank = 0
        self.slot_of_col = np.full(ncols, -1, dtype=np.int64)
        if p == 2:
            self.basis = np.zeros((ncols, kernels.nwords(ncols)), dtype=np.uint64)
            self.pivmask = np.zeros(kernels.nwords(ncols), dtype=np.uint64)
        else:
            self.basis = np.zeros((ncols, ncols), dtype=np.int64)

    @property
    def full(self) -> bool:
        return self.rank == self.ncols

    def add_rows(self, rows) -> int:
        rows = np.atleast_2d(np.asarray(rows))
        if rows.size == 0:
            return self.rank
        if rows.shape[1] != self.ncols:
            raise ValueError(f"expected {self.ncols} columns, got {rows.shape[1]}")
        if self.p == 2:
            return self.add_packed(kernels.pack_bits(rows % 2))
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.rank = kernels.gfp_absorb(self.basis, self.slot_of_col, self.rank, rows, self.p)
        return self.rank

    def add_packed(self, words: np.ndarray) -> int:
        if self.p != 2:
            raise ValueError("packed rows are only meaningful over GF(2)")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        self.rank = kernels.gf2_absorb(self.basis, self.slot_of_col, self.pivmask, self.rank, words)
        return self.rank

    def echelon(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero rows of the reduced row-echelon form, and pivot columns."""
        if self.p == 2:
            words = self.basis[: self.rank].copy()
            r, piv = kernels.gf2_rref(words, self.ncols)
            return kernels.unpack_bits(words[:r], self.ncols).astype(np.int64), piv
        mat = self.basis[: self.rank].copy()
        r, piv = kernels.gfp_rref(mat, self.p)
        return mat[:r], piv


def _reducer_for(M, p: int, ncols: int | None = None) -> RowReducer:
    # arrays and nested lists are matrices; any other iterable is a chunk stream
    if isinstance(M, (np.ndarray, list, tuple)):
        M = np.atleast_2d(np.asarray(M, dtype=np.int64))
        red = RowReducer(M.shape[1], p)
        red.add_rows(M)
        return red
    red = None
    for chunk in M:
        chunk = np.atleast_2d(np.asarray(chunk))
        if red is None:
            red = RowReducer(ncols if ncols is not None else chunk.shape[1], p)
        if not red.full:
            red.add_rows(chunk)
    if red is None:
        if ncols is None:
            raise ValueError("empty row iterator needs an explicit ncols")
        red = RowReducer(ncols, p)
    return red


def rank_p(M, p: int, ncols: int | None = None) -> int:
    """Rank over GF(p) of a matrix or of a stream of row chunks."""
    return _reducer_for(M, p, ncols).rank


def rref(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form (same shape as ``M``) and pivot columns."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64)) % p
    R = np.zeros_like(M)
    if M.shape[0] == 0 or M.shape[1] == 0:
        return R, []
    rows, piv = _reducer_for(M, p).echelon()
    R[: rows.shape[0]] = rows
    return R, [int(c) for c in piv]


def kernel_from_echelon(rows: np.ndarray, pivots, ncols: int, p: int) -> np.ndarray:
    """Right-kernel basis read off an RREF: one row per free column."""
    pivots = np.asarray(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(ncols), pivots)
    K = np.zeros((free.size, ncols), dtype=np.int64)
    K[np.arange(free.size), free] = 1
    if pivots.size:
        K[:, pivots] = (-rows[: pivots.size][:, free].T) % p
    return K


def right_kernel_basis(M, p: int) -> np.ndarray:
    """Basis of {c : M c^T = 0}, ordered by free-column index."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    rows, piv = _reducer_for(M % p, p).echelon()
    return kernel_from_echelon(rows, piv, ncols, p)


def matmul_mod(A, B, p: int) -> np.ndarray:
    """A @ B over GF(p); float64 BLAS is exact while sums stay below 2**53."""
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    if inner * (p - 1) ** 2 < 2**52:
        out = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.mod(out, p).astype(np.int64)
    return (np.asarray(A, dtype=object) @ np.asarray(B, dtype=object) % p).astype(np.int64)


class RankDeficientError(ValueError):
    pass


def systematic_encoder(G, p: int) -> tuple[list[int], Callable[[np.ndarray], np.ndarray]]:
    """Information set and systematic encoder for the row space of ``G``.

    ``encode`` maps a message (or a stack of messages on the leading axes)
    to the unique codeword that equals the message on ``sigma``.
    """
    G = np.atleast_2d(np.asarray(G, dtype=np.int64)) % p
    k = G.shape[0]
    R, sigma = rref(G, p)
    if len(sigma) != k:
        raise RankDeficientError(f"generator has rank {len(sigma)} < {k} rows")
    E = R[:k]

    def encode(msg):
        msg = np.asarray(msg, dtype=np.int64) % p
        return matmul_mod(msg, E, p)

    return sigma, encode


def row_space_equal(A, B, p: int) -> bool:
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    B = np.atleast_2d(np.asarray(B, dtype=np.int64))
    if A.shape[1] != B.shape[1]:
        raise ValueError("row spaces live in different ambient dimensions")
    ra, rb = rank_p(A, p), rank_p(B, p)
    return ra == rb == rank_p(np.vstack([A, B]), p)


def in_row_space(v, M, p: int) -> bool:
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    return rank_p(np.vstack([M, np.atleast_2d(v)]), p) == rank_p(M, p)


def naive_rank(M, p: int) -> int:
    """Unoptimised textbook elimination; an independent oracle for tests."""
    A = [[int(x) % p for x in row] for row in np.atleast_2d(np.asarray(M))]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], p - 2, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def iter_chunks(rows: Iterable, size: int):
    """Group an iterable of 1-D rows into 2-D chunks of ``size`` rows."""
    buf = []
    for r in rows:
        buf.append(r)
        if len(buf) == size:
            yield np.array(buf)
            buf = []
    if buf:
        yield np.array(buf)
