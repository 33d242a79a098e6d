"""Codes of transversal designs: the kernel of the incidence matrix.

Codes are held by a generator over the prime field GF(p); a target field
GF(p^e) only changes the symbol alphabet, and encoding acts digit-wise.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .basecodes import LinearCode, codewords, is_p_divisible, oa_from_code, puncture, rs
from .design import (
    TransversalDesign,
    incidence_matrix,
    incidence_packed_chunks,
    iter_block_chunks,
    td_from_oa,
)
from .ff import FieldSpec, field_new, from_digits, to_digits
from .linalg import (
    RowReducer,
    kernel_from_echelon,
    matmul_mod,
    rank_p,
    right_kernel_basis,
    row_space_equal,
    rref,
    systematic_encoder,
)


class IncidenceCodeError(ValueError):
    pass


@dataclass(eq=False)
class IncidenceCode:
    F: FieldSpec
    design: TransversalDesign = field(repr=False)
    generator: np.ndarray = field(repr=False)  # k x n over GF(p)
    sigma: list[int] = field(repr=False)
    encoder: np.ndarray = field(repr=False)  # systematic generator, identity on sigma
    incidence_rank: int = 0

    @property
    def p(self) -> int:
        return self.F.p

    @property
    def n(self) -> int:
        return self.design.npoints

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def ell(self) -> int:
        return self.design.ell

    @property
    def s(self) -> int:
        return self.design.s

    @property
    def lam(self) -> int:
        return self.design.lam

    @property
    def t(self) -> int:
        return self.design.strength

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __repr__(self) -> str:
        return (
            f"<IncidenceCode n={self.n} k={self.k} over {self.F} "
            f"(ell={self.ell}, s={self.s}, t={self.t})>"
        )


def _reduce_design(D: TransversalDesign, p: int, chunk: int = 4096) -> RowReducer:
    red = RowReducer(D.npoints, p)
    if p == 2:
        for words in incidence_packed_chunks(D, chunk):
            if red.full:
                break
            red.add_packed(words)
        return red
    for blocks in iter_block_chunks(D, chunk):
        if red.full:
            break
        rows = np.zeros((blocks.shape[0], D.npoints), dtype=np.int64)
        rows[np.repeat(np.arange(blocks.shape[0]), D.ell), blocks.ravel()] = 1
        red.add_rows(rows)
    return red


def design_rank(D: TransversalDesign, p: int) -> int:
    """p-rank of the incidence matrix, streamed over block chunks."""
    return _reduce_design(D, p).rank


def code_of_design(D: TransversalDesign, F: FieldSpec) -> IncidenceCode:
    """The code with the incidence matrix of ``D`` as parity-check matrix."""
    p = F.p
    red = _reduce_design(D, p)
    rows, piv = red.echelon()
    G = kernel_from_echelon(rows, piv, D.npoints, p)
    if G.shape[0] == 0:
        return IncidenceCode(F, D, G, [], G.copy(), red.rank)
    sigma, _ = systematic_encoder(G, p)
    E = rref(G, p)[0][: G.shape[0]]
    return IncidenceCode(F, D, G, sigma, E, red.rank)


def incidence_code(C0: LinearCode, F: FieldSpec | None = None) -> IncidenceCode:
    """The code of the transversal design of C0's codewords."""
    F = F or field_new(C0.F.p)
    return code_of_design(td_from_oa(oa_from_code(C0)), F)


def encode(C: IncidenceCode, msg) -> np.ndarray:
    """Systematic encoding of GF(p^e) messages (shape (..., k)) to codewords."""
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape[-1] != C.k:
        raise IncidenceCodeError(f"message length {msg.shape[-1]} != k = {C.k}")
    if C.F.e == 1:
        return matmul_mod(msg, C.encoder, C.p)
    digits = to_digits(C.F, msg)  # (..., k, e)
    planes = [matmul_mod(digits[..., d], C.encoder, C.p) for d in range(C.F.e)]
    return from_digits(C.F, np.stack(planes, axis=-1))


def parity_holds(C: IncidenceCode, word=None, chunk: int = 4096) -> bool:
    """Every block sums to zero on ``word`` (default: on every generator row).

    Over GF(p^e) the block sums are taken digit-wise.
    """
    if word is None:
        W = C.generator.T
    else:
        W = to_digits(C.F, np.asarray(word, dtype=np.int64))  # (n, e)
    for blocks in iter_block_chunks(C.design, chunk):
        sums = W[blocks].sum(axis=1) % C.p
        if np.any(sums):
            return False
    return True


def is_groupwise_constant(C: IncidenceCode) -> bool:
    G = C.generator.reshape(C.k, C.ell, C.s)
    return bool(np.all(G == G[:, :, :1]))


def group_constancy_expected(C: IncidenceCode) -> bool:
    """When p does not divide lam * s, every codeword is constant on groups."""
    return (C.lam * C.s) % C.p != 0


# -- divisible base codes --

@dataclass
class DivisibilityReport:
    gram_identity: bool
    perp_cap_parity_in_code: bool
    perp_in_code: bool | None  # only asserted when p | ell
    dim: int
    length: int
    bound: float
    detail: str = ""

    @property
    def dim_bound_ok(self) -> bool:
        return self.dim >= self.bound

    @property
    def ok(self) -> bool:
        return (
            self.gram_identity
            and self.perp_cap_parity_in_code
            and self.perp_in_code is not False
            and self.dim_bound_ok
        )


def gram_identity_holds(C0: LinearCode, chunk: int = 512) -> bool:
    """(M M^T)[c, c'] = ell - d(c, c') with rows of M indexed by codewords."""
    words = codewords(C0)
    D = td_from_oa(oa_from_code(C0), sort=False)
    M = incidence_matrix(D).astype(np.int32)
    for a in range(0, words.shape[0], chunk):
        gram = M[a : a + chunk] @ M.T
        agree = (words[a : a + chunk, None, :] == words[None, :, :]).sum(axis=2)
        if not np.array_equal(gram, agree):
            return False
    return True


def _in_code(C: IncidenceCode, rows: np.ndarray) -> bool:
    if rows.size == 0:
        return True
    for blocks in iter_block_chunks(C.design, 4096):
        if np.any(rows[:, blocks].sum(axis=2) % C.p):
            return False
    return True


def check_divisibility_bounds(C: IncidenceCode, C0: LinearCode) -> DivisibilityReport:
    p = C.p
    if not is_p_divisible(C0, p):
        raise IncidenceCodeError(f"base code is not {p}-divisible")
    gram = gram_identity_holds(C0)

    # row space of M is the dual code; its basis is the RREF of M
    basis, _ = _reduce_design(C.design, p).echelon()
    sums = basis.sum(axis=1) % p
    nz = np.flatnonzero(sums)
    if nz.size == 0:
        inter = basis
    else:
        j = nz[0]
        inv = pow(int(sums[j]), p - 2, p)
        others = np.delete(np.arange(basis.shape[0]), j)
        coef = (sums[others] * inv) % p
        inter = (basis[others] - coef[:, None] * basis[j][None, :]) % p
    cap_ok = _in_code(C, inter)

    perp_ok = None
    bound = (C.n - 1) / 2
    if C.ell % p == 0:
        perp_ok = _in_code(C, basis)
        bound = C.n / 2
    return DivisibilityReport(gram, cap_ok, perp_ok, C.k, C.n, bound)


# -- Reed-Solomon census --

def _census_worker(args):
    M, q, subsets, p = args
    out = Counter()
    ell = len(subsets[0]) if subsets else 0
    for x in subsets:
        cols = (np.asarray(x)[:, None] * q + np.arange(q)[None, :]).ravel()
        sub = M[:, cols]
        out[ell * q - rank_p(sub, p)] += 1
    return out


def _rs2_full_incidence(F: FieldSpec) -> np.ndarray:
    words = codewords(rs(2, F))
    q = F.q
    M = np.zeros((words.shape[0], q * q), dtype=np.uint8)
    rows = np.repeat(np.arange(words.shape[0]), q)
    M[rows, (words + q * np.arange(q)[None, :]).ravel()] = 1
    return M


def rs2_dimension_census(F: FieldSpec, ell: int, workers: int | None = None) -> dict[int, int]:
    """Histogram {dim: count} of the incidence code of RS_2(x) over all ell-subsets x of F.

    Evaluating RS_2 on a subset keeps all q^2 codewords distinct (ell >= 2),
    so each incidence matrix is a column selection of the full one.
    """
    if not 2 <= ell <= F.q:
        raise IncidenceCodeError("need 2 <= ell <= q")
    M = _rs2_full_incidence(F)
    subsets = list(itertools.combinations(range(F.q), ell))
    if workers is None or workers <= 1 or len(subsets) < 64:
        hist = _census_worker((M, F.q, subsets, F.p))
    else:
        n = workers * 4
        parts = [subsets[i::n] for i in range(n)]
        hist = Counter()
        with ProcessPoolExecutor(workers) as ex:
            for h in ex.map(_census_worker, [(M, F.q, part, F.p) for part in parts if part]):
                hist.update(h)
    return dict(sorted(hist.items(), reverse=True))


# -- shortening --

def shorten_generator(G: np.ndarray, drop_cols, p: int) -> np.ndarray:
    """Generator of {c in rowspace(G) : c[drop_cols] = 0} with those columns removed."""
    drop = np.asarray(sorted(drop_cols), dtype=np.int64)
    keep = np.setdiff1d(np.arange(G.shape[1]), drop)
    if drop.size == 0:
        return G.copy()
    U = right_kernel_basis(G[:, drop].T, p)  # u with u G[:, drop] = 0
    if U.shape[0] == 0:
        return np.zeros((0, keep.size), dtype=np.int64)
    return matmul_mod(U, G, p)[:, keep]


def check_shortening_lemma(C0: LinearCode, positions, F: FieldSpec | None = None) -> bool:
    """IC(C0 punctured at ``positions``) equals IC(C0) shortened on the
    point columns of the groups indexed by ``positions``."""
    F = F or field_new(C0.F.p)
    positions = sorted(set(int(i) for i in positions))
    full = incidence_code(C0, F)
    if not positions:
        return True
    small = incidence_code(puncture(C0, positions), F)
    s = full.s
    drop = [g * s + r for g in positions for r in range(s)]
    short = shorten_generator(full.generator, drop, F.p)
    if short.shape[0] == 0 or small.k == 0:
        return short.shape[0] == small.k == 0
    return row_space_equal(short, small.generator, F.p)


def expected_rate_affine_plane(p: int, e: int) -> tuple[int, int]:
    """(n, k) of the code of td_affine(2, p^e) from the exact rate identity."""
    n = p ** (2 * e)
    return n, n - comb(p + 1, 2) ** e

