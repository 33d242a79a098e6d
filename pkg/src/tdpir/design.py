"""Transversal designs, their incidence matrices and brute-force checks.

Points are integers in ``[0, ell * s)`` laid out group-major: point ``x``
lies in group ``x // s`` at local position ``x % s``.  A block meets every
group exactly once, so a design's blocks are stored as an
``(nblocks, ell)`` array whose column ``g`` holds the block's point in
group ``g``.  Constructors sort the block list lexicographically so that
incidence matrices are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .ff import FieldSpec, vadd, vmul

MAX_BLOCKS = 1 << 23


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Outcome of a combinatorial check; truthy iff it passed."""

    ok: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(eq=False)
class BlockDesign:
    """A plain block design: ``npoints`` points and equal-size blocks."""

    npoints: int
    blocks: np.ndarray

    @property
    def nblocks(self) -> int:
        return self.blocks.shape[0]


@dataclass(eq=False)
class TransversalDesign:
    """A t-TD_lambda(ell, s); ``blocks[b, g]`` is block b's point in group g."""

    ell: int
    s: int
    lam: int
    strength: int
    blocks: np.ndarray
    # streaming designs generate their blocks on demand instead
    block_source: Callable | None = None
    nominal_blocks: int | None = None

    def __post_init__(self):
        self.blocks = np.ascontiguousarray(self.blocks, dtype=np.int64)
        if self.blocks.ndim != 2 or self.blocks.shape[1] != self.ell:
            raise DesignError(f"blocks must have shape (nblocks, {self.ell})")

    @property
    def npoints(self) -> int:
        return self.ell * self.s

    @property
    def nblocks(self) -> int:
        if self.block_source is not None:
            return self.nominal_blocks
        return self.blocks.shape[0]

    def group_of(self, point: int) -> int:
        return point // self.s

    def local_index(self, point: int) -> int:
        return point % self.s

    @cached_property
    def point_to_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR index ``(offsets, block_ids)`` of the blocks through each point."""
        flat = self.blocks.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.npoints)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        return offsets, (order // self.ell).astype(np.int64)

    def blocks_through(self, point: int) -> np.ndarray:
        offsets, ids = self.point_to_blocks
        return ids[offsets[point] : offsets[point + 1]]

    def replication(self) -> int:
        """Number of blocks through each point, lambda * s^(t-1)."""
        return self.lam * self.s ** (self.strength - 1)


def _sorted_blocks(blocks: np.ndarray) -> np.ndarray:
    order = np.lexsort(blocks.T[::-1])
    return blocks[order]


def _coords_to_int(coords: np.ndarray, q: int) -> np.ndarray:
    """Base-q integer of coordinate vectors, first coordinate most significant."""
    out = np.zeros(coords.shape[:-1], dtype=np.int64)
    for i in range(coords.shape[-1]):
        out = out * q + coords[..., i]
    return out


def _all_vectors(q: int, dim: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((q,) * dim).reshape(dim, -1).T
    return grids.astype(np.int64)


def _guard(nblocks: int, streaming: bool):
    if nblocks > MAX_BLOCKS and not streaming:
        raise DesignError(
            f"design has {nblocks} blocks (> {MAX_BLOCKS}); build it with streaming=True"
        )


# -- affine transversal design --

def affine_block_chunks(m: int, F: FieldSpec, chunk_bases: int = 256):
    """Yield the blocks of the affine design in chunks without materialising them all.

    A block is the line through ``(b, 0)`` with direction ``(d, 1)``; its point
    in group ``alpha`` is ``(b + alpha d, alpha)``.  The local index of a point
    is the base-q integer of its first m-1 coordinates.
    """
    q = F.q
    s = q ** (m - 1)
    vecs = _all_vectors(q, m - 1)  # row v = coordinates of local index v
    alphas = np.arange(q)
    for start in range(0, s, chunk_bases):
        base = vecs[start : start + chunk_bases]  # (nb, m-1)
        out = np.empty((base.shape[0], s, q), dtype=np.int64)
        for a in alphas:
            pts = vadd(F, base[:, None, :], vmul(F, a, vecs[None, :, :]))
            out[:, :, a] = a * s + _coords_to_int(pts, q)
        yield out.reshape(-1, q)


def td_affine(m: int, F: FieldSpec, streaming: bool = False) -> TransversalDesign:
    """Affine design TD(q, q^(m-1)): affine points, hyperplanes x_m = const as
    groups, and the lines secant to all of them as blocks."""
    if m < 2:
        raise DesignError("affine transversal designs need m >= 2")
    q = F.q
    s = q ** (m - 1)
    _guard(s * s, streaming)
    if streaming:
        return TransversalDesign(
            q, s, 1, 2, np.zeros((0, q), dtype=np.int64),
            block_source=lambda size=4096: _rechunk(affine_block_chunks(m, F), size),
            nominal_blocks=s * s,
        )
    blocks = np.concatenate(list(affine_block_chunks(m, F)))
    return TransversalDesign(q, s, 1, 2, _sorted_blocks(blocks))


def _rechunk(chunks, size):
    buf, n = [], 0
    for c in chunks:
        buf.append(c)
        n += c.shape[0]
        while n >= size:
            cat = np.concatenate(buf)
            yield cat[:size]
            rest = cat[size:]
            buf, n = ([rest] if rest.shape[0] else []), rest.shape[0]
    if n:
        yield np.concatenate(buf)


def ag_line_design(m: int, F: FieldSpec) -> BlockDesign:
    """All points and lines of AG(m, q), points numbered as in ``td_affine``."""
    q = F.q
    s = q ** (m - 1)
    pts = _all_vectors(q, m)
    dirs = [d for d in _all_vectors(q, m) if d.any() and d[np.flatnonzero(d)[0]] == 1]
    rows = []
    for d in dirs:
        line = np.stack([vadd(F, pts, vmul(F, t, d)) for t in range(q)], axis=1)
        ids = line[..., -1] * s + _coords_to_int(line[..., :-1], q)
        rows.append(np.sort(ids, axis=1))
    allrows = np.unique(np.concatenate(rows), axis=0)
    return BlockDesign(q**m, allrows)


# -- projective transversal design --

def td_projective(m: int, F: FieldSpec, streaming: bool = False) -> TransversalDesign:
    """Projective design TD(q+1, q^(m-1)); the subspace {x_0 = x_1 = 0} is removed.

    Groups are indexed by the ratio [x_0 : x_1]: group u < q holds points
    [1 : u : y], group q holds [0 : 1 : y]; the local index is y in base q.
    A block is the line joining (1, 0, a) and (0, 1, b); it meets group u
    at (1, u, a + u b) and group q at (0, 1, b).
    """
    if m < 2:
        raise DesignError("projective transversal designs need m >= 2")
    q = F.q
    s = q ** (m - 1)
    _guard(s * s, streaming)
    if streaming:
        raise DesignError("streaming is only implemented for affine designs")
    vecs = _all_vectors(q, m - 1)
    A = np.repeat(np.arange(s), s)
    B = np.tile(np.arange(s), s)
    blocks = np.empty((s * s, q + 1), dtype=np.int64)
    for u in range(q):
        pts = vadd(F, vecs[A], vmul(F, u, vecs[B]))
        blocks[:, u] = u * s + _coords_to_int(pts, q)
    blocks[:, q] = q * s + B
    return TransversalDesign(q + 1, s, 1, 2, _sorted_blocks(blocks))


def projective_points(m: int, F: FieldSpec) -> np.ndarray:
    """Normalised homogeneous coordinates of P^m(F_q) (first nonzero is 1)."""
    vecs = _all_vectors(F.q, m + 1)
    keep = [v for v in vecs if v.any() and v[np.flatnonzero(v)[0]] == 1]
    return np.array(keep, dtype=np.int64)


def _normalise(F: FieldSpec, v: np.ndarray) -> np.ndarray:
    lead = v[np.flatnonzero(v)[0]]
    return vmul(F, v, F.inv_table[lead])


def pg_line_design(m: int, F: FieldSpec) -> BlockDesign:
    """All points and lines of PG(m, q); brute force, small q only."""
    pts = projective_points(m, F)
    index = {tuple(v): i for i, v in enumerate(pts)}
    seen = set()
    lines = []
    for i, j in itertools.combinations(range(len(pts)), 2):
        P, Q = pts[i], pts[j]
        members = {i, j}
        for t in range(F.q):
            w = vadd(F, Q, vmul(F, t, P))
            members.add(index[tuple(_normalise(F, w))])
        key = tuple(sorted(members))
        if key not in seen:
            seen.add(key)
            lines.append(key)
    return BlockDesign(len(pts), np.array(sorted(lines), dtype=np.int64))


# -- designs from orthogonal arrays --

def td_from_oa(A, sort: bool = True) -> TransversalDesign:
    """Block per OA row: point (symbol, column) -> column * s + symbol."""
    rows = np.asarray(A.rows, dtype=np.int64)
    if np.unique(rows, axis=0).shape[0] != rows.shape[0]:
        raise DesignError("orthogonal array has repeated rows")
    ell, s = A.ell, A.s
    blocks = rows + s * np.arange(ell)[None, :]
    if sort:
        blocks = _sorted_blocks(blocks)
    return TransversalDesign(ell, s, A.lam, A.strength, blocks)


def td_curves(t: int, F: FieldSpec) -> TransversalDesign:
    """Graphs of polynomials of degree < t over F_q: a t-TD_1(q, q).

    Group x holds the points (y, x); the block of F is {(F(x), x)}.
    """
    q = F.q
    coeffs = _all_vectors(q, t)  # coefficient of X^i in column i
    xs = np.arange(q)
    vals = np.zeros((coeffs.shape[0], q), dtype=np.int64)
    for i in range(t):
        xi = np.array([_pow(F, x, i) for x in xs])
        vals = vadd(F, vals, vmul(F, coeffs[:, i : i + 1], xi[None, :]))
    blocks = vals + q * xs[None, :]
    return TransversalDesign(q, q, 1, t, _sorted_blocks(blocks))


def _pow(F, x, i):
    r = 1
    for _ in range(i):
        r = int(vmul(F, r, x))
    return r


# -- incidence matrices --

def incidence_matrix(D) -> np.ndarray:
    """Dense 0/1 block-by-point matrix in block-list and point order."""
    M = np.zeros((D.nblocks, D.npoints), dtype=np.uint8)
    rows = np.repeat(np.arange(D.nblocks), D.blocks.shape[1])
    M[rows, D.blocks.ravel()] = 1
    return M


def iter_block_chunks(D, size: int = 4096):
    source = getattr(D, "block_source", None)
    if source is not None:
        yield from source(size)
        return
    for start in range(0, D.nblocks, size):
        yield D.blocks[start : start + size]


def incidence_packed_chunks(D, size: int = 4096):
    """Packed GF(2) incidence rows, ``size`` blocks at a time."""
    for chunk in iter_block_chunks(D, size):
        yield kernels.pack_sets(chunk, D.npoints)


# -- verification --

def _structure(D: TransversalDesign) -> Verdict:
    b = D.blocks
    groups = b // D.s
    if not np.array_equal(groups, np.broadcast_to(np.arange(D.ell), b.shape)):
        bad = int(np.argwhere(groups != np.arange(D.ell))[0][0])
        return Verdict(False, f"block {bad} does not meet every group exactly once")
    uniq = np.unique(b, axis=0)
    if uniq.shape[0] != b.shape[0]:
        return Verdict(False, "repeated blocks")
    expected = D.lam * D.s**D.strength
    if b.shape[0] != expected:
        return Verdict(False, f"{b.shape[0]} blocks, expected lambda*s^t = {expected}")
    return Verdict(True)


def verify_t_td(D: TransversalDesign, t: int | None = None) -> Verdict:
    """Exhaustive check that every t points from distinct groups share
    exactly lambda * s^(strength - t) blocks."""
    t = D.strength if t is None else t
    if t > D.ell:
        return Verdict(False, f"strength {t} exceeds the number of groups {D.ell}")
    st = _structure(D)
    if not st:
        return st
    if t > D.strength:
        expected = D.lam / D.s ** (t - D.strength)
    else:
        expected = D.lam * D.s ** (D.strength - t)
    local = D.blocks - D.s * np.arange(D.ell)[None, :]
    weights = D.s ** np.arange(t)[::-1]
    for T in itertools.combinations(range(D.ell), t):
        codes = local[:, T] @ weights
        counts = np.bincount(codes, minlength=D.s**t)
        bad = np.flatnonzero(counts != expected)
        if bad.size:
            tup = np.unravel_index(int(bad[0]), (D.s,) * t)
            pts = [int(g * D.s + r) for g, r in zip(T, tup)]
            return Verdict(
                False, f"points {pts} lie in {int(counts[bad[0]])} blocks, expected {expected}"
            )
    return Verdict(True)


def verify_td(D: TransversalDesign) -> Verdict:
    """Pair axiom: cross-group pairs lie in the same number of blocks."""
    return verify_t_td(D, 2)


def td_isomorphic_by_identity(A: TransversalDesign, B: TransversalDesign) -> bool:
    """Same parameters and the same block set once both are sorted."""
    if (A.ell, A.s) != (B.ell, B.s) or A.nblocks != B.nblocks:
        return False
    return np.array_equal(_sorted_blocks(A.blocks), _sorted_blocks(B.blocks))


def check_budget(D: TransversalDesign, t: int) -> int:
    return math.comb(D.ell, t) * D.s**t
