"""numba-compiled kernels; see :mod:`tdpir.kernels.numpy_impl` for semantics."""

import numpy as np
from numba import njit

_U0 = np.uint64(0)
_U1 = np.uint64(1)


@njit(cache=True)
def _ctz(v):
    n = 0
    if (v & np.uint64(0xFFFFFFFF)) == _U0:
        n += 32
        v >>= np.uint64(32)
    if (v & np.uint64(0xFFFF)) == _U0:
        n += 16
        v >>= np.uint64(16)
    if (v & np.uint64(0xFF)) == _U0:
        n += 8
        v >>= np.uint64(8)
    if (v & np.uint64(0xF)) == _U0:
        n += 4
        v >>= np.uint64(4)
    if (v & np.uint64(0x3)) == _U0:
        n += 2
        v >>= np.uint64(2)
    if (v & _U1) == _U0:
        n += 1
    return n


@njit(cache=True)
def gf2_absorb(basis, slot_of_col, pivmask, rank, rows):
    ncols = slot_of_col.shape[0]
    nw = basis.shape[1]
    x = np.empty(nw, dtype=np.uint64)
    for i in range(rows.shape[0]):
        if rank == ncols:
            break
        for w in range(nw):
            x[w] = rows[i, w]
        for w in range(nw):
            hit = x[w] & pivmask[w]
            while hit != _U0:
                b = _ctz(hit)
                s = slot_of_col[64 * w + b]
                for k in range(nw):
                    x[k] ^= basis[s, k]
                hit = x[w] & pivmask[w]
        w0 = -1
        for w in range(nw):
            if x[w] != _U0:
                w0 = w
                break
        if w0 < 0:
            continue
        b = _ctz(x[w0])
        sh = np.uint64(b)
        for r in range(rank):
            if (basis[r, w0] >> sh) & _U1:
                for k in range(nw):
                    basis[r, k] ^= x[k]
        for k in range(nw):
            basis[rank, k] = x[k]
        slot_of_col[64 * w0 + b] = rank
        pivmask[w0] |= _U1 << sh
        rank += 1
    return rank


@njit(cache=True)
def _gf2_rref(rows, ncols):
    nrows, nw = rows.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c // 64
        sh = np.uint64(c % 64)
        piv = -1
        for i in range(r, nrows):
            if (rows[i, w] >> sh) & _U1:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(nw):
                t = rows[r, k]
                rows[r, k] = rows[piv, k]
                rows[piv, k] = t
        for i in range(nrows):
            if i != r and (rows[i, w] >> sh) & _U1:
                for k in range(w, nw):
                    rows[i, k] ^= rows[r, k]
        pivots[r] = c
        r += 1
    return r, pivots[:r].copy()


def gf2_rref(rows, ncols):
    return _gf2_rref(rows, ncols)


@njit(cache=True)
def _inv_table(p):
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        for b in range(1, p):
            if a * b % p == 1:
                inv[a] = b
                break
    return inv


@njit(cache=True)
def gfp_absorb(basis, slot_of_col, rank, rows, p):
    ncols = slot_of_col.shape[0]
    inv = _inv_table(p)
    x = np.empty(ncols, dtype=np.int64)
    for i in range(rows.shape[0]):
        if rank == ncols:
            break
        for c in range(ncols):
            x[c] = rows[i, c] % p
        for c in range(ncols):
            f = x[c]
            if f != 0:
                s = slot_of_col[c]
                if s >= 0:
                    for k in range(ncols):
                        x[k] = (x[k] - f * basis[s, k]) % p
        c0 = -1
        for c in range(ncols):
            if x[c] != 0:
                c0 = c
                break
        if c0 < 0:
            continue
        g = inv[x[c0]]
        for k in range(ncols):
            x[k] = x[k] * g % p
        for r in range(rank):
            f = basis[r, c0]
            if f != 0:
                for k in range(ncols):
                    basis[r, k] = (basis[r, k] - f * x[k]) % p
        for k in range(ncols):
            basis[rank, k] = x[k]
        slot_of_col[c0] = rank
        rank += 1
    return rank


@njit(cache=True)
def _gfp_rref(mat, p):
    nrows, ncols = mat.shape
    inv = _inv_table(p)
    for i in range(nrows):
        for j in range(ncols):
            mat[i, j] %= p
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if mat[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(ncols):
                t = mat[r, k]
                mat[r, k] = mat[piv, k]
                mat[piv, k] = t
        g = inv[mat[r, c]]
        for k in range(c, ncols):
            mat[r, k] = mat[r, k] * g % p
        for i in range(nrows):
            f = mat[i, c]
            if i != r and f != 0:
                for k in range(c, ncols):
                    mat[i, k] = (mat[i, k] - f * mat[r, k]) % p
        pivots[r] = c
        r += 1
    return r, pivots[:r].copy()


def gfp_rref(mat, p):
    return _gfp_rref(mat, p)
