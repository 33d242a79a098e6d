"""Pure-numpy reference kernels.

Same signatures and in-place semantics as :mod:`tdpir.kernels.numba_impl`.
Row loops stay in Python; the per-row work is vectorised over words.
"""

import numpy as np

_ONE = np.uint64(1)


def _ctz(v: int) -> int:
    return (v & -v).bit_length() - 1


def _set_columns(words: np.ndarray) -> np.ndarray:
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits)


def gf2_absorb(basis, slot_of_col, pivmask, rank, rows):
    """Fold packed GF(2) rows into a fully reduced basis; return the new rank.

    ``basis[slot]`` has a 1 at its pivot column and 0 at every other pivot
    column, so an incoming row is reduced by one XOR per pivot it touches.
    """
    ncols = slot_of_col.shape[0]
    for row in rows:
        if rank == ncols:
            break
        x = row.copy()
        hit = x & pivmask
        if hit.any():
            cols = _set_columns(hit)
            x ^= np.bitwise_xor.reduce(basis[slot_of_col[cols]], axis=0)
        nz = np.flatnonzero(x)
        if nz.size == 0:
            continue
        w = int(nz[0])
        b = _ctz(int(x[w]))
        c = 64 * w + b
        if rank:
            view = basis[:rank]
            owners = ((view[:, w] >> np.uint64(b)) & _ONE).astype(bool)
            view[owners] ^= x
        basis[rank] = x
        slot_of_col[c] = rank
        pivmask[w] |= _ONE << np.uint64(b)
        rank += 1
    return rank


def gf2_rref(rows, ncols):
    """In-place Gauss-Jordan on packed rows; returns (rank, pivot columns)."""
    nrows = rows.shape[0]
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        w, b = divmod(c, 64)
        sh = np.uint64(b)
        below = np.flatnonzero((rows[r:, w] >> sh) & _ONE)
        if below.size == 0:
            continue
        piv = r + int(below[0])
        if piv != r:
            rows[[r, piv]] = rows[[piv, r]]
        mask = ((rows[:, w] >> sh) & _ONE).astype(bool)
        mask[r] = False
        rows[mask] ^= rows[r]
        pivots.append(c)
        r += 1
    return r, np.array(pivots, dtype=np.int64)


def gfp_absorb(basis, slot_of_col, rank, rows, p):
    """GF(p) analogue of :func:`gf2_absorb` on unpacked int64 rows."""
    ncols = slot_of_col.shape[0]
    inv = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64)
    for row in rows:
        if rank == ncols:
            break
        x = row % p
        if rank:
            pivcols = np.flatnonzero(slot_of_col >= 0)
            coef = x[pivcols]
            if coef.any():
                x = (x - coef @ basis[slot_of_col[pivcols]]) % p
        nz = np.flatnonzero(x)
        if nz.size == 0:
            continue
        c = int(nz[0])
        x = (x * inv[x[c]]) % p
        if rank:
            view = basis[:rank]
            f = view[:, c].copy()
            view -= f[:, None] * x[None, :]
            view %= p
        basis[rank] = x
        slot_of_col[c] = rank
        rank += 1
    return rank


def gfp_rref(mat, p):
    nrows, ncols = mat.shape
    inv = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64)
    mat %= p
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        below = np.flatnonzero(mat[r:, c])
        if below.size == 0:
            continue
        piv = r + int(below[0])
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        mat[r] = (mat[r] * inv[mat[r, c]]) % p
        f = mat[:, c].copy()
        f[r] = 0
        nzr = np.flatnonzero(f)
        if nzr.size:
            mat[nzr] = (mat[nzr] - f[nzr, None] * mat[r][None, :]) % p
        pivots.append(c)
        r += 1
    return r, np.array(pivots, dtype=np.int64)
