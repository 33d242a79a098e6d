"""Row-reduction kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``TDPIR_DISABLE_NUMBA`` is unset (or ``0``).  Both backends expose
the same four functions and are importable directly for benchmarking.

GF(2) rows are bit-packed: column ``j`` is bit ``j % 64`` of word ``j // 64``.
"""

import importlib
import os

import numpy as np

from . import numpy_impl

_flag = os.environ.get("TDPIR_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

numba_impl = None
if not _disabled:
    try:
        numba_impl = importlib.import_module(".numba_impl", __name__)
    except ImportError:  # numba missing or broken
        numba_impl = None

backend = numba_impl if numba_impl is not None else numpy_impl
BACKEND_NAME = "numba" if numba_impl is not None else "numpy"


def nwords(ncols: int) -> int:
    return max(1, (ncols + 63) // 64)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into rows of little-endian uint64 words."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    nrows, ncols = bits.shape
    padded = np.zeros((nrows, 64 * nwords(ncols)), dtype=np.uint8)
    padded[:, :ncols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, ncols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :ncols]


def pack_sets(sets: np.ndarray, ncols: int) -> np.ndarray:
    """Pack rows given as arrays of distinct column indices (e.g. blocks)."""
    sets = np.asarray(sets, dtype=np.int64)
    out = np.zeros((sets.shape[0], nwords(ncols)), dtype=np.uint64)
    rows = np.repeat(np.arange(sets.shape[0]), sets.shape[1])
    cols = sets.ravel()
    np.bitwise_or.at(out, (rows, cols // 64), np.left_shift(np.uint64(1), (cols % 64).astype(np.uint64)))
    return out


def gf2_absorb(basis, slot_of_col, pivmask, rank, rows):
    return int(backend.gf2_absorb(basis, slot_of_col, pivmask, rank, rows))


def gf2_rref(rows, ncols):
    return backend.gf2_rref(rows, ncols)


def gfp_absorb(basis, slot_of_col, rank, rows, p):
    return int(backend.gfp_absorb(basis, slot_of_col, rank, rows, p))


def gfp_rref(mat, p):
    return backend.gfp_rref(mat, p)
