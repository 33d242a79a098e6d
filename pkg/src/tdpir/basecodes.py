"""Base codes over GF(q) and the orthogonal arrays their codewords form.

Codewords are always enumerated with messages in lexicographic order of
their element tuples (first message symbol most significant); this fixes
the row order of every orthogonal array built here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ff import FieldSpec, field_new, vadd, vinv, vmul, vneg, vsub

MAX_CODEWORDS = 1 << 24


class CodeError(ValueError):
    pass


# -- small GF(q) elimination (base codes are tiny) --

def rref_fq(M, F: FieldSpec) -> tuple[np.ndarray, list[int]]:
    M = np.array(M, dtype=np.int64, copy=True)
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    nrows, ncols = M.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        M[[r, piv]] = M[[piv, r]]
        M[r] = vmul(F, M[r], F.inv_table[M[r, c]])
        for i in range(nrows):
            if i != r and M[i, c]:
                M[i] = vsub(F, M[i], vmul(F, M[i, c], M[r]))
        pivots.append(c)
        r += 1
    return M, pivots


def rank_fq(M, F: FieldSpec) -> int:
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    return len(rref_fq(M, F)[1])


def kernel_fq(M, F: FieldSpec) -> np.ndarray:
    """Right kernel over GF(q), one basis row per free column."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref_fq(M, F)
    free = [c for c in range(ncols) if c not in piv]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    for j, f in enumerate(free):
        K[j, f] = 1
        for i, pc in enumerate(piv):
            K[j, pc] = int(vneg(F, R[i, f]))
    return K


@dataclass(eq=False)
class LinearCode:
    """Row space of ``G`` (k x length, entries are field elements)."""

    F: FieldSpec
    G: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.G = np.atleast_2d(np.asarray(self.G, dtype=np.int64))
        if self.G.size and (self.G.min() < 0 or self.G.max() >= self.F.q):
            raise CodeError("generator entries must be field elements")
        if rank_fq(self.G, self.F) != self.G.shape[0]:
            raise CodeError("generator matrix is not of full row rank")

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def length(self) -> int:
        return self.G.shape[1]

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"<LinearCode {label}[{self.length},{self.k}] over {self.F}>"


def zero_code(F: FieldSpec, length: int) -> LinearCode:
    return LinearCode(F, np.zeros((0, length), dtype=np.int64), "zero")


def _messages(q: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((q,) * k).reshape(k, -1).T.astype(np.int64)


def codewords(C: LinearCode, budget: int = MAX_CODEWORDS) -> np.ndarray:
    """All q^k codewords, messages in lexicographic order."""
    q, k = C.F.q, C.k
    if q**k > budget:
        raise CodeError(f"{q}^{k} codewords exceed the enumeration budget {budget}")
    msgs = _messages(q, k)
    out = np.zeros((msgs.shape[0], C.length), dtype=np.int64)
    for i in range(k):
        out = vadd(C.F, out, vmul(C.F, msgs[:, i : i + 1], C.G[i][None, :]))
    return out


def encode(C: LinearCode, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    out = np.zeros(C.length, dtype=np.int64)
    for i in range(C.k):
        out = vadd(C.F, out, vmul(C.F, msg[i], C.G[i]))
    return out


def weights(C: LinearCode) -> np.ndarray:
    return (codewords(C) != 0).sum(axis=1)


def min_distance(C: LinearCode) -> int:
    w = weights(C)
    w = w[w > 0]
    return int(w.min()) if w.size else C.length + 1


def dual_code(C: LinearCode) -> LinearCode:
    return LinearCode(C.F, kernel_fq(C.G, C.F), f"dual({C.name})" if C.name else "")


def dual_distance(C: LinearCode, budget: int = MAX_CODEWORDS) -> int:
    """Minimum weight of the dual code (length + 1 if the dual is zero).

    The dual is enumerated when it has at most ``budget`` codewords; past
    that, the smallest linearly dependent set of columns of G is searched,
    which is the same quantity.
    """
    n, k, q = C.length, C.k, C.F.q
    if k == n:
        return n + 1
    if q ** (n - k) <= budget:
        return min_distance(dual_code(C))
    for w in range(1, k + 2):
        for cols in itertools.combinations(range(n), w):
            if rank_fq(C.G[:, cols], C.F) < w:
                return w
    raise AssertionError("unreachable: any k+1 columns are dependent")


def is_p_divisible(C: LinearCode, p: int) -> bool:
    return bool(np.all(weights(C) % p == 0))


def is_mds(C: LinearCode) -> bool:
    """Every k columns of G independent (exhaustive over k-subsets)."""
    k = C.k
    return all(
        rank_fq(C.G[:, cols], C.F) == k for cols in itertools.combinations(range(C.length), k)
    )


def same_code(A: LinearCode, B: LinearCode) -> bool:
    if A.F != B.F or A.length != B.length or A.k != B.k:
        return False
    return rank_fq(np.vstack([A.G, B.G]), A.F) == A.k


def codeword_set(C: LinearCode) -> set[tuple[int, ...]]:
    return set(map(tuple, codewords(C).tolist()))


# -- orthogonal arrays --

@dataclass(eq=False)
class OrthogonalArray:
    """OA_lam(t, ell, s): rows over [0, s), every t columns balanced."""

    s: int
    ell: int
    strength: int
    lam: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=np.int64))
        if self.rows.shape[1] != self.ell:
            raise CodeError(f"rows must have {self.ell} columns")
        if np.unique(self.rows, axis=0).shape[0] != self.rows.shape[0]:
            raise CodeError("orthogonal array has repeated rows")
        if self.ell > 1 and np.unique(self.rows.T, axis=0).shape[0] != self.ell:
            raise CodeError("orthogonal array has repeated columns")

    @property
    def t(self) -> int:
        return self.strength


def verify_oa(A: OrthogonalArray, t: int, lam: int) -> bool:
    """Every t-column projection hits each of the s^t tuples exactly lam times."""
    rows = A.rows
    if rows.shape[0] != lam * A.s**t or t > A.ell:
        return False
    w = A.s ** np.arange(t)[::-1]
    for T in itertools.combinations(range(A.ell), t):
        counts = np.bincount(rows[:, T] @ w, minlength=A.s**t)
        if np.any(counts != lam):
            return False
    return True


def oa_from_code(C: LinearCode) -> OrthogonalArray:
    t = dual_distance(C) - 1
    q, k = C.F.q, C.k
    return OrthogonalArray(q, C.length, t, q ** (k - t), codewords(C))


# -- code families --

def _powers(F: FieldSpec, x: np.ndarray, k: int) -> np.ndarray:
    rows = [np.ones_like(x)]
    for _ in range(1, k):
        rows.append(vmul(F, rows[-1], x))
    return np.array(rows[:k], dtype=np.int64)


def grs(k: int, x, y, F: FieldSpec) -> LinearCode:
    """GRS_k(x, y): generator rows (y_j x_j^i)_j for i < k."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise CodeError("x and y must be vectors of equal length")
    if np.unique(x).size != x.size:
        raise CodeError("evaluation points must be pairwise distinct")
    if np.any(y == 0):
        raise CodeError("column multipliers must be nonzero")
    if not 1 <= k <= x.size <= F.q:
        raise CodeError("need 1 <= k <= length <= q")
    G = vmul(F, _powers(F, x, k), y[None, :])
    return LinearCode(F, G, f"GRS_{k}")


def rs(k: int, F: FieldSpec, x=None) -> LinearCode:
    x = np.arange(F.q) if x is None else np.asarray(x)
    C = grs(k, x, np.ones_like(x), F)
    C.name = f"RS_{k}"
    return C


def parity_check_code(length: int, F: FieldSpec | None = None) -> LinearCode:
    """[length, length-1] even-weight code over GF(2)."""
    F = F or field_new(2)
    G = np.zeros((length - 1, length), dtype=np.int64)
    G[:, 0] = 1
    G[np.arange(length - 1), np.arange(1, length)] = 1
    return LinearCode(F, G, f"parity[{length}]")


def golay24_binary() -> LinearCode:
    """Extended binary Golay code [24, 12, 8] as [I | B] with the bordered
    circulant of {0} + quadratic residues mod 11."""
    F = field_new(2)
    qr = {(i * i) % 11 for i in range(1, 11)}
    first = np.array([1 if (j == 0 or j in qr) else 0 for j in range(11)])
    B = np.zeros((12, 12), dtype=np.int64)
    for i in range(11):
        B[i, :11] = np.roll(first, i)
        B[i, 11] = 1
    B[11, :11] = 1
    G = np.hstack([np.eye(12, dtype=np.int64), B])
    C = LinearCode(F, G, "Golay24")
    _assert_self_dual(C)
    return C


def golay12_ternary() -> LinearCode:
    """Extended ternary Golay code [12, 6, 6] as [I | P] with the Paley
    matrix of the quadratic residues mod 5, bordered by ones."""
    F = field_new(3)
    chi = {0: 0, 1: 1, 4: 1, 2: 2, 3: 2}  # Legendre symbol mod 5, -1 -> 2
    P = np.zeros((6, 6), dtype=np.int64)
    P[0, 1:] = 1
    P[1:, 0] = 1
    for i in range(5):
        for j in range(5):
            P[1 + i, 1 + j] = chi[(j - i) % 5]
    G = np.hstack([np.eye(6, dtype=np.int64), P])
    C = LinearCode(F, G, "Golay12")
    _assert_self_dual(C)
    return C


def _assert_self_dual(C: LinearCode):
    p = C.F.p
    if 2 * C.k != C.length or np.any((C.G @ C.G.T) % p):
        raise CodeError(f"{C.name} generator is not self-dual")


def rm1(m: int) -> LinearCode:
    """First-order binary Reed-Muller code RM(1, m): the all-ones row plus the
    m coordinate functions, evaluated on F_2^m in integer order."""
    if m < 2:
        raise CodeError("rm1 needs m >= 2")
    pts = np.arange(2**m)
    G = np.vstack([np.ones(2**m, dtype=np.int64)] + [(pts >> i) & 1 for i in range(m)])
    return LinearCode(field_new(2), G, f"RM(1,{m})")


def mds_q_plus_2(F: FieldSpec) -> LinearCode:
    """The [q+2, 3, q] hyperoval code of characteristic 2: columns (1, x, x^2)
    for x in F_q, then (0, 1, 0) and (0, 0, 1)."""
    if F.p != 2 or F.e < 2:
        raise CodeError("the [q+2, 3, q] MDS code needs q = 2^e with e >= 2")
    x = np.arange(F.q)
    G = np.hstack([_powers(F, x, 3), np.array([[0, 0], [1, 0], [0, 1]])])
    C = LinearCode(F, G, f"hyperoval[{F.q + 2}]")
    if not is_mds(C):
        raise CodeError("hyperoval code failed the MDS check")
    return C


def scale(C: LinearCode, y) -> LinearCode:
    """Coordinate-wise product y * C."""
    return LinearCode(C.F, vmul(C.F, C.G, np.asarray(y)[None, :]), C.name)


def puncture(C: LinearCode, positions) -> LinearCode:
    """Delete the coordinates in ``positions``."""
    drop = set(int(i) for i in positions)
    keep = [j for j in range(C.length) if j not in drop]
    G = C.G[:, keep]
    if C.k and (not keep or rank_fq(G, C.F) < C.k):
        raise CodeError("puncturing drops the rank of the code")
    return LinearCode(C.F, G, f"{C.name}-punct" if C.name else "")


def decompose_mds2_as_grs(C: LinearCode) -> tuple[np.ndarray, np.ndarray]:
    """Write a [l, 2, l-1] MDS code as GRS_2(x, y).

    Columns P_i of G are points of F_q^2, pairwise non-proportional.  With
    l <= q some nonzero Q lies on none of the lines F_q P_i; the form
    mu_Q(X, Y) = Q_1 X - Q_0 Y is then nonzero at every P_i, so
    c = mu_Q(P) is a full-weight codeword.  For u completing c to a basis,
    C = c * <1, c^-1 * u>, i.e. y = c and x = c^-1 * u.
    """
    F, G = C.F, C.G
    n = C.length
    if C.k != 2:
        raise CodeError("decomposition needs a dimension-2 code")
    if not 2 <= n <= F.q:
        raise CodeError("need 2 <= length <= q")
    if min_distance(C) != n - 1:
        raise CodeError("input code is not MDS")

    def mu(Q):
        return vsub(F, vmul(F, Q[1], G[0]), vmul(F, Q[0], G[1]))

    candidates = [np.array([1, u]) for u in range(F.q)] + [np.array([0, 1])]
    for Q in candidates:
        c = mu(Q)
        if np.all(c != 0):
            break
    else:
        raise CodeError("no full-weight codeword found")
    for u in (G[0], G[1]):
        if rank_fq(np.vstack([c, u]), F) == 2:
            break
    x = vmul(F, vinv(F, c), u)
    return x, c
