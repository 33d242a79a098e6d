"""Closed-form p-ranks of point/line designs of projective and affine spaces.

These give the dimensions of the affine transversal design codes without
building any matrix, and serve as an independent check of computed ranks.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .ff import _prime_factors

DB_BYTES = 100 * 2**20


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero for n < 0 or k outside [0, n]."""
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def prime_power(q: int) -> tuple[int, int]:
    ps = _prime_factors(q)
    if len(ps) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = ps[0]
    e, r = 0, q
    while r > 1:
        r //= p
        e += 1
    return p, e


def _factor(p: int, m: int, a: int, b: int) -> int:
    """Inner alternating sum for consecutive entries (s_j, s_{j+1}) = (a, b)."""
    d = b * p - a
    return sum((-1) ** i * binom(m + 1, i) * binom(m + d - i * p, m) for i in range(d // p + 1))


def rank_pg(q: int, m: int, t: int = 1) -> int:
    """p-rank of the points-versus-t-flats design of PG(m, q), q = p^e.

    Sums, over cyclic tuples (s_0, ..., s_e = s_0) with t+1 <= s_j <= m+1 and
    0 <= s_{j+1} p - s_j <= (m+1)(p-1), the product of the per-step factors.
    Tuples are enumerated depth-first, pruning on the step constraint.
    """
    if t != 1:
        raise NotImplementedError("only lines (t = 1) are supported")
    if m < 1:
        raise ValueError("need m >= 1")
    p, e = prime_power(q)
    lo, hi = t + 1, m + 1
    vals = range(lo, hi + 1)
    ok = {(a, b): 0 <= b * p - a <= (m + 1) * (p - 1) for a in vals for b in vals}
    fac = {ab: _factor(p, m, *ab) for ab, good in ok.items() if good}

    total = 0
    # stack of (first, current, depth, running product)
    stack = [(s0, s0, 0, 1) for s0 in vals]
    while stack:
        first, cur, depth, prod = stack.pop()
        if depth == e - 1:
            if ok[(cur, first)]:
                total += prod * fac[(cur, first)]
            continue
        for nxt in vals:
            if ok[(cur, nxt)] and fac[(cur, nxt)]:
                stack.append((first, nxt, depth + 1, prod * fac[(cur, nxt)]))
    return total


def rank_ag(q: int, m: int) -> int:
    """p-rank of the points-versus-lines design of AG(m, q)."""
    if m < 2:
        raise ValueError("need m >= 2")
    return rank_pg(q, m) - rank_pg(q, m - 1)


def dim_affine_td_code(m: int, q: int) -> int:
    """Dimension of the code of the affine design td_affine(m, q) over its characteristic."""
    return q**m - rank_ag(q, m)


# closed forms

def rank_ag_plane(p: int, e: int) -> int:
    return binom(p + 1, 2) ** e


def rank_ag_prime(p: int, m: int) -> int:
    return p**m - binom(m + p - 2, m)


def rank_ag_cube_sq(p: int) -> int:
    """m = 3, q = p^2."""
    return (p**3 - binom(p + 1, 3)) ** 2 + 2 * binom(p, 2) * binom(p + 1, 3)


def projective_plane_dim(p: int, e: int) -> int:
    """Guaranteed dimension for the code of the projective design td_projective(2, p^e)."""
    return p ** (2 * e) + p**e - binom(p + 1, 2) ** e - 1


# tables

@dataclass(frozen=True)
class Table1Row:
    m: int
    ell: int
    n: int
    k: int

    @property
    def rate(self) -> float:
        return self.k / self.n


def table1(rows) -> list[Table1Row]:
    return [Table1Row(m, q, q**m, dim_affine_td_code(m, q)) for m, q in rows]


def projective_table(qs) -> list[Table1Row]:
    out = []
    for q in qs:
        p, e = prime_power(q)
        out.append(Table1Row(2, q + 1, q * q + q, projective_plane_dim(p, e)))
    return out


@dataclass(frozen=True)
class ChunkAccounting:
    """Whole-chunk retrieval of a database of ``db_bytes`` split into k chunks."""

    ell: int
    n: int
    k: int
    db_bytes: int = DB_BYTES

    @property
    def chunk_bytes(self) -> Fraction:
        return Fraction(self.db_bytes, self.k)

    @property
    def download_bytes(self) -> Fraction:
        return self.ell * self.chunk_bytes

    @property
    def overhead_bytes(self) -> Fraction:
        return (self.n - self.k) * self.chunk_bytes

    ops_per_server = 1


def chunk_costs(m: int, q: int, db_bytes: int = DB_BYTES) -> ChunkAccounting:
    return ChunkAccounting(q, q**m, dim_affine_td_code(m, q), db_bytes)


def human_bytes(x) -> str:
    """Decimal units with three significant digits, e.g. 31.1kB, 1.99MB."""
    x = float(x)
    for unit, scale in (("GB", 1e9), ("MB", 1e6), ("kB", 1e3)):
        if x >= scale:
            return f"{x / scale:.3g}{unit}"
    return f"{x:.3g}B"


def format_table(header, rows, fmt: str = "text") -> str:
    rows = [[str(c) for c in r] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"
