"""Transversal-design PIR: setup, queries, answers, reconstruction, audits.

Database indices are 0-based: record ``i`` lives at codeword position
``scheme.sigma[i]``.  Randomness comes from a caller-supplied
``numpy.random.Generator`` (or an int seed); privacy is information-theoretic
only for truly uniform draws, the PRNG is a simulation stand-in.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .design import TransversalDesign
from .ff import FieldSpec, vneg, vsum
from .inccode import IncidenceCode, encode


class PirError(ValueError):
    pass


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(eq=False)
class PirScheme:
    code: IncidenceCode = field(repr=False)

    def __post_init__(self):
        self.sigma = np.asarray(self.code.sigma, dtype=np.int64)
        if np.unique(self.sigma).size != self.sigma.size:
            raise PirError("information set is not injective")

    @property
    def design(self) -> TransversalDesign:
        return self.code.design

    @property
    def F(self) -> FieldSpec:
        return self.code.F

    @property
    def ell(self) -> int:
        return self.design.ell

    @property
    def s(self) -> int:
        return self.design.s

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def q(self) -> int:
        return self.F.q

    def point_to_blocks(self, point: int) -> np.ndarray:
        return self.design.blocks_through(point)

    def __repr__(self) -> str:
        return f"<PirScheme ell={self.ell} s={self.s} k={self.k} over {self.F}>"


class ShareStore:
    """One server's slice of the codeword(s); counts every symbol read.

    ``values`` has shape (s,) for a single codeword or (s, m) for m
    codewords sharing the same query; one read returns a whole row.
    """

    def __init__(self, values, group_index: int = 0):
        self.values = np.asarray(values, dtype=np.int64)
        self.group_index = group_index
        self.reads = 0  # row accesses
        self.symbols_read = 0  # one per codeword per access
        self._lock = threading.Lock()

    @property
    def s(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    def read(self, q: int):
        if not 0 <= q < self.s:
            raise PirError(f"query {q} outside [0, {self.s})")
        with self._lock:
            self.reads += 1
            self.symbols_read += self.m
        return self.values[q]

    def reset(self):
        with self._lock:
            self.reads = 0
            self.symbols_read = 0


@dataclass(eq=False)
class EncodedShares:
    shares: list[ShareStore]

    @property
    def codeword(self) -> np.ndarray:
        """Group-major concatenation of the shares."""
        return np.concatenate([sh.values for sh in self.shares], axis=0)

    @property
    def reads(self) -> list[int]:
        return [sh.reads for sh in self.shares]

    @property
    def symbols_read(self) -> list[int]:
        return [sh.symbols_read for sh in self.shares]

    def reset_counters(self):
        for sh in self.shares:
            sh.reset()


def split_codeword(scheme: PirScheme, c) -> EncodedShares:
    c = np.asarray(c, dtype=np.int64)
    s = scheme.s
    return EncodedShares([ShareStore(c[j * s : (j + 1) * s], j) for j in range(scheme.ell)])


def pad_database(scheme: PirScheme, D) -> np.ndarray:
    D = np.asarray(D, dtype=np.int64)
    k = scheme.k
    if D.shape[0] > k:
        raise PirError(f"database has {D.shape[0]} records, scheme holds {k}")
    if D.size and (D.min() < 0 or D.max() >= scheme.q):
        raise PirError("database symbols must be field elements")
    out = np.zeros((k,) + D.shape[1:], dtype=np.int64)
    out[: D.shape[0]] = D
    return out


def setup(code: IncidenceCode, D) -> tuple[PirScheme, EncodedShares]:
    """Systematically encode ``D`` (k symbols, or k x m for m codewords) and
    split the codeword(s) by groups."""
    scheme = PirScheme(code)
    D = pad_database(scheme, D)
    if D.ndim == 1:
        c = encode(code, D)
    else:
        c = encode(code, D.T).T  # (n, m)
    return scheme, split_codeword(scheme, c)


@dataclass(frozen=True)
class QuerySet:
    target: int  # point id
    block: int  # hidden from the servers
    queries: np.ndarray  # local index per server
    j_star: int

    def __len__(self) -> int:
        return len(self.queries)


def gen_queries_point(scheme: PirScheme, point: int, rng) -> QuerySet:
    """Queries for any codeword position (not only information positions)."""
    D = scheme.design
    if not 0 <= point < D.npoints:
        raise PirError(f"point {point} outside [0, {D.npoints})")
    rng = _rng(rng)
    cands = D.blocks_through(point)
    b = int(cands[rng.integers(cands.size)])
    q = D.blocks[b] % D.s
    j_star = point // D.s
    q[j_star] = rng.integers(D.s)
    return QuerySet(int(point), b, q, j_star)


def gen_queries(scheme: PirScheme, i: int, rng) -> QuerySet:
    if not 0 <= i < scheme.k:
        raise PirError(f"database index {i} outside [0, {scheme.k})")
    return gen_queries_point(scheme, int(scheme.sigma[i]), rng)


def sample_queries(scheme: PirScheme, point: int, n: int, rng) -> np.ndarray:
    """``n`` independent query vectors for ``point`` as an (n, ell) array."""
    D = scheme.design
    rng = _rng(rng)
    cands = D.blocks_through(point)
    picks = cands[rng.integers(cands.size, size=n)]
    Q = D.blocks[picks] % D.s
    Q[:, point // D.s] = rng.integers(D.s, size=n)
    return Q


def server_answer(share, q: int):
    """The single stored symbol (or symbol row) at local index ``q``."""
    if isinstance(share, ShareStore):
        return share.read(int(q))
    share = np.asarray(share)
    if not 0 <= q < share.shape[0]:
        raise PirError(f"query {q} outside [0, {share.shape[0]})")
    return share[q]


def reconstruct(scheme: PirScheme, i: int | None, answers, queries: QuerySet):
    """r = -(sum of the answers of every server but j*)."""
    if len(answers) != scheme.ell or any(a is None for a in answers):
        raise PirError("reconstruction needs one answer per server")
    if i is not None and int(scheme.sigma[i]) != queries.target:
        raise PirError("queries were generated for another index")
    A = np.asarray(answers, dtype=np.int64)
    others = np.delete(A, queries.j_star, axis=0)
    return vneg(scheme.F, vsum(scheme.F, others, axis=0))


def retrieve(scheme: PirScheme, shares: EncodedShares, i: int, rng):
    """One full in-process run of the protocol for database index ``i``."""
    Q = gen_queries(scheme, i, rng)
    answers = [server_answer(sh, qj) for sh, qj in zip(shares.shares, Q.queries)]
    return reconstruct(scheme, i, answers, Q)


# -- privacy audits --

@dataclass
class PrivacyReport:
    ok: bool
    t_max: int
    cases: int
    counterexample: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _keys(local: np.ndarray, s: int) -> np.ndarray:
    out = np.zeros(local.shape[0], dtype=np.int64)
    for c in range(local.shape[1]):
        out = out * s + local[:, c]
    return out


def audit_privacy_exact(scheme: PirScheme, t_max: int, budget: int = 10**9) -> PrivacyReport:
    """Exhaustive check that every coalition of at most ``t_max`` servers sees
    the same query distribution whatever the target.

    Two counts are checked.  For every coalition T, every assignment of its
    queries and every target point outside T's groups, the number of blocks
    through the target consistent with the assignment must be
    lam * s^(t-1-|T|).  Then, for every target point, the exact query
    distribution seen by T (block choice times the uniform draw at the
    target's group) must give every assignment the same integer weight.
    """
    D = scheme.design
    ell, s, lam, t = D.ell, D.s, D.lam, D.strength
    local = D.blocks % s
    cases = 0
    for size in range(1, t_max + 1):
        work = math.comb(ell, size) * D.nblocks * ell
        if work > budget:
            raise PirError(f"exact audit at |T|={size} exceeds budget")
        for T in itertools.combinations(range(ell), size):
            keyT = _keys(local[:, T], s)
            expect = lam * s ** (t - 1 - size) if t - 1 - size >= 0 else None
            for g in range(ell):
                if g in T:
                    continue
                counts = np.bincount(keyT * s + local[:, g], minlength=s ** (size + 1))
                cases += counts.size
                if expect is None:
                    return PrivacyReport(
                        False, t_max, cases,
                        f"design strength {t} is too low for coalitions of {size}",
                    )
                if np.any(counts != expect):
                    bad = int(np.flatnonzero(counts != expect)[0])
                    return PrivacyReport(
                        False, t_max, cases,
                        f"servers {T}, target group {g}, cell {bad}: "
                        f"{int(counts[bad])} blocks, expected {expect}",
                    )
            # full distribution seen by T, for every target point
            uniform = lam * s ** (t - size)  # weight of each assignment
            for point in range(D.npoints):
                g = point // s
                through = D.blocks_through(point)
                if g in T:
                    rest = [j for j in T if j != g]
                    w = np.bincount(_keys(local[np.ix_(through, rest)], s), minlength=s ** len(rest))
                else:
                    w = np.bincount(keyT[through], minlength=s**size) * s
                cases += 1
                if np.any(w != uniform):
                    return PrivacyReport(
                        False, t_max, cases,
                        f"servers {T}: query distribution for point {point} is not uniform",
                    )
    return PrivacyReport(True, t_max, cases)


@dataclass
class EmpiricalReport:
    distance: float
    threshold: float
    cells: int
    n_samples: int

    @property
    def separated(self) -> bool:
        return self.distance > self.threshold


def audit_privacy_empirical(scheme: PirScheme, i: int, i2: int, T, n_samples: int, rng) -> EmpiricalReport:
    """Total-variation distance between the sampled joint queries of the
    coalition ``T`` for database indices ``i`` and ``i2``."""
    rng = _rng(rng)
    T = list(T)
    s = scheme.s
    cells = s ** len(T)
    hists = []
    for idx in (i, i2):
        Q = sample_queries(scheme, int(scheme.sigma[idx]), n_samples, rng)
        hists.append(np.bincount(_keys(Q[:, T], s), minlength=cells) / n_samples)
    tv = 0.5 * float(np.abs(hists[0] - hists[1]).sum())
    return EmpiricalReport(tv, 4 * math.sqrt(cells / n_samples), cells, n_samples)


# -- costs --

@dataclass(frozen=True)
class CostReport:
    upload_bits: int
    download_bits: int
    server_reads: tuple[int, ...]
    user_field_ops: int
    storage_overhead_bits: float

    @property
    def communication_bits(self) -> int:
        return self.upload_bits + self.download_bits


def symbol_bits(q: int) -> int:
    return math.ceil(math.log2(q)) if q > 1 else 0


def cost_report(scheme: PirScheme, m: int = 1) -> CostReport:
    """Per-retrieval costs for records of ``m`` symbols sharing one query."""
    ell, s, q, k = scheme.ell, scheme.s, scheme.q, scheme.k
    return CostReport(
        upload_bits=ell * symbol_bits(s),
        download_bits=ell * symbol_bits(q) * m,
        server_reads=(1,) * ell,
        user_field_ops=ell - 1,
        storage_overhead_bits=(ell * s - k) * math.log2(q) * m,
    )
