"""Finite fields GF(p^e) with elements encoded as integers.

An element is the integer whose base-p digits are the coefficients of its
polynomial representative (digit i is the coefficient of x^i).  The field
modulus is the first monic irreducible polynomial of degree e when the
lower coefficients (c_0, ..., c_{e-1}) are read as a base-p integer.

Scalar helpers (``ff_add``, ``ff_mul``, ...) take the field explicitly.
Vectorised helpers (``vadd``, ``vmul``, ...) operate on integer arrays and
are what the rest of the package uses in bulk.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

MAX_FIELD_SIZE = 1 << 20


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomial helpers over GF(p); coefficient lists, constant term first --

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        _poly_trim(a)
    return a


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Irreducibility of a monic polynomial by trial division."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def _first_irreducible(p: int, e: int) -> tuple[int, ...]:
    if e == 1:
        return (0, 1)
    for code in range(p**e):
        low = [(code // p**i) % p for i in range(e)]
        if low[0] == 0:
            continue  # divisible by x
        poly = low + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^e); ``modulus`` lists coefficients constant term first."""

    p: int
    e: int
    modulus: tuple[int, ...] = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def is_prime(self) -> bool:
        return self.e == 1

    def __str__(self) -> str:
        return f"GF({self.q})" if self.e == 1 else f"GF({self.p}^{self.e})"

    # lazily built lookup tables, shared by all copies via field_new's cache

    @cached_property
    def digits(self) -> np.ndarray:
        """``digits[a, i]`` is the coefficient of x^i in element ``a``."""
        vals = np.arange(self.q, dtype=np.int64)
        out = np.empty((self.q, self.e), dtype=np.int64)
        for i in range(self.e):
            out[:, i] = (vals // self.p**i) % self.p
        return out

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.e)], dtype=np.int64)

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        if q == 2:
            return np.array([1, 1], dtype=np.int64), np.array([0, 0], dtype=np.int64)
        g = _find_primitive(self)
        exp = np.empty(2 * (q - 1), dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            x = poly_mulmod(x, g, self)
        exp[q - 1 :] = exp[: q - 1]
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        return exp, log

    @cached_property
    def mul_table(self) -> np.ndarray:
        """Full q x q product table (only sensible for small fields)."""
        a = np.arange(self.q)
        return vmul(self, a[:, None], a[None, :])

    @cached_property
    def inv_table(self) -> np.ndarray:
        exp, log = self._exp_log
        inv = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        inv[nz] = exp[(self.q - 1 - log[nz]) % (self.q - 1)]
        return inv


@lru_cache(maxsize=None)
def field_new(p: int, e: int = 1) -> FieldSpec:
    """Return GF(p^e) with its canonical modulus.

    Raises ``FieldError`` for a non-prime ``p``, ``e < 1`` or fields larger
    than ``MAX_FIELD_SIZE`` elements.
    """
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if e < 1:
        raise FieldError(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_FIELD_SIZE:
        raise FieldError(f"GF({p}^{e}) exceeds the {MAX_FIELD_SIZE}-element limit")
    return FieldSpec(p, e, _first_irreducible(p, e))


def field_of_order(q: int) -> FieldSpec:
    """GF(q) for a prime power ``q``."""
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise FieldError(f"{q} is not a prime power")
            return field_new(p, e)
    raise FieldError(f"{q} is not a prime power")


def poly_mulmod(a: int, b: int, F: FieldSpec) -> int:
    """Schoolbook product of two encoded elements, reduced by the modulus.

    Slow reference path; also used to seed the log tables.
    """
    p, e = F.p, F.e
    if e == 1:
        return a * b % p
    da = [(a // p**i) % p for i in range(e)]
    db = [(b // p**i) % p for i in range(e)]
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
    red = _poly_mod(prod, list(F.modulus), p)
    return sum(c * p**i for i, c in enumerate(red))


def _find_primitive(F: FieldSpec) -> int:
    q = F.q
    factors = _prime_factors(q - 1)
    for g in range(2, q):
        if all(_slow_pow(g, (q - 1) // r, F) != 1 for r in factors):
            return g
    raise FieldError("no primitive element found")  # unreachable for a field


def _slow_pow(a: int, n: int, F: FieldSpec) -> int:
    result = 1
    while n:
        if n & 1:
            result = poly_mulmod(result, a, F)
        a = poly_mulmod(a, a, F)
        n >>= 1
    return result


def _check(a: int, F: FieldSpec) -> int:
    if not 0 <= a < F.q:
        raise FieldError(f"{a} is not an element of {F}")
    return a


def ff_add(a: int, b: int, F: FieldSpec) -> int:
    _check(a, F), _check(b, F)
    if F.p == 2:
        return a ^ b
    return int(vadd(F, a, b))


def ff_sub(a: int, b: int, F: FieldSpec) -> int:
    return ff_add(a, ff_neg(b, F), F)


def ff_neg(a: int, F: FieldSpec) -> int:
    _check(a, F)
    return int(vneg(F, a))


def ff_mul(a: int, b: int, F: FieldSpec) -> int:
    _check(a, F), _check(b, F)
    return int(vmul(F, a, b))


def ff_inv(a: int, F: FieldSpec) -> int:
    _check(a, F)
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return int(F.inv_table[a])


def ff_pow(a: int, n: int, F: FieldSpec) -> int:
    _check(a, F)
    if n < 0:
        a, n = ff_inv(a, F), -n
    if a == 0:
        return 1 if n == 0 else 0
    exp, log = F._exp_log
    return int(exp[(int(log[a]) * n) % (F.q - 1)])


def enumerate_field(F: FieldSpec) -> list[int]:
    """All elements, in increasing encoding order."""
    return list(range(F.q))


# -- vectorised arithmetic on integer arrays --

def vadd(F: FieldSpec, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if F.p == 2:
        return a ^ b
    if F.e == 1:
        return (a + b) % F.p
    return ((F.digits[a] + F.digits[b]) % F.p) @ F._weights


def vneg(F: FieldSpec, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if F.p == 2:
        return a
    if F.e == 1:
        return (-a) % F.p
    return ((-F.digits[a]) % F.p) @ F._weights


def vsub(F: FieldSpec, a, b) -> np.ndarray:
    return vadd(F, a, vneg(F, b))


def vmul(F: FieldSpec, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if F.e == 1:
        return (a * b) % F.p
    exp, log = F._exp_log
    out = exp[log[a] + log[b]]
    return np.where((a == 0) | (b == 0), 0, out)


def vinv(F: FieldSpec, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if np.any(a == 0):
        raise ZeroDivisionError("0 has no inverse")
    return F.inv_table[a]


def vsum(F: FieldSpec, a, axis: int = -1) -> np.ndarray:
    """Field sum along ``axis`` (digit-wise addition mod p)."""
    a = np.asarray(a, dtype=np.int64)
    if F.p == 2:
        return np.bitwise_xor.reduce(a, axis=axis)
    if F.e == 1:
        return a.sum(axis=axis) % F.p
    return (F.digits[a].sum(axis=axis if axis >= 0 else axis - 1) % F.p) @ F._weights


def vscale_prime(F: FieldSpec, a, c) -> np.ndarray:
    """Multiply elements by prime-subfield scalars ``c`` (ints mod p)."""
    a = np.asarray(a, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64) % F.p
    if F.e == 1:
        return (a * c) % F.p
    return ((F.digits[a] * c[..., None]) % F.p) @ F._weights


def to_digits(F: FieldSpec, a) -> np.ndarray:
    """Split elements into their e coordinates over GF(p); new last axis."""
    return F.digits[np.asarray(a, dtype=np.int64)]


def from_digits(F: FieldSpec, d) -> np.ndarray:
    return (np.asarray(d, dtype=np.int64) % F.p) @ F._weights
