"""Finite residue fields F_{p^k} with table-driven arithmetic.

An element is stored as an integer whose base-p digits are its coordinates
in the power basis 1, x, ..., x^{k-1} of F_p[x]/(f).  Series code works on
the coordinate vectors directly (see ``series.py``); the integer encoding is
used for scalar work and for Gaussian elimination over the field.
"""

from __future__ import annotations

import functools
import json
import os

import numpy as np

# Conway polynomials, coefficients listed from the constant term upwards.
# Override with a JSON file named by SHTUKALAB_FIELD_TABLE: {"p,k": [c0, ..., 1]}.
CANONICAL_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}

MAX_TABLE_ORDER = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) >= len(f):
        c = a[-1] * inv_lead % p
        if c:
            shift = len(a) - len(f)
            for i, fc in enumerate(f):
                a[shift + i] = (a[shift + i] - c * fc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    f = [c % p for c in poly]
    while f and f[-1] == 0:
        f.pop()
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for code in range(p**d):
            g = [(code // p**i) % p for i in range(d)] + [1]
            if not _poly_mod(f, g, p):
                return False
    return True


def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    for code in range(p**k):
        f = [(code // p**i) % p for i in range(k)] + [1]
        if f[0] and is_irreducible(f, p):
            return tuple(f)
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")


def load_field_table() -> dict[tuple[int, int], tuple[int, ...]]:
    path = os.environ.get("SHTUKALAB_FIELD_TABLE")
    if not path:
        return {}
    with open(path) as fh:
        raw = json.load(fh)
    return {tuple(int(t) for t in key.split(",")): tuple(v) for key, v in raw.items()}


def canonical_poly(p: int, k: int) -> tuple[int, ...]:
    table = {**CANONICAL_POLYS, **load_field_table()}
    return table.get((p, k)) or first_irreducible(p, k)


class Field:
    """The finite field F_p[x]/(poly).

    Instances are immutable and cached per (p, poly); build them with
    :func:`get_field`.
    """

    def __init__(self, p: int, poly: tuple[int, ...]):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if not is_irreducible(poly, p):
            raise ValueError(f"{poly} is not irreducible over F_{p}")
        self.p = p
        self.poly = tuple(c % p for c in poly)
        self.k = len(poly) - 1
        self.order = p**self.k
        if self.order > MAX_TABLE_ORDER:
            raise ValueError("field too large for table arithmetic")
        k, n = self.k, self.order
        self.powers = p ** np.arange(k, dtype=np.int64)
        self.vec = np.array([[(a // p**i) % p for i in range(k)] for a in range(n)],
                            dtype=np.int64).reshape(n, k)
        # reduction of x^i, i < 2k-1, to the power basis
        red = np.zeros((max(2 * k - 1, 1), k), dtype=np.int64)
        for i in range(2 * k - 1):
            red[i] = self._reduce_monomial(i)
        self.reduce = red
        mul = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            conv = np.zeros(2 * k - 1, dtype=np.int64)
            for b in range(n):
                conv[:] = np.convolve(self.vec[a], self.vec[b])
                mul[a, b] = self.encode(conv @ red % p)
        self.mul_table = mul
        self.add_table = self.encode((self.vec[:, None, :] + self.vec[None, :, :]) % p)
        self.neg_table = self.encode((-self.vec) % p)
        inv = np.zeros(n, dtype=np.int64)
        for a in range(1, n):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv_table = inv

    def _reduce_monomial(self, i):
        e = [0] * i + [1]
        r = _poly_mod(e, list(self.poly), self.p)
        return r + [0] * (self.k - len(r))

    def encode(self, vecs):
        """Coordinate vectors (last axis) to integer codes."""
        return np.asarray(vecs, dtype=np.int64) @ self.powers

    def add(self, a, b):
        return int(self.add_table[a, b])

    def sub(self, a, b):
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a):
        return int(self.neg_table[a])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in residue field")
        return int(self.inv_table[a])

    def pow(self, a, e):
        r, b = 1, a
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    @functools.cached_property
    def frobenius_p(self):
        """Matrix (acting on row vectors) of x -> x^p over F_p."""
        return np.array([self.vec[self.pow(self.p**i, self.p)] for i in range(self.k)],
                        dtype=np.int64).reshape(self.k, self.k)

    def frobenius_matrix(self, e: int):
        """Matrix of x -> x^{p^e}, acting on row coordinate vectors."""
        m = np.eye(self.k, dtype=np.int64)
        for _ in range(e % self.k if self.k else 0):
            m = m @ self.frobenius_p % self.p
        return m

    def elements(self):
        return range(self.order)

    def __repr__(self):
        return f"Field(p={self.p}, poly={self.poly})"


@functools.lru_cache(maxsize=None)
def get_field(p: int, poly: tuple[int, ...]) -> Field:
    return Field(p, tuple(poly))
