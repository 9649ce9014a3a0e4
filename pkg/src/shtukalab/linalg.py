"""Matrices over the ring tower, determinants and Smith normal forms."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce

from .errors import DimensionMismatch, NotAUnit, PrecisionExhausted
from .series import INF, BiSeries, RingTag, join_tags, poly_divmod


class Mat:
    """Immutable rectangular matrix of BiSeries sharing one ring tag."""

    __slots__ = ("entries", "rows", "cols", "cfg", "tag")

    def __init__(self, entries, tag: RingTag | None = None):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise DimensionMismatch("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged matrix")
        if tag is None:
            tag = reduce(join_tags, (x.tag for r in rows for x in r))
        object.__setattr__(self, "entries", tuple(tuple(x if x.tag is tag else x.retag(tag) for x in r)
                                                  for r in rows))
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "cfg", rows[0][0].cfg)
        object.__setattr__(self, "tag", tag)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def identity(cls, cfg, n, prec=None, tag=RingTag.TATE_INT):
        one = BiSeries.one(cfg, prec, tag)
        zero = BiSeries.zero(cfg, one.prec, None, tag)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], tag)

    @classmethod
    def zeros(cls, cfg, rows, cols, prec=None, tag=RingTag.TATE_INT):
        zero = BiSeries.zero(cfg, prec, None, tag)
        return cls([[zero] * cols for _ in range(rows)], tag)

    @classmethod
    def diag(cls, items, tag=None):
        items = list(items)
        cfg = items[0].cfg
        prec = min(x.prec for x in items)
        zero = BiSeries.zero(cfg, prec, None, items[0].tag)
        return cls([[items[i] if i == j else zero for j in range(len(items))]
                    for i in range(len(items))], tag)

    @classmethod
    def from_columns(cls, columns, tag=None):
        columns = [list(c) for c in columns]
        return cls([[c[i] for c in columns] for i in range(len(columns[0]))], tag)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return list(self.entries[i])

    def col(self, j):
        return [r[j] for r in self.entries]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self):
        return self.rows, self.cols

    def is_square(self):
        return self.rows == self.cols

    def map(self, fn, tag=None) -> "Mat":
        return Mat([[fn(x) for x in r] for r in self.entries], tag)

    def retag(self, tag):
        return Mat(self.entries, tag)

    def sigma(self, times=1):
        return self.map(lambda x: x.sigma(times))

    def truncate_z(self, zprec):
        return self.map(lambda x: x.truncate_z(zprec))

    def as_exact(self):
        return self.map(lambda x: x.as_exact())

    def with_prec(self, prec):
        return self.map(lambda x: x.with_prec(prec))

    def pi_shift(self, k):
        return self.map(lambda x: x.pi_shift(k))

    def reduce_mod_pi(self):
        return self.map(lambda x: x.reduce_mod_pi())

    def transpose(self):
        return Mat([list(c) for c in zip(*self.entries)], self.tag)

    def hstack(self, other):
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return Mat([list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def submatrix(self, rows, cols):
        return Mat([[self.entries[i][j] for j in cols] for i in rows], self.tag)

    @property
    def z_exact(self) -> bool:
        return all(x.zprec is None for r in self.entries for x in r)

    @property
    def min_valuation(self):
        return min((x.lo for r in self.entries for x in r if not x.is_zero()), default=INF)

    @property
    def prec(self):
        return min(x.prec for r in self.entries for x in r)

    def is_integral(self) -> bool:
        return self.min_valuation >= 0

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, BiSeries):
            return self.map(lambda x: x * other, join_tags(self.tag, other.tag))
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} * {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.entries[i][0] * other.entries[0][j]
                for t in range(1, self.cols):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            out.append(row)
        return Mat(out, join_tags(self.tag, other.tag))

    def __rmul__(self, other):
        if isinstance(other, BiSeries):
            return self.map(lambda x: other * x, join_tags(self.tag, other.tag))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None

    def det(self) -> BiSeries:
        return det(self)

    def adjugate(self) -> "Mat":
        return adjugate(self)

    def inverse(self) -> "Mat":
        """Inverse over the tagged ring; raises NotAUnit if det is not a unit."""
        d = self.det().invert()
        return self.adjugate() * d

    def __repr__(self):
        body = "; ".join(", ".join(x.to_literal() for x in r) for r in self.entries)
        return f"Mat<{self.tag.value}>[{body}]"


def det(m: Mat) -> BiSeries:
    """Determinant by Laplace expansion memoized over column subsets.

    Uses only ring operations, so no division ever costs precision: the
    result is certified modulo the propagated (pi, z) precision of the
    products involved.  Cost is O(n 2^n) products, fine for small ranks.
    """
    if not m.is_square():
        raise DimensionMismatch("det of a non-square matrix")
    n = m.rows
    memo: dict[tuple[int, int], BiSeries] = {}

    def minor(r: int, mask: int) -> BiSeries:
        if r == n:
            return BiSeries.one(m.cfg, m.prec - min(m.min_valuation, 0) * n + n, m.tag)
        key = (r, mask)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for j in range(n):
            if mask >> j & 1:
                continue
            a = m.entries[r][j]
            if not a.is_zero() or acc is None:
                term = a * minor(r + 1, mask | 1 << j)
                term = term if sign > 0 else -term
                acc = term if acc is None else acc + term
            sign = -sign
        memo[key] = acc
        return acc

    return minor(0, 0)


def adjugate(m: Mat) -> Mat:
    n = m.rows
    if n == 1:
        return Mat([[BiSeries.one(m.cfg, m.prec, m.tag)]], m.tag)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = m.submatrix([r for r in range(n) if r != i], [c for c in range(n) if c != j])
            d = det(sub)
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return Mat(out, m.tag)


def check_equivariant(A: Mat, T: Mat, T_target: Mat) -> bool:
    """Whether ``A * T == T_target * sigma(A)`` at the working precision."""
    if not (T.is_square() and T_target.is_square()):
        raise DimensionMismatch("T matrices must be square")
    if A.rows != T_target.rows or A.cols != T.rows:
        raise DimensionMismatch(f"A is {A.shape}, expected {(T_target.rows, T.rows)}")
    return A * T == T_target * A.sigma()


# ---------------------------------------------------------------------------
# Smith normal forms


class SNFRing(enum.Enum):
    ELL_Z_FORMAL = "ell_z_formal"
    ELL_Z_POLY = "ell_z_poly"
    O_L = "o_L"


@dataclass(frozen=True)
class SmithForm:
    """``left * m * right == diag(divisors)`` with a divisibility chain.

    ``exponents`` holds the z- or pi-exponent of each divisor (``None`` for a
    divisor that vanishes at working precision); over l[z] the divisors are
    monic polynomials and ``exponents`` holds their degrees.
    """

    ring: SNFRing
    divisors: tuple
    exponents: tuple
    left: Mat
    right: Mat

    def diagonal(self, rows, cols) -> Mat:
        cfg = self.left.cfg
        zero = BiSeries.zero(cfg, self.divisors[0].prec if self.divisors else None, None,
                             self.left.tag)
        return Mat([[self.divisors[i] if i == j and i < len(self.divisors) else zero
                     for j in range(cols)] for i in range(rows)], self.left.tag)

    @property
    def rank(self) -> int:
        return sum(1 for e in self.exponents if e is not None)


def _ident(cfg, n, prec, tag):
    one = BiSeries.one(cfg, prec, tag)
    zero = BiSeries.zero(cfg, prec, None, tag)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _swap_rows(M, a, b):
    M[a], M[b] = M[b], M[a]


def _swap_cols(M, a, b):
    for r in M:
        r[a], r[b] = r[b], r[a]


def _ell_z_val(x: BiSeries):
    if x.is_zero():
        return INF
    return x.ordz


def _o_l_val(x: BiSeries):
    return INF if x.is_zero() else x.lo


def _ell_z_unit(x: BiSeries, v):
    return x.shift_z(-v)


def _o_l_unit(x: BiSeries, v):
    return x.pi_shift(-v)


def _dvr_snf(m: Mat, ring: SNFRing):
    cfg = m.cfg
    if ring is SNFRing.O_L:
        val, unit_part, tag = _o_l_val, _o_l_unit, RingTag.TATE_GEN
        if not m.z_exact or any(x.nz > 1 for r in m.entries for x in r):
            raise ValueError("o_L Smith form needs z-constant entries")
    else:
        val, unit_part, tag = _ell_z_val, _ell_z_unit, RingTag.FORMAL
    M = [list(r) for r in m.map(lambda x: x.retag(tag)).entries]
    n, k = m.rows, m.cols
    prec = m.prec
    U = _ident(cfg, n, prec, tag)
    V = _ident(cfg, k, prec, tag)
    divisors, exps = [], []
    for t in range(min(n, k)):
        best = None
        for i in range(t, n):
            for j in range(t, k):
                v = val(M[i][j])
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        _swap_rows(M, t, i)
        _swap_rows(U, t, i)
        _swap_cols(M, t, j)
        _swap_cols(V, t, j)
        piv = M[t][t]
        inv = unit_part(piv, v).invert()
        # normalize the pivot to pi^v or z^v
        M[t] = [x * inv for x in M[t]]
        U[t] = [x * inv for x in U[t]]
        for i in range(t + 1, n):
            if val(M[i][t]) == INF:
                continue
            f = unit_part(M[i][t], v)
            M[i] = [a - f * b for a, b in zip(M[i], M[t])]
            U[i] = [a - f * b for a, b in zip(U[i], U[t])]
        for j in range(t + 1, k):
            if val(M[t][j]) == INF:
                continue
            f = unit_part(M[t][j], v)
            for r in range(n):
                M[r][j] = M[r][j] - f * M[r][t]
            for r in range(k):
                V[r][j] = V[r][j] - f * V[r][t]
        divisors.append(M[t][t])
        exps.append(v)
    zero = BiSeries.zero(cfg, prec, None, tag)
    while len(divisors) < min(n, k):
        divisors.append(zero)
        exps.append(None)
    return SmithForm(ring, tuple(divisors), tuple(exps), Mat(U, tag), Mat(V, tag))


def _poly_deg(x: BiSeries):
    return INF if x.is_zero() else x.degree


def _euclid_snf(m: Mat):
    cfg = m.cfg
    if not m.z_exact:
        raise ValueError("l[z] Smith form needs z-exact entries")
    tag = RingTag.POLY_L
    M = [list(r) for r in m.map(lambda x: x.reduce_mod_pi().retag(tag)).entries]
    n, k = m.rows, m.cols
    U = _ident(cfg, n, 1, tag)
    V = _ident(cfg, k, 1, tag)
    divisors, exps = [], []
    for t in range(min(n, k)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, k):
                    d = _poly_deg(M[i][j])
                    if d != INF and (best is None or d < best[0]):
                        best = (d, i, j)
            if best is None:
                break
            _, i, j = best
            _swap_rows(M, t, i)
            _swap_rows(U, t, i)
            _swap_cols(M, t, j)
            _swap_cols(V, t, j)
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, n):
                if M[i][t].is_zero():
                    continue
                f, r = poly_divmod(M[i][t], piv)
                M[i] = [a - f * b for a, b in zip(M[i], M[t])]
                U[i] = [a - f * b for a, b in zip(U[i], U[t])]
                dirty |= not r.is_zero()
            for j in range(t + 1, k):
                if M[t][j].is_zero():
                    continue
                f, r = poly_divmod(M[t][j], piv)
                for rr in range(n):
                    M[rr][j] = M[rr][j] - f * M[rr][t]
                for rr in range(k):
                    V[rr][j] = V[rr][j] - f * V[rr][t]
                dirty |= not r.is_zero()
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, k)
                        if not poly_divmod(M[i][j], piv)[1].is_zero()), None)
            if bad is None:
                break
            i = bad[0]
            M[t] = [a + b for a, b in zip(M[t], M[i])]
            U[t] = [a + b for a, b in zip(U[t], U[i])]
        if best is None:
            break
        piv = M[t][t]
        lead_inv = piv.z_coeff(piv.degree).invert()
        M[t] = [x * lead_inv for x in M[t]]
        U[t] = [x * lead_inv for x in U[t]]
        divisors.append(M[t][t])
        exps.append(M[t][t].degree)
    zero = BiSeries.zero(cfg, 1, None, tag)
    while len(divisors) < min(n, k):
        divisors.append(zero)
        exps.append(None)
    return SmithForm(SNFRing.ELL_Z_POLY, tuple(divisors), tuple(exps), Mat(U, tag), Mat(V, tag))


def smith_normal_form(m: Mat, ring: SNFRing | str) -> SmithForm:
    """Smith form over l[[z]] (entries reduced mod pi), l[z], or o_L.

    Pivots are chosen with minimal valuation (z-order, degree or
    pi-valuation), ties broken by lowest row then lowest column index.
    """
    ring = SNFRing(ring)
    if ring is SNFRing.ELL_Z_POLY:
        return _euclid_snf(m)
    if ring is SNFRing.ELL_Z_FORMAL:
        m = m.reduce_mod_pi()
        if any(x.prec < 1 for r in m.entries for x in r):
            raise PrecisionExhausted("entries carry no pi-digit")
    return _dvr_snf(m, ring)


def unit_in_formal(x: BiSeries) -> bool:
    """Whether x is a unit of l[[pi, z]] (constant term has valuation 0)."""
    try:
        return x.lo == 0 and x.coeff(0, 0) != 0
    except PrecisionExhausted:
        return False


def pi_power_times_formal_unit(x: BiSeries):
    """Return a when x = pi^a * (unit of l[[pi, z]]), else None."""
    if x.is_zero():
        return None
    a = x.lo
    return a if unit_in_formal(x.pi_shift(-a)) else None


def is_tate_unit(x: BiSeries) -> bool:
    """Unit of o_L<z>: integral with reduction a nonzero constant."""
    if x.lo != 0:
        return False
    red = x.reduce_mod_pi()
    return red.coeff(0, 0) != 0 and not red.data[1:].any()


__all__ = [
    "Mat", "det", "adjugate", "check_equivariant", "SNFRing", "SmithForm",
    "smith_normal_form", "unit_in_formal", "pi_power_times_formal_unit", "is_tate_unit",
    "NotAUnit",
]
