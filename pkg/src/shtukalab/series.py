"""Truncated elements of l((pi))[[z]] and the subrings of the ring tower.

A :class:`BiSeries` is a finite block of coefficients ``c[j][i]`` standing for
``sum c[j][i] * pi^(lo+i) * z^j`` together with two precision bounds:

* ``prec`` -- the element is known modulo ``pi^prec`` (absolute);
* ``zprec`` -- the element is known modulo ``z^zprec``, or ``None`` when the
  z-dependence is an exact polynomial (the z-exactness certificate).

Every operation derives the precision of its result from those of its inputs
and never reports digits it cannot certify.  Ring tags record which ring of
the tower an element is meant to live in::

    POLY_L      L[z]
    TATE_INT    o_L<z>          (also used for o_L[z] when z-exact)
    TATE_GEN    L<z>
    FORMAL      l[[pi, z]] = o_L[[z]]
    FORMAL_GEN  l[[pi, z]][1/pi]

Field elements are stored as coordinate vectors over F_p, so every block is
an int64 array of shape ``(nz, npi, k)``.
"""

from __future__ import annotations

import enum
import math

import numpy as np
import scipy.signal

from .errors import NotAUnit, NotDistinguishedDivisor, PrecisionExhausted, TruncationUnsound

INF = math.inf


class RingTag(enum.Enum):
    POLY_L = "POLY_L"
    TATE_INT = "TATE_INT"
    TATE_GEN = "TATE_GEN"
    FORMAL = "FORMAL"
    FORMAL_GEN = "FORMAL_GEN"

    @property
    def integral(self) -> bool:
        return self in (RingTag.TATE_INT, RingTag.FORMAL)

    @property
    def level(self) -> int:
        return {"POLY_L": 0, "TATE_INT": 1, "TATE_GEN": 1, "FORMAL": 2, "FORMAL_GEN": 2}[self.value]

    @property
    def generic(self) -> "RingTag":
        return {RingTag.TATE_INT: RingTag.TATE_GEN, RingTag.FORMAL: RingTag.FORMAL_GEN}.get(self, self)


_BY_KEY = {
    (False, 0): RingTag.POLY_L,
    (True, 0): RingTag.TATE_INT,
    (True, 1): RingTag.TATE_INT,
    (False, 1): RingTag.TATE_GEN,
    (True, 2): RingTag.FORMAL,
    (False, 2): RingTag.FORMAL_GEN,
}


def join_tags(a: RingTag, b: RingTag) -> RingTag:
    """Smallest ring of the tower containing both."""
    if a is b:
        return a
    return _BY_KEY[(a.integral and b.integral, max(a.level, b.level))]


_KRON_COST = 100_000
_SPARSE_TERMS = 8


def _convolve(a, b, p):
    """Full 3-D convolution of integer blocks (exact)."""
    n1, m1, k = a.shape
    n2, m2, _ = b.shape
    out_shape = (n1 + n2 - 1, m1 + m2 - 1, 2 * k - 1)
    nza, nzb = np.count_nonzero(a), np.count_nonzero(b)
    if min(nza, nzb) <= _SPARSE_TERMS:
        # shift-and-add over the nonzero digits of the sparser factor
        if nzb < nza:
            a, b = b, a
            n2, m2 = n1, m1
        out = np.zeros(out_shape, dtype=np.int64)
        for j, i, t in zip(*np.nonzero(a)):
            out[j:j + n2, i:i + m2, t:t + k] += a[j, i, t] * b
        return out
    sp, sx = out_shape[1], out_shape[2]
    if (n1 * sp * sx) * (n2 * sp * sx) <= _KRON_COST:
        # Kronecker substitution: padding keeps the index sums from colliding
        A = np.zeros((n1, sp, sx), dtype=np.int64)
        A[:, :m1, :k] = a
        B = np.zeros((n2, sp, sx), dtype=np.int64)
        B[:, :m2, :k] = b
        c = np.convolve(A.ravel(), B.ravel())
        return c[: out_shape[0] * sp * sx].reshape(out_shape)
    # rounded FFT is exact while every partial sum stays far below 2**52
    assert min(n1, n2) * min(m1, m2) * k * (p - 1) ** 2 < 2**40
    c = scipy.signal.fftconvolve(a.astype(np.float64), b.astype(np.float64))
    return np.rint(c).astype(np.int64)


class BiSeries:
    """Immutable truncated element of l((pi))[[z]] carrying a ring tag."""

    __slots__ = ("cfg", "data", "lo", "zprec", "tag")

    def __init__(self, cfg, data, lo: int, prec: int, zprec: int | None = None,
                 tag: RingTag = RingTag.FORMAL):
        p, k = cfg.p, cfg.field.k
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.size == 0:
            arr = arr.reshape(arr.shape[0], arr.shape[1] if arr.ndim > 1 else 0, k)
        arr = arr % p
        width = max(prec - lo, 0)
        if arr.shape[1] >= width:
            arr = arr[:, :width]
        else:
            arr = np.concatenate([arr, np.zeros((arr.shape[0], width - arr.shape[1], k), np.int64)], 1)
        if zprec is not None:
            if zprec < 0:
                raise PrecisionExhausted("negative z-precision")
            if arr.shape[0] >= zprec:
                arr = arr[:zprec]
            else:
                arr = np.concatenate([arr, np.zeros((zprec - arr.shape[0], width, k), np.int64)], 0)
        cols = np.flatnonzero(arr.any(axis=(0, 2))) if arr.size else np.array([], dtype=np.int64)
        if cols.size == 0:
            lo = prec
            arr = arr[:, :0]
            if zprec is None:
                arr = arr[:0]
        else:
            arr = arr[:, cols[0]:]
            lo += int(cols[0])
            if zprec is None:
                rows = np.flatnonzero(arr.any(axis=(1, 2)))
                arr = arr[: rows[-1] + 1]
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "cfg", cfg)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "lo", int(lo))
        object.__setattr__(self, "zprec", zprec)
        object.__setattr__(self, "tag", tag)

    def __setattr__(self, name, value):
        raise AttributeError("BiSeries is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, cfg, prec=None, zprec=None, tag=RingTag.FORMAL):
        prec = cfg.default_pi_prec if prec is None else prec
        return cls(cfg, np.zeros((0, 0, cfg.field.k), np.int64), prec, prec, zprec, tag)

    @classmethod
    def from_terms(cls, cfg, terms, prec=None, zprec=None, tag=RingTag.FORMAL):
        """Build from ``{(pi_exp, z_exp): code}``; codes are field integers."""
        prec = cfg.default_pi_prec if prec is None else prec
        terms = {key: c for key, c in dict(terms).items() if c}
        if not terms:
            return cls.zero(cfg, prec, zprec, tag)
        lo = min(i for i, _ in terms)
        nz = max(j for _, j in terms) + 1
        width = max(prec - lo, 0)
        arr = np.zeros((nz, max(width, max(i for i, _ in terms) - lo + 1), cfg.field.k), np.int64)
        for (i, j), c in terms.items():
            arr[j, i - lo] = cfg.field.vec[c] if np.isscalar(c) else c
        return cls(cfg, arr, lo, prec, zprec, tag)

    @classmethod
    def constant(cls, cfg, code=1, prec=None, tag=RingTag.FORMAL):
        return cls.from_terms(cfg, {(0, 0): code}, prec, None, tag)

    @classmethod
    def one(cls, cfg, prec=None, tag=RingTag.FORMAL):
        return cls.constant(cfg, 1, prec, tag)

    @classmethod
    def monomial(cls, cfg, pi_exp=0, z_exp=0, code=1, prec=None, tag=RingTag.FORMAL):
        return cls.from_terms(cfg, {(pi_exp, z_exp): code}, prec, None, tag)

    @classmethod
    def zeta(cls, cfg, prec=None, tag=RingTag.TATE_INT):
        return cls.from_terms(cfg, {(i, 0): c for i, c in cfg.zeta}, prec, None, tag)

    @classmethod
    def z_minus_zeta(cls, cfg, prec=None, tag=RingTag.TATE_INT):
        return cls.monomial(cfg, 0, 1, 1, prec, tag) - cls.zeta(cfg, prec, tag)

    @classmethod
    def from_z_coeffs(cls, cfg, coeffs, zprec=None, tag=RingTag.FORMAL, prec=None):
        """Assemble from a list of z-constant series (coefficient of z^j at j)."""
        coeffs = list(coeffs)
        if prec is None:
            prec = min((c.prec for c in coeffs), default=cfg.default_pi_prec)
        if not coeffs:
            return cls.zero(cfg, prec, zprec, tag)
        lo = min(min(c.lo for c in coeffs), prec)
        arr = np.zeros((len(coeffs), prec - lo, cfg.field.k), np.int64)
        for j, c in enumerate(coeffs):
            if c.data.shape[0]:
                arr[j] = c._window(lo, prec, 1)[0]
        return cls(cfg, arr, lo, prec, zprec, tag)

    # ---- basic properties ---------------------------------------------

    @property
    def prec(self) -> int:
        return self.lo + self.data.shape[1]

    @property
    def nz(self) -> int:
        return self.data.shape[0]

    @property
    def field(self):
        return self.cfg.field

    def is_zero(self) -> bool:
        """True when every certified digit vanishes."""
        return self.data.shape[1] == 0

    @property
    def valuation(self):
        """Gauss valuation (minimum pi-valuation over z-coefficients)."""
        return self.lo

    @property
    def ordz(self):
        rows = np.flatnonzero(self.data.any(axis=(1, 2))) if self.data.size else []
        if len(rows):
            return int(rows[0])
        return INF if self.zprec is None else self.zprec

    @property
    def degree(self) -> int:
        """z-degree of an exact polynomial (-1 for zero)."""
        if self.zprec is not None:
            raise TruncationUnsound("degree of a z-truncated series")
        return self.nz - 1

    @property
    def is_z_exact(self) -> bool:
        return self.zprec is None

    def is_integral(self) -> bool:
        return self.lo >= 0

    def coeff(self, i: int, j: int) -> int:
        """Field code of the coefficient of pi^i z^j."""
        if i >= self.prec or (self.zprec is not None and j >= self.zprec):
            raise PrecisionExhausted(f"coefficient pi^{i} z^{j} beyond precision")
        if i < self.lo or j >= self.nz:
            return 0
        return int(self.field.encode(self.data[j, i - self.lo]))

    def terms(self):
        """Yield ``(pi_exp, z_exp, code)`` for nonzero coefficients, sorted by (z, pi)."""
        codes = self.field.encode(self.data) if self.data.size else np.zeros((0, 0), np.int64)
        for j, i in zip(*np.nonzero(codes)):
            yield self.lo + int(i), int(j), int(codes[j, i])

    # ---- structural helpers -------------------------------------------

    def _window(self, lo, prec, nz):
        k = self.field.k
        out = np.zeros((nz, max(prec - lo, 0), k), np.int64)
        off = self.lo - lo
        m = min(self.data.shape[1], prec - self.lo)
        r = min(self.nz, nz)
        if m > 0 and r > 0:
            out[:r, off:off + m] = self.data[:r, :m]
        return out

    def _new(self, data, lo, prec, zprec, tag=None):
        return BiSeries(self.cfg, data, lo, prec, zprec, self.tag if tag is None else tag)

    def retag(self, tag: RingTag) -> "BiSeries":
        return self._new(self.data, self.lo, self.prec, self.zprec, tag)

    def with_prec(self, prec: int) -> "BiSeries":
        return self._new(self.data, self.lo, min(prec, self.prec), self.zprec)

    def truncate_z(self, zprec: int | None) -> "BiSeries":
        if zprec is None:
            return self
        if self.zprec is not None:
            zprec = min(zprec, self.zprec)
        return self._new(self.data, self.lo, self.prec, zprec)

    def as_exact(self) -> "BiSeries":
        """Treat the stored truncation as an exact polynomial representative."""
        return self._new(self.data, self.lo, self.prec, None)

    def pi_shift(self, k: int) -> "BiSeries":
        """Multiply by pi^k (exact)."""
        return self._new(self.data, self.lo + k, self.prec + k, self.zprec)

    def shift_z(self, k: int) -> "BiSeries":
        """Multiply by z^k; for k < 0 the low coefficients must vanish."""
        kk = self.field.k
        zp = None if self.zprec is None else self.zprec + k
        if k >= 0:
            pad = np.zeros((k, self.data.shape[1], kk), np.int64)
            return self._new(np.concatenate([pad, self.data], 0), self.lo, self.prec, zp)
        if self.data[: -k].any():
            raise ValueError("series is not divisible by the requested power of z")
        return self._new(self.data[-k:], self.lo, self.prec, zp)

    def rows_below(self, n: int) -> "BiSeries":
        """The exact polynomial formed by the coefficients of z^0 .. z^(n-1)."""
        if self.zprec is not None and self.zprec < n:
            raise PrecisionExhausted("not enough z-coefficients")
        return self._new(self.data[:n], self.lo, self.prec, None)

    def z_coeff(self, j: int) -> "BiSeries":
        if self.zprec is not None and j >= self.zprec:
            raise PrecisionExhausted(f"z^{j} beyond z-precision")
        return self._new(self.data[j:j + 1], self.lo, self.prec, None)

    def reduce_mod_pi(self) -> "BiSeries":
        """Image in l[z] (exact) or l[[z]] (truncated); keeps one pi-digit."""
        if self.lo < 0:
            raise ValueError("reduction mod pi of a non-integral element")
        if self.prec < 1:
            raise PrecisionExhausted("no pi-digits to reduce")
        return self.with_prec(1)

    def scale(self, code: int) -> "BiSeries":
        """Multiply by a residue-field scalar."""
        f = self.field
        m = f.vec[f.mul_table[f.powers, code]]
        return self._new(self.data @ m, self.lo, self.prec, self.zprec)

    # ---- ring operations ----------------------------------------------

    def _coerce(self, other):
        if isinstance(other, BiSeries):
            return other
        if isinstance(other, (int, np.integer)):
            c = int(other) % self.cfg.p
            return BiSeries.constant(self.cfg, c, self.prec, self.tag)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        lo = min(self.lo, other.lo, prec)
        zps = [z for z in (self.zprec, other.zprec) if z is not None]
        zprec = min(zps) if zps else None
        nz = zprec if zprec is not None else max(self.nz, other.nz)
        data = self._window(lo, prec, nz) + other._window(lo, prec, nz)
        return BiSeries(self.cfg, data, lo, prec, zprec, join_tags(self.tag, other.tag))

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.data, self.lo, self.prec, self.zprec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        p = self.cfg.p
        prec = min(a.prec + b.lo, b.prec + a.lo)
        lo = a.lo + b.lo
        zprec = a._product_zprec(b, prec)
        tag = join_tags(a.tag, b.tag)
        width = prec - lo
        rows = None if zprec is None else zprec
        da = a.data[:rows, :width]
        db = b.data[:rows, :width]
        if width <= 0 or da.size == 0 or db.size == 0:
            return BiSeries.zero(self.cfg, prec, zprec, tag)
        c = _convolve(da, db, p) % p
        c = c @ self.field.reduce
        return BiSeries(self.cfg, c, lo, prec, zprec, tag)

    __rmul__ = __mul__

    def _product_zprec(self, b, prec):
        a = self
        if a.zprec is None and b.zprec is None:
            return None
        # the z-order of one factor raises the z-precision contributed by the
        # other factor's truncation only when the cross term pi^P * z^D is
        # already below the certified pi-precision
        integral = a.lo >= 0 and b.lo >= 0
        gain_b = b.ordz if integral and prec <= b.prec else 0
        gain_a = a.ordz if integral and prec <= a.prec else 0
        da = INF if a.zprec is None else a.zprec
        db = INF if b.zprec is None else b.zprec
        z = min(da + gain_b, db + gain_a)
        return None if z == INF else int(z)

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = BiSeries.one(self.cfg, max(self.prec - self.lo, 1) + max(self.lo, 0) * n, self.tag)
        result = result.truncate_z(self.zprec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        """Agreement at the common precision (pi- and z-adic)."""
        if not isinstance(other, BiSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def sigma(self, times: int = 1) -> "BiSeries":
        """Frobenius lift: c*pi^i*z^j -> c^q * pi^(q*i) * z^j."""
        out = self
        for _ in range(times):
            out = out._sigma_once()
        return out

    def _sigma_once(self):
        cfg = self.cfg
        q = cfg.q
        m = cfg.field.frobenius_matrix(cfg.e)
        nz, npi, k = self.data.shape
        spread = np.zeros((nz, q * npi, k), np.int64)
        if npi:
            spread[:, ::q] = self.data @ m
        return self._new(spread, q * self.lo, q * self.prec, self.zprec)

    def invert(self) -> "BiSeries":
        """Inverse of a unit of the tagged ring (raises NotAUnit otherwise)."""
        cfg = self.cfg
        if self.is_zero():
            raise NotAUnit("zero at working precision")
        v = self.lo
        if v != 0 and self.tag.integral:
            raise NotAUnit(f"pi-valuation {v} in an integral ring")
        w = self.pi_shift(-v)
        c0 = w.coeff(0, 0) if w.nz and w.prec > 0 else 0
        if c0 == 0:
            raise NotAUnit("constant term is not a unit")
        red = w.data[1:, :1].any() if w.data.shape[1] else False
        tate_unit = not red
        if self.tag is RingTag.POLY_L and w.nz > 1:
            raise NotAUnit("non-constant polynomial in L[z]")
        if self.tag.level == 1 and not tate_unit:
            raise NotAUnit("reduction mod pi is not a nonzero constant")
        if not tate_unit and w.zprec is None:
            w = w.truncate_z(cfg.default_z_prec)
        one = BiSeries.one(cfg, w.prec, w.tag).truncate_z(w.zprec)
        x = BiSeries.constant(cfg, cfg.field.inv(c0), w.prec, w.tag)
        for _ in range(4 * (w.prec + (w.zprec or 0)) + 8):
            err = one - w * x
            if err.is_zero():
                break
            x = x + x * err
        else:
            raise PrecisionExhausted("inversion did not converge")
        x = x.truncate_z(w.zprec) if w.zprec is not None else x
        return x.pi_shift(-v).retag(self.tag)

    def __truediv__(self, other):
        return self * other.invert()

    # ---- text ---------------------------------------------------------

    def to_literal(self) -> str:
        """Canonical literal: terms sorted by (z, pi) exponent, zeros omitted."""
        parts = []
        for i, j, code in self.terms():
            vec = [int(x) for x in self.field.vec[code]]
            while vec and vec[-1] == 0:
                vec.pop()
            parts.append(f"[{','.join(map(str, vec))}]*pi^{i}*z^{j}")
        body = " + ".join(parts) if parts else "0"
        tail = f" @ pi^{self.prec}" + ("" if self.zprec is None else f", z^{self.zprec}")
        return body + tail

    def __repr__(self):
        return f"BiSeries<{self.tag.value}>({self.to_literal()})"


# ---------------------------------------------------------------------------
# Frobenius decomposition


def frobenius_decompose(a: BiSeries) -> list[BiSeries]:
    """Write an integral ``a`` as ``sum_{i<q} sigma(b_i) * pi^i``.

    ``b_i`` is known modulo ``pi^ceil((prec - i)/q)``; the decomposition is
    unique because the residue field is perfect.
    """
    cfg = a.cfg
    q = cfg.q
    if a.lo < 0:
        raise ValueError("frobenius_decompose needs an integral element")
    P = a.prec
    if P < q:
        raise PrecisionExhausted(f"pi-precision {P} < q = {q}")
    inv = cfg.field.frobenius_matrix((-cfg.e) % cfg.field.k)
    nz = a.nz
    full = a._window(0, P, nz)
    parts = []
    for i in range(q):
        cols = full[:, i::q] @ inv
        parts.append(BiSeries(cfg, cols, 0, -(-(P - i) // q), a.zprec, a.tag))
    return parts


def frobenius_recompose(parts) -> BiSeries:
    total = None
    for i, b in enumerate(parts):
        term = b.sigma().pi_shift(i)
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# Division algorithms


def poly_divmod(h: BiSeries, g: BiSeries):
    """Long division of z-exact polynomials; the leading coefficient of g
    must be invertible in L (any nonzero Laurent series)."""
    if h.zprec is not None or g.zprec is not None:
        raise TruncationUnsound("polynomial division needs z-exact inputs")
    cfg = h.cfg
    n = g.degree
    if n < 0:
        raise ZeroDivisionError("division by zero polynomial")
    tag = join_tags(h.tag, g.tag)
    gc = [g.z_coeff(t).retag(RingTag.POLY_L) for t in range(n + 1)]
    lead_inv = gc[n].invert()
    rows = [h.z_coeff(j) for j in range(h.nz)]
    quot = [None] * max(h.nz - n, 0)
    for j in range(h.nz - 1, n - 1, -1):
        c = rows[j] * lead_inv
        quot[j - n] = c
        for t in range(n):
            rows[j - n + t] = rows[j - n + t] - c * gc[t]
        rows[j] = BiSeries.zero(cfg, rows[j].prec)
    prec = min([r.prec for r in rows] + [c.prec for c in quot if c is not None] + [h.prec])
    Q = BiSeries.from_z_coeffs(cfg, [c if c is not None else BiSeries.zero(cfg, prec) for c in quot],
                               None, tag, prec)
    R = BiSeries.from_z_coeffs(cfg, rows[:n], None, tag, prec)
    return Q, R


def tate_divmod(h: BiSeries, g: BiSeries):
    """Division in L<z> by a polynomial g: ``h = Q*g + R`` with deg R < n,
    where n is the degree of the reduction of g / pi^v(g).

    Both inputs must be z-exact polynomials; the quotient converges
    pi-adically, so at finite pi-precision it is again a polynomial.
    """
    if h.zprec is not None or g.zprec is not None:
        raise TruncationUnsound("Tate division needs z-exact inputs")
    if g.is_zero():
        raise ZeroDivisionError("division by zero")
    cfg = h.cfg
    a = g.lo
    g0 = g.pi_shift(-a)
    n = g0.reduce_mod_pi().degree
    g_lo = g0.rows_below(n + 1)
    g_hi = g0 - g_lo
    Q = BiSeries.zero(cfg, h.prec, None, h.tag)
    R = BiSeries.zero(cfg, h.prec, None, h.tag)
    cur = h
    for _ in range(h.prec - h.lo + 2):
        if cur.is_zero() or cur.lo >= h.prec:
            break
        q, r = poly_divmod(cur, g_lo)
        Q, R = Q + q, R + r
        cur = -(q * g_hi)
    else:
        raise PrecisionExhausted("Tate division did not converge")
    return Q.with_prec(cur.prec).pi_shift(-a), R.with_prec(cur.prec)


def _working_zprec(g, f, n, z_prec):
    finite = [x.zprec for x in (g, f) if x.zprec is not None]
    if finite:
        return min(finite)
    low = f.rows_below(n)
    vp = max(low.lo, 1)
    span = max(g.prec - g.lo, 1)
    need = n * (-(-span // vp) + 2) if n else 0
    base = z_prec if z_prec is not None else g.cfg.default_z_prec
    return max(base, g.nz + 1, f.nz + 1, need)


def weierstrass_divide(g: BiSeries, f: BiSeries, z_prec: int | None = None):
    """Division with remainder in o_L[[z]] by f with f mod pi nonzero.

    Returns ``(Q, R)`` with ``g = Q*f + R`` and ``deg_z R < n`` where
    ``n = ord_z(f mod pi)``.  The identity holds modulo ``(pi^P, z^D)`` for
    the stored representatives; ``Q`` keeps only the z-coefficients that
    truncation at z^D cannot reach at its pi-precision.
    ``R`` is exact in z; its pi-precision is capped where truncation of the
    inputs at z^D could still alter it.
    """
    if f.lo < 0:
        raise ValueError("divisor must be integral")
    if f.lo > 0 or f.is_zero():
        raise NotDistinguishedDivisor("divisor vanishes modulo pi")
    n = f.reduce_mod_pi().ordz
    D = _working_zprec(g, f, n, z_prec)
    if n == INF or n >= D:
        raise NotDistinguishedDivisor("divisor vanishes modulo pi at working z-precision")
    cfg = g.cfg
    tag = join_tags(g.tag, f.tag)
    gt, ft = g.truncate_z(D), f.truncate_z(D)
    low = ft.rows_below(n)
    unit = (ft - low).shift_z(-n)
    V = unit.invert()
    Q = BiSeries.zero(cfg, g.prec, D - n, tag)
    R = BiSeries.zero(cfg, g.prec, None, tag)
    h = gt
    for _ in range(2 * (g.prec - g.lo) + 4):
        if h.is_zero() or h.lo >= g.prec:
            break
        r = h.rows_below(n)
        q_t = (h - r).shift_z(-n) * V
        Q, R = Q + q_t, R + r
        h = -(q_t.as_exact() * low).truncate_z(D)
    else:
        raise PrecisionExhausted("Weierstrass division did not converge")
    cap = qcap = h.prec
    zq = D - n
    if n and not low.is_zero():
        # the unknown tail of g past z^D need not share the valuation of the
        # known part, only integrality
        base = min(g.lo, 0)
        cap = qcap = min(cap, base + (D // n) * low.lo)
        # a digit lost at z^D reaches z^(D - k n) of Q after k steps, gaining k v(low)
        steps = max(-(-(cap - base) // low.lo), 0)
        if D - n - n * steps < 1:
            steps = (D - n - 1) // n
            qcap = min(cap, base + steps * low.lo)
        zq = D - n - n * steps
    Q = Q.truncate_z(min(zq, Q.zprec))
    return Q.with_prec(qcap).retag(tag), R.with_prec(cap).retag(tag)


def weierstrass_factor(h: BiSeries, z_prec: int | None = None):
    """Split ``h = Delta * unit`` with Delta distinguished of degree e.

    Returns ``(e, unit, is_zeta_power)`` where the flag records whether
    Delta equals (z - zeta)^e at the certified precision.
    """
    cfg = h.cfg
    if h.lo != 0 or h.is_zero():
        raise NotDistinguishedDivisor("element vanishes modulo pi")
    e = h.reduce_mod_pi().ordz
    if e == INF or (h.zprec is not None and e >= h.zprec):
        raise NotDistinguishedDivisor("reduction vanishes at working z-precision")
    if e == 0:
        return 0, h, True
    ze = BiSeries.monomial(cfg, 0, e, 1, h.prec, h.tag)
    Q, R = weierstrass_divide(ze, h, z_prec)
    delta = ze - R
    target = BiSeries.z_minus_zeta(cfg, delta.prec, h.tag) ** e
    return e, Q.invert(), delta == target


def divides(g: BiSeries, f: BiSeries, tag: RingTag) -> bool:
    """Whether g divides f in the ring named by ``tag``."""
    if f.is_zero():
        return True
    if tag is RingTag.POLY_L:
        return poly_divmod(f, g)[1].is_zero()
    if tag.level == 1:
        Q, R = tate_divmod(f, g)
        return R.is_zero() and (not tag.integral or Q.lo >= 0)
    a = g.lo
    Q, R = weierstrass_divide(f, g.pi_shift(-a))
    return R.is_zero() and (not tag.integral or Q.lo - a >= 0)
