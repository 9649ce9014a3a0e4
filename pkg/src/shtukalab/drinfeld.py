"""Drinfeld F_q[z]-modules, their motives, and the good-reduction test."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PrecisionExhausted, PreconditionError, VerificationFailed
from .linalg import Mat
from .motives import FMod, ModelData, is_strong_good_model
from .series import BiSeries, RingTag

_L = RingTag.POLY_L


class TwistedPoly:
    """Element sum c_i tau^i of L{tau} with tau * c = c^q * tau."""

    __slots__ = ("cfg", "coeffs")

    def __init__(self, cfg, coeffs):
        coeffs = [c.retag(_L) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.cfg = cfg
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def tau(cls, cfg, power=1, prec=None):
        zero = BiSeries.zero(cfg, prec, None, _L)
        return cls(cfg, [zero] * power + [BiSeries.one(cfg, prec, _L)])

    @classmethod
    def scalar(cls, cfg, c: BiSeries):
        return cls(cfg, [c])

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        return twisted_mul(self, other)

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else None
            b = other.coeffs[i] if i < len(other.coeffs) else None
            out.append(a + b if a is not None and b is not None else (a if b is None else b))
        return TwistedPoly(self.cfg, out)

    def __neg__(self):
        return TwistedPoly(self.cfg, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, TwistedPoly):
            return NotImplemented
        return all(c.is_zero() for c in (self - other).coeffs)

    __hash__ = None

    def __repr__(self):
        return " + ".join(f"({c.to_literal()})*tau^{i}" for i, c in enumerate(self.coeffs)) or "0"


def twisted_mul(f: TwistedPoly, g: TwistedPoly) -> TwistedPoly:
    """(sum a_i tau^i)(sum b_j tau^j) = sum a_i b_j^(q^i) tau^(i+j)."""
    if not f.coeffs or not g.coeffs:
        return TwistedPoly(f.cfg, [])
    out = [None] * (len(f.coeffs) + len(g.coeffs) - 1)
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(g.coeffs):
            term = a * b.sigma(i)
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    prec = min(c.prec for c in f.coeffs + g.coeffs)
    zero = BiSeries.zero(f.cfg, prec, None, _L)
    return TwistedPoly(f.cfg, [c if c is not None else zero for c in out])


def right_divide(m: TwistedPoly, f: TwistedPoly):
    """``m = Q * f + R`` in L{tau} with deg R < deg f."""
    r = f.degree
    lead = f.coeffs[r]
    cur = list(m.coeffs)
    quot = {}
    for n in range(len(cur) - 1, r - 1, -1):
        c = cur[n]
        if c.is_zero():
            continue
        # c' tau^(n-r) * lead tau^r has leading coefficient c' * lead^(q^(n-r))
        cq = c * lead.sigma(n - r).invert()
        quot[n - r] = cq
        prod = twisted_mul(TwistedPoly.tau(m.cfg, n - r, cq.prec), f)
        for k, pc in enumerate(prod.coeffs):
            cur[k] = cur[k] - cq * pc
    prec = min([c.prec for c in cur] + [m.coeffs[0].prec if m.coeffs else 0])
    zero = BiSeries.zero(m.cfg, prec, None, _L)
    Q = TwistedPoly(m.cfg, [quot.get(i, zero) for i in range(max(quot, default=-1) + 1)])
    return Q, TwistedPoly(m.cfg, cur[:r])


@dataclass(frozen=True)
class DrinfeldModule:
    """phi_z = zeta + delta_1 tau + ... + delta_r tau^r over L."""

    cfg: object
    delta: tuple

    def __post_init__(self):
        delta = tuple(d.retag(_L) for d in self.delta)
        if not delta or delta[-1].is_zero():
            raise PreconditionError("top coefficient delta_r must be nonzero")
        if any(d.nz > 1 for d in delta):
            raise PreconditionError("Drinfeld coefficients must be constants in z")
        object.__setattr__(self, "delta", delta)

    @property
    def rank(self) -> int:
        return len(self.delta)

    @property
    def prec(self) -> int:
        return min(d.prec for d in self.delta)

    def zeta(self) -> BiSeries:
        return BiSeries.zeta(self.cfg, self.prec, _L)

    def phi_z(self) -> TwistedPoly:
        return TwistedPoly(self.cfg, (self.zeta(),) + self.delta)

    def phi(self, a) -> TwistedPoly:
        """phi_a for a in F_q[z], given as field codes from the constant term up."""
        cfg = self.cfg
        f = cfg.field
        for c in a:
            if f.pow(c, cfg.q) != c:
                raise PreconditionError(f"coefficient {c} is not in F_q")
        acc = TwistedPoly(cfg, [])
        pz = self.phi_z()
        for c in reversed(list(a)):
            acc = acc * pz + TwistedPoly.scalar(cfg, BiSeries.constant(cfg, c, self.prec, _L))
        return acc

    def conjugate(self, u: BiSeries) -> "DrinfeldModule":
        """u^-1 phi u: delta_i -> delta_i * u^(q^i - 1)."""
        q = self.cfg.q
        return DrinfeldModule(self.cfg, tuple(d * u ** (q**i - 1)
                                              for i, d in enumerate(self.delta, 1)))


def companion_matrix(cfg, delta, tag=_L) -> Mat:
    """Matrix of F on the basis 1, tau, ..., tau^(r-1) with z acting by phi_z."""
    r = len(delta)
    prec = min(d.prec for d in delta)
    inv = delta[-1].retag(RingTag.TATE_GEN if tag.level else _L).invert()
    zz = BiSeries.z_minus_zeta(cfg, prec, tag)
    one = BiSeries.one(cfg, prec, tag)
    zero = BiSeries.zero(cfg, prec, None, tag)
    rows = [[zero] * r for _ in range(r)]
    for i in range(r - 1):
        rows[i + 1][i] = one
    rows[0][r - 1] = zz * inv
    for k in range(1, r):
        rows[k][r - 1] = -(delta[k - 1] * inv)
    return Mat(rows, tag)


def drinfeld_motive(phi: DrinfeldModule, validate: bool = True) -> FMod:
    T = companion_matrix(phi.cfg, phi.delta)
    if validate and not companion_matches_oracle(phi, T):
        raise VerificationFailed("companion-oracle", "matrix disagrees with semilinear expansion")
    return FMod(_L, T, 1, phi)


def expand_in_basis(m: TwistedPoly, phi: DrinfeldModule) -> list:
    """Coordinates in L[z] of m in the basis 1, ..., tau^(r-1), where z * x = x * phi_z."""
    cfg = phi.cfg
    r = phi.rank
    pz = phi.phi_z()
    z = BiSeries.monomial(cfg, 0, 1, 1, phi.prec, _L)
    coords = [BiSeries.zero(cfg, phi.prec, None, _L) for _ in range(r)]
    zpow = BiSeries.one(cfg, phi.prec, _L)
    cur = m
    for _ in range(64):
        if not cur.coeffs:
            break
        Q, R = right_divide(cur, pz)
        for k, c in enumerate(R.coeffs):
            coords[k] = coords[k] + c * zpow
        cur = Q
        zpow = zpow * z
    else:
        raise PrecisionExhausted("expansion did not terminate")
    return coords


def oracle_matrix(phi: DrinfeldModule) -> Mat:
    """Columns tau * tau^i expanded through twisted multiplication."""
    cfg = phi.cfg
    cols = []
    for i in range(phi.rank):
        image = twisted_mul(TwistedPoly.tau(cfg, 1, phi.prec), TwistedPoly.tau(cfg, i, phi.prec))
        cols.append(expand_in_basis(image, phi))
    return Mat.from_columns(cols, _L)


def companion_matches_oracle(phi: DrinfeldModule, T: Mat | None = None) -> bool:
    T = companion_matrix(phi.cfg, phi.delta) if T is None else T
    return T == oracle_matrix(phi)


# ---------------------------------------------------------------------------
# good reduction


@dataclass(frozen=True)
class Good:
    n: int

    def __str__(self):
        return f"Good({self.n})"


@dataclass(frozen=True)
class Bad:
    reason: str
    index: int | None = None

    def __str__(self):
        return f"Bad({self.reason}{'' if self.index is None else f'({self.index})'})"


def good_reduction_test(phi: DrinfeldModule):
    q, r = phi.cfg.q, phi.rank
    num = -phi.delta[-1].lo
    if num % (q**r - 1):
        return Bad("NonIntegralSlope")
    n = num // (q**r - 1)
    for i, d in enumerate(phi.delta[:-1], 1):
        if not d.is_zero() and d.lo + n * (q**i - 1) < 0:
            return Bad("ViolatedCoefficient", i)
    return Good(n)


def brute_force_exponents(phi: DrinfeldModule, bound: int | None = None) -> list:
    """Every n in [-B, B] for which pi^n-conjugation gives integral
    coefficients and a unit top coefficient, by direct multiplication."""
    if bound is None:
        bound = max(abs(d.lo) for d in phi.delta if not d.is_zero()) + 2
    found = []
    for n in range(-bound, bound + 1):
        conj = phi.conjugate(_pi_power(phi, n))
        top = conj.delta[-1]
        if all(d.is_zero() or d.lo >= 0 for d in conj.delta) and top.lo == 0:
            found.append(n)
    return found


def _pi_power(phi: DrinfeldModule, n: int) -> BiSeries:
    # pi^n is exact; give it the relative precision of the coefficients
    rel = max(phi.prec - min(d.lo for d in phi.delta if not d.is_zero()), 1)
    return BiSeries.monomial(phi.cfg, n, 0, 1, n + rel, _L)


def normalized(phi: DrinfeldModule, n: int) -> DrinfeldModule:
    return phi.conjugate(_pi_power(phi, n))


def build_good_model(phi: DrinfeldModule, check: bool = True) -> ModelData:
    """Strong good model over o_L[z] from the normalized companion matrix."""
    verdict = good_reduction_test(phi)
    if not isinstance(verdict, Good):
        raise PreconditionError(f"no good model: {verdict}")
    cfg, n, q = phi.cfg, verdict.n, phi.cfg.q
    norm = normalized(phi, n)
    delta = tuple(d.retag(RingTag.TATE_INT) for d in norm.delta)
    TM = companion_matrix(cfg, delta, RingTag.TATE_INT)
    ref = companion_matrix(cfg, phi.delta)
    # model basis tau^i * u^-1 written in the reference basis; the entries are
    # exact, so give them room for the whole valuation spread
    bprec = cfg.default_pi_prec + abs(n) * q**(phi.rank - 1)
    basis = Mat.diag([BiSeries.monomial(cfg, -n * q**i, 0, 1, bprec, _L) for i in range(phi.rank)])
    model = ModelData(FMod(RingTag.TATE_INT, TM, 1, norm), basis.retag(RingTag.TATE_GEN), ref)
    if check:
        if not model.consistent():
            raise VerificationFailed("model-basis", "reference * sigma(B) != B * T_model")
        if not is_strong_good_model(model, 1):
            raise VerificationFailed("strong-good-model", "normalized model is not strong")
    return model


def naive_model(phi: DrinfeldModule) -> FMod:
    """Integral-cleared model without normalizing the top coefficient.

    Conjugate by the least pi^n0 making every delta integral, then rescale
    the basis by the least pi^c making the Frobenius matrix integral.  A basis
    rescaling multiplies the matrix by pi^(c(q-1)), so the result is still a
    lattice in the same motive.
    """
    q = phi.cfg.q
    # least n0 with v(delta_i) + n0 (q^i - 1) >= 0 for every i
    n0 = max(-(d.lo // (q**i - 1)) for i, d in enumerate(phi.delta, 1) if not d.is_zero())
    conj = normalized(phi, n0)
    T = companion_matrix(phi.cfg, conj.delta, RingTag.TATE_GEN)
    c = -(T.min_valuation // (q - 1))
    T = T.pi_shift(c * (q - 1))
    return FMod(RingTag.TATE_INT, T.retag(RingTag.TATE_INT), 1, conj)


__all__ = [
    "TwistedPoly", "twisted_mul", "right_divide", "DrinfeldModule", "companion_matrix",
    "drinfeld_motive", "expand_in_basis", "oracle_matrix", "companion_matches_oracle", "Good",
    "Bad", "good_reduction_test", "brute_force_exponents", "normalized", "build_good_model",
    "naive_model",
]
