"""Frobenius modules, base change along the ring tower, and good-model tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import (IllegalDirection, PrecisionExhausted, PreconditionError, TruncationUnsound,
                     VerificationFailed)
from .linalg import Mat, SNFRing, adjugate, det, smith_normal_form
from .series import BiSeries, RingTag, divides, poly_divmod, weierstrass_divide


@dataclass(frozen=True)
class FMod:
    """A Frobenius module: F(sigma^* e_i) = sum_r T[r, i] e_r.

    ``origin`` optionally records where the module came from (for instance
    the Drinfeld module whose motive it is).
    """

    tag: RingTag
    T: Mat
    d: int | None = None
    origin: Any = field(default=None, compare=False)

    def __post_init__(self):
        if not self.T.is_square():
            raise PreconditionError("Frobenius matrix must be square")
        if self.T.tag is not self.tag:
            object.__setattr__(self, "T", self.T.retag(self.tag))
        if self.tag.integral and not self.T.is_integral():
            raise PreconditionError(f"{self.tag.value} module with non-integral matrix")

    @property
    def rank(self) -> int:
        return self.T.rows

    @property
    def cfg(self):
        return self.T.cfg

    def det(self) -> BiSeries:
        return det(self.T)

    def is_injective(self) -> bool:
        return not self.det().is_zero()


@dataclass(frozen=True)
class ModelData:
    """An integral model together with its embedding into the generic fiber.

    Columns of ``basis`` are the model basis vectors written in the reference
    basis of the generic fiber, whose Frobenius matrix is ``reference``.
    Hence ``reference * sigma(basis) == basis * model.T``.
    """

    model: FMod
    basis: Mat
    reference: Mat

    @property
    def rank(self) -> int:
        return self.model.rank

    def consistent(self) -> bool:
        return self.reference * self.basis.sigma() == self.basis * self.model.T


@dataclass(frozen=True)
class CokerReport:
    annihilator_exponent_ok: bool
    o_L_rank: int
    pi_torsion_free: bool
    pi_divisors: tuple
    truncation: int
    precision: int

    @property
    def torsion_exponents(self) -> tuple:
        return tuple(e for e in self.pi_divisors if e is not None and e > 0)


def _reachable(src: RingTag, dst: RingTag) -> bool:
    return dst.level >= src.level and (src.integral or not dst.integral)


def base_change(m: FMod, target: RingTag, keep_exact: bool = False) -> FMod:
    """Reinterpret m over a ring higher in the tower.

    Moving into the formal rings truncates in z at the default z-precision
    unless ``keep_exact`` asks to keep polynomial representatives.
    """
    if m.tag is target:
        return m
    if not _reachable(m.tag, target):
        raise IllegalDirection(f"{m.tag.value} -> {target.value}")
    T = m.T.retag(target)
    if target.level == 2 and m.tag.level < 2 and not keep_exact:
        T = T.truncate_z(m.cfg.default_z_prec)
    return FMod(target, T, m.d, m.origin)


def reduce_mod_pi(m: FMod):
    """Entrywise reduction and whether the reduced map is injective (weak test)."""
    if not m.T.is_integral():
        raise PreconditionError("reduction of a non-integral matrix")
    red = m.T.reduce_mod_pi()
    return red, not det(red).is_zero()


def effectivity_check(m: FMod, d: int) -> bool:
    """Whether (z - zeta)^d * adj(T) is divisible by det(T) in the tagged ring."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    cfg = m.cfg
    D = det(m.T)
    if D.is_zero():
        raise PrecisionExhausted("det(T) vanishes at working precision")
    zd = BiSeries.z_minus_zeta(cfg, max(D.prec, cfg.default_pi_prec), m.tag) ** d
    adj = adjugate(m.T)
    for row in adj.entries:
        for x in row:
            if not divides(D, zd * x, m.tag):
                return False
    return True


def _reduce_mod(x: BiSeries, modulus: BiSeries) -> BiSeries:
    if x.zprec is None:
        return poly_divmod(x, modulus)[1]
    return weierstrass_divide(x, modulus)[1]


def coker_analysis(m: FMod, d: int, D: int | None = None) -> CokerReport:
    """Cokernel of F as an o_L-module, via the o_L-linear map induced on
    (base ring / (z - zeta)^D)^s in the basis z^j e_i."""
    if m.tag not in (RingTag.TATE_INT, RingTag.FORMAL):
        raise PreconditionError("coker_analysis needs an integral module")
    D = d + 1 if D is None else D
    if D < d:
        raise TruncationUnsound(f"truncation D={D} below effectivity exponent d={d}")
    cfg = m.cfg
    s = m.rank
    try:
        ok = effectivity_check(m, d)
    except PrecisionExhausted:
        ok = False
    prec = m.T.prec
    if prec < 1:
        raise PrecisionExhausted("no pi-adic digits left for the cokernel")
    modulus = BiSeries.z_minus_zeta(cfg, prec, RingTag.TATE_INT) ** D
    z = BiSeries.monomial(cfg, 0, 1, 1, prec, RingTag.TATE_INT)
    zero = BiSeries.zero(cfg, prec, None, RingTag.TATE_INT)
    big = [[zero] * (s * D) for _ in range(s * D)]
    for i in range(s):
        for r in range(s):
            cur = _reduce_mod(m.T[r, i].retag(RingTag.TATE_INT), modulus).as_exact()
            for j in range(D):
                for t in range(D):
                    big[r * D + t][i * D + j] = cur.z_coeff(t)
                if j + 1 < D:
                    cur = poly_divmod(cur * z, modulus)[1]
    snf = smith_normal_form(Mat(big, RingTag.TATE_INT), SNFRing.O_L)
    exps = snf.exponents
    rank = sum(1 for e in exps if e is None)
    torsion_free = all(e == 0 for e in exps if e is not None)
    used = min((x.prec for x in snf.divisors), default=prec)
    return CokerReport(ok, rank, torsion_free, tuple(exps), D, used)


def precision_margin_ok(m: FMod) -> bool:
    """pi-precision at least 2 * (largest valuation in play) + 2.

    The valuations in play are the pole orders of T and the Gauss valuation
    of det(T), which bounds every pivot of the cokernel Smith form.
    """
    poles = max(0, -m.T.min_valuation) if not m.T.is_zero() else 0
    dt = det(m.T)
    content = 0 if dt.is_zero() else max(dt.lo, 0)
    return m.T.prec >= 2 * max(poles, content) + 2


def _as_fmod(model) -> FMod:
    return model.model if isinstance(model, ModelData) else model


def is_weak_good_model(model) -> bool:
    return reduce_mod_pi(_as_fmod(model))[1]


def is_strong_good_model(model, d: int) -> bool:
    """Effective with exponent d and torsion-free cokernel over o_L."""
    m = _as_fmod(model)
    if not m.T.is_integral():
        raise PreconditionError("model matrix must be integral")
    if m.tag not in (RingTag.TATE_INT, RingTag.FORMAL):
        m = FMod(RingTag.TATE_INT, m.T, m.d, m.origin)
    if not precision_margin_ok(m):
        raise PrecisionExhausted("pi-precision below the safety margin")
    if not effectivity_check(m, d):
        return False
    report = coker_analysis(m, d)
    strong = report.pi_torsion_free
    if strong and not reduce_mod_pi(m)[1]:
        raise VerificationFailed("strong-implies-weak", "reduction not injective")
    return strong


def reduced_divisors_within(m: FMod, d: int) -> bool:
    """All elementary divisors of (T mod pi) over l[[z]] divide z^d."""
    snf = smith_normal_form(m.T, SNFRing.ELL_Z_FORMAL)
    return all(e is not None and e <= d for e in snf.exponents)


__all__ = [
    "FMod", "ModelData", "CokerReport", "base_change", "reduce_mod_pi", "effectivity_check",
    "coker_analysis", "is_strong_good_model", "is_weak_good_model", "reduced_divisors_within",
    "precision_margin_ok",
]
