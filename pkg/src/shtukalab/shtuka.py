"""Effective local shtukas, F-equivariant pairs, and good-model reconstruction.

Going from a good model to its shtuka is a change of scalars.  Going back,
the model is cut out of the generic fiber as the lattice of vectors that the
pair isomorphism sends into the shtuka lattice; ``reconstruct_model`` finds
it with the pi-digit kernel and certifies it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .drinfeld import Bad, DrinfeldModule, Good, build_good_model, good_reduction_test
from .errors import (PairInvariantViolated, PrecisionExhausted, PreconditionError, ShtukaError,
                     VerificationFailed)
from .lattice import column_reduce_to_basis, contains_columns, minimal_N, pi_digit_kernel
from .linalg import (Mat, SNFRing, adjugate, check_equivariant, det, smith_normal_form,
                     unit_in_formal)
from .motives import (FMod, ModelData, base_change, coker_analysis, effectivity_check,
                      is_strong_good_model, reduce_mod_pi, reduced_divisors_within)
from .series import BiSeries, RingTag, weierstrass_factor


@dataclass(frozen=True)
class LocalShtuka:
    """Frobenius matrix over l[[pi, z]] with effectivity exponent d."""

    T: Mat
    d: int
    e: int = field(init=False)

    def __post_init__(self):
        T = self.T.retag(RingTag.FORMAL)
        if not T.is_integral():
            raise PreconditionError("shtuka matrix must be integral")
        object.__setattr__(self, "T", T)
        dt = det(T)
        if dt.is_zero() or dt.lo > 0:
            raise VerificationFailed("det-nonzero-mod-pi", "det(T) vanishes modulo pi")
        object.__setattr__(self, "e", int(dt.reduce_mod_pi().ordz))

    @property
    def rank(self) -> int:
        return self.T.rows

    @property
    def cfg(self):
        return self.T.cfg

    def fmod(self) -> FMod:
        return FMod(RingTag.FORMAL, self.T, self.d)

    def validate(self):
        """Check the defining properties; raises VerificationFailed."""
        e, _, is_power = weierstrass_factor(det(self.T))
        if not is_power:
            raise VerificationFailed("zeta-power", "distinguished factor of det(T) is not (z-zeta)^e")
        if e != self.e:
            raise VerificationFailed("rank-identity", f"e={self.e} vs {e}")
        rep = coker_analysis(self.fmod(), self.d)
        if not rep.annihilator_exponent_ok:
            raise VerificationFailed("effectivity", f"coker not killed by (z-zeta)^{self.d}")
        if not rep.pi_torsion_free or rep.o_L_rank != self.e:
            raise VerificationFailed("coker-free", f"rank {rep.o_L_rank}, divisors {rep.pi_divisors}")
        return rep


@dataclass(frozen=True)
class PairIso:
    """Motive (generic fiber, reference basis), shtuka, and the matrix A with
    ``A * T_motive == T_shtuka * sigma(A)``."""

    motive: FMod
    shtuka: LocalShtuka
    A: Mat
    N: int

    def check(self):
        A = self.A
        if A.shape != (self.shtuka.rank, self.motive.rank):
            raise PairInvariantViolated(f"A has shape {A.shape}")
        if not check_equivariant(A, self.motive.T, self.shtuka.T):
            raise PairInvariantViolated("A T != T' sigma(A)")
        if self.N < 0 or A.min_valuation < -self.N:
            raise PairInvariantViolated(f"pi^{self.N} A is not integral")
        dA = det(A)
        a = dA.lo
        if dA.is_zero() or not unit_in_formal(dA.pi_shift(-a)):
            raise PairInvariantViolated("A is not invertible over l[[pi, z]][1/pi]")
        adj_val = adjugate(A).min_valuation if A.rows > 1 else 0
        if adj_val - a < -self.N:
            raise PairInvariantViolated(f"pi^{self.N} A^-1 is not integral")


def associate_shtuka(model: ModelData, d: int = 1, check: bool = True) -> LocalShtuka:
    """The shtuka of a strong good model: same matrix over l[[pi, z]].

    Polynomial entries are kept as exact representatives, so no digit is
    lost to z-truncation.
    """
    if check and not is_strong_good_model(model, d):
        raise PreconditionError("model is not a strong good model")
    fm = base_change(model.model, RingTag.FORMAL, keep_exact=True)
    sh = LocalShtuka(fm.T, d)
    if check:
        rep = sh.validate()
        before = coker_analysis(model.model, d)
        if (rep.o_L_rank, rep.pi_divisors) != (before.o_L_rank, before.pi_divisors):
            raise VerificationFailed("coker-unchanged", "shtuka cokernel differs from the model's")
    return sh


def canonical_pair(model: ModelData, d: int = 1, in_model_basis: bool = False) -> PairIso:
    """Pair whose isomorphism is the identity of the generic fiber.

    In the reference basis A = basis^-1; in the model's own basis A = 1.
    """
    sh = associate_shtuka(model, d)
    cfg = model.model.cfg
    if in_model_basis:
        motive = FMod(RingTag.TATE_GEN, model.model.T, d)
        A = Mat.identity(cfg, model.rank, model.model.T.prec, RingTag.FORMAL_GEN)
    else:
        motive = FMod(RingTag.TATE_GEN, model.reference, d)
        A = model.basis.inverse().retag(RingTag.FORMAL_GEN)
    return PairIso(motive, sh, A, minimal_N(A))


@dataclass(frozen=True)
class Reconstruction:
    model: ModelData
    psi: Mat
    D: int
    N: int
    certificate: BiSeries


def _inverse_tate(B: Mat) -> Mat:
    d = det(B).retag(RingTag.TATE_GEN)
    return adjugate(B).retag(RingTag.TATE_GEN) * d.invert() if B.rows > 1 else \
        Mat([[d.invert()]], RingTag.TATE_GEN)


def reconstruct_model(pair: PairIso, d: int, acknowledge_truncation: bool = False,
                      max_D: int | None = None, check_pair: bool = True) -> Reconstruction:
    """The lattice {x : A x integral} as a strong good model, re-verified."""
    if check_pair:
        pair.check()
    N = pair.N
    A = pair.A
    cfg = A.cfg
    budget = min(A.prec, pair.motive.T.prec)
    if 2 * N + d + 2 > budget:
        raise PrecisionExhausted(f"2N + d + 2 = {2 * N + d + 2} exceeds pi-precision {budget}")
    s = pair.motive.rank
    degA = max(x.nz for r in A.entries for x in r)
    max_D = max_D if max_D is not None else 2 * degA + 4
    found = None
    for D in range(1, max_D + 1):
        gens = pi_digit_kernel(A, N, D, acknowledge_truncation)
        scaled = [[x.pi_shift(N).retag(RingTag.TATE_INT) for x in c] for c in gens]
        try:
            B0, _ = column_reduce_to_basis(scaled, s)
        except ShtukaError:
            continue
        B = B0.pi_shift(-N).retag(RingTag.TATE_GEN)
        psi = A * B
        cert = det(psi)
        if psi.is_integral() and unit_in_formal(cert):
            found = (D, B, psi, cert)
            break
    if found is None:
        raise VerificationFailed("lattice-certificate", f"no certified basis up to z-degree {max_D}")
    D, B, psi, cert = found
    T = pair.motive.T.retag(RingTag.TATE_GEN)
    TM = _inverse_tate(B) * T * B.sigma()
    if not TM.is_integral():
        raise VerificationFailed("model-integral", "B^-1 T sigma(B) is not integral")
    model = ModelData(FMod(RingTag.TATE_INT, TM.retag(RingTag.TATE_INT), d), B, T)
    _verify_model(model, d)
    if not check_equivariant(psi, TM, pair.shtuka.T):
        raise VerificationFailed("psi-equivariant", "psi T_model != T' sigma(psi)")
    return Reconstruction(model, psi, D, N, cert)


def _verify_model(model: ModelData, d: int):
    if not model.consistent():
        raise VerificationFailed("basis-consistency", "reference * sigma(B) != B * T_model")
    if not effectivity_check(model.model, d):
        raise VerificationFailed("effectivity", f"coker not killed by (z-zeta)^{d}")
    if not is_strong_good_model(model, d):
        raise VerificationFailed("strong-good-model", "cokernel is not torsion-free")
    red, injective = reduce_mod_pi(model.model)
    if not injective:
        raise VerificationFailed("weak-good-model", "reduction mod pi is not injective")
    snf = smith_normal_form(red, SNFRing.ELL_Z_POLY)
    if any(e is None for e in snf.exponents) or any(
            x.degree != x.ordz for x in snf.divisors):
        raise VerificationFailed("reduction-torsion", "reduced cokernel is not z-primary")
    if not reduced_divisors_within(model.model, d):
        raise VerificationFailed("image-contains-z^d", "an elementary divisor exceeds z^d")


def round_trip_b(pair: PairIso, rec: Reconstruction) -> bool:
    """The reconstructed model's shtuka maps isomorphically onto the pair's
    shtuka: psi integral, equivariant, with unit determinant."""
    sh = associate_shtuka(rec.model, pair.shtuka.d, check=False)
    return (rec.psi.is_integral() and unit_in_formal(det(rec.psi))
            and check_equivariant(rec.psi, sh.T, pair.shtuka.T))


def lattice_equal(a: ModelData, b: ModelData) -> bool:
    """Mutual integral expressibility of the two model bases."""
    from .errors import DimensionMismatch
    if a.basis.shape != b.basis.shape:
        raise DimensionMismatch("models of different rank")
    Ba = a.basis.retag(RingTag.TATE_GEN).as_exact()
    Bb = b.basis.retag(RingTag.TATE_GEN).as_exact()
    return contains_columns(Ba, Bb) and contains_columns(Bb, Ba)


@dataclass(frozen=True)
class CriterionReport:
    verdict: str
    model: ModelData | None = None
    detail: str = ""
    reconstruction: Reconstruction | None = None
    drinfeld_verdict: object = None


def criterion_check(motive: FMod, pair: PairIso | None = None, d: int = 1) -> CriterionReport:
    """Decide good reduction from shtuka data, or through the Drinfeld test."""
    if pair is not None:
        try:
            rec = reconstruct_model(pair, d)
        except VerificationFailed as exc:
            return CriterionReport("VerificationFailed", detail=exc.check)
        if not round_trip_b(pair, rec):
            return CriterionReport("VerificationFailed", detail="round-trip-b")
        return CriterionReport("Good", rec.model, reconstruction=rec)
    if isinstance(motive.origin, DrinfeldModule):
        verdict = good_reduction_test(motive.origin)
        if isinstance(verdict, Good):
            return CriterionReport("Good", build_good_model(motive.origin), str(verdict),
                                   drinfeld_verdict=verdict)
        return CriterionReport("Bad", detail=str(verdict), drinfeld_verdict=verdict)
    return CriterionReport("CannotDecide", detail="no shtuka data and no Drinfeld structure")


__all__ = [
    "LocalShtuka", "PairIso", "associate_shtuka", "canonical_pair", "Reconstruction",
    "reconstruct_model", "round_trip_b", "lattice_equal", "CriterionReport", "criterion_check",
    "Bad", "Good",
]
