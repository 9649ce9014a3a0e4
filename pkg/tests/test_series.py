import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import CONFIGS, configs, ser, series, units
from shtukalab.config import config_for_q
from shtukalab.errors import NotAUnit, NotDistinguishedDivisor
from shtukalab.series import (BiSeries, RingTag, frobenius_decompose, frobenius_recompose,
                              join_tags, poly_divmod, tate_divmod, weierstrass_divide,
                              weierstrass_factor)


# ---- tags ----------------------------------------------------------------

def test_join_tags():
    assert join_tags(RingTag.TATE_INT, RingTag.FORMAL) is RingTag.FORMAL
    assert join_tags(RingTag.TATE_INT, RingTag.TATE_GEN) is RingTag.TATE_GEN
    assert join_tags(RingTag.POLY_L, RingTag.TATE_INT) is RingTag.TATE_GEN
    assert join_tags(RingTag.POLY_L, RingTag.FORMAL) is RingTag.FORMAL_GEN
    assert join_tags(RingTag.POLY_L, RingTag.POLY_L) is RingTag.POLY_L


# ---- arithmetic examples -------------------------------------------------

def test_char2_sign_identity():
    cfg = config_for_q(2)
    a = ser(cfg, {(0, 0): 1, (1, 1): 1}, prec=4, zprec=3)
    b = ser(cfg, {(0, 0): 1, (1, 1): 1}, prec=4, zprec=3)  # 1 - pi z == 1 + pi z
    prod = a * b
    assert prod == ser(cfg, {(0, 0): 1, (2, 2): 1}, prec=4, zprec=3)
    assert prod.to_literal() == "[1]*pi^0*z^0 + [1]*pi^2*z^2 @ pi^4, z^3"


def test_geometric_series_inverse():
    cfg = config_for_q(2, default_z_prec=7)
    inv = ser(cfg, {(0, 0): 1, (0, 1): 1}).invert()
    assert inv.zprec == 7
    assert inv == ser(cfg, {(0, j): 1 for j in range(7)}, zprec=7)


def test_non_unit_raises():
    cfg = config_for_q(2)
    with pytest.raises(NotAUnit):
        ser(cfg, {(1, 0): 1, (0, 1): 1}).invert()


def test_integral_tags_reject_pi_inverse():
    cfg = config_for_q(3)
    with pytest.raises(NotAUnit):
        ser(cfg, {(1, 0): 1}, tag=RingTag.TATE_INT).invert()
    x = ser(cfg, {(1, 0): 2}, tag=RingTag.TATE_GEN).invert()
    assert x.lo == -1 and x.coeff(-1, 0) == 2


def test_tate_unit_stays_exact():
    cfg = config_for_q(2, 1, {1: 1})
    u = ser(cfg, {(0, 0): 1, (1, 1): 1}, tag=RingTag.TATE_INT)
    inv = u.invert()
    assert inv.zprec is None
    assert inv * u == BiSeries.one(cfg)


def test_poly_units_must_be_constant():
    cfg = config_for_q(2)
    with pytest.raises(NotAUnit):
        ser(cfg, {(0, 0): 1, (0, 1): 1}, tag=RingTag.POLY_L).invert()


# ---- sigma ---------------------------------------------------------------

def test_sigma_laurent_example():
    cfg = config_for_q(2, 2)  # residue field F_4 over q = 2
    f = cfg.field
    a, b = 2, 3
    x = ser(cfg, {(-1, 0): a, (0, 0): b}, prec=2)
    y = x.sigma()
    assert y.prec == 4 and y.lo == -2
    assert y == ser(cfg, {(-2, 0): f.pow(a, 2), (0, 0): f.pow(b, 2)}, prec=4)


def test_sigma_fixes_z():
    cfg = config_for_q(3)
    z = BiSeries.monomial(cfg, 0, 1)
    assert z.sigma() == z


def test_sigma_q3_example():
    cfg = config_for_q(3)
    x = ser(cfg, {(1, 1): 1, (3, 0): 1}, prec=10)
    assert x.sigma() == ser(cfg, {(3, 1): 1, (9, 0): 1}, prec=30)


@given(st.data())
def test_sigma_is_ring_endomorphism(data):
    cfg = data.draw(configs)
    a = data.draw(series(cfg, lo=-2))
    b = data.draw(series(cfg, lo=-2))
    assert (a + b).sigma() == a.sigma() + b.sigma()
    assert (a * b).sigma() == a.sigma() * b.sigma()


# ---- Frobenius decomposition ---------------------------------------------

def test_decompose_one():
    cfg = CONFIGS[3]
    parts = frobenius_decompose(BiSeries.one(cfg))
    assert parts[0] == BiSeries.one(cfg)
    assert all(p.is_zero() for p in parts[1:])


def test_decompose_q2_example():
    cfg = config_for_q(2, default_pi_prec=8)
    a = ser(cfg, {(i, 0): 1 for i in range(4)})
    b0, b1 = frobenius_decompose(a)
    expected = ser(cfg, {(0, 0): 1, (1, 0): 1}, prec=4)
    assert b0 == expected and b1 == expected


def test_decompose_pi_q():
    cfg = CONFIGS[4]
    parts = frobenius_decompose(BiSeries.monomial(cfg, cfg.q, 0))
    assert parts[0] == BiSeries.monomial(cfg, 1, 0, prec=parts[0].prec)
    assert all(p.is_zero() for p in parts[1:])


@given(st.data())
def test_decompose_round_trip(data):
    cfg = data.draw(configs)
    a = data.draw(series(cfg, max_pi=12))
    assert frobenius_recompose(frobenius_decompose(a)) == a


@given(st.data())
def test_decompose_unique_under_perturbation(data):
    cfg = data.draw(configs)
    a = data.draw(series(cfg, max_pi=10))
    parts = frobenius_decompose(a)
    i = data.draw(st.integers(0, cfg.q - 1))
    digit = data.draw(st.integers(0, max(parts[i].prec - 1, 0)))
    assume(digit < parts[i].prec)
    bump = BiSeries.monomial(cfg, digit, 0, 1, parts[i].prec)
    perturbed = list(parts)
    perturbed[i] = parts[i] + bump
    assert not (frobenius_recompose(perturbed) == a)


# ---- division ------------------------------------------------------------

def test_weierstrass_example():
    cfg = config_for_q(2, default_pi_prec=10)
    g = ser(cfg, {(0, 2): 1})
    f = ser(cfg, {(0, 1): 1, (1, 0): 1})
    Q, R = weierstrass_divide(g, f)
    assert Q == ser(cfg, {(0, 1): 1, (1, 0): 1})
    assert R == ser(cfg, {(2, 0): 1})


def test_weierstrass_by_z():
    cfg = config_for_q(3, default_pi_prec=10)
    g = ser(cfg, {(0, 0): 2, (1, 0): 1, (0, 1): 1, (2, 3): 2})
    Q, R = weierstrass_divide(g, BiSeries.monomial(cfg, 0, 1))
    assert R == ser(cfg, {(0, 0): 2, (1, 0): 1})
    assert Q == ser(cfg, {(0, 0): 1, (2, 2): 2})


def test_weierstrass_self():
    cfg = CONFIGS[2]
    f = ser(cfg, {(0, 1): 1, (1, 0): 1, (2, 3): 1})
    Q, R = weierstrass_divide(f, f)
    assert Q == BiSeries.one(cfg) and R.is_zero()


def test_weierstrass_rejects_non_distinguished():
    cfg = CONFIGS[2]
    with pytest.raises(NotDistinguishedDivisor):
        weierstrass_divide(BiSeries.one(cfg), ser(cfg, {(1, 0): 1}))


def _distinguished(data, cfg):
    n = data.draw(st.integers(0, 3))
    f = data.draw(series(cfg, nz=5))
    terms = {(i, j): c for i, j, c in f.terms() if not (i == 0 and j <= n)}
    terms[(0, n)] = data.draw(st.integers(1, cfg.field.order - 1))
    return n, ser(cfg, terms, zprec=cfg.default_z_prec)


@given(st.data())
def test_weierstrass_identity_and_uniqueness(data):
    cfg = data.draw(configs)
    n, f = _distinguished(data, cfg)
    g = data.draw(series(cfg, nz=6))
    Q, R = weierstrass_divide(g, f)
    assert Q * f + R == g
    assert R.nz <= n
    # the remainder is already reduced: dividing it again gives quotient 0
    Q2, R2 = weierstrass_divide(R, f)
    assert Q2.is_zero() and R2 == R


@given(st.data())
def test_weierstrass_factor_order(data):
    cfg = data.draw(configs)
    n, f = _distinguished(data, cfg)
    e, unit, _ = weierstrass_factor(f)
    assert e == n == f.reduce_mod_pi().ordz
    assert unit.coeff(0, 0) != 0


def test_factor_zeta_power():
    cfg = CONFIGS[2]
    h = BiSeries.z_minus_zeta(cfg, tag=RingTag.FORMAL) * ser(cfg, {(0, 0): 1, (1, 1): 1})
    e, unit, flag = weierstrass_factor(h)
    assert (e, flag) == (1, True)
    assert BiSeries.z_minus_zeta(cfg, tag=RingTag.FORMAL) * unit == h


def test_factor_unit():
    cfg = CONFIGS[2]
    h = ser(cfg, {(0, 0): 1, (1, 1): 1})
    e, unit, flag = weierstrass_factor(h)
    assert (e, flag) == (0, True) and unit == h


def test_factor_not_zeta_power():
    cfg = config_for_q(2, default_pi_prec=10)  # zeta = 0
    h = ser(cfg, {(0, 2): 1, (1, 0): 1})
    e, _, flag = weierstrass_factor(h)
    assert (e, flag) == (2, False)


def test_poly_divmod_identity():
    cfg = CONFIGS[3]
    h = ser(cfg, {(-1, 3): 1, (0, 1): 2, (2, 0): 1}, tag=RingTag.POLY_L)
    g = ser(cfg, {(1, 2): 1, (0, 0): 1}, tag=RingTag.POLY_L)
    Q, R = poly_divmod(h, g)
    assert R.nz <= 2
    assert Q * g + R == h


def test_tate_divmod_identity():
    cfg = CONFIGS[2]
    h = ser(cfg, {(0, 4): 1, (1, 1): 1, (0, 0): 1}, tag=RingTag.TATE_INT)
    g = ser(cfg, {(0, 2): 1, (1, 3): 1, (2, 0): 1}, tag=RingTag.TATE_INT)
    Q, R = tate_divmod(h, g)
    assert R.nz <= 2
    assert Q * g + R == h


# ---- ring axioms and valuation ---------------------------------------------

@given(st.data())
def test_ring_axioms(data):
    cfg = data.draw(configs)
    a, b, c = (data.draw(series(cfg, lo=-1)) for _ in range(3))
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(st.data())
def test_unit_inverse(data):
    cfg = data.draw(configs)
    u = data.draw(units(cfg))
    assert u * u.invert() == BiSeries.one(cfg)


@given(st.data())
def test_gauss_valuation_multiplicative(data):
    cfg = data.draw(configs)
    a = data.draw(series(cfg, lo=-2, nonzero=True, zprec=None))
    b = data.draw(series(cfg, lo=-2, nonzero=True, zprec=None))
    assert (a * b).lo == a.lo + b.lo


@given(st.data())
def test_precision_never_exceeds_inputs(data):
    cfg = data.draw(configs)
    a = data.draw(series(cfg))
    b = data.draw(series(cfg))
    s, p = a + b, a * b
    assert s.prec <= min(a.prec, b.prec)
    assert p.prec <= min(a.prec + b.lo, b.prec + a.lo)
