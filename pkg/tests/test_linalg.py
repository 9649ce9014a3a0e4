import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONFIGS, configs, mat, ser, series
from shtukalab.config import config_for_q
from shtukalab.errors import DimensionMismatch
from shtukalab.linalg import (Mat, SNFRing, adjugate, check_equivariant, det, smith_normal_form,
                              unit_in_formal)
from shtukalab.series import BiSeries, RingTag


def z(cfg, k=1, tag=RingTag.FORMAL):
    return BiSeries.monomial(cfg, 0, k, 1, None, tag)


def test_det_identity():
    cfg = CONFIGS[2]
    assert det(Mat.identity(cfg, 3)) == BiSeries.one(cfg)


def test_det_companion_rank2():
    cfg = CONFIGS[3]
    zz = BiSeries.z_minus_zeta(cfg, tag=RingTag.POLY_L)
    d1 = ser(cfg, {(-1, 0): 2}, tag=RingTag.POLY_L)
    m = Mat([[BiSeries.zero(cfg, tag=RingTag.POLY_L), zz], [BiSeries.one(cfg, tag=RingTag.POLY_L), -d1]])
    assert det(m) == -zz


def test_det_diag():
    cfg = CONFIGS[2]
    assert det(Mat.diag([z(cfg), z(cfg, 2)])) == z(cfg, 3)


def test_det_requires_square():
    cfg = CONFIGS[2]
    with pytest.raises(DimensionMismatch):
        det(Mat([[z(cfg), z(cfg)]]))


def _square(data, cfg, s, **kw):
    return Mat([[data.draw(series(cfg, **kw)) for _ in range(s)] for _ in range(s)])


@given(st.data())
def test_det_multiplicative_and_adjugate(data):
    cfg = data.draw(configs)
    s = data.draw(st.integers(1, 3))
    a = _square(data, cfg, s, lo=-1, zprec=None)
    b = _square(data, cfg, s, lo=-1, zprec=None)
    assert det(a * b) == det(a) * det(b)
    eye = Mat.identity(cfg, s)
    assert a * adjugate(a) == eye * det(a)


# ---- equivariance ----------------------------------------------------------

def test_equivariant_identity():
    cfg = CONFIGS[2]
    T = mat(cfg, [[{(0, 1): 1, (1, 0): 1}]])
    assert check_equivariant(Mat.identity(cfg, 1), T, T)


def test_equivariant_scalar_in_fq():
    cfg = CONFIGS[3]
    T = Mat([[BiSeries.z_minus_zeta(cfg, tag=RingTag.FORMAL)]])
    assert check_equivariant(Mat([[BiSeries.constant(cfg, 2)]]), T, T)


def test_equivariant_fails_for_pi():
    cfg = CONFIGS[2]
    T = Mat([[BiSeries.z_minus_zeta(cfg, tag=RingTag.FORMAL)]])
    assert not check_equivariant(Mat([[BiSeries.monomial(cfg, 1, 0)]]), T, T)


# ---- Smith normal form -----------------------------------------------------

def _check_snf(m, ring, target):
    snf = smith_normal_form(m, ring)
    rows, cols = m.shape
    assert snf.left * target * snf.right == snf.diagonal(rows, cols)
    return snf


def test_snf_diag():
    cfg = CONFIGS[2]
    m = Mat.diag([z(cfg), z(cfg, 2)])
    snf = _check_snf(m, SNFRing.ELL_Z_FORMAL, m.reduce_mod_pi())
    assert snf.exponents == (1, 2)


def test_snf_jordan_block():
    cfg = CONFIGS[2]
    m = Mat([[z(cfg), BiSeries.one(cfg)], [BiSeries.zero(cfg), z(cfg)]])
    snf = _check_snf(m, SNFRing.ELL_Z_FORMAL, m.reduce_mod_pi())
    assert snf.exponents == (0, 2)
    assert snf.divisors[1] == z(cfg, 2).reduce_mod_pi()


def test_snf_permutation():
    cfg = CONFIGS[3]
    zero = BiSeries.zero(cfg)
    m = Mat([[zero, z(cfg)], [z(cfg), zero]])
    snf = _check_snf(m, SNFRing.ELL_Z_FORMAL, m.reduce_mod_pi())
    assert snf.exponents == (1, 1)


def test_snf_over_o_l():
    cfg = CONFIGS[3]
    m = mat(cfg, [[{(1, 0): 1}, {(2, 0): 1}], [{(0, 0): 1}, {(3, 0): 2}]], RingTag.TATE_INT)
    snf = _check_snf(m, SNFRing.O_L, m)
    # det = 2 pi^4 - pi^2 has valuation 2 and an entry is a unit
    assert snf.exponents == (0, 2)


def test_snf_over_polynomials():
    cfg = CONFIGS[2]
    tag = RingTag.TATE_INT
    zz = z(cfg, 1, tag)
    m = Mat([[zz * zz + 1, zz], [BiSeries.zero(cfg, tag=tag), zz + 1]], tag)
    snf = _check_snf(m, SNFRing.ELL_Z_POLY, m.reduce_mod_pi())
    # det = (z^2 + 1)(z + 1) = (z + 1)^3 over F_2; gcd of entries is 1
    assert snf.exponents == (0, 3)


def test_snf_zero_divisor_is_none():
    cfg = CONFIGS[2]
    m = Mat([[z(cfg), z(cfg)], [z(cfg), z(cfg)]])
    snf = smith_normal_form(m, SNFRing.ELL_Z_FORMAL)
    assert snf.exponents == (1, None)
    assert snf.rank == 1


@given(st.data())
def test_snf_formal_reassembly_and_det(data):
    cfg = data.draw(configs)
    s = data.draw(st.integers(1, 3))
    m = _square(data, cfg, s, nz=5, zprec=None)
    red = m.reduce_mod_pi()
    snf = _check_snf(m, SNFRing.ELL_Z_FORMAL, red)
    d = det(red)
    if d.is_zero():
        assert None in snf.exponents
    else:
        assert sum(snf.exponents) == d.ordz


@given(st.data())
def test_snf_o_l_det_product(data):
    cfg = data.draw(configs)
    s = data.draw(st.integers(1, 3))
    m = Mat([[data.draw(series(cfg, nz=1, zprec=None, tag=RingTag.TATE_INT)) for _ in range(s)]
             for _ in range(s)], RingTag.TATE_INT)
    snf = _check_snf(m, SNFRing.O_L, m)
    d = det(m)
    if None not in snf.exponents and not d.is_zero():
        prod = BiSeries.one(cfg, tag=RingTag.TATE_INT)
        for x in snf.divisors:
            prod = prod * x
        # det(m) = unit * product of divisors
        assert d.lo == prod.lo == sum(snf.exponents)
        assert unit_in_formal(d.pi_shift(-d.lo) * prod.pi_shift(-prod.lo).invert())


def test_unit_in_formal():
    cfg = config_for_q(2)
    assert unit_in_formal(ser(cfg, {(0, 0): 1, (1, 1): 1}))
    assert not unit_in_formal(ser(cfg, {(0, 1): 1}))
    assert not unit_in_formal(ser(cfg, {(1, 0): 1}))
