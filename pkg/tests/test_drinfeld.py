import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONFIGS, mat, ser
from shtukalab.drinfeld import (Bad, DrinfeldModule, Good, TwistedPoly, brute_force_exponents,
                                build_good_model, companion_matches_oracle, companion_matrix,
                                drinfeld_motive, good_reduction_test, naive_model, twisted_mul)
from shtukalab.errors import PreconditionError
from shtukalab.generators import random_bad_drinfeld, random_good_drinfeld
from shtukalab.linalg import det
from shtukalab.motives import is_strong_good_model, is_weak_good_model
from shtukalab.series import BiSeries, RingTag

L = RingTag.POLY_L


def const(cfg, terms):
    return ser(cfg, terms, tag=L)


def module(cfg, *vals):
    """Module with delta_i = pi^v_i."""
    return DrinfeldModule(cfg, tuple(const(cfg, {(v, 0): 1}) for v in vals))


def test_twisted_mul_commutation_rule():
    cfg = CONFIGS[3]
    c = const(cfg, {(1, 0): 2})
    tau = TwistedPoly.tau(cfg)
    # tau * c = c^q * tau
    assert twisted_mul(tau, TwistedPoly.scalar(cfg, c)) == \
        TwistedPoly(cfg, [BiSeries.zero(cfg, tag=L), c.sigma()])


def test_twisted_mul_example():
    cfg = CONFIGS[2]
    p = const(cfg, {(1, 0): 1})
    f = TwistedPoly(cfg, [p, BiSeries.one(cfg, tag=L)])  # pi + tau
    g = f * f
    # (pi + tau)^2 = pi^2 + (pi + pi^2) tau + tau^2
    assert g == TwistedPoly(cfg, [const(cfg, {(2, 0): 1}), const(cfg, {(1, 0): 1, (2, 0): 1}),
                                  BiSeries.one(cfg, tag=L)])


def test_carlitz_matrix():
    cfg = CONFIGS[2]
    phi = module(cfg, 0)
    assert companion_matrix(cfg, phi.delta) == mat(cfg, [[BiSeries.z_minus_zeta(cfg, tag=L)]], L)
    assert good_reduction_test(phi) == Good(0)


def test_rank2_matrix_matches_oracle():
    cfg = CONFIGS[2]
    phi = DrinfeldModule(cfg, (const(cfg, {(1, 0): 1}), BiSeries.one(cfg, tag=L)))
    zero, one = BiSeries.zero(cfg, tag=L), BiSeries.one(cfg, tag=L)
    expected = mat(cfg, [[zero, BiSeries.z_minus_zeta(cfg, tag=L)], [one, const(cfg, {(1, 0): 1})]], L)
    assert companion_matrix(cfg, phi.delta) == expected
    assert companion_matches_oracle(phi)


@pytest.mark.parametrize("q,vals,verdict", [
    (2, (-1,), Good(1)),
    (2, (0, -3), Good(1)),
    (2, (-1, -3), Good(1)),
    (2, (-2, -3), Bad("ViolatedCoefficient", 1)),
    (2, (0, -1), Bad("NonIntegralSlope")),
    (3, (0, -8), Good(1)),
    (3, (0, 0, -26), Good(1)),
    (3, (-3, 0, -26), Bad("ViolatedCoefficient", 1)),
    (4, (5, -30), Good(2)),
])
def test_verdicts(q, vals, verdict):
    phi = module(CONFIGS[q], *vals)
    assert good_reduction_test(phi) == verdict
    assert brute_force_exponents(phi) == ([verdict.n] if isinstance(verdict, Good) else [])


def test_good_model_rank2():
    cfg = CONFIGS[2]
    model = build_good_model(module(cfg, -1, -3))
    zero, one = BiSeries.zero(cfg, tag=RingTag.TATE_INT), BiSeries.one(cfg, tag=RingTag.TATE_INT)
    zz = BiSeries.z_minus_zeta(cfg, tag=RingTag.TATE_INT)
    assert model.model.T == mat(cfg, [[zero, zz], [one, one]], RingTag.TATE_INT)
    assert model.consistent()
    assert is_strong_good_model(model, 1)


def test_phi_is_a_ring_map():
    cfg = CONFIGS[3]
    phi = module(cfg, 1, -8)
    pz = phi.phi_z()
    assert phi.phi([0, 0, 1]) == pz * pz
    assert phi.phi([2, 1]) == pz + TwistedPoly.scalar(cfg, BiSeries.constant(cfg, 2, tag=L))


@pytest.mark.parametrize("q,vals", [(2, (0, -3)), (3, (1, 2, -26)), (4, (0, 3))])
def test_det_of_companion(q, vals):
    cfg = CONFIGS[q]
    phi = module(cfg, *vals)
    r = phi.rank
    expected = BiSeries.z_minus_zeta(cfg, tag=L) * phi.delta[-1].retag(RingTag.TATE_GEN).invert()
    d = det(drinfeld_motive(phi).T)
    assert d == (expected if r % 2 else -expected)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_verdict_invariant_under_unit_conjugation(seed):
    rng = random.Random(seed)
    cfg = CONFIGS[rng.choice([2, 3])]
    phi = random_good_drinfeld(cfg, rng, rng.randint(1, 2), (-4, 4)) if rng.random() < 0.5 else \
        random_bad_drinfeld(cfg, rng, None, (-4, 4), max_rank=2)
    u = const(cfg, {(0, 0): 1, (rng.randint(1, 3), 0): rng.randrange(1, cfg.q)})
    assert good_reduction_test(phi.conjugate(u)) == good_reduction_test(phi)
    v = good_reduction_test(phi)
    m = rng.randint(-2, 2)
    shifted = good_reduction_test(phi.conjugate(const(cfg, {(m, 0): 1})))
    if isinstance(v, Good):
        assert shifted == Good(v.n - m)
    else:
        assert isinstance(shifted, Bad)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_brute_force_agrees(seed):
    rng = random.Random(seed)
    cfg = CONFIGS[rng.choice([2, 3])]
    phi = random_bad_drinfeld(cfg, rng, None, (-5, 5), max_rank=2) if rng.random() < 0.5 else \
        random_good_drinfeld(cfg, rng, rng.randint(1, 2), (-5, 5))
    v = good_reduction_test(phi)
    assert brute_force_exponents(phi) == ([v.n] if isinstance(v, Good) else [])


def test_bad_module_has_no_model():
    cfg = CONFIGS[2]
    with pytest.raises(PreconditionError):
        build_good_model(module(cfg, 0, -1))


def test_naive_model_of_bad_module_fails():
    cfg = CONFIGS[2]
    assert not is_weak_good_model(naive_model(module(cfg, 0, -1)))


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_naive_model_of_random_bad_module_fails(seed):
    rng = random.Random(seed)
    cfg = CONFIGS[rng.choice([2, 3])]
    m = naive_model(random_bad_drinfeld(cfg, rng, None, (-5, 5), max_rank=2))
    assert not (is_weak_good_model(m) and is_strong_good_model(m, 1))


def test_top_coefficient_must_be_nonzero():
    cfg = CONFIGS[2]
    with pytest.raises(PreconditionError):
        DrinfeldModule(cfg, (BiSeries.one(cfg, tag=L), BiSeries.zero(cfg, tag=L)))
