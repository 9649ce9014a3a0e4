import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONFIGS, ser
from shtukalab.drinfeld import DrinfeldModule, build_good_model, drinfeld_motive
from shtukalab.errors import PairInvariantViolated, PrecisionExhausted, VerificationFailed
from shtukalab.generators import break_equivariance, random_good_model, scrambled_pair
from shtukalab.linalg import Mat, det, unit_in_formal
from shtukalab.motives import FMod, ModelData
from shtukalab.shtuka import (LocalShtuka, PairIso, associate_shtuka, canonical_pair,
                              criterion_check, lattice_equal, reconstruct_model, round_trip_b)
from shtukalab.series import BiSeries, RingTag

L = RingTag.POLY_L


def module(cfg, *vals):
    return DrinfeldModule(cfg, tuple(ser(cfg, {(v, 0): 1}, tag=L) for v in vals))


def zz(cfg, tag=RingTag.FORMAL):
    return BiSeries.z_minus_zeta(cfg, cfg.default_pi_prec, tag)


def test_carlitz_shtuka():
    cfg = CONFIGS[2]
    sh = associate_shtuka(build_good_model(module(cfg, 0)))
    assert sh.e == 1 and sh.rank == 1
    rep = sh.validate()
    assert rep.o_L_rank == 1


def test_rank2_shtuka_has_e_one():
    cfg = CONFIGS[3]
    sh = associate_shtuka(build_good_model(module(cfg, 0, -8)))
    assert sh.e == 1
    sh.validate()


def test_power_of_z_minus_zeta():
    cfg = CONFIGS[2]
    sh = LocalShtuka(Mat([[zz(cfg) ** 2]], RingTag.FORMAL), 2)
    assert sh.e == 2
    assert sh.validate().o_L_rank == 2
    with pytest.raises(VerificationFailed):
        LocalShtuka(Mat([[zz(cfg) ** 2]], RingTag.FORMAL), 1).validate()


def test_shtuka_needs_det_nonzero_mod_pi():
    cfg = CONFIGS[2]
    with pytest.raises(VerificationFailed):
        LocalShtuka(Mat([[BiSeries.monomial(cfg, 1, 0) * zz(cfg)]], RingTag.FORMAL), 1)


def test_rescaled_reference_basis_recovers_lattice():
    # delta = pi^-1: the model basis is pi^-1 times the reference basis
    cfg = CONFIGS[2]
    model = build_good_model(module(cfg, -1))
    assert model.basis[0, 0].lo == -1
    pair = canonical_pair(model)
    rec = reconstruct_model(pair, 1)
    assert lattice_equal(rec.model, model)
    assert round_trip_b(pair, rec)


def test_model_basis_pair_gives_standard_lattice():
    cfg = CONFIGS[3]
    model = build_good_model(module(cfg, 1, -8))
    pair = canonical_pair(model, in_model_basis=True)
    rec = reconstruct_model(pair, 1)
    eye = Mat.identity(cfg, 2, tag=RingTag.TATE_GEN)
    assert lattice_equal(rec.model, ModelData(model.model, eye, model.model.T))


def test_lattice_equal_detects_scaling():
    cfg = CONFIGS[2]
    model = build_good_model(module(cfg, 0, -3))
    scaled = ModelData(model.model, model.basis.pi_shift(1), model.reference)
    assert lattice_equal(model, model)
    assert not lattice_equal(model, scaled)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_round_trips_on_random_models(seed):
    rng = random.Random(seed)
    cfg = CONFIGS[rng.choice([2, 3])]
    model = random_good_model(cfg, rng, max_rank=2, val_range=(-3, 3))
    rec = reconstruct_model(canonical_pair(model), 1)
    assert lattice_equal(rec.model, model)
    pair, _ = scrambled_pair(model, rng)
    rec = reconstruct_model(pair, 1)
    assert lattice_equal(rec.model, model)
    assert round_trip_b(pair, rec)
    assert unit_in_formal(det(rec.psi))


def test_broken_pair_is_rejected():
    cfg = CONFIGS[2]
    rng = random.Random(3)
    pair = break_equivariance(canonical_pair(build_good_model(module(cfg, 0, -3))), rng)
    with pytest.raises(PairInvariantViolated):
        pair.check()
    with pytest.raises(PairInvariantViolated):
        reconstruct_model(pair, 1)


def test_pair_with_wrong_shape_is_rejected():
    cfg = CONFIGS[2]
    good = canonical_pair(build_good_model(module(cfg, 0, -3)))
    bad = PairIso(good.motive, good.shtuka, Mat.identity(cfg, 1, tag=RingTag.FORMAL_GEN), 0)
    with pytest.raises(PairInvariantViolated):
        bad.check()


def test_reconstruction_needs_precision():
    cfg = CONFIGS[2]
    pair = canonical_pair(build_good_model(module(cfg, -1)))
    starved = PairIso(pair.motive, pair.shtuka, pair.A.with_prec(3), pair.N)
    with pytest.raises(PrecisionExhausted):
        reconstruct_model(starved, 1)


def test_criterion_verdicts():
    cfg = CONFIGS[2]
    good = criterion_check(drinfeld_motive(module(cfg, -1, -3)))
    assert good.verdict == "Good" and good.model is not None
    bad = criterion_check(drinfeld_motive(module(cfg, 0, -1)))
    assert bad.verdict == "Bad" and "NonIntegralSlope" in bad.detail
    bare = FMod(L, Mat([[zz(cfg, L)]], L), 1)
    assert criterion_check(bare).verdict == "CannotDecide"
    model = build_good_model(module(cfg, 0, -3))
    pair = canonical_pair(model)
    via_pair = criterion_check(pair.motive, pair)
    assert via_pair.verdict == "Good" and lattice_equal(via_pair.model, model)
