"""Seeded random instances for the property suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import BaseConfig, config_for_q
from .drinfeld import DrinfeldModule, build_good_model, good_reduction_test, Good
from .lattice import minimal_N
from .linalg import Mat
from .motives import FMod, ModelData
from .series import BiSeries, RingTag
from .shtuka import LocalShtuka, PairIso, canonical_pair


@dataclass(frozen=True)
class GenBounds:
    q_choices: tuple = (2, 3, 4)
    max_rank: int = 3
    val_range: tuple = (-6, 6)
    pi_prec: int = 32
    z_prec: int = 12
    zeta_choices: tuple = ("zero", "pi", "pi2")
    good_bias: float = 0.5


def random_config(rng: random.Random, bounds: GenBounds) -> BaseConfig:
    q = rng.choice(bounds.q_choices)
    kind = rng.choice(bounds.zeta_choices)
    zeta = {"zero": {}, "pi": {1: 1}, "pi2": {2: 1, 3: 1}}[kind]
    return config_for_q(q, 1, zeta, default_pi_prec=bounds.pi_prec, default_z_prec=bounds.z_prec)


def random_unit(rng, field) -> int:
    return rng.randrange(1, field.order)


def random_laurent(cfg, rng, v: int, prec: int, extra_terms: int = 2, tag=RingTag.POLY_L):
    """Element of L with valuation exactly v."""
    f = cfg.field
    terms = {(v, 0): random_unit(rng, f)}
    for _ in range(extra_terms):
        i = rng.randrange(v + 1, v + 6)
        if i < prec:
            terms[(i, 0)] = rng.randrange(f.order)
    return BiSeries.from_terms(cfg, terms, prec, None, tag)


def random_drinfeld(cfg, rng, rank: int, val_range=(-6, 6), good_bias=0.5) -> DrinfeldModule:
    q = cfg.q
    lo, hi = val_range
    prec = cfg.default_pi_prec
    vals = [rng.randint(lo, hi) for _ in range(rank)]
    if rng.random() < good_bias:
        # aim for an integral slope inside the valuation window
        ns = [n for n in range(-hi, hi + 1) if lo <= -n * (q**rank - 1) <= hi]
        n = rng.choice(ns)
        vals[-1] = -n * (q**rank - 1)
        for i in range(1, rank):
            vals[i - 1] = rng.randint(max(lo, -n * (q**i - 1)), hi) if -n * (q**i - 1) <= hi else hi
    delta = []
    for i, v in enumerate(vals, 1):
        if i < rank and rng.random() < 0.15:
            delta.append(BiSeries.zero(cfg, prec, None, RingTag.POLY_L))
        else:
            # exact data: keep pi_prec digits relative to the valuation of the inverse too
            delta.append(random_laurent(cfg, rng, v, prec + 2 * max(v, 0)))
    return DrinfeldModule(cfg, tuple(delta))


def _rand_poly(cfg, rng, zdeg=2, pideg=2, prec=None, tag=RingTag.TATE_INT):
    f = cfg.field
    terms = {(i, j): rng.randrange(f.order) for i in range(pideg + 1) for j in range(zdeg + 1)
             if rng.random() < 0.4}
    return BiSeries.from_terms(cfg, terms, prec, None, tag)


def random_unimodular(cfg, rng, s: int, zdeg=2, pideg=2, prec=None, tag=RingTag.TATE_INT):
    """``(U, U^-1)`` with U = P * diag(units) * (unitriangular); entries of U
    are polynomials of z-degree <= zdeg and pi-degree <= pideg."""
    prec = cfg.default_pi_prec if prec is None else prec
    f = cfg.field
    one = BiSeries.one(cfg, prec, tag)
    zero = BiSeries.zero(cfg, prec, None, tag)
    upper = rng.random() < 0.5
    N = [[one if i == j else zero for j in range(s)] for i in range(s)]
    for i in range(s):
        for j in range(s):
            if (i < j) if upper else (i > j):
                N[i][j] = _rand_poly(cfg, rng, zdeg, pideg, prec, tag)
    Nm = Mat(N, tag)
    # inverse of a unitriangular matrix: finite Neumann series
    E = Mat.identity(cfg, s, prec, tag) - Nm
    inv = Mat.identity(cfg, s, prec, tag)
    power = Mat.identity(cfg, s, prec, tag)
    for _ in range(s - 1):
        power = power * E
        inv = inv + power
    units = [random_unit(rng, f) for _ in range(s)]
    Dm = Mat.diag([BiSeries.constant(cfg, u, prec, tag) for u in units])
    Dinv = Mat.diag([BiSeries.constant(cfg, f.inv(u), prec, tag) for u in units])
    perm = list(range(s))
    rng.shuffle(perm)
    P = Mat([[one if perm[i] == j else zero for j in range(s)] for i in range(s)], tag)
    Pinv = P.transpose()
    return P * Dm * Nm, inv * Dinv * Pinv


def block_diag(mats, tag):
    cfg = mats[0].cfg
    n = sum(m.rows for m in mats)
    prec = min(m.prec for m in mats)
    zero = BiSeries.zero(cfg, prec, None, tag)
    rows = [[zero] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                rows[off + i][off + j] = m[i, j]
        off += m.rows
    return Mat(rows, tag)


def random_good_drinfeld(cfg, rng, rank, val_range=(-6, 6), tries=200) -> DrinfeldModule:
    for _ in range(tries):
        phi = random_drinfeld(cfg, rng, rank, val_range, good_bias=1.0)
        if isinstance(good_reduction_test(phi), Good):
            return phi
    raise RuntimeError("could not draw a good Drinfeld module")


def random_good_model(cfg, rng, max_rank=3, conjugate=True, val_range=(-6, 6)) -> ModelData:
    """Strong good model: block sum of normalized Drinfeld models, optionally
    moved to another basis by an o_L[z]-unimodular matrix."""
    total = rng.randint(1, max_rank)
    blocks = []
    while total > 0:
        r = rng.randint(1, total)
        blocks.append(build_good_model(random_good_drinfeld(cfg, rng, r, val_range), check=False))
        total -= r
    T = block_diag([b.model.T for b in blocks], RingTag.TATE_INT)
    B = block_diag([b.basis for b in blocks], RingTag.TATE_GEN)
    ref = block_diag([b.reference for b in blocks], RingTag.POLY_L)
    model = ModelData(FMod(RingTag.TATE_INT, T, 1), B, ref)
    if conjugate and rng.random() < 0.7:
        model = conjugate_model(model, rng)
    return model


def conjugate_model(model: ModelData, rng) -> ModelData:
    cfg = model.model.cfg
    S, Sinv = random_unimodular(cfg, rng, model.rank, prec=model.model.T.prec)
    T = Sinv * model.model.T * S.sigma()
    B = model.basis * S.retag(RingTag.TATE_GEN)
    return ModelData(FMod(RingTag.TATE_INT, T.retag(RingTag.TATE_INT), model.model.d), B,
                     model.reference)


def random_shtuka(cfg, rng, max_rank=3) -> LocalShtuka:
    """Effective local shtuka built from Drinfeld blocks and (z - zeta)^k
    blocks, conjugated by a random unimodular matrix."""
    total = rng.randint(1, max_rank)
    blocks, d = [], 1
    while total > 0:
        r = rng.randint(1, total)
        if r == 1 and rng.random() < 0.3:
            k = rng.randint(0, 2)
            blocks.append(Mat([[BiSeries.z_minus_zeta(cfg, None, RingTag.TATE_INT) ** k]]))
            d = max(d, k)
        else:
            phi = random_good_drinfeld(cfg, rng, r)
            blocks.append(build_good_model(phi, check=False).model.T)
        total -= r
    T = block_diag(blocks, RingTag.FORMAL)
    if rng.random() < 0.8:
        U, Uinv = random_unimodular(cfg, rng, T.rows, prec=T.prec, tag=RingTag.FORMAL)
        T = Uinv * T * U.sigma()
    return LocalShtuka(T.retag(RingTag.FORMAL), d)


def scrambled_pair(model: ModelData, rng, d: int = 1) -> tuple[PairIso, Mat]:
    """Canonical pair of ``model`` with its shtuka basis scrambled by U."""
    base = canonical_pair(model, d)
    cfg = model.model.cfg
    U, Uinv = random_unimodular(cfg, rng, model.rank, prec=base.A.prec, tag=RingTag.FORMAL)
    T2 = Uinv * base.shtuka.T * U.sigma()
    A2 = (Uinv.retag(RingTag.FORMAL_GEN) * base.A).retag(RingTag.FORMAL_GEN)
    pair = PairIso(base.motive, LocalShtuka(T2, d), A2, minimal_N(A2))
    return pair, U


def break_equivariance(pair: PairIso, rng) -> PairIso:
    """Rescale A by a nonzero power of pi, which sigma does not commute with."""
    k = rng.choice([-2, -1, 1, 2])
    A = pair.A.pi_shift(k)
    return PairIso(pair.motive, pair.shtuka, A, max(pair.N + abs(k), 0))


def random_bad_drinfeld(cfg, rng, rank=None, val_range=(-6, 6), tries=400,
                        max_rank=3) -> DrinfeldModule:
    for _ in range(tries):
        r = rank or rng.randint(1, max_rank)
        phi = random_drinfeld(cfg, rng, r, val_range, good_bias=0.0)
        if not isinstance(good_reduction_test(phi), Good):
            return phi
    raise RuntimeError("could not draw a bad Drinfeld module")


__all__ = [
    "GenBounds", "random_config", "random_laurent", "random_drinfeld", "random_unimodular",
    "block_diag", "random_good_drinfeld", "random_good_model", "conjugate_model",
    "random_shtuka", "scrambled_pair", "break_equivariance", "random_bad_drinfeld",
]
