"""Seeded property suites.

Every instance gets its own generator seeded from ``(seed, suite, index)``,
so a failure can be replayed alone and results do not depend on the order
or the process in which instances run.
"""

from __future__ import annotations

import itertools
import random
import time
import traceback
from dataclasses import dataclass, field

from .config import config_for_q
from .drinfeld import (Good, brute_force_exponents, build_good_model, companion_matches_oracle,
                       drinfeld_motive, good_reduction_test, naive_model)
from .errors import PairInvariantViolated, PrecisionExhausted
from .generators import (GenBounds, break_equivariance, random_bad_drinfeld, random_config,
                         random_drinfeld, random_good_model, random_shtuka, scrambled_pair)
from .lattice import brute_force_digit_space, kernel_digit_space
from .linalg import Mat, SNFRing, det, smith_normal_form, unit_in_formal
from .motives import coker_analysis, is_strong_good_model, is_weak_good_model
from .series import BiSeries, RingTag, frobenius_decompose, frobenius_recompose, weierstrass_divide
from .shtuka import canonical_pair, lattice_equal, reconstruct_model, round_trip_b

CORRUPTIONS = ("companion", "sigma", "kernel", "rank")


@dataclass(frozen=True)
class SelftestConfig:
    seed: int = 1
    count: int = 50
    max_rank: int = 3
    q_choices: tuple = (2, 3, 4)
    pi_prec: int = 32
    z_prec: int = 12
    substrate_pi_prec: int = 20
    substrate_z_prec: int = 12
    suites: tuple | None = None
    corrupt: str | None = None

    def bounds(self) -> GenBounds:
        return GenBounds(q_choices=self.q_choices, max_rank=self.max_rank, pi_prec=self.pi_prec,
                         z_prec=self.z_prec)


@dataclass
class SuiteResult:
    name: str
    count: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return self.count - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        return f"{self.name}: {self.passed}/{self.count} {status} ({self.seconds:.2f}s)"


def instance_rng(seed: int, suite: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{suite}:{index}")


# ---------------------------------------------------------------------------
# module-level suites (one call checks one instance; return an error string or None)


def check_drinfeld_equivalence(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    phi = random_drinfeld(cfg, rng, rng.randint(1, sc.max_rank))
    verdict = good_reduction_test(phi)
    brute = brute_force_exponents(phi)
    expected = [verdict.n] if isinstance(verdict, Good) else []
    if brute != expected:
        return f"{verdict} but brute force found {brute}"
    if isinstance(verdict, Good):
        model = build_good_model(phi, check=False)
        if not is_strong_good_model(model, 1):
            return "normalized model is not strong"
        rank = coker_analysis(model.model, 1).o_L_rank
        if rank != 1:
            return f"coker rank {rank}"
    return None


def check_companion_oracle(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    phi = random_drinfeld(cfg, rng, rng.randint(1, sc.max_rank))
    T = drinfeld_motive(phi, validate=False).T
    if sc.corrupt == "companion":
        T = _bump(T)
    return None if companion_matches_oracle(phi, T) else "companion matrix differs from expansion"


def _bump(T: Mat) -> Mat:
    rows = [list(r) for r in T.entries]
    rows[0][0] = rows[0][0] + 1
    return Mat(rows, T.tag)


def check_rank_identity(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    sh = random_shtuka(cfg, rng, sc.max_rank)
    red = sh.T.reduce_mod_pi()
    snf = smith_normal_form(red, SNFRing.ELL_Z_FORMAL)
    if any(e is None for e in snf.exponents):
        return "reduction is singular"
    total = sum(snf.exponents)
    rep = coker_analysis(sh.fmod(), sh.d)
    rank = rep.o_L_rank + (1 if sc.corrupt == "rank" else 0)
    if not (sh.e == total == rank):
        return f"e={sh.e}, divisor sum={total}, coker rank={rank}"
    if not rep.pi_torsion_free:
        return f"coker has torsion {rep.torsion_exponents}"
    return None


def check_round_trip_a(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    model = random_good_model(cfg, rng, sc.max_rank)
    rec = reconstruct_model(canonical_pair(model), 1)
    return None if lattice_equal(rec.model, model) else "reconstructed lattice differs"


def check_round_trip_b(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    model = random_good_model(cfg, rng, sc.max_rank)
    pair, _ = scrambled_pair(model, rng)
    rec = reconstruct_model(pair, 1)
    if not lattice_equal(rec.model, model):
        return "reconstructed lattice differs"
    if not unit_in_formal(det(rec.psi)):
        return "psi does not have unit determinant"
    if not round_trip_b(pair, rec):
        return "psi is not an isomorphism of shtukas"
    return None


def check_negative_bad_drinfeld(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    phi = random_bad_drinfeld(cfg, rng, max_rank=sc.max_rank)
    naive = naive_model(phi)
    if not is_weak_good_model(naive):
        return None
    try:
        strong = is_strong_good_model(naive, 1)
    except PrecisionExhausted:
        return "strong test inconclusive"
    return "naive model of a bad module passed both tests" if strong else None


def check_negative_broken_pair(rng, sc: SelftestConfig):
    cfg = random_config(rng, sc.bounds())
    model = random_good_model(cfg, rng, sc.max_rank)
    pair = canonical_pair(model) if rng.random() < 0.5 else scrambled_pair(model, rng)[0]
    broken = break_equivariance(pair, rng)
    try:
        reconstruct_model(broken, 1)
    except PairInvariantViolated:
        return None
    return "broken pair was not rejected"


# ---------------------------------------------------------------------------
# substrate suites


def _substrate_cfg(rng, sc: SelftestConfig):
    cfg = random_config(rng, GenBounds(q_choices=sc.q_choices))
    return cfg.with_precision(sc.substrate_pi_prec, sc.substrate_z_prec)


def _random_terms(cfg, rng, lo, nz, density):
    order = cfg.field.order
    return {(i, j): rng.randrange(1, order) for i in range(lo, cfg.default_pi_prec)
            for j in range(nz) if rng.random() < density}


def random_formal(cfg, rng, lo=0, density=0.3, nz=None, tag=RingTag.FORMAL, zprec="default"):
    """Random element of l[[pi, z]] (shifted by pi^lo) at the default precisions."""
    nz = cfg.default_z_prec if nz is None else nz
    zp = cfg.default_z_prec if zprec == "default" else zprec
    return BiSeries.from_terms(cfg, _random_terms(cfg, rng, lo, nz, density), cfg.default_pi_prec,
                               zp, tag)


def check_weierstrass(rng, sc: SelftestConfig):
    cfg = _substrate_cfg(rng, sc)
    n = rng.randint(0, 3)
    terms = _random_terms(cfg, rng, 0, cfg.default_z_prec, 0.3)
    for j in range(n):
        terms.pop((0, j), None)
    terms[(0, n)] = rng.randrange(1, cfg.field.order)
    f = BiSeries.from_terms(cfg, terms, cfg.default_pi_prec, cfg.default_z_prec)
    Q0 = random_formal(cfg, rng)
    R0 = random_formal(cfg, rng, nz=n, zprec=None)
    g = Q0 * f + R0
    Q, R = weierstrass_divide(g, f)
    if not (Q * f + R == g):
        return "g != Q f + R"
    if R.nz > n:
        return f"remainder has z-degree {R.nz - 1} >= {n}"
    if not (R == R0 and Q == Q0):
        return "quotient or remainder differs from the planted one"
    return None


def check_sigma_hom(rng, sc: SelftestConfig):
    cfg = _substrate_cfg(rng, sc)
    a = random_formal(cfg, rng, lo=rng.randint(-3, 2))
    b = random_formal(cfg, rng, lo=rng.randint(-3, 2))
    times = 2 if sc.corrupt == "sigma" else 1
    sa, sb = a.sigma(), b.sigma(times)
    if not ((a + b).sigma() == sa + sb):
        return "sigma(a + b) != sigma(a) + sigma(b)"
    if not ((a * b).sigma() == sa * sb):
        return "sigma(ab) != sigma(a) sigma(b)"
    one = BiSeries.one(cfg, cfg.default_pi_prec)
    if not (one.sigma() == one):
        return "sigma(1) != 1"
    return None


def check_frobenius_decompose(rng, sc: SelftestConfig):
    cfg = _substrate_cfg(rng, sc)
    q, P = cfg.q, cfg.default_pi_prec
    a = random_formal(cfg, rng)
    if not (frobenius_recompose(frobenius_decompose(a)) == a):
        return "recompose(decompose(a)) != a"
    parts = [random_formal(cfg, rng).with_prec(-(-(P - i) // q)) for i in range(q)]
    back = frobenius_decompose(frobenius_recompose(parts))
    if not all(x == y and x.prec == y.prec for x, y in zip(back, parts)):
        return "decomposition is not unique"
    return None


def check_snf(rng, sc: SelftestConfig):
    cfg = _substrate_cfg(rng, sc)
    s = rng.randint(1, 3)
    ring = rng.choice([SNFRing.O_L, SNFRing.ELL_Z_FORMAL])
    if ring is SNFRing.O_L:
        # low valuations keep the determinant visible at precision
        entries = [[random_formal(cfg, rng, lo=rng.randint(0, 3), nz=1, zprec=None,
                                  tag=RingTag.TATE_INT) for _ in range(s)] for _ in range(s)]
        m = Mat(entries, RingTag.TATE_INT)
        target = m
    else:
        entries = [[random_formal(cfg, rng, nz=6, zprec=None, density=0.25)
                    for _ in range(s)] for _ in range(s)]
        m = Mat(entries, RingTag.FORMAL)
        target = m.reduce_mod_pi()
    snf = smith_normal_form(m, ring)
    if not (snf.left * target * snf.right == snf.diagonal(s, s)):
        return "left * m * right != diag"
    dm = det(target)
    if any(e is None for e in snf.exponents):
        if ring is SNFRing.O_L and not dm.is_zero():
            return "zero divisor but nonzero determinant"
        return None
    total = sum(snf.exponents)
    measured = dm.lo if ring is SNFRing.O_L else dm.ordz
    if measured != total:
        return f"det valuation {measured} != divisor sum {total}"
    for u in (det(snf.left), det(snf.right)):
        if (u.lo if ring is SNFRing.O_L else u.ordz) != 0:
            return "transformation matrix is not invertible"
    return None


# ---------------------------------------------------------------------------
# exhaustive digit-kernel family


def digit_kernel_family():
    """Fixed family of (A, D) with q <= 3, at most 2 columns, z-degree <= 2."""
    out = []
    for q in (2, 3):
        cfg = config_for_q(q, 1, {1: 1}, default_pi_prec=8)
        rng = random.Random(f"digit-family:{q}")

        def entry():
            if rng.random() < 0.2:
                return BiSeries.zero(cfg, cfg.default_pi_prec, None, RingTag.FORMAL_GEN)
            terms = {(rng.choice((-1, -1, 0, 1)), rng.randint(0, 2)): rng.randrange(1, q)
                     for _ in range(rng.randint(1, 2))}
            return BiSeries.from_terms(cfg, terms, cfg.default_pi_prec, None, RingTag.FORMAL_GEN)

        for idx in range(30):
            s = 1 if idx < 10 else 2
            rows = rng.randint(1, 2)
            A = Mat([[entry() for _ in range(s)] for _ in range(rows)], RingTag.FORMAL_GEN)
            D = 2 if (q == 2 or s == 1) else 1
            out.append((A, D))
    return out


def check_digit_kernel(index: int, sc: SelftestConfig):
    family = digit_kernel_family()
    A, D = family[index % len(family)]
    mine = kernel_digit_space(A, 1, D)
    if sc.corrupt == "kernel":
        mine = set(sorted(mine)[1:])
    brute = brute_force_digit_space(A, 1, D)
    return None if mine == brute else f"kernel span {len(mine)} vs brute force {len(brute)}"


SUITES = {
    "drinfeld_equivalence": check_drinfeld_equivalence,
    "companion_oracle": check_companion_oracle,
    "rank_identity": check_rank_identity,
    "round_trip_a": check_round_trip_a,
    "round_trip_b": check_round_trip_b,
    "negative_bad_drinfeld": check_negative_bad_drinfeld,
    "negative_broken_pair": check_negative_broken_pair,
    "weierstrass": check_weierstrass,
    "sigma_hom": check_sigma_hom,
    "frobenius_decompose": check_frobenius_decompose,
    "snf": check_snf,
    "digit_kernel": check_digit_kernel,
}


def run_instance(name: str, idx: int, sc: SelftestConfig):
    """Run one instance of a suite; returns an error string or None."""
    fn = SUITES[name]
    try:
        if name == "digit_kernel":
            return fn(idx, sc)
        return fn(instance_rng(sc.seed, name, idx), sc)
    except Exception as exc:
        tb = traceback.extract_tb(exc.__traceback__)[-1]
        return f"{type(exc).__name__}: {exc} ({tb.name}:{tb.lineno})"


def suite_count(name: str, count: int) -> int:
    return min(count, len(digit_kernel_family())) if name == "digit_kernel" else count


def run_suite(name: str, sc: SelftestConfig, count: int | None = None, executor=None) -> SuiteResult:
    count = suite_count(name, sc.count if count is None else count)
    res = SuiteResult(name, count)
    start = time.perf_counter()
    if executor is None:
        errs = [run_instance(name, idx, sc) for idx in range(count)]
    else:
        errs = list(executor.map(run_instance, [name] * count, range(count), [sc] * count,
                                 chunksize=max(1, count // 16)))
    res.failures = [(idx, err) for idx, err in enumerate(errs) if err]
    res.seconds = time.perf_counter() - start
    return res


def run_selftest(sc: SelftestConfig, jobs: int = 1) -> list[SuiteResult]:
    names = sc.suites or tuple(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}")
    if jobs <= 1:
        return [run_suite(n, sc) for n in names]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [run_suite(n, sc, executor=pool) for n in names]


__all__ = ["SelftestConfig", "SuiteResult", "SUITES", "CORRUPTIONS", "run_suite", "run_selftest",
           "run_instance",
           "digit_kernel_family", "instance_rng", "random_formal"]
