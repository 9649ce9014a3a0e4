import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from shtukalab.config import config_for_q
from shtukalab.linalg import Mat
from shtukalab.series import BiSeries, RingTag

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# q = 2, 3, 4 with zeta = pi; q = 4 exercises a residue field of degree 2 over F_2
CONFIGS = {
    2: config_for_q(2, 1, {1: 1}, default_pi_prec=20, default_z_prec=12),
    3: config_for_q(3, 1, {1: 1}, default_pi_prec=20, default_z_prec=12),
    4: config_for_q(4, 1, {1: 1}, default_pi_prec=20, default_z_prec=12),
}


@pytest.fixture
def cfg2():
    return config_for_q(2, 1, {1: 1})


@pytest.fixture
def cfg3():
    return config_for_q(3, 1, {1: 1})


def ser(cfg, terms, prec=None, zprec=None, tag=RingTag.FORMAL):
    """Series from {(pi_exp, z_exp): code}."""
    return BiSeries.from_terms(cfg, terms, prec, zprec, tag)


def mat(cfg, rows, tag=RingTag.FORMAL, prec=None):
    return Mat([[x if isinstance(x, BiSeries) else ser(cfg, x, prec, None, tag) for x in r]
                for r in rows], tag)


configs = st.sampled_from(sorted(CONFIGS)).map(CONFIGS.get)


@st.composite
def series(draw, cfg=None, lo=0, nz=4, max_pi=6, zprec="cfg", tag=RingTag.FORMAL, nonzero=False):
    cfg = cfg or draw(configs)
    order = cfg.field.order
    keys = st.tuples(st.integers(lo, lo + max_pi), st.integers(0, nz - 1))
    terms = draw(st.dictionaries(keys, st.integers(1, order - 1), max_size=8,
                                 min_size=1 if nonzero else 0))
    zp = cfg.default_z_prec if zprec == "cfg" else zprec
    return BiSeries.from_terms(cfg, terms, cfg.default_pi_prec, zp, tag)


@st.composite
def units(draw, cfg, nz=4, tag=RingTag.FORMAL):
    """Elements with a nonzero constant term."""
    x = draw(series(cfg, nz=nz, tag=tag))
    c = draw(st.integers(1, cfg.field.order - 1))
    base = x - BiSeries.from_terms(cfg, {(0, 0): x.coeff(0, 0)}, cfg.default_pi_prec, None, tag) \
        if x.coeff(0, 0) else x
    return base + BiSeries.constant(cfg, c, cfg.default_pi_prec, tag)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda ln: int(ln.split()[2].rstrip(':'))):
            terminalreporter.write_line(line)
