from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONFIGS, configs, series
from shtukalab import textio
from shtukalab.drinfeld import DrinfeldModule
from shtukalab.errors import ParseError
from shtukalab.series import RingTag
from shtukalab.shtuka import PairIso

INSTANCES = sorted((Path(__file__).resolve().parent.parent / "instances").glob("*.txt"))

HEADER = "config p=2 e=1 ell_deg=1 poly=[1,1] pi_prec=32 z_prec=12 zeta=[1]*pi^1*z^0"


@pytest.mark.parametrize("path", INSTANCES, ids=lambda p: p.name)
def test_instance_files_round_trip(path):
    text = path.read_text()
    assert textio.dumps(textio.loads(text)) == text


def test_instances_present():
    names = {p.name for p in INSTANCES}
    assert {"carlitz.txt", "pair_carlitz.txt", "pair_broken.txt"} <= names


@given(st.data())
def test_series_round_trip(data):
    cfg = data.draw(configs)
    x = data.draw(series(cfg, lo=-3))
    y = textio.parse_series(textio.format_series(x), cfg)
    assert y == x and y.prec == x.prec and y.zprec == x.zprec


def test_series_signs_and_defaults():
    cfg = CONFIGS[3]
    x = textio.parse_series("[1]*pi^1 - [1]*z^2", cfg)
    assert x.coeff(1, 0) == 1 and x.coeff(0, 2) == 2
    assert x.prec == cfg.default_pi_prec and x.zprec is None
    assert textio.parse_series("0 @ pi^5, z^3", cfg).is_zero()


def test_drinfeld_line():
    inst = textio.loads(HEADER + "\ndrinfeld q=2 ell_deg=1 zeta=[1]*pi^1*z^0 "
                                 "delta=[[1]*pi^-1*z^0] @ pi^20\n")
    phi = inst.first(DrinfeldModule)
    assert phi.rank == 1 and phi.prec == 20 and phi.delta[0].lo == -1


def test_precision_override():
    inst = textio.loads(HEADER + "\nmatrix 1 1 ring=FORMAL\n[1]*pi^0*z^0\n", pi_prec=9, z_prec=4)
    assert inst.cfg.default_pi_prec == 9 and inst.cfg.default_z_prec == 4
    m = inst.blocks[0]
    assert m[0, 0].prec == 9


def test_parse_error_reports_line_and_column():
    bad = HEADER + "\nmatrix 1 2 ring=FORMAL\n[1]*pi^0*z^0, [1]*pi^0*q^3\n"
    with pytest.raises(ParseError) as info:
        textio.loads(bad)
    assert info.value.line == 3
    assert info.value.column is not None
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("matrix 1 1 ring=FORMAL\n[1]*pi^0*z^0\n", 1),
    (HEADER + "\nwidget 3\n", 2),
    (HEADER + "\nmatrix 1 1 ring=FORMAL\n[1]*pi^0*z^0 [1]*pi^1*z^0\n", 3),
    (HEADER + "\ndrinfeld q=3 ell_deg=1 zeta=[1]*pi^1*z^0 delta=[[1]*pi^0*z^0]\n", 2),
    (HEADER + "\ndrinfeld q=2 ell_deg=1 zeta=[1]*pi^1*z^0 delta=[[1]*pi^0*z^1]\n", 2),
])
def test_malformed_inputs(text, line):
    with pytest.raises(ParseError) as info:
        textio.loads(text)
    assert info.value.line == line


def test_pair_file_loads_as_pair():
    path = next(p for p in INSTANCES if p.name == "pair_carlitz.txt")
    pair = textio.load(path).first(PairIso)
    assert pair.N == 0 and pair.shtuka.e == 1
    assert pair.A.tag is RingTag.FORMAL_GEN
    pair.check()
