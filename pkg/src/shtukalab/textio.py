"""Instance files: a config header followed by typed blocks.

Example::

    config p=2 e=1 ell_deg=1 poly=[1,1] pi_prec=32 z_prec=12 zeta=[1]*pi^1*z^0
    drinfeld q=2 ell_deg=1 zeta=[1]*pi^1*z^0 delta=[[1]*pi^-1*z^0, [1]*pi^-3*z^0] @ pi^32

Series literals are sums of ``[c_0,...,c_{k-1}]*pi^i*z^j`` terms (coordinate
vectors over F_p in the basis 1, x, ..., x^{k-1} of the residue field)
followed by ``@ pi^P`` and optionally ``, z^D``.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .config import BaseConfig, config_for_q
from .drinfeld import DrinfeldModule
from .errors import ParseError
from .linalg import Mat
from .motives import FMod, ModelData
from .series import BiSeries, RingTag
from .shtuka import LocalShtuka, PairIso

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*\[(?P<vec>[^\]]*)\]\s*(?:\*\s*pi\^(?P<i>-?\d+))?\s*(?:\*\s*z\^(?P<j>\d+))?\s*")
_PREC = re.compile(r"^\s*pi\^(?P<P>-?\d+)\s*(?:,\s*z\^(?P<D>\d+)\s*)?$")


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside square brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_series(text: str, cfg: BaseConfig, tag: RingTag = RingTag.FORMAL, prec: int | None = None,
                 zprec: int | None = None, line: int | None = None) -> BiSeries:
    body, _, tail = text.partition("@")
    if tail:
        m = _PREC.match(tail)
        if not m:
            raise ParseError(f"bad precision annotation {tail.strip()!r}", line,
                             text.index("@") + 1)
        prec = int(m.group("P"))
        zprec = int(m.group("D")) if m.group("D") else None
    prec = cfg.default_pi_prec if prec is None else prec
    body = body.strip()
    k = cfg.field.k
    p = cfg.p
    terms: dict[tuple[int, int], np.ndarray] = {}
    if body != "0":
        pos = 0
        first = True
        while pos < len(body):
            m = _TERM.match(body, pos)
            if not m or m.end() == pos:
                raise ParseError(f"cannot parse term at {body[pos:pos + 20]!r}", line, pos + 1)
            if not first and not m.group("sign"):
                raise ParseError("terms must be joined by '+' or '-'", line, pos + 1)
            first = False
            try:
                vec = [int(c) for c in m.group("vec").split(",") if c.strip()]
            except ValueError:
                raise ParseError(f"bad coefficient vector [{m.group('vec')}]", line, pos + 1) from None
            if len(vec) > k:
                raise ParseError(f"coefficient vector longer than field degree {k}", line, pos + 1)
            v = np.zeros(k, dtype=np.int64)
            v[: len(vec)] = vec
            if m.group("sign") == "-":
                v = -v
            key = (int(m.group("i") or 0), int(m.group("j") or 0))
            terms[key] = (terms.get(key, 0) + v) % p
            pos = m.end()
    if not terms:
        return BiSeries.zero(cfg, prec, zprec, tag)
    lo = min(i for i, _ in terms)
    width = max(max(i for i, _ in terms) - lo + 1, 1)
    nz = max(j for _, j in terms) + 1
    data = np.zeros((nz, width, k), dtype=np.int64)
    for (i, j), v in terms.items():
        data[j, i - lo] = v
    return BiSeries(cfg, data, lo, prec, zprec, tag)


def format_series(x: BiSeries, with_prec: bool = True) -> str:
    s = x.to_literal()
    return s if with_prec else s.split(" @ ")[0]


def _kv(tokens, line):
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ParseError(f"expected key=value, got {t!r}", line)
        key, val = t.split("=", 1)
        out[key] = val
    return out


def _int(d, key, line, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ParseError(f"missing {key}=", line)
    try:
        return int(d[key])
    except ValueError:
        raise ParseError(f"{key} must be an integer", line) from None


def format_config(cfg: BaseConfig) -> str:
    zeta = BiSeries.zeta(cfg)
    return (f"config p={cfg.p} e={cfg.e} ell_deg={cfg.ell_degree} "
            f"poly=[{','.join(map(str, cfg.field_poly))}] pi_prec={cfg.default_pi_prec} "
            f"z_prec={cfg.default_z_prec} zeta={format_series(zeta, False)}")


def _zeta_pairs(cfg_stub: BaseConfig, text: str, line: int):
    z = parse_series(text, cfg_stub, RingTag.TATE_INT, line=line)
    if z.nz > 1:
        raise ParseError("zeta must be constant in z", line)
    return tuple((i, c) for i, j, c in z.terms())


def parse_config(text: str, line: int = 1) -> BaseConfig:
    head, _, zeta_text = text.partition("zeta=")
    tokens = head.split()
    if not tokens or tokens[0] != "config":
        raise ParseError("expected 'config' header", line, 1)
    d = _kv(tokens[1:], line)
    poly = None
    if "poly" in d:
        poly = tuple(int(c) for c in d["poly"].strip("[]").split(","))
    try:
        cfg = BaseConfig(_int(d, "p", line), _int(d, "e", line, 1), _int(d, "ell_deg", line, 1), (),
                         _int(d, "pi_prec", line, 32), _int(d, "z_prec", line, 12), poly)
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    if zeta_text.strip():
        try:
            cfg = cfg.with_zeta(_zeta_pairs(cfg, zeta_text, line))
        except ValueError as exc:
            raise ParseError(str(exc), line) from None
    return cfg


# ---------------------------------------------------------------------------
# blocks


@dataclass
class InstanceFile:
    cfg: BaseConfig
    blocks: list = field(default_factory=list)

    def first(self, kind):
        for b in self.blocks:
            if isinstance(b, kind):
                return b
        return None


def format_matrix(m: Mat) -> list[str]:
    lines = [f"matrix {m.shape[0]} {m.shape[1]} ring={m.tag.value}"]
    lines += [format_series(x) for r in m.entries for x in r]
    return lines


def format_drinfeld(phi: DrinfeldModule) -> list[str]:
    cfg = phi.cfg
    zeta = format_series(BiSeries.zeta(cfg), False)
    delta = ", ".join(format_series(dl, False) for dl in phi.delta)
    return [f"drinfeld q={cfg.q} ell_deg={cfg.ell_degree} zeta={zeta} delta=[{delta}] @ pi^{phi.prec}"]


def format_fmod(m: FMod) -> list[str]:
    d = "" if m.d is None else f" d={m.d}"
    return [f"fmod rank={m.rank} ring={m.tag.value}{d}"] + format_matrix(m.T)


def format_model(md: ModelData) -> list[str]:
    d = "" if md.model.d is None else f" d={md.model.d}"
    return ([f"model rank={md.rank}{d}"] + format_matrix(md.model.T) + ["basis"]
            + format_matrix(md.basis) + ["reference"] + format_matrix(md.reference))


def format_shtuka(sh: LocalShtuka) -> list[str]:
    return [f"shtuka rank={sh.rank} d={sh.d}"] + format_matrix(sh.T)


def format_pair(pair: PairIso) -> list[str]:
    return ([f"pair N={pair.N} d={pair.shtuka.d}"] + format_fmod(pair.motive)
            + format_shtuka(pair.shtuka) + format_matrix(pair.A) + ["end"])


_FORMATTERS = [
    (DrinfeldModule, format_drinfeld), (FMod, format_fmod), (ModelData, format_model),
    (LocalShtuka, format_shtuka), (PairIso, format_pair), (Mat, format_matrix),
]


def format_block(obj) -> list[str]:
    for kind, fn in _FORMATTERS:
        if isinstance(obj, kind):
            return fn(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(inst: InstanceFile) -> str:
    lines = [format_config(inst.cfg)]
    for b in inst.blocks:
        lines += format_block(b)
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text: str):
        self.lines = [(n, ln.rstrip()) for n, ln in enumerate(text.splitlines(), 1)
                      if ln.strip() and not ln.lstrip().startswith("#")]
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else (None, None)

    def next(self, what="line"):
        if self.pos >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 1
            raise ParseError(f"unexpected end of file, expected {what}", last)
        self.pos += 1
        return self.lines[self.pos - 1]


def _read_matrix(rd: _Reader, cfg) -> Mat:
    n, text = rd.next("matrix header")
    tokens = text.split()
    if len(tokens) != 4 or tokens[0] != "matrix" or not tokens[3].startswith("ring="):
        raise ParseError("expected 'matrix <rows> <cols> ring=<tag>'", n, 1)
    try:
        rows, cols = int(tokens[1]), int(tokens[2])
        tag = RingTag(tokens[3][5:])
    except ValueError:
        raise ParseError("bad matrix header", n, 1) from None
    entries = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            ln, s = rd.next("series literal")
            row.append(parse_series(s, cfg, tag, line=ln))
        entries.append(row)
    return Mat(entries, tag)


def parse_drinfeld(text: str, line: int, cfg: BaseConfig | None, pi_prec: int | None = None,
                   z_prec: int | None = None) -> tuple[BaseConfig, DrinfeldModule]:
    m = re.match(r"^drinfeld\s+(?P<head>.*?)\s*zeta=(?P<zeta>.*?)\s+delta=(?P<delta>\[.*\])"
                 r"\s*(?:@\s*(?P<prec>.*))?$", text)
    if not m:
        raise ParseError("expected 'drinfeld q=.. ell_deg=.. zeta=.. delta=[..] @ pi^P'", line, 1)
    d = _kv(m.group("head").split(), line)
    q = _int(d, "q", line)
    k = _int(d, "ell_deg", line, 1)
    prec = None
    if m.group("prec"):
        pm = _PREC.match(m.group("prec"))
        if not pm:
            raise ParseError("bad precision annotation", line, m.start("prec") + 1)
        prec = int(pm.group("P"))
    if cfg is None:
        try:
            cfg = config_for_q(q, k, default_pi_prec=pi_prec or prec or 32,
                               default_z_prec=z_prec or 12)
        except ValueError as exc:
            raise ParseError(str(exc), line) from None
        cfg = cfg.with_zeta(_zeta_pairs(cfg, m.group("zeta"), line))
    elif cfg.q != q or cfg.ell_degree != k:
        raise ParseError("drinfeld block disagrees with config header", line)
    elif _zeta_pairs(cfg, m.group("zeta"), line) != cfg.zeta:
        raise ParseError("drinfeld zeta disagrees with config header", line, m.start("zeta") + 1)
    inner = m.group("delta").strip()[1:-1]
    parts = [s for s in split_top(inner) if s]
    if not parts:
        raise ParseError("delta list is empty", line, m.start("delta") + 1)
    delta = tuple(parse_series(s, cfg, RingTag.POLY_L, prec, line=line) for s in parts)
    try:
        return cfg, DrinfeldModule(cfg, delta)
    except Exception as exc:
        raise ParseError(str(exc), line) from None


def _header(text, line, word):
    tokens = text.split()
    if not tokens or tokens[0] != word:
        raise ParseError(f"expected '{word}' block", line, 1)
    return _kv(tokens[1:], line)


def _read_fmod(rd, cfg):
    n, text = rd.next("fmod header")
    d = _header(text, n, "fmod")
    T = _read_matrix(rd, cfg)
    tag = RingTag(d.get("ring", T.tag.value))
    dd = _int(d, "d", n, -1)
    if T.shape[0] != _int(d, "rank", n):
        raise ParseError("rank does not match matrix size", n)
    return FMod(tag, T, None if dd < 0 else dd)


def _read_shtuka(rd, cfg):
    n, text = rd.next("shtuka header")
    d = _header(text, n, "shtuka")
    T = _read_matrix(rd, cfg)
    return LocalShtuka(T, _int(d, "d", n))


def _read_model(rd, cfg):
    n, text = rd.next("model header")
    d = _header(text, n, "model")
    T = _read_matrix(rd, cfg)
    for word in ("basis",):
        ln, t = rd.next(word)
        if t.strip() != word:
            raise ParseError(f"expected '{word}'", ln, 1)
    B = _read_matrix(rd, cfg)
    ln, t = rd.next("reference")
    if t.strip() != "reference":
        raise ParseError("expected 'reference'", ln, 1)
    R = _read_matrix(rd, cfg)
    dd = _int(d, "d", n, -1)
    return ModelData(FMod(T.tag, T, None if dd < 0 else dd), B, R)


def _read_pair(rd, cfg):
    n, text = rd.next("pair header")
    d = _header(text, n, "pair")
    motive = _read_fmod(rd, cfg)
    sh = _read_shtuka(rd, cfg)
    A = _read_matrix(rd, cfg)
    ln, t = rd.next("end")
    if t.strip() != "end":
        raise ParseError("expected 'end' closing the pair block", ln, 1)
    if sh.d != _int(d, "d", n):
        raise ParseError("pair d disagrees with shtuka d", n)
    return PairIso(motive, sh, A, _int(d, "N", n))


def loads(text: str, pi_prec: int | None = None, z_prec: int | None = None) -> InstanceFile:
    """Parse an instance file.  ``pi_prec``/``z_prec`` override the default
    precisions of the config; explicit ``@`` annotations are kept."""
    rd = _Reader(text)
    cfg = None
    n, first = rd.peek()
    if first is None:
        raise ParseError("empty instance file", 1)
    if first.startswith("config"):
        rd.next()
        cfg = parse_config(first, n).with_precision(pi_prec, z_prec)
    blocks = []
    while rd.peek()[0] is not None:
        n, text = rd.peek()
        word = text.split()[0]
        try:
            if word == "drinfeld":
                rd.next()
                cfg, phi = parse_drinfeld(text, n, cfg, pi_prec, z_prec)
                blocks.append(phi)
                continue
            if cfg is None:
                raise ParseError("missing config header", n, 1)
            if word == "matrix":
                blocks.append(_read_matrix(rd, cfg))
            elif word == "fmod":
                blocks.append(_read_fmod(rd, cfg))
            elif word == "model":
                blocks.append(_read_model(rd, cfg))
            elif word == "shtuka":
                blocks.append(_read_shtuka(rd, cfg))
            elif word == "pair":
                blocks.append(_read_pair(rd, cfg))
            else:
                raise ParseError(f"unknown block '{word}'", n, 1)
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(f"{type(exc).__name__}: {exc}", n) from None
    return InstanceFile(cfg, blocks)


def load(path, pi_prec: int | None = None, z_prec: int | None = None) -> InstanceFile:
    with open(path) as fh:
        return loads(fh.read(), pi_prec, z_prec)


def dump(inst: InstanceFile, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(inst))


__all__ = [
    "parse_series", "format_series", "parse_config", "format_config", "InstanceFile", "loads",
    "dumps", "load", "dump", "format_block", "split_top",
]
