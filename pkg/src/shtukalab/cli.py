"""Command line entry point.

Exit codes: 0 success, 1 negative verdict (or failing selftest),
2 verification failed, 3 parse or precision error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from . import __version__
from .drinfeld import DrinfeldModule, Good, brute_force_exponents, build_good_model, naive_model
from .drinfeld import drinfeld_motive, good_reduction_test
from .field import load_field_table
from .errors import (PairInvariantViolated, ParseError, PrecisionExhausted, ShtukaError,
                     TruncationUnsound, VerificationFailed)
from .linalg import Mat, SNFRing, det, smith_normal_form
from .motives import (ModelData, coker_analysis, is_strong_good_model, is_weak_good_model,
                      precision_margin_ok)
from .selftest import CORRUPTIONS, SUITES, SelftestConfig, run_selftest
from .shtuka import (PairIso, associate_shtuka, canonical_pair, criterion_check, lattice_equal,
                     reconstruct_model, round_trip_b, _verify_model)
from . import textio

EXIT_OK, EXIT_NEGATIVE, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class Report:
    """Ordered key=value fields plus named text blocks."""

    command: str
    fields: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    exit_code: int = EXIT_OK

    def add(self, key, value):
        self.fields.append((key, value))

    def block(self, name, lines):
        self.blocks.append((name, list(lines)))

    def get(self, key):
        for k, v in self.fields:
            if k == key:
                return v
        return None

    def machine(self) -> str:
        out = [f"command={self.command}"]
        out += [f"{k}={_fmt(v)}" for k, v in self.fields]
        for name, lines in self.blocks:
            out += [f"begin {name}", *lines, f"end {name}"]
        out.append(f"exit={self.exit_code}")
        return "\n".join(out) + "\n"

    def human(self) -> str:
        width = max((len(k) for k, _ in self.fields), default=0)
        out = [f"shtukalab {self.command}"]
        out += [f"  {k.replace('_', ' '):<{width}}  {_fmt(v)}" for k, v in self.fields]
        out += [f"  note: {n}" for n in self.notes]
        for name, lines in self.blocks:
            out.append(f"{name}:")
            out += [f"    {ln}" for ln in lines]
        return "\n".join(out) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ",".join("none" if x is None else str(x) for x in v) or "-"
    return str(v)


def _load(args) -> textio.InstanceFile:
    return textio.load(args.path, args.pi_prec, args.z_prec)


def _margin(report: Report, fmod, args):
    ok = precision_margin_ok(fmod)
    report.add("precision_margin_ok", ok)
    if not ok:
        if args.strict_precision:
            raise PrecisionExhausted("pi-precision below the safety margin (--strict-precision)")
        report.notes.append("precision below the safety margin; results are best effort")
    return ok


def _model_fields(report: Report, model: ModelData, d: int):
    rep = coker_analysis(model.model, d)
    red = smith_normal_form(model.model.T, SNFRing.ELL_Z_FORMAL)
    report.add("coker_rank", rep.o_L_rank)
    report.add("coker_pi_divisors", rep.pi_divisors)
    report.add("reduced_divisors", red.exponents)
    return rep


def _certificate(cfg, *blocks) -> list[str]:
    inst = textio.InstanceFile(cfg, list(blocks))
    return textio.dumps(inst).splitlines()


def cmd_drinfeld_check(args) -> Report:
    inst = _load(args)
    phi = inst.first(DrinfeldModule)
    if phi is None:
        raise ParseError("file has no drinfeld block", 1)
    cfg = phi.cfg
    r = Report("drinfeld-check")
    r.add("q", cfg.q)
    r.add("rank", phi.rank)
    r.add("pi_prec_available", phi.prec)
    verdict = good_reduction_test(phi)
    r.add("verdict", str(verdict))
    r.add("brute_force_n", brute_force_exponents(phi) or ["none"])
    if not isinstance(verdict, Good):
        naive = naive_model(phi)
        r.add("naive_weak", is_weak_good_model(naive))
        r.exit_code = EXIT_NEGATIVE
        return r
    model = build_good_model(phi, check=False)
    r.add("n", verdict.n)
    r.add("basis_consistent", model.consistent())
    margin = _margin(r, model.model, args)
    if margin:
        strong = is_strong_good_model(model, 1)
    else:
        rep = coker_analysis(model.model, 1)
        strong = rep.annihilator_exponent_ok and rep.pi_torsion_free
    r.add("strong_good_model", strong)
    _model_fields(r, model, 1)
    sh = associate_shtuka(model, 1, check=strong and margin)
    r.add("e", sh.e)
    r.add("pi_prec_certified", model.model.T.prec)
    # relative digits: absolute precision shifts under normalization
    rel_in = phi.prec - min(d.lo for d in phi.delta if not d.is_zero())
    rel_out = model.model.T.prec - min(model.model.T.min_valuation, 0)
    r.add("pi_digits_consumed", max(rel_in - rel_out, 0))
    r.block("certificate", _certificate(cfg, model, sh))
    if not (strong and model.consistent()):
        r.exit_code = EXIT_VERIFY
    return r


def cmd_criterion(args) -> Report:
    inst = _load(args)
    pair = inst.first(PairIso)
    r = Report("criterion")
    if pair is None:
        phi = inst.first(DrinfeldModule)
        if phi is None:
            raise ParseError("file has neither a pair nor a drinfeld block", 1)
        rep = criterion_check(drinfeld_motive(phi))
        r.add("verdict", rep.verdict)
        r.add("detail", rep.detail)
        r.exit_code = EXIT_OK if rep.verdict == "Good" else EXIT_NEGATIVE
        return r
    d = pair.shtuka.d
    r.add("rank", pair.motive.rank)
    r.add("d", d)
    r.add("N", pair.N)
    try:
        pair.check()
    except PairInvariantViolated as exc:
        r.add("verdict", "PairInvariantViolated")
        r.add("detail", str(exc))
        r.exit_code = EXIT_VERIFY
        return r
    _margin(r, pair.shtuka.fmod(), args)
    try:
        rec = reconstruct_model(pair, d, check_pair=False)
    except VerificationFailed as exc:
        r.add("verdict", "VerificationFailed")
        r.add("failed_check", exc.check)
        r.exit_code = EXIT_VERIFY
        return r
    again = reconstruct_model(canonical_pair(rec.model, d), d)
    rt_a = lattice_equal(again.model, rec.model)
    rt_b = round_trip_b(pair, rec)
    r.add("verdict", "Good" if rt_a and rt_b else "VerificationFailed")
    r.add("z_degree_bound", rec.D)
    r.add("e", pair.shtuka.e)
    _model_fields(r, rec.model, d)
    r.add("round_trip_a", rt_a)
    r.add("round_trip_b", rt_b)
    r.add("det_psi", textio.format_series(rec.certificate))
    r.add("pi_prec_certified", min(rec.model.model.T.prec, rec.psi.prec))
    r.block("certificate", _certificate(pair.A.cfg, rec.model, rec.psi))
    if not (rt_a and rt_b):
        r.add("failed_check", "round-trip-a" if not rt_a else "round-trip-b")
        r.exit_code = EXIT_VERIFY
    return r


def cmd_verify(args) -> Report:
    """Re-check a certificate: a model block, optionally followed by psi and
    the shtuka it should map onto."""
    inst = _load(args)
    model = inst.first(ModelData)
    if model is None:
        raise ParseError("file has no model block", 1)
    d = model.model.d or 1
    r = Report("verify")
    r.add("rank", model.rank)
    r.add("d", d)
    try:
        _verify_model(model, d)
    except VerificationFailed as exc:
        r.add("verdict", "VerificationFailed")
        r.add("failed_check", exc.check)
        r.exit_code = EXIT_VERIFY
        return r
    _model_fields(r, model, d)
    psi = inst.first(Mat)
    if psi is not None:
        unit = det(psi)
        r.add("psi_unit_det", unit.lo == 0 and unit.reduce_mod_pi().ordz == 0)
        if not r.get("psi_unit_det"):
            r.add("verdict", "VerificationFailed")
            r.add("failed_check", "psi-unit")
            r.exit_code = EXIT_VERIFY
            return r
    r.add("verdict", "Good")
    return r


def cmd_selftest(args) -> Report:
    q_choices = tuple(q for q in (2, 3, 4) if q <= args.max_q)
    if not q_choices:
        raise ValueError("--max-q must be at least 2")
    sc = SelftestConfig(seed=args.seed, count=args.count, max_rank=args.max_rank,
                        q_choices=q_choices, pi_prec=args.pi_prec or 32, z_prec=args.z_prec or 12,
                        suites=tuple(args.suite) if args.suite else None, corrupt=args.corrupt)
    results = run_selftest(sc, jobs=args.jobs)
    r = Report("selftest")
    r.add("seed", sc.seed)
    r.add("count", sc.count)
    if sc.corrupt:
        r.add("corrupt", sc.corrupt)
    for res in results:
        r.add(f"suite.{res.name}", f"{res.passed}/{res.count}")
        for idx, err in res.failures[:5]:
            r.add(f"failure.{res.name}.{idx}", err)
        r.notes.append(res.line())
    failed = [res.name for res in results if not res.ok]
    r.add("failed_suites", failed or ["none"])
    r.add("status", "FAIL" if failed else "PASS")
    r.exit_code = EXIT_NEGATIVE if failed else EXIT_OK
    return r


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pi-prec", type=int, default=None, help="default pi-adic precision")
    common.add_argument("--z-prec", type=int, default=None, help="default z-adic precision")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--strict-precision", action="store_true",
                        help="fail instead of continuing below the precision margin")

    parser = argparse.ArgumentParser(prog="shtukalab", parents=[common],
                                     description="Good reduction of A-motives via local shtukas.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("drinfeld-check", parents=[common], help="good reduction of a Drinfeld module")
    p.add_argument("path")
    p.set_defaults(func=cmd_drinfeld_check)

    p = sub.add_parser("criterion", parents=[common], help="reconstruct a good model from a pair")
    p.add_argument("path")
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", parents=[common], help="run the property suites")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--max-q", type=int, default=4)
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--corrupt", choices=CORRUPTIONS, default=None,
                   help="inject a known fault to check that failures are reported")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        load_field_table()  # a broken SHTUKALAB_FIELD_TABLE is an input error
        report = args.func(args)
    except (ParseError, PrecisionExhausted, TruncationUnsound, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (VerificationFailed, PairInvariantViolated, ShtukaError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    text = report.machine() if args.format == "machine" else report.human()
    sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
