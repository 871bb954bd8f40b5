"""Command line: `qchar char ...` prints a series, `qchar verify ...` runs suites.

Exit codes: 0 pass, 1 identity failure, 2 usage error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import sl2, sl3, toda
from .qcore import QCoreError, Series2, expand, rational_str
from .suites import SUITES, RunConfig, UsageError, run_suite

CHAR_TARGETS = ("sl2", "sl3-chi", "sl3-phi", "sl3-psi", "vk", "I", "Iddn")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--zmax", type=int)
    p.add_argument("--qlo", type=int)
    p.add_argument("--qhi", type=int)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out", metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qchar", description="q-series characters of principal subspaces")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("char", help="print a truncated character series")
    c.add_argument("target", choices=CHAR_TARGETS)
    for name in ("k", "l", "k1", "k2", "l1", "l2", "l3", "d1", "d2", "n"):
        c.add_argument(f"--{name}", type=int)
    _common(c)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--k1", type=int)
    v.add_argument("--k2", type=int)
    v.add_argument("--precision", type=int, default=100)
    v.add_argument("--samples", type=int, default=5)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--timing", action="store_true", help="include wall-clock times in the report")
    _common(v)
    return ap


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.target} needs " + ", ".join(f"--{n}" for n in missing))


def _window(args, zmax: int, qlo: int, qhi: int):
    z = zmax if args.zmax is None else args.zmax
    lo = qlo if args.qlo is None else args.qlo
    hi = qhi if args.qhi is None else args.qhi
    if z < 0 or lo > hi:
        raise UsageError("need zmax >= 0 and qlo <= qhi")
    return z, (lo, hi)


def char_series(args) -> Series2:
    t = args.target
    if t == "sl2":
        _need(args, "k", "l")
        if not 0 <= args.l <= args.k:
            raise UsageError(f"need 0 <= l <= k, got k={args.k}, l={args.l}")
        z, w = _window(args, 6, 0, 10)
        return sl2.chi_sl2(args.k, args.l, z, w, "fermionic")
    if t == "sl3-chi":
        _need(args, "k", "l1", "l2")
        if min(args.l1, args.l2) < 0 or args.l1 + args.l2 > args.k:
            raise UsageError("need 0 <= l1, l2 and l1 + l2 <= k")
        z, w = _window(args, 4, 0, 8)
        return sl3.chi_series(args.k, args.l1, args.l2, z, w)
    if t in ("sl3-phi", "sl3-psi"):
        _need(args, "k1", "k2", "l1", "l2", "l3")
        p = sl3.ModuleParams(args.k1, args.k2, args.l1, args.l2, args.l3)
        if p.k2 < 1:
            raise UsageError("k2 >= 1 is required")
        z, w = _window(args, 4, 0, 8)
        if t == "sl3-phi":
            if not sl3.in_P_U(p):
                raise UsageError(f"{p} is outside P_U")
            if sl3.phi_source(p) == "unsupported":
                raise UsageError(f"{p} is outside Rtilde_U and not on the face l3 = min(l1, l2)")
            return expand(sl3.phi_char_fs(p, z), sl3.ORIENT, z, w)
        if not sl3.in_P_V(p):
            raise UsageError(f"{p} is outside P_V")
        if not sl3.in_R_V(p):
            raise UsageError(f"{p} is outside R_V")
        return sl3.psi_B(p, z, w)
    if t == "vk":
        _need(args, "k")
        if args.k < 1:
            raise UsageError("k >= 1 is required")
        z, w = _window(args, 4, 0, 8)
        return sl3.ch_Vk(args.k, z, w)
    if t == "I":
        _need(args, "d1", "d2")
        if min(args.d1, args.d2) < 0:
            raise UsageError("need d1, d2 >= 0")
        z, w = _window(args, 4, 0, 8)
        return toda.I_expanded(args.d1, args.d2, z, w)
    _need(args, "d1", "d2", "n")
    if min(args.d1, args.d2) < 0 or not 0 <= args.n <= min(args.d1, args.d2):
        raise UsageError("need d1, d2 >= 0 and 0 <= n <= min(d1, d2)")
    z, w = _window(args, 4, 0, 8)
    return expand(toda.I_ddn(args.d1, args.d2, args.n), toda.ORIENT_NEG, z, w)


def series_table(s: Series2) -> str:
    lines = [f"# orientation={list(s.orientation)} zmax={s.zmax} qwindow={list(s.qwindow)}",
             f"{'z1':>4} {'z2':>4} {'q':>5}  coeff"]
    for (m1, m2, e), c in sorted(s.terms.items()):
        lines.append(f"{m1:>4} {m2:>4} {e:>5}  {rational_str(c)}")
    return "\n".join(lines)


def reports_table(reports) -> str:
    lines = []
    for r in reports:
        d = r.as_dict(timing=False)
        lines.append(f"{d['suite']}: {'PASS' if d['pass'] else 'FAIL'} "
                     f"({d['count'] - d['failed']}/{d['count']})")
        for c in r.failures():
            lines.append(f"  FAIL {c['check']} {json.dumps(c['params'], sort_keys=True)} "
                         f"{json.dumps(c.get('detail'), sort_keys=True)}")
    return "\n".join(lines)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "char":
            s = char_series(args)
            text = s.to_json() if args.format == "json" else series_table(s)
            _emit(text, args.out)
            return EXIT_OK
        cfg = RunConfig(zmax=args.zmax, qlo=args.qlo, qhi=args.qhi, precision=args.precision,
                        samples=args.samples, seed=args.seed, k1=args.k1, k2=args.k2)
        names = SUITES if args.suite == "all" else (args.suite,)
        reports = [run_suite(name, cfg) for name in names]
        if args.format == "json":
            body = [r.as_dict(timing=args.timing) for r in reports]
            text = json.dumps(body[0] if len(body) == 1 else body, indent=1, sort_keys=True)
        else:
            text = reports_table(reports)
        _emit(text, args.out)
        for r in reports:
            print(f"{r.suite}: {'pass' if r.passed else 'FAIL'} in {r.seconds:.1f}s", file=sys.stderr)
        return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    except (UsageError, ValueError) as exc:
        print(f"qchar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QCoreError, ArithmeticError, RuntimeError) as exc:
        print(f"qchar: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
