"""Command-line driver.

Exit codes: 0 pass, 1 an identity failed (certificate on stderr and in the
JSON report), 2 usage error.
"""
import argparse
import csv
import io
import json
import os
import sys

from . import faults, hmatrix, partitions, shelves, verify, xq
from .errors import Falsified, QShelfError
from .series import product_side, theta_quotient

DEFAULT_ORDER = 60
DEFAULT_N_MAX = 30


class UsageError(Exception):
    pass


def default_order():
    raw = os.environ.get("QSHELF_DEFAULT_ORDER")
    if raw is None:
        return DEFAULT_ORDER
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"QSHELF_DEFAULT_ORDER must be an integer, got {raw!r}")
    if value < 0:
        raise UsageError("QSHELF_DEFAULT_ORDER must be nonnegative")
    return value


def _series_rows(s):
    return [[e, int(s[e])] for e in range(min(0, s.valuation), s.order + 1)]


def _csv(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands


def _need(cond, message):
    if not cond:
        raise UsageError(message)


def cmd_series(args):
    k, N = args.k, args.order
    _need(k >= 2, "--k must be at least 2")
    j = args.j
    if args.source in ("product", "theta"):
        _need(j in (None, 0), "product and theta sources live on shelf 0")
        j = 0
    _need(j is not None, "--shelf/--j is required")
    _need(j >= 0, "--shelf must be nonnegative")
    lo = 2 if args.ghost else 1
    _need(lo <= args.i <= k, f"--i must lie in {lo}..{k}")
    if args.source == "product":
        _need(not args.ghost, "product source has no ghosts")
        s = product_side(k, args.i, N)
    elif args.source == "theta":
        _need(not args.ghost, "theta source has no ghosts")
        s = theta_quotient(k, args.i, N)
    elif args.source == "recursion":
        table = shelves.build_by_recursion(k, j, N)
        s = table.ghost(j, args.i) if args.ghost else table.official(j, args.i)
    elif args.source == "count":
        r = (k - 1) * j + args.i
        counts = partitions.ghost_counts(k, r, N) if args.ghost else partitions.official_counts(k, r, N)
        s = partitions.as_series(counts)
    elif args.source == "dictionary":
        f = xq.jtildetilde(k, k - args.i + 1, N) if args.ghost else xq.jtilde(k, k - args.i + 1, N)
        s = xq.specialize(f, j, N)
    else:
        s = shelves.closed_form_ghost(k, j, args.i, N) if args.ghost else shelves.closed_form_official(k, j, args.i, N)
    meta = {"k": k, "j": j, "i": args.i, "r": (k - 1) * j + args.i,
            "kind": "ghost" if args.ghost else "official", "source": args.source}
    if args.format == "json":
        return _json(dict(meta, series=s.to_json())), 0
    if args.format == "csv":
        return _csv(_series_rows(s), ["exponent", "coefficient"]), 0
    return str(s) + "\n", 0


def _config(args):
    ks = tuple(args.k) if args.k else verify.Config.ks
    _need(all(k >= 2 for k in ks), "--k values must be at least 2")
    for name in ("n_max", "j_max", "J_max", "span"):
        _need(getattr(args, name) >= 0, f"--{name.replace('_', '-')} must be nonnegative")
    return verify.Config(ks=ks, order=args.order, n_max=args.n_max, j_max=args.j_max,
                         J_max=args.J_max, strength=args.strength, span=args.span)


def cmd_verify(args):
    cfg = _config(args)
    _need(args.jobs >= 1, "--jobs must be positive")
    if args.suite == "matrix":
        _need(cfg.j_max >= 1, "matrix suite needs --j-max >= 1")
    report = verify.run(args.suite, cfg, jobs=args.jobs)
    code = 0 if report.passed else 1
    if args.format == "json":
        text = _json(report.to_json())
    elif args.format == "csv":
        if args.suite == "eh":
            rows = [o.indices for o in report.outcomes]
            text = _csv([[r["k"], r["j"], r["i"], r["kind"], cfg.strength, o.detail["f"], int(o.passed)]
                         for r, o in zip(rows, report.outcomes)], shelves.EH_CSV_HEADER)
        else:
            text = _csv([[o.suite, json.dumps(o.indices, sort_keys=True), int(o.passed),
                          "" if o.passed else o.certificate.get("exponent")] for o in report.outcomes],
                        ["suite", "indices", "pass", "exponent"])
    else:
        lines = []
        for o in report.outcomes:
            idx = " ".join(f"{k}={v}" for k, v in o.indices.items())
            tail = "" if o.passed else f"  first bad exponent {o.certificate.get('exponent')}"
            lines.append(f"{'PASS' if o.passed else 'FAIL'}  {o.suite}  {idx}{tail}")
        lines.append(f"{args.suite}: {len(report.outcomes) - sum(not o.passed for o in report.outcomes)}"
                     f"/{len(report.outcomes)} cells pass")
        text = "\n".join(lines) + "\n"
    if code:
        sys.stderr.write(json.dumps(report.first_failure, sort_keys=True) + "\n")
    return text, code


def cmd_count(args):
    k, n_max = args.k, args.n_max
    _need(k >= 2, "--k must be at least 2")
    _need(n_max >= 0, "--n-max must be nonnegative")
    if args.kind == "h":
        for name in ("J", "j", "l", "i"):
            _need(getattr(args, name) is not None, f"--{name} is required for kind h")
        _need(1 <= args.i <= k and 1 <= args.l <= k, "--i and --l must lie in 1..k")
        _need(args.J >= 0 and args.j >= args.J + 1, "need J >= 0 and j >= J + 1")
        r = (k - 1) * args.J + args.i
        counts = partitions.h_counts(k, args.J, args.j, args.l, args.i, n_max)
        profile = partitions.h_profile(k, args.J, args.j, args.l, args.i)
        vanish = partitions.h_vanishes(k, args.J, args.j, args.l, args.i)
    else:
        if args.r is None:
            _need(args.J is not None and args.i is not None, "give --r or both --J and --i")
            lo = 2 if args.kind == "ghost" else 1
            _need(args.J >= 0 and lo <= args.i <= k, f"need J >= 0 and {lo} <= i <= k")
            r = (k - 1) * args.J + args.i
        else:
            r = args.r
        _need(r >= 1, "--r must be positive")
        if args.kind == "ghost":
            counts = partitions.ghost_counts(k, r, n_max)
            profile = partitions.ghost_profile(k, *partitions.decompose_ghost(k, r))
        else:
            counts = partitions.official_counts(k, r, n_max)
            profile = partitions.official_profile(k, *partitions.decompose_official(k, r)[0])
        vanish = False
    if args.witness:
        lines = []
        for n in range(n_max + 1):
            if vanish:
                continue
            for pi in partitions.witnesses(profile, n):
                lines.append(json.dumps(list(pi.parts)))
        return "\n".join(lines) + ("\n" if lines else ""), 0
    rows = [[k, r, n, args.kind, int(counts[n])] for n in range(n_max + 1)]
    if args.format == "json":
        return _json([dict(zip(("k", "r", "n", "kind", "count"), row)) for row in rows]), 0
    if args.format == "csv":
        return _csv(rows, ["k", "r", "n", "kind", "count"]), 0
    return "".join(f"n={n:>3}  {c}\n" for _, _, n, _, c in rows), 0


def cmd_hmatrix(args):
    k, N = args.k, args.order
    _need(k >= 2, "--k must be at least 2")
    if args.kind == "h":
        _need(args.J is not None and args.j is not None, "--J and --j are required for kind h")
        _need(args.J >= 0 and args.j >= args.J, "need 0 <= J <= j")
        m = hmatrix.h_build(k, args.J, args.j, N)
    else:
        _need(args.j is not None, "--j is required")
        _need(args.j >= (0 if args.kind == "Btilde" else 1), "j out of range for this kind")
        m = hmatrix.build_transfer(k, args.j, args.kind, N)
    if args.format == "json":
        return _json(m.to_json()), 0
    rows = [[r + 1, c + 1, str(s)] for r, row in enumerate(m.entries) for c, s in enumerate(row)]
    if args.format == "csv":
        return _csv(rows, ["row", "col", "entry"]), 0
    return "".join(f"({r},{c})  {s}\n" for r, c, s in rows), 0


def cmd_dictionary(args):
    k, N = args.k, args.order
    _need(k >= 2, "--k must be at least 2")
    hi = k - 1 if args.ghost else k
    _need(1 <= args.i <= hi, f"--i must lie in 1..{hi}")
    f = xq.jtildetilde(k, args.i, N) if args.ghost else xq.jtilde(k, args.i, N)
    if args.j is not None:
        _need(args.j >= 0, "--j must be nonnegative")
        s = xq.specialize(f, args.j, N)
        if args.format == "json":
            return _json({"k": k, "i": args.i, "j": args.j, "series": s.to_json()}), 0
        if args.format == "csv":
            return _csv(_series_rows(s), ["exponent", "coefficient"]), 0
        return str(s) + "\n", 0
    if args.format == "json":
        return _json({"k": k, "i": args.i, "order": N, "ghost": args.ghost, "terms": f.to_json()}), 0
    rows = [[a, b, c] for a, b, c in f.terms()]
    if args.format == "csv":
        return _csv(rows, ["a", "b", "c"]), 0
    return "".join(f"{c:+d} x^{a} q^{b}\n" for a, b, c in rows), 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="q-order N (default 60 or $QSHELF_DEFAULT_ORDER)")
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for verify")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--inject-fault", action="append", default=[], metavar="NAME:EXP[:DELTA]",
                        help=f"perturb one coefficient of a pipeline; NAME in {', '.join(faults.PIPELINES)}")

    p = _Parser(prog="qshelf", description="Shelves of Andrews-Bressoud series: build, count, verify.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("series", parents=[common], help="print one series")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--shelf", "--j", dest="j", type=int)
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--ghost", action="store_true")
    s.add_argument("--source", default="closed-form",
                   choices=("closed-form", "recursion", "product", "theta", "count", "dictionary"))
    s.set_defaults(func=cmd_series)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=tuple(verify.SUITES) + ("all",))
    v.add_argument("--k", type=int, nargs="+")
    v.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    v.add_argument("--j-max", type=int, default=8)
    v.add_argument("--J-max", dest="J_max", type=int, default=2)
    v.add_argument("--span", type=int, default=4, help="hcomb: shelves j = J+1 .. J+span")
    v.add_argument("--strength", choices=shelves.STRENGTHS, default="standard")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("count", parents=[common], help="count restricted partitions")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--kind", choices=("official", "ghost", "h"), default="official")
    c.add_argument("--r", type=int)
    c.add_argument("--J", type=int)
    c.add_argument("--j", type=int)
    c.add_argument("--i", type=int)
    c.add_argument("--l", type=int)
    c.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    c.add_argument("--witness", action="store_true", help="stream qualifying partitions as JSON arrays")
    c.set_defaults(func=cmd_count)

    h = sub.add_parser("hmatrix", parents=[common], help="print an h-matrix or transfer matrix")
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--kind", choices=("h",) + hmatrix.KINDS, default="h")
    h.add_argument("--J", type=int)
    h.add_argument("--j", type=int)
    h.set_defaults(func=cmd_hmatrix)

    d = sub.add_parser("dictionary", parents=[common], help="print a two-variable series")
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--i", type=int, required=True)
    d.add_argument("--ghost", action="store_true")
    d.add_argument("--j", type=int, help="specialise x = q^j")
    d.set_defaults(func=cmd_dictionary)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.order is None:
            args.order = default_order()
        if args.order < 0:
            raise UsageError("--order must be nonnegative")
        specs = [faults.parse(f) for f in args.inject_fault]
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"qshelf: error: {exc}\n")
        return 2
    for name, exp, delta in specs:
        faults.install(name, exp, delta)
    try:
        text, code = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"qshelf: error: {exc}\n")
        return 2
    except Falsified as exc:
        sys.stderr.write(json.dumps(exc.certificate, sort_keys=True) + "\n")
        return 1
    except (ValueError, QShelfError) as exc:
        sys.stderr.write(f"qshelf: error: {exc}\n")
        return 2
    finally:
        for name, _, _ in specs:
            faults.clear(name)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
