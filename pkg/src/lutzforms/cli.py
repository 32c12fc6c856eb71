"""``lutzforms`` command line: verify, plot, trace.

Exit codes: 0 every check passed, 1 some check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable

from . import __version__
from .errors import BadIndex, BadSlice, LutzFormsError, UnknownConstruction
from .report import ReportDocument, truth_check
from .scalar import DEFAULT_SEED

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "LUTZFORMS_SEED"


def _kw(args, *names) -> dict:
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def _standard_tube(a):
    from .constructions import make_standard_tube
    return make_standard_tube(a.dim, seed=a.seed, **_kw(a, "grid"))


def _lutz(a):
    from .constructions import make_lutz_confoliation
    return make_lutz_confoliation(a.dim, a.core, seed=a.seed, **_kw(a, "grid"))


def _blob(a):
    from .constructions import verify_blob
    return verify_blob(a.dim, seed=a.seed, **_kw(a, "grid"))


def _double(a):
    from .constructions import build_double_and_tube
    return build_double_and_tube(a.dim, a.fold or 1, seed=a.seed, **_kw(a, "grid"))


def _euler(a):
    from .constructions import euler_sections
    return euler_sections(a.dim, seed=a.seed, **_kw(a, "grid"))


def _full_twist(a):
    from .fulltwist import full_twist_homotopy
    return full_twist_homotopy(a.dim, seed=a.seed, **_kw(a, "grid"))


def _giroux(a):
    from .constructions import giroux_domain
    return giroux_domain(a.dim, seed=a.seed, **_kw(a, "grid"))


def _prelag(a):
    from .constructions import prelag_blowup_check
    return prelag_blowup_check(a.dim, seed=a.seed)


def _otw(a):
    from .otdisc import otw_disc_model
    return otw_disc_model(a.dim, seed=a.seed, **_kw(a, "grid"))


def _round_handle(a):
    from .handles import round_handle_report
    m = a.half_dim if a.half_dim is not None else a.dim
    return round_handle_report(m, a.index, seed=a.seed, **_kw(a, "grid"))


CONSTRUCTIONS: dict[str, Callable] = {
    "standard-tube": _standard_tube,
    "lutz-confoliation": _lutz,
    "blob": _blob,
    "double": _double,
    "euler-sections": _euler,
    "full-twist": _full_twist,
    "giroux-domain": _giroux,
    "prelag-blowup": _prelag,
    "otw-disc": _otw,
    "round-handle": _round_handle,
}


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return DEFAULT_SEED


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_report(args) -> ReportDocument:
    if args.name not in CONSTRUCTIONS:
        raise UnknownConstruction(
            f"unknown construction {args.name!r}; known: {', '.join(sorted(CONSTRUCTIONS))}")
    if args.name == "round-handle":
        m = args.half_dim if args.half_dim is not None else args.dim
        if m is None or m < 1:
            raise UsageError("round-handle needs --half-dim m >= 1")
    elif args.dim is None or args.dim < 1:
        raise UsageError("--dim must be at least 1")
    if args.fold is not None and args.fold < 1:
        raise UsageError("--fold must be at least 1")
    if args.grid is not None and args.grid < 3:
        raise UsageError("--grid must be at least 3")
    return CONSTRUCTIONS[args.name](args).report(args.seed)


def cmd_verify(args) -> int:
    doc = build_report(args)
    _emit(doc.dumps(), args.out)
    print(f"{doc.construction}: {len(doc.checks) - len(doc.failed)}/{len(doc.checks)} checks passed",
          file=sys.stderr)
    for c in doc.failed:
        print(f"  FAIL {c.name}", file=sys.stderr)
    return EXIT_OK if doc.ok else EXIT_FAIL


def cmd_plot(args) -> int:
    from .plot import parse_fix, plot_spec, render_slice
    if args.dim is None or args.dim < 1:
        raise UsageError("--dim must be at least 1")
    spec = plot_spec(args.name, args.dim)
    axes = [a.strip() for a in args.axes.split(",")]
    res = render_slice(spec, parse_fix(args.fix), axes, resolution=args.grid or 81)
    out = Path(args.out)
    out.write_text(res.svg, encoding="utf-8")
    out.with_suffix(".csv").write_text(res.csv, encoding="utf-8")
    print(f"wrote {out} and {out.with_suffix('.csv')}; {len(res.locus)} locus point(s)",
          file=sys.stderr)
    return EXIT_OK


def cmd_trace(args) -> int:
    from .surgery import FINAL_TAGS, RECIPES, run_recipe
    from .errors import IllegalStep
    if args.recipe not in RECIPES:
        raise UnknownConstruction(f"unknown recipe {args.recipe!r}; known: {', '.join(sorted(RECIPES))}")
    if args.dim is None or args.dim < 1:
        raise UsageError("--dim must be at least 1")
    checks = []
    try:
        tr = run_recipe(args.recipe, args.dim)
    except IllegalStep as exc:
        checks.append(truth_check("every step legal", False, {"error": str(exc)}, grid=False))
        tr = None
    if tr is not None:
        checks.append(truth_check("every step legal", True, {"steps": len(tr.entries)}, grid=False))
        final = tr.final
        tag = FINAL_TAGS[args.recipe]
        checks.append(truth_check("single final piece", len(final) == 1,
                                  {"pieces": [p.name for p in final]}, grid=False))
        checks.append(truth_check(f"final tag {tag!r}", any(tag in p.tags for p in final),
                                  {"tags": [list(p.tags) for p in final]}, grid=False))
    doc = ReportDocument(f"trace:{args.recipe}", {"recipe": args.recipe, "n": args.dim}, args.seed,
                         checks)
    body = doc.to_json()
    body["trace"] = tr.to_json() if tr is not None else None
    _emit(json.dumps(body, sort_keys=True, indent=2, ensure_ascii=True) + "\n", args.out)
    return EXIT_OK if doc.ok else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lutzforms", description="Verify confoliation and round-surgery constructions.")
    p.add_argument("--version", action="version", version=f"lutzforms {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a named verification suite and emit a JSON report")
    v.add_argument("name", help="construction name: " + ", ".join(CONSTRUCTIONS))
    v.add_argument("--dim", type=int, default=None, help="n, with total dimension 2n+1")
    v.add_argument("--fold", type=int, default=None, help="fold count for 'double'")
    v.add_argument("--grid", type=int, default=None, help="grid resolution per axis")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--out", default=None, help="report path (stdout if omitted)")
    v.add_argument("--core", choices=["circle", "line"], default="circle")
    v.add_argument("--half-dim", dest="half_dim", type=int, default=None)
    v.add_argument("--index", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    pl = sub.add_parser("plot", help="SVG and CSV of a two-dimensional slice")
    pl.add_argument("name")
    pl.add_argument("--dim", type=int, default=2)
    pl.add_argument("--fix", default="", help="coord=value,... for the coordinates not on an axis")
    pl.add_argument("--axes", required=True, help="c1,c2")
    pl.add_argument("--out", required=True, help="SVG path; the CSV goes next to it")
    pl.add_argument("--grid", type=int, default=None)
    pl.add_argument("--seed", type=int, default=None)
    pl.set_defaults(func=cmd_plot)

    t = sub.add_parser("trace", help="replay a round-surgery recipe")
    t.add_argument("--recipe", required=True)
    t.add_argument("--dim", type=int, default=None)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_trace)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args.seed = resolve_seed(args.seed)
        return args.func(args)
    except (UsageError, UnknownConstruction, BadSlice, BadIndex) as exc:
        print(f"lutzforms: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LutzFormsError as exc:
        print(f"lutzforms: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
