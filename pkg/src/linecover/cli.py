"""Command-line front end (``lcl``).

Options come from flags, then an optional ``--config`` file of ``key=value``
lines, then the environment (``LCL_PRECISION`` sets the default precision).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import suites
from .boxdim import family_report
from .cantor_c1 import cantor_f
from .digit_curve import rows_to_csv, sample_rows
from .figures import family_svg
from .lines import LineFamily, PrecisionError, SampleSpec, Window, build_family, curve_by_name, segments_to_csv

CURVES = ("parabola", "tbinc", "tcantc")


class ConfigError(Exception):
    pass


def _scale_range(text: str) -> tuple:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected kmin:kmax, got {text!r}") from None
    if lo < 0 or hi <= lo:
        raise argparse.ArgumentTypeError(f"bad scale range {text!r}")
    return lo, hi


def _window(text: str) -> Window:
    try:
        parts = [v.strip() for v in text.split(",")]
        if len(parts) != 4:
            raise ValueError
        return Window.of(*parts)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1 with dyadic entries, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _default_precision() -> int:
    raw = os.environ.get("LCL_PRECISION")
    if raw is None:
        return 40
    try:
        p = int(raw)
    except ValueError:
        raise ConfigError(f"LCL_PRECISION must be an integer, got {raw!r}") from None
    if p < 8:
        raise ConfigError("LCL_PRECISION must be at least 8")
    return p


def build_parser(precision: int = 40) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lcl", description="Covering line families of convex curves.")
    ap.add_argument("--config", help="file of key=value defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-p", "--precision", type=_positive, default=precision)
        sp.add_argument("-o", "--output", help="output path (default: stdout)")
        return sp

    g = common(sub.add_parser("gen", help="sample f and F enclosures to CSV"))
    g.add_argument("curve", choices=CURVES)
    g.add_argument("--grid", type=int, default=4, help="sample at j / 2**grid")
    g.add_argument("--stage", type=_positive, help="tcantc only: use the stage-m approximation of f")

    ln = common(sub.add_parser("lines", help="build a covering line family (JSON)"))
    ln.add_argument("curve", choices=CURVES)
    ln.add_argument("--count", type=_positive, default=8)
    ln.add_argument("--scheme", choices=("dyadic-grid", "seeded-random", "points"), default="dyadic-grid")
    ln.add_argument("--sides", choices=("right", "left", "twosided", "mixed"), default="right")
    ln.add_argument("--seed", type=int, default=0)
    ln.add_argument("--depth", type=_positive, default=10)
    ln.add_argument("--points", default="", help="comma-separated rationals for --scheme points")
    ln.add_argument("--window", type=_window, default=Window.unit())
    ln.add_argument("--segments", help="also write clipped segments to this CSV")

    b = common(sub.add_parser("boxcount", help="box-count a family file"))
    b.add_argument("--family", required=True)
    b.add_argument("--scales", type=_scale_range, default=(3, 9))
    b.add_argument("--fit", type=_scale_range)
    b.add_argument("--format", choices=("json", "csv"), default="json")

    v = common(sub.add_parser("verify", help="run a verification suite"))
    v.add_argument("suite", choices=tuple(suites.SUITES) + ("all",))
    v.add_argument("--curve", action="append", choices=CURVES, help="curves for the lipschitz suite (repeatable)")
    v.add_argument("--samples", type=_positive, default=200)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--depth", type=_positive, default=10)
    v.add_argument("--max-ni", type=_positive, default=14)
    v.add_argument("--report", help="report path (default report.json for 'all')")

    pl = common(sub.add_parser("plot", help="draw a family as SVG"))
    pl.add_argument("--family", required=True)
    pl.add_argument("--grid", type=int, help="shade occupied cells at this scale")
    return ap


def read_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{num}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(ap: argparse.ArgumentParser, argv: list, config: dict) -> argparse.Namespace:
    """Install config values as defaults of the chosen subcommand, then parse."""
    pre, _ = ap.parse_known_args(argv)
    sp = ap._subparsers._group_actions[0].choices[pre.command]
    actions = {a.dest: a for a in sp._actions if a.dest != "help"}
    defaults = {}
    for key, value in config.items():
        act = actions.get(key)
        if act is None or not act.option_strings:
            raise ConfigError(f"unknown config key {key!r} for {pre.command}")
        try:
            conv = act.type(value) if act.type else value
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ConfigError(f"config {key}: {exc}") from None
        if act.choices is not None and conv not in act.choices:
            raise ConfigError(f"config {key}: {value!r} not one of {list(act.choices)}")
        defaults[key] = [conv] if isinstance(act, argparse._AppendAction) else conv
    sp.set_defaults(**defaults)
    return ap.parse_args(argv)


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_family(path: str) -> LineFamily:
    try:
        return LineFamily.from_json(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise ConfigError(f"cannot read family {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"malformed family file {path}: {exc}") from None


def cmd_gen(args) -> int:
    curve = curve_by_name(args.curve)
    if args.grid < 0 or args.grid > 16:
        raise ConfigError("--grid must lie in 0..16")
    rows = sample_rows(curve, args.grid, args.precision)
    if args.stage is not None:
        if args.curve != "tcantc":
            raise ConfigError("--stage applies to tcantc only")
        staged = []
        for x, _, _, Flo, Fhi in rows:
            fv = cantor_f(x, args.stage, args.precision)
            staged.append((x, fv.lo, fv.hi, Flo, Fhi))
        rows = staged
    _emit(rows_to_csv(rows), args.output)
    return 0


def cmd_lines(args) -> int:
    points = tuple(v.strip() for v in args.points.split(",") if v.strip())
    if args.scheme == "points" and not points:
        raise ConfigError("--scheme points needs --points")
    if args.scheme == "dyadic-grid" and args.count & (args.count - 1):
        raise ConfigError("--count must be a power of 2 for dyadic-grid")
    if args.scheme == "seeded-random" and args.count >= 1 << args.depth:
        raise ConfigError("--count must be below 2**depth for seeded-random")
    spec = SampleSpec(args.count, args.scheme, args.sides, args.seed, args.depth, points)
    fam = build_family(curve_by_name(args.curve), spec, args.window, args.precision)
    _emit(fam.dumps(), args.output)
    if args.segments:
        Path(args.segments).write_text(segments_to_csv(fam.segments()))
    return 0


def cmd_boxcount(args) -> int:
    fam = _load_family(args.family)
    kmin, kmax = args.scales
    rep = family_report(fam, kmin, kmax, args.fit)
    _emit(rep.dumps() + "\n" if args.format == "json" else rep.to_csv(), args.output)
    return 0


def cmd_verify(args) -> int:
    cfg = suites.SuiteConfig(p=args.precision, seed=args.seed, samples=args.samples, depth=args.depth, max_ni=args.max_ni)
    if args.curve:
        cfg.curves = tuple(dict.fromkeys(args.curve))
    if args.suite == "all":
        report = suites.run_all(cfg)
        Path(args.report or "report.json").write_text(suites.report_json(report))
        for r in report["results"]:
            label = f"criterion {r['id']}" if r["id"] is not None else "property"
            print(f"{'PASS' if r['passed'] else 'FAIL'} {label} {r['name']}")
        return 0 if report["passed"] else 1
    result = suites.run_suite(args.suite, cfg)
    text = suites.report_json({"config": cfg.to_json(), "results": [result], "passed": result["passed"]})
    if args.report:
        Path(args.report).write_text(text)
    print(f"{'PASS' if result['passed'] else 'FAIL'} {result['name']}")
    return 0 if result["passed"] else 1


def cmd_plot(args) -> int:
    fam = _load_family(args.family)
    if args.grid is not None and not 0 <= args.grid <= 10:
        raise ConfigError("--grid must lie in 0..10")
    _emit(family_svg(fam, args.grid, p=args.precision), args.output)
    return 0


COMMANDS = {"gen": cmd_gen, "lines": cmd_lines, "boxcount": cmd_boxcount, "verify": cmd_verify, "plot": cmd_plot}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ap = build_parser(_default_precision())
        pre, _ = ap.parse_known_args(argv)
        args = _apply_config(ap, argv, read_config(pre.config)) if pre.config else ap.parse_args(argv)
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"lcl: error: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"lcl: precision failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
