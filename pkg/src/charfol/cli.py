"""Command-line front end.

Subcommands: ``verify``, ``singular``, ``tb``, ``portrait``, ``engine``.
Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .construction import MUTATIONS
from .dsl import DSLParseError
from .engine import DegenerateFormError, NonContactError, UnclassifiedRecordError, NotATangencyError
from .numerics import MIN_DPS, working_dps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_EPS = Fraction(1, 10)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int = 2
    eps: Fraction = MAX_EPS
    precision: int | None = None
    out: Path | None = None
    json: Path | None = None
    leaves: int = 16
    mutate: str | None = None
    width: int = 900
    height: int = 600
    beta: str | None = None
    F: str | None = None


def parse_eps(text: str) -> Fraction:
    """Exact rational ``p/q`` (or integer) in (0, 1/10]; decimals are rejected."""
    if not re.fullmatch(r"\s*\d+\s*(/\s*\d+\s*)?", text):
        raise UsageError(f"--eps must be an exact rational p/q, got {text!r}")
    try:
        eps = Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise UsageError("--eps has a zero denominator") from None
    if not (0 < eps <= MAX_EPS):
        raise UsageError(f"--eps must lie in (0, 1/10], got {eps}")
    return eps


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="half-dimension of the ball factor plus one (n >= 2)")
    common.add_argument("--eps", default="1/10", help="exact rational epsilon p/q in (0, 1/10]")
    common.add_argument("--precision", type=int, default=None,
                        help=f"working digits (>= {MIN_DPS}; default from CHARFOL_PRECISION or 50)")
    common.add_argument("--json", type=Path, default=None, help="write the JSON report here")
    common.add_argument("--out", type=Path, default=None, help="output file (portrait SVG)")

    parser = argparse.ArgumentParser(prog="charfol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the exact verification ledger")
    v.add_argument("--mutate", choices=sorted(MUTATIONS), default=None,
                   help="replace one token of X (sensitivity control)")
    sub.add_parser("singular", parents=[common], help="zeros of the reduced field")
    sub.add_parser("tb", parents=[common], help="Thurston-Bennequin bookkeeping")
    p = sub.add_parser("portrait", parents=[common], help="SVG phase portrait")
    p.add_argument("--leaves", type=int, default=16)
    p.add_argument("--width", type=int, default=900)
    p.add_argument("--height", type=int, default=600)
    e = sub.add_parser("engine", parents=[common], help="characteristic field of user-supplied data")
    e.add_argument("--beta", required=True, help="contact 1-form in the DSL")
    e.add_argument("--F", dest="F", required=True, help="defining polynomial in the DSL")
    return parser


def make_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)  # argparse itself exits 2 on malformed flags
    cfg = RunConfig(ns.subcommand, n=ns.n, eps=parse_eps(ns.eps), precision=ns.precision,
                    out=ns.out, json=ns.json)
    cfg.mutate = getattr(ns, "mutate", None)
    cfg.leaves = getattr(ns, "leaves", 16)
    cfg.width = getattr(ns, "width", 900)
    cfg.height = getattr(ns, "height", 600)
    cfg.beta = getattr(ns, "beta", None)
    cfg.F = getattr(ns, "F", None)
    if cfg.subcommand != "engine" and cfg.n < 2:
        raise UsageError(f"--n {cfg.n}: the construction needs n > 1 (dimension 2n+1 >= 5)")
    if cfg.subcommand != "engine" and cfg.n > 6:
        raise UsageError(f"--n {cfg.n}: supported range is 2 <= n <= 6")
    try:
        cfg.precision = working_dps(cfg.precision)
    except ValueError as err:
        raise UsageError(str(err)) from None
    if cfg.subcommand == "portrait" and cfg.leaves < 12:
        raise UsageError("--leaves must be at least 12")
    return cfg


def _write_json(cfg: RunConfig, payload: dict) -> None:
    from .report import dumps

    text = dumps(payload)
    if cfg.json is not None:
        cfg.json.write_text(text, encoding="utf-8")


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .report import ledger_json, verification_ledger

    checks = verification_ledger(cfg.n, cfg.eps, cfg.mutate)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"[{c.status.upper():4}] {c.name:<{width}}  {c.anchor}  ({c.certificate})", file=out)
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} ledger entries pass", file=out)
    _write_json(cfg, ledger_json(checks, cfg.n, cfg.eps, cfg.mutate))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_singular(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    import mpmath

    from .dynamics import ZeroSearchError
    from .report import singular_report

    try:
        rep = singular_report(cfg.n, cfg.eps, cfg.precision)
    except ZeroSearchError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{'label':<11} {'z':>22} {'r':>22} {'rho':>22}  {'kind':<7} idx  tag  C", file=out)
    for sp in rep.points:
        z, r, rho = (mpmath.nstr(v, 15, min_fixed=-30, max_fixed=30) for v in sp.point)
        tag = {"+": "S+", "-": "S-"}.get(sp.sign, "")
        c = mpmath.nstr(sp.leaf_C, 12) if sp.leaf_C is not None else ""
        print(f"{sp.label:<11} {z:>22} {r:>22} {rho:>22}  {sp.kind or '?':<7} {sp.index:+d}  {tag:<4} {c}",
              file=out)
    _write_json(cfg, rep.to_json())
    return EXIT_OK if len(rep.points) == 5 else EXIT_FAIL


def cmd_tb(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .report import tb_json, tb_report

    try:
        rep, sing = tb_report(cfg.n, cfg.eps, cfg.precision)
    except (UnclassifiedRecordError, NotATangencyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    print(rep.summary(), file=out)
    _write_json(cfg, tb_json(rep, sing))
    return EXIT_OK


def cmd_portrait(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .portrait import PortraitSpec, max_leaf_residual, render_svg
    from .report import singular_report

    rep = singular_report(cfg.n, cfg.eps, cfg.precision)
    spec = PortraitSpec.default(cfg.eps, markers=rep.points, leaves=cfg.leaves,
                                width=cfg.width, height=cfg.height)
    svg = render_svg(spec)
    path = cfg.out or Path("portrait.svg")
    try:
        path.write_text(svg, encoding="utf-8")
    except OSError as err:
        print(f"error: cannot write {path}: {err}", file=sys.stderr)
        return EXIT_FAIL
    worst = max_leaf_residual(svg, cfg.eps)
    print(f"wrote {path}: {len(spec.leaves)} leaves + separatrix C = {spec.c_sep:.9f}, "
          f"{len(rep.points)} singular markers, max leaf residual {worst:.2e}", file=out)
    _write_json(cfg, {"command": "portrait", "eps": str(cfg.eps), "path": str(path),
                      "leaves": [repr(c) for c in spec.leaves], "c_sep": repr(spec.c_sep),
                      "markers": len(rep.points), "max_leaf_residual_ok": worst < 1e-6})
    return EXIT_OK if worst < 1e-6 and len(rep.points) == 5 else EXIT_FAIL


def cmd_engine(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .report import engine_run

    try:
        res = engine_run(cfg.beta, cfg.F)
    except DSLParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateFormError, NonContactError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL
    except (TypeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    payload = res.to_json()
    for name, comp in payload["field"].items():
        print(f"X[{name}] = {comp}", file=out)
    print(f"beta ^ (d beta)^n = {payload['volume_coefficient']} dvol", file=out)
    print(f"membership  iota_X dbeta in span(beta, dF) mod F: {'pass' if res.membership_zero else 'FAIL'}",
          file=out)
    print(f"tangency    beta(X) = dF(X) = 0 mod F:            {'pass' if res.tangent_zero else 'FAIL'}",
          file=out)
    _write_json(cfg, payload)
    return EXIT_OK if payload["all_pass"] else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "singular": cmd_singular, "tb": cmd_tb,
            "portrait": cmd_portrait, "engine": cmd_engine}


def main(argv=None) -> int:
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if cfg.precision is not None:
        os.environ["CHARFOL_PRECISION"] = str(cfg.precision)
    return COMMANDS[cfg.subcommand](cfg)


if __name__ == "__main__":
    sys.exit(main())
