"""Command line front end.

Exit status: 0 on success, 1 on a domain error (its class name goes to
stderr), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import catalog
from .cones import PAIRING_BOUNDS
from .errors import K3ConesError
from .lattice import MukaiVector


def _vector(text: str) -> MukaiVector:
    try:
        return MukaiVector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def _nonneg(text: str) -> int:
    n = int(text) if text.lstrip("-").isdigit() else None
    if n is None or n < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer: {text!r}")
    return n


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    # registered on the main parser and on every subparser; the subparser
    # copies use SUPPRESS so they never clobber a value given earlier
    p.add_argument("--format", choices=["md", "markdown", "csv", "json"], default=default("md"))
    p.add_argument("--bound", type=_positive, default=default(None),
                   help="initial coefficient bound of the wall scan")
    p.add_argument("--max-doublings", type=_nonneg, default=default(None),
                   help="how often the bound may double before giving up")
    p.add_argument("--pairing-bound", choices=list(PAIRING_BOUNDS), default=default("half-square"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k3cones",
        description="Cones of divisors on moduli of sheaves on Picard rank one K3 surfaces.",
    )
    _global_flags(parser, lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, lambda v: argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("cones", "Eff, Mov and Nef of M(vx)"), ("walls", "walls of the movable cone")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--vx", type=_vector, required=True, help="Mukai vector a,y,b")
        p.add_argument("--h2", type=int, required=True, help="degree H.H")

    p = sub.add_parser("cotangent", parents=[common], help="thresholds of P(Omega_S)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--h2", type=int)
    g.add_argument("--table", action="store_true")
    p.add_argument("--h2-max", type=int, default=38)

    p = sub.add_parser("rank2", parents=[common], help="thresholds of rigid rank-2 bundles")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--h2", type=int)
    g.add_argument("--table", action="store_true")
    p.add_argument("--h2-max", type=int, default=78)

    p = sub.add_parser("lm", parents=[common], help="walls and alpha_e for numerics (r,g,d)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    p = sub.add_parser("walltable", parents=[common], help="the (r,g,d) wall tables")
    p.add_argument("--which", choices=["main", "extra"], default="main")

    sub.add_parser("audit", parents=[common], help="compare printed tables and closed forms")
    return parser


def _even_range(parser, h2_max: int, low: int = 2) -> None:
    if h2_max < low or h2_max % 2:
        parser.error(f"--h2-max must be an even integer >= {low}")


def _run(args, parser) -> str:
    kw = dict(bound=args.bound, max_doublings=args.max_doublings, pairing_bound=args.pairing_bound)
    fmt = args.format
    cmd = args.command
    if cmd in ("cones", "walls"):
        rep = catalog.cone_report(args.vx, args.h2, **kw)
        return rep.render(fmt, walls_only=cmd == "walls")
    if cmd == "cotangent":
        if args.table:
            _even_range(parser, args.h2_max)
            return catalog.run_cotangent_table(args.h2_max, **kw).render(fmt)
        return catalog.render(catalog.cotangent_row(args.h2, **kw), fmt)
    if cmd == "rank2":
        if args.table:
            _even_range(parser, args.h2_max)
            return catalog.render(list(catalog.run_rank2_tables(args.h2_max, **kw)), fmt)
        return catalog.render(catalog.rank2_row(args.h2, **kw), fmt)
    if cmd == "lm":
        return catalog.lm_report(args.r, args.g, args.d, **kw).render(fmt)
    if cmd == "walltable":
        src = catalog.PRINTED_WALLS_MAIN if args.which == "main" else catalog.PRINTED_WALLS_EXTRA
        tid = catalog.WALLS_MAIN if args.which == "main" else catalog.WALLS_EXTRA
        return catalog.run_wall_table(list(src), tid, **kw).render(fmt)
    if cmd == "audit":
        return catalog.run_corollary_audit(**kw).render(fmt)
    raise AssertionError(cmd)


def cli_main(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = _run(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except K3ConesError as exc:
        print(f"error: {exc.name}: {exc}", file=stderr)
        return 1
    stdout.write(out)
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
