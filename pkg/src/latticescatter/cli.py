"""Command-line entry point: ``latticescatter {solve,green,dispersion,selftest}``."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np


def _g(v: float) -> str:
    return format(v, ".15g")


def _cmd_solve(args) -> int:
    from .config import ParseError, ValidationError, parse_config
    from .pipeline import run

    try:
        config = parse_config(Path(args.config).read_text())
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        bundle = run(config, out_dir=args.out_dir)
    except (ArithmeticError, LookupError, ValueError, RuntimeError) as exc:
        # module errors (SingularStep, OutOfRange, InsufficientSamples, ...)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    d = bundle.report["diagnostics"]
    print(f"n_max              {bundle.report['n_max']}")
    print(f"condition          {_g(d['condition'])}")
    print(f"boundary_residual  {_g(d['boundary_residual'])}")
    print(f"interior_residual  {_g(d['interior_residual'])}")
    if d["decay_statistic"] is not None:
        print(f"decay_statistic    {_g(d['decay_statistic'])}")
    for name, path in bundle.paths.items():
        print(f"wrote {name:9s} {path}")
    for failure in bundle.failures:
        print(f"FAILED {failure}", file=sys.stderr)
    return 0 if bundle.ok else 1


def _cmd_green(args) -> int:
    from .green import GreenEngine, OutOfRange, stencil
    from .lattice import lattice_distance

    x = (args.x1, args.x2)
    dist = lattice_distance(x)
    engine = GreenEngine.build(args.k, args.eps, n_max=args.nmax, max_distance=dist + 1)
    try:
        g = engine(x)
        res = stencil(engine, np.array([x]), engine.k2)[0] - (1.0 if x == (0, 0) else 0.0)
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"G({args.x1},{args.x2}) = {_g(g.real)} {'+' if g.imag >= 0 else '-'} "
          f"{_g(abs(g.imag))}i")
    print(f"re {_g(g.real)}\nim {_g(g.imag)}\nabs {_g(abs(g))}")
    print(f"stencil_residual {_g(abs(res))}")
    return 0


def _cmd_dispersion(args) -> int:
    from .radiation import solve_dispersion

    sp = solve_dispersion(args.alpha, args.k)
    print(f"xi1  {_g(sp.xi1)}\nxi2  {_g(sp.xi2)}\nzeta {_g(sp.zeta)}\nmu   {_g(sp.mu)}")
    print(f"residual {_g(float(np.max(np.abs(sp.residuals()))))}")
    return 0


def _cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(verbose=True)
    return 0 if all(r.passed for r in results) else 1


def _parse_k(text: str) -> float:
    text = text.strip()
    if text.startswith("sqrt(") and text.endswith(")"):
        return math.sqrt(float(text[5:-1]))
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticescatter",
                                 description="Exterior Dirichlet problems on the triangular lattice")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem described by a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("green", help="print G(x) and its stencil residual")
    p.add_argument("--k", type=_parse_k, required=True)
    p.add_argument("--x1", type=int, required=True)
    p.add_argument("--x2", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--nmax", type=int, default=None)
    p.set_defaults(func=_cmd_green)

    p = sub.add_parser("dispersion", help="print the saddle point for a direction")
    p.add_argument("--alpha", type=float, required=True, help="direction angle in radians")
    p.add_argument("--k", type=_parse_k, required=True)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.set_defaults(func=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
