"""Command line interface.

Commands: generate, saturate, verify, render, analyze. Exit codes follow
one contract everywhere: 0 all checks pass (or the command simply
succeeded), 1 verification ran and found violations or an unsaturated
input, 2 input/usage/construction errors.
"""

import argparse
import json
import os
import sys

from thuelab import io as tio
from thuelab import packing as tpack
from thuelab import render as trender
from thuelab import tessellation as ttess
from thuelab import verifier as tverf
from thuelab.geometry import DegenerateGeometryError, ToleranceConfig

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


def _add_domain_flags(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument(
        "--torus",
        nargs=2,
        type=float,
        metavar=("W", "H"),
        help="periodic rectangle of size W x H",
    )
    g.add_argument(
        "--box",
        nargs=2,
        type=float,
        metavar=("W", "H"),
        help="finite box of size W x H",
    )
    p.add_argument(
        "--margin",
        type=float,
        default=4.0,
        help="box analysis margin (default 4)",
    )


def _add_tol_flags(p: argparse.ArgumentParser):
    p.add_argument("--eps-eq", type=float, default=1e-9, help="coordinate tolerance")
    p.add_argument("--eps-merge", type=float, default=1e-7, help="vertex merge tolerance")
    p.add_argument("--eps-area", type=float, default=1e-8, help="relative area tolerance")


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(args.eps_eq, args.eps_merge, args.eps_area)


def _domain(args):
    if args.torus:
        return tpack.Domain("torus", args.torus[0], args.torus[1], args.margin)
    if args.box:
        return tpack.Domain("box", args.box[0], args.box[1], args.margin)
    return None


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("THUE_LAB_SEED")
    if env is not None:
        return int(env)
    return 0


def _load(args) -> tpack.PackingConfiguration:
    return tio.load_packing(args.input, _domain(args))


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="thuelab",
        description="Voronoi/Delaunay analysis and density certification of "
        "unit-circle packings",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a packing")
    g.add_argument("--kind", choices=("hex", "square", "random"), required=True)
    _add_domain_flags(g)
    g.add_argument("--seed", type=int, default=None, help="RNG seed (random kind); "
                   "falls back to THUE_LAB_SEED, then 0")
    g.add_argument("--max-failures", type=int, default=1000)
    g.add_argument("-o", "--output", required=True)

    s = sub.add_parser("saturate", help="fill a packing's gaps greedily")
    s.add_argument("input")
    _add_domain_flags(s)
    _add_tol_flags(s)
    s.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="run the verification pipeline")
    v.add_argument("input")
    _add_domain_flags(v)
    _add_tol_flags(v)
    v.add_argument(
        "--checks",
        default=None,
        help="comma-separated subset of: " + ",".join(tverf.ALL_CHECKS),
    )
    v.add_argument("-o", "--output", default=None, help="report path (default stdout)")

    r = sub.add_parser("render", help="render a packing to SVG")
    r.add_argument("input")
    _add_domain_flags(r)
    r.add_argument(
        "--layers",
        default="circles,centers,voronoi",
        help="comma-separated subset of: " + ",".join(trender.LAYERS),
    )
    r.add_argument("--scale", type=float, default=40.0, help="pixels per unit")
    r.add_argument("--report", default=None, help="report JSON for the violations layer")
    r.add_argument("-o", "--output", required=True)

    a = sub.add_parser("analyze", help="verify and render in one pass")
    a.add_argument("input")
    _add_domain_flags(a)
    _add_tol_flags(a)
    a.add_argument("--layers", default="circles,voronoi,violations")
    a.add_argument("--scale", type=float, default=40.0)
    a.add_argument("--svg", default=None, help="optional SVG output path")
    a.add_argument("-o", "--output", required=True, help="report path")

    return ap


def _cmd_generate(args) -> int:
    domain = _domain(args)
    if domain is None:
        raise ValueError("generate needs --torus W H or --box W H")
    if args.kind == "hex":
        config = tpack.gen_hexagonal(domain)
    elif args.kind == "square":
        config = tpack.gen_square(domain)
    else:
        config = tpack.gen_random(domain, _default_seed(args), args.max_failures)
    tio.save_packing(config, args.output)
    print(f"wrote {config.n} centers to {args.output}")
    return EXIT_OK


def _cmd_saturate(args) -> int:
    config = _load(args)
    tol = _tol(args)
    result = tpack.greedy_saturate(config, tol)
    tio.save_packing(result, args.output)
    print(f"inserted {result.n - config.n} center(s); wrote {args.output}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    config = _load(args)
    tol = _tol(args)
    checks = args.checks.split(",") if args.checks else None
    report = tverf.check_thue(config, tol, checks)
    text = tio.report_to_json(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.verdict else EXIT_VIOLATIONS


def _cmd_render(args) -> int:
    config = _load(args)
    spec = trender.RenderSpec(
        layers=tuple(s for s in args.layers.split(",") if s), scale=args.scale
    )
    report = None
    if args.report:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
    svg = trender.render_svg(config, spec, report=report)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    config = _load(args)
    tol = _tol(args)
    diagram = ttess.build_diagram(config, tol)
    report = tverf.check_thue(config, tol, diagram=diagram)
    text = tio.report_to_json(report)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    if args.svg:
        spec = trender.RenderSpec(
            layers=tuple(s for s in args.layers.split(",") if s), scale=args.scale
        )
        svg = trender.render_svg(
            config, spec, diagram=diagram, report=report.to_json_dict()
        )
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg)
    print(f"verdict: {'pass' if report.verdict else 'FAIL'}; wrote {args.output}")
    return EXIT_OK if report.verdict else EXIT_VIOLATIONS


_COMMANDS = {
    "generate": _cmd_generate,
    "saturate": _cmd_saturate,
    "verify": _cmd_verify,
    "render": _cmd_render,
    "analyze": _cmd_analyze,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        ValueError,
        KeyError,
        OSError,
        DegenerateGeometryError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
