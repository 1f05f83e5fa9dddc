"""Command line front-end: ``gen``, ``cover`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import formats
from .banana import annulus_cover
from .covers import sweep_csv, sweep_row, verify_cover
from .generators import (
    StretchParams,
    gen_cycle,
    gen_grid,
    gen_interval_graph,
    gen_path,
    gen_separated_points,
    gen_torus_grid,
    gen_tree,
    gen_unit_ball_points,
    stretch,
)
from .geometric import SEPARATION, UNIT_BALL, Embedding, geometric_cover
from .graph import DistanceOracle, GraphInputError
from .pathwidth import pw_cover
from .pipelines import chordal_scheme, genus_cover, k3p_cover, planar_cover
from .stitching import ProviderContractError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# parameters each scheme accepts, and which of them are required
SCHEMES = {
    "banana": ({"q", "p", "m", "root"}, {"q", "p"}),
    "k3p": ({"p", "subdivide_heavy"}, {"p"}),
    "planar": ({"subdivide_heavy"}, set()),
    "genus": ({"g", "subdivide_heavy"}, {"g"}),
    "pathwidth": ({"k", "top_factor"}, set()),
    "geometric": (set(), set()),
    "unit-ball": (set(), set()),
    "chordal": (set(), set()),
}
AUX_REQUIRED = {"pathwidth": "path decomposition", "geometric": "point", "unit-ball": "point"}


class UsageError(Exception):
    pass


def _r_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad r list {text!r}") from None
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError("r values must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asdim", description="Bounded-diameter covers of graphs with certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("family", choices=["grid", "torus", "cycle", "path", "tree", "interval", "stretch", "points"])
    gen.add_argument("dims", nargs="*", type=int, help="grid/torus side lengths, or n for cycle/path")
    gen.add_argument("--n", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--p", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--base", help="stretch base: gridAxB[xC...] or a graph file")
    gen.add_argument("--box", type=float, default=10.0)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--C", type=float, default=2.0)
    gen.add_argument("--mode", choices=[SEPARATION, UNIT_BALL], default=UNIT_BALL)
    gen.add_argument("--out", "-o", help="graph file to write (auxiliary files share its stem)")

    cover = sub.add_parser("cover", help="run a cover scheme over a sweep of r")
    cover.add_argument("graph")
    cover.add_argument("aux", nargs="?", help="path decomposition or point file")
    cover.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    cover.add_argument("--r", type=_r_list, required=True, help="comma-separated scales")
    cover.add_argument("--p", type=int)
    cover.add_argument("--g", type=int)
    cover.add_argument("--q", type=float)
    cover.add_argument("--m", type=int)
    cover.add_argument("--k", type=int, help="pathwidth: reject decompositions wider than k")
    cover.add_argument("--root", type=int)
    cover.add_argument("--top-factor", type=float, dest="top_factor")
    cover.add_argument("--subdivide-heavy", action="store_true", default=None, dest="subdivide_heavy")
    cover.add_argument("--seed", type=int, default=0)
    cover.add_argument("--verify", action="store_true")
    cover.add_argument("--strict", action="store_true", help="verify and refuse to write failing covers")
    cover.add_argument("--csv", help="write the sweep table here")
    cover.add_argument("--out-dir", default=".")

    ver = sub.add_parser("verify", help="re-verify cover files against a graph")
    ver.add_argument("graph")
    ver.add_argument("covers", nargs="+")
    ver.add_argument("--csv", help="write the sweep table here")
    return parser


def _parse_base(spec: str):
    m = re.fullmatch(r"grid(\d+(?:x\d+)*)", spec)
    if m:
        return gen_grid([int(x) for x in m.group(1).split("x")])[0]
    return formats.read_graph(spec)


def cmd_gen(args: argparse.Namespace) -> list[Path]:
    fam = args.family
    out = Path(args.out or f"{fam}.g")
    stem = out.with_suffix("")
    written = [out]
    if fam in ("grid", "torus"):
        if not args.dims:
            raise UsageError(f"{fam} needs side lengths")
        g, coords = (gen_grid if fam == "grid" else gen_torus_grid)(args.dims)
        formats.write_graph(g, out)
        if fam == "grid":
            aux = stem.with_suffix(".pts")
            formats.write_points(Embedding(len(args.dims), 1.0, coords, SEPARATION), aux)
            written.append(aux)
    elif fam in ("cycle", "path"):
        n = args.dims[0] if args.dims else args.n
        if n is None:
            raise UsageError(f"{fam} needs a length")
        formats.write_graph((gen_cycle if fam == "cycle" else gen_path)(n), out)
    elif fam == "tree":
        if args.n is None:
            raise UsageError("tree needs --n")
        formats.write_graph(gen_tree(args.seed, args.n), out)
    elif fam == "interval":
        if args.n is None or args.k is None:
            raise UsageError("interval needs --n and --k")
        g, pd = gen_interval_graph(args.seed, args.n, args.k)
        formats.write_graph(g, out)
        aux = stem.with_suffix(".pd")
        formats.write_pd(pd, aux)
        written.append(aux)
    elif fam == "stretch":
        if args.base is None or args.k is None or args.p is None:
            raise UsageError("stretch needs --base, --k and --p")
        formats.write_graph(stretch(_parse_base(args.base), StretchParams(args.k, args.p)), out)
    elif fam == "points":
        if args.n is None:
            raise UsageError("points needs --n")
        if args.mode == UNIT_BALL:
            g, pts = gen_unit_ball_points(args.seed, args.n, args.box, args.d)
            emb = Embedding(args.d, 1.0, pts, UNIT_BALL)
        else:
            g, pts = gen_separated_points(args.seed, args.n, args.box, args.d, args.C)
            emb = Embedding(args.d, args.C, pts, SEPARATION)
        formats.write_graph(g, out)
        aux = stem.with_suffix(".pts")
        formats.write_points(emb, aux)
        written.append(aux)
    return written


def _scheme_params(args: argparse.Namespace) -> dict:
    allowed, required = SCHEMES[args.scheme]
    given = {k for k in ("p", "g", "q", "m", "k", "root", "top_factor", "subdivide_heavy") if getattr(args, k) is not None}
    extra = given - allowed
    if extra:
        raise UsageError(f"scheme {args.scheme} does not take {', '.join('--' + x for x in sorted(extra))}")
    missing = required - given
    if missing:
        raise UsageError(f"scheme {args.scheme} needs {', '.join('--' + x for x in sorted(missing))}")
    if args.scheme in AUX_REQUIRED and args.aux is None:
        raise UsageError(f"scheme {args.scheme} needs a {AUX_REQUIRED[args.scheme]} file")
    if args.scheme not in AUX_REQUIRED and args.aux is not None:
        raise UsageError(f"scheme {args.scheme} takes no auxiliary file")
    return {k: getattr(args, k) for k in given}


def _run_scheme(args: argparse.Namespace, params: dict, g, aux, r: float):
    s = args.scheme
    heavy = bool(params.get("subdivide_heavy", False))
    if s == "banana":
        return annulus_cover(g, params.get("root", 0), r, params["q"], params["p"], params.get("m", 2))
    if s == "k3p":
        return k3p_cover(g, params["p"], r, heavy)
    if s == "planar":
        return planar_cover(g, r, heavy)
    if s == "genus":
        return genus_cover(g, params["g"], r, heavy)
    if s == "pathwidth":
        return pw_cover(g, aux, r, params.get("top_factor", 100.0))
    if s in ("geometric", "unit-ball"):
        want = SEPARATION if s == "geometric" else UNIT_BALL
        if aux.mode != want:
            raise UsageError(f"scheme {s} needs a {want} point file, got {aux.mode}")
        return geometric_cover(g, aux, r)
    return chordal_scheme(g, r)


def _r_tag(r: float) -> str:
    return str(int(r)) if float(r).is_integer() else repr(float(r)).replace(".", "p")


def cmd_cover(args: argparse.Namespace) -> int:
    params = _scheme_params(args)
    g = formats.read_graph(args.graph)
    aux = None
    if args.scheme == "pathwidth":
        aux = formats.read_pd(args.aux)
        if args.k is not None and aux.width > args.k:
            raise UsageError(f"decomposition has width {aux.width} > --k {args.k}")
    elif args.scheme in ("geometric", "unit-ball"):
        aux = formats.read_points(args.aux)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    check = args.verify or args.strict or args.csv is not None
    oracle = DistanceOracle(g) if check else None
    rows, status = [], EXIT_OK
    for r in args.r:
        cover = _run_scheme(args, params, g, aux, r)
        extra = None
        if check:
            report = verify_cover(cover, oracle)
            rows.append(sweep_row(cover, report, g.edge_count))
            extra = {"verification": report.to_dict()}
            if not report.passed:
                status = EXIT_FAIL
                print(f"r={r}: verification failed: {[k for k, v in report.checks.items() if not v]}", file=sys.stderr)
                if args.strict:
                    continue
        path = out_dir / f"{Path(args.graph).stem}.{args.scheme}.r{_r_tag(r)}.json"
        formats.write_cover(cover, path, extra)
        print(path)
    if args.csv:
        Path(args.csv).write_text(sweep_csv(rows))
    return status if (args.verify or args.strict) else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = formats.read_graph(args.graph)
    oracle = DistanceOracle(g)
    reports, rows = [], []
    for path in args.covers:
        cover = formats.read_cover(path)
        if cover.n != g.vertex_count:
            raise GraphInputError(f"{path}: cover is for {cover.n} vertices, graph has {g.vertex_count}")
        report = verify_cover(cover, oracle)
        doc = report.to_dict()
        doc["file"] = str(path)
        doc["scheme"] = cover.certificate.scheme_name
        doc["r"] = cover.certificate.scale_r
        reports.append(doc)
        rows.append(sweep_row(cover, report, g.edge_count))
    print(json.dumps(reports if len(reports) > 1 else reports[0], sort_keys=True, indent=2))
    if args.csv:
        Path(args.csv).write_text(sweep_csv(rows))
    return EXIT_OK if all(d["passed"] for d in reports) else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            for path in cmd_gen(args):
                print(path)
            return EXIT_OK
        if args.command == "cover":
            return cmd_cover(args)
        return cmd_verify(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (GraphInputError, ProviderContractError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
