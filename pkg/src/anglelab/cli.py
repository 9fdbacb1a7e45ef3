"""Command-line front end: reproducible experiments over clouds and grids.

Exit codes: 0 = witness found / certificate positive; 1 = no witness or
negative certificate; 2 = invalid input; 3 = computation budget exceeded.
Identical invocations produce byte-identical JSON and CSV output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .anglefind import (
    almost_regular_triangle,
    near_extreme_witness,
    near_right_witness,
)
from .content import (
    DEFAULT_CELL_BUDGET,
    DyadicGrid,
    dyadic_content,
    from_points,
    microset_zoom,
)
from .dimension import _normalize_unit, minkowski_dimension_estimate
from .errors import AngleLabError, BudgetExceeded
from .geom import (
    AngleInterval,
    PointCloud,
    _total_triples,
    angle_spectrum,
    spectrum_hits,
)
from .ifs import (
    DEFAULT_POINT_BUDGET,
    avoidance_certificate,
    gasket_ifs,
    iterate_cloud,
    rectangle_in,
)

_EPILOG = (
    "The environment variable ANGLELAB_THREADS caps internal parallelism; "
    "it is applied when the package is first imported."
)


def _load_cloud(path: str) -> PointCloud:
    text = Path(path).read_text()
    if path.endswith(".csv"):
        return PointCloud.from_csv(text)
    return PointCloud.from_json_dict(json.loads(text))


def _load_grid(path: str) -> DyadicGrid:
    return DyadicGrid.from_json_dict(json.loads(Path(path).read_text()))


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _svg_scatter(
    points: np.ndarray,
    highlights: list[tuple[float, float]],
    segments: list[tuple[tuple[float, float], tuple[float, float]]],
) -> str:
    """Scatter plot of a planar cloud with witness points and segments.

    The y axis is flipped so larger y is drawn higher, as on paper.
    """
    size, margin = 640.0, 24.0
    stack = [points] if len(points) else []
    if highlights:
        stack.append(np.asarray(highlights, dtype=float))
    allpts = np.vstack(stack)
    lo = allpts.min(axis=0)
    extent = float((allpts.max(axis=0) - lo).max())
    scale = (size - 2.0 * margin) / max(extent, 1e-12)

    def place(p) -> tuple[str, str]:
        x = margin + (float(p[0]) - lo[0]) * scale
        y = size - margin - (float(p[1]) - lo[1]) * scale
        return _fmt(x), _fmt(y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(size)}"'
        f' height="{_fmt(size)}" viewBox="0 0 {_fmt(size)} {_fmt(size)}">',
        f'<rect width="{_fmt(size)}" height="{_fmt(size)}" fill="white"/>',
    ]
    for p in points:
        x, y = place(p)
        parts.append(f'<circle cx="{x}" cy="{y}" r="2" fill="#4682b4"/>')
    for a, b in segments:
        xa, ya = place(a)
        xb, yb = place(b)
        parts.append(
            f'<line x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}"'
            ' stroke="#d62728" stroke-width="1.5"/>'
        )
    for p in highlights:
        x, y = place(p)
        parts.append(
            f'<circle cx="{x}" cy="{y}" r="4.5" fill="none"'
            ' stroke="#d62728" stroke-width="2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _require_planar(cloud: PointCloud) -> None:
    if cloud.dimension != 2:
        raise AngleLabError("svg output is only available for 2-dimensional clouds")


def _triple_segments(points: list) -> list:
    apex, arm1, arm2 = points
    return [(tuple(apex), tuple(arm1)), (tuple(apex), tuple(arm2))]


def _ring_segments(points: list) -> list:
    ring = [tuple(p) for p in points]
    return [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]


def _emit(args, code: int, payload: dict, svg: str | None = None, csv: str | None = None) -> int:
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif args.format == "csv":
        if csv is None:
            raise AngleLabError(f"csv output is not defined for '{args.command}'")
        text = csv
    else:
        if svg is None:
            raise AngleLabError(f"svg output is not defined for '{args.command}'")
        text = svg
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def _cmd_gasket(args) -> int:
    ifs = gasket_ifs(args.n, args.delta)
    cloud = iterate_cloud(ifs, args.depth, ifs.centers(), budget=args.budget)
    svg = None
    if args.format == "svg":
        _require_planar(cloud)
        svg = _svg_scatter(cloud.points, [], [])
    return _emit(args, 0, cloud.to_json_dict(), svg=svg, csv=cloud.to_csv())


def _cmd_certify(args) -> int:
    cert = avoidance_certificate(args.n, args.delta, AngleInterval(args.alpha, args.window))
    return _emit(args, 0 if cert.certified else 1, cert.to_json_dict())


def _cmd_spectrum(args) -> int:
    cloud = _load_cloud(args.cloud)
    window = AngleInterval(args.alpha, args.window)
    witness = spectrum_hits(cloud, window, budget=args.budget, seed=args.seed)
    pairs = angle_spectrum(cloud, budget=args.budget, seed=args.seed)
    angles = np.array([a for a, _ in pairs], dtype=float)
    counts, edges = np.histogram(angles, bins=np.linspace(0.0, 180.0, 37))
    total = _total_triples(len(cloud))
    payload = {
        "window": [window.lo, window.hi],
        "exhaustive": args.budget is None or args.budget >= total,
        "total_triples": total,
        "scanned": len(pairs),
        "witness": None
        if witness is None
        else witness.to_json_dict(
            "spectrum", {"alpha": args.alpha, "radius": args.window}
        ),
        "histogram": [
            [float(edges[i]), float(edges[i + 1]), int(counts[i])]
            for i in range(len(counts))
        ],
    }
    svg = None
    if args.format == "svg":
        _require_planar(cloud)
        if witness is None:
            svg = _svg_scatter(cloud.points, [], [])
        else:
            pts = [witness.apex, witness.arm1, witness.arm2]
            svg = _svg_scatter(cloud.points, pts, _triple_segments(pts))
    return _emit(args, 0 if witness is not None else 1, payload, svg=svg)


def _cmd_minkdim(args) -> int:
    cloud = _load_cloud(args.cloud)
    est = minkowski_dimension_estimate(cloud, args.kmin, args.kmax)
    return _emit(args, 0, est.to_json_dict())


def _cmd_triangle(args) -> int:
    cloud = _load_cloud(args.cloud)
    witness = almost_regular_triangle(cloud, args.delta)
    if witness is None:
        payload = {
            "kind": "triangle",
            "points": None,
            "metric": None,
            "params": {"delta": args.delta},
        }
        svg = None
        if args.format == "svg":
            _require_planar(cloud)
            svg = _svg_scatter(cloud.points, [], [])
        return _emit(args, 1, payload, svg=svg)
    payload = witness.to_json_dict({"delta": args.delta})
    svg = None
    if args.format == "svg":
        _require_planar(cloud)
        pts = list(witness.vertices)
        svg = _svg_scatter(cloud.points, pts, _ring_segments(pts))
    return _emit(args, 0, payload, svg=svg)


def _cmd_rightangle(args) -> int:
    cloud = _load_cloud(args.cloud)
    witness = near_right_witness(cloud, args.k, args.l)
    svg = None
    if args.format == "svg":
        _require_planar(cloud)
        pts = [witness.triple.apex, witness.triple.arm1, witness.triple.arm2]
        svg = _svg_scatter(cloud.points, pts, _triple_segments(pts))
    return _emit(args, 0, witness.to_json_dict(), svg=svg)


def _cmd_extreme(args) -> int:
    cloud = _load_cloud(args.cloud)
    witness = near_extreme_witness(cloud, args.target)
    payload = witness.to_json_dict("extreme", {"target": args.target})
    svg = None
    if args.format == "svg":
        _require_planar(cloud)
        pts = [witness.apex, witness.arm1, witness.arm2]
        svg = _svg_scatter(cloud.points, pts, _triple_segments(pts))
    return _emit(args, 0, payload, svg=svg)


def _cmd_rectangle(args) -> int:
    ifs = gasket_ifs(args.n, args.delta)
    witness = rectangle_in(ifs, args.f, args.g, args.depth, budget=args.budget)
    params = {
        "n": args.n,
        "delta": args.delta,
        "f": args.f,
        "g": args.g,
        "depth": args.depth,
    }
    svg = None
    if args.format == "svg":
        cloud = iterate_cloud(ifs, args.depth, ifs.centers(), budget=args.budget)
        _require_planar(cloud)
        pts = list(witness.corners)
        svg = _svg_scatter(cloud.points, pts, _ring_segments(pts))
    return _emit(args, 0, witness.to_json_dict(params), svg=svg)


def _cmd_content(args) -> int:
    grid = _load_grid(args.grid)
    result = dyadic_content(grid, args.s)
    return _emit(args, 0, result.to_json_dict())


def _cmd_zoom(args) -> int:
    grid = _load_grid(args.grid)
    result = microset_zoom(grid, args.s, args.delta)
    payload = result.to_json_dict()
    payload["params"] = {
        "s": args.s,
        "delta": args.delta,
        "threshold": 2.0 ** (-args.s - 2.0),
    }
    return _emit(args, 0 if result.passes_claim else 1, payload)


def _cmd_rasterize(args) -> int:
    cloud = _load_cloud(args.cloud)
    if args.normalize:
        cloud = PointCloud(_normalize_unit(cloud.points))
    grid = from_points(cloud, args.m, budget=args.budget)
    return _emit(args, 0, grid.to_json_dict())


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="anglelab",
        description="Self-similar clouds with angle gaps, and witness searches in finite clouds.",
        epilog=_EPILOG,
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text, epilog=_EPILOG)
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument(
            "--format",
            choices=("json", "csv", "svg"),
            default="json",
            help="output format (csv/svg only where defined; svg needs d=2)",
        )
        return p

    p = add("gasket", "generate a gasket iterate as a point cloud")
    p.add_argument("--n", type=int, required=True, help="ambient simplex dimension")
    p.add_argument("--delta", type=float, required=True, help="contraction ratio")
    p.add_argument("--depth", type=int, required=True, help="iteration depth")
    p.add_argument("--budget", type=int, default=DEFAULT_POINT_BUDGET)

    p = add("certify", "certify that an angle window is avoided at every depth")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True, help="window center, degrees")
    p.add_argument("--window", type=float, required=True, help="window radius, degrees")

    p = add("spectrum", "scan a cloud's apex angles against a window")
    p.add_argument("--cloud", required=True, help="cloud file (.json or .csv)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--window", type=float, required=True)
    p.add_argument("--budget", type=int, default=None, help="triple sample budget")
    p.add_argument("--seed", type=int, default=0)

    p = add("minkdim", "estimate the upper Minkowski dimension of a cloud")
    p.add_argument("--cloud", required=True)
    p.add_argument("--kmin", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)

    p = add("triangle", "find an almost-regular triangle")
    p.add_argument("--cloud", required=True)
    p.add_argument("--delta", type=float, required=True)

    p = add("rightangle", "find a near-right angle by projection")
    p.add_argument("--cloud", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)

    p = add("extreme", "find the smallest or largest angle")
    p.add_argument("--cloud", required=True)
    p.add_argument("--target", choices=("zero", "straight"), required=True)

    p = add("rectangle", "find a near-rectangle from two gasket maps")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--f", type=int, required=True, help="first map index")
    p.add_argument("--g", type=int, required=True, help="second map index")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_POINT_BUDGET)

    p = add("content", "minimal dyadic-cover content of a grid")
    p.add_argument("--grid", required=True, help="grid file (.json)")
    p.add_argument("--s", type=float, required=True, help="content exponent")

    p = add("zoom", "zoom into the densest admissible cube of a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)

    p = add("rasterize", "mark the dyadic cells occupied by a cloud")
    p.add_argument("--cloud", required=True)
    p.add_argument("--m", type=int, required=True, help="subdivision levels")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.add_argument(
        "--normalize",
        action="store_true",
        help="translate to the origin and shrink into the unit cube first",
    )

    return top


_HANDLERS = {
    "gasket": _cmd_gasket,
    "certify": _cmd_certify,
    "spectrum": _cmd_spectrum,
    "minkdim": _cmd_minkdim,
    "triangle": _cmd_triangle,
    "rightangle": _cmd_rightangle,
    "extreme": _cmd_extreme,
    "rectangle": _cmd_rectangle,
    "content": _cmd_content,
    "zoom": _cmd_zoom,
    "rasterize": _cmd_rasterize,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except BudgetExceeded as exc:
        print(f"anglelab: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (AngleLabError, OSError, KeyError, ValueError) as exc:
        print(f"anglelab: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
