"""Command line front end.

Exit codes: 0 success, 2 usage or input error, 3 internal invariant
violation (including a failed point-insertion check).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import report as rpt
from .analysis import analyze, analyze_string
from .components import pi0_grid, pi0_string
from .errors import InputError, InternalInvariant
from .geometry import (
    METRICS,
    compute_distance_matrix,
    degree_profile,
    load_distance_matrix,
    load_point_cloud,
    phase_change_numbers,
)
from .perturb import RadiusTooLarge, add_point, run_perturbation

log = logging.getLogger("stablecomp")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file: one point per row, or an N x N matrix with --distances")
    p.add_argument("--distances", action="store_true", help="treat the input as a distance matrix")
    p.add_argument("--skip-header", action="store_true", help="ignore the first row of the input")
    p.add_argument("--metric", choices=sorted(METRICS), default="euclidean")
    p.add_argument("--output", help="write JSON here instead of standard output")
    p.add_argument("--compact", action="store_true", help="omit member lists from the JSON")
    p.add_argument("--min-score", type=int, default=None, help="flag stable components scoring below this as noise")
    p.add_argument("--max-k", type=int, default=None, help="highest degree k kept in the grid")
    p.add_argument("--max-scales", type=int, default=None, help="keep this many evenly spaced phase changes")
    p.add_argument("--threads", type=int, default=1, help="degree rows evaluated in parallel")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablecomp",
        description="Stable components and layers of Vietoris-Rips and degree-Rips hierarchies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full (scale, degree) analysis with scores")
    _common(p)
    p.add_argument("--svg", help="also write an SVG layer map to this path")

    p = sub.add_parser("tree", help="hierarchy for a fixed degree k (HDBSCAN*-style tree)")
    _common(p)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("ctree", help="hierarchy over k for a fixed scale (cluster-tree analogue)")
    _common(p)
    p.add_argument("--s", type=float, required=True, help="scale, snapped down to a phase change")

    p = sub.add_parser("perturb", help="add a point near an anchor and check layer stability")
    _common(p)
    p.add_argument("--anchor", type=int, required=True)
    p.add_argument("--eps", type=float, required=True, help="distance of the new point from the anchor")
    p.add_argument("--direction", help="comma-separated direction vector (default: first axis)")
    p.add_argument("--radius", type=float, default=None, help="radius r with d(y, x0) < r < smallest gap")
    return parser


def _load(args):
    if args.distances:
        dm = load_distance_matrix(args.input, skip_header=args.skip_header)
        return None, dm
    pc = load_point_cloud(args.input, skip_header=args.skip_header)
    return pc, compute_distance_matrix(pc, args.metric)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    pc, dm = _load(args)
    an = analyze(
        dm,
        k_max=args.max_k,
        max_scales=args.max_scales,
        min_score=args.min_score,
        threads=args.threads,
        dimension=None if pc is None else pc.n,
    )
    log.info(
        "N=%d p=%d grid=%dx%d vertices=%d stable components=%d layers=%d",
        dm.N, an.pcs.p, *an.grid.shape, an.grid_analysis.graph.n_vertices,
        an.grid_analysis.n_components, an.grid_analysis.n_layers,
    )
    _emit(args, rpt.dumps(rpt.analysis_report(an, compact=args.compact)))
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(rpt.render_svg(an))
    return EXIT_OK


def _grid(args, dm):
    pcs = phase_change_numbers(dm)
    dp = degree_profile(dm, pcs)
    grid = pi0_grid(dm, dp, pcs, k_max=args.max_k, max_scales=args.max_scales, threads=args.threads)
    return pcs, grid


def _tree_output(args, kind, param, string, pcs, along) -> int:
    ha = analyze_string(string, args.min_score)
    roots = rpt.forest(ha, pcs.s, compact=args.compact)
    text = rpt.ascii_forest(roots, along=along)
    doc = {
        "schema": rpt.SCHEMA,
        "kind": kind,
        "param": param,
        "phase_changes": pcs.s.tolist(),
        "cells": [list(c) for c in string.cells],
        "n_stable_components": ha.n_components,
        "noise_ids": ha.scores.noise_ids,
        "forest": roots,
        "dendrogram": text,
    }
    _emit(args, rpt.dumps(doc))
    if args.output:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_tree(args) -> int:
    _, dm = _load(args)
    if not 0 <= args.k <= dm.N - 1:
        raise UsageError(f"--k must lie in 0..{dm.N - 1}")
    if args.max_k is not None and args.k > args.max_k:
        raise UsageError("--k exceeds --max-k")
    pcs, grid = _grid(args, dm)
    string = pi0_string(grid, "fixed_k", args.k)
    return _tree_output(args, "fixed_k", args.k, string, pcs, "s")


def cmd_ctree(args) -> int:
    if args.s < 0:
        raise UsageError("--s must be non-negative")
    _, dm = _load(args)
    args.max_scales = None  # the requested scale must be present
    pcs, grid = _grid(args, dm)
    i = pcs.snap(args.s)
    string = pi0_string(grid, "fixed_s", i)
    return _tree_output(args, "fixed_s", i, string, pcs, "k")


def cmd_perturb(args) -> int:
    if args.distances:
        raise UsageError("perturb needs point coordinates, not a distance matrix")
    pc = load_point_cloud(args.input, skip_header=args.skip_header)
    if not 0 <= args.anchor < pc.N:
        raise UsageError(f"--anchor must lie in 0..{pc.N - 1}")
    direction = None
    if args.direction:
        try:
            direction = np.array([float(t) for t in args.direction.split(",")])
        except ValueError:
            raise UsageError("--direction must be comma-separated numbers") from None
    try:
        setup = add_point(pc, args.anchor, args.eps, direction, metric=args.metric, r=args.radius)
    except RadiusTooLarge as exc:
        print(f"error: {exc}; max_tiny_radius bound = {exc.bound:.17g}", file=sys.stderr)
        return EXIT_INPUT
    rep = run_perturbation(setup)
    _emit(args, rpt.dumps(rep.to_dict()))
    if not rep.all_ok:
        failed = [name for name, c in rep.checks.items() if not c.ok]
        print(f"internal check failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "tree": cmd_tree, "ctree": cmd_ctree, "perturb": cmd_perturb}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalInvariant as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
