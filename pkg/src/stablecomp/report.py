"""Serialisation: JSON analysis reports, cluster-tree forests and SVG layer maps."""

from __future__ import annotations

import json
from html import escape

import numpy as np

from .analysis import Analysis, HierarchyAnalysis
from .layers import layer_index, layer_squares

SCHEMA = 1
LEGEND_ROWS = 20


def _members(g, v, compact: bool):
    return None if compact else g.members(v).tolist()


def component_entries(ha: HierarchyAnalysis, compact: bool = False) -> list[dict]:
    """Stable components sorted by score (descending), each with its layers."""
    g = ha.graph
    cells = g.cells
    layers = {}
    for L in ha.layers:
        entry = {
            "id": L.id,
            "rep": L.rep,
            "size": L.size,
            "n_vertices": len(L),
            "score": ha.scores.layer_scores[L.id],
            "squares": [[r.i_lo, r.i_hi, r.k_lo, r.k_hi] for r in layer_squares(L)],
        }
        if not compact:
            entry["members"] = sorted(L.member_set)
        layers[L.id] = entry
    out = []
    for cs in ha.scores.components:
        P = ha.components[cs.id]
        vs = P.vertices
        entry = {
            "id": cs.id,
            "score": cs.score,
            "noise": cs.noise,
            "vertices": np.column_stack([cells[vs], g.rep[vs], g.size[vs]]).tolist(),
            "layers": [layers[j] for j in cs.layer_ids],
        }
        if not compact:
            entry["stability"] = [[x, z] for x, z in sorted(cs.zeta.items())]
        out.append(entry)
    return out


def analysis_report(an: Analysis, compact: bool = False) -> dict:
    """JSON-ready dictionary for a full analysis (round-trips through ``json``)."""
    grid = an.grid
    meta = {
        "N": an.dm.N,
        "n": an.dimension,
        "metric": an.dm.metric,
        "p": an.pcs.p,
        "k_max": grid.k_max,
        "subsampled": bool(len(grid.scale_indices) != an.pcs.p + 1),
        "scale_indices": grid.scale_indices.tolist(),
        "min_score": an.grid_analysis.scores.min_score,
        "n_stable_components": an.grid_analysis.n_components,
        "n_layers": an.grid_analysis.n_layers,
    }
    return {
        "schema": SCHEMA,
        "metadata": meta,
        "phase_changes": an.pcs.s.tolist(),
        "stable_components": component_entries(an.grid_analysis, compact),
        "noise_ids": an.grid_analysis.scores.noise_ids,
        "vr": {
            "n_stable_components": an.vr_analysis.n_components,
            "stable_components": component_entries(an.vr_analysis, compact),
            "noise_ids": an.vr_analysis.scores.noise_ids,
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=1) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


# ---------------------------------------------------------------- trees


def forest(ha: HierarchyAnalysis, s_values: np.ndarray, compact: bool = False) -> list[dict]:
    """Nested tree of the stable components of a 1-D string.

    Each stable component is a chain; its last vertex feeds into the first
    vertex (a branch point) of its parent. Roots are the chains reaching
    the final position.
    """
    g = ha.graph
    comp_of = np.empty(g.n_vertices, dtype=np.int64)
    for P in ha.components:
        comp_of[P.vertices] = P.id
    out_edge = np.full(g.n_vertices, -1, dtype=np.int64)
    out_edge[g.src] = g.dst
    scores = {c.id: c.score for c in ha.scores.components}
    cells = g.cells

    nodes, parent = {}, {}
    for P in ha.components:
        first, last = int(P.vertices[0]), int(P.vertices[-1])
        c0, c1 = cells[first].tolist(), cells[last].tolist()
        node = {
            "id": P.id,
            "rep": int(g.rep[first]),
            "size": int(g.size[first]),
            "score": scores[P.id],
            "start": c0,
            "end": c1,
            "start_s": float(s_values[c0[0]]),
            "end_s": float(s_values[c1[0]]),
            "children": [],
        }
        members = _members(g, first, compact)
        if members is not None:
            node["members"] = members
        nodes[P.id] = node
        nxt = out_edge[last]
        if nxt >= 0:
            parent[P.id] = int(comp_of[nxt])
    roots = []
    for cid in sorted(nodes):
        if cid in parent:
            nodes[parent[cid]]["children"].append(nodes[cid])
        else:
            roots.append(nodes[cid])
    return roots


def _node_label(node: dict, along: str) -> str:
    if "members" in node and len(node["members"]) <= 8:
        what = "{" + ",".join(map(str, node["members"])) + "}"
    else:
        what = f"{{rep={node['rep']}}}"
    if along == "k":
        span = f"k={node['start'][1]}..{node['end'][1]}"
    else:
        span = f"s={node['start_s']:.6g}..{node['end_s']:.6g}"
    return f"{what} size={node['size']} score={node['score']} {span}"


def ascii_forest(roots: list[dict], along: str = "s") -> str:
    """Text dendrogram; ``along`` is ``"s"`` or ``"k"`` for the string direction."""
    lines = []

    def walk(node, prefix, last):
        lines.append(prefix + ("`-- " if last else "|-- ") + _node_label(node, along))
        kids = node["children"]
        for j, child in enumerate(kids):
            walk(child, prefix + ("    " if last else "|   "), j == len(kids) - 1)

    for j, root in enumerate(roots):
        walk(root, "", j == len(roots) - 1)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- svg


def _fill(j: int) -> str:
    return f"hsl({(j * 137.508) % 360:.1f},62%,58%)"


def _stroke(j: int) -> str:
    return f"hsl({(j * 97.3) % 360:.1f},70%,25%)"


def render_svg(an: Analysis, cell: float | None = None) -> str:
    """SVG map of the 2-D grid: one column per retained scale, one row per degree.

    A cell holding several blocks is split into horizontal slices (by
    representative). Slices are filled by layer and outlined in the colour
    of their stable component. Empty cells are drawn unfilled.
    """
    ha = an.grid_analysis
    g = ha.graph
    A, B = an.grid.shape
    if cell is None:
        cell = float(min(28.0, max(4.0, 900.0 / max(A, B))))
    left, top, bottom, legend_w = 70.0, 20.0, 60.0, 260.0
    width = left + A * cell + 20 + legend_w
    height = top + max(B * cell, LEGEND_ROWS * 16 + 20) + bottom
    layer_of = layer_index(ha.layers, g.n_vertices)
    comp_of = np.empty(g.n_vertices, dtype=np.int64)
    for P in ha.components:
        comp_of[P.vertices] = P.id

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}" font-family="monospace" font-size="10">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
    ]

    def y_of(b):
        return top + (B - 1 - b) * cell

    for a in range(A):
        for b in range(B):
            out.append(
                f'<rect x="{left + a * cell:.2f}" y="{y_of(b):.2f}" width="{cell:.2f}" '
                f'height="{cell:.2f}" fill="none" stroke="#dddddd" stroke-width="0.3"/>'
            )
    # vertices are sorted by (a, b, rep), so each cell's vertices are contiguous
    cell_key = g.pos[:, 0] * B + g.pos[:, 1]
    starts = np.flatnonzero(np.r_[True, cell_key[1:] != cell_key[:-1]])
    ends = np.r_[starts[1:], g.n_vertices]
    for s0, s1 in zip(starts.tolist(), ends.tolist()):
        a, b = (int(t) for t in g.pos[s0])
        h = cell / (s1 - s0)
        for j, v in enumerate(range(s0, s1)):
            out.append(
                f'<rect x="{left + a * cell:.2f}" y="{y_of(b) + j * h:.2f}" width="{cell:.2f}" '
                f'height="{h:.2f}" fill="{_fill(int(layer_of[v]))}" '
                f'stroke="{_stroke(int(comp_of[v]))}" stroke-width="0.6">'
                f"<title>i={int(g.pos_cells[a, b, 0])} k={b} rep={int(g.rep[v])} "
                f"size={int(g.size[v])} layer={int(layer_of[v])} component={int(comp_of[v])}</title></rect>"
            )

    step = max(1, int(np.ceil(A / 20)))
    base = top + B * cell
    for a in range(0, A, step):
        i = int(an.grid.scale_indices[a])
        x = left + (a + 0.5) * cell
        out.append(f'<line x1="{x:.2f}" y1="{base:.2f}" x2="{x:.2f}" y2="{base + 4:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{base + 8:.2f}" transform="rotate(60 {x:.2f} {base + 8:.2f})">'
            f"{an.pcs.s[i]:.4g}</text>"
        )
    kstep = max(1, int(np.ceil(B / 20)))
    for b in range(0, B, kstep):
        y = y_of(b) + cell / 2 + 3
        out.append(f'<text x="{left - 6:.2f}" y="{y:.2f}" text-anchor="end">{b}</text>')
    out.append(f'<text x="{left + A * cell / 2:.2f}" y="{height - 6:.2f}" text-anchor="middle">scale s</text>')
    out.append(f'<text x="14" y="{top + B * cell / 2:.2f}" transform="rotate(-90 14 {top + B * cell / 2:.2f})">degree k</text>')

    lx = left + A * cell + 20
    out.append(f'<text x="{lx:.2f}" y="{top + 8:.2f}">layers by score</text>')
    ranked = sorted(ha.layers, key=lambda L: (-ha.scores.layer_scores[L.id], L.id))
    for row, L in enumerate(ranked[:LEGEND_ROWS]):
        y = top + 16 + row * 16
        out.append(f'<rect x="{lx:.2f}" y="{y:.2f}" width="12" height="12" fill="{_fill(L.id)}"/>')
        out.append(
            f'<text x="{lx + 18:.2f}" y="{y + 10:.2f}">'
            f"{escape(f'L{L.id} score={ha.scores.layer_scores[L.id]} size={L.size}')}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
