"""Layer graphs, layers and their covers by rectangles of grid cells."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import InternalInvariant
from .hierarchy import HierarchyGraph, StableComponent, component_graph, connected_parts


@dataclass(frozen=True, order=True)
class Rect:
    """Closed box of grid cells ``[i_lo, i_hi] x [k_lo, k_hi]``."""

    i_lo: int
    i_hi: int
    k_lo: int
    k_hi: int

    def cells(self, scale_indices=None) -> set[tuple[int, int]]:
        """Cells of the box; restrict to retained scales on a subsampled grid."""
        scales = range(self.i_lo, self.i_hi + 1)
        if scale_indices is not None:
            scales = [i for i in scale_indices if self.i_lo <= i <= self.i_hi]
        return {(int(i), k) for i in scales for k in range(self.k_lo, self.k_hi + 1)}


@dataclass(frozen=True)
class Layer:
    """A connected component of the layer graph.

    All of its vertices carry the same block of points, ``member_set``.
    """

    id: int
    vertices: np.ndarray
    graph: HierarchyGraph = field(repr=False, compare=False)

    def __len__(self) -> int:
        return self.vertices.size

    @property
    def rep(self) -> int:
        return int(self.graph.rep[self.vertices[0]])

    @property
    def size(self) -> int:
        """Number of points in the shared block."""
        return int(self.graph.size[self.vertices[0]])

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.graph.members(int(self.vertices[0])).tolist())


def set_preserving_edges(g: HierarchyGraph) -> np.ndarray:
    """Mask of edges whose source and target blocks are equal as point sets.

    Every edge carries an inclusion of blocks, so equality reduces to equal
    size together with the target containing the source representative.
    """
    src, dst = g.src, g.dst
    contains = g.labels[g.pos[dst, 0], g.pos[dst, 1], g.rep[src]] == g.rep[dst]
    return (g.size[src] == g.size[dst]) & contains


def layer_graph(g: HierarchyGraph) -> HierarchyGraph:
    """Keep the set-preserving edges of the component graph.

    In a 1-D string a set-preserving edge never ends in a branch point. In
    a 2-D array it can: a vertical edge may carry a block unchanged into a
    vertex that is a horizontal branch point. Such edges are not component
    graph edges and are left out, so every layer lies inside one stable
    component.
    """
    if g.kept is None:
        g = component_graph(g)
    same = set_preserving_edges(g)
    if g.dims == 1 and np.any(same & ~g.kept):
        raise InternalInvariant("a set-preserving edge of a string ends in a branch point")
    return replace(g, layer=same & g.kept)


def extract_layers(g: HierarchyGraph) -> list[Layer]:
    if g.layer is None:
        g = layer_graph(g)
    parts = connected_parts(g.n_vertices, g.src[g.layer], g.dst[g.layer])
    return [Layer(j, part, g) for j, part in enumerate(parts)]


def layer_index(layers: list[Layer], n_vertices: int) -> np.ndarray:
    """Array mapping each vertex id to the id of its layer."""
    out = np.full(n_vertices, -1, dtype=np.int64)
    for L in layers:
        out[L.vertices] = L.id
    return out


def decompose_component(
    P: StableComponent, layers: list[Layer], layer_of: np.ndarray | None = None
) -> list[Layer]:
    """The layers making up ``P``; their vertex sets partition ``P``."""
    if layer_of is None:
        layer_of = layer_index(layers, P.graph.n_vertices)
    ids = np.unique(layer_of[P.vertices])
    if np.any(ids < 0):
        raise InternalInvariant(f"stable component {P.id} has vertices outside every layer")
    parts = [layers[int(j)] for j in ids]
    total = sum(len(L) for L in parts)
    if total != len(P) or not np.isin(np.concatenate([L.vertices for L in parts]), P.vertices).all():
        raise InternalInvariant(f"layers of stable component {P.id} do not partition it")
    return parts


def decompose_all(components: list[StableComponent], layers: list[Layer]) -> dict[int, list[Layer]]:
    if not components:
        return {}
    layer_of = layer_index(layers, components[0].graph.n_vertices)
    return {P.id: decompose_component(P, layers, layer_of) for P in components}


def _box_sum(prefix: np.ndarray, a0: int, a1: int, b0: int, b1: int) -> int:
    return int(prefix[a1 + 1, b1 + 1] - prefix[a0, b1 + 1] - prefix[a1 + 1, b0] + prefix[a0, b0])


def layer_squares(L: Layer) -> list[Rect]:
    """Cover a layer by rectangles spanned by maximal directed layer paths.

    A directed path runs from ``(a0, b0)`` to ``(a1, b1)`` with ``a0 <= a1``
    and ``b0 >= b1``; inside a layer such a path exists exactly when the
    whole box between the two cells belongs to the layer. Every vertex sits
    on a path from a source (no incoming layer edge) to a sink (no outgoing
    one), so the boxes of reachable source/sink pairs cover the layer.
    Boxes contained in another box are dropped; the cover is not minimal.
    """
    g = L.graph
    pos = g.pos[L.vertices]
    a_min, b_min = pos.min(axis=0)
    occ = np.zeros(tuple(pos.max(axis=0) - (a_min, b_min) + 1), dtype=np.int64)
    occ[pos[:, 0] - a_min, pos[:, 1] - b_min] = 1
    prefix = np.zeros((occ.shape[0] + 1, occ.shape[1] + 1), dtype=np.int64)
    prefix[1:, 1:] = occ.cumsum(0).cumsum(1)

    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[L.vertices] = True
    sel = g.layer & inside[g.src]
    has_in = np.zeros(g.n_vertices, dtype=bool)
    has_out = np.zeros(g.n_vertices, dtype=bool)
    has_in[g.dst[sel]] = True
    has_out[g.src[sel]] = True
    sources = pos[~has_in[L.vertices]] - (a_min, b_min)
    sinks = pos[~has_out[L.vertices]] - (a_min, b_min)

    boxes = set()
    for a0, b0 in sources.tolist():
        for a1, b1 in sinks.tolist():
            if a0 <= a1 and b1 <= b0:
                area = (a1 - a0 + 1) * (b0 - b1 + 1)
                if _box_sum(prefix, a0, a1, b1, b0) == area:
                    boxes.add((a0, a1, b1, b0))
    boxes = sorted(boxes)
    keep = [
        box
        for box in boxes
        if not any(
            o != box and o[0] <= box[0] and box[1] <= o[1] and o[2] <= box[2] and box[3] <= o[3]
            for o in boxes
        )
    ]
    rects = []
    for a0, a1, b0, b1 in keep:
        c0 = g.pos_cells[a0 + a_min, b0 + b_min]
        c1 = g.pos_cells[a1 + a_min, b1 + b_min]
        rects.append(
            Rect(
                int(min(c0[0], c1[0])),
                int(max(c0[0], c1[0])),
                int(min(c0[1], c1[1])),
                int(max(c0[1], c1[1])),
            )
        )
    return rects
