"""Hierarchy graphs, branch points, component graphs and stable components.

A hierarchy graph has one vertex per (grid position, block). Positions are
``(a, b)`` pairs into a label tensor of shape ``(A, B, N)``: for a 2-D
grid ``a`` is the scale position and ``b`` the degree; a 1-D string is
stored with ``B == 1``. Horizontal edges run ``a -> a + 1`` and vertical
edges ``b -> b - 1``, each sending a block to the block containing it.

Vertex ids are ordered by ``(a, b, rep)``, so the smallest vertex id of
any subgraph names its earliest cell and smallest representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .components import Component, Pi0Grid, Pi0String
from .errors import InternalInvariant

HORIZONTAL = 0
VERTICAL = 1


@dataclass(frozen=True)
class HVertex:
    id: int
    cell: tuple
    position: tuple
    comp: Component


@dataclass(frozen=True)
class HierarchyGraph:
    """Vertices and edges of a hierarchy graph, plus derived edge subsets.

    ``kept`` (the component graph) and ``layer`` (the layer graph) are
    boolean masks over the edges, filled in by :func:`component_graph` and
    :func:`stablecomp.layers.layer_graph`.
    """

    labels: np.ndarray = field(repr=False)
    pos_cells: np.ndarray = field(repr=False)
    pos: np.ndarray = field(repr=False)
    rep: np.ndarray = field(repr=False)
    size: np.ndarray = field(repr=False)
    keys: np.ndarray = field(repr=False)
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    direction: np.ndarray = field(repr=False)
    dims: int = 2
    hbranch: np.ndarray | None = field(default=None, repr=False)
    vbranch: np.ndarray | None = field(default=None, repr=False)
    kept: np.ndarray | None = field(default=None, repr=False)
    layer: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return self.rep.shape[0]

    @property
    def n_edges(self) -> int:
        return self.src.shape[0]

    @property
    def N(self) -> int:
        return self.labels.shape[2]

    @property
    def cells(self) -> np.ndarray:
        """Grid cell ``(i, k)`` of every vertex."""
        return self.pos_cells[self.pos[:, 0], self.pos[:, 1]]

    @property
    def branch(self) -> np.ndarray:
        if self.hbranch is None:
            raise ValueError("branch points not computed")
        return self.hbranch | self.vbranch

    def find_vertex(self, a: int, b: int, rep: int) -> int:
        A, B, N = self.labels.shape
        key = (a * B + b) * N + rep
        v = int(np.searchsorted(self.keys, key))
        if v >= len(self.keys) or self.keys[v] != key:
            raise KeyError((a, b, rep))
        return v

    def vertex_at(self, a: int, b: int, x: int) -> int | None:
        """Vertex at position ``(a, b)`` whose block contains point ``x``."""
        rep = int(self.labels[a, b, x])
        return None if rep < 0 else self.find_vertex(a, b, rep)

    def members(self, v: int) -> np.ndarray:
        a, b = self.pos[v]
        return np.flatnonzero(self.labels[a, b] == self.rep[v])

    def vertex(self, v: int) -> HVertex:
        a, b = (int(t) for t in self.pos[v])
        cell = tuple(int(t) for t in self.pos_cells[a, b])
        return HVertex(v, cell, (a, b), Component(frozenset(self.members(v).tolist())))

    def member_mask(self, vs: np.ndarray) -> np.ndarray:
        """Boolean matrix ``[j, x]``: point ``x`` lies in the block of ``vs[j]``."""
        vs = np.asarray(vs)
        return self.labels[self.pos[vs, 0], self.pos[vs, 1]] == self.rep[vs][:, None]

    def edge_list(self, mask: np.ndarray | None = None) -> list[tuple[int, int, int]]:
        sel = slice(None) if mask is None else mask
        return list(zip(self.src[sel].tolist(), self.dst[sel].tolist(), self.direction[sel].tolist()))


@dataclass(frozen=True)
class StableComponent:
    """A connected component of the component graph."""

    id: int
    vertices: np.ndarray
    graph: HierarchyGraph = field(repr=False, compare=False)

    def __len__(self) -> int:
        return self.vertices.size

    @property
    def first(self) -> HVertex:
        return self.graph.vertex(int(self.vertices[0]))


def _build(labels: np.ndarray, pos_cells: np.ndarray, dims: int) -> HierarchyGraph:
    A, B, N = labels.shape
    flat = labels.reshape(A * B, N)
    cell_idx, pts = np.nonzero(flat >= 0)
    keys, size = np.unique(cell_idx * N + flat[cell_idx, pts], return_counts=True)
    cell = keys // N
    rep = keys % N
    pos = np.stack([cell // B, cell % B], axis=1)
    vid = np.arange(keys.size)

    srcs, dsts, dirs = [], [], []
    for d, (da, db) in ((HORIZONTAL, (1, 0)), (VERTICAL, (0, -1))):
        ok = (pos[:, 0] + da < A) & (pos[:, 1] + db >= 0)
        if not ok.any():
            continue
        v = vid[ok]
        ta, tb = pos[v, 0] + da, pos[v, 1] + db
        trep = labels[ta, tb, rep[v]]
        if np.any(trep < 0):
            raise InternalInvariant("vertex sets do not nest along the grid")
        tkey = (ta * B + tb) * N + trep
        t = np.searchsorted(keys, tkey)
        srcs.append(v)
        dsts.append(t)
        dirs.append(np.full(v.size, d, dtype=np.int8))
    if srcs:
        src, dst, direction = np.concatenate(srcs), np.concatenate(dsts), np.concatenate(dirs)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        direction = np.zeros(0, dtype=np.int8)
    return HierarchyGraph(labels, pos_cells, pos, rep, size, keys, src, dst, direction, dims)


def build_hierarchy_1d(string: Pi0String) -> HierarchyGraph:
    """Hierarchy graph of a string of partitions (one edge per block)."""
    if len(string) == 0:
        raise ValueError("empty string")
    labels = np.asarray(string.labels)[:, None, :]
    pos_cells = np.asarray(string.cells, dtype=np.int64)[:, None, :]
    return _build(labels, pos_cells, dims=1)


def build_hierarchy_2d(grid: Pi0Grid) -> HierarchyGraph:
    """Hierarchy graph of the full (scale, degree) array with both edge kinds."""
    A, B = grid.shape
    pos_cells = np.empty((A, B, 2), dtype=np.int64)
    pos_cells[:, :, 0] = grid.scale_indices[:, None]
    pos_cells[:, :, 1] = np.arange(B)[None, :]
    return _build(np.asarray(grid.labels), pos_cells, dims=2)


def detect_branch_points(g: HierarchyGraph) -> HierarchyGraph:
    """Flag vertices with two or more in-edges of the same direction."""
    V = g.n_vertices
    hin = np.bincount(g.dst[g.direction == HORIZONTAL], minlength=V)
    vin = np.bincount(g.dst[g.direction == VERTICAL], minlength=V)
    return replace(g, hbranch=hin >= 2, vbranch=vin >= 2)


def component_graph(g: HierarchyGraph) -> HierarchyGraph:
    """Drop every edge that ends in a branch point of either direction."""
    if g.hbranch is None:
        g = detect_branch_points(g)
    return replace(g, kept=~g.branch[g.dst])


def connected_parts(n_vertices: int, src: np.ndarray, dst: np.ndarray) -> list[np.ndarray]:
    """Undirected components, each a sorted vertex array, ordered by smallest vertex."""
    if n_vertices == 0:
        return []
    adj = coo_matrix(
        (np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n_vertices, n_vertices)
    )
    _, lab = connected_components(adj, directed=True, connection="weak")
    order = np.argsort(lab, kind="stable")
    bounds = np.flatnonzero(np.diff(lab[order])) + 1
    parts = np.split(order, bounds)
    parts.sort(key=lambda p: p[0])
    return parts


def stable_components(g: HierarchyGraph) -> list[StableComponent]:
    if g.kept is None:
        g = component_graph(g)
    parts = connected_parts(g.n_vertices, g.src[g.kept], g.dst[g.kept])
    return [StableComponent(j, part, g) for j, part in enumerate(parts)]


def analyze_hierarchy(g: HierarchyGraph) -> tuple[HierarchyGraph, list[StableComponent]]:
    """Branch points, component graph and stable components in one call."""
    g = component_graph(detect_branch_points(g))
    return g, stable_components(g)
