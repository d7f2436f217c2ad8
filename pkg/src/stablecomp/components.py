"""Path components of Vietoris-Rips and Lesnick (degree-Rips) complexes.

Only the 1-skeleton matters for path components, so every partition here
is the set of connected components of a threshold graph, restricted to
the vertices that have enough neighbours. Partitions are stored as label
vectors: ``labels[x]`` is the smallest index in the block of ``x``, or
``-1`` if ``x`` is not a vertex of the complex.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .geometry import (
    DegreeProfile,
    DistanceMatrix,
    PhaseChangeSequence,
    degree_profile,
    phase_change_numbers,
)


class DisjointSet:
    """Union-find over ``0..n-1`` with union by size and path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def __len__(self) -> int:
        return len(self.parent)

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of ``x`` and ``y``; return False if already joined."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def roots(self) -> np.ndarray:
        """Root of every element, resolved with vectorised pointer jumping."""
        par = np.asarray(self.parent)
        while True:
            nxt = par[par]
            if np.array_equal(nxt, par):
                return par
            par = nxt


def _edges(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def sweep_labels(
    n: int,
    us: np.ndarray,
    vs: np.ndarray,
    edge_birth: np.ndarray,
    vertex_birth: np.ndarray,
    checkpoints: Sequence,
) -> np.ndarray:
    """Component labels of a growing graph at ascending checkpoints.

    A vertex exists once ``vertex_birth <= c`` and an edge once
    ``edge_birth <= c``; every edge must be born no earlier than its
    endpoints. Returns an array of shape ``(len(checkpoints), n)``.
    """
    order = np.argsort(edge_birth, kind="stable")
    us, vs, eb = us[order], vs[order], np.asarray(edge_birth)[order]
    ds = DisjointSet(n)
    ids = np.arange(n)
    out = np.full((len(checkpoints), n), -1, dtype=np.int32)
    e = 0
    for row, c in enumerate(checkpoints):
        stop = int(np.searchsorted(eb, c, side="right"))
        for u, v in zip(us[e:stop].tolist(), vs[e:stop].tolist()):
            ds.union(u, v)
        e = max(e, stop)
        present = vertex_birth <= c
        if not present.any():
            continue
        roots = ds.roots()[present]
        rep = np.full(n, n, dtype=np.int64)
        np.minimum.at(rep, roots, ids[present])
        out[row, present] = rep[roots]
    return out


def threshold_labels(d: np.ndarray, scales: Sequence[float]) -> np.ndarray:
    """Vietoris-Rips component labels of ``d`` at arbitrary real scales.

    Scales need not be sorted or be phase changes; row ``j`` of the result
    belongs to ``scales[j]``.
    """
    d = np.asarray(d)
    n = d.shape[0]
    scales = np.asarray(scales, dtype=float)
    order = np.argsort(scales, kind="stable")
    us, vs = _edges(n)
    lab = sweep_labels(n, us, vs, d[us, vs], np.full(n, -np.inf), scales[order])
    out = np.empty_like(lab)
    out[order] = lab
    return out


@dataclass(frozen=True)
class Component:
    """A block of a partition, named by its smallest member."""

    members: frozenset

    @property
    def rep(self) -> int:
        return min(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return x in self.members

    def __repr__(self) -> str:
        return f"Component({sorted(self.members)})"


@dataclass(frozen=True)
class Partition:
    """Partition of the vertex set of the complex at grid cell ``(i, k)``."""

    cell: tuple
    blocks: tuple

    @classmethod
    def from_labels(cls, labels: np.ndarray, cell: tuple) -> "Partition":
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels.tolist()):
            if lab >= 0:
                groups.setdefault(lab, []).append(x)
        blocks = tuple(Component(frozenset(groups[r])) for r in sorted(groups))
        return cls(cell, blocks)

    @property
    def vertices(self) -> frozenset:
        return frozenset().union(*(b.members for b in self.blocks))

    def as_sets(self) -> set:
        return {b.members for b in self.blocks}

    def block_of(self, x: int) -> Component | None:
        for b in self.blocks:
            if x in b.members:
                return b
        return None

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Component]:
        return iter(self.blocks)


@dataclass(frozen=True)
class Pi0Grid:
    """Partitions of ``K_{s_i,k}`` for every retained scale and degree.

    ``labels[a, k]`` is the label vector at scale index
    ``scale_indices[a]`` and degree ``k``. Without subsampling,
    ``scale_indices`` is ``0..p`` and positions coincide with indices.
    """

    labels: np.ndarray
    scale_indices: np.ndarray
    pcs: PhaseChangeSequence

    @property
    def N(self) -> int:
        return self.labels.shape[2]

    @property
    def k_max(self) -> int:
        return self.labels.shape[1] - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape[:2]

    def position(self, i: int) -> int:
        a = int(np.searchsorted(self.scale_indices, i))
        if a >= len(self.scale_indices) or self.scale_indices[a] != i:
            raise IndexError(f"scale index {i} is not part of this grid")
        return a

    def partition(self, i: int, k: int) -> Partition:
        if not 0 <= k <= self.k_max:
            raise IndexError(f"degree {k} out of range 0..{self.k_max}")
        return Partition.from_labels(self.labels[self.position(i), k], (i, k))

    def vertex_set(self, i: int, k: int) -> frozenset:
        return frozenset(np.flatnonzero(self.labels[self.position(i), k] >= 0).tolist())


@dataclass(frozen=True)
class Pi0String:
    """A string of partitions ``F_0 -> F_1 -> ...``.

    ``kind`` is ``"vr"``, ``"fixed_k"`` or ``"fixed_s"``; ``cells[q]`` is
    the grid cell ``(i, k)`` of position ``q``. A ``fixed_s`` string runs
    the degree downwards.
    """

    kind: str
    param: int
    labels: np.ndarray
    cells: tuple

    @property
    def partitions(self) -> list[Partition]:
        return [Partition.from_labels(lab, cell) for lab, cell in zip(self.labels, self.cells)]

    def __len__(self) -> int:
        return self.labels.shape[0]


def _check_scale(pcs: PhaseChangeSequence, i: int) -> None:
    if not 0 <= i <= pcs.p:
        raise IndexError(f"scale index {i} out of range 0..{pcs.p}")


def vr_pi0(dm: DistanceMatrix, i: int, pcs: PhaseChangeSequence | None = None) -> Partition:
    """Components of the Vietoris-Rips complex at scale ``s_i``."""
    pcs = pcs or phase_change_numbers(dm)
    _check_scale(pcs, i)
    lab = threshold_labels(dm.d, [pcs.s[i]])[0]
    return Partition.from_labels(lab, (i, 0))


def lesnick_vertex_set(dp: DegreeProfile, i: int, k: int) -> frozenset:
    """Points with at least ``k`` neighbours (itself excluded) within ``s_i``."""
    if not 0 <= i <= dp.p:
        raise IndexError(f"scale index {i} out of range 0..{dp.p}")
    if k < 0:
        raise ValueError("degree must be non-negative")
    if k >= dp.N:
        return frozenset()
    return frozenset(np.flatnonzero(dp.core[:, k] <= i).tolist())


def _lesnick_row(dp: DegreeProfile, k: int, checkpoints: np.ndarray) -> np.ndarray:
    n = dp.N
    if k >= n:
        return np.full((len(checkpoints), n), -1, dtype=np.int32)
    us, vs = _edges(n)
    core_k = dp.core[:, k]
    birth = np.maximum(dp.scale_index[us, vs], np.maximum(core_k[us], core_k[vs]))
    return sweep_labels(n, us, vs, birth, core_k, checkpoints)


def lesnick_pi0(dm: DistanceMatrix, dp: DegreeProfile, i: int, k: int) -> Partition:
    """Components of the full subcomplex of ``V_{s_i}`` on ``K_{s_i,k}``."""
    if not 0 <= i <= dp.p:
        raise IndexError(f"scale index {i} out of range 0..{dp.p}")
    return Partition.from_labels(_lesnick_row(dp, k, np.array([i]))[0], (i, k))


def subsample_scales(p: int, max_scales: int | None) -> np.ndarray:
    """Evenly spaced scale indices, always keeping ``0`` and ``p``."""
    if max_scales is None or max_scales >= p + 1:
        return np.arange(p + 1)
    if max_scales < 2:
        raise ValueError("max_scales must be at least 2")
    return np.unique(np.round(np.linspace(0, p, max_scales)).astype(np.int64))


def pi0_grid(
    dm: DistanceMatrix,
    dp: DegreeProfile | None = None,
    pcs: PhaseChangeSequence | None = None,
    *,
    k_max: int | None = None,
    max_scales: int | None = None,
    threads: int = 1,
) -> Pi0Grid:
    """Partitions for every cell ``(i, k)``, ``0 <= i <= p``, ``0 <= k <= k_max``.

    Parameters
    ----------
    k_max : int, optional
        Highest degree kept; defaults to ``N - 1`` (rows above are empty).
    max_scales : int, optional
        Keep only this many evenly spaced phase changes (always including
        ``s_0`` and ``s_p``). The retained scales still form a string of
        inclusions, so every downstream construction remains valid.
    threads : int
        Number of degree rows evaluated concurrently.
    """
    pcs = pcs or phase_change_numbers(dm)
    dp = dp or degree_profile(dm, pcs)
    n = dm.N
    k_max = n - 1 if k_max is None else min(k_max, n - 1)
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    scales = subsample_scales(pcs.p, max_scales)
    ks = range(k_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda k: _lesnick_row(dp, k, scales), ks))
    else:
        rows = [_lesnick_row(dp, k, scales) for k in ks]
    labels = np.stack(rows, axis=1)
    labels.setflags(write=False)
    scales.setflags(write=False)
    return Pi0Grid(labels=labels, scale_indices=scales, pcs=pcs)


def pi0_string(grid: Pi0Grid, kind: str, index: int | None = None) -> Pi0String:
    """Extract a 1-parameter string from the grid.

    ``kind="vr"`` is the ``k = 0`` row, ``kind="fixed_k"`` the row of
    degree ``index`` (scales ascending), ``kind="fixed_s"`` the column at
    scale index ``index`` with degree descending. When the grid covers
    every degree, the fixed-s string starts with the empty partition at
    ``k = N``.
    """
    if kind == "vr":
        index = 0
        kind_k = 0
    if kind in ("vr", "fixed_k"):
        k = index if kind == "fixed_k" else kind_k
        if k is None or not 0 <= k <= grid.k_max:
            raise IndexError(f"degree {k} out of range 0..{grid.k_max}")
        labels = np.array(grid.labels[:, k])
        cells = tuple((int(i), k) for i in grid.scale_indices)
        return Pi0String(kind, k, labels, cells)
    if kind == "fixed_s":
        if index is None:
            raise IndexError("fixed_s needs a scale index")
        a = grid.position(index)
        col = grid.labels[a, ::-1]
        ks = list(range(grid.k_max, -1, -1))
        if grid.k_max == grid.N - 1:
            col = np.vstack([np.full((1, grid.N), -1, dtype=col.dtype), col])
            ks = [grid.N] + ks
        cells = tuple((int(index), k) for k in ks)
        return Pi0String(kind, int(index), np.array(col), cells)
    raise ValueError(f"unknown string kind {kind!r}")
