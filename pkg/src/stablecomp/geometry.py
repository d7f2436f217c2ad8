"""Point clouds, distance matrices, phase-change numbers and degree profiles.

Distances are never rounded or merged: two scales are the same phase
change only if the floating point values are bit-identical.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DuplicatePoint, EmptyInput, InputError

METRICS = {
    "euclidean": "euclidean",
    "manhattan": "cityblock",
    "chebyshev": "chebyshev",
}

Source = Union[str, os.PathLike, TextIO, Iterable[str]]


@dataclass(frozen=True)
class PointCloud:
    """An ordered, duplicate-free set of points in R^n."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptyInput("a point cloud needs at least one point")
        if pts.shape[1] == 0:
            raise InputError("points must have dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise InputError("coordinates must be finite")
        _check_distinct(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.N)


def _check_distinct(pts: np.ndarray) -> None:
    # lexsort then compare neighbours; reports the two original indices
    order = np.lexsort(pts.T[::-1])
    srt = pts[order]
    same = np.all(srt[1:] == srt[:-1], axis=1)
    if np.any(same):
        j = int(np.argmax(same))
        a, b = sorted((int(order[j]), int(order[j + 1])))
        raise DuplicatePoint(a, b)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric dissimilarity matrix with zero diagonal.

    ``metric_flag`` records whether the triangle inequality holds; the
    point-insertion checks in :mod:`stablecomp.perturb` require it.
    """

    d: np.ndarray
    metric_flag: bool = True
    metric: str = "precomputed"

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] == 0:
            raise EmptyInput("distance matrix is empty")
        if not np.all(np.isfinite(d)):
            raise InputError("distances must be finite")
        if np.any(np.diag(d) != 0):
            raise InputError("distance matrix diagonal must be zero")
        if not np.array_equal(d, d.T):
            i, j = np.argwhere(d != d.T)[0]
            raise InputError(f"distance matrix not symmetric at ({i}, {j})")
        off = ~np.eye(d.shape[0], dtype=bool)
        if np.any(d[off] < 0):
            raise InputError("distances must be non-negative")
        if np.any(d[off] == 0):
            i, j = np.argwhere((d == 0) & off)[0]
            raise DuplicatePoint(int(min(i, j)), int(max(i, j)))
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def N(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class PhaseChangeSequence:
    """Sorted scales ``0 = s_0 < s_1 < ... < s_p``."""

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        if s.ndim != 1 or s.size == 0 or s[0] != 0:
            raise InputError("phase changes must start with 0")
        if np.any(np.diff(s) <= 0):
            raise InputError("phase changes must be strictly increasing")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def p(self) -> int:
        return self.s.size - 1

    def __len__(self) -> int:
        return self.s.size

    def __getitem__(self, i):
        return self.s[i]

    def index_of(self, value: float) -> int:
        """Index of ``value`` among the phase changes (exact match only)."""
        i = int(np.searchsorted(self.s, value))
        if i > self.p or self.s[i] != value:
            raise KeyError(f"{value!r} is not a phase change")
        return i

    def snap(self, value: float) -> int:
        """Largest index ``i`` with ``s_i <= value``."""
        if value < 0:
            raise InputError("scale must be non-negative")
        return int(np.searchsorted(self.s, value, side="right")) - 1


@dataclass(frozen=True)
class DegreeProfile:
    """Neighbour counts ``deg(x, i)`` over all phase changes.

    Stored compactly: ``scale_index[x, y]`` is the phase-change index of
    ``d(x, y)`` and row ``core[x]`` is that row sorted, so ``core[x, k]``
    is the first scale index at which ``x`` has at least ``k`` neighbours
    (``core[x, 0] == 0``).
    """

    scale_index: np.ndarray
    core: np.ndarray = field(repr=False)
    p: int

    @property
    def N(self) -> int:
        return self.core.shape[0]

    def deg(self, x: int, i: int) -> int:
        if not 0 <= i <= self.p:
            raise IndexError(f"scale index {i} out of range 0..{self.p}")
        return int(np.searchsorted(self.core[x], i, side="right")) - 1

    def degrees(self, i: int) -> np.ndarray:
        """Degrees of all points at scale index ``i``."""
        if not 0 <= i <= self.p:
            raise IndexError(f"scale index {i} out of range 0..{self.p}")
        return np.count_nonzero(self.scale_index <= i, axis=1) - 1

    def __call__(self, x: int, i: int) -> int:
        return self.deg(x, i)


def _read_rows(source: Source, skip_header: bool) -> list[list[str]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return _read_rows(fh, skip_header)
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        lines = source
    else:
        lines = list(source)
    rows = [row for row in csv.reader(lines) if row and any(c.strip() for c in row)]
    if skip_header and rows:
        rows = rows[1:]
    return rows


def _parse_numeric(rows: list[list[str]]) -> np.ndarray:
    if not rows:
        raise EmptyInput("no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"row {r} has {len(row)} fields, expected {width}")
        for c, cell in enumerate(row):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise InputError(f"non-numeric cell {cell!r} at row {r}, column {c}") from None
    return out


def load_point_cloud(source: Source, skip_header: bool = False) -> PointCloud:
    """Read one point per row of comma-separated floats.

    ``source`` may be a path, an open text file or an iterable of lines.
    Row order is preserved; duplicate rows raise :class:`DuplicatePoint`.
    """
    return PointCloud(_parse_numeric(_read_rows(source, skip_header)))


def load_distance_matrix(source: Source, skip_header: bool = False) -> DistanceMatrix:
    """Read an N x N distance matrix; values are used bit-exactly."""
    d = _parse_numeric(_read_rows(source, skip_header))
    if d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got {d.shape}")
    dm = DistanceMatrix(d, metric_flag=True)
    return DistanceMatrix(dm.d, metric_flag=triangle_inequality_holds(dm.d))


def triangle_inequality_holds(d: np.ndarray) -> bool:
    for m in range(d.shape[0]):
        # d(i, j) <= d(i, m) + d(m, j) for all i, j
        if np.any(d > d[:, m][:, None] + d[m, :][None, :]):
            return False
    return True


def compute_distance_matrix(pc: PointCloud, metric: str = "euclidean") -> DistanceMatrix:
    try:
        name = METRICS[metric]
    except KeyError:
        raise InputError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    if pc.N == 1:
        return DistanceMatrix(np.zeros((1, 1)), metric_flag=True, metric=metric)
    d = squareform(pdist(pc.points, metric=name))
    return DistanceMatrix(d, metric_flag=True, metric=metric)


def phase_change_numbers(dm: DistanceMatrix) -> PhaseChangeSequence:
    off = dm.d[~np.eye(dm.N, dtype=bool)]
    return PhaseChangeSequence(np.concatenate(([0.0], np.unique(off))))


def degree_profile(dm: DistanceMatrix, pcs: PhaseChangeSequence | None = None) -> DegreeProfile:
    if pcs is None:
        pcs = phase_change_numbers(dm)
    idx = np.searchsorted(pcs.s, dm.d).astype(np.int64)
    if not np.array_equal(pcs.s[idx], dm.d):
        raise InputError("phase-change sequence does not match the distance matrix")
    idx.setflags(write=False)
    core = np.sort(idx, axis=1)
    core.setflags(write=False)
    return DegreeProfile(scale_index=idx, core=core, p=pcs.p)
