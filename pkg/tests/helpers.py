"""Random instances and translation from package objects to oracle keys."""

import numpy as np

from stablecomp import PointCloud, compute_distance_matrix

X4 = np.array([[0.0], [1.0], [3.0], [7.0]])


def random_cloud(rng, N=None, n=None, kind=None):
    """A point cloud with ``N <= 12`` points in dimension ``n <= 3``.

    ``lattice`` clouds have many tied distances; ``uniform`` ones almost
    never do.
    """
    N = int(rng.integers(1, 13)) if N is None else N
    n = int(rng.integers(1, 4)) if n is None else n
    kind = kind or ("lattice" if rng.random() < 0.5 else "uniform")
    if kind == "uniform":
        pts = rng.random((N, n)) * 10
    else:
        side = max(3, int(np.ceil(N ** (1 / n))) + 2)
        flat = rng.choice(side**n, size=N, replace=False)
        pts = np.stack(np.unravel_index(flat, (side,) * n), axis=1).astype(float)
    return PointCloud(pts)


def random_instances(seed, count, **kw):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        pc = random_cloud(rng, **kw)
        yield pc, compute_distance_matrix(pc)


def vertex_keys(g):
    """``(cell, frozenset of members)`` for every vertex of a package graph."""
    cells = g.cells
    return [(tuple(int(t) for t in cells[v]), frozenset(g.members(v).tolist())) for v in range(g.n_vertices)]


def edge_keys(g, mask=None):
    keys = vertex_keys(g)
    return {(keys[a], keys[b], d) for a, b, d in g.edge_list(mask)}


def part_keys(parts, g):
    keys = vertex_keys(g)
    return {frozenset(keys[v] for v in P.vertices.tolist()) for P in parts}


def partition_sets(labels):
    """Blocks of a label vector as a set of frozensets (``-1`` = absent)."""
    groups = {}
    for x, lab in enumerate(np.asarray(labels).tolist()):
        if lab >= 0:
            groups.setdefault(lab, set()).add(x)
    return {frozenset(b) for b in groups.values()}
