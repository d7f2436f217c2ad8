"""
Four points on a line
=====================

Stable components of the Vietoris-Rips string for X = {0, 1, 3, 7}.
"""

import numpy as np

import stablecomp as sc

X = sc.PointCloud(np.array([0.0, 1.0, 3.0, 7.0]))
dm = sc.compute_distance_matrix(X)

# scales where the partition can change: 0 and every distinct distance
pcs = sc.phase_change_numbers(dm)
print("phase changes:", pcs.s)

# components at each scale
for i in range(pcs.p + 1):
    print(f"s={pcs.s[i]:g}", [sorted(b.members) for b in sc.vr_pi0(dm, i, pcs)])

# the k = 0 row of the grid is the Vietoris-Rips string
grid = sc.pi0_grid(dm)
vr = sc.analyze_string(sc.pi0_string(grid, "vr"), min_score=3)
g = vr.graph
print(g.n_vertices, "vertices,", g.n_edges, "edges")
print("branch points:", [g.vertex(v).cell for v in np.flatnonzero(g.branch)])

# a stable component is a chain between merges; its score adds up block sizes
for c in vr.scores.components:
    P = vr.components[c.id]
    first, last = g.cells[P.vertices[[0, -1]], 0]
    members = g.members(P.vertices[0]).tolist()
    flag = " (noise)" if c.noise else ""
    print(f"{members} from s={pcs.s[first]:g} to s={pcs.s[last]:g}: score {c.score}{flag}")

# each column partitions X, so the scores sum to N * (p + 1)
print("total:", sum(c.score for c in vr.scores.components), "=", X.N * (pcs.p + 1))
