"""
Layers in the scale/degree grid
===============================

Two Gaussian blobs plus a few outliers. The degree parameter k prunes
points with fewer than k neighbours, which keeps outliers from chaining
the blobs together. Writes ``blobs.svg`` next to this script.
"""

import os

import numpy as np

import stablecomp as sc
from stablecomp.report import render_svg

rng = np.random.default_rng(3)
blobs = np.vstack([rng.normal((0, 0), 0.3, (25, 2)), rng.normal((3, 0), 0.3, (25, 2))])
outliers = rng.uniform((-1, -2), (4, 2), (6, 2))
X = sc.PointCloud(np.vstack([blobs, outliers]))

dm = sc.compute_distance_matrix(X)
an = sc.analyze(dm, k_max=10, max_scales=200, min_score=200, dimension=X.n)
ha = an.grid_analysis
print(f"p = {an.pcs.p}, grid {an.grid.shape}, {ha.graph.n_vertices} vertices")
print(f"{ha.n_components} stable components, {ha.n_layers} layers")

# highest scoring stable components and how they split into layers
for c in ha.scores.components[:5]:
    sizes = sorted({L.size for L in ha.decomposition[c.id]}, reverse=True)
    print(f"component {c.id}: score {c.score}, {len(c.layer_ids)} layers, block sizes {sizes[:6]}")

# every layer is a union of boxes in (i, k)
L = max(ha.layers, key=lambda L: ha.scores.layer_scores[L.id])
print("top layer:", L.size, "points,", len(L), "cells")
for r in sc.layer_squares(L)[:4]:
    print(f"  s in [{an.pcs.s[r.i_lo]:.3f}, {an.pcs.s[r.i_hi]:.3f}], k in [{r.k_lo}, {r.k_hi}]")

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "blobs.svg")
with open(out, "w") as fh:
    fh.write(render_svg(an))
print("wrote", out)
