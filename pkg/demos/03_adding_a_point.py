"""
Adding a point
==============

Insert y within a tiny radius of an anchor point and watch the
Vietoris-Rips layers of X survive in Y = X + {y}.
"""

import numpy as np

import stablecomp as sc

rng = np.random.default_rng(5)
X = sc.PointCloud(rng.random((8, 2)))

pcs = sc.phase_change_numbers(sc.compute_distance_matrix(X))
bound = sc.max_tiny_radius(pcs)
print(f"p = {pcs.p}, smallest gap between phase changes = {bound:.4g}")

setup = sc.add_point(X, anchor=2, eps=bound / 4, direction=[1.0, 1.0])
print(f"d(y, x0) = {setup.insertion_distance:.4g}, r = {setup.r:.4g}")

rep = sc.run_perturbation(setup)
for name, check in rep.checks.items():
    print(f"{name:26s} {'ok' if check.ok else 'FAILED'} ({check.checked} cases)")

# where the Y-layer starts inside (s_{i-1}, s_i]
print(rep.counts())
for f in rep.fates[:8]:
    if f.y_layer:
        print(f"{f.members} [{f.s_i:.3f}, {f.s_j:.3f}] -> Y layer from {f.y_layer[0]:.3f}, "
              f"relative start {f.relative_start:.2f}, {f.cls}")
