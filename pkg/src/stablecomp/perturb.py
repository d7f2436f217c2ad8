"""Adding one point close to an existing one, and what it does to layers.

Given ``X`` and ``Y = X + {y}`` with ``d(y, x0) < r`` for a radius ``r``
smaller than every gap between consecutive phase changes of ``X``, the
checks below compare Vietoris-Rips components of ``X`` and ``Y`` on a
finite set of scales. Components only change at phase changes of the
space involved, so evaluating at every phase change of ``X`` and ``Y``
(plus the window end points used by the connectivity check) decides each
statement exactly.

Every check is a proved property. A failure is reported with witnesses
and points to a bug, not to unusual data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .components import Pi0String, threshold_labels
from .errors import DuplicatePoint, InputError, NoGap
from .geometry import (
    METRICS,
    DistanceMatrix,
    PhaseChangeSequence,
    PointCloud,
    compute_distance_matrix,
    phase_change_numbers,
)
from .hierarchy import analyze_hierarchy, build_hierarchy_1d

MAX_WITNESSES = 20


class RadiusTooLarge(InputError):
    def __init__(self, value: float, bound: float):
        self.value = value
        self.bound = bound
        super().__init__(f"insertion distance {value!r} must be below the smallest phase-change gap {bound!r}")


def max_tiny_radius(pcs: PhaseChangeSequence) -> float:
    """Smallest gap ``s_{i+1} - s_i``; insertion radii must stay strictly below it."""
    if pcs.p == 0:
        raise NoGap("a single point has no phase-change gaps")
    return float(np.diff(pcs.s).min())


@dataclass(frozen=True)
class PerturbationSetup:
    X: PointCloud
    Y: PointCloud
    anchor: int
    eps: float
    r: float
    metric: str
    dm_X: DistanceMatrix = field(repr=False)
    dm_Y: DistanceMatrix = field(repr=False)
    pcs_X: PhaseChangeSequence = field(repr=False)
    pcs_Y: PhaseChangeSequence = field(repr=False)

    @property
    def N(self) -> int:
        return self.X.N

    @property
    def y(self) -> np.ndarray:
        return self.Y.points[-1]

    @property
    def y_index(self) -> int:
        return self.X.N

    @property
    def insertion_distance(self) -> float:
        return float(self.dm_Y.d[self.N, self.anchor])


def add_point(
    X: PointCloud,
    anchor: int,
    eps: float,
    direction=None,
    *,
    metric: str = "euclidean",
    r: float | None = None,
) -> PerturbationSetup:
    """Append ``y = X[anchor] + eps * direction`` to ``X``.

    ``direction`` is normalised to unit Euclidean length and defaults to
    the first coordinate axis. The radius ``r`` must satisfy
    ``d(y, x0) < r < max_tiny_radius``; by default it is the midpoint.
    Distances among the points of ``X`` are copied, not recomputed, so the
    phase changes of ``X`` appear bit-exactly among those of ``Y``.
    """
    if not 0 <= anchor < X.N:
        raise InputError(f"anchor {anchor} out of range 0..{X.N - 1}")
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}")
    dm = compute_distance_matrix(X, metric)
    pcs = phase_change_numbers(dm)
    bound = max_tiny_radius(pcs)
    if not eps > 0:
        raise InputError("eps must be positive")
    if eps >= bound:
        raise RadiusTooLarge(eps, bound)
    if direction is None:
        direction = np.eye(X.n)[0]
    direction = np.asarray(direction, dtype=float).reshape(-1)
    if direction.size != X.n:
        raise InputError(f"direction has dimension {direction.size}, expected {X.n}")
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise InputError("direction must be non-zero")
    y = X.points[anchor] + eps * (direction / norm)
    hits = np.flatnonzero(np.all(X.points == y, axis=1))
    if hits.size:
        raise DuplicatePoint(int(hits[0]), X.N)

    N = X.N
    dY = np.zeros((N + 1, N + 1))
    dY[:N, :N] = dm.d
    row = cdist(y[None, :], X.points, metric=METRICS[metric])[0]
    dY[N, :N] = row
    dY[:N, N] = row
    dyx0 = float(row[anchor])
    if dyx0 >= bound:
        raise RadiusTooLarge(dyx0, bound)
    if r is None:
        r = (dyx0 + bound) / 2
    if not dyx0 < r < bound:
        raise InputError(f"radius {r!r} must satisfy {dyx0!r} < r < {bound!r}")
    dm_Y = DistanceMatrix(dY, metric_flag=True, metric=metric)
    return PerturbationSetup(
        X=X,
        Y=PointCloud(np.vstack([X.points, y])),
        anchor=anchor,
        eps=float(eps),
        r=float(r),
        metric=metric,
        dm_X=dm,
        dm_Y=dm_Y,
        pcs_X=pcs,
        pcs_Y=phase_change_numbers(dm_Y),
    )


@dataclass
class CheckResult:
    name: str
    ok: bool = True
    checked: int = 0
    witnesses: list = field(default_factory=list)

    def fail(self, witness: dict) -> None:
        self.ok = False
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "witnesses": self.witnesses}


def _check_setup(setup: PerturbationSetup) -> None:
    if not setup.dm_X.metric_flag:
        raise InputError("point insertion checks need a metric (triangle inequality)")
    bound = max_tiny_radius(setup.pcs_X)
    if not setup.insertion_distance < setup.r < bound:
        raise InputError("setup violates d(y, x0) < r < smallest phase-change gap")


def phase_change_containment(setup: PerturbationSetup) -> CheckResult:
    """Every phase change of ``Y`` lies within ``r`` of a phase change of ``X``."""
    res = CheckResult("phase_change_containment")
    sx = setup.pcs_X.s
    for t in setup.pcs_Y.s.tolist():
        res.checked += 1
        j = int(np.searchsorted(sx, t))
        near = [sx[m] for m in (j - 1, j) if 0 <= m < sx.size]
        if not any(abs(t - v) < setup.r for v in near):
            res.fail({"scale": t, "nearest_x_phase_changes": [float(v) for v in near]})
    return res


def window_samples(setup: PerturbationSetup) -> dict[int, np.ndarray]:
    """Sample scales for each window ``[s_i, s_{i+1} - r)``, ``i >= 1``.

    A window is represented by its left end, its midpoint and every phase
    change of ``Y`` inside it; components are constant between those, so
    this covers the window exactly. The last window is ``[s_p, inf)``.
    """
    sx, sy, r = setup.pcs_X.s, setup.pcs_Y.s, setup.r
    p = setup.pcs_X.p
    out = {}
    for i in range(1, p + 1):
        lo = sx[i]
        hi = sx[i + 1] - r if i < p else np.inf
        inner = sy[(sy > lo) & (sy < hi)]
        pts = [lo, *inner.tolist()]
        pts.append((lo + hi) / 2 if np.isfinite(hi) else lo + r)
        out[i] = np.unique(np.asarray(pts, dtype=float))
    return out


def default_samples(setup: PerturbationSetup) -> np.ndarray:
    parts = [setup.pcs_X.s, setup.pcs_Y.s, *window_samples(setup).values()]
    return np.unique(np.concatenate(parts))


def verify_unjoined_components(setup: PerturbationSetup, scales=None) -> CheckResult:
    """If ``y`` is not in the ``Y``-component of ``x``, the ``X``- and ``Y``-components agree."""
    res = CheckResult("unjoined_components")
    scales = default_samples(setup) if scales is None else np.asarray(scales, dtype=float)
    N = setup.N
    lab_x = threshold_labels(setup.dm_X.d, scales)
    lab_y = threshold_labels(setup.dm_Y.d, scales)
    for s, lx, ly in zip(scales.tolist(), lab_x, lab_y):
        for x in range(N):
            if ly[x] == ly[N]:
                continue
            res.checked += 1
            comp_x = lx == lx[x]
            comp_y = ly[:N] == ly[x]
            if not np.array_equal(comp_x, comp_y):
                res.fail(
                    {
                        "scale": s,
                        "x": x,
                        "component_in_X": np.flatnonzero(comp_x).tolist(),
                        "component_in_Y": np.flatnonzero(ly == ly[x]).tolist(),
                    }
                )
    return res


def _bijection(lx: np.ndarray, ly: np.ndarray, N: int) -> bool:
    """Whether the block map from ``pi0(X)`` to ``pi0(Y)`` is one-to-one and onto."""
    reps_x = np.unique(lx)
    images = ly[reps_x]
    return np.unique(images).size == reps_x.size and set(images.tolist()) == set(ly.tolist())


def verify_window_correspondence(setup: PerturbationSetup) -> tuple[CheckResult, CheckResult]:
    """Connectivity of the points joined to ``y`` and bijectivity on components.

    Checked at every sample of every window ``s_i <= s < s_{i+1} - r``,
    ``i >= 1``.
    """
    conn = CheckResult("joined_connected")
    bij = CheckResult("window_bijection")
    N = setup.N
    dX = setup.dm_X.d
    for i, scales in window_samples(setup).items():
        lab_x = threshold_labels(dX, scales)
        lab_y = threshold_labels(setup.dm_Y.d, scales)
        for s, lx, ly in zip(scales.tolist(), lab_x, lab_y):
            joined = np.flatnonzero(ly[:N] == ly[N])
            conn.checked += 1
            if joined.size == 0:
                conn.fail({"window": i, "scale": s, "reason": "no point of X joined to y"})
            else:
                sub = threshold_labels(dX[np.ix_(joined, joined)], [s])[0]
                if np.any(sub != 0):
                    conn.fail({"window": i, "scale": s, "joined": joined.tolist()})
            bij.checked += 1
            if not _bijection(lx, ly, N):
                bij.fail({"window": i, "scale": s})
    return conn, bij


def verify_phase_change_bijection(setup: PerturbationSetup) -> CheckResult:
    """Components of ``X`` and ``Y`` correspond at every phase change ``s_i``, ``i >= 1``."""
    res = CheckResult("phase_change_bijection")
    sx = setup.pcs_X.s[1:]
    lab_x = threshold_labels(setup.dm_X.d, sx)
    lab_y = threshold_labels(setup.dm_Y.d, sx)
    for s, lx, ly in zip(sx.tolist(), lab_x, lab_y):
        res.checked += 1
        if not _bijection(lx, ly, setup.N):
            res.fail({"scale": s})
    return res


def _block_sizes(labels: np.ndarray) -> np.ndarray:
    """``out[row, x]`` is the size of the block of ``x`` in that row."""
    return (labels[:, :, None] == labels[:, None, :]).sum(axis=2)


def verify_partial_layers(setup: PerturbationSetup) -> dict[str, CheckResult]:
    """Partial layers of ``X`` and ``Y`` between phase changes ``s <= t`` of ``X``.

    Covers the transfer of partial layers when ``y`` stays outside the
    component (any ``s``), when ``y`` is already inside at ``s >= s_1``,
    and the converse for partial layers of ``Y`` containing ``y``.
    """
    sx = setup.pcs_X.s
    N = setup.N
    lab_x = threshold_labels(setup.dm_X.d, sx)
    lab_y = threshold_labels(setup.dm_Y.d, sx)
    size_x = _block_sizes(lab_x)
    size_y = _block_sizes(lab_y)[:, :N]
    y_in = lab_y[:, :N] == lab_y[:, N][:, None]
    names = ("partial_layer_without_y", "partial_layer_with_y", "partial_layer_converse")
    out = {name: CheckResult(name) for name in names}
    P = sx.size
    for a in range(P):
        for b in range(a, P):
            px = size_x[a] == size_x[b]
            py = size_y[a] == size_y[b]
            for x in range(N):
                wit = {"s": float(sx[a]), "t": float(sx[b]), "x": x}
                if not y_in[b, x]:
                    out["partial_layer_without_y"].checked += 1
                    if px[x] and not py[x]:
                        out["partial_layer_without_y"].fail(wit)
                if a >= 1 and y_in[a, x]:
                    out["partial_layer_with_y"].checked += 1
                    out["partial_layer_converse"].checked += 1
                    if px[x] and not py[x]:
                        out["partial_layer_with_y"].fail(wit)
                    if py[x] and not px[x]:
                        out["partial_layer_converse"].fail(wit)
    return out


@dataclass
class LayerFate:
    """What happens to one layer ``(s_i, [x]) -> (s_j, [x])`` of ``X`` inside ``Y``.

    ``cls`` is ``extends_with_y`` when ``y`` already joins the block at
    ``s_i``, ``extends_without_y`` when it has not joined by ``s_j``, and
    ``broken`` otherwise. For the first two, ``y_layer`` is the start and
    end scale of the layer of ``Y`` containing the edge, and the bound
    flags record whether ``s_{i-1} < s <= s_i`` and ``s_j <= t < s_{j+1}``.
    """

    rep: int
    members: list
    i: int
    j: int
    s_i: float
    s_j: float
    cls: str
    excluded: bool = False
    partial_layer: bool | None = None
    y_layer: tuple | None = None
    lower_ok: bool | None = None
    upper_ok: bool | None = None
    relative_start: float | None = None

    @property
    def bounds_ok(self) -> bool | None:
        if self.lower_ok is None:
            return None
        return bool(self.partial_layer and self.lower_ok and self.upper_ok)

    def to_dict(self) -> dict:
        return {
            "rep": self.rep,
            "members": self.members,
            "i": self.i,
            "j": self.j,
            "s_i": self.s_i,
            "s_j": self.s_j,
            "class": self.cls,
            "excluded": self.excluded,
            "partial_layer": self.partial_layer,
            "y_layer": list(self.y_layer) if self.y_layer else None,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "relative_start": self.relative_start,
        }


def _vr_layers(d: np.ndarray, pcs: PhaseChangeSequence):
    """Layers of the Vietoris-Rips string, as (first index, last index, rep, labels)."""
    labels = threshold_labels(d, pcs.s)
    string = Pi0String("vr", 0, labels, tuple((i, 0) for i in range(pcs.s.size)))
    g, comps = analyze_hierarchy(build_hierarchy_1d(string))
    out = []
    for P in comps:
        a = g.pos[P.vertices, 0]
        out.append((int(a.min()), int(a.max()), int(g.rep[P.vertices[0]])))
    return out, labels, g, comps


def classify_layers(setup: PerturbationSetup) -> tuple[list[LayerFate], list[LayerFate], CheckResult]:
    """Classify every layer of ``X`` and check the bounds on the containing ``Y`` layer.

    Returns the fates of layers starting at ``s_1`` or later, the fates of
    layers starting at ``s_0`` (outside the hypothesis, not bound-checked),
    and the bound check result.
    """
    _check_setup(setup)
    sx, sy = setup.pcs_X.s, setup.pcs_Y.s
    N, p = setup.N, setup.pcs_X.p
    x_layers, lab_x, _, _ = _vr_layers(setup.dm_X.d, setup.pcs_X)
    _, lab_y, gy, comps_y = _vr_layers(setup.dm_Y.d, setup.pcs_Y)
    comp_of = np.empty(gy.n_vertices, dtype=np.int64)
    span = []
    for P in comps_y:
        comp_of[P.vertices] = P.id
        a = gy.pos[P.vertices, 0]
        span.append((int(a.min()), int(a.max())))

    res = CheckResult("layer_bounds")
    fates, excluded = [], []
    for i, j, x in x_layers:
        a, b = setup.pcs_Y.index_of(sx[i]), setup.pcs_Y.index_of(sx[j])
        y_at_i = lab_y[a, x] == lab_y[a, N]
        y_at_j = lab_y[b, x] == lab_y[b, N]
        if y_at_i:
            cls = "extends_with_y"
        elif not y_at_j:
            cls = "extends_without_y"
        else:
            cls = "broken"
        fate = LayerFate(
            rep=x,
            members=np.flatnonzero(lab_x[i] == lab_x[i, x]).tolist(),
            i=i,
            j=j,
            s_i=float(sx[i]),
            s_j=float(sx[j]),
            cls=cls,
            excluded=i == 0,
        )
        if i == 0:
            excluded.append(fate)
            continue
        fates.append(fate)
        if cls == "broken":
            continue
        res.checked += 1
        fate.partial_layer = bool(
            np.array_equal(lab_y[a] == lab_y[a, x], lab_y[b] == lab_y[b, x])
        )
        v = gy.vertex_at(a, 0, x)
        lo, hi = span[comp_of[v]]
        s, t = float(sy[lo]), float(sy[hi])
        fate.y_layer = (s, t)
        fate.lower_ok = bool(sx[i - 1] < s <= sx[i])
        fate.upper_ok = bool(sx[j] <= t and (j == p or t < sx[j + 1]))
        fate.relative_start = float((s - sx[i - 1]) / (sx[i] - sx[i - 1]))
        if not fate.bounds_ok:
            res.fail(fate.to_dict())
    return fates, excluded, res


@dataclass
class PerturbationReport:
    setup: PerturbationSetup = field(repr=False)
    fates: list
    excluded: list
    checks: dict

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def counts(self) -> dict:
        out = {"extends_with_y": 0, "extends_without_y": 0, "broken": 0}
        for f in self.fates:
            out[f.cls] += 1
        return out

    def to_dict(self) -> dict:
        st = self.setup
        return {
            "schema": 1,
            "setup": {
                "N": st.N,
                "n": st.X.n,
                "metric": st.metric,
                "anchor": st.anchor,
                "eps": st.eps,
                "r": st.r,
                "y": st.y.tolist(),
                "insertion_distance": st.insertion_distance,
                "max_tiny_radius": max_tiny_radius(st.pcs_X),
                "phase_changes_X": st.pcs_X.s.tolist(),
                "phase_changes_Y": st.pcs_Y.s.tolist(),
            },
            "all_ok": self.all_ok,
            "checks": {name: c.to_dict() for name, c in self.checks.items()},
            "class_counts": self.counts(),
            "fates": [f.to_dict() for f in self.fates],
            "excluded_fates": [f.to_dict() for f in self.excluded],
        }


def run_perturbation(setup: PerturbationSetup) -> PerturbationReport:
    """Run every point-insertion check and classify the layers of ``X``."""
    _check_setup(setup)
    fates, excluded, prop = classify_layers(setup)
    conn, bij = verify_window_correspondence(setup)
    checks = {
        "containment": phase_change_containment(setup),
        "unjoined_components": verify_unjoined_components(setup),
        "joined_connected": conn,
        "window_bijection": bij,
        "phase_change_bijection": verify_phase_change_bijection(setup),
        **verify_partial_layers(setup),
        "layer_bounds": prop,
    }
    return PerturbationReport(setup, fates, excluded, checks)
