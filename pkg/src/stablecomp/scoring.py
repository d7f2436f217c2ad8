"""Combinatorial stability measures and scores.

The score of a set of hierarchy vertices counts pairs (vertex, point in
the vertex's block). It can be read off two ways: per point, by counting
the vertices whose block contains it, or per vertex, by adding block
sizes. Both are computed and required to agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InternalInvariant
from .hierarchy import StableComponent
from .layers import Layer, decompose_all

_CHUNK = 4096


def _point_counts(graph, vertices: np.ndarray) -> np.ndarray:
    """For every point, the number of given vertices whose block holds it."""
    counts = np.zeros(graph.N, dtype=np.int64)
    for start in range(0, vertices.size, _CHUNK):
        counts += graph.member_mask(vertices[start : start + _CHUNK]).sum(axis=0)
    return counts


def stability_measure(x: int, P: StableComponent | Layer) -> int:
    """Number of vertices of ``P`` whose block contains the point ``x``."""
    g = P.graph
    if not 0 <= x < g.N:
        raise IndexError(f"unknown point index {x}")
    vs = P.vertices
    return int(np.count_nonzero(g.labels[g.pos[vs, 0], g.pos[vs, 1], x] == g.rep[vs]))


def stability_measures(P: StableComponent | Layer) -> np.ndarray:
    """``stability_measure(x, P)`` for every point ``x`` at once."""
    return _point_counts(P.graph, P.vertices)


def score_component(P: StableComponent) -> int:
    by_size = int(P.graph.size[P.vertices].sum())
    by_point = int(stability_measures(P).sum())
    if by_size != by_point:
        raise InternalInvariant(
            f"stable component {P.id}: point-wise score {by_point} != block-size score {by_size}"
        )
    return by_size


def score_layer(L: Layer) -> int:
    """Score of a layer: number of vertices times the size of its block."""
    product = len(L) * L.size
    by_size = int(L.graph.size[L.vertices].sum())
    if product != by_size:
        raise InternalInvariant(f"layer {L.id}: {product} != {by_size}")
    return product


@dataclass
class ComponentScore:
    id: int
    score: int
    zeta: dict = field(repr=False)
    layer_ids: list
    noise: bool = False


@dataclass
class ScoreReport:
    """Scores of stable components (sorted by score, descending) and layers."""

    components: list[ComponentScore]
    layer_scores: dict
    min_score: int | None = None

    @property
    def noise_ids(self) -> list[int]:
        return sorted(c.id for c in self.components if c.noise)

    def score_of(self, component_id: int) -> int:
        for c in self.components:
            if c.id == component_id:
                return c.score
        raise KeyError(component_id)


def score_report(
    components: list[StableComponent],
    layers: list[Layer],
    min_score: int | None = None,
    decomposition: dict | None = None,
) -> ScoreReport:
    """Score everything, check additivity over layers, flag low scores as noise.

    A stable component is noise when its score is below ``min_score``.
    """
    if decomposition is None:
        decomposition = decompose_all(components, layers)
    layer_scores = {L.id: score_layer(L) for L in layers}
    entries = []
    for P in components:
        sigma = score_component(P)
        parts = decomposition[P.id]
        total = sum(layer_scores[L.id] for L in parts)
        if total != sigma:
            raise InternalInvariant(
                f"stable component {P.id}: score {sigma} != sum of layer scores {total}"
            )
        zeta = stability_measures(P)
        nz = np.flatnonzero(zeta)
        entries.append(
            ComponentScore(
                id=P.id,
                score=sigma,
                zeta=dict(zip(nz.tolist(), zeta[nz].tolist())),
                layer_ids=[L.id for L in parts],
                noise=min_score is not None and sigma < min_score,
            )
        )
    entries.sort(key=lambda c: (-c.score, c.id))
    return ScoreReport(entries, layer_scores, min_score)
