"""End-to-end pipeline: distances to scored stable components and layers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .components import Pi0Grid, Pi0String, pi0_grid, pi0_string
from .geometry import (
    DegreeProfile,
    DistanceMatrix,
    PhaseChangeSequence,
    degree_profile,
    phase_change_numbers,
)
from .hierarchy import (
    HierarchyGraph,
    StableComponent,
    analyze_hierarchy,
    build_hierarchy_1d,
    build_hierarchy_2d,
)
from .layers import Layer, decompose_all, extract_layers, layer_graph
from .scoring import ScoreReport, score_report


@dataclass
class HierarchyAnalysis:
    """Stable components, layers and scores of one hierarchy graph."""

    graph: HierarchyGraph = field(repr=False)
    components: list[StableComponent] = field(repr=False)
    layers: list[Layer] = field(repr=False)
    decomposition: dict = field(repr=False)
    scores: ScoreReport = field(repr=False)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def n_layers(self) -> int:
        return len(self.layers)


def analyze_graph(g: HierarchyGraph, min_score: int | None = None) -> HierarchyAnalysis:
    g, comps = analyze_hierarchy(g)
    g = layer_graph(g)
    layers = extract_layers(g)
    decomposition = decompose_all(comps, layers)
    scores = score_report(comps, layers, min_score, decomposition)
    return HierarchyAnalysis(g, comps, layers, decomposition, scores)


def analyze_string(string: Pi0String, min_score: int | None = None) -> HierarchyAnalysis:
    return analyze_graph(build_hierarchy_1d(string), min_score)


@dataclass
class Analysis:
    dm: DistanceMatrix = field(repr=False)
    pcs: PhaseChangeSequence
    dp: DegreeProfile = field(repr=False)
    grid: Pi0Grid = field(repr=False)
    grid_analysis: HierarchyAnalysis
    vr_analysis: HierarchyAnalysis
    dimension: int | None = None


def analyze(
    dm: DistanceMatrix,
    *,
    k_max: int | None = None,
    max_scales: int | None = None,
    min_score: int | None = None,
    threads: int = 1,
    dimension: int | None = None,
) -> Analysis:
    """Run the full 2-D analysis plus the Vietoris-Rips (``k = 0``) string."""
    pcs = phase_change_numbers(dm)
    dp = degree_profile(dm, pcs)
    grid = pi0_grid(dm, dp, pcs, k_max=k_max, max_scales=max_scales, threads=threads)
    grid_analysis = analyze_graph(build_hierarchy_2d(grid), min_score)
    vr_analysis = analyze_string(pi0_string(grid, "vr"), min_score)
    return Analysis(dm, pcs, dp, grid, grid_analysis, vr_analysis, dimension)
