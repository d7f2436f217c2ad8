"""Stable components and layers of Vietoris-Rips and degree-Rips hierarchies."""

from .analysis import Analysis, HierarchyAnalysis, analyze, analyze_graph, analyze_string
from .components import (
    Component,
    DisjointSet,
    Partition,
    Pi0Grid,
    Pi0String,
    lesnick_pi0,
    lesnick_vertex_set,
    pi0_grid,
    pi0_string,
    threshold_labels,
    vr_pi0,
)
from .errors import (
    DuplicatePoint,
    EmptyInput,
    InputError,
    InternalInvariant,
    NoGap,
    StableCompError,
)
from .geometry import (
    DegreeProfile,
    DistanceMatrix,
    PhaseChangeSequence,
    PointCloud,
    compute_distance_matrix,
    degree_profile,
    load_distance_matrix,
    load_point_cloud,
    phase_change_numbers,
)
from .hierarchy import (
    HierarchyGraph,
    StableComponent,
    analyze_hierarchy,
    build_hierarchy_1d,
    build_hierarchy_2d,
    component_graph,
    detect_branch_points,
    stable_components,
)
from .layers import Layer, Rect, decompose_component, extract_layers, layer_graph, layer_squares
from .perturb import PerturbationSetup, add_point, max_tiny_radius, run_perturbation
from .scoring import score_component, score_layer, score_report, stability_measure

__version__ = "0.1.0"
