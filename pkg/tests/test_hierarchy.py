import numpy as np
import pytest

import oracles
from helpers import edge_keys, part_keys, random_instances, vertex_keys
from stablecomp import (
    analyze_hierarchy,
    build_hierarchy_1d,
    build_hierarchy_2d,
    component_graph,
    detect_branch_points,
    pi0_grid,
    pi0_string,
    stable_components,
)
from stablecomp.hierarchy import HORIZONTAL, VERTICAL

F = frozenset


@pytest.fixture
def x4_vr(x4_dm):
    return build_hierarchy_1d(pi0_string(pi0_grid(x4_dm), "vr"))


@pytest.fixture
def x4_2d(x4_dm):
    return build_hierarchy_2d(pi0_grid(x4_dm))


def test_x4_vr_counts(x4_vr):
    # 4 + 3 + 2 + 2 + 1 + 1 + 1 vertices, one out-edge each except at s_p
    assert x4_vr.n_vertices == 14
    assert x4_vr.n_edges == 13
    assert np.all(x4_vr.direction == HORIZONTAL)


def test_x4_vr_branch_points(x4_vr):
    g = detect_branch_points(x4_vr)
    branch = np.flatnonzero(g.branch)
    assert branch.tolist() == [4, 7, 11]
    got = [(g.vertex(v).cell[0], set(g.vertex(v).comp.members)) for v in branch]
    assert got == [(1, {0, 1}), (2, {0, 1, 2}), (4, {0, 1, 2, 3})]


def test_x4_vr_component_graph(x4_vr):
    g = component_graph(x4_vr)
    # each of the three branch points has two in-edges
    assert int((~g.kept).sum()) == 6
    assert int(g.kept.sum()) == 7


def test_x4_vr_stable_components(x4_vr):
    g, comps = analyze_hierarchy(x4_vr)
    got = sorted((sorted(g.members(P.vertices[0]).tolist()), len(P)) for P in comps)
    want = sorted(
        [([0], 1), ([1], 1), ([2], 2), ([3], 4), ([0, 1], 1), ([0, 1, 2], 2), ([0, 1, 2, 3], 3)]
    )
    assert got == want


def test_x4_vr_components_start_at_branch_points(x4_vr):
    g, comps = analyze_hierarchy(x4_vr)
    for P in comps:
        first = int(P.vertices[0])
        if g.pos[first, 0] > 0:
            assert g.branch[first]


def test_x4_2d_out_edges(x4_2d):
    g = x4_2d
    A, B = g.labels.shape[:2]
    for v in range(g.n_vertices):
        a, b = g.pos[v]
        out = g.direction[g.src == v].tolist()
        assert (VERTICAL in out) == (b > 0)
        assert (HORIZONTAL in out) == (a < A - 1)


def test_x4_2d_counts(x4_2d):
    g, comps = analyze_hierarchy(x4_2d)
    assert g.n_vertices == 28
    assert g.n_edges == 38
    assert len(comps) == 6


def test_stable_components_partition_vertices(x4_2d):
    comps = stable_components(x4_2d)
    allv = np.sort(np.concatenate([P.vertices for P in comps]))
    assert np.array_equal(allv, np.arange(x4_2d.n_vertices))
    # ordered by smallest vertex id
    firsts = [int(P.vertices[0]) for P in comps]
    assert firsts == sorted(firsts)


def test_find_vertex_and_vertex_at(x4_2d):
    g = x4_2d
    v = g.vertex_at(2, 1, 2)
    assert set(g.members(v).tolist()) == {0, 1, 2}
    assert g.find_vertex(2, 1, 0) == v
    assert g.vertex_at(0, 1, 0) is None
    with pytest.raises(KeyError):
        g.find_vertex(0, 0, 99)


def _check_against_oracle(g, og):
    assert len(set(vertex_keys(g))) == g.n_vertices
    assert set(vertex_keys(g)) == og.vertices
    assert edge_keys(g) == og.edges
    keys = vertex_keys(g)
    assert {keys[v] for v in np.flatnonzero(g.branch)} == og.branch
    assert edge_keys(g, g.kept) == og.kept


def test_vr_hierarchy_matches_oracle():
    for _, dm in random_instances(11, 40):
        g, comps = analyze_hierarchy(build_hierarchy_1d(pi0_string(pi0_grid(dm), "vr")))
        og = oracles.hierarchy_vr(dm.d)
        _check_against_oracle(g, og)
        assert part_keys(comps, g) == og.components


def test_2d_hierarchy_matches_oracle():
    for _, dm in random_instances(12, 25, N=None):
        if dm.N > 9:
            continue
        g, comps = analyze_hierarchy(build_hierarchy_2d(pi0_grid(dm)))
        og = oracles.hierarchy_2d(dm.d)
        _check_against_oracle(g, og)
        assert part_keys(comps, g) == og.components


def test_fixed_s_string_hierarchy(x4_dm):
    g, comps = analyze_hierarchy(build_hierarchy_1d(pi0_string(pi0_grid(x4_dm), "fixed_s", 2)))
    # {1} at k=2 grows into {0,1,3} at k=1 with a single in-edge, so no
    # branch point: one chain of three vertices, plus {7} appearing at k=0
    got = sorted((sorted(g.members(P.vertices[0]).tolist()), len(P)) for P in comps)
    assert got == [([1], 3), ([3], 1)]
