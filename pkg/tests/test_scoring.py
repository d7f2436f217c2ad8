import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from helpers import vertex_keys
from stablecomp import (
    InternalInvariant,
    PointCloud,
    analyze_graph,
    analyze_string,
    build_hierarchy_2d,
    compute_distance_matrix,
    pi0_grid,
    pi0_string,
    score_component,
    score_layer,
    score_report,
    stability_measure,
)
from stablecomp.scoring import stability_measures


@pytest.fixture
def x4_vr(x4_dm):
    return analyze_string(pi0_string(pi0_grid(x4_dm), "vr"), min_score=3)


def _by_members(ha, members):
    g = ha.graph
    for P in ha.components:
        if set(g.members(P.vertices[0]).tolist()) == set(members):
            return P
    raise LookupError(members)


def test_zeta_on_seven_chain(x4_vr):
    P = _by_members(x4_vr, [3])
    assert stability_measure(3, P) == 4
    assert stability_measure(0, P) == 0
    with pytest.raises(IndexError):
        stability_measure(4, P)


def test_final_chain_score(x4_vr):
    assert score_component(_by_members(x4_vr, [0, 1, 2, 3])) == 12


def test_x4_vr_scores(x4_vr):
    scores = {tuple(sorted(c.zeta)): c.score for c in x4_vr.scores.components}
    assert scores == {(0,): 1, (1,): 1, (2,): 2, (3,): 4, (0, 1): 2, (0, 1, 2): 6, (0, 1, 2, 3): 12}
    assert sum(scores.values()) == 28


def test_x4_vr_layer_score(x4_vr):
    L = next(L for L in x4_vr.layers if L.member_set == {0, 1, 2})
    assert score_layer(L) == 6


def test_x4_vr_noise(x4_vr):
    g = x4_vr.graph
    noise = [set(g.members(x4_vr.components[j].vertices[0]).tolist()) for j in x4_vr.scores.noise_ids]
    assert noise == [{0}, {1}, {2}, {0, 1}]
    assert x4_vr.scores.noise_ids == [0, 1, 2, 4]


def test_report_sorted_descending(x4_vr):
    s = [c.score for c in x4_vr.scores.components]
    assert s == sorted(s, reverse=True)
    assert x4_vr.scores.score_of(x4_vr.scores.components[0].id) == 12


def test_x4_2d_scores(x4_dm):
    ha = analyze_graph(build_hierarchy_2d(pi0_grid(x4_dm)))
    assert sorted(c.score for c in ha.scores.components) == [1, 1, 2, 2, 4, 60]
    big = ha.scores.components[0]
    assert big.score == 60 and big.layer_ids == [5, 6, 7, 8, 9, 10]


def test_additivity_failure_is_reported(x4_dm):
    ha = analyze_string(pi0_string(pi0_grid(x4_dm), "vr"))
    bad = dict(ha.decomposition)
    bad[6] = []
    with pytest.raises(InternalInvariant):
        score_report(ha.components, ha.layers, decomposition=bad)


lattice = st.lists(
    st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=8, unique=True
)


@settings(max_examples=40, deadline=None)
@given(lattice)
def test_scores_match_oracle(points):
    dm = compute_distance_matrix(PointCloud(points))
    ha = analyze_graph(build_hierarchy_2d(pi0_grid(dm)))
    keys = vertex_keys(ha.graph)
    for P in ha.components:
        vs = [keys[v] for v in P.vertices.tolist()]
        assert score_component(P) == oracles.score(vs)
        z = stability_measures(P)
        assert z.tolist() == [oracles.zeta(x, vs) for x in range(dm.N)]
        assert int(z.sum()) == score_component(P)


@settings(max_examples=40, deadline=None)
@given(lattice)
def test_vr_total_score(points):
    dm = compute_distance_matrix(PointCloud(points))
    grid = pi0_grid(dm)
    ha = analyze_string(pi0_string(grid, "vr"))
    total = sum(c.score for c in ha.scores.components)
    assert total == dm.N * grid.shape[0]


def test_min_score_threshold_is_strict(x4_dm):
    ha = analyze_string(pi0_string(pi0_grid(x4_dm), "vr"), min_score=2)
    assert all(c.noise == (c.score < 2) for c in ha.scores.components)
    assert len(ha.scores.noise_ids) == 2
    ha = analyze_string(pi0_string(pi0_grid(x4_dm), "vr"))
    assert ha.scores.noise_ids == []
