from dataclasses import replace

import numpy as np
import pytest

import oracles
from stablecomp import (
    InputError,
    NoGap,
    PointCloud,
    add_point,
    compute_distance_matrix,
    max_tiny_radius,
    phase_change_numbers,
    run_perturbation,
)
from stablecomp.perturb import (
    RadiusTooLarge,
    classify_layers,
    phase_change_containment,
    verify_phase_change_bijection,
    verify_unjoined_components,
    verify_window_correspondence,
    window_samples,
)


def _pcs(points):
    return phase_change_numbers(compute_distance_matrix(PointCloud(points)))


def test_max_tiny_radius_x4(x4_dm):
    assert max_tiny_radius(phase_change_numbers(x4_dm)) == 1.0


def test_max_tiny_radius_pair():
    assert max_tiny_radius(_pcs([[0.0], [1.0]])) == 1.0


def test_max_tiny_radius_uniform_spacing():
    assert max_tiny_radius(_pcs([[0.0], [0.5], [1.0], [1.5]])) == 0.5


def test_max_tiny_radius_single_point():
    with pytest.raises(NoGap):
        max_tiny_radius(_pcs([[3.0, 1.0]]))


def test_add_point_x4(x4):
    st = add_point(x4, 0, 0.25)
    assert st.y.tolist() == [0.25]
    assert st.Y.N == 5 and st.y_index == 4
    assert st.insertion_distance == 0.25
    assert st.r == pytest.approx((0.25 + 1.0) / 2)
    # distances among X are copied bit for bit
    assert np.array_equal(st.dm_Y.d[:4, :4], st.dm_X.d)


def test_add_point_direction(x4):
    st = add_point(x4, 0, 0.25, direction=[-2.0])
    assert st.y.tolist() == [-0.25]


@pytest.mark.parametrize("eps", [1.0, 1.5])
def test_add_point_radius_too_large(x4, eps):
    with pytest.raises(RadiusTooLarge) as err:
        add_point(x4, 0, eps)
    assert err.value.bound == 1.0


def test_add_point_bad_inputs(x4):
    with pytest.raises(InputError):
        add_point(x4, 9, 0.25)
    with pytest.raises(InputError):
        add_point(x4, 0, 0.0)
    with pytest.raises(InputError):
        add_point(x4, 0, 0.25, r=0.2)
    with pytest.raises(InputError):
        add_point(x4, 0, 0.25, r=1.0)
    with pytest.raises(InputError):
        add_point(x4, 0, 0.25, direction=[0.0])


def test_containment_x4(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    d = st.dm_Y.d[4, :4]
    assert d.tolist() == [0.25, 0.75, 2.75, 6.75]
    res = phase_change_containment(st)
    assert res.ok and res.checked == st.pcs_Y.p + 1


def test_containment_detects_bad_radius(x4):
    st = replace(add_point(x4, 0, 0.25, r=0.3), r=0.1)
    res = phase_change_containment(st)
    assert not res.ok
    assert res.witnesses[0]["scale"] == 0.25


def test_unjoined_component_at_one(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    res = verify_unjoined_components(st, scales=[1.0])
    # at s = 1 the blocks {3} and {7} do not contain y
    assert res.ok and res.checked == 2


def test_phase_change_bijection_x4(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    assert len(oracles.bfs_partition(st.dm_X.d, 1.0)) == 3
    assert len(oracles.bfs_partition(st.dm_Y.d, 1.0)) == 3
    res = verify_phase_change_bijection(st)
    assert res.ok and res.checked == 6


def test_window_samples_cover_y_phase_changes(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    windows = window_samples(st)
    assert sorted(windows) == [1, 2, 3, 4, 5, 6]
    assert windows[1][0] == 1.0 and np.all(windows[1] < 2.0 - 0.3)
    assert np.isinf(windows[6]).sum() == 0
    conn, bij = verify_window_correspondence(st)
    assert conn.ok and bij.ok


def test_fates_x4(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    fates, excluded, res = classify_layers(st)
    assert res.ok
    f = next(f for f in fates if f.members == [0, 1, 2])
    assert (f.i, f.j, f.cls) == (2, 3, "extends_with_y")
    assert f.partial_layer and f.bounds_ok
    seven = next(f for f in excluded if f.members == [3])
    assert seven.excluded and (seven.i, seven.j) == (0, 3)
    # every reported fate starts at s_1 or later
    assert all(f.i >= 1 for f in fates)


def test_fate_y_layer_matches_oracle(x4):
    st = add_point(x4, 0, 0.25, r=0.3)
    og = oracles.hierarchy_vr(st.dm_Y.d)
    s = oracles.phase_changes(st.dm_Y.d)
    fates, _, _ = classify_layers(st)
    for f in fates:
        if f.cls == "broken":
            continue
        key = ((st.pcs_Y.index_of(f.s_i), 0), oracles.block_containing(oracles.bfs_partition(st.dm_Y.d, f.s_i), f.rep))
        comp = next(c for c in og.components if key in c)
        idx = sorted(c[0] for c, _ in comp)
        assert f.y_layer == (s[idx[0]], s[idx[-1]])


def test_broken_fate_only_before_s1(x4):
    # y next to 7 joins {7} at once, but only at s_0 in X
    st = add_point(x4, 3, 0.25)
    fates, excluded, _ = classify_layers(st)
    assert [f.cls for f in excluded if f.members == [3]] == ["broken"]
    assert all(f.cls != "broken" for f in fates)


def test_run_perturbation_report(x4):
    rep = run_perturbation(add_point(x4, 0, 0.25, r=0.3))
    assert rep.all_ok
    d = rep.to_dict()
    assert d["schema"] == 1 and d["setup"]["max_tiny_radius"] == 1.0
    assert set(d["checks"]) == {
        "containment",
        "unjoined_components",
        "joined_connected",
        "window_bijection",
        "phase_change_bijection",
        "partial_layer_without_y",
        "partial_layer_with_y",
        "partial_layer_converse",
        "layer_bounds",
    }
    assert sum(d["class_counts"].values()) == len(d["fates"])


def test_non_metric_rejected(x4):
    st = add_point(x4, 0, 0.25)
    bad = replace(st, dm_X=replace(st.dm_X, metric_flag=False))
    with pytest.raises(InputError):
        run_perturbation(bad)


@pytest.mark.parametrize("metric", ["manhattan", "chebyshev"])
def test_other_metrics(rng, metric):
    pc = PointCloud(rng.random((7, 2)))
    bound = max_tiny_radius(phase_change_numbers(compute_distance_matrix(pc, metric)))
    rep = run_perturbation(add_point(pc, 2, bound / 3, direction=[1.0, 1.0], metric=metric))
    assert rep.all_ok
