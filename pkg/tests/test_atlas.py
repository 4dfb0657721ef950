import math

import numpy as np
import pytest

from tensegrity_ptm.atlas import (
    FLAG_BOUNDARY,
    FLAG_DEGENERATE,
    SYMMETRIC_SEXTICS,
    UNLOADED_LINES,
    SliceSpec,
    SweepSpec,
    Variety,
    builtin_for,
    classify_slice,
    connected_regions,
    evaluate_node,
    operation_range,
    read_csv,
    render_svg,
    reverse_configuration_check,
    solve_point,
    verify_boundaries,
    write_csv,
)

UNLOADED = SliceSpec("rho", (0.0131, 1.9937), 60, "L2", (0.0173, 2.9971), 60)
SYMMETRIC = SliceSpec("rho", (0.0107, 1.9967), 50, "F4", (-10.0, 0.0), 50, ties=(("F3", "F4"),))


@pytest.fixture(scope="module")
def unloaded_map():
    return classify_slice(UNLOADED)


@pytest.fixture(scope="module")
def symmetric_map():
    return classify_slice(SYMMETRIC)


def test_slice_validation():
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.0, 1.0), 10, "L2", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.1, 1.0), 1, "L2", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.1, 1.0), 10, "rho", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.1, math.inf), 10, "L2", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.1, 1.0), 10, "k", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        SliceSpec("rho", (0.1, 1.0), 10, "L2", (0.1, 1.0), 10, fixed={"mass": 1})


def test_ties():
    p = SYMMETRIC.params_at(0.5, -7.0)
    assert p["F3"] == p["F4"] == -7.0


def test_unloaded_band(unloaded_map):
    m = unloaded_map
    assert set(m.histogram()) == {1, 2}
    assert np.all(m.stable <= m.total) and np.all(m.total <= 6)
    for i, rho in enumerate(m.values1):
        for j, L2 in enumerate(m.values2):
            lo, hi = abs(1 - L2) / 2, (1 + L2) / 2
            assert m.stable[i, j] == (2 if lo < rho < hi else 1)


def test_unloaded_alignment(unloaded_map):
    rep = verify_boundaries(unloaded_map, UNLOADED_LINES)
    assert rep.fraction >= 0.99 and rep.sign_fraction >= 0.99 and not rep.mismatch
    bad = verify_boundaries(unloaded_map, [Variety("wrong", lambda p: 2 * p["rho"] - p["L2"])])
    assert bad.fraction < 0.5 and bad.mismatch


def test_symmetric_alignment(symmetric_map):
    assert set(symmetric_map.histogram()) == {1, 2}
    assert connected_regions(symmetric_map, 2) == 1
    rep = verify_boundaries(symmetric_map, SYMMETRIC_SEXTICS)
    assert rep.sign_fraction >= 0.98


def test_general_method_agrees(symmetric_map):
    m = classify_slice(SliceSpec("rho", (0.0107, 1.9967), 12, "F4", (-10.0, 0.0), 12, ties=(("F3", "F4"),)),
                       method="general")
    fast = classify_slice(SliceSpec("rho", (0.0107, 1.9967), 12, "F4", (-10.0, 0.0), 12, ties=(("F3", "F4"),)))
    assert np.array_equal(m.stable, fast.stable) and np.array_equal(m.total, fast.total)


def test_boundary_flags(unloaded_map):
    m = unloaded_map
    for (i, j), (a, b) in m.boundary_edges:
        assert m.stable[i, j] != m.stable[a, b]
        assert m.flags[i, j] & FLAG_BOUNDARY and m.flags[a, b] & FLAG_BOUNDARY
    assert connected_regions(m, 2, interior_only=True) == 1


def test_builtin_for():
    assert builtin_for(UNLOADED) == UNLOADED_LINES
    assert builtin_for(SYMMETRIC) == SYMMETRIC_SEXTICS
    assert builtin_for(SliceSpec("rho", (0.1, 1), 3, "L2", (0.1, 1), 3, fixed={"F3": -10.0})) == ()


def test_degenerate_node_flagged():
    r = evaluate_node({"L1": 1.0, "L2": 1.0, "k": 100.0, "rho": 1e-9, "F3": 0.0, "F4": 0.0,
                       "F3x": 0.0, "F4x": 0.0}, method="general")
    assert r.stable_count == -1 and r.flags & FLAG_DEGENERATE
    m = classify_slice(SliceSpec("rho", (1e-9, 0.5), 3, "L2", (1.0, 1.5), 3), method="general")
    assert m.stable[0, 0] == -1 and m.flags[0, 0] & FLAG_DEGENERATE
    assert np.all(m.stable[1:, :] >= 0)


def test_workers_do_not_change_result():
    spec = SliceSpec("rho", (0.05, 1.5), 8, "L2", (0.2, 2.0), 8, fixed={"F3": -10.0, "F4": -10.0})
    a = classify_slice(spec)
    b = classify_slice(spec, workers=2)
    assert np.array_equal(a.stable, b.stable) and np.array_equal(a.flags, b.flags)
    assert a.boundary_edges == b.boundary_edges


def test_operation_range_unloaded():
    r = operation_range(SweepSpec((0.005, 4.0), 800, fixed={"L2": 1.5}))
    (lo, hi), = r.intervals
    assert abs(lo - 0.25) <= 0.005 and abs(hi - 1.25) <= 0.005
    assert abs(r.widths[0] - 1.0) <= 0.01
    r = operation_range(SweepSpec((0.005, 4.0), 800, fixed={"L2": 0.5}))
    assert abs(r.widths[0] - 0.5) <= 0.01
    # symmetric with F4 = 0 is the unloaded L2 = 1 case: maximal width 1
    r = operation_range(SweepSpec((0.005, 4.0), 800, ties=(("F3", "F4"),)))
    assert abs(r.widths[0] - 1.0) <= 0.01


def test_operation_range_general_equals_symmetric():
    a = operation_range(SweepSpec((0.005, 2.0), 400, fixed={"F3": -10.0, "F4": -10.0}))
    b = operation_range(SweepSpec((0.005, 2.0), 400, fixed={"F3": -10.0, "F4": -10.0}), method="general")
    assert a.intervals == b.intervals
    assert np.array_equal(a.stable_counts, b.stable_counts)


def test_reverse_configuration(symmetric_map):
    assert reverse_configuration_check(classify_slice(SliceSpec("rho", (0.1, 1), 3, "L2", (0.5, 1), 3))) is None
    # pressing down, rho beyond the band: the one stable pose hangs below the base
    p = {"L1": 1.0, "L2": 1.0, "k": 100.0, "rho": 1.5, "F3": -10.0, "F4": -10.0, "F3x": 0.0, "F4x": 0.0}
    stable = [s for s in solve_point(p) if s.stable]
    assert len(stable) == 1 and stable[0].nodes.y3 < 0 and stable[0].nodes.y4 < 0
    p.update(F3=10.0, F4=10.0)
    stable = [s for s in solve_point(p) if s.stable]
    assert len(stable) == 1 and stable[0].nodes.y3 > 0 and stable[0].nodes.y4 > 0
    flags = reverse_configuration_check(symmetric_map)
    loaded = symmetric_map.values2 < -1.0
    one = (symmetric_map.stable == 1) & loaded[None, :]
    assert np.all(flags[one] == 1.0)


def test_csv_round_trip(tmp_path, unloaded_map):
    path = tmp_path / "map.csv"
    write_csv(unloaded_map, path)
    cols = read_csv(path)
    assert np.array_equal(cols["stable_count"].reshape(unloaded_map.stable.shape), unloaded_map.stable)
    assert np.array_equal(np.unique(cols["rho"]), unloaded_map.values1)
    assert np.array_equal(np.unique(cols["L2"]), unloaded_map.values2)


def test_svg_deterministic(tmp_path, unloaded_map):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(unloaded_map, a, UNLOADED_LINES)
    render_svg(unloaded_map, b, UNLOADED_LINES)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().lstrip().startswith("<?xml")
