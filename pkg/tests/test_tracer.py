import math

import numpy as np
import pytest

from apollopath.gasket import complete, initial_configuration, nest
from apollopath.geometry import Circle, Point, distance, point_on_circle
from apollopath.tracer import (
    Arc,
    BridgeWall,
    DeltaTooLarge,
    NoInwardAngle,
    TracePath,
    flatten,
    inward_turn_angle,
    is_eligible,
    is_simple,
    satellite_list,
    trace,
    trace_nested,
)

TOL = 1e-9


@pytest.fixture(scope="module")
def desk():
    return complete(initial_configuration(1.0, "two-equal"), 0.2)


@pytest.fixture(scope="module")
def desk_trace(desk):
    return trace(desk, 0.05)


def wall_pairs(path):
    """Match bridge walls into (enter, exit) pairs via arc-key nesting."""
    pairs = []
    stack = []
    els = path.elements
    for i, el in enumerate(els):
        if not isinstance(el, BridgeWall):
            continue
        prev_key = els[i - 1].key
        next_key = els[i + 1].key
        assert isinstance(els[i - 1], Arc) and isinstance(els[i + 1], Arc)
        if stack and stack[-1][1] == next_key:
            j, _ = stack.pop()
            pairs.append((j, i))
        else:
            stack.append((i, prev_key))
    assert not stack
    return pairs


def test_satellite_list_five_node(desk):
    entries = satellite_list(desk, 1, entry_deg=-179.0)
    assert [e.satellite_id for e in entries] == [4, 2, 3, 0]
    assert entries[0].angle_deg == pytest.approx(-math.degrees(math.atan2(4, 3)))
    assert entries[1].angle_deg == pytest.approx(0.0)
    assert entries[2].angle_deg == pytest.approx(math.degrees(math.atan2(4, 3)))
    assert entries[3].angle_deg == pytest.approx(180.0)


def test_satellite_list_top_circle(desk):
    # Entered from circle 2 the walk starts just past the facing angle; the
    # outer, then circle 1, then circle 2 follow counter-clockwise.
    entries = satellite_list(desk, 3, entry_deg=-42.97)
    assert [e.satellite_id for e in entries] == [0, 1, 2]


def test_satellite_list_seed_only():
    g = complete(initial_configuration(1.0, "two-equal"), 0.6)
    entries = satellite_list(g, 1)
    assert [e.satellite_id for e in entries] == [2, 0]


def test_is_eligible(desk):
    assert is_eligible(desk, 1, 2, set())          # gen 0 -> gen 0
    assert is_eligible(desk, 1, 3, set())          # gen 0 -> gen 1
    assert not is_eligible(desk, 4, 2, set())      # gen 1 -> gen 0
    assert not is_eligible(desk, 1, 0, set())      # outer is never traced
    assert not is_eligible(desk, 1, 2, {2})        # visited


def test_trace_five_node_excursion_order(desk_trace):
    path, tree = desk_trace
    root = tree.root
    assert root.key == (1,)
    assert root.entry_deg == -179.0
    assert [exc.node.key for exc in root.excursions] == [(4,), (2,)]
    c2 = root.excursions[1].node
    assert [exc.node.key for exc in c2.excursions] == [(3,)]
    assert tree.count() == 4


def test_trace_seed_only_smallest_case():
    g = complete(initial_configuration(1.0, "two-equal"), 0.6)
    path, tree = trace(g, 0.1)
    kinds = [type(el).__name__ for el in path.elements]
    assert kinds == ["Arc", "BridgeWall", "Arc", "BridgeWall", "Arc"]
    assert tree.count() == 2
    assert len(tree.root.excursions) == 1


def test_trace_closure(desk_trace):
    path, _ = desk_trace
    assert distance(path.start, path.end) < TOL
    # Consecutive elements share endpoints.
    for a, b in zip(path.elements, path.elements[1:]):
        assert distance(a.end, b.start) < TOL


def test_trace_starts_at_entry_point(desk_trace):
    path, _ = desk_trace
    first = path.elements[0]
    assert isinstance(first, Arc)
    assert first.key == (1,)
    expected = point_on_circle(Point(-0.5, 0.0), 0.45, -179.0)
    assert distance(path.start, expected) < TOL


def test_leaf_circle_arc_length(desk_trace):
    # A leaf keeps its whole shrunk contour minus the entry gap.
    path, tree = desk_trace
    delta = path.delta
    rho = 1.0 / 3.0 - delta
    gap = 2.0 * math.asin(delta / rho)
    expected = rho * (2.0 * math.pi - gap)
    for key in ((3,), (4,)):
        arcs = [el for el in path.elements
                if isinstance(el, Arc) and el.key == key]
        assert sum(a.length() for a in arcs) == pytest.approx(expected, rel=1e-12)


def test_eligibility_soundness_on_tree(desk, desk_trace):
    _, tree = desk_trace
    for node in tree.walk():
        gen_host = desk.nodes[node.key[-1]].generation
        for exc in node.excursions:
            assert exc.kind == "satellite"
            gen_child = desk.nodes[exc.node.key[-1]].generation
            assert gen_host <= gen_child <= gen_host + 1


def test_trace_coverage_various():
    for style, r_min in (("two-equal", 0.05), ("three-equal", 0.1)):
        g = complete(initial_configuration(1.0, style), r_min)
        _, tree = trace(g, r_min / 4.0)
        assert tree.count() == len(g) - 1


def test_trace_delta_validation(desk):
    with pytest.raises(DeltaTooLarge):
        trace(desk, 0.2 / 4.0 + 0.01)
    with pytest.raises(ValueError):
        trace(desk, 0.0)


def test_bridge_walls_parallel_at_2delta(desk_trace):
    path, _ = desk_trace
    delta = path.delta
    pairs = wall_pairs(path)
    assert len(pairs) == 3
    for i, j in pairs:
        w_in, w_out = path.elements[i], path.elements[j]
        d_in = np.array([w_in.end.x - w_in.start.x, w_in.end.y - w_in.start.y])
        d_out = np.array([w_out.end.x - w_out.start.x, w_out.end.y - w_out.start.y])
        cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
        assert abs(cross) < 1e-9
        assert d_in @ d_out < 0.0  # walls are traversed in opposite directions
        # Separation between the two wall lines is twice the shrink distance.
        u = d_in / np.linalg.norm(d_in)
        off = np.array([w_out.start.x - w_in.start.x, w_out.start.y - w_in.start.y])
        sep = abs(off[0] * u[1] - off[1] * u[0])
        assert sep == pytest.approx(2.0 * delta, abs=1e-9)


def test_inward_turn_angle_rules():
    host = Circle(Point(0.0, 0.0), 1.0)
    assert inward_turn_angle(host, [], 0.01) == -60.0
    assert inward_turn_angle(host, [(-70.0, -50.0)], 0.01) == 180.0
    occupied = [(-60.2, -59.8), (179.8, 180.2)]
    assert inward_turn_angle(host, occupied, 0.001) == -61.0
    with pytest.raises(NoInwardAngle):
        inward_turn_angle(host, [(0.0, 359.9)], 0.01)


def test_trace_nested_inward_behaviour():
    g = nest(complete(initial_configuration(1.0, "three-equal"), 0.2), 0.2)
    path, tree = trace_nested(g, 0.05)
    inward = {node.key: exc for node in tree.walk()
              for exc in node.excursions if exc.kind == "inward"}
    assert set(inward) == {(1,), (2,), (3,)}
    # Circle 1 has a satellite exactly at -60 (circle 3 of the seed), so its
    # turn diverts; the other hosts turn at the preferred -60.
    assert inward[(2,)].angle_deg == -60.0
    assert inward[(3,)].angle_deg == -60.0
    assert inward[(1,)].angle_deg != -60.0
    # The inward bridge enters the nearest main circle of the interior.
    for key, exc in inward.items():
        assert exc.node.key[-1] in (1, 2, 3)
        assert exc.node.key[:-1] == key


def test_trace_nested_orientation_parity():
    g = nest(complete(initial_configuration(1.0, "three-equal"), 0.1), 0.1)
    _, tree = trace_nested(g, 0.025)
    depths = set()
    for node in tree.walk():
        level = len(node.key) - 1
        depths.add(level)
        assert node.orientation == (1 if level % 2 == 0 else -1)
    assert max(depths) >= 1


def test_trace_nested_coverage():
    g = nest(complete(initial_configuration(1.0, "three-equal"), 0.1), 0.1)
    _, tree = trace_nested(g, 0.025)
    def expected(gk):
        total = len(gk) - 1
        for node in gk.nodes:
            if node.interior is not None:
                total += expected(node.interior)
        return total
    assert tree.count() == expected(g)


def test_excursion_count_bounded(desk_trace):
    _, tree = desk_trace
    for node in tree.walk():
        assert len(node.excursions) <= 4


def test_is_simple_single_circle():
    arc = Arc((1,), Point(0.0, 0.0), 1.0, 0.0, 360.0)
    path = TracePath([arc], delta=0.1)
    assert is_simple(path, 0.025)


def test_is_simple_figure_eight_negative_control():
    # Two overlapping full circles cross at two points.
    a = Arc((1,), Point(0.0, 0.0), 1.0, 0.0, 360.0)
    b = Arc((2,), Point(1.0, 0.0), 1.0, 0.0, 360.0)
    path = TracePath([a, b], delta=0.1)
    assert not is_simple(path, 0.025)


def test_is_simple_five_node(desk):
    path, _ = trace(desk, 0.05)
    assert is_simple(path, 0.0125)


def test_flatten_step_validation(desk_trace):
    path, _ = desk_trace
    with pytest.raises(ValueError):
        flatten(path, 0.0)


def test_trace_deterministic(desk):
    p1, _ = trace(desk, 0.05)
    p2, _ = trace(desk, 0.05)
    assert len(p1.elements) == len(p2.elements)
    for a, b in zip(p1.elements, p2.elements):
        assert a == b
