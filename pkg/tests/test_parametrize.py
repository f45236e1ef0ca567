import math

import numpy as np
import pytest

from apollopath.analysis import path_length
from apollopath.gasket import complete, initial_configuration
from apollopath.geometry import Circle, Point, distance
from apollopath.parametrize import (
    SEGMENT_COUNTS,
    SegmentNode,
    address_of,
    convergence_report,
    density_gap,
    hausdorff,
    locate,
    point_at,
    points_at,
    sample_path,
    segment_split,
)
from apollopath.tracer import Arc, TracePath, trace


@pytest.fixture(scope="module")
def desk():
    return complete(initial_configuration(1.0, "two-equal"), 0.2)


@pytest.fixture(scope="module")
def desk_trace(desk):
    return trace(desk, 0.05)


def circle_path(radius, delta=0.05, center=(0.0, 0.0)):
    arc = Arc((1,), Point(*center), radius, 0.0, 360.0)
    return TracePath([arc], delta=delta)


def test_locate_known_values():
    assert locate(0.23, 5) == 1  # 0.23 lies in [1/5, 2/5)
    assert locate(0.0, 1) == 0
    assert locate(0.0, 9) == 0
    assert locate(0.81, 5) == 4


def test_locate_validation():
    with pytest.raises(ValueError):
        locate(1.0, 5)
    with pytest.raises(ValueError):
        locate(0.5, 4)


def test_segment_split_counts(desk_trace):
    _, tree = desk_trace
    root = segment_split(tree)
    assert root.count == 5  # two excursions
    counts = {}

    def collect(node):
        counts[node.key] = node.count
        for child in node.children:
            collect(child)

    collect(root)
    assert counts[(2,)] == 3
    assert counts[(3,)] == 1
    assert counts[(4,)] == 1
    assert all(c in SEGMENT_COUNTS for c in counts.values())


def test_segment_count_with_three_excursions():
    leaf = SegmentNode((9,), [])
    node = SegmentNode((1,), [leaf, leaf, leaf])
    assert node.count == 7


def test_address_of_paper_example(desk_trace):
    _, tree = desk_trace
    root = segment_split(tree)
    assert address_of(0.23, root, 1) == [(1, 5)]


def test_address_of_descends_and_stops(desk_trace):
    _, tree = desk_trace
    root = segment_split(tree)
    assert address_of(0.0, root, 5) == [(0, 5)]
    # t = 0.25 lands in the first excursion (a leaf circle): digit 1 of 5,
    # then digit 0 of 1.
    assert address_of(0.25, root, 5) == [(1, 5), (0, 1)]
    # Circle 2 is the second excursion; its own excursion is segment 1 of 3.
    addr = address_of(0.7, root, 5)
    assert addr[0] == (3, 5)
    assert addr[1][1] == 3


def test_address_interval_widths(desk_trace):
    _, tree = desk_trace
    root = segment_split(tree)
    rng = np.random.default_rng(5)
    for t in rng.uniform(0.0, 1.0, size=200):
        addr = address_of(float(t), root, 8)
        lo, width = 0.0, 1.0
        for digit, base in addr:
            width /= base
            lo += digit * width
        assert lo <= t < lo + width + 1e-12
        assert width == pytest.approx(
            math.prod(1.0 / base for _, base in addr))


def test_point_at_endpoints(desk_trace):
    path, _ = desk_trace
    start = point_at(path, 0.0)
    assert distance(start, path.start) < 1e-12
    end = point_at(path, 1.0)
    assert distance(end, start) < 1e-9  # closed


def test_point_at_lipschitz(desk_trace):
    path, _ = desk_trace
    total = path_length(path)
    rng = np.random.default_rng(17)
    ts = rng.uniform(0.0, 1.0, size=2000)
    hs = rng.uniform(0.0, 0.05, size=2000)
    p0 = points_at(path, ts)
    p1 = points_at(path, np.minimum(ts + hs, 1.0))
    moved = np.hypot(*(p1 - p0).T)
    allowed = total * np.minimum(ts + hs, 1.0) - total * ts
    assert (moved <= allowed + 1e-9).all()


def test_point_at_continuity(desk_trace):
    path, _ = desk_trace
    total = path_length(path)
    ts = np.linspace(0.0, 1.0, 5001)
    pts = points_at(path, ts)
    gaps = np.hypot(*np.diff(pts, axis=0).T)
    assert gaps.max() <= total * (ts[1] - ts[0]) + 1e-9


def test_hausdorff_identical_and_concentric():
    a = circle_path(1.0)
    assert hausdorff(a, a, 0.01) == 0.0
    b = circle_path(1.2)
    assert hausdorff(a, b, 0.005) == pytest.approx(0.2, abs=1e-3)


def test_hausdorff_step_validation():
    a = circle_path(1.0, delta=0.01)
    with pytest.raises(ValueError):
        hausdorff(a, a, 0.02)


def test_density_gap_single_circle():
    outer = Circle(Point(0.0, 0.0), 1.0, enclosing=True)
    path = circle_path(0.95, delta=0.05)
    gap = density_gap(path, outer, grid_step=0.05)
    # The disk center is the farthest grid point from the drawn contour.
    assert gap == pytest.approx(0.95, abs=0.05)


def test_density_gap_validation():
    outer = Circle(Point(0.0, 0.0), 1.0, enclosing=True)
    with pytest.raises(ValueError):
        density_gap(circle_path(0.9), outer, 0.0)


def test_sample_path_uniform(desk_trace):
    path, _ = desk_trace
    pts = sample_path(path, 0.01)
    steps = np.hypot(*np.diff(pts, axis=0).T)
    assert steps.max() <= 0.0101  # chords never exceed the arc-length step


def test_convergence_report_shape():
    outer = Circle(Point(0.0, 0.0), 1.0, enclosing=True)
    paths = [(1, 0.2, circle_path(0.8, delta=0.05)),
             (2, 0.1, circle_path(0.9, delta=0.025))]
    report = convergence_report(paths, outer, grid_step=0.1, sample_step=0.02)
    assert [e.n for e in report.entries] == [1, 2]
    assert math.isnan(report.entries[0].hausdorff_prev)
    assert report.entries[1].hausdorff_prev == pytest.approx(0.1, abs=1e-3)
    csv = report.to_csv()
    assert csv.splitlines()[0] == "n,r_min,hausdorff_prev,density_gap"
    assert len(csv.splitlines()) == 3


def test_address_stability_under_refinement():
    # Circle 1's excursion set is unchanged between the 0.2 and 0.1 stops,
    # so digits at its level are identical.
    coarse = complete(initial_configuration(1.0, "two-equal"), 0.2)
    fine = complete(initial_configuration(1.0, "two-equal"), 0.1)
    _, tree_c = trace(coarse, 0.05)
    _, tree_f = trace(fine, 0.025)
    root_c = segment_split(tree_c)
    root_f = segment_split(tree_f)
    assert root_c.count == root_f.count
    for exc_c, exc_f in zip(tree_c.root.excursions, tree_f.root.excursions):
        cc = coarse.circle(exc_c.node.key[-1])
        cf = fine.circle(exc_f.node.key[-1])
        assert distance(cc.center, cf.center) < 1e-9
        assert abs(cc.radius - cf.radius) < 1e-9
    rng = np.random.default_rng(9)
    for t in rng.uniform(0.0, 1.0, size=100):
        assert address_of(float(t), root_c, 1) == address_of(float(t), root_f, 1)


def test_worst_case_ratio_fixture():
    # A satellite amidst three equal circles is smaller by 3 + 2*sqrt(3);
    # halving circles therefore reach any satellite within three steps.
    ratio = 3.0 + 2.0 * math.sqrt(3.0)
    assert ratio == pytest.approx(6.464, abs=5e-4)
    assert math.log(ratio) == pytest.approx(1.87, abs=5e-3)
    assert math.ceil(math.log(ratio) / math.log(2.0)) == 3
