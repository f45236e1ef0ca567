"""Arc-length parameterization, segment addressing, and path diagnostics.

A trace is a closed curve, so mapping t in [0,1) to the point at arc length
t times the total length gives a continuous parameterization.  Independently,
each circle's walk splits into an odd number of same-weight sub-intervals
(arcs alternating with excursions), which yields a mixed-base digit address
for every t, in the style of the quaternary coding of the Hilbert curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from io import StringIO

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Circle, Point
from .tracer import Arc, TraceNode, TracePath, TraceTree

SEGMENT_COUNTS = (1, 3, 5, 7, 9)

Address = list[tuple[int, int]]


@dataclass
class SegmentNode:
    """Per-circle split: 2k+1 segments for k excursions.

    Even-indexed segments are plain arc pieces; odd-indexed ones are the
    excursion subtrees, in walk order.
    """

    key: tuple[int, ...]
    children: list["SegmentNode"]

    @property
    def count(self) -> int:
        return 2 * len(self.children) + 1


def segment_split(tree: TraceTree) -> SegmentNode:
    """Mirror a trace tree as per-circle segment counts."""

    def build(node: TraceNode) -> SegmentNode:
        return SegmentNode(node.key, [build(exc.node) for exc in node.excursions])

    return build(tree.root)


def locate(t: float, m: int) -> int:
    """Index of the length-1/m sub-interval of [0,1) containing t."""
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must be in [0, 1), got {t!r}")
    if m not in SEGMENT_COUNTS:
        raise ValueError(f"segment count must be one of {SEGMENT_COUNTS}, got {m!r}")
    return int(m * t)


def address_of(t: float, root: SegmentNode, depth: int) -> Address:
    """Mixed-base digits locating t in the nested segment intervals.

    Descends through excursion segments (odd digits) and stops early at arc
    segments or at the given depth; each digit d in base m narrows t to a
    sub-interval of width 1/m.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    digits: Address = []
    node = root
    for _ in range(depth):
        m = node.count
        d = locate(t, m)
        digits.append((d, m))
        if d % 2 == 0:
            break
        node = node.children[(d - 1) // 2]
        t = m * t - d
    return digits


def _element_tables(path: TracePath):
    n = len(path.elements)
    is_arc = np.zeros(n, dtype=bool)
    cx = np.zeros(n)
    cy = np.zeros(n)
    radius = np.zeros(n)
    a0 = np.zeros(n)
    a1 = np.zeros(n)
    x0 = np.zeros(n)
    y0 = np.zeros(n)
    x1 = np.zeros(n)
    y1 = np.zeros(n)
    lengths = np.zeros(n)
    for i, el in enumerate(path.elements):
        lengths[i] = el.length()
        if isinstance(el, Arc):
            is_arc[i] = True
            cx[i], cy[i] = el.center.x, el.center.y
            radius[i] = el.radius
            a0[i], a1[i] = math.radians(el.start_deg), math.radians(el.end_deg)
        else:
            x0[i], y0[i] = el.start.x, el.start.y
            x1[i], y1[i] = el.end.x, el.end.y
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    return is_arc, cx, cy, radius, a0, a1, x0, y0, x1, y1, lengths, cum


def points_at(path: TracePath, ts) -> np.ndarray:
    """Points at arc-length fractions ``ts`` along the path, shape (n, 2)."""
    (is_arc, cx, cy, radius, a0, a1,
     x0, y0, x1, y1, lengths, cum) = _element_tables(path)
    total = cum[-1]
    s = np.clip(np.asarray(ts, dtype=float), 0.0, 1.0) * total
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(lengths) - 1)
    frac = (s - cum[idx]) / np.where(lengths[idx] > 0.0, lengths[idx], 1.0)
    out = np.empty((len(s), 2))
    arc = is_arc[idx]
    ia = idx[arc]
    ang = a0[ia] + (a1[ia] - a0[ia]) * frac[arc]
    out[arc, 0] = cx[ia] + radius[ia] * np.cos(ang)
    out[arc, 1] = cy[ia] + radius[ia] * np.sin(ang)
    iw = idx[~arc]
    fw = frac[~arc]
    out[~arc, 0] = x0[iw] + (x1[iw] - x0[iw]) * fw
    out[~arc, 1] = y0[iw] + (y1[iw] - y0[iw]) * fw
    return out


def point_at(path: TracePath, t: float) -> Point:
    """The point at arc length t times the total length from the start."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t!r}")
    x, y = points_at(path, [t])[0]
    return Point(float(x), float(y))


def sample_path(path: TracePath, step: float) -> np.ndarray:
    """Uniform arc-length samples along the whole closed path."""
    if step <= 0.0:
        raise ValueError("sample step must be positive")
    total = sum(el.length() for el in path.elements)
    n = max(8, math.ceil(total / step))
    return points_at(path, np.arange(n) / n)


def hausdorff(a: TracePath, b: TracePath, sample_step: float) -> float:
    """Symmetric Hausdorff distance between two sampled paths."""
    if sample_step > min(a.delta, b.delta):
        raise ValueError("sample step must not exceed either shrink distance")
    pa = sample_path(a, sample_step)
    pb = sample_path(b, sample_step)
    d_ab, _ = cKDTree(pb).query(pa)
    d_ba, _ = cKDTree(pa).query(pb)
    return float(max(d_ab.max(), d_ba.max()))


def density_gap(path: TracePath, outer: Circle, grid_step: float) -> float:
    """Largest distance from a grid point inside the outer circle to the path.

    The path is sampled at its own shrink distance, so the reported value
    carries a sampling error of at most half that distance.
    """
    if grid_step <= 0.0:
        raise ValueError("grid step must be positive")
    r = outer.radius
    k = math.floor(r / grid_step)
    offsets = np.arange(-k, k + 1) * grid_step
    gx, gy = np.meshgrid(offsets + outer.center.x, offsets + outer.center.y)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    inside = np.hypot(grid[:, 0] - outer.center.x,
                      grid[:, 1] - outer.center.y) < r
    samples = sample_path(path, path.delta)
    dists, _ = cKDTree(samples).query(grid[inside])
    return float(dists.max())


@dataclass
class ConvergenceEntry:
    n: int
    r_min: float
    hausdorff_prev: float  # nan for the first entry
    density_gap: float


@dataclass
class ConvergenceReport:
    entries: list[ConvergenceEntry]

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("n,r_min,hausdorff_prev,density_gap\n")
        for e in self.entries:
            h = "" if math.isnan(e.hausdorff_prev) else repr(e.hausdorff_prev)
            buf.write(f"{e.n},{e.r_min!r},{h},{e.density_gap!r}\n")
        return buf.getvalue()


def convergence_report(traces: list[tuple[int, float, TracePath]],
                       outer: Circle, grid_step: float,
                       sample_step: float) -> ConvergenceReport:
    """Hausdorff-to-previous and density-gap diagnostics across refinements.

    ``traces`` holds (n, r_min, path) with n strictly increasing.
    """
    entries = []
    prev = None
    for n, r_min, path in traces:
        h = math.nan if prev is None else hausdorff(prev, path, sample_step)
        entries.append(ConvergenceEntry(n, r_min, h,
                                        density_gap(path, outer, grid_step)))
        prev = path
    return ConvergenceReport(entries)
