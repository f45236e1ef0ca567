"""Single-stroke tracing of a gasket: one closed, non-crossing curve.

The walk starts on circle 1 at -179 degrees and goes counter-clockwise.  When
it passes the tangency point of an eligible satellite it leaves the contour
through a bridge (a corridor of width twice the shrink distance), traces the
satellite recursively, and returns through the other corridor wall.  Circles
are drawn shrunk by the shrink distance so the corridors have room.  Nested
interiors are entered through an inward bridge at a clear angular position
and traced with reversed orientation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .gasket import Gasket, tangency_map
from .geometry import (
    REL_TOL,
    Circle,
    Point,
    angular_position,
    distance,
    normalize_angle,
    point_on_circle,
    tangency_point,
)

ROOT_ENTRY_DEG = -179.0
INWARD_PREFERRED = (-60.0, 180.0)
INWARD_CLEARANCE = 1.5  # candidate window is the bridge gap widened by 50%


class DeltaTooLarge(ValueError):
    """Shrink distance exceeds a quarter of the stop radius."""


class UnreachedNodes(RuntimeError):
    """The trace failed to visit every non-outer circle (construction bug)."""


class NoInwardAngle(RuntimeError):
    """No clear angular position exists for turning inward."""


@dataclass(frozen=True, slots=True)
class SatelliteEntry:
    satellite_id: int
    point: Point
    angle_deg: float


@dataclass(frozen=True, slots=True)
class Arc:
    """Contour piece of one circle, swept from start to end.

    Angles are in degrees and not normalized: ``end_deg - start_deg`` is the
    signed sweep (positive counter-clockwise).
    """

    key: tuple[int, ...]
    center: Point
    radius: float
    start_deg: float
    end_deg: float

    @property
    def ccw(self) -> bool:
        return self.end_deg >= self.start_deg

    @property
    def sweep_deg(self) -> float:
        return self.end_deg - self.start_deg

    def length(self) -> float:
        return self.radius * math.radians(abs(self.sweep_deg))

    @property
    def start(self) -> Point:
        return point_on_circle(self.center, self.radius, self.start_deg)

    @property
    def end(self) -> Point:
        return point_on_circle(self.center, self.radius, self.end_deg)


@dataclass(frozen=True, slots=True)
class BridgeWall:
    """One straight wall of a bridge corridor."""

    start: Point
    end: Point

    def length(self) -> float:
        return distance(self.start, self.end)


PathElement = Arc | BridgeWall


@dataclass
class TracePath:
    elements: list[PathElement]
    delta: float
    closed: bool = True

    @property
    def start(self) -> Point:
        return self.elements[0].start

    @property
    def end(self) -> Point:
        return self.elements[-1].end


@dataclass
class Excursion:
    kind: str  # "satellite" or "inward"
    angle_deg: float  # departure angle on the host
    window: tuple[float, float]  # host angles consumed, in walk order
    node: "TraceNode"


@dataclass
class TraceNode:
    key: tuple[int, ...]
    entry_deg: float
    orientation: int  # +1 counter-clockwise, -1 clockwise
    excursions: list[Excursion] = field(default_factory=list)


@dataclass
class TraceTree:
    root: TraceNode

    def walk(self) -> Iterator[TraceNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(exc.node for exc in reversed(node.excursions))

    def count(self) -> int:
        return sum(1 for _ in self.walk())


def satellite_list(g: Gasket, node_id: int,
                   entry_deg: float = ROOT_ENTRY_DEG) -> list[SatelliteEntry]:
    """All circles tangent to a node, counter-clockwise from the entry angle.

    Includes the outer circle when tangent (eligibility, not listing, excludes
    it from tracing).
    """
    host = g.circle(node_id)
    tol = REL_TOL * g.outer.circle.radius
    out = []
    for sat_id in tangency_map(g)[node_id]:
        p = tangency_point(host, g.circle(sat_id), tol)
        out.append(SatelliteEntry(sat_id, p, angular_position(host, p, tol)))
    out.sort(key=lambda e: (e.angle_deg - entry_deg) % 360.0)
    return out


def is_eligible(g: Gasket, current_id: int, satellite_id: int,
                visited: set[int]) -> bool:
    """Hierarchical eligibility: unvisited, not the outer circle, and the
    satellite generation equals the host's or exceeds it by one."""
    if satellite_id == g.outer_id or satellite_id in visited:
        return False
    gen_c = g.nodes[current_id].generation
    gen_s = g.nodes[satellite_id].generation
    return gen_c <= gen_s <= gen_c + 1


def _intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    # Circular intervals, each given as (start, end) counter-clockwise.
    a0, alen = normalize_angle(a[0]), (a[1] - a[0]) % 360.0
    b0, blen = normalize_angle(b[0]), (b[1] - b[0]) % 360.0
    return ((b0 - a0) % 360.0) < alen or ((a0 - b0) % 360.0) < blen


def inward_turn_angle(host: Circle, occupied: list[tuple[float, float]],
                      delta: float, blocked=None) -> float:
    """Angular position for turning inward, clear of bridges and the entry.

    Tries -60 then 180 degrees, then scans downward from -60 in one-degree
    steps.  A candidate's own bridge window, widened by 50 percent, must not
    overlap any occupied window; ``blocked``, when given, vetoes candidates
    whose corridor would collide with interior circles.
    """
    rho = host.radius - delta
    half = INWARD_CLEARANCE * math.degrees(math.asin(delta / rho))

    def clear(theta: float) -> bool:
        window = (theta - half, theta + half)
        if any(_intervals_overlap(window, occ) for occ in occupied):
            return False
        return blocked is None or not blocked(theta)

    for theta in INWARD_PREFERRED:
        if clear(theta):
            return normalize_angle(theta)
    for k in range(1, 360):
        theta = -60.0 - float(k)
        if clear(theta):
            return normalize_angle(theta)
    raise NoInwardAngle("no clear inward-turn position after a full scan")


@dataclass(slots=True)
class _Context:
    """One gasket level being traced (the top level or one interior).

    Interior levels are rendered through a similarity (uniform scale plus
    translation) that insets them into the host's drawn contour: without it,
    interior circles would remain tangent to the host after shrinking, since
    shrinking both sides of an internal tangency does not separate them.  The
    inset leaves a clearance of twice the shrink distance, matching the gap
    between externally tangent circles, and the per-level displacement stays
    below the shrink distance.
    """

    gasket: Gasket
    prefix: tuple[int, ...]
    adjacency: dict[int, list[int]]
    visited_ids: set[int]
    scale: float = 1.0
    dx: float = 0.0
    dy: float = 0.0

    def render(self, circle: Circle) -> Circle:
        return Circle(Point(self.scale * circle.center.x + self.dx,
                            self.scale * circle.center.y + self.dy),
                      self.scale * circle.radius, circle.enclosing)


class _Tracer:
    def __init__(self, g: Gasket, delta: float, nested: bool):
        if not (delta > 0.0 and math.isfinite(delta)):
            raise ValueError(f"delta must be positive, got {delta!r}")
        if delta > g.r_min / 4.0 + 1e-15 * g.r_min:
            raise DeltaTooLarge(
                f"delta {delta!r} exceeds a quarter of the stop radius {g.r_min!r}")
        self.delta = delta
        self.nested = nested
        self.top = g
        self.tol = REL_TOL * g.outer.circle.radius
        self.visited: set[tuple[int, ...]] = set()
        self.elements: list[PathElement] = []

    # -- per-circle geometry helpers ------------------------------------

    def _drawn_radius(self, circle: Circle) -> float:
        rho = circle.radius - self.delta
        assert rho > 0.0
        return rho

    def _half_window(self, circle: Circle) -> float:
        return math.degrees(math.asin(self.delta / self._drawn_radius(circle)))

    # -- main walk -------------------------------------------------------

    def run(self) -> tuple[TracePath, TraceTree]:
        ctx = _Context(self.top, (), tangency_map(self.top), set())
        root = self._walk_circle(ctx, 1, ROOT_ENTRY_DEG, 360.0, +1,
                                 entry_gap=None)
        path = TracePath(self.elements, self.delta)
        tree = TraceTree(root)
        expected = _expected_keys(self.top, (), self.nested)
        if self.visited != expected:
            missing = len(expected - self.visited)
            raise UnreachedNodes(f"{missing} circles were never traced")
        assert distance(path.start, path.end) <= 1e-9 * self.top.outer.circle.radius
        return path, tree

    def _walk_circle(self, ctx: _Context, node_id: int, span_start: float,
                     sweep_len: float, o: int,
                     entry_gap: tuple[float, float] | None) -> TraceNode:
        """Trace one circle's contour from its entry span, recursing on
        eligible satellites and (when nested) into its interior."""
        node = ctx.gasket.nodes[node_id]
        key = ctx.prefix + (node_id,)
        self.visited.add(key)
        ctx.visited_ids.add(node_id)
        circle = ctx.render(node.circle)
        rho = self._drawn_radius(circle)
        alpha = self._half_window(circle)
        tnode = TraceNode(key, span_start, o)

        def offset(angle: float) -> float:
            return ((angle - span_start) * o) % 360.0

        def unrolled(off: float) -> float:
            return span_start + o * off

        # Candidate excursions, probed before walking (recursion may visit
        # some of these satellites first; they are re-checked on approach).
        events: list[tuple[float, str, object]] = []
        occupied: list[tuple[float, float]] = []
        if entry_gap is not None:
            occupied.append(entry_gap)
        else:
            occupied.append((span_start - alpha, span_start + alpha))
        for sat_id in ctx.adjacency[node_id]:
            if not is_eligible(ctx.gasket, node_id, sat_id, ctx.visited_ids):
                continue
            p = tangency_point(circle, ctx.render(ctx.gasket.circle(sat_id)),
                               self.tol)
            phi = angular_position(circle, p, self.tol)
            events.append((offset(phi), "satellite", (sat_id, phi)))
            occupied.append((phi - alpha, phi + alpha))
        if self.nested and node.interior is not None:
            theta = self._plan_inward(ctx, node, circle, rho, occupied)
            events.append((offset(theta), "inward", theta))
        events.sort(key=lambda ev: ev[0])

        cursor = 0.0
        for off, kind, payload in events:
            if kind == "satellite":
                sat_id, phi = payload
                sat_key = ctx.prefix + (sat_id,)
                if sat_key in self.visited:
                    continue
                cursor = self._satellite_excursion(
                    ctx, tnode, circle, rho, alpha, o, unrolled, cursor,
                    off, sat_id, phi)
            else:
                cursor = self._inward_excursion(
                    ctx, tnode, node, circle, rho, o, offset, unrolled,
                    cursor, payload)
        self._emit_arc(key, circle.center, rho, unrolled(cursor),
                       unrolled(sweep_len))
        return tnode

    def _emit_arc(self, key, center, rho, start_deg, end_deg) -> None:
        if abs(end_deg - start_deg) > 1e-12:
            self.elements.append(Arc(key, center, rho, start_deg, end_deg))

    def _satellite_excursion(self, ctx, tnode, circle, rho, alpha, o,
                             unrolled, cursor, off, sat_id, phi) -> float:
        sat_circle = ctx.render(ctx.gasket.circle(sat_id))
        sat_rho = self._drawn_radius(sat_circle)
        sat_alpha = self._half_window(sat_circle)
        off_in = off - alpha
        off_out = off + alpha
        assert off_in >= cursor - 1e-9, "excursion window overlaps the previous one"
        self._emit_arc(tnode.key, circle.center, rho,
                       unrolled(cursor), unrolled(off_in))
        # Corridor along the center line: enter on the wall the walk meets
        # first, return on the other; the satellite keeps the orientation.
        facing = phi + 180.0
        psi_in = facing + o * sat_alpha
        psi_out = facing - o * sat_alpha
        host_in = point_on_circle(circle.center, rho, unrolled(off_in))
        host_out = point_on_circle(circle.center, rho, unrolled(off_out))
        sat_in = point_on_circle(sat_circle.center, sat_rho, psi_in)
        sat_out = point_on_circle(sat_circle.center, sat_rho, psi_out)
        self.elements.append(BridgeWall(host_in, sat_in))
        child = self._walk_circle(ctx, sat_id, normalize_angle(psi_in),
                                  360.0 - 2.0 * sat_alpha, o,
                                  entry_gap=(psi_out, psi_in) if o == +1
                                  else (psi_in, psi_out))
        self.elements.append(BridgeWall(sat_out, host_out))
        tnode.excursions.append(Excursion(
            "satellite", phi,
            (normalize_angle(unrolled(off_in)), normalize_angle(unrolled(off_out))),
            child))
        return off_out

    def _interior_context(self, ctx: _Context, node, host_circle: Circle,
                          key: tuple[int, ...]) -> _Context:
        """Similarity placing the interior inside the host's drawn contour.

        The inset leaves a clearance of one shrink distance between interior
        circles and the host contour; insets compound multiplicatively down
        the nesting chain but stay bounded away from zero, which keeps the
        shrink distance below a third of every rendered radius.
        """
        f = 1.0 - self.delta / host_circle.radius
        scale = ctx.scale * f
        true_center = node.circle.center
        return _Context(node.interior, key, tangency_map(node.interior), set(),
                        scale,
                        host_circle.center.x - scale * true_center.x,
                        host_circle.center.y - scale * true_center.y)

    def _nearest_main(self, sub_ctx: _Context, turn_point: Point):
        mains = [sub_ctx.gasket.nodes[i] for i in (1, 2, 3)]
        return min(mains,
                   key=lambda n: distance(turn_point,
                                          sub_ctx.render(n.circle).center)
                   - sub_ctx.scale * n.circle.radius)

    def _plan_inward(self, ctx: _Context, node, circle: Circle, rho: float,
                     occupied: list[tuple[float, float]]) -> float:
        """Pick the inward-turn angle: window-clear on the host and with a
        corridor that threads between the interior's circles."""
        key = ctx.prefix + (node.id,)
        sub_ctx = self._interior_context(ctx, node, circle, key)
        interior = sub_ctx.gasket
        centers = np.array([[sub_ctx.scale * n.circle.center.x + sub_ctx.dx,
                             sub_ctx.scale * n.circle.center.y + sub_ctx.dy]
                            for n in interior.nodes])
        drawn = np.array([sub_ctx.scale * n.circle.radius - self.delta
                          for n in interior.nodes])
        d = self.delta

        def blocked(theta: float) -> bool:
            p0 = point_on_circle(circle.center, rho, theta)
            target = self._nearest_main(sub_ctx, p0)
            t_circle = sub_ctx.render(target.circle)
            t_rho = t_circle.radius - d
            p = np.array([p0.x, p0.y])
            w = np.array([t_circle.center.x, t_circle.center.y]) - p
            w_e = float(np.hypot(*w))
            v = w / w_e
            end = p + (w_e - math.sqrt(t_rho * t_rho - d * d)) * v
            dists = _point_segment_distance(centers, p, end)
            dists[0] = np.inf  # the outer circle is the host itself
            dists[target.id] = np.inf
            return bool((dists < drawn + 1.25 * d).any())

        return inward_turn_angle(circle, occupied, self.delta, blocked)

    def _inward_excursion(self, ctx, tnode, node, circle, rho, o, offset,
                          unrolled, cursor, theta) -> float:
        turn_point = point_on_circle(circle.center, rho, theta)
        sub_ctx = self._interior_context(ctx, node, circle, tnode.key)
        target = self._nearest_main(sub_ctx, turn_point)
        t_circle = sub_ctx.render(target.circle)
        t_rho = self._drawn_radius(t_circle)

        # Corridor along the line from the turn point to the target center.
        w_e = distance(turn_point, t_circle.center)
        vx = (t_circle.center.x - turn_point.x) / w_e
        vy = (t_circle.center.y - turn_point.y) / w_e
        nx, ny = -vy, vx
        qx = turn_point.x - circle.center.x
        qy = turn_point.y - circle.center.y
        qv = qx * vx + qy * vy
        qn = qx * nx + qy * ny
        d = self.delta
        t_t = w_e - math.sqrt(t_rho * t_rho - d * d)
        assert t_t > 0.0, "inward corridor has no positive length"

        sides = {}
        for sigma in (-1.0, 1.0):
            disc = qv * qv - (d * d + 2.0 * sigma * d * qn)
            assert disc > 0.0, "inward corridor wall misses the host contour"
            t_h = -qv - math.sqrt(disc)
            hx = turn_point.x + t_h * vx + sigma * d * nx
            hy = turn_point.y + t_h * vy + sigma * d * ny
            host_ang = math.degrees(math.atan2(hy - circle.center.y,
                                               hx - circle.center.x))
            tx = turn_point.x + t_t * vx + sigma * d * nx
            ty = turn_point.y + t_t * vy + sigma * d * ny
            target_ang = math.degrees(math.atan2(ty - t_circle.center.y,
                                                 tx - t_circle.center.x))
            sides[sigma] = (offset(host_ang), host_ang, target_ang)

        enter, exit_ = sorted(sides.values(), key=lambda s: s[0])
        off_in, a_in, psi_in = enter
        off_out, a_out, psi_out = exit_
        assert off_in >= cursor - 1e-9, "inward window overlaps an excursion"
        self._emit_arc(tnode.key, circle.center, rho,
                       unrolled(cursor), unrolled(off_in))
        host_in = point_on_circle(circle.center, rho, a_in)
        host_out = point_on_circle(circle.center, rho, a_out)
        t_in = point_on_circle(t_circle.center, t_rho, psi_in)
        t_out = point_on_circle(t_circle.center, t_rho, psi_out)
        self.elements.append(BridgeWall(host_in, t_in))

        o_in = -o  # interiors flip orientation, else the bridge would cross
        sweep_child = ((psi_out - psi_in) * o_in) % 360.0
        assert sweep_child > 180.0, "inward entry spans the wrong way around"
        child = self._walk_circle(sub_ctx, target.id, psi_in, sweep_child,
                                  o_in,
                                  entry_gap=(psi_out, psi_in) if o_in == +1
                                  else (psi_in, psi_out))
        self.elements.append(BridgeWall(t_out, host_out))
        tnode.excursions.append(Excursion(
            "inward", normalize_angle(theta),
            (normalize_angle(a_in), normalize_angle(a_out)), child))
        return off_out


def _point_segment_distance(pts: np.ndarray, a: np.ndarray,
                            b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(pts - proj).T)


def _expected_keys(g: Gasket, prefix: tuple[int, ...],
                   nested: bool) -> set[tuple[int, ...]]:
    keys = set()
    for node in g.nodes:
        if node.id == g.outer_id:
            continue
        key = prefix + (node.id,)
        keys.add(key)
        if nested and node.interior is not None:
            keys |= _expected_keys(node.interior, key, nested)
    return keys


def trace(g: Gasket, delta: float) -> tuple[TracePath, TraceTree]:
    """Trace a plain configuration into one closed non-crossing curve."""
    return _Tracer(g, delta, nested=False).run()


def trace_nested(g: Gasket, delta: float) -> tuple[TracePath, TraceTree]:
    """Trace a nested configuration, descending into interiors."""
    return _Tracer(g, delta, nested=True).run()


# -- self-intersection check ---------------------------------------------


def flatten(path: TracePath, sample_step: float) -> np.ndarray:
    """Polyline points along the path, no piece longer than the given step."""
    if sample_step <= 0.0:
        raise ValueError("sample step must be positive")
    chunks: list[np.ndarray] = []
    last = None
    for el in path.elements:
        if isinstance(el, Arc):
            n = max(1, math.ceil(el.length() / sample_step))
            angles = np.radians(np.linspace(el.start_deg, el.end_deg, n + 1))
            seg = np.column_stack([el.center.x + el.radius * np.cos(angles),
                                   el.center.y + el.radius * np.sin(angles)])
        else:
            n = max(1, math.ceil(el.length() / sample_step))
            ts = np.linspace(0.0, 1.0, n + 1)[:, None]
            p0 = np.array([el.start.x, el.start.y])
            p1 = np.array([el.end.x, el.end.y])
            seg = p0 + ts * (p1 - p0)
        if last is not None and np.allclose(last, seg[0], rtol=1e-9, atol=1e-12):
            seg = seg[1:]
        chunks.append(seg)
        last = seg[-1]
    arr = np.concatenate(chunks)
    # Drop the duplicated closing point; the wrap segment closes the loop.
    if np.allclose(arr[0], arr[-1], rtol=0.0, atol=1e-9 * _scale(arr)):
        arr = arr[:-1]
    return arr


def _scale(points: np.ndarray) -> float:
    return float(np.abs(points).max() or 1.0)


def is_simple(path: TracePath, sample_step: float) -> bool:
    """True when no two non-adjacent flattened segments intersect.

    Segments are bucketed on a uniform grid sized by the longest segment;
    candidate pairs come from neighboring cells only and are tested in
    batches, bailing out on the first hit.
    """
    pts = flatten(path, sample_step)
    n = len(pts)
    if n < 4:
        return True
    a = pts
    b = np.roll(pts, -1, axis=0)  # segment i: a[i] -> b[i], closed
    lengths = np.hypot(*(b - a).T)
    cell = max(float(lengths.max()), 1e-12)
    ij = np.floor(np.minimum(a, b) / cell).astype(np.int64)

    buckets: dict[tuple[int, int], list[int]] = {}
    for idx in range(n):
        buckets.setdefault((int(ij[idx, 0]), int(ij[idx, 1])), []).append(idx)

    neighbor = [(0, 0), (1, 0), (0, 1), (1, 1), (1, -1)]
    batch_i: list[int] = []
    batch_j: list[int] = []

    def flush() -> bool:
        i = np.asarray(batch_i)
        j = np.asarray(batch_j)
        batch_i.clear()
        batch_j.clear()
        lo = np.minimum(i, j)
        hi = np.maximum(i, j)
        keep = ~((hi - lo == 1) | ((lo == 0) & (hi == n - 1)) | (lo == hi))
        i, j = i[keep], j[keep]
        if len(i) == 0:
            return False
        return bool(_segments_intersect(a[i], b[i], a[j], b[j]).any())

    for (cx, cy), members in buckets.items():
        for dx, dy in neighbor:
            other = buckets.get((cx + dx, cy + dy))
            if other is None:
                continue
            if dx == 0 and dy == 0:
                for u in range(len(members)):
                    for v in range(u + 1, len(members)):
                        batch_i.append(members[u])
                        batch_j.append(members[v])
            else:
                for u in members:
                    for v in other:
                        batch_i.append(u)
                        batch_j.append(v)
        if len(batch_i) >= 262144:
            if flush():
                return False
    if batch_i and flush():
        return False
    return True


def _segments_intersect(p1, p2, p3, p4) -> np.ndarray:
    """Vectorized proper/touching intersection test for segment pairs."""

    def cross(o, q, r):
        return ((q[:, 0] - o[:, 0]) * (r[:, 1] - o[:, 1])
                - (q[:, 1] - o[:, 1]) * (r[:, 0] - o[:, 0]))

    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) \
        & (((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0)))

    def on_segment(o, q, r):
        return ((np.minimum(o[:, 0], q[:, 0]) <= r[:, 0])
                & (r[:, 0] <= np.maximum(o[:, 0], q[:, 0]))
                & (np.minimum(o[:, 1], q[:, 1]) <= r[:, 1])
                & (r[:, 1] <= np.maximum(o[:, 1], q[:, 1])))

    touching = ((d1 == 0) & on_segment(p3, p4, p1)) \
        | ((d2 == 0) & on_segment(p3, p4, p2)) \
        | ((d3 == 0) & on_segment(p1, p2, p3)) \
        | ((d4 == 0) & on_segment(p1, p2, p4))
    return proper | touching
