"""Apollonian configuration builder: gap-queue completion and recursive nesting.

A configuration is grown from a three-circle seed by processing a FIFO queue
of curvilinear gaps.  Every gap yields exactly one inscribed circle, so no
duplicate detection is needed; a cheap coincidence assertion guards against
numerical surprises.  Circles below the stop radius are dropped and their
gaps never spawn.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .geometry import (
    REL_TOL,
    Circle,
    Point,
    descartes_curvatures,
    distance,
    tangent_circle_candidates,
)

# Radius ratio of three equal circles inscribed in a unit circle: 2*sqrt(3)-3.
THREE_EQUAL_RATIO = 2.0 * math.sqrt(3.0) - 3.0

TWO_EQUAL = "two-equal"
THREE_EQUAL = "three-equal"
CUSTOM = "custom"


class InvalidSeed(ValueError):
    """Seed circles fail mutual tangency or containment."""


class SeedTooSmall(ValueError):
    """Stop radius is not smaller than the outer circle."""


@dataclass(frozen=True, slots=True)
class CustomSeed:
    """Two caller-placed inner circles; validated for mutual tangency."""

    r1: float
    center1: Point
    r2: float
    center2: Point


@dataclass(frozen=True, slots=True)
class GasketNode:
    id: int
    circle: Circle
    parents: tuple[int, ...]
    generation: int
    interior: "Gasket | None" = None


@dataclass
class Gasket:
    """An Apollonian configuration; node 0 is the unique enclosing circle."""

    nodes: list[GasketNode]
    r_min: float
    seed_style: str
    outer_id: int = 0

    @property
    def outer(self) -> GasketNode:
        return self.nodes[self.outer_id]

    def circle(self, node_id: int) -> Circle:
        return self.nodes[node_id].circle

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(slots=True)
class Gap:
    """A curvilinear triangle bounded by three mutually tangent circles.

    The inscribed circle is solved once, at creation time; its center is the
    witness point locating the gap among the (up to two) regions the triple
    bounds.
    """

    triple: tuple[int, int, int]
    child: Circle

    @property
    def witness(self) -> Point:
        return self.child.center


def tangency_map(g: Gasket) -> dict[int, list[int]]:
    """Adjacency of tangent circle pairs, derived from construction structure.

    Tangencies in a gap-grown configuration are exactly the seed triangle plus
    each child against its three parents.
    """
    adj: dict[int, set[int]] = {n.id: set() for n in g.nodes}
    for a, b in ((0, 1), (0, 2), (1, 2)):
        adj[a].add(b)
        adj[b].add(a)
    for node in g.nodes:
        for p in node.parents:
            adj[node.id].add(p)
            adj[p].add(node.id)
    return {i: sorted(members) for i, members in adj.items()}


def _initial(outer_radius: float, style, center: Point) -> Gasket:
    if not (outer_radius > 0.0 and math.isfinite(outer_radius)):
        raise InvalidSeed(f"outer radius must be positive, got {outer_radius!r}")
    outer = Circle(center, outer_radius, enclosing=True)
    if isinstance(style, CustomSeed):
        c1 = Circle(style.center1, style.r1)
        c2 = Circle(style.center2, style.r2)
        _validate_seed(outer, c1, c2)
        style_name = CUSTOM
    elif style == TWO_EQUAL:
        r = outer_radius / 2.0
        c1 = Circle(Point(center.x - r, center.y), r)
        c2 = Circle(Point(center.x + r, center.y), r)
        style_name = TWO_EQUAL
    elif style == THREE_EQUAL:
        r = THREE_EQUAL_RATIO * outer_radius
        d = outer_radius - r
        c1 = Circle(Point(center.x + d * math.cos(math.radians(150.0)),
                          center.y + d * math.sin(math.radians(150.0))), r)
        c2 = Circle(Point(center.x + d * math.cos(math.radians(30.0)),
                          center.y + d * math.sin(math.radians(30.0))), r)
        style_name = THREE_EQUAL
    else:
        raise InvalidSeed(f"unknown seed style {style!r}")
    nodes = [
        GasketNode(0, outer, (), 0),
        GasketNode(1, c1, (), 0),
        GasketNode(2, c2, (), 0),
    ]
    return Gasket(nodes, r_min=min(c1.radius, c2.radius), seed_style=style_name)


def _validate_seed(outer: Circle, c1: Circle, c2: Circle) -> None:
    tol = REL_TOL * outer.radius
    for c in (c1, c2):
        if c.radius <= 0.0 or c.radius >= outer.radius:
            raise InvalidSeed(f"inner radius {c.radius!r} must be in (0, outer)")
        if abs(distance(outer.center, c.center) - (outer.radius - c.radius)) > tol:
            raise InvalidSeed("inner circle is not internally tangent to the outer")
    if abs(distance(c1.center, c2.center) - (c1.radius + c2.radius)) > tol:
        raise InvalidSeed("the two inner circles are not tangent to each other")


def initial_configuration(outer_radius: float, style="two-equal") -> Gasket:
    """Seed gasket: enclosing circle at the origin plus two inner circles.

    ``style`` is ``"two-equal"`` (half-radius pair on the x axis),
    ``"three-equal"`` (equal pair at 150 and 30 degrees whose third mate
    arises as the first completion child), or a :class:`CustomSeed`.
    """
    return _initial(outer_radius, style, Point(0.0, 0.0))


def _child_in_gap(a: Circle, b: Circle, c: Circle, exclude: Circle,
                  tol: float) -> Circle:
    """The one inscribed circle of a gap, excluding the already-known mate.

    The two tangent circles of a triple are its gap child and one other
    circle (an existing node, or the sibling gap's child); validation plus
    exclusion pins the child without tracking square-root branches.
    """
    kp, km = descartes_curvatures(a.curvature(), b.curvature(), c.curvature())
    cands: list[Circle] = []
    for k in ((kp,) if kp == km else (kp, km)):
        if k <= 0.0:
            continue
        cands.extend(tangent_circle_candidates(a, b, c, k, tol))
    keep = [cand for cand in cands
            if abs(cand.radius - exclude.radius) > tol
            or distance(cand.center, exclude.center) > tol]
    if len(keep) != 1:
        raise AssertionError(
            f"gap should have exactly one inscribed circle, found {len(keep)}")
    return keep[0]


def _seed_children(g: Gasket, tol: float) -> list[Circle]:
    """Both inscribed circles of the seed triple, upper first."""
    c0, c1, c2 = (g.nodes[i].circle for i in range(3))
    kp, km = descartes_curvatures(c0.curvature(), c1.curvature(), c2.curvature())
    cands: list[Circle] = []
    for k in ((kp,) if kp == km else (kp, km)):
        if k <= 0.0:
            continue
        cands.extend(tangent_circle_candidates(c0, c1, c2, k, tol))
    if len(cands) != 2:
        raise AssertionError(f"seed triple must bound two gaps, found {len(cands)}")
    cands.sort(key=lambda c: (-c.center.y, c.center.x))
    return cands


class _CoincidenceGuard:
    """Asserts that no two accepted circles coincide within tolerance."""

    def __init__(self, tol: float):
        self.h = 16.0 * tol
        self.tol = tol
        self.cells: dict[tuple[int, int], list[Circle]] = {}

    def add(self, c: Circle) -> None:
        cx = math.floor(c.center.x / self.h)
        cy = math.floor(c.center.y / self.h)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for other in self.cells.get((cx + dx, cy + dy), ()):
                    assert (distance(c.center, other.center) > self.tol
                            or abs(c.radius - other.radius) > self.tol), \
                        "two generated circles coincide"
        self.cells.setdefault((cx, cy), []).append(c)


def complete(g: Gasket, r_min: float) -> Gasket:
    """Add every gap circle of radius >= ``r_min``, breadth first.

    Expects a three-node seed gasket.  Gaps are processed FIFO; each popped
    gap's child is appended (when large enough) with the gap triple as its
    parents, and spawns the three sub-gaps obtained by swapping the child for
    one parent, in ascending-parent order.  Children below ``r_min`` are
    dropped together with their sub-gaps, which makes the result complete:
    every remaining gap's inscribed radius is below the stop radius.
    """
    if len(g.nodes) != 3:
        raise ValueError("complete() expects a three-node seed gasket")
    if not (r_min > 0.0 and math.isfinite(r_min)):
        raise ValueError(f"r_min must be positive, got {r_min!r}")
    outer_r = g.outer.circle.radius
    if r_min >= outer_r:
        raise SeedTooSmall(f"r_min {r_min!r} must be below the outer radius {outer_r!r}")
    tol = REL_TOL * outer_r

    nodes = list(g.nodes[:3])
    guard = _CoincidenceGuard(tol)
    for n in nodes[1:]:
        guard.add(n.circle)
    queue: deque[Gap] = deque()

    def circle_of(i: int) -> Circle:
        return nodes[i].circle

    def append_child(gap: Gap, generation: int | None = None) -> int:
        i = len(nodes)
        if generation is None:
            generation = 1 + max(nodes[p].generation for p in gap.triple)
        guard.add(gap.child)
        nodes.append(GasketNode(i, gap.child, gap.triple, generation))
        return i

    def spawn(gap: Gap, child_id: int) -> None:
        a, b, c = gap.triple
        for kept, dropped in (((a, b), c), ((a, c), b), ((b, c), a)):
            triple = (kept[0], kept[1], child_id)
            sub = _child_in_gap(circle_of(kept[0]), circle_of(kept[1]),
                                circle_of(child_id), exclude=circle_of(dropped),
                                tol=tol)
            queue.append(Gap(triple, sub))

    upper, lower = _seed_children(g, tol)
    if g.seed_style == THREE_EQUAL:
        # The third equal circle is the lower seed child; add it first, then
        # enqueue the central gap and the three outer gaps counter-clockwise
        # from the top.  It is an initial circle of the configuration, so it
        # keeps generation 0 even though the gap machinery constructs it
        # (otherwise a trace entering the interior through it could never
        # reach its generation-0 mates).
        third = Gap((0, 1, 2), lower)
        if third.child.radius < r_min:
            raise SeedTooSmall(
                "r_min excludes the third equal circle of a three-equal seed")
        third_id = append_child(third, generation=0)
        queue.append(Gap((1, 2, third_id),
                         _child_in_gap(circle_of(1), circle_of(2),
                                       circle_of(third_id),
                                       exclude=circle_of(0), tol=tol)))
        queue.append(Gap((0, 1, 2), upper))
        queue.append(Gap((0, 1, third_id),
                         _child_in_gap(circle_of(0), circle_of(1),
                                       circle_of(third_id),
                                       exclude=circle_of(2), tol=tol)))
        queue.append(Gap((0, 2, third_id),
                         _child_in_gap(circle_of(0), circle_of(2),
                                       circle_of(third_id),
                                       exclude=circle_of(1), tol=tol)))
    else:
        queue.append(Gap((0, 1, 2), upper))
        queue.append(Gap((0, 1, 2), lower))

    while queue:
        gap = queue.popleft()
        if gap.child.radius < r_min:
            continue
        child_id = append_child(gap)
        spawn(gap, child_id)

    return Gasket(nodes, r_min=r_min, seed_style=g.seed_style)


def nest(g: Gasket, r_min: float, min_host_radius: float | None = None) -> Gasket:
    """Attach a recursively completed three-equal interior to large hosts.

    Every non-outer node whose radius reaches ``min_host_radius`` (default:
    the radius whose three-equal interior circles themselves respect the stop
    radius, r_min / (2*sqrt(3)-3)) receives an interior gasket sharing its
    circle as the outer circle; interiors are nested recursively and shrink
    by a factor of at most 2*sqrt(3)-3 per level, so recursion terminates.
    """
    if min_host_radius is None:
        min_host_radius = r_min / THREE_EQUAL_RATIO
    new_nodes = []
    for node in g.nodes:
        interior = None
        if node.id != g.outer_id and node.circle.radius >= min_host_radius:
            seed = _initial(node.circle.radius, THREE_EQUAL, node.circle.center)
            interior = nest(complete(seed, r_min), r_min, min_host_radius)
        new_nodes.append(GasketNode(node.id, node.circle, node.parents,
                                    node.generation, interior))
    return Gasket(new_nodes, r_min=g.r_min, seed_style=g.seed_style)


def iter_gaskets(g: Gasket) -> Iterator[Gasket]:
    """This gasket and every nested interior, depth first."""
    yield g
    for node in g.nodes:
        if node.interior is not None:
            yield from iter_gaskets(node.interior)
