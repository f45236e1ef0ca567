"""Circle primitives: tangency, Descartes curvature/center solving, angular positions.

All angles are in degrees, normalized to (-180, 180], with 0 at 3 o'clock and
counter-clockwise positive.  Tolerances are absolute lengths; pass a value
scaled to your configuration (the builders use 1e-9 times the outer radius).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

REL_TOL = 1e-9


class NegativeDiscriminant(ValueError):
    """Curvature triple is not compatible with mutual tangency."""


class NoValidCenter(ValueError):
    """Neither candidate center satisfies the tangency-distance checks."""


class NotTangent(ValueError):
    """The two circles are not tangent within tolerance."""


class NotOnCircle(ValueError):
    """The point does not lie on the circle within tolerance."""


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class Circle:
    """A circle; ``enclosing`` marks an outer circle (negative curvature)."""

    center: Point
    radius: float
    enclosing: bool = False

    def curvature(self) -> float:
        return -1.0 / self.radius if self.enclosing else 1.0 / self.radius


def distance(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def normalize_angle(degrees: float) -> float:
    """Map an angle in degrees onto (-180, 180]."""
    a = math.fmod(degrees + 180.0, 360.0)
    if a <= 0.0:
        a += 360.0
    return a - 180.0


def point_on_circle(center: Point, radius: float, angle_deg: float) -> Point:
    a = math.radians(angle_deg)
    return Point(center.x + radius * math.cos(a), center.y + radius * math.sin(a))


def _default_tol(*circles: Circle) -> float:
    return REL_TOL * max(c.radius for c in circles)


def descartes_curvatures(k1: float, k2: float, k3: float,
                         tol: float | None = None) -> tuple[float, float]:
    """Both curvatures of a circle tangent to three mutually tangent circles.

    Args:
        k1, k2, k3: signed curvatures (negative for an enclosing circle).
        tol: discriminant clamp; values in [-tol, 0) are treated as exact
            zeros (roundoff on tangent triples).  Defaults to a relative
            tolerance scaled by the largest squared curvature.

    Returns:
        (k_plus, k_minus) with k_plus >= k_minus.
    """
    if tol is None:
        tol = REL_TOL * max(1.0, k1 * k1, k2 * k2, k3 * k3)
    disc = k1 * k2 + k2 * k3 + k3 * k1
    if disc < -tol:
        raise NegativeDiscriminant(
            f"k1*k2 + k2*k3 + k3*k1 = {disc!r} < 0; circles cannot be mutually tangent")
    if disc < 0.0:
        disc = 0.0
    root = 2.0 * math.sqrt(disc)
    s = k1 + k2 + k3
    return s + root, s - root


def _is_tangent_distance(a: Circle, b: Circle, tol: float) -> bool:
    d = distance(a.center, b.center)
    if a.enclosing or b.enclosing:
        expected = abs(a.radius - b.radius)
    else:
        expected = a.radius + b.radius
    return abs(d - expected) <= tol


def _contact_distance(c: Circle, r: float) -> float:
    """Center distance between ``c`` and a tangent interior circle of radius r."""
    return c.radius - r if c.enclosing else c.radius + r


def _trilaterate(a: Circle, b: Circle, r: float, near: Point) -> Point | None:
    """Center of a circle of radius ``r`` tangent to both a and b, nearest ``near``.

    Solved as a circle-circle intersection of the contact-distance circles;
    this avoids the catastrophic cancellation the complex Descartes formula
    suffers when its cross term nearly vanishes.
    """
    ra = _contact_distance(a, r)
    rb = _contact_distance(b, r)
    d = distance(a.center, b.center)
    if d <= 0.0:
        return None
    x = (d * d + ra * ra - rb * rb) / (2.0 * d)
    h2 = ra * ra - x * x
    if h2 < 0.0:
        if h2 < -1e-9 * ra * ra:
            return None
        h2 = 0.0
    h = math.sqrt(h2)
    ux = (b.center.x - a.center.x) / d
    uy = (b.center.y - a.center.y) / d
    px = a.center.x + x * ux
    py = a.center.y + x * uy
    p1 = Point(px - h * uy, py + h * ux)
    p2 = Point(px + h * uy, py - h * ux)
    return p1 if distance(p1, near) <= distance(p2, near) else p2


def tangent_circle_candidates(a: Circle, b: Circle, c: Circle, target_k: float,
                              tol: float | None = None) -> list[Circle]:
    """Validated circles of curvature ``target_k`` tangent to all of a, b, c.

    Both centers from the complex Descartes relation are computed and then
    polished by trilateration against the best-separated input pair (the raw
    formula loses half the significant digits when its cross term cancels).
    A candidate is kept only if its tangency distance to each input checks
    out.  The list has one or two entries (two when the triple bounds two
    congruent gaps).
    """
    if tol is None:
        tol = _default_tol(a, b, c)
    if target_k <= 0.0:
        raise ValueError(f"target curvature must be positive, got {target_k!r}")
    z1 = complex(a.center.x, a.center.y)
    z2 = complex(b.center.x, b.center.y)
    z3 = complex(c.center.x, c.center.y)
    k1, k2, k3 = a.curvature(), b.curvature(), c.curvature()
    linear = k1 * z1 + k2 * z2 + k3 * z3
    cross = cmath.sqrt(k1 * k2 * z1 * z2 + k2 * k3 * z2 * z3 + k3 * k1 * z3 * z1)
    r = 1.0 / target_k
    pairs = sorted(((a, b), (a, c), (b, c)),
                   key=lambda pq: distance(pq[0].center, pq[1].center),
                   reverse=True)
    out: list[Circle] = []
    for sign in (1.0, -1.0):
        z = (linear + 2.0 * sign * cross) / target_k
        raw = Point(z.real, z.imag)
        center = None
        for p, q in pairs:
            center = _trilaterate(p, q, r, raw)
            if center is not None:
                break
        if center is None:
            center = raw
        cand = Circle(center, r)
        if all(_is_tangent_distance(cand, other, tol) for other in (a, b, c)):
            if not any(_same_circle(cand, seen, tol) for seen in out):
                out.append(cand)
    return out


def _same_circle(a: Circle, b: Circle, tol: float) -> bool:
    return abs(a.radius - b.radius) <= tol and distance(a.center, b.center) <= tol


def solve_tangent_circle(a: Circle, b: Circle, c: Circle, target_k: float,
                         tol: float | None = None,
                         near: Point | None = None) -> Circle:
    """The circle of curvature ``target_k`` tangent to three mutually tangent circles.

    ``target_k`` must be one of the two ``descartes_curvatures`` outputs and
    positive (enclosing solutions are never constructed here).  When both
    candidate centers are valid (symmetric configurations), ``near`` picks the
    one closest to it; without ``near`` the first valid candidate is returned.
    """
    cands = tangent_circle_candidates(a, b, c, target_k, tol)
    if not cands:
        raise NoValidCenter(
            f"no tangent circle of curvature {target_k!r} fits the given triple")
    if near is not None and len(cands) > 1:
        cands.sort(key=lambda circ: distance(circ.center, near))
    return cands[0]


def tangency_point(a: Circle, b: Circle, tol: float | None = None) -> Point:
    """The single point where two tangent circles touch.

    External tangency: on the segment between centers, at distance r_a from
    a's center.  Internal tangency (one circle enclosing): on the ray from the
    enclosing center through the other center, at the enclosing radius.
    """
    if tol is None:
        tol = _default_tol(a, b)
    d = distance(a.center, b.center)
    if d <= tol:
        raise NotTangent("concentric circles cannot be tangent")
    internal = a.enclosing or b.enclosing or d < abs(a.radius + b.radius) - 2 * tol
    if internal:
        expected = abs(a.radius - b.radius)
        if abs(d - expected) > tol:
            raise NotTangent(f"centers {d!r} apart, internal tangency needs {expected!r}")
        outer, inner = (a, b) if a.radius >= b.radius else (b, a)
        ux = (inner.center.x - outer.center.x) / d
        uy = (inner.center.y - outer.center.y) / d
        return Point(outer.center.x + outer.radius * ux,
                     outer.center.y + outer.radius * uy)
    expected = a.radius + b.radius
    if abs(d - expected) > tol:
        raise NotTangent(f"centers {d!r} apart, external tangency needs {expected!r}")
    ux = (b.center.x - a.center.x) / d
    uy = (b.center.y - a.center.y) / d
    return Point(a.center.x + a.radius * ux, a.center.y + a.radius * uy)


def angular_position(c: Circle, p: Point, tol: float | None = None) -> float:
    """Angle of a point on a circle, degrees in (-180, 180], 0 at 3 o'clock."""
    if tol is None:
        tol = REL_TOL * c.radius
    dx = p.x - c.center.x
    dy = p.y - c.center.y
    r = math.hypot(dx, dy)
    if abs(r - c.radius) > tol:
        raise NotOnCircle(f"point at distance {r!r} from center, radius {c.radius!r}")
    return normalize_angle(math.degrees(math.atan2(dy, dx)))
