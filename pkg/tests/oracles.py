"""Structure-free oracles shared by the unit and acceptance tests.

Everything here works from raw distances and the curvature relation only, so
it stays independent of the gap-queue construction it is used to check.
"""
import math

from apollopath.geometry import descartes_curvatures, distance, tangent_circle_candidates

TOL = 1e-9


def quadratic_identity_error(ks):
    # (sum k)^2 = 2 * sum k^2 for four mutually tangent circles.
    lhs = sum(ks) ** 2
    rhs = 2.0 * sum(k * k for k in ks)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def brute_force_tangent_pairs(g):
    """All tangent circle pairs by raw distance checks."""
    pairs = set()
    tol = TOL * g.outer.circle.radius * 10.0
    for a in g.nodes:
        for b in g.nodes:
            if b.id <= a.id:
                continue
            d = distance(a.circle.center, b.circle.center)
            if a.circle.enclosing or b.circle.enclosing:
                expected = abs(a.circle.radius - b.circle.radius)
            else:
                expected = a.circle.radius + b.circle.radius
            if abs(d - expected) <= tol:
                pairs.add((a.id, b.id))
    return pairs


def assert_complete_by_enumeration(g):
    """Completeness: every tangent-triple child is present or below the stop.

    Enumerates mutually tangent triples from pairwise distances, solves both
    tangent circles for each, and checks that every solution with positive
    curvature either coincides with an existing node or has radius < r_min.
    """
    pairs = brute_force_tangent_pairs(g)
    adj = {n.id: set() for n in g.nodes}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    tol = TOL * g.outer.circle.radius * 10.0
    existing = [(n.circle.center, n.circle.radius) for n in g.nodes]
    triples = 0
    for a, b in pairs:
        for c in adj[a] & adj[b]:
            if c <= b:
                continue
            ca, cb, cc = g.circle(a), g.circle(b), g.circle(c)
            for k in set(descartes_curvatures(ca.curvature(), cb.curvature(),
                                              cc.curvature())):
                if k <= 0.0:
                    continue
                for cand in tangent_circle_candidates(ca, cb, cc, k, tol=tol):
                    present = any(
                        distance(cand.center, ctr) <= tol
                        and abs(cand.radius - r) <= tol
                        for ctr, r in existing)
                    assert present or cand.radius < g.r_min, (
                        f"missing circle r={cand.radius} at {cand.center}")
            triples += 1
    assert triples >= 1


def iter_parent_child_curvatures(g):
    """Curvature quadruples (three parents, child) for every generated node."""
    for node in g.nodes:
        if not node.parents:
            continue
        ks = [g.circle(p).curvature() for p in node.parents]
        ks.append(node.circle.curvature())
        yield node, ks
