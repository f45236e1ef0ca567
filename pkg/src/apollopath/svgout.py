"""SVG rendering: the whole trace is one stroked path element.

Model coordinates have y up; SVG has y down, so y is negated and the arc
sweep flags are flipped accordingly.  Arcs are emitted as native elliptical
arc commands, never as polylines.
"""
from __future__ import annotations

from .gasket import Gasket
from .geometry import Circle
from .tracer import Arc, TracePath

SVG_HEADER = ('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              'viewBox="{vb}">\n')


def _fmt(x: float) -> str:
    return repr(float(x))


def _viewbox(outer: Circle, margin: float) -> str:
    r = outer.radius + margin
    x0 = outer.center.x - r
    y0 = -outer.center.y - r
    return f"{_fmt(x0)} {_fmt(y0)} {_fmt(2 * r)} {_fmt(2 * r)}"


def path_d(path: TracePath) -> str:
    """The ``d`` attribute: move, arcs and lines, close."""
    parts = []
    start = path.start
    parts.append(f"M {_fmt(start.x)} {_fmt(-start.y)}")
    for el in path.elements:
        end = el.end
        if isinstance(el, Arc):
            sweep = el.sweep_deg
            large = 1 if abs(sweep) > 180.0 else 0
            # Counter-clockwise in model coordinates is sweep flag 0 in SVG.
            flag = 0 if sweep >= 0.0 else 1
            r = _fmt(el.radius)
            parts.append(f"A {r} {r} 0 {large} {flag} "
                         f"{_fmt(end.x)} {_fmt(-end.y)}")
        else:
            parts.append(f"L {_fmt(end.x)} {_fmt(-end.y)}")
    parts.append("Z")
    return " ".join(parts)


def path_to_svg(path: TracePath, outer: Circle,
                stroke_width: float | None = None) -> str:
    """A complete SVG document with the trace as a single path element."""
    if stroke_width is None:
        stroke_width = path.delta / 2.0
    out = [SVG_HEADER.format(vb=_viewbox(outer, 2.0 * path.delta))]
    out.append(f'<path d="{path_d(path)}" fill="none" stroke="black" '
               f'stroke-width="{_fmt(stroke_width)}" '
               'stroke-linecap="round" stroke-linejoin="round"/>\n')
    out.append("</svg>\n")
    return "".join(out)


def gasket_to_svg(g: Gasket, stroke_width: float | None = None) -> str:
    """All configuration circles as outlines (a build preview, not a trace)."""
    outer = g.outer.circle
    if stroke_width is None:
        stroke_width = outer.radius / 400.0
    out = [SVG_HEADER.format(vb=_viewbox(outer, outer.radius * 0.01))]
    out.append(f'<g fill="none" stroke="black" '
               f'stroke-width="{_fmt(stroke_width)}">\n')

    def emit(gk: Gasket, skip_outer: bool) -> None:
        for node in gk.nodes:
            if skip_outer and node.id == gk.outer_id:
                continue  # an interior's outer circle is its host, already drawn
            c = node.circle
            out.append(f'<circle cx="{_fmt(c.center.x)}" cy="{_fmt(-c.center.y)}" '
                       f'r="{_fmt(c.radius)}"/>\n')
            if node.interior is not None:
                emit(node.interior, True)

    emit(g, False)
    out.append("</g>\n</svg>\n")
    return "".join(out)
