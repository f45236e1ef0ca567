"""Self-describing JSON documents for gaskets, paths, and reports.

Floats go through ``repr`` (shortest round-trip form), so a document reloads
to bit-identical values and identical runs produce byte-identical files.
"""
from __future__ import annotations

import json
from io import StringIO

from .analysis import AnalysisReport
from .gasket import Gasket, GasketNode
from .geometry import Circle, Point
from .tracer import Arc, BridgeWall, TracePath

GASKET_FORMAT = "apollopath-gasket"
PATH_FORMAT = "apollopath-path"
REPORT_FORMAT = "apollopath-report"


def gasket_to_doc(g: Gasket) -> dict:
    return {
        "format": GASKET_FORMAT,
        "version": 1,
        "seed_style": g.seed_style,
        "r_min": g.r_min,
        "nodes": [_node_to_doc(n) for n in g.nodes],
    }


def _node_to_doc(n: GasketNode) -> dict:
    return {
        "id": n.id,
        "x": n.circle.center.x,
        "y": n.circle.center.y,
        "radius": n.circle.radius,
        "enclosing": n.circle.enclosing,
        "parents": list(n.parents),
        "generation": n.generation,
        "interior": None if n.interior is None else gasket_to_doc(n.interior),
    }


def gasket_from_doc(doc: dict) -> Gasket:
    if doc.get("format") != GASKET_FORMAT:
        raise ValueError(f"not a gasket document: format={doc.get('format')!r}")
    nodes = []
    for nd in doc["nodes"]:
        circle = Circle(Point(nd["x"], nd["y"]), nd["radius"], nd["enclosing"])
        interior = None if nd["interior"] is None else gasket_from_doc(nd["interior"])
        nodes.append(GasketNode(nd["id"], circle, tuple(nd["parents"]),
                                nd["generation"], interior))
    return Gasket(nodes, r_min=doc["r_min"], seed_style=doc["seed_style"])


def _key_str(key: tuple[int, ...]) -> str:
    return "/".join(str(k) for k in key)


def _key_from_str(s: str) -> tuple[int, ...]:
    return tuple(int(part) for part in s.split("/"))


def path_to_doc(path: TracePath) -> dict:
    elements = []
    for el in path.elements:
        if isinstance(el, Arc):
            elements.append({
                "type": "arc",
                "node": _key_str(el.key),
                "x": el.center.x,
                "y": el.center.y,
                "radius": el.radius,
                "start_deg": el.start_deg,
                "end_deg": el.end_deg,
            })
        else:
            elements.append({
                "type": "wall",
                "x0": el.start.x,
                "y0": el.start.y,
                "x1": el.end.x,
                "y1": el.end.y,
            })
    return {
        "format": PATH_FORMAT,
        "version": 1,
        "delta": path.delta,
        "closed": path.closed,
        "elements": elements,
    }


def path_from_doc(doc: dict) -> TracePath:
    if doc.get("format") != PATH_FORMAT:
        raise ValueError(f"not a path document: format={doc.get('format')!r}")
    elements = []
    for ed in doc["elements"]:
        if ed["type"] == "arc":
            elements.append(Arc(_key_from_str(ed["node"]),
                                Point(ed["x"], ed["y"]), ed["radius"],
                                ed["start_deg"], ed["end_deg"]))
        elif ed["type"] == "wall":
            elements.append(BridgeWall(Point(ed["x0"], ed["y0"]),
                                       Point(ed["x1"], ed["y1"])))
        else:
            raise ValueError(f"unknown element type {ed['type']!r}")
    return TracePath(elements, delta=doc["delta"], closed=doc["closed"])


def report_to_doc(report: AnalysisReport, meta: dict | None = None) -> dict:
    doc = {
        "format": REPORT_FORMAT,
        "version": 1,
        "samples": [{"r_min": r, "total_length": l} for r, l in report.samples],
        "log2_r_min": [None if r <= 0 else _log2(r) for r, _ in report.samples],
        "log2_length": [None if l <= 0 else _log2(l) for _, l in report.samples],
        "slope": report.slope,
        "slope_stderr": _nan_to_none(report.slope_stderr),
        "dimension_estimate": report.dimension_estimate,
    }
    if meta:
        doc["config"] = meta
    return doc


def _log2(x: float) -> float:
    import math
    return math.log2(x)


def _nan_to_none(x):
    import math
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def report_to_csv(report: AnalysisReport) -> str:
    buf = StringIO()
    buf.write("r_min,total_length\n")
    for r, l in report.samples:
        buf.write(f"{r!r},{l!r}\n")
    return buf.getvalue()


def dumps(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def write_doc(doc: dict, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(doc))


def read_doc(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
