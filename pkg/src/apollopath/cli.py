"""Command-line front end: generate, trace, render, sweep, analyze.

Exit codes: 0 on success, 1 on validation errors, 2 on computation failures.
Every error prints a single ``error: ...`` line to stderr.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

from .analysis import iter_sweep, loglog_fit, sweep
from .gasket import CustomSeed, complete, initial_configuration, nest
from .geometry import Circle, Point
from .parametrize import convergence_report
from .serialize import (
    gasket_from_doc,
    gasket_to_doc,
    path_from_doc,
    path_to_doc,
    read_doc,
    report_to_csv,
    report_to_doc,
    write_doc,
)
from .svgout import path_to_svg
from .tracer import trace, trace_nested


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


@dataclass
class JobConfig:
    outer_radius: float = 1.0
    seed: object = "two-equal"
    r_min: float = 0.1
    delta: float | None = None  # defaults to r_min / 4
    nested: bool = False
    ratio: float = 0.5
    steps: int = 6
    grid_step: float | None = None
    sample_step: float | None = None
    out: str | None = None

    def validate(self) -> None:
        if not (self.outer_radius > 0.0 and math.isfinite(self.outer_radius)):
            raise ValueError(f"outer radius must be positive, got {self.outer_radius!r}")
        if not (self.r_min > 0.0 and math.isfinite(self.r_min)):
            raise ValueError(f"rmin must be positive, got {self.r_min!r}")
        if self.delta is not None:
            if not (0.0 < self.delta <= self.r_min / 4.0):
                raise ValueError(
                    f"delta must be in (0, rmin/4], got {self.delta!r}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"ratio must be in (0, 1), got {self.ratio!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps!r}")
        for name, value in (("grid-step", self.grid_step),
                            ("sample-step", self.sample_step)):
            if value is not None and value <= 0.0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def effective_delta(self) -> float:
        return self.r_min / 4.0 if self.delta is None else self.delta


def _parse_custom(text: str) -> CustomSeed:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 6:
        raise ValueError("custom seed needs six numbers: r1,x1,y1,r2,x2,y2")
    return CustomSeed(parts[0], Point(parts[1], parts[2]),
                      parts[3], Point(parts[4], parts[5]))


def _add_build_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--outer", type=float, default=1.0,
                   help="outer circle radius (default 1)")
    p.add_argument("--seed", choices=["two-equal", "three-equal", "custom"],
                   default="two-equal", help="seed style")
    p.add_argument("--custom", metavar="R1,X1,Y1,R2,X2,Y2",
                   help="inner circles for --seed custom")
    p.add_argument("--rmin", type=float, default=0.1,
                   help="stop radius: every circle at least this big is kept")
    p.add_argument("--nested", action="store_true",
                   help="fill large circles with recursive interior packings")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apollopath",
                     description="Apollonian circle packings traced as one line")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a configuration document")
    _add_build_flags(p)
    p.add_argument("--out", required=True, help="output gasket JSON")

    p = sub.add_parser("trace", help="build and trace to a path document + SVG")
    _add_build_flags(p)
    p.add_argument("--delta", type=float, default=None,
                   help="shrink distance (default rmin/4)")
    p.add_argument("--out", required=True, help="output path JSON (SVG beside it)")

    p = sub.add_parser("render", help="render a path document to SVG")
    p.add_argument("input", help="path JSON from the trace command")
    p.add_argument("--out", required=True, help="output SVG")

    p = sub.add_parser("sweep", help="length-versus-stop-radius sweep")
    _add_build_flags(p)
    p.add_argument("--ratio", type=float, default=0.5,
                   help="stop-radius shrink factor per step (default 0.5)")
    p.add_argument("--steps", type=int, default=6, help="number of steps")
    p.add_argument("--out", required=True, help="output CSV (plot JSON beside it)")

    p = sub.add_parser("analyze", help="convergence diagnostics over a sweep")
    _add_build_flags(p)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--grid-step", type=float, default=None,
                   help="density grid spacing (default outer/50)")
    p.add_argument("--sample-step", type=float, default=None,
                   help="path sampling step (default smallest delta)")
    p.add_argument("--out", required=True, help="output CSV")
    return parser


def _config_from_args(args) -> JobConfig:
    seed = getattr(args, "seed", "two-equal")
    if seed == "custom":
        if getattr(args, "custom", None) is None:
            raise ValueError("--seed custom requires --custom r1,x1,y1,r2,x2,y2")
        seed = _parse_custom(args.custom)
    cfg = JobConfig(outer_radius=getattr(args, "outer", 1.0), seed=seed,
                    r_min=getattr(args, "rmin", 0.1),
                    delta=getattr(args, "delta", None),
                    nested=getattr(args, "nested", False),
                    ratio=getattr(args, "ratio", 0.5),
                    steps=getattr(args, "steps", 6),
                    grid_step=getattr(args, "grid_step", None),
                    sample_step=getattr(args, "sample_step", None),
                    out=getattr(args, "out", None))
    cfg.validate()
    return cfg


def _build(cfg: JobConfig):
    g = complete(initial_configuration(cfg.outer_radius, cfg.seed), cfg.r_min)
    if cfg.nested:
        g = nest(g, cfg.r_min)
    return g


def _sibling(path: str, ext: str) -> str:
    root, _ = os.path.splitext(path)
    return root + ext


def cmd_generate(cfg: JobConfig) -> None:
    write_doc(gasket_to_doc(_build(cfg)), cfg.out)


def cmd_trace(cfg: JobConfig) -> None:
    g = _build(cfg)
    tracer = trace_nested if cfg.nested else trace
    path, _ = tracer(g, cfg.effective_delta)
    write_doc(path_to_doc(path), cfg.out)
    svg = path_to_svg(path, g.outer.circle)
    with open(_sibling(cfg.out, ".svg"), "w") as fh:
        fh.write(svg)


def cmd_render(cfg: JobConfig, input_path: str) -> None:
    path = path_from_doc(read_doc(input_path))
    # Fit the view to the drawn extent.
    xs = []
    ys = []
    for el in path.elements:
        for p in (el.start, el.end):
            xs.append(p.x)
            ys.append(p.y)
    cx = (max(xs) + min(xs)) / 2.0
    cy = (max(ys) + min(ys)) / 2.0
    r = max(max(xs) - min(xs), max(ys) - min(ys)) / 2.0 + 2.0 * path.delta
    svg = path_to_svg(path, Circle(Point(cx, cy), r, enclosing=True))
    with open(cfg.out, "w") as fh:
        fh.write(svg)


def cmd_sweep(cfg: JobConfig) -> None:
    report = sweep(cfg.outer_radius, cfg.seed, cfg.r_min, cfg.ratio,
                   cfg.steps, cfg.nested)
    with open(cfg.out, "w") as fh:
        fh.write(report_to_csv(report))
    meta = {"outer_radius": cfg.outer_radius,
            "seed": cfg.seed if isinstance(cfg.seed, str) else "custom",
            "r_min_start": cfg.r_min, "ratio": cfg.ratio,
            "steps": cfg.steps, "nested": cfg.nested}
    write_doc(report_to_doc(report, meta), _sibling(cfg.out, ".json"))


def cmd_analyze(cfg: JobConfig) -> None:
    grid_step = cfg.grid_step
    if grid_step is None:
        grid_step = cfg.outer_radius / 50.0
    traces = []
    smallest_delta = cfg.r_min / 4.0 * cfg.ratio ** (cfg.steps - 1)
    sample_step = cfg.sample_step
    if sample_step is None:
        sample_step = smallest_delta
    for step in iter_sweep(cfg.outer_radius, cfg.seed, cfg.r_min, cfg.ratio,
                           cfg.steps, cfg.nested):
        traces.append((step.index + 1, step.r_min, step.path))
    outer = Circle(Point(0.0, 0.0), cfg.outer_radius, enclosing=True)
    report = convergence_report(traces, outer, grid_step, sample_step)
    with open(cfg.out, "w") as fh:
        fh.write(report.to_csv())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "generate":
            cmd_generate(cfg)
        elif args.command == "trace":
            cmd_trace(cfg)
        elif args.command == "render":
            cmd_render(cfg, args.input)
        elif args.command == "sweep":
            cmd_sweep(cfg)
        elif args.command == "analyze":
            cmd_analyze(cfg)
    except Exception as exc:  # build/trace/io failures -> exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
