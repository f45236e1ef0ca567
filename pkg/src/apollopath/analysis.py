"""Path-length measurement, stop-radius sweeps, and dimension estimation.

Halving the stop radius roughly doubles a nested path's length; the slope of
the log-log line through (stop radius, length) estimates the curve's fractal
dimension as one minus the slope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .gasket import Gasket, complete, initial_configuration, nest
from .tracer import TracePath, TraceTree, trace, trace_nested


class DegenerateFit(ValueError):
    """Log-log fit impossible: all abscissae coincide."""


@dataclass
class AnalysisReport:
    """Sweep samples plus the fitted log-log slope.

    ``slope`` is None when fewer than two samples exist; ``slope_stderr`` is
    NaN when there are exactly two (no residual degrees of freedom).
    """

    samples: list[tuple[float, float]] = field(default_factory=list)
    slope: float | None = None
    slope_stderr: float | None = None

    @property
    def dimension_estimate(self) -> float | None:
        return None if self.slope is None else 1.0 - self.slope


def path_length(path: TracePath) -> float:
    """Exact length: arc radii times angular spans, plus wall lengths."""
    return sum(el.length() for el in path.elements)


def loglog_fit(samples: list[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log2(y) against log2(x), with its standard error.

    Returns (slope, stderr); stderr is NaN for two points.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples for a slope")
    if any(x <= 0.0 or y <= 0.0 for x, y in samples):
        raise ValueError("log-log fit needs positive values")
    xs = [math.log2(x) for x, _ in samples]
    ys = [math.log2(y) for _, y in samples]
    n = len(xs)
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    sxx = sum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        raise DegenerateFit("all abscissae are equal")
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sxx
    intercept = ybar - slope * xbar
    if n == 2:
        return slope, math.nan
    ssr = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    stderr = math.sqrt(ssr / (n - 2) / sxx)
    return slope, stderr


@dataclass
class SweepStep:
    index: int
    r_min: float
    delta: float
    gasket: Gasket
    path: TracePath
    tree: TraceTree
    length: float


def iter_sweep(outer_radius: float, seed_style, r_min_start: float,
               ratio: float, steps: int, nested: bool) -> Iterator[SweepStep]:
    """Build, trace, and measure one configuration per stop radius.

    The stop radius is r_min_start times ratio**k for k = 0..steps-1; the
    shrink distance follows it as a quarter of the stop radius.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio!r}")
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps!r}")
    for k in range(steps):
        r_min = r_min_start * ratio ** k
        delta = r_min / 4.0
        g = complete(initial_configuration(outer_radius, seed_style), r_min)
        if nested:
            g = nest(g, r_min)
            path, tree = trace_nested(g, delta)
        else:
            path, tree = trace(g, delta)
        yield SweepStep(k, r_min, delta, g, path, tree, path_length(path))


def sweep(outer_radius: float, seed_style, r_min_start: float, ratio: float,
          steps: int, nested: bool) -> AnalysisReport:
    """Sweep the stop radius and fit the log-log length line."""
    samples = [(st.r_min, st.length)
               for st in iter_sweep(outer_radius, seed_style, r_min_start,
                                    ratio, steps, nested)]
    report = AnalysisReport(samples)
    if len(samples) >= 2:
        report.slope, report.slope_stderr = loglog_fit(samples)
    return report
