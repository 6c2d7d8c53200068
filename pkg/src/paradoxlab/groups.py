"""Per-group re-analysis and the attribute-on-neighbor-mean regression."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from paradoxlab.errors import ParadoxError
from paradoxlab.graph import AttributedGraph, neighbor_table
from paradoxlab.metrics import (
    CorrelationResult,
    correlate_degree_attribute,
    count_paradox_attribute,
    count_paradox_degree,
)
from paradoxlab.mixture import GroupLabel
from paradoxlab.reports import ParadoxReport
from paradoxlab.resampling import bootstrap, summarize

MIN_GROUP = 10


@dataclass(frozen=True)
class RegressionResult:
    """OLS fit of own attribute on mean neighbor attribute.

    ``f_statistic`` is ``inf`` for a perfect fit.
    """

    slope: float
    intercept: float
    f_statistic: float
    p_value: float
    n: int

    def metric_rows(self, prefix: str = "") -> Iterator[tuple]:
        for name in ("slope", "intercept", "f_statistic", "p_value"):
            yield (prefix + name, getattr(self, name), None, None, self.n)


@dataclass(frozen=True)
class GroupReport:
    group: str
    n: int
    degree_paradox: ParadoxReport
    attribute_paradox: ParadoxReport
    correlation: CorrelationResult | None
    regression: RegressionResult | None

    def metric_rows(self, prefix: str = "") -> Iterator[tuple]:
        p = f"{prefix}{self.group.lower()}."
        yield (p + "n", self.n, None, None, None)
        yield from self.degree_paradox.metric_rows(p + "degree_paradox.")
        yield from self.attribute_paradox.metric_rows(p + "attribute_paradox.")
        if self.correlation is not None:
            yield from self.correlation.metric_rows(p)
        if self.regression is not None:
            yield from self.regression.metric_rows(p)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, 10000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, d1: float, d2: float) -> float:
    """Upper tail P(F > f) of the F(d1, d2) distribution."""
    if math.isinf(f):
        return 0.0
    if f <= 0.0:
        return 1.0
    return betainc_regularized(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))


def ols(x: np.ndarray, y: np.ndarray) -> RegressionResult:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(x)
    if n < 3:
        raise ParadoxError("regression needs at least 3 points")
    mx, my = x.mean(), y.mean()
    dx, dy = x - mx, y - my
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ParadoxError("constant regressor")
    slope = float(dx @ dy) / sxx
    intercept = float(my - slope * mx)
    resid = dy - slope * dx
    sse = float(resid @ resid)
    ssr = slope * slope * sxx
    df = n - 2
    if sse <= 1e-24 * max(ssr, np.finfo(float).tiny):
        return RegressionResult(slope, intercept, math.inf, 0.0, n)
    f = ssr / (sse / df)
    return RegressionResult(slope, intercept, f, f_sf(f, 1, df), n)


def regression_inputs(g: AttributedGraph, subjects=None) -> tuple[np.ndarray, np.ndarray]:
    t = neighbor_table(g)
    mask = g.has_attribute & (t.attributed_neighbors > 0)
    if subjects is not None:
        sel = np.zeros(g.n, dtype=bool)
        sel[np.asarray(subjects, dtype=np.int64)] = True
        mask &= sel
    return t.mean_neighbor_attribute[mask], g.attribute[mask]


def regress_attr_on_neighbor_mean(g: AttributedGraph, subjects=None) -> RegressionResult:
    """OLS of own attribute on mean neighbor attribute, with an F test of slope 0."""
    x, y = regression_inputs(g, subjects)
    return ols(x, y)


def _optional(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ParadoxError:
        return None


def analyze_subjects(
    g: AttributedGraph,
    nodes=None,
    bootstrap_reps: int = 0,
    sample_frac: float = 0.1,
    seed: int = 0,
    level: float = 0.95,
    percentiles: tuple[float, float] | None = None,
    workers: int = 1,
) -> dict:
    """Paradox fractions with bootstrap intervals, correlation and regression."""
    deg = count_paradox_degree(g, nodes)
    att = count_paradox_attribute(g, nodes)
    out = {}
    for name, count, stat in (
        ("degree_paradox", deg, "degree_paradox"),
        ("attribute_paradox", att, "attribute_paradox"),
    ):
        dist = None
        if bootstrap_reps:
            dist = bootstrap(g, stat, sample_frac, bootstrap_reps, seed, nodes=nodes, workers=workers)
        out[name] = summarize(count.fraction, dist, name, level, percentiles, count.eligible)
    out["correlation"] = _optional(correlate_degree_attribute, g, nodes)
    out["regression"] = _optional(regress_attr_on_neighbor_mean, g, nodes)
    return out


def group_report(
    g: AttributedGraph,
    labels: np.ndarray,
    group: GroupLabel | str,
    bootstrap_reps: int = 0,
    sample_frac: float = 0.1,
    seed: int = 0,
    level: float = 0.95,
    percentiles: tuple[float, float] | None = None,
    induced: bool = False,
    workers: int = 1,
) -> GroupReport:
    """Re-run the analysis over one group's subjects.

    By default every subject keeps its full-graph neighborhood, so the
    neighbor means match the plane the groups were cut from. ``induced=True``
    instead analyzes the subgraph induced by the group. Bootstrap draws
    ``sample_frac`` of the group's own eligible subjects.
    """
    group = GroupLabel[group.upper()] if isinstance(group, str) else GroupLabel(group)
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ValueError(f"labels must have one entry per node ({g.n})")
    members = np.flatnonzero(labels == group)
    if len(members) < MIN_GROUP:
        raise ParadoxError(f"group {group.name} has {len(members)} nodes; need at least {MIN_GROUP}")
    if induced:
        keep = labels == group
        sub = g.subgraph(keep)
        parts = analyze_subjects(sub, None, bootstrap_reps, sample_frac, seed, level, percentiles, workers)
    else:
        parts = analyze_subjects(g, members, bootstrap_reps, sample_frac, seed, level, percentiles, workers)
    return GroupReport(group.name, len(members), **parts)
