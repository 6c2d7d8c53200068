"""Paradox fractions and degree-attribute correlation."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.stats import rankdata

from paradoxlab.errors import ParadoxError
from paradoxlab.graph import AttributedGraph

_COMPARATORS = {"<": operator.lt, "<=": operator.le}


@dataclass(frozen=True)
class ParadoxFlags:
    """Per-node paradox predicates with validity masks.

    ``degree_paradox[u]`` is meaningful only where ``degree_valid[u]``, and
    likewise for the attribute pair.
    """

    degree_paradox: np.ndarray
    degree_valid: np.ndarray
    attribute_paradox: np.ndarray
    attribute_valid: np.ndarray


@dataclass(frozen=True)
class ParadoxCount:
    hits: int
    eligible: int
    excluded: int

    @property
    def fraction(self) -> float:
        return self.hits / self.eligible


@dataclass(frozen=True)
class CorrelationResult:
    pearson_r: float
    spearman_rho: float
    n: int

    def metric_rows(self, prefix: str = "") -> Iterator[tuple]:
        yield (prefix + "pearson_r", self.pearson_r, None, None, self.n)
        yield (prefix + "spearman_rho", self.spearman_rho, None, None, self.n)


def attribute_below_mean(x: np.ndarray, neighbor_sum: np.ndarray, count: np.ndarray, comparator: str = "<") -> np.ndarray:
    """Compare values against neighbor means with a rounding-aware tie band.

    Attributes lie in [-1, 1], so a ``count``-term float sum is off by at most
    about ``count * eps``. Differences inside that band are ties, which keeps
    constant attributes from being flagged by summation rounding.
    """
    if count.ndim < x.ndim:
        count = count[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = neighbor_sum / count - x
    band = 4.0 * np.finfo(np.float64).eps * np.maximum(count, 1)
    if comparator == "<":
        return gap > band
    return gap >= -band


def compute_paradox_flags(g: AttributedGraph, comparator: str = "<") -> ParadoxFlags:
    """One pass over all neighborhoods.

    ``comparator`` switches between the strict definition (``"<"``) and the
    non-strict variant (``"<="``) used only for sensitivity checks. Degrees
    are compared exactly in integers.
    """
    if comparator not in _COMPARATORS:
        raise ValueError(f"unknown comparator {comparator!r}")
    cmp = _COMPARATORS[comparator]
    deg = g.degree
    A = g.adjacency
    present = g.has_attribute
    nbr_deg_sum = np.rint(A @ deg.astype(np.float64)).astype(np.int64)
    count = np.rint(A @ present.astype(np.float64)).astype(np.int64)
    attr_sum = A @ np.where(present, g.attribute, 0.0)

    degree_valid = deg > 0
    attribute_valid = present & (count > 0)
    degree_paradox = cmp(deg * deg, nbr_deg_sum) & degree_valid
    attribute_paradox = attribute_below_mean(g.attribute, attr_sum, count, comparator) & attribute_valid
    return ParadoxFlags(degree_paradox, degree_valid, attribute_paradox, attribute_valid)


def _count(flags: np.ndarray, valid: np.ndarray, nodes: np.ndarray | None) -> ParadoxCount:
    if nodes is not None:
        flags, valid = flags[nodes], valid[nodes]
    eligible = int(valid.sum())
    return ParadoxCount(int(flags[valid].sum()), eligible, len(valid) - eligible)


def count_paradox_degree(g: AttributedGraph, nodes=None, comparator: str = "<") -> ParadoxCount:
    if g.n == 0:
        raise ParadoxError("graph is empty")
    f = compute_paradox_flags(g, comparator)
    c = _count(f.degree_paradox, f.degree_valid, nodes)
    if c.eligible == 0:
        raise ParadoxError("no node with a defined neighborhood")
    return c


def count_paradox_attribute(g: AttributedGraph, nodes=None, comparator: str = "<") -> ParadoxCount:
    if g.n == 0:
        raise ParadoxError("graph is empty")
    f = compute_paradox_flags(g, comparator)
    c = _count(f.attribute_paradox, f.attribute_valid, nodes)
    if c.eligible == 0:
        raise ParadoxError("no attributed node with an attributed neighbor")
    return c


def paradox_fraction_degree(g: AttributedGraph, comparator: str = "<") -> float:
    """Share of nodes whose degree is below the mean degree of their neighbors.

    Isolated nodes have no neighborhood and are left out of the denominator.
    """
    return count_paradox_degree(g, comparator=comparator).fraction


def paradox_fraction_attribute(g: AttributedGraph, comparator: str = "<") -> float:
    """Share of eligible nodes whose attribute is below their neighbors' mean.

    A node is eligible when it has an attribute and at least one attributed
    neighbor; see :func:`count_paradox_attribute` for the eligible and
    excluded counts.
    """
    return count_paradox_attribute(g, comparator=comparator).fraction


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ParadoxError("undefined correlation: constant input")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    return pearson(rankdata(x), rankdata(y))


def correlation_inputs(g: AttributedGraph, nodes=None) -> tuple[np.ndarray, np.ndarray]:
    """(degree, attribute) over attributed nodes with degree >= 1."""
    mask = g.has_attribute & (g.degree > 0)
    if nodes is not None:
        sel = np.zeros(g.n, dtype=bool)
        sel[nodes] = True
        mask &= sel
    return g.degree[mask], g.attribute[mask]


def correlate_degree_attribute(
    g: AttributedGraph, nodes=None, log: Callable[[np.ndarray], np.ndarray] = np.log
) -> CorrelationResult:
    """Pearson R of attribute vs log(degree) and Spearman rho vs raw degree."""
    deg, attr = correlation_inputs(g, nodes)
    if len(deg) < 3:
        raise ParadoxError("undefined correlation: fewer than 3 attributed nodes")
    r = pearson(log(deg.astype(np.float64)), attr)
    rho = spearman(deg, attr)
    return CorrelationResult(r, rho, len(deg))
