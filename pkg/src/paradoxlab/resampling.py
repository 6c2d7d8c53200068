"""Bootstrap distributions and attribute-shuffling null models.

Every replicate ``r`` draws from its own generator seeded by
``SeedSequence(master_seed, spawn_key=(r,))`` and writes into slot ``r`` of a
preallocated array. Replicates are evaluated in fixed-size blocks, so the
result does not depend on how blocks are spread over worker threads.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from paradoxlab.errors import ParadoxError, ResamplingError
from paradoxlab.graph import AttributedGraph
from paradoxlab.metrics import attribute_below_mean, compute_paradox_flags
from paradoxlab.reports import ParadoxReport

STATISTICS = ("degree_paradox", "attribute_paradox", "pearson")
NULL_MODES = ("permute", "resample")
BLOCK = 64
MAX_MISSING = 0.10


@dataclass(frozen=True, eq=False)
class ResampleDistribution:
    """Replicate values of a statistic; NaN marks an undefined replicate."""

    samples: np.ndarray
    replicates: int
    master_seed: int
    mode: str
    statistic: str = "attribute_paradox"

    @property
    def valid(self) -> np.ndarray:
        return self.samples[~np.isnan(self.samples)]

    @property
    def missing(self) -> int:
        return int(np.isnan(self.samples).sum())

    def mean(self) -> float:
        return float(self.valid.mean())


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    level: float
    method: str = "percentile"


def child_rng(master_seed: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(replicate,))))


def _run_blocks(replicates: int, block_fn: Callable[[int, int], np.ndarray], workers: int) -> np.ndarray:
    out = np.full(replicates, np.nan)
    starts = range(0, replicates, BLOCK)

    def run(start: int) -> None:
        stop = min(start + BLOCK, replicates)
        out[start:stop] = block_fn(start, stop)

    if workers <= 1 or replicates <= BLOCK:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    return out


def _check_missing(samples: np.ndarray) -> None:
    missing = int(np.isnan(samples).sum())
    if len(samples) and missing > MAX_MISSING * len(samples):
        raise ResamplingError(f"statistic undefined on {missing} of {len(samples)} replicates")


def _node_mask(n: int, nodes) -> np.ndarray:
    if nodes is None:
        return np.ones(n, dtype=bool)
    mask = np.zeros(n, dtype=bool)
    mask[np.asarray(nodes, dtype=np.int64)] = True
    return mask


def _pearson_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise Pearson R for (B, k) arrays; NaN where a row is constant."""
    dx = x - x.mean(axis=1, keepdims=True)
    dy = y - y.mean(axis=1, keepdims=True)
    sxx = np.einsum("ij,ij->i", dx, dx)
    syy = np.einsum("ij,ij->i", dy, dy)
    sxy = np.einsum("ij,ij->i", dx, dy)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = sxy / np.sqrt(sxx * syy)
    r[(sxx <= 0) | (syy <= 0)] = np.nan
    return np.clip(r, -1.0, 1.0)


def statistic_population(g: AttributedGraph, statistic: str, nodes=None) -> tuple[np.ndarray, ...]:
    """Per-node inputs of ``statistic`` over its eligible subjects.

    Each subject keeps its full-graph neighborhood; only the subject set is
    restricted by ``nodes``.
    """
    mask = _node_mask(g.n, nodes)
    if statistic == "pearson":
        keep = mask & g.has_attribute & (g.degree > 0)
        return (np.log(g.degree[keep].astype(np.float64)), g.attribute[keep])
    flags = compute_paradox_flags(g)
    if statistic == "degree_paradox":
        keep = mask & flags.degree_valid
        return (flags.degree_paradox[keep].astype(np.int64),)
    if statistic == "attribute_paradox":
        keep = mask & flags.attribute_valid
        return (flags.attribute_paradox[keep].astype(np.int64),)
    raise ValueError(f"unknown statistic {statistic!r}; expected one of {STATISTICS}")


def bootstrap(
    g: AttributedGraph,
    statistic: str,
    sample_frac: float = 0.1,
    replicates: int = 5000,
    seed: int = 0,
    nodes=None,
    workers: int = 1,
) -> ResampleDistribution:
    """Resample subjects with replacement and recompute ``statistic``.

    Each replicate draws ``ceil(sample_frac * N)`` of the N eligible subjects
    uniformly with replacement.
    """
    if not 0.0 < sample_frac <= 1.0:
        raise ValueError("sample_frac must lie in (0, 1]")
    pop = statistic_population(g, statistic, nodes)
    size = len(pop[0])
    if size == 0:
        raise ParadoxError(f"no eligible subjects for {statistic}")
    k = math.ceil(sample_frac * size)

    def block(start: int, stop: int) -> np.ndarray:
        idx = np.stack([child_rng(seed, r).integers(0, size, size=k) for r in range(start, stop)])
        if statistic == "pearson":
            return _pearson_rows(pop[0][idx], pop[1][idx])
        return pop[0][idx].sum(axis=1) / k

    samples = _run_blocks(replicates, block, workers)
    _check_missing(samples)
    return ResampleDistribution(samples, replicates, seed, "bootstrap", statistic)


def null_model(
    g: AttributedGraph,
    mode: str = "permute",
    replicates: int = 20000,
    seed: int = 0,
    nodes=None,
    workers: int = 1,
) -> ResampleDistribution:
    """Attribute-paradox fraction after destroying attribute placement.

    ``permute`` shuffles the observed values across attributed nodes;
    ``resample`` redraws them i.i.d. from the observed values. The topology
    and the set of attributed nodes stay fixed.
    """
    if mode not in NULL_MODES:
        raise ValueError(f"unknown null mode {mode!r}; expected one of {NULL_MODES}")
    present = g.has_attribute
    holders = np.flatnonzero(present)
    if holders.size == 0:
        raise ParadoxError("graph has no attributes")
    values = g.attribute[holders]
    A = g.adjacency
    count = np.rint(A @ present.astype(np.float64)).astype(np.int64)
    subjects = np.flatnonzero(present & (count > 0) & _node_mask(g.n, nodes))
    if subjects.size == 0:
        raise ParadoxError("no attributed node with an attributed neighbor")
    sub_count = count[subjects]

    def block(start: int, stop: int) -> np.ndarray:
        X = np.zeros((g.n, stop - start))
        for j, r in enumerate(range(start, stop)):
            rng = child_rng(seed, r)
            if mode == "permute":
                X[holders, j] = rng.permutation(values)
            else:
                X[holders, j] = values[rng.integers(0, len(values), size=len(values))]
        S = A @ X
        hits = attribute_below_mean(X[subjects], S[subjects], sub_count)
        return hits.sum(axis=0) / subjects.size

    samples = _run_blocks(replicates, block, workers)
    _check_missing(samples)
    return ResampleDistribution(samples, replicates, seed, mode, "attribute_paradox")


def percentile_ci(
    dist: ResampleDistribution,
    level: float = 0.95,
    percentiles: tuple[float, float] | None = None,
) -> ConfidenceInterval:
    """Percentile interval with linear interpolation between order statistics.

    By default the central ``level`` interval; ``percentiles=(5, 95)`` gives
    the 5th/95th percentile rule instead.
    """
    if percentiles is None:
        if not 0.0 < level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        q = (100 * (1 - level) / 2, 100 * (1 - (1 - level) / 2))
    else:
        q = tuple(float(p) for p in percentiles)
        if not 0.0 <= q[0] < q[1] <= 100.0:
            raise ValueError("percentiles must satisfy 0 <= lo < hi <= 100")
        level = (q[1] - q[0]) / 100
    s = dist.valid
    if len(s) < 100:
        raise ResamplingError(f"need at least 100 valid samples, got {len(s)}")
    lo, hi = np.percentile(s, q)
    return ConfidenceInterval(float(lo), float(hi), level)


def summarize(
    value: float,
    dist: ResampleDistribution | None,
    name: str,
    level: float = 0.95,
    percentiles: tuple[float, float] | None = None,
    eligible: int | None = None,
) -> ParadoxReport:
    if dist is None or dist.replicates == 0:
        return ParadoxReport(value, None, None, 0, name, None, eligible)
    ci = percentile_ci(dist, level, percentiles)
    return ParadoxReport(value, ci.lo, ci.hi, dist.replicates, name, ci.level, eligible, dist.missing)


def write_distribution_csv(dist: ResampleDistribution, path: str | Path) -> None:
    """One-column CSV of replicate values (empty cell for a missing replicate)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([dist.statistic])
        for v in dist.samples.tolist():
            w.writerow(["" if math.isnan(v) else repr(v)])
