"""Synthetic attributed networks for desk-scale checks.

Graphs come from preferential attachment or a power-law configuration
model. Attributes are drawn from a one- or two-mode normal model, coupled to
log-degree through a Gaussian copula on ranks (which keeps the attribute
multiset intact), and then made assortative by degree-matched value swaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import ndtri

from paradoxlab.errors import ParadoxError
from paradoxlab.graph import AttributedGraph, build_undirected
from paradoxlab.metrics import pearson

PAPERLIKE_N = 39110
PAPERLIKE_MIN_DEGREE = 15
PAPERLIKE_SEED = 20160305


@dataclass(frozen=True)
class PreferentialAttachment:
    m: int = 3


@dataclass(frozen=True)
class ConfigurationModel:
    gamma: float = 2.5
    min_degree: int = 2
    max_degree: int | None = None


@dataclass(frozen=True)
class Bimodal:
    mu1: float = 0.2
    mu2: float = 0.0
    sigma: float = 0.05
    p: float = 0.5


@dataclass(frozen=True)
class Mono:
    mu: float = 0.0
    sigma: float = 0.2


DegreeModel = Union[PreferentialAttachment, ConfigurationModel]
AttrModel = Union[Bimodal, Mono]


@dataclass(frozen=True)
class SynthSpec:
    n: int
    degree_model: DegreeModel = field(default_factory=PreferentialAttachment)
    attr_model: AttrModel = field(default_factory=Bimodal)
    degree_corr: float = 0.0
    homophily_rounds: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not -1.0 <= self.degree_corr <= 1.0:
            raise ValueError("degree_corr must lie in [-1, 1]")
        if isinstance(self.degree_model, PreferentialAttachment) and self.degree_model.m < 1:
            raise ValueError("m must be at least 1")
        if self.homophily_rounds < 0:
            raise ValueError("homophily_rounds must be non-negative")

    def rngs(self) -> tuple[np.random.Generator, np.random.Generator]:
        graph_ss, attr_ss = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.default_rng(graph_ss), np.random.default_rng(attr_ss)


def preferential_attachment_edges(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Growth from ``m`` unconnected seed nodes; each new node links to ``m``
    distinct earlier nodes chosen proportionally to degree.

    Yields exactly ``m * (n - m)`` edges.
    """
    m = min(m, n - 1)
    edges = np.empty((m * (n - m), 2), dtype=np.int64)
    repeated = np.empty(2 * m * (n - m), dtype=np.int64)
    filled = 0
    targets = np.arange(m)
    for k, source in enumerate(range(m, n)):
        edges[k * m : (k + 1) * m, 0] = source
        edges[k * m : (k + 1) * m, 1] = targets
        repeated[filled : filled + m] = targets
        repeated[filled + m : filled + 2 * m] = source
        filled += 2 * m
        chosen: list[int] = []
        while len(chosen) < m:
            for c in repeated[rng.integers(0, filled, size=2 * m)].tolist():
                if c not in chosen:
                    chosen.append(c)
                    if len(chosen) == m:
                        break
        targets = np.array(chosen, dtype=np.int64)
    return edges


def power_law_degrees(n: int, gamma: float, kmin: int, kmax: int | None, rng: np.random.Generator) -> np.ndarray:
    kmax = n - 1 if kmax is None else min(kmax, n - 1)
    u = rng.random(n)
    deg = np.minimum(np.floor(kmin * (1.0 - u) ** (-1.0 / (gamma - 1.0))), kmax).astype(np.int64)
    while deg.sum() % 2:
        deg[-1] = min(math.floor(kmin * (1.0 - rng.random()) ** (-1.0 / (gamma - 1.0))), kmax)
    return deg


def configuration_edges(degrees: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Stub matching; self-loops are dropped here, multi-edges on build."""
    stubs = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    return pairs[pairs[:, 0] != pairs[:, 1]]


def gen_graph(spec: SynthSpec) -> AttributedGraph:
    rng, _ = spec.rngs()
    model = spec.degree_model
    if isinstance(model, PreferentialAttachment):
        edges = preferential_attachment_edges(spec.n, model.m, rng)
    elif isinstance(model, ConfigurationModel):
        deg = power_law_degrees(spec.n, model.gamma, model.min_degree, model.max_degree, rng)
        edges = configuration_edges(deg, rng)
    else:
        raise TypeError(f"unknown degree model {model!r}")
    return build_undirected(
        _Pairs(edges[:, 0], edges[:, 1]), mode="symmetrize", nodes=range(spec.n)
    )


@dataclass
class _Pairs:
    src: np.ndarray
    dst: np.ndarray


def draw_base_attributes(model: AttrModel, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(model, Bimodal):
        first = rng.random(n) < model.p
        x = np.where(first, model.mu1, model.mu2) + model.sigma * rng.standard_normal(n)
    elif isinstance(model, Mono):
        x = model.mu + model.sigma * rng.standard_normal(n)
    else:
        raise TypeError(f"unknown attribute model {model!r}")
    return np.clip(x, -1.0, 1.0)


class _CopulaCoupler:
    """Reassign a fixed value multiset so its ranks follow
    ``c * z(log degree) + sqrt(1 - c^2) * noise``."""

    def __init__(self, values: np.ndarray, degree: np.ndarray, rng: np.random.Generator):
        n = len(values)
        self.sorted_values = np.sort(values)
        self.log_degree = np.log(np.maximum(degree, 1).astype(np.float64))
        order = np.lexsort((rng.random(n), self.log_degree))
        ranks = np.empty(n)
        ranks[order] = np.arange(n)
        self.z = ndtri((ranks + 0.5) / n)
        self.noise = rng.standard_normal(n)

    def assign(self, c: float) -> np.ndarray:
        latent = c * self.z + math.sqrt(max(0.0, 1.0 - c * c)) * self.noise
        out = np.empty_like(self.sorted_values)
        out[np.argsort(latent, kind="stable")] = self.sorted_values
        return out

    def achieved(self, c: float) -> float:
        return pearson(self.assign(c), self.log_degree)


def couple_to_degree(
    values: np.ndarray, degree: np.ndarray, target: float, rng: np.random.Generator, tol: float = 0.005
) -> np.ndarray:
    """Reorder ``values`` until Pearson(values, ln degree) is near ``target``."""
    coupler = _CopulaCoupler(values, degree, rng)
    if np.ptp(coupler.log_degree) == 0 or np.ptp(values) == 0:
        if abs(target) > 0.02:
            raise ParadoxError(f"degree_corr {target} unreachable: achieved 0.0 (constant input)")
        return coupler.assign(0.0)
    lo, hi = -1.0, 1.0
    r_lo, r_hi = coupler.achieved(lo), coupler.achieved(hi)
    if target > r_hi + 0.02 or target < r_lo - 0.02:
        achieved = r_hi if target > 0 else r_lo
        raise ParadoxError(f"degree_corr {target} unreachable for n={len(values)}: achieved {achieved:.4f}")
    best_c, best_err = 0.0, abs(coupler.achieved(0.0) - target)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        r = coupler.achieved(mid)
        if abs(r - target) < best_err:
            best_c, best_err = mid, abs(r - target)
        if best_err <= tol:
            break
        if r < target:
            lo = mid
        else:
            hi = mid
    if best_err > 0.02:
        raise ParadoxError(
            f"degree_corr {target} unreachable: achieved {coupler.achieved(best_c):.4f}"
        )
    return coupler.assign(best_c)


def homophily_swaps(g: AttributedGraph, values: np.ndarray, rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy swap passes that lower the sum of squared edge differences.

    Each pass pairs nodes adjacent in degree order and swaps their values
    when that lowers the energy, so the degree coupling is mostly kept and the
    multiset is preserved exactly.
    """
    x = values.copy()
    deg = g.degree.astype(np.float64)
    A = g.adjacency
    n = g.n
    for _ in range(rounds):
        order = np.lexsort((rng.random(n), deg))
        start = int(rng.integers(2))
        k = (n - start) // 2
        u = order[start : start + 2 * k : 2]
        v = order[start + 1 : start + 2 * k : 2]
        S = A @ x
        a, b = x[u], x[v]
        delta = (b - a) * ((b + a) * (deg[u] - deg[v]) - 2.0 * (S[u] - S[v]))
        acc = delta < 0
        x[u[acc]], x[v[acc]] = b[acc], a[acc]
    return x


def assign_attributes(g: AttributedGraph, spec: SynthSpec) -> AttributedGraph:
    _, rng = spec.rngs()
    base = draw_base_attributes(spec.attr_model, g.n, rng)
    x = couple_to_degree(base, g.degree, spec.degree_corr, rng)
    if spec.homophily_rounds:
        x = homophily_swaps(g, x, spec.homophily_rounds, rng)
    return g.with_attribute_array(x)


def generate(spec: SynthSpec) -> AttributedGraph:
    return assign_attributes(gen_graph(spec), spec)


def paperlike_spec(seed: int = PAPERLIKE_SEED) -> SynthSpec:
    return SynthSpec(
        n=PAPERLIKE_N,
        degree_model=PreferentialAttachment(m=PAPERLIKE_MIN_DEGREE),
        attr_model=Bimodal(mu1=0.2037652, mu2=0.00704093, sigma=0.06, p=0.5),
        degree_corr=0.11,
        homophily_rounds=40,
        seed=seed,
    )


def paperlike_fixture(seed: int = PAPERLIKE_SEED) -> AttributedGraph:
    """Deterministic 39,110-node graph with skewed degrees (minimum 15),
    two assortative attribute modes and a 0.11 degree-attribute correlation."""
    return generate(paperlike_spec(seed))
