"""Two-component Gaussian mixture on the (own attribute, neighbor mean) plane.

The mixture is fit by plain EM with full covariances. Groups are then read
off with a Mahalanobis-radius rule: a point belongs to a component when it
lies inside that component's ``radius``-sigma ellipse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy.special import logsumexp

from paradoxlab.errors import DegenerateComponentError, ParadoxError
from paradoxlab.graph import AttributedGraph, neighbor_table

REG_COVAR = 1e-9
MIN_WEIGHT = 1e-6


class GroupLabel(IntEnum):
    UNASSIGNED = 0
    HAPPY = 1
    UNHAPPY = 2


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    mean: np.ndarray
    covariance: np.ndarray
    weight: float

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "covariance": self.covariance.tolist(), "weight": float(self.weight)}


@dataclass(frozen=True, eq=False)
class GmmModel:
    """Fitted mixture.

    ``log_likelihood`` is the mean log-density per point; ``history`` holds
    it before every M-step of the winning run.
    """

    components: tuple
    log_likelihood: float
    iterations: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])

    @property
    def covariances(self) -> np.ndarray:
        return np.array([c.covariance for c in self.components])

    @property
    def happy_index(self) -> int:
        """Index of the component with the larger own-attribute mean."""
        return int(np.argmax(self.means[:, 0]))

    def to_dict(self) -> dict:
        return {
            "components": [c.to_dict() for c in self.components],
            "log_likelihood": self.log_likelihood,
            "iterations": self.iterations,
            "converged": self.converged,
            "happy_component": self.happy_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GmmModel":
        comps = tuple(
            GaussianComponent(np.array(c["mean"]), np.array(c["covariance"]), c["weight"]) for c in d["components"]
        )
        return cls(comps, d["log_likelihood"], d["iterations"], d["converged"])


@dataclass(frozen=True, eq=False)
class PlanePoints:
    """Rows of (own attribute, mean neighbor attribute) and their node indices."""

    points: np.ndarray
    nodes: np.ndarray


def build_plane_points(g: AttributedGraph) -> PlanePoints:
    t = neighbor_table(g)
    eligible = g.has_attribute & (t.attributed_neighbors > 0)
    nodes = np.flatnonzero(eligible)
    if nodes.size == 0:
        raise ParadoxError("no attributed node with an attributed neighbor")
    pts = np.column_stack([g.attribute[nodes], t.mean_neighbor_attribute[nodes]])
    return PlanePoints(pts, nodes)


def _cholesky(cov: np.ndarray, k: int) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise DegenerateComponentError(
            "degenerate component: singular covariance", {"component": k, "covariance": cov.tolist()}
        ) from exc


def _log_gauss(X: np.ndarray, mean: np.ndarray, chol: np.ndarray) -> np.ndarray:
    z = np.linalg.solve(chol, (X - mean).T)
    maha2 = np.einsum("ij,ij->j", z, z)
    log_det = 2.0 * np.log(np.diag(chol)).sum()
    return -0.5 * (X.shape[1] * np.log(2 * np.pi) + log_det + maha2)


def _weighted_log_density(X, weights, means, covs) -> np.ndarray:
    cols = [np.log(w) + _log_gauss(X, mu, _cholesky(c, k)) for k, (w, mu, c) in enumerate(zip(weights, means, covs))]
    return np.column_stack(cols)


def e_step(X, weights, means, covs) -> tuple[np.ndarray, float]:
    """Responsibilities and mean log-likelihood under the given parameters."""
    wld = _weighted_log_density(X, weights, means, covs)
    norm = logsumexp(wld, axis=1)
    resp = np.exp(wld - norm[:, None])
    return resp, float(np.mean(norm))


def m_step(X, resp, reg: float = REG_COVAR):
    nk = resp.sum(axis=0)
    weights = nk / len(X)
    if np.any(weights < MIN_WEIGHT):
        raise DegenerateComponentError(
            "degenerate component: weight collapsed", {"weights": weights.tolist()}
        )
    means = (resp.T @ X) / nk[:, None]
    covs = []
    for k in range(resp.shape[1]):
        d = X - means[k]
        c = (resp[:, k, None] * d).T @ d / nk[k]
        c = 0.5 * (c + c.T) + reg * np.eye(X.shape[1])
        covs.append(c)
    return weights, means, np.array(covs)


def _kmeanspp_centers(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [X[rng.integers(len(X))]]
    for _ in range(1, k):
        d2 = np.min([np.sum((X - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total <= 0:
            centers.append(X[rng.integers(len(X))])
        else:
            centers.append(X[rng.choice(len(X), p=d2 / total)])
    return np.array(centers)


def _params_from_centers(X: np.ndarray, centers: np.ndarray, reg: float):
    d2 = np.stack([np.sum((X - c) ** 2, axis=1) for c in centers], axis=1)
    resp = np.zeros_like(d2)
    resp[np.arange(len(X)), np.argmin(d2, axis=1)] = 1.0
    if np.any(resp.sum(axis=0) == 0):
        resp = 0.5 * resp + 0.5 / len(centers)
    weights, _, covs = m_step(X, resp, reg)
    return weights, np.array(centers, dtype=np.float64), covs


def _run_em(X, weights, means, covs, tol, max_iter, reg) -> GmmModel:
    history = []
    converged = False
    iterations = 0
    ll_prev = -np.inf
    while True:
        resp, ll = e_step(X, weights, means, covs)
        history.append(ll)
        if ll - ll_prev < tol:
            converged = True
            break
        if iterations >= max_iter:
            break
        weights, means, covs = m_step(X, resp, reg)
        iterations += 1
        ll_prev = ll
    comps = tuple(GaussianComponent(means[k], covs[k], float(weights[k])) for k in range(len(weights)))
    return GmmModel(comps, ll, iterations, converged, tuple(history))


def fit_gmm_em(
    points: np.ndarray,
    k: int = 2,
    init: str | np.ndarray | GmmModel = "kmeans++",
    tol: float = 1e-7,
    max_iter: int = 500,
    seed: int = 0,
    n_init: int = 8,
    reg: float = REG_COVAR,
) -> GmmModel:
    """Fit a ``k``-component full-covariance mixture by EM.

    ``init`` is ``"kmeans++"`` (``n_init`` seeded restarts, best likelihood
    kept), an explicit ``(k, d)`` array of starting means, or a fitted
    :class:`GmmModel` to resume from. EM stops once the mean log-likelihood
    improves by less than ``tol`` or after ``max_iter`` M-steps. Each M-step
    adds ``reg`` to the covariance diagonal.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or len(X) < 10:
        raise ParadoxError("need at least 10 points in a 2D array")
    if not np.all(np.isfinite(X)):
        raise ParadoxError("points must be finite")

    if isinstance(init, GmmModel):
        starts = [(init.weights, init.means, init.covariances)]
    elif isinstance(init, str):
        if init != "kmeans++":
            raise ValueError(f"unknown init {init!r}")
        rng = np.random.default_rng(seed)
        starts = []
        for _ in range(n_init):
            centers = _kmeanspp_centers(X, k, rng)
            starts.append(_params_from_centers(X, centers, reg))
    else:
        centers = np.asarray(init, dtype=np.float64)
        if centers.shape != (k, X.shape[1]):
            raise ValueError(f"explicit means must have shape ({k}, {X.shape[1]})")
        starts = [_params_from_centers(X, centers, reg)]

    best = None
    failure = None
    for weights, means, covs in starts:
        try:
            model = _run_em(X, weights, means, covs, tol, max_iter, reg)
        except DegenerateComponentError as exc:
            failure = exc
            continue
        if best is None or model.log_likelihood > best.log_likelihood:
            best = model
    if best is None:
        raise failure
    return best


def mahalanobis(point, comp: GaussianComponent) -> float:
    d = np.asarray(point, dtype=np.float64) - comp.mean
    return float(np.sqrt(d @ np.linalg.solve(comp.covariance, d)))


def _mahalanobis_rows(X: np.ndarray, comp: GaussianComponent) -> np.ndarray:
    d = X - comp.mean
    sol = np.linalg.solve(comp.covariance, d.T)
    return np.sqrt(np.einsum("ij,ji->i", d, sol))


def responsibilities(X: np.ndarray, model: GmmModel) -> np.ndarray:
    resp, _ = e_step(np.atleast_2d(X), model.weights, model.means, model.covariances)
    return resp


def demarcate(points: np.ndarray, model: GmmModel, radius: float = 2.0) -> np.ndarray:
    """Label each point HAPPY, UNHAPPY or UNASSIGNED.

    A point inside exactly one component's ``radius`` ellipse takes that
    component; inside both, the one with the higher posterior
    responsibility; inside neither, UNASSIGNED. The component with the larger
    own-attribute mean is HAPPY.
    """
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    dist = np.column_stack([_mahalanobis_rows(X, c) for c in model.components])
    inside = dist <= radius
    resp = responsibilities(X, model)
    choice = np.where(inside, resp, -1.0).argmax(axis=1)
    happy = model.happy_index
    labels = np.where(choice == happy, GroupLabel.HAPPY, GroupLabel.UNHAPPY).astype(np.int8)
    labels[~inside.any(axis=1)] = GroupLabel.UNASSIGNED
    return labels


def node_labels(plane: PlanePoints, labels: np.ndarray, n: int) -> np.ndarray:
    """Spread per-point labels onto all ``n`` nodes (UNASSIGNED elsewhere)."""
    out = np.full(n, GroupLabel.UNASSIGNED, dtype=np.int8)
    out[plane.nodes] = labels
    return out
