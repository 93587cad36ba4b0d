"""Mixture fitting by EM, BIC scoring, KNN on distance rows, classical MDS.

The EM routine works entirely in log space: responsibilities come from a
log-sum-exp over per-component log densities, so high concentrations and
high dimensions never leave the representable range.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .bessel import mean_resultant_ratio, mean_resultant_ratio_derivative
from .core import SampleSet, VmfMixture, VmfParams, log_normalizing_constant
from .rng import substream


@dataclass(frozen=True)
class FitConfig:
    k: int
    restarts: int = 10
    max_iters: int = 500
    tol: float = 1e-8
    seed: int = 0
    kappa_cap: float = 1e5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.kappa_cap <= 0.0:
            raise ValueError("kappa_cap must be > 0")


@dataclass(frozen=True)
class FitResult:
    mixture: VmfMixture
    log_likelihood: float
    bic: float
    iterations: int
    converged: bool
    reseeds: int
    history: tuple


@dataclass(frozen=True)
class MdsResult:
    coords: np.ndarray
    eigenvalues: np.ndarray
    n_positive: int

    @property
    def padded(self) -> bool:
        return self.n_positive < self.coords.shape[1]


def kappa_mle(r_bar: float, d: int, kappa_cap: float = 1e12) -> float:
    """Concentration solving A_d(kappa) = r_bar for the observed mean
    resultant length.

    Starts from the rational approximation r(d - r^2)/(1 - r^2) and refines
    with at most 25 Newton steps on the continued-fraction Bessel ratio,
    stopping at |A_d(kappa) - r_bar| < 1e-10 or at the cap.
    """
    r_bar = float(r_bar)
    if not 0.0 < r_bar < 1.0:
        raise ValueError(f"r_bar must lie in (0, 1), got {r_bar}")
    kappa = r_bar * (d - r_bar * r_bar) / (1.0 - r_bar * r_bar)
    kappa = min(max(kappa, 1e-12), kappa_cap)
    for _ in range(25):
        resid = mean_resultant_ratio(d, kappa) - r_bar
        if abs(resid) < 1e-10:
            break
        step = resid / mean_resultant_ratio_derivative(d, kappa)
        # Newton can overshoot past zero near the origin; halve into range.
        nxt = kappa - step
        while nxt <= 0.0:
            step *= 0.5
            nxt = kappa - step
        kappa = nxt
        if kappa >= kappa_cap:
            return kappa_cap
    return min(kappa, kappa_cap)


def bic(log_likelihood: float, k: int, d: int, n: int) -> float:
    """-2 log L + (k(d+1) - 1) log n for a k-component vMF mixture in R^d."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return -2.0 * log_likelihood + (k * (d + 1) - 1) * math.log(n)


def _component_log_pdfs(points, mus, kappas, weights):
    """n x k matrix of log(w_j f_j(x_i)), one matmul for all components."""
    log_c = np.array([log_normalizing_constant(points.shape[1], k) for k in kappas])
    return np.log(weights) + log_c + kappas * (points @ mus.T)


def mixture_log_pdf(m: VmfMixture, points: np.ndarray) -> np.ndarray:
    """Per-point log density of the mixture at unit-norm rows."""
    points = np.asarray(points, dtype=np.float64)
    mus = np.stack([c.mu for c in m.components])
    kappas = np.array([c.kappa for c in m.components])
    return logsumexp(_component_log_pdfs(points, mus, kappas, m.weights), axis=1)


def mixture_log_likelihood(m: VmfMixture, points: np.ndarray) -> float:
    return float(mixture_log_pdf(m, points).sum())


def _seed_directions(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding by geodesic distance: the first seed is a random
    point, each next is drawn with probability proportional to the squared
    distance to its nearest seed. Fully random so restarts genuinely differ."""
    n = X.shape[0]
    seeds = [int(rng.integers(n))]
    if k > 1:
        closest = np.arccos(np.clip(X @ X[seeds[0]], -1.0, 1.0)) ** 2
        for _ in range(k - 1):
            total = float(closest.sum())
            if total <= 0.0:
                seeds.append(int(rng.integers(n)))
            else:
                seeds.append(int(rng.choice(n, p=closest / total)))
            dist = np.arccos(np.clip(X @ X[seeds[-1]], -1.0, 1.0)) ** 2
            closest = np.minimum(closest, dist)
    return X[seeds]


def _m_step_component(X, resp_k, n_k, d, kappa_cap):
    resultant = resp_k @ X
    norm = float(np.linalg.norm(resultant))
    mu = resultant / norm
    r_bar = min(max(norm / n_k, 1e-10), 1.0 - 1e-12)
    return mu, kappa_mle(r_bar, d, kappa_cap)


def _em_once(X: np.ndarray, cfg: FitConfig, rng: np.random.Generator):
    n, d = X.shape
    k = cfg.k

    seeds = _seed_directions(X, k, rng)
    assign = np.argmax(X @ seeds.T, axis=1)
    mus = np.empty((k, d))
    kappas = np.empty(k)
    weights = np.empty(k)
    for j in range(k):
        members = np.nonzero(assign == j)[0]
        if members.size == 0:
            members = np.array([int(rng.integers(n))])
        resultant = X[members].sum(axis=0)
        norm = float(np.linalg.norm(resultant))
        mus[j] = resultant / norm if norm > 0 else seeds[j]
        r_bar = min(max(norm / members.size, 1e-10), 1.0 - 1e-12) if norm > 0 else 0.5
        kappas[j] = kappa_mle(r_bar, d, cfg.kappa_cap)
        weights[j] = members.size / n

    weights /= weights.sum()
    prev_ll = -math.inf
    history = []
    reseeds = 0
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        logp = _component_log_pdfs(X, mus, kappas, weights)
        lse = logsumexp(logp, axis=1)
        ll = float(lse.sum())
        history.append(ll)
        if math.isfinite(prev_ll) and abs(ll - prev_ll) <= cfg.tol * abs(ll):
            converged = True
            break
        prev_ll = ll
        resp = np.exp(logp - lse[:, None])

        n_eff = resp.sum(axis=0)
        for j in range(k):
            if n_eff[j] < 1.0:
                # Starved component: restart it at the worst-explained point.
                worst = int(np.argmin(resp.max(axis=1)))
                mus[j] = X[worst]
                weights[j] = 1.0 / n
                reseeds += 1
            else:
                mus[j], kappas[j] = _m_step_component(X, resp[:, j], n_eff[j], d, cfg.kappa_cap)
                weights[j] = n_eff[j] / n
        weights /= weights.sum()

    mixture = VmfMixture(
        components=tuple(VmfParams(mu=mus[j], kappa=kappas[j]) for j in range(k)),
        weights=weights)
    return mixture, history[-1], iterations, converged, reseeds, tuple(history)


def fit_em(data: SampleSet, cfg: FitConfig) -> FitResult:
    """Best-of-restarts EM fit of a k-component vMF mixture.

    Each restart reseeds the initializer from its own derived stream; the
    run with the highest final log-likelihood wins. Non-convergence within
    max_iters is reported through the converged flag, not raised.
    """
    X = data.points
    if X.shape[0] == 0:
        raise ValueError("cannot fit an empty sample")
    if cfg.k >= X.shape[0]:
        raise ValueError(f"need more observations than components ({cfg.k} >= {X.shape[0]})")

    best = None
    for r in range(cfg.restarts):
        rng = substream(cfg.seed, "em-restart", r)
        result = _em_once(X, cfg, rng)
        if best is None or result[1] > best[1]:
            best = result
    mixture, ll, iterations, converged, reseeds, history = best
    score = bic(ll, cfg.k, data.d, data.n)
    return FitResult(mixture=mixture, log_likelihood=ll, bic=score,
                     iterations=iterations, converged=converged,
                     reseeds=reseeds, history=history)


def knn_predict(distances, train_labels, k: int) -> int:
    """Majority label among the k nearest training items.

    Ties on the vote count break first by smaller mean distance within the
    k-neighborhood, then by smaller label.
    """
    dist = np.asarray(distances, dtype=np.float64)
    labels = np.asarray(train_labels, dtype=np.int64)
    if dist.ndim != 1 or dist.size == 0:
        raise ValueError("need a nonempty vector of distances")
    if labels.shape != dist.shape:
        raise ValueError("labels must match distances")
    if not 1 <= k <= dist.size:
        raise ValueError(f"k must be in [1, {dist.size}], got {k}")
    order = np.argsort(dist, kind="stable")[:k]
    near_labels = labels[order]
    near_dists = dist[order]
    candidates = {}
    for lab in np.unique(near_labels):
        mask = near_labels == lab
        candidates[int(lab)] = (-int(mask.sum()), float(near_dists[mask].mean()), int(lab))
    return min(candidates, key=candidates.get)


def mds_embed(dm, dim: int) -> MdsResult:
    """Classical (double-centering) MDS embedding of a distance matrix.

    Eigenvalues below zero are truncated; if fewer than dim positive
    eigenvalues exist, the missing columns are zero and the result is
    flagged as padded.
    """
    d = dm.entries
    n = d.shape[0]
    if not 1 <= dim < n:
        raise ValueError(f"dim must be in [1, {n - 1}], got {dim}")
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (d ** 2) @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order][:dim]
    evecs = evecs[:, order][:, :dim]
    # Numerical-rank cutoff: rounding noise around zero must not masquerade
    # as a usable axis.
    cutoff = n * np.finfo(float).eps * max(float(evals[0]), 0.0)
    positive = evals > cutoff
    coords = np.zeros((n, dim))
    coords[:, positive] = evecs[:, positive] * np.sqrt(evals[positive])
    return MdsResult(coords=coords, eigenvalues=np.where(positive, evals, 0.0),
                     n_positive=int(positive.sum()))
