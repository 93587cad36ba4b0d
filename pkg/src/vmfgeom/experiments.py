"""Reproducible synthetic experiments over the WL geometry.

sim1: a 2x2 factorial family of vMF laws on the circle (north/south mean
direction x low/high concentration, 100 draws per cell). Pairwise WL and
Monte-Carlo L2 distances are embedded with classical MDS and scored by
4-means cluster purity against the known cell labels.

sim2: an equal-weight 4-component vMF mixture on the circle with means at
the principal axes and concentration 10. A sample of 400 points is fitted
for K = 2..10 (best of 10 restarts); the K = 10 fit is then reduced by the
greedy and partitional methods and every model is scored by BIC.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from .core import VmfMixture, VmfParams, sample_mixture
from .fit_eval import FitConfig, bic, fit_em, mds_embed, mixture_log_likelihood
from .formats import (write_distance_matrix, write_mixture, write_samples,
                      write_trace)
from .geometry import pairwise_matrix
from .reduction import greedy_reduce, partitional_reduce
from .rng import substream

SIM1_CELLS = (
    ("north-low", (15 * math.pi / 8, 17 * math.pi / 8), (0.9, 1.1)),
    ("north-high", (15 * math.pi / 8, 17 * math.pi / 8), (9.9, 10.1)),
    ("south-low", (7 * math.pi / 8, 9 * math.pi / 8), (0.9, 1.1)),
    ("south-high", (7 * math.pi / 8, 9 * math.pi / 8), (9.9, 10.1)),
)
SIM1_PER_CELL = 100

SIM2_KAPPA = 10.0
SIM2_N = 400
SIM2_FIT_RANGE = range(2, 11)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int
    output_dir: str

    def __post_init__(self):
        if self.scenario not in ("sim1", "sim2"):
            raise ValueError(f"unknown scenario {self.scenario!r}")


def _derived_seed(seed: int, *tags) -> int:
    return int(substream(seed, *tags).integers(0, 2 ** 62))


def sim1_population(seed: int):
    """400 vMF laws on the circle with their cell labels (0..3)."""
    rng = substream(seed, "sim1-params")
    laws = []
    labels = []
    for label, (_, theta_range, kappa_range) in enumerate(SIM1_CELLS):
        thetas = rng.uniform(*theta_range, size=SIM1_PER_CELL)
        kappas = rng.uniform(*kappa_range, size=SIM1_PER_CELL)
        for theta, kappa in zip(thetas, kappas):
            laws.append(VmfParams(mu=np.array([math.cos(theta), math.sin(theta)]),
                                  kappa=float(kappa)))
            labels.append(label)
    return laws, np.array(labels, dtype=np.int64)


def _kmeans(points: np.ndarray, k: int, seed: int, restarts: int = 10,
            max_iters: int = 200) -> np.ndarray:
    """Plain Lloyd's k-means on Euclidean coordinates, used to score how
    cleanly an embedding separates the known classes."""
    n = points.shape[0]
    best_inertia = math.inf
    best_assign = None
    for r in range(restarts):
        rng = substream(seed, "kmeans", r)
        centers = points[[int(rng.integers(n))]]
        while centers.shape[0] < k:
            d2 = np.min(((points[:, None, :] - centers[None, :, :]) ** 2).sum(-1), axis=1)
            total = float(d2.sum())
            if total <= 0.0:
                nxt = int(rng.integers(n))
            else:
                nxt = int(rng.choice(n, p=d2 / total))
            centers = np.vstack([centers, points[nxt]])
        assign = np.zeros(n, dtype=np.int64)
        for _ in range(max_iters):
            d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
            new_assign = np.argmin(d2, axis=1)
            for j in range(k):
                mask = new_assign == j
                if mask.any():
                    centers[j] = points[mask].mean(axis=0)
            if np.array_equal(new_assign, assign):
                break
            assign = new_assign
        inertia = float(((points - centers[assign]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_assign = assign
    return best_assign


def cluster_purity(assignment: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of points whose cluster's majority class matches their own."""
    total = 0
    for c in np.unique(assignment):
        counts = np.bincount(labels[assignment == c])
        total += int(counts.max())
    return total / labels.size


def run_sim1(seed: int, out_dir: str, rel_tol: float = 0.05) -> dict:
    """Factorial-design comparison of the WL and L2 geometries.

    Writes the population table, both distance matrices, both embeddings,
    and a purity table; returns {'wl': purity, 'l2': purity}.
    """
    os.makedirs(out_dir, exist_ok=True)
    laws, labels = sim1_population(seed)

    wl_dm = pairwise_matrix(laws, metric="wl")
    l2_dm = pairwise_matrix(laws, metric="l2_mc",
                            seed=_derived_seed(seed, "sim1-l2"), rel_tol=rel_tol)
    write_distance_matrix(os.path.join(out_dir, "wl_matrix.csv"), wl_dm)
    write_distance_matrix(os.path.join(out_dir, "l2_matrix.csv"), l2_dm)

    with open(os.path.join(out_dir, "params.csv"), "w", encoding="utf-8") as fh:
        fh.write("type,label,mu_0,mu_1,kappa\n")
        for law, label in zip(laws, labels):
            fh.write(f"{SIM1_CELLS[label][0]},{label},{law.mu[0]!r},{law.mu[1]!r},{law.kappa!r}\n")

    purities = {}
    for name, dm in (("wl", wl_dm), ("l2", l2_dm)):
        emb = mds_embed(dm, dim=2)
        assign = _kmeans(emb.coords, k=4, seed=_derived_seed(seed, "sim1-kmeans", name))
        purities[name] = cluster_purity(assign, labels)
        with open(os.path.join(out_dir, f"{name}_embedding.csv"), "w", encoding="utf-8") as fh:
            fh.write("x,y,label\n")
            for row, label in zip(emb.coords, labels):
                fh.write(f"{row[0]!r},{row[1]!r},{label}\n")

    with open(os.path.join(out_dir, "purity.csv"), "w", encoding="utf-8") as fh:
        fh.write("metric,purity\n")
        for name in ("wl", "l2"):
            fh.write(f"{name},{purities[name]!r}\n")
    return purities


def sim2_truth() -> VmfMixture:
    means = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
    comps = tuple(VmfParams(mu=np.array(m), kappa=SIM2_KAPPA) for m in means)
    return VmfMixture(components=comps, weights=np.full(4, 0.25))


def run_sim2(seed: int, out_dir: str) -> dict:
    """Mixture-reduction study scored by BIC.

    Writes the sample, the K = 10 reference fit, reduced mixtures and traces
    at K = 4, and the BIC table; returns the table as a dict of lists keyed
    by 'k', 'fitted', 'greedy', 'hclust', 'kmedoids'.
    """
    os.makedirs(out_dir, exist_ok=True)
    truth = sim2_truth()
    data = sample_mixture(truth, SIM2_N, seed=_derived_seed(seed, "sim2-sample"))
    write_samples(os.path.join(out_dir, "samples.csv"), data)

    fits = {k: fit_em(data, FitConfig(k=k, restarts=10,
                                      seed=_derived_seed(seed, "sim2-fit", k)))
            for k in SIM2_FIT_RANGE}
    base = fits[10].mixture
    write_mixture(os.path.join(out_dir, "fitted_k10.json"), base)

    def reduced_bic(mixture: VmfMixture) -> float:
        ll = mixture_log_likelihood(mixture, data.points)
        return bic(ll, mixture.k, mixture.d, data.n)

    table = {"k": [], "fitted": [], "greedy": [], "hclust": [], "kmedoids": []}
    reduced_at = {}
    for k in SIM2_FIT_RANGE:
        table["k"].append(k)
        table["fitted"].append(fits[k].bic)
        if k == 10:
            for method in ("greedy", "hclust", "kmedoids"):
                table[method].append(fits[10].bic)
            continue
        mix, trace = greedy_reduce(base, k)
        table["greedy"].append(reduced_bic(mix))
        reduced_at.setdefault("greedy", {})[k] = (mix, trace)
        for method in ("hclust", "kmedoids"):
            mix, trace = partitional_reduce(
                base, k, method=method,
                seed=_derived_seed(seed, "sim2-reduce", method, k))
            table[method].append(reduced_bic(mix))
            reduced_at.setdefault(method, {})[k] = (mix, trace)

    for method in ("greedy", "hclust", "kmedoids"):
        mix, trace = reduced_at[method][4]
        write_mixture(os.path.join(out_dir, f"reduced_{method}_k4.json"), mix)
        write_trace(os.path.join(out_dir, f"trace_{method}_k4.jsonl"), trace)

    with open(os.path.join(out_dir, "bic.csv"), "w", encoding="utf-8") as fh:
        fh.write("k,fitted,greedy,hclust,kmedoids\n")
        for i, k in enumerate(table["k"]):
            fh.write(f"{k},{table['fitted'][i]!r},{table['greedy'][i]!r},"
                     f"{table['hclust'][i]!r},{table['kmedoids'][i]!r}\n")
    return table


def run_experiment(cfg: ExperimentConfig) -> dict:
    if cfg.scenario == "sim1":
        return run_sim1(cfg.seed, cfg.output_dir)
    return run_sim2(cfg.seed, cfg.output_dir)
