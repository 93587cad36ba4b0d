"""Sphere primitives and the Wasserstein-like (WL) distance on vMF laws.

The WL distance is the geodesic distance of the product manifold
S^{d-1} x R+ carrying the arc-length metric on the sphere factor and the
pullback of s = 1/sqrt(kappa) on the concentration factor:

    WL(p, q)^2 = arccos^2(<mu_p, mu_q>) + (d-1) (1/sqrt(k_p) - 1/sqrt(k_q))^2

It vanishes iff the laws coincide, reduces to the arc length as both
concentrations grow, and blows up as either concentration vanishes.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import VmfParams, _as_unit_vector, log_normalizing_constant
from .rng import substream


class AntipodalMeansError(ValueError):
    """Raised where a logarithmic map (and hence a geodesic) is not unique."""


@dataclass(frozen=True)
class TangentVector:
    """A vector in the tangent space of the sphere at a base point.

    The vector is re-projected onto the tangent hyperplane on construction,
    so <base, vec> = 0 holds within 1e-9 afterwards.
    """

    base: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        base = _as_unit_vector(self.base, "base")
        vec = np.asarray(self.vec, dtype=np.float64)
        if vec.shape != base.shape:
            raise ValueError("vec must match the dimension of base")
        if not np.all(np.isfinite(vec)):
            raise ValueError("vec must be finite")
        vec = vec - (base @ vec) * base
        vec.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "vec", vec)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative dissimilarity matrix with an exactly zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        if not np.all(np.isfinite(m)) or np.any(m < 0.0):
            raise ValueError("entries must be finite and nonnegative")
        if np.any(np.diag(m) != 0.0):
            raise ValueError("diagonal must be exactly zero")
        if not np.array_equal(m, m.T):
            raise ValueError("matrix must be exactly symmetric")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def geodesic_distance(x, y) -> float:
    """Great-circle distance arccos(<x, y>) in [0, pi].

    The inner product is clamped to [-1, 1]; round-off on near-identical
    inputs would otherwise push arccos into NaN.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_same_dim(x, y)
    return math.acos(min(1.0, max(-1.0, float(x @ y))))


def wl_distance(p: VmfParams, q: VmfParams) -> float:
    """Wasserstein-like distance between two vMF laws of equal dimension."""
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    ang = geodesic_distance(p.mu, q.mu)
    ds = 1.0 / math.sqrt(p.kappa) - 1.0 / math.sqrt(q.kappa)
    return math.sqrt(ang * ang + (p.d - 1) * ds * ds)


def exp_map(t: TangentVector) -> np.ndarray:
    """Follow the geodesic from the base point along the tangent vector.

    Returns cos(|v|) x + sin(|v|)/|v| v; for |v| below 1e-12 the series
    limit is the base point itself.
    """
    return _exp(t.base, t.vec)


def _exp(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    nv = float(np.linalg.norm(v))
    if nv < 1e-12:
        return x.copy()
    out = math.cos(nv) * x + (math.sin(nv) / nv) * v
    return out / np.linalg.norm(out)


def log_map(x, y) -> TangentVector:
    """Inverse of exp_map: tangent vector at x pointing to y with length
    geodesic_distance(x, y). Undefined (raises) for antipodal inputs."""
    x = _as_unit_vector(x, "x")
    y = _as_unit_vector(y, "y")
    _check_same_dim(x, y)
    return TangentVector(base=x, vec=_log(x, y))


def _log(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    cos = min(1.0, max(-1.0, float(x @ y)))
    if cos <= -1.0 + 1e-12:
        raise AntipodalMeansError("log map is not unique for antipodal points")
    proj = y - cos * x
    norm = float(np.linalg.norm(proj))
    if norm == 0.0 or cos >= 1.0:
        return np.zeros_like(x)
    return (math.acos(cos) / norm) * proj


def wl_interpolate(p: VmfParams, q: VmfParams, t: float) -> VmfParams:
    """Point at parameter t on the constant-speed WL geodesic from p to q.

    The mean direction follows the great circle; the concentration is linear
    in the s = 1/sqrt(kappa) coordinate, where the concentration factor of
    the product metric is flat.
    """
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return p
    if t == 1.0:
        return q
    mu_t = _exp(p.mu, t * _log(p.mu, q.mu))
    s = (1.0 - t) / math.sqrt(p.kappa) + t / math.sqrt(q.kappa)
    return VmfParams(mu=mu_t, kappa=s ** -2)


def _uniform_sphere(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    pts = rng.standard_normal((n, d))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def l2_distance_mc(p: VmfParams, q: VmfParams, seed: int, rel_tol: float = 1e-3,
                   max_draws: int = 2 ** 23) -> float:
    """Monte-Carlo estimate of the L2 distance between the two densities,
    (integral of (f_p - f_q)^2 over the sphere)^(1/2).

    Uniform sphere draws start at 2^10 and double, reusing every previous
    draw, until the running estimate's relative change drops below rel_tol
    (or max_draws is reached). Symmetric in (p, q) by construction: the
    integrand is symmetric and both orders consume identical draws.
    """
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    rng = substream(seed, "l2-mc")
    d = p.d
    log_area = math.log(2.0) + (d / 2.0) * math.log(math.pi) - math.lgamma(d / 2.0)
    log_cp = log_normalizing_constant(d, p.kappa)
    log_cq = log_normalizing_constant(d, q.kappa)

    total = 0.0
    n_total = 0
    batch = 2 ** 10
    prev = None
    while True:
        x = _uniform_sphere(rng, batch, d)
        fp = np.exp(log_cp + p.kappa * (x @ p.mu))
        fq = np.exp(log_cq + q.kappa * (x @ q.mu))
        sq = (fp - fq) ** 2
        if not np.all(np.isfinite(sq)):
            raise ValueError("density overflow: parameters outside float64 range")
        total += float(sq.sum())
        n_total += batch
        est = math.sqrt(math.exp(log_area) * total / n_total)
        if prev is not None:
            if abs(est - prev) <= rel_tol * max(abs(est), abs(prev)):
                return est
            if n_total >= max_draws:
                return est
        prev = est
        batch = n_total  # doubling schedule


def pairwise_matrix(items, metric: str = "wl", seed: int = 0,
                    rel_tol: float = 1e-3, max_draws: int = 2 ** 23) -> DistanceMatrix:
    """Pairwise distances between vMF laws under 'wl' or 'l2_mc'.

    Each unordered pair is evaluated exactly once and mirrored, so the
    result is exactly symmetric. For l2_mc the stream of pair (i, j) is
    derived from (seed, i, j), which makes the matrix reproducible whether
    pairs run sequentially or on VMFGEOM_THREADS workers.
    """
    items = list(items)
    if not items:
        raise ValueError("need at least one distribution")
    d = items[0].d
    if any(p.d != d for p in items):
        raise ValueError("all distributions must share the same dimension")
    n = len(items)
    out = np.zeros((n, n))

    if metric == "wl":
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = wl_distance(items[i], items[j])
    elif metric == "l2_mc":
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

        def one(pair):
            i, j = pair
            pair_seed = substream(seed, "l2-pair", i, j).integers(0, 2 ** 62)
            return l2_distance_mc(items[i], items[j], seed=int(pair_seed),
                                  rel_tol=rel_tol, max_draws=max_draws)

        workers = int(os.environ.get("VMFGEOM_THREADS", "1"))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                vals = list(pool.map(one, pairs))
        else:
            vals = [one(pair) for pair in pairs]
        for (i, j), v in zip(pairs, vals):
            out[i, j] = v
            out[j, i] = v
    else:
        raise ValueError(f"unknown metric {metric!r} (expected 'wl' or 'l2_mc')")
    return DistanceMatrix(entries=out)
