"""On-disk formats: mixture JSON, sample CSV, distance-matrix CSV, trace JSONL.

Mixture files are UTF-8 JSON:

    {"dim": d, "components": [{"weight": w, "mu": [...], "kappa": k}, ...]}

A single law is a mixture with one component of weight 1. Floats in CSV
output use 17 significant digits; JSON floats use Python's shortest
round-trip representation. Both survive a write/read cycle bit-exactly.
"""

import json

import numpy as np

from .core import SampleSet, VmfMixture, VmfParams
from .fit_eval import FitResult
from .geometry import DistanceMatrix
from .reduction import ReductionTrace

_FMT = "%.17g"


def mixture_to_dict(m: VmfMixture) -> dict:
    return {
        "dim": m.d,
        "components": [
            {"weight": float(w), "mu": [float(v) for v in c.mu], "kappa": c.kappa}
            for c, w in zip(m.components, m.weights)
        ],
    }


def mixture_from_dict(doc: dict) -> VmfMixture:
    if not isinstance(doc, dict) or "components" not in doc:
        raise ValueError("mixture document must be an object with 'components'")
    comps = doc["components"]
    if not isinstance(comps, list) or not comps:
        raise ValueError("'components' must be a nonempty list")
    params = []
    weights = []
    for entry in comps:
        try:
            params.append(VmfParams(mu=np.asarray(entry["mu"], dtype=np.float64),
                                    kappa=float(entry["kappa"])))
            weights.append(float(entry["weight"]))
        except (KeyError, TypeError) as err:
            raise ValueError(f"malformed component entry: {err}") from err
    m = VmfMixture(components=tuple(params), weights=np.asarray(weights))
    if "dim" in doc and int(doc["dim"]) != m.d:
        raise ValueError(f"declared dim {doc['dim']} does not match components ({m.d})")
    return m


def write_mixture(path, m: VmfMixture) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mixture_to_dict(m), fh, indent=2)
        fh.write("\n")


def read_mixture(path) -> VmfMixture:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(f"not valid JSON: {err}") from err
    return mixture_from_dict(doc)


def single_component(m: VmfMixture) -> VmfParams:
    """The single law in a one-component mixture file; rejects K > 1."""
    if m.k != 1:
        raise ValueError(f"expected a single-component mixture, got {m.k} components")
    return m.components[0]


def write_samples(path, s: SampleSet, header: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            cols = [f"x{i}" for i in range(s.d)]
            if s.labels is not None:
                cols.append("label")
            fh.write(",".join(cols) + "\n")
        for i in range(s.n):
            row = [_FMT % v for v in s.points[i]]
            if s.labels is not None:
                row.append(str(int(s.labels[i])))
            fh.write(",".join(row) + "\n")


def read_samples(path, header: bool = False) -> SampleSet:
    """Read a sample CSV; a trailing label column is detected by checking
    whether the rows are unit-norm with or without their last column."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    if raw.shape[0] == 0:
        raise ValueError("sample file is empty")
    norms_all = np.linalg.norm(raw, axis=1)
    if np.all(np.abs(norms_all - 1.0) <= 1e-6):
        return SampleSet(points=raw)
    coords, last = raw[:, :-1], raw[:, -1]
    if raw.shape[1] >= 3 and np.all(last == np.round(last)) \
            and np.all(np.abs(np.linalg.norm(coords, axis=1) - 1.0) <= 1e-6):
        return SampleSet(points=coords, labels=last.astype(np.int64))
    raise ValueError("rows are not unit-norm, with or without a trailing label column")


def write_distance_matrix(path, dm: DistanceMatrix) -> None:
    np.savetxt(path, dm.entries, delimiter=",", fmt=_FMT)


def read_distance_matrix(path) -> DistanceMatrix:
    return DistanceMatrix(entries=np.loadtxt(path, delimiter=",", ndmin=2))


def write_trace(path, trace: ReductionTrace) -> None:
    """One JSON object per merge event, in order."""
    with open(path, "w", encoding="utf-8") as fh:
        for step, event in enumerate(trace.events):
            doc = {
                "step": step,
                "merged": list(event.merged),
                "weight": float(event.weight),
                "mu": [float(v) for v in event.result.mu],
                "kappa": event.result.kappa,
            }
            fh.write(json.dumps(doc) + "\n")


def write_fit_metadata(path, result: FitResult) -> None:
    doc = {
        "loglik": result.log_likelihood,
        "bic": result.bic,
        "iterations": result.iterations,
        "converged": result.converged,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_coordinates(path, coords: np.ndarray) -> None:
    np.savetxt(path, coords, delimiter=",", fmt=_FMT)
