"""Command-line surface: one binary, one subcommand per operation.

Exit codes: 0 on success, 2 on usage or input errors, 3 on numerical
failures inside an algorithm (e.g. a reduction forced to merge antipodal
components). Non-convergence of iterative fits is not a failure; it is
reported through metadata with exit 0.
"""

import argparse
import json
import os
import sys

from . import formats
from .barycenter import BarycenterConfig, barycenter
from .core import VmfMixture, sample_mixture
from .experiments import ExperimentConfig, run_experiment
from .fit_eval import FitConfig, fit_em, mds_embed
from .geometry import (AntipodalMeansError, l2_distance_mc, wl_distance, wl_interpolate)
from .reduction import greedy_reduce, partitional_reduce

_FMT = "%.17g"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_mixture(path) -> VmfMixture:
    try:
        return formats.read_mixture(path)
    except (ValueError, OSError) as err:
        raise CliError(2, f"{path}: {err}") from err


def _cmd_dist(args) -> None:
    a = formats.single_component(_load_mixture(args.a))
    b = formats.single_component(_load_mixture(args.b))
    if args.metric == "wl":
        value = wl_distance(a, b)
    else:
        value = l2_distance_mc(a, b, seed=args.seed, rel_tol=args.rel_tol)
    print(_FMT % value)


def _cmd_barycenter(args) -> None:
    m = _load_mixture(args.mixture)
    cfg = BarycenterConfig(step_size=args.step_size, max_iters=args.max_iters, tol=args.tol)
    try:
        result = barycenter(m.components, m.weights, cfg)
    except (AntipodalMeansError, ValueError) as err:
        raise CliError(2, f"barycenter undefined for this input: {err}") from err
    out = VmfMixture(components=(result.params,), weights=[1.0])
    formats.write_mixture(args.output, out)
    if args.meta:
        with open(args.meta, "w", encoding="utf-8") as fh:
            json.dump({"iterations": result.iterations,
                       "final_change": result.final_change,
                       "converged": result.converged}, fh, indent=2)
            fh.write("\n")
    if not result.converged:
        print("warning: barycenter did not converge within max-iters", file=sys.stderr)


def _cmd_reduce(args) -> None:
    m = _load_mixture(args.mixture)
    if args.k >= m.k:
        raise CliError(2, f"--k must be below the component count ({m.k})")
    try:
        if args.method == "greedy":
            reduced, trace = greedy_reduce(m, args.k)
        else:
            reduced, trace = partitional_reduce(m, args.k, method=args.method, seed=args.seed)
    except AntipodalMeansError as err:
        raise CliError(3, f"reduction aborted: {err}") from err
    except ValueError as err:
        raise CliError(2, str(err)) from err
    formats.write_mixture(args.output, reduced)
    if args.trace:
        formats.write_trace(args.trace, trace)


def _cmd_fit(args) -> None:
    try:
        data = formats.read_samples(args.samples, header=args.header)
    except (ValueError, OSError) as err:
        raise CliError(2, f"{args.samples}: {err}") from err
    cfg = FitConfig(k=args.k, restarts=args.restarts, seed=args.seed)
    try:
        result = fit_em(data, cfg)
    except ValueError as err:
        raise CliError(2, str(err)) from err
    formats.write_mixture(args.output, result.mixture)
    formats.write_fit_metadata(args.meta, result)


def _cmd_sample(args) -> None:
    m = _load_mixture(args.mixture)
    if args.n < 1:
        raise CliError(2, "--n must be >= 1")
    s = sample_mixture(m, args.n, seed=args.seed)
    formats.write_samples(args.output, s, header=args.header)


def _cmd_interpolate(args) -> None:
    a = formats.single_component(_load_mixture(args.a))
    b = formats.single_component(_load_mixture(args.b))
    if args.steps < 1:
        raise CliError(2, "--steps must be >= 1")
    os.makedirs(args.output_dir, exist_ok=True)
    try:
        for i in range(args.steps + 1):
            p = wl_interpolate(a, b, i / args.steps)
            out = VmfMixture(components=(p,), weights=[1.0])
            formats.write_mixture(
                os.path.join(args.output_dir, f"interp_{i:03d}.json"), out)
    except AntipodalMeansError as err:
        raise CliError(2, f"no unique geodesic: {err}") from err


def _cmd_embed(args) -> None:
    try:
        dm = formats.read_distance_matrix(args.matrix)
    except (ValueError, OSError) as err:
        raise CliError(2, f"{args.matrix}: {err}") from err
    try:
        result = mds_embed(dm, dim=args.dim)
    except ValueError as err:
        raise CliError(2, str(err)) from err
    formats.write_coordinates(args.output, result.coords)
    if result.padded:
        print(f"warning: only {result.n_positive} positive eigenvalues; "
              "remaining columns are zero", file=sys.stderr)


def _cmd_experiment(args) -> None:
    cfg = ExperimentConfig(scenario=args.scenario, seed=args.seed, output_dir=args.out)
    summary = run_experiment(cfg)
    for key, value in summary.items():
        print(f"{key}: {value}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vmfgeom",
        description="Wasserstein-like geometry on von Mises-Fisher distributions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two single-component mixture files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=["wl", "l2"], default="wl")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=float, default=1e-3)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("barycenter", help="barycenter of a mixture file under its weights")
    p.add_argument("mixture")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--meta", help="optional diagnostics JSON")
    p.add_argument("--step-size", type=float, default=0.25)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_barycenter)

    p = sub.add_parser("reduce", help="reduce a mixture to --k components")
    p.add_argument("mixture")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=["greedy", "hclust", "kmedoids"], default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--trace", help="write merge events as JSON lines")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("fit", help="fit a vMF mixture to a sample CSV by EM")
    p.add_argument("samples")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header", action="store_true", help="sample CSV has a header row")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--meta", required=True, help="metadata JSON output")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("sample", help="draw labeled samples from a mixture file")
    p.add_argument("mixture")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header", action="store_true", help="write a header row")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("interpolate", help="geodesic path between two laws")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--steps", type=int, required=True,
                   help="writes steps+1 files at t = 0, 1/steps, ..., 1")
    p.add_argument("-o", "--output-dir", required=True)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("embed", help="classical MDS embedding of a distance matrix CSV")
    p.add_argument("matrix")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("experiment", help="run a built-in synthetic experiment")
    p.add_argument("--scenario", choices=["sim1", "sim2"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
