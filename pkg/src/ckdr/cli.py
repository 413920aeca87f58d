"""Command-line interface.

Subcommands:
    simulate   draw a synthetic dataset and its ground truth
    fit        learn a reduction matrix and dual predictor from a CSV
    predict    apply a saved model to new samples
    cv         cross-validated hyperparameter sweep
    plot       ternary SVG plots for a 3-row model
    eval       score a saved model against a ground-truth file

Every failure exits nonzero with a single line ``ERROR <code>: <message>``
on stderr.  Heavy imports happen inside the command functions so that the
--threads cap can be applied to the BLAS before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _positive_seed() -> int:
    return int.from_bytes(os.urandom(8), "big") >> 1


def _parse_sigma(text: str):
    if text == "auto":
        return "auto"
    value = float(text)
    return value


def _parse_binary_map(text: str) -> dict:
    mapping = {}
    for pair in text.split(","):
        label, _, value = pair.partition("=")
        if value not in ("1", "+1", "-1"):
            raise argparse.ArgumentTypeError(
                f"binary map values must be 1 or -1, got {pair!r}"
            )
        mapping[label] = float(value)
    return mapping


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckdr",
        description="Interpretable kernel dimension reduction for compositional data",
    )
    parser.add_argument(
        "--threads", type=int, default=None,
        help="cap BLAS thread counts (results do not depend on this)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a synthetic dataset")
    p.add_argument("--setting", required=True, choices=("i", "ii", "iii", "iv"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--trunc", type=float, default=0.5, help="fraction of parts zeroed per sample")
    p.add_argument("--ar-rho", type=float, default=0.2)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--truth-out", default=None, help="ground-truth JSON path")

    p = sub.add_parser("fit", help="fit a reduction matrix and dual predictor")
    p.add_argument("--input", required=True)
    p.add_argument("--response", default="y", help="response column name")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sigma", type=_parse_sigma, default="auto",
                   help='Gaussian bandwidth, or "auto" for the median rule')
    p.add_argument("--sigma-b", type=float, default=0.0,
                   help="log2 scaling applied to the auto bandwidth")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--normalize", action="store_true", help="rescale rows to unit sum")
    p.add_argument("--min-prevalence", type=int, default=0,
                   help="drop features nonzero in fewer samples than this")
    p.add_argument("--binary-map", type=_parse_binary_map, default=None,
                   help='response label map, e.g. "case=1,control=-1"')
    p.add_argument("--amalgam-tol", type=float, default=1e-3,
                   help="column agreement tolerance for the block summary")
    p.add_argument("--out", required=True, help="model JSON path")

    p = sub.add_parser("predict", help="apply a saved model to new samples")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--response", default="y")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("cv", help="cross-validated grid search")
    p.add_argument("--input", required=True)
    p.add_argument("--response", default="y")
    p.add_argument("--grid-m", type=_int_list, default=(3, 4, 5, 6, 7))
    p.add_argument("--grid-b", type=_float_list, default=(-1.0, -0.5, 0.0, 0.5, 1.0))
    p.add_argument("--grid-eps", type=_float_list, default=(0.01, 0.001))
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--min-prevalence", type=int, default=0)
    p.add_argument("--binary-map", type=_parse_binary_map, default=None)
    p.add_argument("--out", default=None, help="report JSON path")

    p = sub.add_parser("plot", help="ternary SVG plots for a 3-row model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="CSV whose rows are projected and drawn")
    p.add_argument("--response", default="y")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--boundary", action="store_true",
                   help="overlay the signed-prediction zero level set")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--cluster-tol", type=float, default=0.05,
                   help="vertex pooling tolerance for the allocation plot")
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("eval", help="score a model against ground truth")
    p.add_argument("--model", required=True)
    p.add_argument("--truth", required=True, help="truth JSON from simulate")
    p.add_argument("--seed", type=int, default=0, help="seed for the column clustering")
    p.add_argument("--out", default=None, help="optional JSON output path")

    return parser


def _resolve_seed(seed):
    return _positive_seed() if seed is None else int(seed)


def cmd_simulate(args) -> int:
    from .data import write_dataset_csv
    from .simdata import (
        M_STAR,
        RESPONSE_KIND,
        SimSpec,
        block_labels,
        generate_responses,
        sample_compositions,
        true_subspace,
    )

    seed = _resolve_seed(args.seed)
    spec = SimSpec(
        setting=args.setting, n=args.n, d=args.d, ar_rho=args.ar_rho,
        trunc_frac=args.trunc, noise_scale=args.noise, seed=seed,
    )
    X = sample_compositions(spec)
    y = generate_responses(X, spec)
    write_dataset_csv(args.out, X, y=y)
    print(f"wrote {args.out}: setting {spec.setting}, n={spec.n}, d={spec.d}, seed={seed}")
    if args.truth_out:
        truth = {
            "version": 1,
            "setting": spec.setting,
            "n": spec.n,
            "d": spec.d,
            "seed": seed,
            "m_star": M_STAR[spec.setting],
            "response_kind": RESPONSE_KIND[spec.setting],
            "basis": true_subspace(spec.setting, spec.d).basis.tolist(),
            "block_labels": block_labels(spec.d).tolist(),
        }
        with open(args.truth_out, "w", encoding="utf-8") as fh:
            json.dump(truth, fh, indent=1)
            fh.write("\n")
        print(f"wrote {args.truth_out}")
    return 0


def _load_dataset(path, args, require_response: bool = True):
    from .data import ingest_csv

    return ingest_csv(
        path,
        response_column=args.response,
        normalize=args.normalize,
        min_prevalence=getattr(args, "min_prevalence", 0),
        binary_map=getattr(args, "binary_map", None),
        require_response=require_response,
    )


def cmd_fit(args) -> int:
    import numpy as np

    from .errors import MissingResponse
    from .kernels import LINEAR, KernelSpec, center_gram, gram
    from .metrics import numerical_rank
    from .optimizer import FitConfig, fit_ckdr, fitted_kernel
    from .predictor import fit_dual, save_model
    from .simplex import detect_amalgamation

    ds = _load_dataset(args.input, args)
    if ds.y is None:
        raise MissingResponse("fit needs a response column")
    seed = _resolve_seed(args.seed)
    config = FitConfig(
        m=args.m, sigma=args.sigma, sigma_b=args.sigma_b, epsilon=args.epsilon,
        restarts=args.restarts, max_iters=args.max_iters, seed=seed,
    )
    K_Y = gram(KernelSpec(LINEAR), ds.y)
    result = fit_ckdr(ds.X, center_gram(K_Y), config)
    kernel_z = fitted_kernel(config, ds.X)
    model = fit_dual(result.P_hat, ds.X, K_Y, kernel_z, args.epsilon, y=ds.y)
    model.seed = seed
    model.objective = result.objective
    save_model(model, args.out)

    sparsity = float(np.mean(result.P_hat < 1e-3))
    blocks = detect_amalgamation(result.P_hat, args.amalgam_tol)
    print(f"wrote {args.out}")
    print(f"seed            {seed}")
    print(f"sigma           {kernel_z.sigma:.17g}")
    print(f"objective       {result.objective:.17g}")
    print(f"restart         {result.restart_index} (converged={result.converged})")
    print(f"iterations      {len(result.trajectory) - 1}")
    print(f"rank            {numerical_rank(result.P_hat)}")
    print(f"sparsity        {sparsity:.4f} of entries below 1e-3")
    print(f"blocks at tol {args.amalgam_tol:g}: {len(blocks)}")
    for i, block in enumerate(blocks):
        preview = ",".join(str(j + 1) for j in block[:12])
        more = f",... ({len(block)} parts)" if len(block) > 12 else ""
        print(f"  block {i + 1}: {preview}{more}")
    return 0


def cmd_predict(args) -> int:
    import numpy as np

    from .errors import DimensionMismatch
    from .predictor import load_model, predict_real_many

    model = load_model(args.model)
    ds = _load_dataset(args.input, args, require_response=False)
    if ds.d != model.d:
        raise DimensionMismatch(
            f"input has {ds.d} features but the model expects {model.d}"
        )
    y_hat = predict_real_many(model, ds.X)
    binary = model.responses.ndim == 1 and set(np.unique(model.responses)) <= {-1.0, 1.0}
    cols = ["y_hat"]
    out = [y_hat]
    if binary:
        cols.append("y_class")
        out.append(np.where(y_hat >= 0.0, 1.0, -1.0))
    if ds.y is not None:
        cols.append("error")
        out.append((ds.y - y_hat) ** 2)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*out):
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    print(f"wrote {args.out}: {len(y_hat)} predictions")
    return 0


def cmd_cv(args) -> int:
    from .errors import MissingResponse
    from .model_selection import Grid, cross_validate, format_report, save_report
    from .optimizer import FitConfig

    ds = _load_dataset(args.input, args)
    if ds.y is None:
        raise MissingResponse("cv needs a response column")
    seed = _resolve_seed(args.seed)
    grid = Grid(m_values=args.grid_m, b_values=args.grid_b, epsilon_values=args.grid_eps)
    base = FitConfig(m=2, restarts=args.restarts, max_iters=args.max_iters)
    report = cross_validate(ds.X, ds.y, grid, n_folds=args.folds, fit_config=base, seed=seed)
    print(f"seed {seed}")
    print(format_report(report))
    if report.best:
        m, b, eps = report.best
        print(f"selected m={m}, b={b:g}, epsilon={eps:g}")
    else:
        print("no cell finished successfully")
    if args.out:
        save_report(report, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_plot(args) -> int:
    from .predictor import load_model
    from .ternary import PlotSpec, TernaryPoint, render_allocation_plot, render_projection_plot
    from .errors import DimensionMismatch, WrongTargetDimension

    model = load_model(args.model)
    if model.m != 3:
        raise WrongTargetDimension("ternary plots need a model with m = 3")
    ds = _load_dataset(args.data, args, require_response=False)
    if ds.d != model.d:
        raise DimensionMismatch(
            f"input has {ds.d} features but the model expects {model.d}"
        )
    spec = PlotSpec(boundary_resolution=args.resolution)
    Z = ds.X @ model.P_hat.T
    points = []
    for i in range(ds.n):
        label = value = None
        if ds.y is not None:
            if ds.response_kind == "binary":
                label = f"{ds.y[i]:+g}"
            else:
                value = float(ds.y[i])
        points.append(TernaryPoint(tuple(Z[i]), label=label, value=value))
    boundary_model = model if args.boundary else None

    proj_path = f"{args.out_prefix}_projection.svg"
    with open(proj_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_projection_plot(points, spec, boundary_model=boundary_model))
    print(f"wrote {proj_path}")

    alloc_path = f"{args.out_prefix}_allocation.svg"
    with open(alloc_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_allocation_plot(model.P_hat, spec, cluster_tol=args.cluster_tol))
    print(f"wrote {alloc_path}")

    if args.boundary:
        from .ternary import render_decision_boundary

        bpath = f"{args.out_prefix}_boundary.svg"
        with open(bpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_decision_boundary(model, spec))
        print(f"wrote {bpath}")
    return 0


def cmd_eval(args) -> int:
    import numpy as np

    from .metrics import (
        Subspace,
        adjusted_rand_index,
        chordal_distance,
        cluster_columns,
        numerical_rank,
    )
    from .predictor import load_model

    model = load_model(args.model)
    with open(args.truth, encoding="utf-8") as fh:
        truth = json.load(fh)
    basis = np.asarray(truth["basis"], dtype=float)
    rho = chordal_distance(model.P_hat, Subspace(basis))
    rank = numerical_rank(model.P_hat)
    report = {"rho": rho, "rank": rank}
    print(f"rho   {rho:.6f}")
    print(f"rank  {rank}")
    if "block_labels" in truth:
        labels = np.asarray(truth["block_labels"], dtype=int)
        k = int(labels.max()) + 1
        found = cluster_columns(model.P_hat, k, seed=args.seed)
        ari = adjusted_rand_index(found, labels)
        report["ari"] = ari
        print(f"ari   {ari:.6f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "plot": cmd_plot,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMEXPR_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    from .errors import CkdrError

    try:
        return _COMMANDS[args.command](args)
    except CkdrError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IO: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
