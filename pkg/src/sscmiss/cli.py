"""Command-line interface: generate / cluster / certify / complete / eval /
sweep."""

import argparse
import os
import sys

import numpy as np

from . import affinity as affin
from . import completion, geomcert, harness, metrics
from .datagen import (ObservedMatrix, SamplingSpec, generate_model,
                      normalize_observed, read_data_csv, read_labels_csv,
                      read_mask_csv, sample, write_data_csv, write_labels_csv,
                      write_mask_csv)


def _add_model_flags(p):
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--per-cluster", type=int, default=150)
    p.add_argument("--mode", choices=("sphere", "gaussian"),
                   default="gaussian")
    p.add_argument("--seed", type=int, default=0)


def _add_sampling_flags(p):
    p.add_argument("--pattern", choices=("same", "random"), default="random")
    p.add_argument("--p", type=float, default=0.5, dest="ratio")


def _pattern_name(short):
    return "same-location" if short == "same" else "per-column-random"


def _load_observed(args):
    values = read_data_csv(args.data)
    mask = read_mask_csv(args.mask)
    return ObservedMatrix(values=np.where(mask, values, 0.0), mask=mask)


def cmd_generate(args):
    model = generate_model(args.n, args.L, args.d, args.per_cluster,
                           mode=args.mode, seed=args.seed)
    X = sample(model, SamplingSpec(_pattern_name(args.pattern), args.ratio,
                                   seed=args.seed))
    os.makedirs(args.out, exist_ok=True)
    write_data_csv(os.path.join(args.out, "data.csv"), X.values)
    write_mask_csv(os.path.join(args.out, "mask.csv"), X.mask)
    write_labels_csv(os.path.join(args.out, "labels.csv"), model.labels)
    print(f"wrote data.csv, mask.csv, labels.csv to {args.out}")


def cmd_cluster(args):
    X = _load_observed(args)
    prep = X if args.no_normalize else normalize_observed(X)
    if args.algo == "ewzf":
        aff = affin.affinity_ewzf(prep)
    elif args.algo == "ewzf-oo":
        aff = affin.affinity_ewzf_oo(prep)
    elif args.algo == "ewzf-oo-lasso":
        aff = affin.affinity_ewzf_oo_lasso(X, alpha=args.alpha)
    else:
        q = args.q or affin.default_tsc_q(X.N // args.L)
        aff = affin.affinity_tsc(prep, q)
    labels = affin.spectral_cluster(aff, args.L, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    affin.write_affinity_csv(os.path.join(args.out, "affinity.csv"), aff)
    write_labels_csv(os.path.join(args.out, "pred_labels.csv"), labels)
    print(f"wrote affinity.csv, pred_labels.csv to {args.out}")


def cmd_certify(args):
    model = generate_model(args.n, args.L, args.d, args.per_cluster,
                           mode=args.mode, seed=args.seed)
    X = sample(model, SamplingSpec(_pattern_name(args.pattern), args.ratio,
                                   seed=args.seed))
    checker = {"oo": geomcert.check_thm_oo,
               "ewzf": geomcert.check_thm_ewzf,
               "same-location": geomcert.check_thm_same_location}[args.check]
    reports = []
    for ell in range(args.L):
        count = model.cluster_columns(ell).size
        if args.max_per_cluster:
            count = min(count, args.max_per_cluster)
        for i in range(count):
            reports.append(checker(model, X, ell, i))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "certificate_report.csv")
    geomcert.write_certificate_report_csv(path, reports)
    n_hold = sum(r.holds for r in reports)
    print(f"{n_hold}/{len(reports)} certificates hold; wrote {path}")


def cmd_complete(args):
    X = _load_observed(args)
    labels = read_labels_csv(args.labels)
    result = completion.complete_by_cluster(X, labels)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "completed.csv")
    completion.write_completed_csv(path, result.completed)
    print(f"wrote {path} (per-cluster ranks {result.per_cluster_rank}, "
          f"converged {result.converged})")


def cmd_eval(args):
    pred = read_labels_csv(args.pred)
    truth = read_labels_csv(args.truth_labels)
    print(f"clustering_error = {metrics.clustering_error(pred, truth):.6g}")
    if args.completed and args.truth_data:
        completed = read_data_csv(args.completed)
        truth_data = read_data_csv(args.truth_data)
        err = metrics.completion_error(completed, truth_data)
        print(f"completion_error = {err:.6g}")


def cmd_sweep(args):
    raw = {}
    if args.config:
        raw.update(harness.parse_config_file(args.config))
    overrides = {
        "n": args.n, "L": args.L, "dims": args.d, "N_per": args.per_cluster,
        "mode": args.mode, "base_seed": args.seed,
        "pattern": _pattern_name(args.pattern) if args.pattern else None,
        "p_grid": args.p_grid, "algorithms": args.algo, "alpha": args.alpha,
        "trials": args.trials, "out_dir": args.out,
        "svg": True if args.svg else None,
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    config = harness.config_from_strings(raw)
    result = harness.sweep(config)
    files = harness.emit(result, config.out_dir, svg=config.svg)
    print("wrote " + ", ".join(files))
    for alg in config.algorithms:
        thr = harness.zero_threshold(result, alg, "clustering_error",
                                     config.zero_tol_clustering)
        print(f"{alg}: zero-clustering-error threshold "
              f"{'none' if thr is None else thr}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sscmiss",
        description="Sparse subspace clustering under missing data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic instance")
    _add_model_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="build an affinity and cluster")
    p.add_argument("--data", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--algo", choices=harness.ALGORITHMS, default="ewzf-oo")
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--alpha", type=float, default=7.34)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--no-normalize", action="store_true",
                   help="skip unit-normalizing the zero-filled columns")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("certify", help="evaluate success conditions on a "
                                       "generated instance")
    _add_model_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--check", choices=("oo", "ewzf", "same-location"),
                   default="oo")
    p.add_argument("--max-per-cluster", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("complete", help="per-cluster SVT completion")
    p.add_argument("--data", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("eval", help="evaluate predicted labels/completion")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth-labels", required=True)
    p.add_argument("--completed")
    p.add_argument("--truth-data")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a sampling-ratio sweep")
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--per-cluster", type=int)
    p.add_argument("--mode", choices=("sphere", "gaussian"))
    p.add_argument("--pattern", choices=("same", "random"))
    p.add_argument("--p-grid", dest="p_grid",
                   help="a:b:step or comma-separated values")
    p.add_argument("--algo", help="comma-separated algorithm list")
    p.add_argument("--alpha", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--svg", action="store_true", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
