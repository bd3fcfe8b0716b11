"""Command-line harness.

Subcommands: generate, fit, eval, sweep, transfer, baseline-rb,
baseline-taylor, theory, timing. The output root defaults to the
OPSURROGATE_OUT environment variable (falling back to the working
directory). `--threads 1` pins the BLAS/FFT thread pools before numpy is
imported, which is the mode in which artifacts are bit-reproducible.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _pin_threads(argv):
    if "--threads" in argv:
        idx = argv.index("--threads")
        if idx + 1 < len(argv):
            for var in _THREAD_VARS:
                os.environ[var] = argv[idx + 1]


def _out_root(args) -> str:
    return args.out or os.environ.get("OPSURROGATE_OUT", ".")


def _add_common(p):
    p.add_argument("--threads", type=int, default=None,
                   help="pin BLAS/FFT threads (1 => bit-reproducible)")
    p.add_argument("--out", default=None,
                   help="output root (default: $OPSURROGATE_OUT or cwd)")


def _add_problem_args(p):
    p.add_argument("--problem", required=True,
                   choices=["linear_elliptic", "poisson", "darcy_lognormal",
                            "darcy_piecewise", "burgers", "coeff_model"])
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=None,
                   help="KL truncation wavenumber (default: grid Nyquist)")
    p.add_argument("--beta", type=float, default=1e-2)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--coeff-dim", type=int, default=64)


def _problem_config(args):
    from .datasets import ProblemConfig

    return ProblemConfig(
        problem=args.problem,
        resolution=args.resolution,
        count=args.count,
        seed=args.seed,
        cutoff=args.cutoff,
        beta=args.beta,
        t_final=args.t_final,
        coeff_dim=args.coeff_dim,
    )


def _add_fit_args(p):
    p.add_argument("--d", type=int, required=True, help="reduced dimension")
    p.add_argument("--regressor", choices=["nn", "linear"], default="nn")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--fit-seed", type=int, default=0)
    p.add_argument("--hidden", default="500,1000,2000,1000,500",
                   help="comma-separated hidden layer widths")
    p.add_argument("--unweighted", action="store_true",
                   help="use plain Euclidean (not quadrature-weighted) PCA")


def _fit_config(args):
    from .harness import FitConfig

    return FitConfig(
        d=args.d,
        regressor=args.regressor,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.fit_seed,
        hidden=tuple(int(v) for v in args.hidden.split(",")),
        weighted=not args.unweighted,
    )


def cmd_generate(args) -> int:
    from .datasets import generate_dataset, write_dataset

    cfg = _problem_config(args)
    ds = generate_dataset(cfg)
    path = os.path.join(_out_root(args), args.name)
    write_dataset(ds, path)
    print(f"wrote dataset {path} ({cfg.count} samples at n={cfg.resolution})")
    return 0


def cmd_fit(args) -> int:
    from .datasets import read_dataset
    from .harness import fit_from_dataset, save_surrogate

    ds = read_dataset(args.dataset)
    test_ds = read_dataset(args.test_dataset) if args.test_dataset else None
    fit_cfg = _fit_config(args)
    sur, result = fit_from_dataset(ds, fit_cfg, test_ds=test_ds)
    path = os.path.join(_out_root(args), args.name)
    meta = {
        "problem": ds.config.problem,
        "train_count": ds.config.count,
        "train_seed": ds.config.seed,
        "fit_seed": fit_cfg.seed,
        "epochs": fit_cfg.epochs,
    }
    if result is not None:
        meta["learning_rate"] = result.learning_rate
        save_surrogate(sur, path, meta, result.train_loss, result.test_metric)
    else:
        save_surrogate(sur, path, meta)
    print(f"wrote surrogate {path} (d={fit_cfg.d}, regressor={fit_cfg.regressor})")
    return 0


def cmd_eval(args) -> int:
    import csv

    from .datasets import read_dataset
    from .harness import evaluate, load_surrogate

    sur = load_surrogate(args.model)
    test = read_dataset(args.dataset)
    if test.config.count == 0 or test.xs.shape[0] == 0:
        print("error: empty test set", file=sys.stderr)
        return 2
    error, online = evaluate(sur, test, allow_transfer=args.transfer)
    row = {
        "problem": test.config.problem,
        "resolution": test.resolution,
        "d": sur.pca_in.d,
        "N": test.config.count,
        "regressor": "linear" if type(sur.regressor).__name__ == "LinearModel" else "nn",
        "relative_error": repr(error),
        "online_seconds": repr(online),
    }
    writer = csv.DictWriter(sys.stdout, fieldnames=list(row))
    writer.writeheader()
    writer.writerow(row)
    if args.csv:
        with open(args.csv, "a", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(row))
            if fh.tell() == 0:
                w.writeheader()
            w.writerow(row)
    return 0


def cmd_sweep(args) -> int:
    from .harness import SWEEP_COLUMNS, run_sweep, write_csv, write_svg_lines

    base = _problem_config(args)
    fit_cfg = _fit_config(args)
    values = [int(v) for v in args.values.split(",")]
    regressors = tuple(args.regressors.split(","))
    rows = run_sweep(base, fit_cfg, args.axis, values, args.n_test,
                     args.test_seed, regressors=regressors)
    root = _out_root(args)
    csv_path = os.path.join(root, f"{args.name}.csv")
    write_csv(csv_path, rows, SWEEP_COLUMNS)
    axis_key = {"resolution": "resolution", "dimension": "d", "samples": "N"}[args.axis]
    series = {}
    for reg in regressors:
        pts = [(r[axis_key], r["relative_error"]) for r in rows
               if r["regressor"] == reg and r["status"] == "ok"]
        if pts:
            series[reg] = ([p[0] for p in pts], [p[1] for p in pts])
    if series:
        write_svg_lines(os.path.join(root, f"{args.name}.svg"), series,
                        args.axis, "relative test error")
    print(f"wrote {csv_path} ({len(rows)} rows)")
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"cell failed: {r}", file=sys.stderr)
    return 1 if failed else 0


def cmd_transfer(args) -> int:
    import csv

    from .datasets import read_dataset
    from .harness import evaluate, load_surrogate, transfer_surrogate

    sur = load_surrogate(args.model)
    test = read_dataset(args.dataset)
    moved, gram_residual = transfer_surrogate(sur, test.resolution)
    error, online = evaluate(moved, test)
    row = {
        "source_n": sur.pca_in.n,
        "target_n": test.resolution,
        "gram_residual": repr(gram_residual),
        "relative_error": repr(error),
        "online_seconds": repr(online),
    }
    writer = csv.DictWriter(sys.stdout, fieldnames=list(row))
    writer.writeheader()
    writer.writerow(row)
    return 0


def cmd_baseline_rb(args) -> int:
    import csv

    import numpy as np

    from .datasets import generate_dataset
    from .grid import GridFunction, quadrature_weights
    from .pca import fit_pca
    from .surrogate import RbSolver, relative_errors

    base = _problem_config(args)
    from dataclasses import replace

    train = generate_dataset(base)
    test = generate_dataset(replace(base, count=args.n_test, seed=args.test_seed))
    pca_out = fit_pca(train.y_functions(), args.d)
    rb = RbSolver(pca_out)
    n = base.resolution
    ones = GridFunction("box2d", n, np.ones(n * n))
    preds = np.stack([rb.solve(GridFunction("box2d", n, a), ones).values
                      for a in test.xs])
    ratios, _ = relative_errors(preds, test.ys, quadrature_weights("box2d", n))
    row = {"method": "rb", "problem": base.problem, "d": args.d,
           "relative_error": repr(float(np.mean(ratios)))}
    writer = csv.DictWriter(sys.stdout, fieldnames=list(row))
    writer.writeheader()
    writer.writerow(row)
    return 0


def cmd_baseline_taylor(args) -> int:
    from .harness import write_csv
    from .protocols import CHKIFA_COLUMNS, run_chkifa_comparison

    base = _problem_config(args)
    budgets = [int(v) for v in args.budgets.split(",")]
    rows = run_chkifa_comparison(base, budgets, args.n_test, args.test_seed)
    path = os.path.join(_out_root(args), f"{args.name}.csv")
    write_csv(path, rows, CHKIFA_COLUMNS)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


THEORY_CHECKS = ("fan", "mc-rate", "chebyshev", "lipschitz")


def cmd_theory(args) -> int:
    import csv

    from .random_fields import mu_g_spec

    if args.check == "fan":
        from .theory import check_fan

        report = check_fan(args.dim, args.d, args.trials, args.seed)
    elif args.check == "mc-rate":
        from .theory import check_mc_covariance_rate

        spec = mu_g_spec(args.cutoff or 8)
        n_list = [int(v) for v in args.n_list.split(",")]
        report = check_mc_covariance_rate(spec, n_list, args.trials, args.seed)
    elif args.check == "chebyshev":
        from .theory import check_chebyshev_coverage

        spec = mu_g_spec(args.cutoff or 16)
        report = check_chebyshev_coverage(
            spec, args.d, args.delta, args.n_train, args.n_test, args.seed
        )
    elif args.check == "lipschitz":
        from .pca import fit_pca
        from .random_fields import derive_seed, sample_field
        from .theory import check_encoder_lipschitz

        spec = mu_g_spec(args.cutoff or 16)
        data = [sample_field(spec, 33, derive_seed(args.seed, i))
                for i in range(args.n_train)]
        model = fit_pca(data, args.d)
        report = check_encoder_lipschitz(model, args.trials, args.seed + 1)
    else:
        print(f"error: unknown theory check {args.check!r}; "
              f"choose from {THEORY_CHECKS}", file=sys.stderr)
        return 2
    print(report.summary())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["key", "value"])
            writer.writerows(report.rows())
    return 0 if report.passed else 1


def cmd_timing(args) -> int:
    from .harness import write_csv
    from .protocols import TIMING_COLUMNS, run_rb_timing

    base = _problem_config(args)
    fit_cfg = _fit_config(args)
    d_list = [int(v) for v in args.d_list.split(",")]
    rows = run_rb_timing(base, d_list, fit_cfg)
    path = os.path.join(_out_root(args), f"{args.name}.csv")
    write_csv(path, rows, TIMING_COLUMNS)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opsurrogate",
        description="PCA + latent-regressor surrogates for PDE solution maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample inputs, solve, write a dataset")
    _add_common(p)
    _add_problem_args(p)
    p.add_argument("--name", required=True, help="dataset directory name")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="fit PCA + regressor from a dataset")
    _add_common(p)
    _add_fit_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--test-dataset", default=None,
                   help="optional validation set for per-epoch test error")
    p.add_argument("--name", required=True, help="model directory name")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="relative test error of a saved surrogate; "
                       "CSV columns: problem,resolution,d,N,regressor,"
                       "relative_error,online_seconds")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--transfer", action="store_true",
                   help="move the PCA bases if grids differ")
    p.add_argument("--csv", default=None, help="append the row to this CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep one axis; CSV columns: problem,"
                       "resolution,d,N,regressor,relative_error,online_seconds,status")
    _add_common(p)
    _add_problem_args(p)
    _add_fit_args(p)
    p.add_argument("--axis", required=True, choices=["resolution", "dimension",
                                                     "samples"])
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--test-seed", type=int, default=777)
    p.add_argument("--regressors", default="nn,linear")
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("transfer", help="evaluate a surrogate on another mesh "
                       "by moving its PCA bases")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("baseline-rb", help="reduced-basis Galerkin error")
    _add_common(p)
    _add_problem_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-test", type=int, default=50)
    p.add_argument("--test-seed", type=int, default=777)
    p.set_defaults(func=cmd_baseline_rb)

    p = sub.add_parser("baseline-taylor", help="Taylor truncation vs PCA+linear "
                       "at equal solve budgets; CSV: method,d,budget,"
                       "relative_error,test_hash")
    _add_common(p)
    _add_problem_args(p)
    p.add_argument("--budgets", required=True)
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--test-seed", type=int, default=777)
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_baseline_taylor)

    p = sub.add_parser("theory", help=f"run an empirical theory check: "
                       f"{', '.join(THEORY_CHECKS)}")
    _add_common(p)
    p.add_argument("check", nargs="?", default="")
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--n-list", default="64,128,256,512,1024")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("timing", help="online/offline timing: RB vs PCA+NN vs "
                       "PCA+linear; CSV: method,d,online_s,offline_s")
    _add_common(p)
    _add_problem_args(p)
    _add_fit_args(p)
    p.add_argument("--d-list", required=True)
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_timing)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _pin_threads(argv)  # must happen before numpy is imported
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
