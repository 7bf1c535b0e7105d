"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error.  JSON holds scalar
results, CSV holds tables; every output is a deterministic function of the
inputs and ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .data import DataError, DatasetSchema, load_csv, one_hot
from .lift import run_bootstrap, run_lift
from .prox import PenaltySpec, lambda_max
from .selection import (
    DEFAULT_ALPHAS,
    METHODS,
    cross_validate,
    fit_method,
    fit_path,
    make_lambda_grid,
    r2_oos,
    rmse,
)
from .simulate import (
    SCANNER_SCHEMA,
    LinearSimConfig,
    MarketSimConfig,
    ScannerSimConfig,
    make_comparison_datasets,
    simulate_linear,
    simulate_market,
    simulate_scanner,
)
from .solver import SolverConfig, fit, standardize

log = logging.getLogger("alphanorm")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _lambda_arg(text: str):
    if text == "max":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'max', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", type=float, default=0.5, help="l_alpha exponent in (0, 1]")
    g.add_argument("--lambda", dest="lam", type=_lambda_arg, default=None, help="penalty; 'max' = null-model lambda")
    g.add_argument("--k-folds", type=int, default=5)
    g.add_argument("--tol", type=float, default=1e-7)
    g.add_argument("--max-sweeps", type=int, default=10_000)
    g.add_argument("--schema", type=Path, help="JSON dataset schema")
    g.add_argument("--response", default="y", help="response column when no schema is given")
    g.add_argument("--out", type=Path, default=Path("."), help="output directory")
    g.add_argument("-v", "--verbose", action="store_true")

    data = _Parser(add_help=False)
    data.add_argument("--data", type=Path, required=True, help="input CSV")

    grid = _Parser(add_help=False)
    grid.add_argument("--n-lambdas", type=int, default=100)
    grid.add_argument("--ratio-min", type=float, default=1e-4)

    parser = _Parser(prog="alphanorm", description="Sparse l_alpha regression toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("fit", parents=[common, data], help="single (alpha, lambda) fit -> fit.json")
    sub.add_parser("path", parents=[common, data, grid], help="regularization path -> path.csv")
    p = sub.add_parser("cv", parents=[common, data, grid], help="k-fold CV over (lambda, alpha) -> cv.json")
    p.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    p = sub.add_parser("compare", parents=[common, data, grid], help="out-of-sample RMSE ratios -> compare.csv")
    p.add_argument("--test", type=Path, help="test CSV; default is a seeded half split of --data")
    p.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))

    p = sub.add_parser("simulate-linear", parents=[common], help="linear benchmark data -> linear_*.csv")
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--n-train", type=int, default=600)
    p.add_argument("--n-test", type=int, default=600)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--n-true", type=int, default=5)
    p.add_argument("--beta-value", type=float, default=5.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--x-sd", type=float, default=10.0)

    p = sub.add_parser("simulate-market", parents=[common], help="logit market data -> market*.csv")
    p.add_argument("--markets", type=int, default=200)
    p.add_argument("--customers", type=int, default=100)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--k-c", type=int, default=46)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--cutoff", type=float, default=1.0)
    p.add_argument("--frac-binary", type=float, default=0.5)
    p.add_argument("--beta0", type=float, default=0.0)
    p.add_argument("--split-seed", type=int, default=None, help="defaults to --seed")

    p = sub.add_parser("simulate-scanner", parents=[common], help="scanner-like sales data -> scanner.csv")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--share-nonpromo", type=float, default=0.74)
    p.add_argument("--eta", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--beta-prom", type=float, default=0.3)
    p.add_argument("--sigma", type=float, default=0.5)

    p = sub.add_parser("lift", parents=[common, data], help="promotion lift -> lift.csv, lift_summary.json")
    p.add_argument("--method", choices=METHODS, default="alpha")
    p.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    p = sub.add_parser("bootstrap-prom", parents=[common, data], help="OLS half-sample bootstrap -> bootstrap_prom.csv")
    p.add_argument("--n-boot", type=int, default=1000)
    return parser


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2) + "\n", encoding="utf-8", newline="\n")


def _write_csv(path: Path, df: pd.DataFrame) -> None:
    df.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not np.isfinite(obj) else float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_sweeps=args.max_sweeps)


def _load(args, path=None, schema=None):
    path = path or args.data
    if schema is None:
        if args.schema:
            schema = DatasetSchema.from_json(args.schema)
        else:
            if not Path(path).is_file():
                raise DataError(f"data file not found: {path}")
            try:
                cols = pd.read_csv(path, nrows=0).columns
            except pd.errors.EmptyDataError as exc:
                raise DataError(f"{path} is empty") from exc
            schema = DatasetSchema.infer(list(cols), args.response)
    df, report = load_csv(path, schema)
    return df, schema, report


def _design(args):
    df, schema, report = _load(args)
    enc = one_hot(df, schema)
    return enc, df[schema.response].to_numpy(dtype=float), schema, report


def _resolve_lambda(args, d):
    if args.lam is None:
        raise DataError("--lambda is required for this command")
    if args.lam == "max":
        return lambda_max(d.z_max(), args.alpha)
    return float(args.lam)


def cmd_fit(args) -> None:
    enc, y, _, report = _design(args)
    d = standardize(enc.matrix, y, enc.column_names)
    lam = _resolve_lambda(args, d)
    res = fit(d, PenaltySpec(args.alpha, lam), _solver_cfg(args))
    out = res.to_dict()
    out["lambda_max"] = lambda_max(d.z_max(), args.alpha)
    out["dropped_columns"] = list(d.dropped)
    out["rows_used"] = report.n_kept
    _write_json(args.out / "fit.json", out)


def cmd_path(args) -> None:
    enc, y, _, _ = _design(args)
    d = standardize(enc.matrix, y, enc.column_names)
    grid = make_lambda_grid(d, args.alpha, args.n_lambdas, args.ratio_min)
    path = fit_path(d, args.alpha, grid, _solver_cfg(args))
    table = pd.DataFrame({"lambda": path.lambdas, "n_nonzero": path.n_nonzero, "objective": path.objectives})
    coefs = pd.DataFrame(path.coefs, columns=list(d.feature_names))
    _write_csv(args.out / "path.csv", pd.concat([table, coefs], axis=1))
    if not path.converged.all():
        log.warning("%d path points did not converge", int((~path.converged).sum()))


def cmd_cv(args) -> None:
    enc, y, _, _ = _design(args)
    lambdas = None
    if args.lam is not None:
        if args.lam == "max":
            raise DataError("--lambda max is not meaningful for cv")
        lambdas = [args.lam]
    cv = cross_validate(
        enc.matrix, y, args.alphas, args.k_folds, args.seed, _solver_cfg(args),
        n_lambdas=args.n_lambdas, ratio_min=args.ratio_min, lambdas=lambdas,
    )
    refit = cv.refit
    refit.feature_names = tuple(enc.column_names[i] for i in refit.kept)
    table = [
        {"alpha": a, "lambda": lam, "mean_rmse": m, "se": s, "fold_rmse": list(f)}
        for a, lam, m, s, f in zip(cv.candidate_alpha, cv.candidate_lambda, cv.mean_error, cv.se, cv.fold_errors.T)
    ]
    _write_json(
        args.out / "cv.json",
        {
            "k_folds": args.k_folds,
            "seed": args.seed,
            "selected": {"alpha": cv.selected_alpha, "lambda": cv.selected_lambda, "mean_rmse": cv.mean_error[cv.selected_index]},
            "model": refit.to_dict(),
            "table": table,
        },
    )


def cmd_compare(args) -> None:
    df, schema, _ = _load(args)
    if args.test:
        test, _, _ = _load(args, path=args.test, schema=schema)
        train = df
    else:
        perm = np.random.default_rng(args.seed).permutation(len(df))
        half = len(df) // 2
        train, test = df.iloc[np.sort(perm[:half])], df.iloc[np.sort(perm[half:])]
    enc = one_hot(train, schema)
    X_test = one_hot(test, schema, enc.levels).matrix
    y_train = train[schema.response].to_numpy(dtype=float)
    y_test = test[schema.response].to_numpy(dtype=float)
    if args.lam == "max":
        raise DataError("--lambda max is not meaningful for compare")
    shared = args.lam
    rows = []
    for method in METHODS:
        alphas = [args.alpha] if shared is not None else args.alphas
        res = fit_method(
            enc.matrix, y_train, method, alphas=alphas, lam=shared, k=args.k_folds, seed=args.seed,
            cfg=_solver_cfg(args), n_lambdas=args.n_lambdas, ratio_min=args.ratio_min,
        )
        pred = res.predict(X_test)
        rows.append(
            {
                "method": method,
                "rmse": rmse(y_test, pred),
                "r2_oos": r2_oos(y_test, pred),
                "n_nonzero": res.n_nonzero,
                "alpha": res.alpha,
                "lambda": res.lam,
                "converged": res.converged,
            }
        )
    table = pd.DataFrame(rows)
    bench = float(table.loc[table.method == "alpha", "rmse"].iloc[0])
    table.insert(2, "rmse_ratio", table["rmse"] / bench)
    _write_csv(args.out / "compare.csv", table)


def cmd_simulate_linear(args) -> None:
    cfg = LinearSimConfig(
        n_train=args.n_train, n_test=args.n_test, p=args.p, rho=args.rho, n_true=args.n_true,
        beta_value=args.beta_value, sigma=args.sigma, x_sd=args.x_sd, seed=args.seed,
    )
    Xtr, ytr, Xte, yte, beta = simulate_linear(cfg)
    names = [f"x{i + 1}" for i in range(cfg.p)]
    for tag, X, y in (("train", Xtr, ytr), ("test", Xte, yte)):
        frame = pd.DataFrame(X, columns=names)
        frame.insert(0, "y", y)
        _write_csv(args.out / f"linear_{tag}.csv", frame)
    _write_csv(args.out / "linear_beta.csv", pd.DataFrame({"feature": names, "beta": beta}))


def cmd_simulate_market(args) -> None:
    cfg = MarketSimConfig(
        M=args.markets, N_m=args.customers, K=args.k, K_c=args.k_c, rho=args.rho, cutoff=args.cutoff,
        frac_binary=args.frac_binary, beta0=args.beta0, seed=args.seed,
    )
    split_seed = args.seed if args.split_seed is None else args.split_seed
    data = simulate_market(cfg)
    train, test = make_comparison_datasets(cfg, split_seed)
    _write_csv(args.out / "market.csv", data.to_frame())
    _write_csv(args.out / "market_train.csv", train.to_frame())
    _write_csv(args.out / "market_test.csv", test.to_frame())
    _write_csv(
        args.out / "market_beta.csv",
        pd.DataFrame({"feature": list(data.column_names[: cfg.K]), "beta": data.true_beta}),
    )
    if data.n_empty:
        log.warning("%d markets had no sales; their logq is empty", data.n_empty)


def cmd_simulate_scanner(args) -> None:
    cfg = ScannerSimConfig(
        n=args.n, share_nonpromo=args.share_nonpromo, eta=args.eta, gamma=args.gamma,
        beta_prom=args.beta_prom, sigma=args.sigma, seed=args.seed,
    )
    _write_csv(args.out / "scanner.csv", simulate_scanner(cfg))
    _write_json(args.out / "scanner_schema.json", SCANNER_SCHEMA)


def cmd_lift(args) -> None:
    df, schema, _ = _load(args)
    if args.lam == "max":
        raise DataError("--lambda max is not meaningful for lift")
    lam = args.lam
    alphas = [args.alpha] if lam is not None else args.alphas
    res, info = run_lift(df, schema, args.method, alphas=alphas, lam=lam, k=args.k_folds, seed=args.seed, cfg=_solver_cfg(args))
    _write_csv(args.out / "lift.csv", res.to_frame())
    _write_json(args.out / "lift_summary.json", {**info, **res.summary()})


def cmd_bootstrap(args) -> None:
    df, schema, _ = _load(args)
    res = run_bootstrap(df, schema, args.n_boot, args.seed)
    _write_csv(args.out / "bootstrap_prom.csv", pd.DataFrame({"replicate": np.arange(res.beta_prom_draws.size), "beta_prom": res.beta_prom_draws}))
    print(f"beta_prom mean {res.mean:.4f} sd {res.sd:.4f} ({res.n_skipped} skipped)")


COMMANDS = {
    "fit": cmd_fit,
    "path": cmd_path,
    "cv": cmd_cv,
    "compare": cmd_compare,
    "simulate-linear": cmd_simulate_linear,
    "simulate-market": cmd_simulate_market,
    "simulate-scanner": cmd_simulate_scanner,
    "lift": cmd_lift,
    "bootstrap-prom": cmd_bootstrap,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        COMMANDS[args.command](args)
    except (DataError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"alphanorm: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
