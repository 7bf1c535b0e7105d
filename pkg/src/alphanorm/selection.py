"""Regularization paths, k-fold cross-validation and prediction error metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import baselines
from .prox import PenaltySpec, lambda_max
from .solver import FitResult, SolverConfig, StandardizedDesign, fit, standardize

__all__ = [
    "LambdaGrid",
    "PathResult",
    "CvResult",
    "make_lambda_grid",
    "fit_path",
    "kfold_split",
    "cross_validate",
    "cross_validate_baseline",
    "rmse",
    "r2_oos",
    "fit_method",
    "METHODS",
]

DEFAULT_ALPHAS = (0.1, 0.5, 0.9)
# Ridge and the l2 part of the elastic net shrink every coefficient by a
# factor ~ 1/(1 + c*lam), so their grids must reach far below the point where
# the l1 part stops selecting.
RIDGE_TOP_SCALE = 1e3
RIDGE_RATIO_MIN = 1e-10
ENET_RATIO_MIN = 1e-8


@dataclass(frozen=True)
class LambdaGrid:
    values: np.ndarray
    n_points: int
    ratio_min: float

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_top(cls, top: float, n_points: int, ratio_min: float) -> "LambdaGrid":
        if n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not 0 < ratio_min < 1:
            raise ValueError("ratio_min must lie in (0, 1)")
        values = top * np.logspace(0.0, np.log10(ratio_min), n_points)
        values[0] = top
        return cls(values=values, n_points=n_points, ratio_min=ratio_min)

    @classmethod
    def fixed(cls, values: Sequence[float]) -> "LambdaGrid":
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size == 0 or np.any(values < 0):
            raise ValueError("lambda values must be a nonempty list of nonnegative numbers")
        ratio = float(values[-1] / values[0]) if values[0] > 0 and values.size > 1 else float("nan")
        return cls(values=values, n_points=values.size, ratio_min=ratio)


@dataclass
class PathResult:
    alpha: float
    lambdas: np.ndarray
    fits: list

    @property
    def n_nonzero(self) -> np.ndarray:
        return np.array([f.n_nonzero for f in self.fits])

    @property
    def objectives(self) -> np.ndarray:
        return np.array([f.objective for f in self.fits])

    @property
    def coefs(self) -> np.ndarray:
        """(n_lambdas, p) original-scale coefficients on the retained columns."""
        return np.vstack([f.beta_orig for f in self.fits])

    @property
    def coefs_std(self) -> np.ndarray:
        return np.vstack([f.beta_std for f in self.fits])

    @property
    def converged(self) -> np.ndarray:
        return np.array([f.converged for f in self.fits])


@dataclass
class CvResult:
    """Cross-validation table.

    Columns of ``fold_errors`` are candidate models, described by
    ``candidate_alpha`` and ``candidate_position`` (index into that alpha's
    lambda grid) and ``candidate_lambda`` (full-data lambda).  ``grids`` holds each alpha's grid on the full data.
    """

    method: str
    folds: np.ndarray
    fold_errors: np.ndarray
    candidate_alpha: np.ndarray
    candidate_position: np.ndarray
    candidate_lambda: np.ndarray
    grids: dict
    selected_alpha: float
    selected_lambda: float
    selected_index: int
    refit: FitResult

    @property
    def mean_error(self) -> np.ndarray:
        return self.fold_errors.mean(axis=0)

    @property
    def se(self) -> np.ndarray:
        k = self.fold_errors.shape[0]
        return self.fold_errors.std(axis=0, ddof=1) / np.sqrt(k) if k > 1 else np.zeros(self.fold_errors.shape[1])

    @property
    def selected(self) -> tuple[float, float]:
        return self.selected_lambda, self.selected_alpha



def make_lambda_grid(d: StandardizedDesign, alpha: float, n_points: int = 100, ratio_min: float = 1e-4) -> LambdaGrid:
    """Log-spaced grid from the null-model lambda down to ``ratio_min`` times it."""
    z_max = d.z_max()
    if z_max == 0:
        raise ValueError("response is orthogonal to every column (or constant); no lambda grid")
    return LambdaGrid.from_top(lambda_max(z_max, alpha), n_points, ratio_min)


def fit_path(d: StandardizedDesign, alpha: float, grid: LambdaGrid, cfg: SolverConfig = SolverConfig()) -> PathResult:
    """Fit each lambda in grid order, warm-starting from the previous solution."""
    fits = []
    warm = cfg.warm_start
    for lam in grid.values:
        res = fit(d, PenaltySpec(alpha, float(lam)), cfg.with_warm_start(warm))
        fits.append(res)
        warm = res.beta_std
    return PathResult(alpha=alpha, lambdas=np.asarray(grid.values, dtype=float), fits=fits)


def kfold_split(n: int, k: int, seed: int = 0) -> np.ndarray:
    """Fold id per observation; fold sizes differ by at most one."""
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    folds = np.empty(n, dtype=int)
    folds[perm] = np.arange(n) % k
    return folds


def rmse(y, yhat) -> float:
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} vs {yhat.shape[0]}")
    if y.size == 0:
        raise ValueError("rmse of empty input")
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def r2_oos(y, yhat) -> float:
    """``1 - SSE / SST`` with SST about the mean of the evaluation-set ``y``."""
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} vs {yhat.shape[0]}")
    if y.size < 2:
        raise ValueError("r2_oos needs at least two observations")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0:
        raise ValueError("r2_oos undefined for constant y")
    return 1.0 - float(np.sum((yhat - y) ** 2)) / sst


# A "method" maps a standardized design to (grid, list of fits along it).
PathFn = Callable[[StandardizedDesign, Optional[LambdaGrid]], tuple[LambdaGrid, list]]


def _alpha_path_fn(alpha, n_lambdas, ratio_min, cfg) -> PathFn:
    def run(d, grid):
        if grid is None:
            grid = make_lambda_grid(d, alpha, n_lambdas, ratio_min)
        return grid, fit_path(d, alpha, grid, cfg).fits
    return run


def _baseline_path_fn(kind, n_lambdas, ratio_min, cfg) -> PathFn:
    def run(d, grid):
        if grid is None:
            if kind == "ridge":
                s_max = float(np.linalg.norm(d.X_std, 2)) ** 2
                grid = LambdaGrid.from_top(RIDGE_TOP_SCALE * s_max, n_lambdas, RIDGE_RATIO_MIN)
            else:
                z_max = d.z_max()
                if z_max == 0:
                    raise ValueError("response is orthogonal to every column (or constant); no lambda grid")
                if kind == "lasso":
                    grid = LambdaGrid.from_top(z_max, n_lambdas, ratio_min)
                else:
                    grid = LambdaGrid.from_top(2.0 * z_max, n_lambdas, min(ratio_min, ENET_RATIO_MIN))
        fits = []
        warm = None
        for lam in grid.values:
            if kind == "ridge":
                res = baselines.fit_ridge(d, float(lam))
            else:
                res = baselines.fit_baseline(d, baselines.BaselineSpec(kind, float(lam)), cfg.with_warm_start(warm))
                warm = res.beta_std
            fits.append(res)
        return grid, fits
    return run


def _cross_validate(X, y, method, labels, path_fns, k, seed, folds, lambdas) -> CvResult:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if folds is None:
        folds = kfold_split(len(y), k, seed)
    folds = np.asarray(folds)
    fold_ids = np.unique(folds)
    fixed = None if lambdas is None else LambdaGrid.fixed(lambdas)

    blocks, cand_block, cand_pos = [], [], []
    for b, run in enumerate(path_fns):
        errs = None
        for f_idx, f in enumerate(fold_ids):
            tr, va = folds != f, folds == f
            d = standardize(X[tr], y[tr])
            _, fits = run(d, fixed)
            if errs is None:
                errs = np.empty((len(fold_ids), len(fits)))
            errs[f_idx] = [rmse(y[va], m.predict(X[va])) for m in fits]
        blocks.append(errs)
        cand_block += [b] * errs.shape[1]
        cand_pos += list(range(errs.shape[1]))
    fold_errors = np.hstack(blocks)
    best = int(np.argmin(fold_errors.mean(axis=0)))
    best_block, best_pos = cand_block[best], cand_pos[best]

    d_full = standardize(X, y)
    grids = {}
    refit = None
    for b, (label, run) in enumerate(zip(labels, path_fns)):
        grid, fits = run(d_full, fixed)
        grids[label] = grid
        if b == best_block:
            refit = fits[best_pos]
    sel_label = labels[best_block]
    return CvResult(
        method=method,
        folds=folds,
        fold_errors=fold_errors,
        candidate_alpha=np.array([labels[b] for b in cand_block], dtype=float),
        candidate_position=np.array(cand_pos),
        candidate_lambda=np.array([grids[labels[b]].values[i] for b, i in zip(cand_block, cand_pos)]),
        grids=grids,
        selected_alpha=float(sel_label),
        selected_lambda=float(grids[sel_label].values[best_pos]),
        selected_index=best,
        refit=refit,
    )


def cross_validate(
    X,
    y,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    k: int = 5,
    seed: int = 0,
    cfg: SolverConfig = SolverConfig(),
    *,
    n_lambdas: int = 100,
    ratio_min: float = 1e-4,
    lambdas: Optional[Sequence[float]] = None,
    folds=None,
) -> CvResult:
    """Select (lambda, alpha) for the l_alpha model by minimum mean held-out RMSE.

    Each training fold is standardized on its own rows and gets its own
    lambda grid anchored at its null-model lambda; grid positions are then
    compared across folds and the winner is refit on all rows at the same
    position of the full-data grid.  Passing ``lambdas`` instead uses that
    fixed list everywhere.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alphas must be nonempty")
    fns = [_alpha_path_fn(a, n_lambdas, ratio_min, cfg) for a in alphas]
    return _cross_validate(X, y, "alpha", alphas, fns, k, seed, folds, lambdas)


def cross_validate_baseline(
    X,
    y,
    kind: str,
    k: int = 5,
    seed: int = 0,
    cfg: SolverConfig = SolverConfig(),
    *,
    n_lambdas: int = 100,
    ratio_min: float = 1e-4,
    lambdas: Optional[Sequence[float]] = None,
    folds=None,
) -> CvResult:
    """Cross-validate the lambda of a lasso, ridge or elastic-net baseline."""
    if kind not in ("lasso", "ridge", "elastic_net"):
        raise ValueError(f"no lambda to tune for {kind!r}")
    label = 1.0 if kind == "lasso" else float("nan")
    fn = _baseline_path_fn(kind, n_lambdas, ratio_min, cfg)
    res = _cross_validate(X, y, kind, [label], [fn], k, seed, folds, lambdas)
    return res


METHODS = ("ols", "lasso", "ridge", "elastic_net", "alpha")


def fit_method(
    X,
    y,
    method: str,
    *,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    lam: Optional[float] = None,
    k: int = 5,
    seed: int = 0,
    cfg: SolverConfig = SolverConfig(),
    n_lambdas: int = 100,
    ratio_min: float = 1e-4,
    feature_names: Optional[Sequence[str]] = None,
) -> FitResult:
    """Fit one of :data:`METHODS`, tuning lambda by CV unless ``lam`` is given.

    For ``"alpha"`` with a fixed ``lam`` the first entry of ``alphas`` is used.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "ols":
        res = baselines.fit_ols(standardize(X, y))
    elif lam is not None:
        d = standardize(X, y)
        if method == "alpha":
            res = fit(d, PenaltySpec(float(alphas[0]), float(lam)), cfg)
        else:
            res = baselines.fit_baseline(d, baselines.BaselineSpec(method, float(lam)), cfg)
    elif method == "alpha":
        res = cross_validate(X, y, alphas, k, seed, cfg, n_lambdas=n_lambdas, ratio_min=ratio_min).refit
    else:
        res = cross_validate_baseline(X, y, method, k, seed, cfg, n_lambdas=n_lambdas, ratio_min=ratio_min).refit
    if feature_names is not None:
        res.feature_names = tuple(feature_names[i] for i in res.kept)
    return res
