"""Cyclic coordinate descent for the l_alpha penalized least squares objective

    J(beta) = 0.5 * ||y - X beta||^2 + lam * sum_i |beta_i|**alpha

on a design whose columns are centered and scaled to unit l2 norm.  The
intercept is absorbed by centering and never penalized.

Because J is nonconvex for alpha < 1 the solver returns a coordinate-wise
fixed point of the prox update, not necessarily a global minimizer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .prox import PenaltySpec, _prox_map_T

__all__ = [
    "StandardizedDesign",
    "SolverConfig",
    "FitResult",
    "standardize",
    "objective",
    "adjusted_gradient",
    "fit",
    "destandardize",
]


@dataclass(frozen=True)
class StandardizedDesign:
    """Centered response and centered, unit-norm design columns.

    ``kept`` indexes the retained columns of the original matrix; constant
    columns are dropped and listed in ``dropped``.
    """

    X_std: np.ndarray
    y_centered: np.ndarray
    col_norms: np.ndarray
    col_means: np.ndarray
    y_mean: float
    feature_names: tuple
    kept: np.ndarray
    n_features_in: int
    dropped: tuple = ()

    @property
    def n(self) -> int:
        return self.X_std.shape[0]

    @property
    def p(self) -> int:
        return self.X_std.shape[1]

    def transform(self, X) -> np.ndarray:
        """Apply the stored centering and scaling to new rows of the original design."""
        X = np.asarray(X, dtype=float)
        return (X[:, self.kept] - self.col_means) / self.col_norms

    def z_max(self) -> float:
        """``max_i |x_i' y_centered|``, computed exactly as the solver's first sweep does."""
        return float(np.max(np.abs(_col_dots(self.X_std, self.y_centered))))


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-7
    max_sweeps: int = 10_000
    warm_start: Optional[np.ndarray] = None
    monitor: bool = False  # record J after every single coordinate update

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")

    def with_warm_start(self, beta) -> "SolverConfig":
        return SolverConfig(self.tol, self.max_sweeps, None if beta is None else np.array(beta, dtype=float), self.monitor)


@dataclass
class FitResult:
    """A fitted linear model.

    ``beta_std`` lives on the standardized scale of the retained columns,
    ``beta_orig`` on the original scale of the same columns.  ``predict``
    takes the full original design (dropped columns are ignored).
    """

    beta_std: np.ndarray
    beta_orig: np.ndarray
    intercept: float
    objective: float
    objective_trace: np.ndarray
    n_nonzero: int
    sweeps_used: int
    converged: bool
    kept: np.ndarray
    n_features_in: int
    feature_names: tuple = ()
    method: str = "alpha"
    alpha: float = float("nan")
    lam: float = float("nan")
    update_objectives: Optional[np.ndarray] = None
    notes: list = field(default_factory=list)

    @property
    def coef(self) -> np.ndarray:
        """Original-scale coefficients aligned with all input columns."""
        full = np.zeros(self.n_features_in)
        full[self.kept] = self.beta_orig
        return full

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X[:, self.kept] @ self.beta_orig + self.intercept

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "alpha": _jsonable(self.alpha),
            "lambda": _jsonable(self.lam),
            "intercept": float(self.intercept),
            "coefficients": {str(k): float(v) for k, v in zip(self.feature_names, self.beta_orig)},
            "n_nonzero": int(self.n_nonzero),
            "objective": float(self.objective),
            "sweeps_used": int(self.sweeps_used),
            "converged": bool(self.converged),
            "notes": list(self.notes),
        }


def _jsonable(x):
    x = float(x)
    return None if np.isnan(x) else x


def standardize(X, y, feature_names: Optional[Sequence[str]] = None) -> StandardizedDesign:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if n < 2 or p < 1:
        raise ValueError(f"need N >= 2 rows and p >= 1 columns, got {X.shape}")
    if y.shape[0] != n:
        raise ValueError(f"X has {n} rows but y has {y.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    names = tuple(feature_names) if feature_names is not None else tuple(f"x{i + 1}" for i in range(p))
    if len(names) != p:
        raise ValueError("feature_names length does not match X")

    kept = np.flatnonzero(np.ptp(X, axis=0) > 0)
    dropped = tuple(names[i] for i in range(p) if i not in set(kept.tolist()))
    if kept.size == 0:
        raise ValueError("all columns are constant")
    if dropped:
        warnings.warn(f"dropping constant columns: {', '.join(dropped)}", stacklevel=2)

    Xk = X[:, kept]
    means = Xk.mean(axis=0)
    Xc = Xk - means
    norms = np.sqrt(np.sum(Xc * Xc, axis=0))
    y_mean = float(y.mean())
    return StandardizedDesign(
        X_std=np.asfortranarray(Xc / norms),
        y_centered=y - y_mean,
        col_norms=norms,
        col_means=means,
        y_mean=y_mean,
        feature_names=tuple(names[i] for i in kept),
        kept=kept,
        n_features_in=p,
        dropped=dropped,
    )


def objective(beta, d: StandardizedDesign, p: PenaltySpec) -> float:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (d.p,):
        raise ValueError(f"beta has shape {beta.shape}, expected ({d.p},)")
    r = d.y_centered - d.X_std @ beta
    return 0.5 * float(r @ r) + p.penalty(beta)


def adjusted_gradient(i: int, beta_i: float, residual, d: StandardizedDesign) -> float:
    """``x_i' r + beta_i``: the prox argument for coordinate ``i``."""
    if not 0 <= i < d.p:
        raise IndexError(f"column index {i} out of range for p={d.p}")
    return _dot_col(d.X_std, i, np.asarray(residual, dtype=float)) + float(beta_i)


def destandardize(beta_std, d: StandardizedDesign) -> tuple[np.ndarray, float]:
    beta_std = np.asarray(beta_std, dtype=float)
    if beta_std.shape != (d.p,):
        raise ValueError(f"beta_std has shape {beta_std.shape}, expected ({d.p},)")
    beta_orig = beta_std / d.col_norms
    intercept = d.y_mean - float(d.col_means @ beta_orig)
    return beta_orig, intercept


def make_result(d: StandardizedDesign, beta_std, obj, trace, sweeps, converged, *, method, alpha, lam, update_objectives=None, notes=None) -> FitResult:
    beta_orig, intercept = destandardize(beta_std, d)
    return FitResult(
        beta_std=beta_std,
        beta_orig=beta_orig,
        intercept=intercept,
        objective=float(obj),
        objective_trace=np.asarray(trace, dtype=float),
        n_nonzero=int(np.count_nonzero(beta_std)),
        sweeps_used=int(sweeps),
        converged=bool(converged),
        kept=d.kept,
        n_features_in=d.n_features_in,
        feature_names=d.feature_names,
        method=method,
        alpha=float(alpha),
        lam=float(lam),
        update_objectives=update_objectives,
        notes=list(notes or []),
    )


def fit(d: StandardizedDesign, p: PenaltySpec, cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Minimize J by cyclic coordinate descent over columns 0..p-1.

    Each update computes ``z_i = x_i' r + beta_i``, applies the prox map
    (keeping an active coefficient at the exact tie ``|z_i| == h``) and
    updates the residual by ``r -= (new - old) * x_i``.  Stops once the
    largest coefficient change over a sweep is below ``cfg.tol``.
    """
    if cfg.warm_start is None:
        beta = np.zeros(d.p)
    else:
        beta = np.array(cfg.warm_start, dtype=float)
        if beta.shape != (d.p,):
            raise ValueError(f"warm start has shape {beta.shape}, expected ({d.p},)")
    beta, trace, upd, sweeps, converged = _cd_alpha(
        d.X_std, d.y_centered, beta, float(p.alpha), float(p.lam), float(cfg.tol), int(cfg.max_sweeps), bool(cfg.monitor)
    )
    notes = [] if converged else [f"no convergence after {sweeps} sweeps"]
    return make_result(
        d, beta, trace[-1], trace, sweeps, converged, method="alpha", alpha=p.alpha, lam=p.lam,
        update_objectives=upd if cfg.monitor else None, notes=notes,
    )


@njit(cache=True)
def _dot_col(X, i, r):
    s = 0.0
    for k in range(X.shape[0]):
        s += X[k, i] * r[k]
    return s


@njit(cache=True)
def _col_dots(X, r):
    out = np.empty(X.shape[1])
    for i in range(X.shape[1]):
        out[i] = _dot_col(X, i, r)
    return out


@njit(cache=True)
def _objective(r, beta, alpha, lam):
    pen = 0.0
    for j in range(beta.shape[0]):
        if beta[j] != 0.0:
            pen += abs(beta[j]) ** alpha
    return 0.5 * np.dot(r, r) + lam * pen


@njit(cache=True)
def _cd_alpha(X, y, beta, alpha, lam, tol, max_sweeps, monitor):
    n, p = X.shape
    r = y.copy()
    for j in range(p):
        if beta[j] != 0.0:
            for k in range(n):
                r[k] -= beta[j] * X[k, j]
    trace = np.empty(max_sweeps + 1)
    trace[0] = _objective(r, beta, alpha, lam)
    upd = np.empty(p * 16 if monitor else 0)
    n_upd = 0
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        max_change = 0.0
        for i in range(p):
            old = beta[i]
            z = _dot_col(X, i, r) + old
            new = _prox_map_T(z, old, alpha, lam)
            delta = new - old
            if delta != 0.0:
                beta[i] = new
                for k in range(n):
                    r[k] -= delta * X[k, i]
                if abs(delta) > max_change:
                    max_change = abs(delta)
            if monitor:
                if n_upd == upd.shape[0]:
                    grown = np.empty(2 * upd.shape[0])
                    grown[:n_upd] = upd
                    upd = grown
                upd[n_upd] = _objective(r, beta, alpha, lam)
                n_upd += 1
        trace[sweeps] = _objective(r, beta, alpha, lam)
        if max_change < tol:
            converged = True
            break
    return beta, trace[: sweeps + 1], upd[:n_upd], sweeps, converged
