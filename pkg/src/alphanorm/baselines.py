"""Reference linear estimators: OLS, lasso, ridge and elastic net.

Penalty conventions, all on the standardized design with a 1/2 data term:

* lasso:        0.5*||y - X b||^2 + lam * ||b||_1
* ridge:        0.5*||y - X b||^2 + lam * ||b||_2^2
* elastic net:  0.5*||y - X b||^2 + lam * (0.5*||b||_1 + 0.25*||b||_2^2)

The lasso and elastic-net coordinate descent lives here on its own, without
the l_alpha prox, so it can serve as an independent check of the alpha == 1
path through :mod:`alphanorm.solver`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .solver import FitResult, SolverConfig, StandardizedDesign, make_result

__all__ = ["BaselineSpec", "fit_ols", "fit_lasso", "fit_ridge", "fit_elastic_net", "fit_baseline", "BASELINE_KINDS"]

BASELINE_KINDS = ("ols", "lasso", "ridge", "elastic_net")


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    lam: Optional[float] = None

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown baseline {self.kind!r}; expected one of {BASELINE_KINDS}")
        if self.kind != "ols":
            if self.lam is None or not self.lam >= 0:
                raise ValueError(f"{self.kind} needs lam >= 0")


def fit_ols(d: StandardizedDesign) -> FitResult:
    """Least squares via SVD; rank-deficient designs get the minimum-norm solution."""
    X, y = d.X_std, d.y_centered
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    notes = []
    if rank < d.p:
        msg = f"rank-deficient design (rank {rank} < p={d.p}); minimum-norm solution"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    r = y - X @ beta
    obj = 0.5 * float(r @ r)
    return make_result(d, beta, obj, [obj], 0, True, method="ols", alpha=float("nan"), lam=0.0, notes=notes)


def fit_ridge(d: StandardizedDesign, lam: float) -> FitResult:
    """Closed form ``(X'X + 2 lam I) b = X'y``."""
    if not lam >= 0:
        raise ValueError("lam must be >= 0")
    X, y = d.X_std, d.y_centered
    if lam == 0:
        res = fit_ols(d)
        res.method = "ridge"
        return res
    A = X.T @ X + 2.0 * lam * np.eye(d.p)
    beta = np.linalg.solve(A, X.T @ y)
    r = y - X @ beta
    obj = 0.5 * float(r @ r) + lam * float(beta @ beta)
    return make_result(d, beta, obj, [obj], 0, True, method="ridge", alpha=float("nan"), lam=lam)


def fit_lasso(d: StandardizedDesign, lam: float, cfg: SolverConfig = SolverConfig()) -> FitResult:
    return _fit_enet(d, lam, l1=lam, l2=0.0, cfg=cfg, method="lasso")


def fit_elastic_net(d: StandardizedDesign, lam: float, cfg: SolverConfig = SolverConfig()) -> FitResult:
    return _fit_enet(d, lam, l1=0.5 * lam, l2=0.5 * lam, cfg=cfg, method="elastic_net")


def fit_baseline(d: StandardizedDesign, spec: BaselineSpec, cfg: SolverConfig = SolverConfig()) -> FitResult:
    if spec.kind == "ols":
        return fit_ols(d)
    if spec.kind == "ridge":
        return fit_ridge(d, spec.lam)
    if spec.kind == "lasso":
        return fit_lasso(d, spec.lam, cfg)
    return fit_elastic_net(d, spec.lam, cfg)


def _fit_enet(d, lam, l1, l2, cfg, method):
    if not lam >= 0:
        raise ValueError("lam must be >= 0")
    beta = np.zeros(d.p) if cfg.warm_start is None else np.array(cfg.warm_start, dtype=float)
    beta, trace, sweeps, converged = _cd_enet(d.X_std, d.y_centered, beta, float(l1), float(l2), float(cfg.tol), int(cfg.max_sweeps))
    notes = [] if converged else [f"no convergence after {sweeps} sweeps"]
    return make_result(d, beta, trace[-1], trace, sweeps, converged, method=method, alpha=1.0 if method == "lasso" else float("nan"), lam=lam, notes=notes)


@njit(cache=True)
def _enet_objective(r, beta, l1, l2):
    return 0.5 * np.dot(r, r) + l1 * np.sum(np.abs(beta)) + 0.5 * l2 * np.dot(beta, beta)


@njit(cache=True)
def _cd_enet(X, y, beta, l1, l2, tol, max_sweeps):
    n, p = X.shape
    r = y - X @ beta
    trace = np.empty(max_sweeps + 1)
    trace[0] = _enet_objective(r, beta, l1, l2)
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        max_change = 0.0
        for i in range(p):
            z = beta[i]
            for k in range(n):
                z += X[k, i] * r[k]
            a = abs(z) - l1
            new = 0.0
            if a > 0.0:
                new = (a if z > 0.0 else -a) / (1.0 + l2)
            delta = new - beta[i]
            if delta != 0.0:
                beta[i] = new
                for k in range(n):
                    r[k] -= delta * X[k, i]
                max_change = max(max_change, abs(delta))
        trace[sweeps] = _enet_objective(r, beta, l1, l2)
        if max_change < tol:
            converged = True
            break
    return beta, trace[: sweeps + 1], sweeps, converged
