"""Promotion lift.

A model trained on non-promoted rows predicts baseline log sales for the
promoted rows at their regular (undiscounted) price.  Then

    lift factor = actual sales / baseline sales
    delta Q     = (lift factor - 1) * baseline sales

and under a log-linear demand model ``log(lift) = -eta*log(1 - gamma) + beta_prom``.
The promotion coefficient itself is bootstrapped from half-sample OLS fits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .data import DataError, DatasetSchema, one_hot
from .selection import DEFAULT_ALPHAS, fit_method
from .solver import SolverConfig

log = logging.getLogger(__name__)

__all__ = [
    "LiftResult",
    "BootstrapResult",
    "split_by_promotion",
    "lift_factors",
    "bootstrap_beta_prom",
    "run_lift",
    "run_bootstrap",
]

MAX_RETRIES = 10


@dataclass
class LiftResult:
    rows: np.ndarray  # row labels of the promoted observations kept
    actual_log: np.ndarray
    baseline_log: np.ndarray
    n_excluded: int = 0

    @property
    def log_lifts(self) -> np.ndarray:
        return self.actual_log - self.baseline_log

    @property
    def lift_factors(self) -> np.ndarray:
        return np.exp(self.log_lifts)

    @property
    def baseline(self) -> np.ndarray:
        return np.exp(self.baseline_log)

    @property
    def delta_q(self) -> np.ndarray:
        return (self.lift_factors - 1.0) * self.baseline

    @property
    def mean_log_lift(self) -> float:
        return float(np.mean(self.log_lifts))

    @property
    def mean_lift_factor(self) -> float:
        return float(np.mean(self.lift_factors))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "row": self.rows,
                "actual_logq": self.actual_log,
                "baseline_logq": self.baseline_log,
                "log_lift": self.log_lifts,
                "lift_factor": self.lift_factors,
                "baseline": self.baseline,
                "delta_q": self.delta_q,
            }
        )

    def summary(self) -> dict:
        return {
            "n_promoted": int(self.rows.size),
            "n_excluded": int(self.n_excluded),
            "mean_log_lift": self.mean_log_lift,
            "sd_log_lift": float(np.std(self.log_lifts, ddof=1)) if self.rows.size > 1 else 0.0,
            "mean_lift_factor": self.mean_lift_factor,
            "mean_delta_q": float(np.mean(self.delta_q)),
            "share_negative_log_lift": float(np.mean(self.log_lifts < 0)),
        }


@dataclass
class BootstrapResult:
    beta_prom_draws: np.ndarray
    B: int
    n_skipped: int = 0

    @property
    def mean(self) -> float:
        return float(np.mean(self.beta_prom_draws))

    @property
    def sd(self) -> float:
        return float(np.std(self.beta_prom_draws, ddof=1)) if self.beta_prom_draws.size > 1 else 0.0


def split_by_promotion(df: pd.DataFrame, promotion_column: str):
    """Return ``(non_promoted, promoted, non_promoted_share)``."""
    if promotion_column not in df.columns:
        raise DataError(f"promotion column {promotion_column!r} missing")
    flag = df[promotion_column].to_numpy(dtype=float)
    if not np.all(np.isin(flag, (0.0, 1.0))):
        raise DataError(f"promotion column {promotion_column!r} must be 0/1")
    promo = flag == 1.0
    if promo.all() or not promo.any():
        raise DataError("promotion split needs both promoted and non-promoted rows")
    share = float(1.0 - promo.mean())
    log.info("non-promoted share %.3f (%d of %d rows)", share, (~promo).sum(), promo.size)
    return df[~promo], df[promo], share


def lift_factors(model, X, actual_logq, rows=None) -> LiftResult:
    """Lift of each row given a baseline model with ``predict(X) -> log sales``.

    Rows with a non-finite prediction are dropped and counted.
    """
    actual_logq = np.asarray(actual_logq, dtype=float)
    pred = np.asarray(model.predict(X), dtype=float)
    ok = np.isfinite(pred) & np.isfinite(actual_logq)
    rows = np.arange(actual_logq.size) if rows is None else np.asarray(rows)
    n_bad = int((~ok).sum())
    if n_bad:
        log.warning("excluded %d rows with non-finite predictions", n_bad)
    return LiftResult(rows=rows[ok], actual_log=actual_logq[ok], baseline_log=pred[ok], n_excluded=n_bad)


def _ols_coef(X, y):
    A = np.column_stack([np.ones(len(y)), X])
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    return coef[1:], rank == A.shape[1]


def bootstrap_beta_prom(X, y, prom_index: int, B: int = 1000, seed: int = 0) -> BootstrapResult:
    """Half-sample OLS bootstrap of the promotion coefficient.

    Replicate ``b`` draws ``n // 2`` rows without replacement from
    ``default_rng([seed, b, attempt])``; a rank-deficient draw is redrawn up
    to ten times and then skipped.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if B < 1:
        raise ValueError("B must be >= 1")
    n = len(y)
    half = n // 2
    draws = []
    skipped = 0
    for b in range(B):
        for attempt in range(MAX_RETRIES + 1):
            idx = np.random.default_rng([seed, b, attempt]).choice(n, half, replace=False)
            coef, full_rank = _ols_coef(X[idx], y[idx])
            if full_rank:
                draws.append(coef[prom_index])
                break
        else:
            skipped += 1
    if not draws:
        raise DataError("every bootstrap replicate was rank-deficient")
    return BootstrapResult(beta_prom_draws=np.array(draws), B=B, n_skipped=skipped)


def _check_promotion_flag(df, schema):
    if not (schema.price_column and schema.regular_price_column):
        return
    price = df[schema.price_column].to_numpy(dtype=float)
    regular = df[schema.regular_price_column].to_numpy(dtype=float)
    if schema.price_column in schema.log_transform:
        price, regular = np.exp(price), np.exp(regular)
    deduction = 1.0 - price / regular
    flag = df[schema.promotion_column].to_numpy(dtype=float) == 1.0
    mismatch = int(np.sum(flag != (deduction > 0.05)))
    if mismatch:
        log.warning("%d rows where the promotion flag disagrees with a >5%% price deduction", mismatch)


def run_lift(
    df: pd.DataFrame,
    schema: DatasetSchema,
    method: str = "alpha",
    *,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    lam: Optional[float] = None,
    k: int = 5,
    seed: int = 0,
    cfg: SolverConfig = SolverConfig(),
) -> tuple[LiftResult, dict]:
    """Train on non-promoted rows, score the promoted rows at regular price."""
    if not schema.promotion_column:
        raise DataError("schema needs a promotion_column for lift analysis")
    _check_promotion_flag(df, schema)
    train, test, share = split_by_promotion(df, schema.promotion_column)
    enc = one_hot(train, schema, include_promotion=False)
    y = train[schema.response].to_numpy(dtype=float)
    model = fit_method(enc.matrix, y, method, alphas=alphas, lam=lam, k=k, seed=seed, cfg=cfg, feature_names=enc.column_names)

    base = test.copy()
    if schema.price_column and schema.regular_price_column:
        base[schema.price_column] = base[schema.regular_price_column]
    X_base = one_hot(base, schema, enc.levels, include_promotion=False).matrix
    res = lift_factors(model, X_base, test[schema.response].to_numpy(dtype=float), rows=test.index.to_numpy())
    info = {
        "method": method,
        "n_train": int(len(train)),
        "n_test": int(len(test)),
        "non_promoted_share": share,
        "model_alpha": None if np.isnan(model.alpha) else float(model.alpha),
        "model_lambda": None if np.isnan(model.lam) else float(model.lam),
        "model_n_nonzero": int(model.n_nonzero),
    }
    names = list(model.feature_names)
    if schema.price_column in names:
        info["price_coefficient"] = float(model.beta_orig[names.index(schema.price_column)])
    return res, info


def run_bootstrap(df: pd.DataFrame, schema: DatasetSchema, B: int = 1000, seed: int = 0) -> BootstrapResult:
    """Bootstrap on all rows with every feature, promotion dummy included."""
    if not schema.promotion_column:
        raise DataError("schema needs a promotion_column for the bootstrap")
    enc = one_hot(df, schema, include_promotion=True)
    y = df[schema.response].to_numpy(dtype=float)
    return bootstrap_beta_prom(enc.matrix, y, enc.column_names.index(schema.promotion_column), B, seed)
