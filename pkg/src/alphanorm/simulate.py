"""Seeded data generators.

* :func:`simulate_linear` -- Gaussian design with ``rho**(|i-j|/3)`` correlation
  and a sparse coefficient vector.
* :func:`simulate_market` -- single-product binary logit market model with
  log-normal characteristics, binarized columns and confounders.
* :func:`simulate_scanner` -- scanner-panel-like log-linear sales with price
  discounts and a promotion flag, for the lift pipeline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy.special import expit

__all__ = [
    "LinearSimConfig",
    "MarketSimConfig",
    "MarketSimData",
    "ScannerSimConfig",
    "corr_matrix",
    "simulate_linear",
    "choice_probability",
    "simulate_market",
    "make_comparison_datasets",
    "simulate_scanner",
    "SCANNER_SCHEMA",
]


def corr_matrix(dim: int, rho: float) -> np.ndarray:
    """``R[i, j] = rho**(|i - j| / 3)``; checked positive definite by Cholesky."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    idx = np.arange(dim)
    R = rho ** (np.abs(idx[:, None] - idx[None, :]) / 3.0)
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"correlation matrix (dim={dim}, rho={rho}) is not positive definite") from exc
    return R


@dataclass(frozen=True)
class LinearSimConfig:
    n_train: int = 600
    n_test: int = 600
    p: int = 50
    rho: float = 0.1
    n_true: int = 5
    beta_value: float = 5.0
    sigma: float = 1.0
    x_sd: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if min(self.n_train, self.n_test, self.p) < 1:
            raise ValueError("sizes must be positive")
        if not 0 <= self.n_true <= self.p:
            raise ValueError("n_true must lie in [0, p]")
        if self.sigma < 0 or self.x_sd <= 0:
            raise ValueError("sigma must be >= 0 and x_sd > 0")


def simulate_linear(cfg: LinearSimConfig):
    """Return ``(X_train, y_train, X_test, y_test, beta_true)``."""
    rng = np.random.default_rng(cfg.seed)
    L = np.linalg.cholesky(corr_matrix(cfg.p, cfg.rho))
    beta = np.zeros(cfg.p)
    beta[: cfg.n_true] = cfg.beta_value

    def draw(n):
        X = cfg.x_sd * (rng.standard_normal((n, cfg.p)) @ L.T)
        y = X @ beta + cfg.sigma * rng.standard_normal(n)
        return X, y

    X_train, y_train = draw(cfg.n_train)
    X_test, y_test = draw(cfg.n_test)
    return X_train, y_train, X_test, y_test, beta


def choice_probability(systematic_utility):
    """Binary logit purchase probability ``exp(v) / (1 + exp(v))``."""
    return expit(systematic_utility)


@dataclass(frozen=True)
class MarketSimConfig:
    M: int = 200
    N_m: int = 100
    K: int = 4
    K_c: int = 46
    rho: float = 0.1
    cutoff: float = 1.0  # median of every log-normal marginal
    frac_binary: float = 0.5
    beta0: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.M, self.N_m, self.K) < 1 or self.K_c < 0:
            raise ValueError("M, N_m, K must be >= 1 and K_c >= 0")
        if not 0 <= self.frac_binary <= 1:
            raise ValueError("frac_binary must lie in [0, 1]")


@dataclass
class MarketSimData:
    """Simulated markets.  ``logQ`` is NaN for markets without a sale."""

    X_total: np.ndarray
    S: np.ndarray
    Q: np.ndarray
    logQ: np.ndarray
    P: np.ndarray
    true_beta: np.ndarray
    latent: np.ndarray
    binary_columns: np.ndarray
    column_names: tuple
    n_empty: int = 0
    config: MarketSimConfig = field(default_factory=MarketSimConfig)

    @property
    def M(self) -> int:
        return self.X_total.shape[0]

    def subset(self, idx) -> "MarketSimData":
        idx = np.asarray(idx)
        logq = self.logQ[idx]
        return replace(
            self,
            X_total=self.X_total[idx],
            S=self.S[idx],
            Q=self.Q[idx],
            logQ=logq,
            P=self.P[idx],
            latent=self.latent[idx],
            n_empty=int(np.sum(np.isnan(logq))),
        )

    def regression_data(self):
        """``(X, logQ)`` restricted to markets with at least one sale."""
        ok = ~np.isnan(self.logQ)
        return self.X_total[ok], self.logQ[ok]

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.X_total, columns=list(self.column_names))
        df["share"] = self.S
        df["prob"] = self.P
        df["units"] = self.Q
        df["logq"] = self.logQ
        return df


def _market_columns(K, K_c, frac_binary):
    n_bin_true = int(round(frac_binary * K))
    n_bin_conf = int(round(frac_binary * K_c))
    binary = np.zeros(K + K_c, dtype=bool)
    binary[K - n_bin_true : K] = True
    binary[K + K_c - n_bin_conf : K + K_c] = True
    names = tuple(
        ("t" if j < K else "c") + ("b" if binary[j] else "n") + str(j + 1) for j in range(K + K_c)
    )
    return binary, names


def simulate_market(cfg: MarketSimConfig) -> MarketSimData:
    """Single-product logit market model.

    Characteristics are ``exp`` of a multivariate normal with covariance
    ``D^1/2 R D^1/2`` (``R = corr_matrix``, ``D`` uniform(0.5, 1.5) variances);
    a ``frac_binary`` share of the true and of the confounding columns are
    replaced by ``1{X > cutoff}``.  Only the first ``K`` columns enter utility.
    """
    rng = np.random.default_rng(cfg.seed)
    dim = cfg.K + cfg.K_c
    R = corr_matrix(dim, cfg.rho)
    sd = np.sqrt(rng.uniform(0.5, 1.5, dim))
    L = np.linalg.cholesky(R * np.outer(sd, sd))
    latent = rng.standard_normal((cfg.M, dim)) @ L.T
    X = np.exp(latent)
    binary, names = _market_columns(cfg.K, cfg.K_c, cfg.frac_binary)
    X[:, binary] = (X[:, binary] > cfg.cutoff).astype(float)

    beta = rng.standard_normal(cfg.K)
    v = cfg.beta0 + X[:, : cfg.K] @ beta
    Q = np.empty(cfg.M)
    for m in range(cfg.M):
        eps = rng.logistic(0.0, 1.0, cfg.N_m)
        Q[m] = np.count_nonzero(v[m] + eps > 0)
    empty = Q == 0
    if np.all(empty):
        raise ValueError("no market recorded a sale")
    with np.errstate(divide="ignore"):
        logQ = np.where(empty, np.nan, np.log(np.where(empty, 1.0, Q)))
    return MarketSimData(
        X_total=X,
        S=Q / cfg.N_m,
        Q=Q,
        logQ=logQ,
        P=choice_probability(v),
        true_beta=beta,
        latent=latent,
        binary_columns=np.flatnonzero(binary),
        column_names=names,
        n_empty=int(empty.sum()),
        config=cfg,
    )


def make_comparison_datasets(cfg: MarketSimConfig, split_seed: int = 0):
    """Simulate, then split the markets at random into two halves (train, test)."""
    data = simulate_market(cfg)
    if data.M % 2:
        warnings.warn(f"odd market count {data.M}: halves differ by one", stacklevel=2)
    perm = np.random.default_rng(split_seed).permutation(data.M)
    half = data.M // 2
    return data.subset(np.sort(perm[:half])), data.subset(np.sort(perm[half:]))


@dataclass(frozen=True)
class ScannerSimConfig:
    """Log-linear sales world::

        log Q = a - eta*log(price) + b_vol*volume + brand + flavor + season
                + beta_prom*promotion + N(0, sigma^2)

    where promoted rows pay ``(1 - gamma) * regular_price``.
    """

    n: int = 10_000
    share_nonpromo: float = 0.74
    eta: float = 2.0
    gamma: float = 0.1
    beta_prom: float = 0.3
    sigma: float = 0.5
    intercept: float = 3.0
    beta_volume: float = 0.8
    n_brands: int = 5
    n_flavors: int = 4
    n_stores: int = 20
    n_weeks: int = 156
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or not 0 < self.share_nonpromo < 1:
            raise ValueError("need n >= 2 and share_nonpromo in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")


SCANNER_SCHEMA = {
    "response": "units",
    "numeric_features": ["price", "volume"],
    "categorical_features": ["brand", "flavor"],
    "promotion_column": "promotion",
    "week_column": "week",
    "log_transform": ["units", "price", "regular_price"],
    "price_column": "price",
    "regular_price_column": "regular_price",
    "store_column": "iri_key",
}


def simulate_scanner(cfg: ScannerSimConfig = ScannerSimConfig()) -> pd.DataFrame:
    """Scanner-panel-like rows with exactly ``round((1-share_nonpromo)*n)`` promotions."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    brand = rng.integers(0, cfg.n_brands, n)
    flavor = rng.integers(0, cfg.n_flavors, n)
    week = rng.integers(1, cfg.n_weeks + 1, n)
    store = rng.integers(1, cfg.n_stores + 1, n)
    volume = rng.uniform(0.05, 3.0, n)
    regular = np.exp(rng.normal(math.log(2.0), 0.3, n))
    promo = np.zeros(n, dtype=int)
    n_promo = int(round((1.0 - cfg.share_nonpromo) * n))
    promo[rng.permutation(n)[:n_promo]] = 1
    price = np.where(promo == 1, (1.0 - cfg.gamma) * regular, regular)

    brand_eff = rng.normal(0.0, 0.5, cfg.n_brands)
    flavor_eff = rng.normal(0.0, 0.3, cfg.n_flavors)
    year = (week - 1) // 52
    season = 0.2 * np.sin(2.0 * np.pi * ((week - 1) % 52) / 52.0) + 0.05 * year
    logq = (
        cfg.intercept
        - cfg.eta * np.log(price)
        + cfg.beta_volume * volume
        + brand_eff[brand]
        + flavor_eff[flavor]
        + season
        + cfg.beta_prom * promo
        + cfg.sigma * rng.standard_normal(n)
    )
    return pd.DataFrame(
        {
            "units": np.exp(logq),
            "price": price,
            "regular_price": regular,
            "promotion": promo,
            "volume": volume,
            "brand": np.array([f"B{i + 1}" for i in range(cfg.n_brands)])[brand],
            "flavor": np.array([f"F{i + 1}" for i in range(cfg.n_flavors)])[flavor],
            "week": week,
            "iri_key": store,
        }
    )
