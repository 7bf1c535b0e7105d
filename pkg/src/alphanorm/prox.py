"""Scalar l_alpha penalty machinery: thresholds, the proximal map and lambda_max.

The proximal operator solves

    tau(z) = argmin_beta 0.5 * (z - beta)**2 + lam * |beta|**alpha

for 0 < alpha <= 1.  For alpha < 1 it is zero below the jump location ``h``
and jumps to magnitude ``b`` at ``h``; for alpha == 1 it is soft thresholding.

The ``_*`` kernels are numba-compiled so the coordinate descent solver can
call them from its inner loop; the public wrappers take a :class:`PenaltySpec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "PenaltySpec",
    "ThresholdPair",
    "thresholds",
    "scalar_objective",
    "prox",
    "prox_map_T",
    "lambda_max",
    "soft_threshold",
]

_ROOT_TOL = 1e-12
_ROOT_MAXITER = 200


@dataclass(frozen=True)
class PenaltySpec:
    """The (alpha, lambda) pair of the l_alpha penalty ``lam * sum |beta_i|**alpha``."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (self.lam >= 0.0) or not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")

    def penalty(self, beta) -> float:
        """Penalty value ``lam * sum |beta_i|**alpha`` with ``|0|**alpha = 0``."""
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        nz = beta[beta != 0.0]
        return float(self.lam * np.sum(np.abs(nz) ** self.alpha))

    @property
    def thresholds(self) -> "ThresholdPair":
        return thresholds(self)


@dataclass(frozen=True)
class ThresholdPair:
    b: float
    h: float


@njit(cache=True)
def _thresholds(alpha, lam):
    if lam == 0.0:
        return 0.0, 0.0
    if alpha == 1.0:
        return 0.0, lam
    b = (2.0 * lam * (1.0 - alpha)) ** (1.0 / (2.0 - alpha))
    h = b + lam * alpha * b ** (alpha - 1.0)
    return b, h


@njit(cache=True)
def _scalar_objective(beta, z, alpha, lam):
    pen = 0.0
    if beta != 0.0:
        pen = lam * abs(beta) ** alpha
    return 0.5 * (z - beta) ** 2 + pen


@njit(cache=True)
def _soft(z, t):
    a = abs(z) - t
    if a <= 0.0:
        return 0.0
    return a if z > 0.0 else -a


@njit(cache=True)
def _larger_root(az, alpha, lam, b):
    """Larger root of beta + lam*alpha*beta**(alpha-1) = az on [b, az].

    f is increasing and convex there, so Newton started from the right end
    decreases monotonically onto the root; bisection guards against rounding.
    """
    lo = b
    hi = az
    x = az
    c = lam * alpha
    for _ in range(_ROOT_MAXITER):
        f = x + c * x ** (alpha - 1.0) - az
        if f > 0.0:
            hi = x
        else:
            lo = x
        if hi - lo <= _ROOT_TOL:
            break
        fp = 1.0 + c * (alpha - 1.0) * x ** (alpha - 2.0)
        step = x - f / fp if fp > 0.0 else lo - 1.0
        if step <= lo or step >= hi:
            step = 0.5 * (lo + hi)
        if abs(step - x) <= _ROOT_TOL:
            x = step
            break
        x = step
    return x


@njit(cache=True)
def _prox(z, alpha, lam):
    if lam == 0.0:
        return z
    if alpha == 1.0:
        return _soft(z, lam)
    b, h = _thresholds(alpha, lam)
    az = abs(z)
    if az <= h:
        return 0.0
    r = _larger_root(az, alpha, lam, b)
    return r if z > 0.0 else -r


@njit(cache=True)
def _prox_map_T(z, beta_current, alpha, lam):
    if alpha < 1.0 and lam > 0.0:
        b, h = _thresholds(alpha, lam)
        if abs(z) == h:
            if beta_current != 0.0:
                return b if z > 0.0 else -b
            return 0.0
    return _prox(z, alpha, lam)


def thresholds(p: PenaltySpec) -> ThresholdPair:
    """Jump magnitude ``b`` and jump location ``h`` of the proximal map.

    ``alpha == 1`` gives ``(0, lam)``, the soft-threshold limit.
    """
    b, h = _thresholds(float(p.alpha), float(p.lam))
    return ThresholdPair(b=b, h=h)


def scalar_objective(beta: float, z: float, p: PenaltySpec) -> float:
    return _scalar_objective(float(beta), float(z), float(p.alpha), float(p.lam))


def soft_threshold(z: float, t: float) -> float:
    return _soft(float(z), float(t))


def prox(z: float, p: PenaltySpec) -> float:
    """Proximal map of ``lam*|.|**alpha`` at ``z``.

    Returns 0 when ``|z| <= h`` (the tie ``|z| == h`` resolves to 0; use
    :func:`prox_map_T` for the iterate-dependent choice), otherwise the larger
    root of ``beta + lam*alpha*beta**(alpha-1) = |z|`` with the sign of ``z``.
    """
    return _prox(float(z), float(p.alpha), float(p.lam))


def prox_map_T(z: float, beta_current: float, p: PenaltySpec) -> float:
    """Coordinate update map: :func:`prox` except at ``|z| == h``, where it
    keeps the coefficient active (``sgn(z)*b``) iff ``beta_current != 0``."""
    return _prox_map_T(float(z), float(beta_current), float(p.alpha), float(p.lam))


def lambda_max(z_max: float, alpha: float) -> float:
    """Smallest lambda whose jump location ``h`` reaches ``z_max``.

    Any fit with ``max_i |x_i' y| <= z_max`` at this lambda is exactly null.
    The closed form is nudged upward by whole ulps until the floating point
    ``h`` is no smaller than ``z_max``.
    """
    z_max = float(z_max)
    if not (z_max > 0.0) or not math.isfinite(z_max):
        raise ValueError(f"z_max must be positive and finite, got {z_max}")
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return z_max
    b_star = z_max * 2.0 * (1.0 - alpha) / (2.0 - alpha)
    lam = b_star ** (2.0 - alpha) / (2.0 * (1.0 - alpha))
    while _thresholds(alpha, lam)[1] < z_max:
        lam = math.nextafter(lam, math.inf)
    return lam
