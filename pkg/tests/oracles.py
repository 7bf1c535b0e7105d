"""Brute-force reference computations, independent of the package internals."""

import numpy as np


def prox_grid(z, alpha, lam, step=1e-4):
    """Grid minimizer of 0.5*(z - b)**2 + lam*|b|**alpha over k*step in [-|z|, |z|]."""
    K = int(np.floor(abs(z) / step))
    mag = np.arange(K + 1) * step
    pen = mag**alpha
    pen *= lam  # shared by +mag and -mag
    best_b, best_J = 0.0, np.inf
    for sign in (1.0, -1.0):
        J = z - sign * mag
        J *= J
        J *= 0.5
        J += pen
        i = int(np.argmin(J))
        if J[i] < best_J:
            best_b, best_J = sign * mag[i], J[i]
    return best_b, best_J


def bisect_root(f, lo, hi, tol=1e-14):
    """Root of an increasing function on [lo, hi] by plain bisection."""
    for _ in range(500):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def objective_grid_3d(X, y, alpha, lam, lo=-8.0, hi=8.0, step=0.05):
    """Argmin and min of 0.5*||y - X b||^2 + lam*sum|b_i|**alpha on a cubic grid (p == 3)."""
    g = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    g[np.abs(g) < 1e-12] = 0.0
    G = X.T @ X
    c = X.T @ y
    pen = lam * np.abs(g) ** alpha
    b2, b3 = g[:, None], g[None, :]
    # terms free of b1
    rest = (
        0.5 * (G[1, 1] * b2**2 + G[2, 2] * b3**2) + G[1, 2] * b2 * b3
        - c[1] * b2 - c[2] * b3 + pen[:, None] + pen[None, :]
    )
    best, arg = np.inf, None
    for v, pv in zip(g, pen):
        J = rest + 0.5 * G[0, 0] * v * v + G[0, 1] * v * b2 + G[0, 2] * v * b3 - c[0] * v + pv
        j = int(np.argmin(J))
        if J.flat[j] < best:
            best = float(J.flat[j])
            jj, kk = np.unravel_index(j, J.shape)
            arg = np.array([v, g[jj], g[kk]])
    return arg, best + 0.5 * float(y @ y)


def soft(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
