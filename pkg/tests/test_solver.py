import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphanorm.prox import PenaltySpec, lambda_max, prox_map_T
from alphanorm.solver import SolverConfig, StandardizedDesign, adjusted_gradient, destandardize, fit, objective, standardize


def random_problem(seed, n=60, p=8, scale=2.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[: max(1, p // 3)] = scale * rng.standard_normal(max(1, p // 3))
    y = X @ beta + rng.standard_normal(n)
    return X, y


def test_standardize_example():
    d = standardize(np.array([[1.0], [2.0], [3.0]]), np.array([1.0, 2.0, 3.0]))
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(d.X_std[:, 0], [-s, 0, s], atol=1e-15)
    np.testing.assert_allclose(d.y_centered, [-1, 0, 1], atol=1e-15)
    assert d.y_mean == 2.0


def test_standardize_drops_constant_column():
    X = np.array([[4.0, 1.0], [4.0, 2.0], [4.0, 3.0]])
    with pytest.warns(UserWarning):
        d = standardize(X, np.array([1.0, 0.0, 2.0]), feature_names=["c", "x"])
    assert d.p == 1
    assert d.feature_names == ("x",)
    assert list(d.dropped) == ["c"]


def test_standardize_idempotent():
    X, y = random_problem(0)
    d = standardize(X, y)
    d2 = standardize(d.X_std, d.y_centered)
    np.testing.assert_allclose(d2.X_std, d.X_std, atol=1e-12)
    np.testing.assert_allclose(d2.col_norms, 1.0, atol=1e-12)


def test_standardize_errors():
    with pytest.raises(ValueError):
        standardize(np.ones((3, 2)), np.arange(3.0))
    X = np.arange(6.0).reshape(3, 2)
    X[1, 1] = np.nan
    with pytest.raises(ValueError):
        standardize(X, np.arange(3.0))
    with pytest.raises(ValueError):
        standardize(np.array([[1.0]]), np.array([1.0]))


@given(st.integers(0, 10_000))
def test_unit_norm_columns(seed):
    X, y = random_problem(seed, n=20, p=4)
    d = standardize(X * np.array([1e-3, 1.0, 1e3, 5.0]) + 7.0, y)
    np.testing.assert_allclose(np.linalg.norm(d.X_std, axis=0), 1.0, atol=1e-10)
    np.testing.assert_allclose(d.X_std.mean(axis=0), 0.0, atol=1e-12)


def test_objective_examples():
    X, y = random_problem(1)
    d = standardize(X, y)
    p = PenaltySpec(0.5, 2.0)
    assert objective(np.zeros(d.p), d, p) == pytest.approx(0.5 * d.y_centered @ d.y_centered)
    ls = np.linalg.lstsq(d.X_std, d.y_centered, rcond=None)[0]
    rss = np.sum((d.y_centered - d.X_std @ ls) ** 2)
    assert objective(ls, d, PenaltySpec(0.5, 0.0)) == pytest.approx(0.5 * rss)
    e = np.zeros(d.p)
    e[3] = 1.0
    data = 0.5 * np.sum((d.y_centered - d.X_std[:, 3]) ** 2)
    assert objective(e, d, p) == pytest.approx(data + 2.0)
    with pytest.raises(ValueError):
        objective(np.zeros(d.p + 1), d, p)


def centered_orthonormal(n, p, seed):
    A = np.random.default_rng(seed).standard_normal((n, p))
    Q, _ = np.linalg.qr(A - A.mean(axis=0))
    return Q


def test_adjusted_gradient_examples():
    X, y = random_problem(2)
    d = standardize(X, y)
    assert adjusted_gradient(0, 0.0, d.y_centered, d) == pytest.approx(d.X_std[:, 0] @ d.y_centered)
    hand = StandardizedDesign(
        X_std=np.array([[1.0], [0.0], [0.0]]), y_centered=np.zeros(3), col_norms=np.ones(1),
        col_means=np.zeros(1), y_mean=0.0, feature_names=("x",), kept=np.array([0]), n_features_in=1,
    )
    assert adjusted_gradient(0, 0.5, np.array([2.0, 1.0, 1.0]), hand) == pytest.approx(2.5)
    with pytest.raises(IndexError):
        adjusted_gradient(5, 0.0, np.zeros(3), hand)


def test_adjusted_gradient_orthonormal_at_least_squares():
    Q = centered_orthonormal(12, 3, 4)
    y = np.random.default_rng(5).standard_normal(12)
    d = standardize(Q, y)
    ls = d.X_std.T @ d.y_centered
    r = d.y_centered - d.X_std @ ls
    for i in range(3):
        assert adjusted_gradient(i, ls[i], r, d) == pytest.approx(ls[i], abs=1e-12)


def test_fit_zero_response():
    X, _ = random_problem(5)
    d = standardize(X, np.full(X.shape[0], 3.0))
    res = fit(d, PenaltySpec(0.5, 0.1))
    assert np.all(res.beta_std == 0)
    assert res.objective == 0.0
    assert res.intercept == 3.0


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.5, 0.9, 1.0]))
@settings(max_examples=30, deadline=None)
def test_null_model_at_lambda_max(seed, a):
    X, y = random_problem(seed, n=40, p=6)
    d = standardize(X, y)
    lam = lambda_max(d.z_max(), a)
    for scale in (1.0, 2.0):
        res = fit(d, PenaltySpec(a, lam * scale))
        assert np.all(res.beta_std == 0.0)
        assert res.n_nonzero == 0


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.5, 0.9]))
@settings(max_examples=25, deadline=None)
def test_fit_invariants(seed, a):
    X, y = random_problem(seed)
    d = standardize(X, y)
    lam = 0.2 * lambda_max(d.z_max(), a)
    p = PenaltySpec(a, lam)
    res = fit(d, p, SolverConfig(tol=1e-10, monitor=True))
    assert res.converged
    assert np.all(np.diff(res.objective_trace) <= 1e-10)
    assert np.all(np.diff(np.concatenate([[res.objective_trace[0]], res.update_objectives])) <= 1e-10)
    assert res.n_nonzero == np.count_nonzero(res.beta_std)
    np.testing.assert_allclose(res.beta_orig, res.beta_std / d.col_norms)
    assert res.intercept == pytest.approx(d.y_mean - d.col_means @ res.beta_orig)
    assert res.objective == pytest.approx(objective(res.beta_std, d, p), rel=1e-10, abs=1e-10)
    # residual consistency and coordinate-wise fixed point
    r = d.y_centered - d.X_std @ res.beta_std
    for i in range(d.p):
        z = adjusted_gradient(i, res.beta_std[i], r, d)
        assert abs(prox_map_T(z, res.beta_std[i], p) - res.beta_std[i]) <= 1e-8
    # predictions on the original scale
    np.testing.assert_allclose(res.predict(X), d.X_std @ res.beta_std + d.y_mean, atol=1e-8)


def test_destandardize_examples():
    X = np.array([[1.0, 2.0], [-1.0, -2.0]]) / np.sqrt(2)
    d = standardize(X * np.array([1.0, 1.0]), np.array([1.0, -1.0]))
    beta = np.array([0.3, -0.2])
    bo, icpt = destandardize(beta, d)
    np.testing.assert_allclose(bo, beta / d.col_norms)
    b0, i0 = destandardize(np.zeros(2), d)
    assert np.all(b0 == 0) and i0 == d.y_mean
    X2 = np.array([[1.0, 2.0], [-1.0, -2.0], [0.0, 0.0]])
    X2[:, 0] *= np.sqrt(2)
    X2[:, 1] *= 4 / np.sqrt(8)
    d2 = standardize(X2, np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(d2.col_norms, [2.0, 4.0])
    bo2, _ = destandardize(np.array([1.0, 1.0]), d2)
    np.testing.assert_allclose(bo2, [0.5, 0.25])


def test_identity_standardization():
    Q = np.array([[1.0, 1.0], [-1.0, 1.0], [0.0, -2.0]])
    Q /= np.linalg.norm(Q, axis=0)
    y = np.array([0.5, -0.2, -0.3])
    d = standardize(Q, y)
    np.testing.assert_allclose(d.col_norms, 1.0)
    bo, icpt = destandardize(np.array([0.7, -0.1]), d)
    np.testing.assert_allclose(bo, [0.7, -0.1])
    assert icpt == pytest.approx(0.0, abs=1e-15)


def test_column_permutation_bookkeeping():
    X, y = random_problem(9, p=6)
    perm = np.array([3, 0, 5, 1, 4, 2])
    d = standardize(X[:, perm], y)
    inv = np.argsort(perm)
    res = fit(d, PenaltySpec(1.0, 0.5), SolverConfig(tol=1e-12))
    res_ref = fit(standardize(X, y), PenaltySpec(1.0, 0.5), SolverConfig(tol=1e-12))
    np.testing.assert_allclose(res.beta_orig[inv], res_ref.beta_orig, atol=1e-8)
    # same ordering twice gives bit-identical output
    again = fit(d, PenaltySpec(0.5, 0.5))
    np.testing.assert_array_equal(fit(d, PenaltySpec(0.5, 0.5)).beta_std, again.beta_std)


def test_non_convergence_reported():
    X, y = random_problem(10, p=20)
    d = standardize(X, y)
    res = fit(d, PenaltySpec(0.5, 0.01), SolverConfig(tol=1e-15, max_sweeps=1))
    assert not res.converged
    assert res.sweeps_used == 1
    assert res.notes


def test_warm_start_shape_checked():
    X, y = random_problem(11)
    d = standardize(X, y)
    with pytest.raises(ValueError):
        fit(d, PenaltySpec(0.5, 0.1), SolverConfig().with_warm_start(np.zeros(3)))
    with pytest.raises(ValueError):
        SolverConfig(tol=0)
    with pytest.raises(ValueError):
        SolverConfig(max_sweeps=0)
