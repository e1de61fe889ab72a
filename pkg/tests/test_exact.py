import numpy as np
import pytest
import scipy.stats

from sparsegp.data import Dataset
from sparsegp.exact import (fit_gpr, fit_krr, log_marginal_likelihood,
                            posterior_cov, predict_krr, regularized_risk)
from sparsegp.kernels import GaussianKernel


@pytest.fixture
def kernel():
    return GaussianKernel(lengthscale=1.0)


def random_dataset(n, seed, d=1, kernel=None):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3, 3, size=(n, d))
    y = rng.standard_normal(n)
    y *= min(1.0, 10.0 / np.linalg.norm(y))
    return Dataset(X, y)


def span_rkhs_norm_sq(kernel, X, coef):
    return float(coef @ kernel.gram(X) @ coef)


def test_krr_scalar_case(kernel):
    data = Dataset(np.array([[0.0]]), np.array([2.0]))
    model = fit_krr(kernel, data, ridge=1.0)
    assert model.coefficients == pytest.approx([1.0])
    assert predict_krr(model, 0.0) == pytest.approx(1.0)


def test_krr_zero_targets(kernel):
    data = random_dataset(6, 0)
    data = Dataset(data.inputs, np.zeros(6))
    model = fit_krr(kernel, data, ridge=0.3)
    assert np.allclose(model.coefficients, 0.0)
    assert model.predict(1.234) == 0.0


def test_krr_coefficients_solve_system(kernel):
    data = random_dataset(9, 1)
    lam = 0.05
    model = fit_krr(kernel, data, lam)
    K = kernel.gram(data.inputs)
    resid = (K + 9 * lam * np.eye(9)) @ model.coefficients - data.targets
    assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(data.targets)


def test_krr_minimality_random_probes(kernel):
    data = random_dataset(5, 2)
    lam = 0.1
    model = fit_krr(kernel, data, lam)

    def objective(coef):
        vals = kernel.gram(data.inputs) @ coef
        return np.mean((data.targets - vals) ** 2) \
            + lam * span_rkhs_norm_sq(kernel, data.inputs, coef)

    best = objective(model.coefficients)
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert best <= objective(rng.standard_normal(5)) + 1e-12


def test_krr_far_prediction_decays(kernel):
    data = random_dataset(5, 4)
    model = fit_krr(kernel, data, 0.1)
    assert abs(model.predict(50.0)) <= 1e-6


def test_krr_near_interpolation(kernel):
    X = np.array([[-2.0], [0.0], [2.0], [4.0]])
    y = np.array([1.0, -0.5, 2.0, 0.3])
    model = fit_krr(kernel, Dataset(X, y), ridge=1e-12)
    for x, target in zip(X, y):
        assert model.predict(x) == pytest.approx(target, abs=1e-4)


def test_gpr_scalar_case(kernel):
    data = Dataset(np.array([[0.0]]), np.array([2.0]))
    post = fit_gpr(kernel, data, noise_var=1.0)
    assert post.mean(0.0) == pytest.approx(1.0)
    assert post.cov(0.0, 0.0) == pytest.approx(0.5)


def test_gpr_prior_recovery_large_noise(kernel):
    data = random_dataset(6, 5)
    post = fit_gpr(kernel, data, noise_var=1e12)
    assert abs(post.mean(0.7)) <= 1e-9
    assert post.cov(0.7, 0.7) == pytest.approx(1.0, abs=1e-9)


def test_gpr_mean_equals_krr(kernel):
    # GP posterior mean == KRR prediction when noise_var = n * ridge
    data = random_dataset(12, 6)
    s2 = 0.4
    post = fit_gpr(kernel, data, s2)
    model = fit_krr(kernel, data, s2 / data.n)
    grid = np.linspace(-4, 4, 50)
    for x in grid:
        assert post.mean(x) == pytest.approx(model.predict(x), abs=1e-8)


def test_posterior_cov_far_and_symmetry(kernel):
    data = random_dataset(6, 7)
    post = fit_gpr(kernel, data, 0.2)
    assert posterior_cov(post, 60.0, 60.0) == pytest.approx(1.0, abs=1e-6)
    a, b = 0.3, -1.1
    assert posterior_cov(post, a, b) == pytest.approx(posterior_cov(post, b, a),
                                                      rel=1e-12)


def test_posterior_cov_psd(kernel):
    data = random_dataset(10, 8)
    post = fit_gpr(kernel, data, 0.2)
    pts = np.random.default_rng(9).uniform(-3, 3, size=8)
    C = np.array([[post.cov(a, b) for b in pts] for a in pts])
    assert np.linalg.eigvalsh(0.5 * (C + C.T)).min() >= -1e-8


def test_posterior_variance_bounded_by_prior(kernel):
    data = random_dataset(10, 10)
    post = fit_gpr(kernel, data, 0.1)
    for x in np.linspace(-4, 4, 30):
        v = post.variance(x)
        assert -1e-10 <= v <= 1.0 + 1e-10


def test_posterior_variance_shrinks_with_data(kernel):
    rng = np.random.default_rng(11)
    X = rng.uniform(-2, 2, size=(8, 1))
    y = rng.standard_normal(8)
    small = fit_gpr(kernel, Dataset(X[:7], y[:7]), 0.1)
    full = fit_gpr(kernel, Dataset(X, y), 0.1)
    for x in np.linspace(-3, 3, 10):
        assert full.variance(x) <= small.variance(x) + 1e-10


def test_lml_scalar_cases(kernel):
    zero = Dataset(np.array([[0.0]]), np.array([0.0]))
    base = -0.5 * np.log(2.0) - 0.5 * np.log(2 * np.pi)
    assert log_marginal_likelihood(kernel, zero, 1.0) == pytest.approx(base)
    two = Dataset(np.array([[0.0]]), np.array([2.0]))
    assert log_marginal_likelihood(kernel, two, 1.0) == pytest.approx(base - 1.0)


def test_lml_matches_mvn_logpdf(kernel):
    data = random_dataset(10, 12)
    s2 = 0.3
    cov = kernel.gram(data.inputs) + s2 * np.eye(10)
    expected = scipy.stats.multivariate_normal(mean=np.zeros(10), cov=cov) \
        .logpdf(data.targets)
    assert log_marginal_likelihood(kernel, data, s2) == pytest.approx(expected, abs=1e-8)


def test_regularized_risk_zero_function(kernel):
    data = random_dataset(7, 13)
    risk = regularized_risk(np.zeros(7), 0.0, data, 0.1)
    assert risk == pytest.approx(np.mean(data.targets**2))


def test_regularized_risk_quadratic_form_identity(kernel):
    # n * R_n(krr; y) with ridge = s2/n equals s2 * y^T (K + s2 I)^{-1} y
    data = random_dataset(15, 14)
    s2 = 0.5
    model = fit_krr(kernel, data, s2 / data.n)
    risk = regularized_risk(model.predict_many(data.inputs),
                            model.rkhs_norm_sq(), data, s2 / data.n)
    K = kernel.gram(data.inputs)
    quad = data.targets @ np.linalg.solve(K + s2 * np.eye(15), data.targets)
    assert data.n * risk == pytest.approx(s2 * quad, rel=1e-8)


def test_regularized_risk_minimality(kernel):
    data = random_dataset(8, 15)
    lam = 0.2
    model = fit_krr(kernel, data, lam)
    best = regularized_risk(model.predict_many(data.inputs),
                            model.rkhs_norm_sq(), data, lam)
    rng = np.random.default_rng(16)
    for _ in range(50):
        coef = rng.standard_normal(8)
        vals = kernel.gram(data.inputs) @ coef
        probe = regularized_risk(vals, span_rkhs_norm_sq(kernel, data.inputs, coef),
                                 data, lam)
        assert best <= probe + 1e-12
