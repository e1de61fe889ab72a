"""Sparse variational GP: the (Z, mu, Sigma) family, its ELBO, and the
closed-form optimum.

The ELBO is computed fully in closed form (Gaussian likelihood), and the
four-term expansion of -2*sigma^2*ELBO is exposed with the Gaussian
normalization constant n*sigma^2*log(2*pi*sigma^2) carried explicitly so
the identity holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import NoConvergence
from .kernels import Kernel, as_points
from .linalg import SpdFactor, factor_spd, logdet, solve
from .nystrom import InducingSet, q_gram


@dataclass(frozen=True)
class SvgpState:
    """Variational triple: inducing points plus Gaussian (mu, Sigma)."""

    inducing: InducingSet
    mu: np.ndarray
    sigma_factor: SpdFactor

    @property
    def m(self) -> int:
        return self.inducing.m

    @property
    def sigma(self) -> np.ndarray:
        return self.sigma_factor.reconstruct()


def make_state(ind: InducingSet, mu, sigma) -> SvgpState:
    mu = np.asarray(mu, dtype=float).ravel()
    sigma = np.asarray(sigma, dtype=float)
    if mu.shape[0] != ind.m or sigma.shape != (ind.m, ind.m):
        from .errors import DimensionMismatch

        raise DimensionMismatch(
            f"mu {mu.shape} / sigma {sigma.shape} inconsistent with m={ind.m}"
        )
    return SvgpState(inducing=ind, mu=mu, sigma_factor=factor_spd(sigma, jitter_ladder=[0.0]))


def variational_mean(state: SvgpState, x) -> float:
    """m^nu(x) = k_Z(x)^T k_ZZ^{-1} mu."""
    ind = state.inducing
    kx = ind.kernel.gram(ind.points, as_points(x, ind.kernel.input_dim))[:, 0]
    return float(kx @ solve(ind.kzz_factor, state.mu))


def variational_cov(state: SvgpState, x, x2) -> float:
    """k^nu(x,x') = k - q + k_Z^T k_ZZ^{-1} Sigma k_ZZ^{-1} k_Z."""
    ind = state.inducing
    k = ind.kernel
    xa = as_points(x, k.input_dim)
    xb = as_points(x2, k.input_dim)
    kx = k.gram(ind.points, xa)[:, 0]
    kx2 = k.gram(ind.points, xb)[:, 0]
    a = solve(ind.kzz_factor, kx)
    b = solve(ind.kzz_factor, kx2)
    return float(k.gram(xa, xb)[0, 0] - kx @ b + a @ state.sigma @ b)


def psi_forward(ind: InducingSet, mu) -> np.ndarray:
    """Span coefficients alpha = k_ZZ^{-1} mu of the interpolant of mu at Z."""
    mu = np.asarray(mu, dtype=float).ravel()
    return solve(ind.kzz_factor, mu)


def psi_inverse(ind: InducingSet, alpha) -> np.ndarray:
    """Recover mu = f_Z from span coefficients (f = k_Z(.)^T alpha)."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    Kzz = ind.kernel.gram(ind.points)
    return Kzz @ alpha


def feature_map_phi(state: SvgpState, x) -> np.ndarray:
    """phi(x) = Sigma^{1/2} k_ZZ^{-1} k_Z(x); <phi(x), phi(x')> has Gram
    value Sigma on Z."""
    ind = state.inducing
    kx = ind.kernel.gram(ind.points, as_points(x, ind.kernel.input_dim))[:, 0]
    return state.sigma_factor.lower.T @ solve(ind.kzz_factor, kx)


def _elbo_pieces(state: SvgpState, data: Dataset, noise_var: float):
    """Shared quantities for elbo / elbo_breakdown."""
    ind = state.inducing
    k = ind.kernel
    X = data.inputs
    Kxz = k.gram(X, ind.points)
    # A = k_ZZ^{-1} k_ZX, column i is k_ZZ^{-1} k_Z(x_i)
    A = solve(ind.kzz_factor, Kxz.T)
    mean_at_X = Kxz @ solve(ind.kzz_factor, state.mu)
    diag_k = np.diag(k.gram(X))
    diag_q = np.sum(Kxz * A.T, axis=1)
    diag_qnu = np.sum(A * (state.sigma @ A), axis=0)
    kl = 0.5 * (
        np.trace(solve(ind.kzz_factor, state.sigma))
        + state.mu @ solve(ind.kzz_factor, state.mu)
        - state.m
        + logdet(ind.kzz_factor)
        - logdet(state.sigma_factor)
    )
    return mean_at_X, diag_k, diag_q, diag_qnu, float(kl)


def elbo(state: SvgpState, data: Dataset, noise_var: float) -> float:
    """Closed-form ELBO: -KL(N(mu,Sigma) || N(0,k_ZZ)) + expected log-lik."""
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    mean_at_X, diag_k, diag_q, diag_qnu, kl = _elbo_pieces(state, data, noise_var)
    n = data.n
    resid_sq = float(np.sum((data.targets - mean_at_X) ** 2))
    var_sum = float(np.sum(diag_k - diag_q + diag_qnu))
    fit = -0.5 * n * np.log(2.0 * np.pi * noise_var) - (resid_sq + var_sum) / (2.0 * noise_var)
    return fit - kl


@dataclass(frozen=True)
class ElboBreakdown:
    """Terms of the exact expansion of -2*sigma^2*ELBO.

    fit_plus_norm + sigma_quadratic + kl_regularizer + residual_trace
    + normalization == total_check, where total_check = -2*sigma^2*ELBO and
    normalization = n*sigma^2*log(2*pi*sigma^2) is the Gaussian likelihood
    constant (independent of the variational parameters).
    """

    fit_plus_norm: float
    sigma_quadratic: float
    kl_regularizer: float
    residual_trace: float
    normalization: float
    total_check: float

    def term_sum(self) -> float:
        return (self.fit_plus_norm + self.sigma_quadratic
                + self.kl_regularizer + self.residual_trace + self.normalization)


def elbo_breakdown(state: SvgpState, data: Dataset, noise_var: float) -> ElboBreakdown:
    """Split -2*sigma^2*ELBO into its parameter-wise pieces.

    fit_plus_norm depends only on mu (and Z): the subspace least-squares
    objective sum (y_i - m^nu(x_i))^2 + sigma^2 mu^T k_ZZ^{-1} mu.
    sigma_quadratic and kl_regularizer depend only on Sigma (and Z);
    residual_trace only on Z.
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    ind = state.inducing
    mean_at_X, diag_k, diag_q, diag_qnu, _ = _elbo_pieces(state, data, noise_var)
    n = data.n
    fit_plus_norm = float(
        np.sum((data.targets - mean_at_X) ** 2)
        + noise_var * state.mu @ solve(ind.kzz_factor, state.mu)
    )
    sigma_quadratic = float(np.sum(diag_qnu))
    kl_regularizer = float(noise_var * (
        np.trace(solve(ind.kzz_factor, state.sigma))
        + logdet(ind.kzz_factor) - logdet(state.sigma_factor)
        - state.m
    ))
    residual_trace = float(np.sum(diag_k - diag_q))
    normalization = float(n * noise_var * np.log(2.0 * np.pi * noise_var))
    total = -2.0 * noise_var * elbo(state, data, noise_var)
    return ElboBreakdown(
        fit_plus_norm=fit_plus_norm,
        sigma_quadratic=sigma_quadratic,
        kl_regularizer=kl_regularizer,
        residual_trace=residual_trace,
        normalization=normalization,
        total_check=total,
    )


def optimal_parameters(kernel: Kernel, data: Dataset, ind: InducingSet,
                       noise_var: float) -> SvgpState:
    """Closed-form ELBO maximizer:

    mu*    = k_ZZ (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
    Sigma* = k_ZZ (k_ZZ + s2^{-1} k_ZX k_XZ)^{-1} k_ZZ
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    Kzx = kernel.gram(ind.points, data.inputs)
    Kzz = kernel.gram(ind.points)
    B = Kzx @ Kzx.T
    mu = Kzz @ solve(factor_spd(noise_var * Kzz + B), Kzx @ data.targets)
    sigma = Kzz @ solve(factor_spd(Kzz + B / noise_var), Kzz)
    sigma = 0.5 * (sigma + sigma.T)
    return make_state(ind, mu, sigma)


def optimal_posterior(kernel: Kernel, data: Dataset, ind: InducingSet, noise_var: float):
    """Mean/cov closures of the optimized variational GP.

    m*(x) = k_Z(x)^T (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
    k*(x,x') = k - q + k_Z(x)^T (k_ZZ + s2^{-1} k_ZX k_XZ)^{-1} k_Z(x')
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    Kzx = kernel.gram(ind.points, data.inputs)
    Kzz = kernel.gram(ind.points)
    B = Kzx @ Kzx.T
    mean_coef = solve(factor_spd(noise_var * Kzz + B), Kzx @ data.targets)
    cov_factor = factor_spd(Kzz + B / noise_var)

    def mean(x):
        kx = kernel.gram(ind.points, as_points(x, kernel.input_dim))[:, 0]
        return float(kx @ mean_coef)

    def cov(x, x2):
        xa = as_points(x, kernel.input_dim)
        xb = as_points(x2, kernel.input_dim)
        kx = kernel.gram(ind.points, xa)[:, 0]
        kx2 = kernel.gram(ind.points, xb)[:, 0]
        prior = kernel.gram(xa, xb)[0, 0]
        q_val = kx @ solve(ind.kzz_factor, kx2)
        return float(prior - q_val + kx @ solve(cov_factor, kx2))

    return mean, cov


def optimal_elbo(kernel: Kernel, data: Dataset, ind: InducingSet, noise_var: float) -> float:
    """ELBO at (mu*, Sigma*):

    -1/2 logdet(q_XX + s2 I) - 1/2 y^T (q_XX + s2 I)^{-1} y
    - n/2 log 2pi - tr(k_XX - q_XX) / (2 s2)
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    n = data.n
    Qxx = q_gram(ind, data.inputs)
    F = factor_spd(Qxx + noise_var * np.eye(n), jitter_ladder=[0.0])
    y = data.targets
    diag_gap = np.diag(kernel.gram(data.inputs)) - np.diag(Qxx)
    return float(
        -0.5 * logdet(F)
        - 0.5 * y @ solve(F, y)
        - 0.5 * n * np.log(2.0 * np.pi)
        - np.sum(diag_gap) / (2.0 * noise_var)
    )


def fixed_point_solver(kernel: Kernel, data: Dataset, ind: InducingSet, noise_var: float,
                       max_iters: int = 50, tol: float = 1e-10) -> SvgpState:
    """Alternating exact coordinate updates on the ELBO stationarity system.

    The Sigma update inverts the Hessian of the expected negative joint,
    Sigma <- (s2^{-1} k_ZZ^{-1} k_ZX k_XZ k_ZZ^{-1} + k_ZZ^{-1})^{-1};
    the mu update solves the linear stationarity condition
    (s2^{-1} k_ZX k_XZ k_ZZ^{-1} + I) mu = s2^{-1} k_ZX y.
    Both coordinate problems are solved exactly, so convergence is
    declared once successive (mu, Sigma) stop moving (max-abs < tol).
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    Kzx = kernel.gram(ind.points, data.inputs)
    Kzz = kernel.gram(ind.points)
    B = Kzx @ Kzx.T
    m = ind.m
    mu = np.zeros(m)
    sigma = Kzz.copy()
    for _ in range(max_iters):
        # Sigma <- (s2^{-1} Kzz^{-1} B Kzz^{-1} + Kzz^{-1})^{-1}
        #        = Kzz (Kzz + s2^{-1} B)^{-1} Kzz
        sigma_new = Kzz @ solve(factor_spd(Kzz + B / noise_var), Kzz)
        sigma_new = 0.5 * (sigma_new + sigma_new.T)
        # (s2^{-1} B Kzz^{-1} + I) mu = s2^{-1} Kzx y, via nu = Kzz^{-1} mu:
        # (B + s2 Kzz) nu = Kzx y
        nu = solve(factor_spd(noise_var * Kzz + B), Kzx @ data.targets)
        mu_new = Kzz @ nu
        delta = max(
            float(np.max(np.abs(mu_new - mu))),
            float(np.max(np.abs(sigma_new - sigma))),
        )
        mu, sigma = mu_new, sigma_new
        if delta < tol:
            return make_state(ind, mu, sigma)
    raise NoConvergence(f"fixed-point iteration did not settle in {max_iters} iterations")


def mu_stationarity_residual(kernel: Kernel, data: Dataset, state: SvgpState,
                             noise_var: float) -> float:
    """Max-abs residual of the mu stationarity condition at the given state."""
    ind = state.inducing
    Kzx = kernel.gram(ind.points, data.inputs)
    B = Kzx @ Kzx.T
    lhs = B @ solve(ind.kzz_factor, state.mu) / noise_var + state.mu
    rhs = Kzx @ data.targets / noise_var
    return float(np.max(np.abs(lhs - rhs)))
