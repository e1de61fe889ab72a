"""Low-rank machinery built on a set of inducing points Z.

Holds the span subspace M = span(k(., z_1), ..., k(., z_m)), the
orthogonal projection onto it, the degenerate kernel
q(x, x') = k_Z(x)^T k_ZZ^{-1} k_Z(x'), ridge regression restricted to M
(two equivalent routes), the posterior of a GP with prior kernel q, and
two inducing-point selection strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import InvalidCount
from .kernels import Kernel, as_points
from .linalg import SpdFactor, factor_spd, solve


@dataclass(frozen=True)
class InducingSet:
    kernel: Kernel
    points: np.ndarray
    kzz_factor: SpdFactor

    @property
    def m(self) -> int:
        return self.points.shape[0]


def make_inducing(kernel: Kernel, Z) -> InducingSet:
    """Validate Z and factor k_ZZ (with the jitter ladder as a safety net)."""
    Z = as_points(Z, kernel.input_dim)
    if Z.shape[0] < 1:
        raise InvalidCount("need at least one inducing point")
    # Duplicated rows make k_ZZ exactly singular; reject before factoring.
    uniq = np.unique(Z, axis=0)
    if uniq.shape[0] != Z.shape[0]:
        raise InvalidCount("duplicated inducing points")
    F = factor_spd(kernel.gram(Z))
    return InducingSet(kernel=kernel, points=Z, kzz_factor=F)


@dataclass(frozen=True)
class NystromModel:
    """Ridge regression restricted to M: f(x) = k_Z(x)^T beta."""

    kernel: Kernel
    inducing: InducingSet
    beta: np.ndarray
    ridge: float

    def predict(self, x) -> float:
        x = as_points(x, self.kernel.input_dim)
        kx = self.kernel.gram(self.inducing.points, x)[:, 0]
        return float(kx @ self.beta)

    def predict_many(self, X) -> np.ndarray:
        X = as_points(X, self.kernel.input_dim)
        return self.kernel.gram(X, self.inducing.points) @ self.beta

    def rkhs_norm_sq(self) -> float:
        Kzz = self.kernel.gram(self.inducing.points)
        return float(self.beta @ Kzz @ self.beta)


def project_onto_M(ind: InducingSet, f_at_Z: np.ndarray) -> np.ndarray:
    """Coefficients k_ZZ^{-1} f_Z of the orthogonal projection onto M."""
    f_at_Z = np.asarray(f_at_Z, dtype=float).ravel()
    return solve(ind.kzz_factor, f_at_Z)


def approx_kernel_q(ind: InducingSet, x, x2) -> float:
    """q(x, x') = k_Z(x)^T k_ZZ^{-1} k_Z(x')."""
    k = ind.kernel
    x = as_points(x, k.input_dim)
    x2 = as_points(x2, k.input_dim)
    kx = k.gram(ind.points, x)[:, 0]
    kx2 = k.gram(ind.points, x2)[:, 0]
    return float(kx @ solve(ind.kzz_factor, kx2))


def q_gram(ind: InducingSet, A, B=None) -> np.ndarray:
    """Gram matrix of q: k_AZ k_ZZ^{-1} k_ZB."""
    k = ind.kernel
    Kaz = k.gram(A, ind.points)
    Kzb = Kaz.T if B is None else k.gram(ind.points, B)
    Q = Kaz @ solve(ind.kzz_factor, Kzb)
    if B is None:
        Q = 0.5 * (Q + Q.T)
    return Q


def fit_nystrom(kernel: Kernel, data: Dataset, ind: InducingSet, ridge: float) -> NystromModel:
    """Minimize the ridge objective over M directly in beta coordinates.

    beta solves (n*ridge*k_ZZ + k_ZX k_XZ) beta = k_ZX y; O(n m^2 + m^3).
    """
    if ridge <= 0:
        raise ValueError("ridge must be positive")
    n = data.n
    Kxz = kernel.gram(data.inputs, ind.points)
    Kzz = kernel.gram(ind.points)
    A = n * ridge * Kzz + Kxz.T @ Kxz
    beta = solve(factor_spd(A), Kxz.T @ data.targets)
    return NystromModel(kernel=kernel, inducing=ind, beta=beta, ridge=ridge)


def fit_nystrom_via_q(kernel: Kernel, data: Dataset, ind: InducingSet, ridge: float) -> NystromModel:
    """Solve KRR with the approximate kernel q and map back to M coordinates.

    KRR with kernel q gives f(x) = q_X(x)^T (q_XX + n*ridge*I)^{-1} y; with
    q_X(x) = k_XZ k_ZZ^{-1} k_Z(x) this is k_Z(x)^T beta for
    beta = k_ZZ^{-1} k_ZX (q_XX + n*ridge*I)^{-1} y.
    """
    if ridge <= 0:
        raise ValueError("ridge must be positive")
    n = data.n
    Qxx = q_gram(ind, data.inputs)
    F = factor_spd(Qxx + n * ridge * np.eye(n), jitter_ladder=[0.0])
    gamma = solve(F, data.targets)
    Kzx = kernel.gram(ind.points, data.inputs)
    beta = solve(ind.kzz_factor, Kzx @ gamma)
    return NystromModel(kernel=kernel, inducing=ind, beta=beta, ridge=ridge)


def dtc_posterior(kernel: Kernel, data: Dataset, ind: InducingSet, noise_var: float):
    """Posterior mean/cov closures of a GP with prior kernel q.

    mean(x) = k_Z(x)^T (s2 k_ZZ + k_ZX k_XZ)^{-1} k_ZX y
    cov(x, x') = k_Z(x)^T (k_ZZ + s2^{-1} k_ZX k_XZ)^{-1} k_Z(x')
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    Kzx = kernel.gram(ind.points, data.inputs)
    Kzz = kernel.gram(ind.points)
    mean_factor = factor_spd(noise_var * Kzz + Kzx @ Kzx.T)
    mean_coef = solve(mean_factor, Kzx @ data.targets)
    cov_factor = factor_spd(Kzz + Kzx @ Kzx.T / noise_var)

    def mean(x):
        kx = kernel.gram(ind.points, as_points(x, kernel.input_dim))[:, 0]
        return float(kx @ mean_coef)

    def cov(x, x2):
        kx = kernel.gram(ind.points, as_points(x, kernel.input_dim))[:, 0]
        kx2 = kernel.gram(ind.points, as_points(x2, kernel.input_dim))[:, 0]
        return float(kx @ solve(cov_factor, kx2))

    return mean, cov


def trace_gap(ind: InducingSet, X) -> float:
    """tr(k_XX - q_XX), the central low-rank deficiency diagnostic."""
    k = ind.kernel
    X = as_points(X, k.input_dim)
    Kxz = k.gram(X, ind.points)
    diag_q = np.sum(Kxz * solve(ind.kzz_factor, Kxz.T).T, axis=1)
    diag_k = np.diag(k.gram(X))
    return float(np.sum(diag_k - diag_q))


def select_inducing(kernel: Kernel, data: Dataset, m: int, strategy: str = "greedy_trace",
                    seed: int = 0) -> InducingSet:
    """Pick m training inputs as inducing points.

    "uniform": m distinct indices without replacement, seeded.
    "greedy_trace": pivoted-Cholesky greedy; at each step take the point
    with the largest residual diagonal k(x,x) - q_current(x,x), breaking
    ties in favor of the lowest index.
    """
    n = data.n
    if not 1 <= m <= n:
        raise InvalidCount(f"m must be in [1, {n}], got {m}")
    X = data.inputs
    if strategy == "uniform":
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(n, size=m, replace=False))
    elif strategy == "greedy_trace":
        K = kernel.gram(X)
        resid = np.diag(K).copy()
        L = np.zeros((n, m))
        idx = []
        for step in range(m):
            # argmax returns the lowest index among ties.
            pivot = int(np.argmax(resid))
            if resid[pivot] <= 0:
                # Residual exhausted: matrix rank reached; pad with any
                # not-yet-chosen indices (lowest first) to honor the count.
                remaining = [i for i in range(n) if i not in idx]
                idx.extend(remaining[: m - step])
                break
            idx.append(pivot)
            col = (K[:, pivot] - L[:, :step] @ L[pivot, :step]) / np.sqrt(resid[pivot])
            L[:, step] = col
            resid = resid - col**2
            resid[pivot] = -np.inf
        idx = np.array(idx[:m])
    else:
        raise ValueError(f"unknown selection strategy {strategy!r}")
    return make_inducing(kernel, X[idx])
