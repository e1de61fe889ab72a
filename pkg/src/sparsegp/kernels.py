"""Positive-definite kernels and their Gram matrices.

Two families are provided: the Gaussian (squared-exponential) kernel
exp(-||x - x'||^2 / gamma^2) and the polynomial kernel (x.x' + c)^m.
Points are row-major (n, d) arrays; d = 1 is the common case in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UnsupportedKernel


def as_points(x, input_dim: int) -> np.ndarray:
    """Coerce scalars / 1-d arrays / 2-d arrays to an (n, d) point matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        # A single point of dimension d, or n points in 1-d.
        if input_dim == 1:
            x = x.reshape(-1, 1)
        else:
            x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != input_dim:
        raise DimensionMismatch(
            f"expected points of dimension {input_dim}, got array of shape {x.shape}"
        )
    return x


@dataclass(frozen=True)
class GaussianKernel:
    """k(x, x') = exp(-||x - x'||^2 / gamma^2), so k(x, x) = 1."""

    lengthscale: float = 1.0
    input_dim: int = 1

    def __post_init__(self):
        if self.lengthscale <= 0:
            raise ValueError("lengthscale must be positive")

    def __call__(self, x, x2) -> float:
        a = as_points(x, self.input_dim)
        b = as_points(x2, self.input_dim)
        if a.shape[0] != 1 or b.shape[0] != 1:
            raise DimensionMismatch("pointwise eval takes single points")
        return float(self.gram(a, b)[0, 0])

    def gram(self, A, B=None) -> np.ndarray:
        A = as_points(A, self.input_dim)
        same = B is None
        B = A if same else as_points(B, self.input_dim)
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        K = np.exp(-np.maximum(sq, 0.0) / self.lengthscale**2)
        if same:
            K = 0.5 * (K + K.T)
        return K

    def mixed_second_derivative(self, j: int, x) -> float:
        """d/dx_j d/dx'_j k(x, x') at x' = x; constant 2 / gamma^2."""
        as_points(x, self.input_dim)
        if not 0 <= j < self.input_dim:
            raise DimensionMismatch(f"coordinate {j} out of range for d={self.input_dim}")
        return 2.0 / self.lengthscale**2


@dataclass(frozen=True)
class PolynomialKernel:
    """k(x, x') = (x.x' + offset)^degree."""

    degree: int = 1
    offset: float = 0.0
    input_dim: int = 1

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")

    def __call__(self, x, x2) -> float:
        a = as_points(x, self.input_dim)
        b = as_points(x2, self.input_dim)
        if a.shape[0] != 1 or b.shape[0] != 1:
            raise DimensionMismatch("pointwise eval takes single points")
        return float(self.gram(a, b)[0, 0])

    def gram(self, A, B=None) -> np.ndarray:
        A = as_points(A, self.input_dim)
        same = B is None
        B = A if same else as_points(B, self.input_dim)
        K = (A @ B.T + self.offset) ** self.degree
        if same:
            K = 0.5 * (K + K.T)
        return K

    def mixed_second_derivative(self, j: int, x) -> float:
        raise UnsupportedKernel("mixed second derivative implemented for the Gaussian family only")


Kernel = GaussianKernel | PolynomialKernel


def make_kernel(family: str, input_dim: int = 1, *, gamma: float = 1.0,
                degree: int = 1, offset: float = 0.0) -> Kernel:
    """Build a kernel from a config-style description."""
    if family == "gaussian":
        return GaussianKernel(lengthscale=gamma, input_dim=input_dim)
    if family == "polynomial":
        return PolynomialKernel(degree=degree, offset=offset, input_dim=input_dim)
    raise UnsupportedKernel(f"unknown kernel family {family!r}")
