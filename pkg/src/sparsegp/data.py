"""Datasets: CSV ingestion and seeded synthetic generation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyFile, ParseError
from .kernels import Kernel, as_points
from .linalg import factor_spd


@dataclass(frozen=True)
class Dataset:
    """Regression sample: inputs (n, d) and targets (n,)."""

    inputs: np.ndarray
    targets: np.ndarray
    provenance: str = "unknown"

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        y = np.asarray(self.targets, dtype=float).ravel()
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DimensionMismatch(f"inputs must be (n, d) with n >= 1, got {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatch(
                f"{X.shape[0]} inputs but {y.shape[0]} targets"
            )
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains NaN or Inf")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", y)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]


def synth_prior_dataset(kernel: Kernel, X, noise_var: float, seed: int) -> Dataset:
    """Draw y ~ N(0, k_XX + noise_var * I) through the SPD factor, seeded."""
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    X = as_points(X, kernel.input_dim)
    n = X.shape[0]
    K = kernel.gram(X) + noise_var * np.eye(n)
    F = factor_spd(K, jitter_ladder=[0.0])
    rng = np.random.default_rng(seed)
    y = F.lower @ rng.standard_normal(n)
    return Dataset(inputs=X, targets=y, provenance=f"synthetic(seed={seed}, generator=prior)")


def synth_fixed_function_dataset(f0, X, noise_var: float, seed: int,
                                 input_dim: int = 1) -> Dataset:
    """y_i = f0(x_i) + eps_i with seeded Gaussian noise (noise_var may be 0)."""
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    X = as_points(X, input_dim)
    values = np.array([float(f0(x)) for x in X])
    rng = np.random.default_rng(seed)
    if noise_var > 0:
        values = values + np.sqrt(noise_var) * rng.standard_normal(X.shape[0])
    return Dataset(inputs=X, targets=values,
                   provenance=f"synthetic(seed={seed}, generator=fixed_function)")


def load_csv(path) -> Dataset:
    """Read a dataset from CSV with header x1,...,xd,y.

    Raises ParseError with the 1-based line number on any malformed row,
    EmptyFile when there are no data rows.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path} has no header row") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[-1] != "y":
            raise ParseError(1, f"expected header x1,...,xd,y, got {header}")
        d = len(header) - 1
        expected = [f"x{i + 1}" for i in range(d)]
        if header[:-1] != expected:
            raise ParseError(1, f"expected columns {expected + ['y']}, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise ParseError(lineno, f"expected {d + 1} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
    if not rows:
        raise EmptyFile(f"{path} has a header but no data rows")
    arr = np.array(rows)
    return Dataset(inputs=arr[:, :d], targets=arr[:, d], provenance=f"csv({path})")


def write_csv(path, data: Dataset) -> None:
    """Write a dataset in the load_csv format, 17 significant digits."""
    d = data.d
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(d)] + ["y"])
        for x, y in zip(data.inputs, data.targets):
            writer.writerow([f"{v:.17g}" for v in x] + [f"{y:.17g}"])
