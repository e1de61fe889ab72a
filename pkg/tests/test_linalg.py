import numpy as np
import pytest

from sparsegp.errors import DimensionMismatch, FactorizationFailed
from sparsegp.linalg import factor_spd, logdet, operator_norm, solve


def random_spd(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def test_identity_factor():
    F = factor_spd(np.eye(3), jitter_ladder=[0.0])
    assert np.allclose(F.lower, np.eye(3))
    assert F.jitter_used == 0.0


def test_hand_cholesky_2x2():
    F = factor_spd(np.array([[4.0, 2.0], [2.0, 3.0]]), jitter_ladder=[0.0])
    assert np.allclose(F.lower, [[2.0, 0.0], [1.0, np.sqrt(2.0)]])


def test_rank_one_needs_jitter():
    v = np.array([1.0, 1.0])
    A = np.outer(v, v)
    F = factor_spd(A)
    assert F.jitter_used > 0
    recon = F.reconstruct()
    assert np.linalg.norm(recon - (A + F.jitter_used * np.eye(2)), "fro") \
        <= 1e-10 * np.linalg.norm(A, "fro")


def test_factor_diag_positive():
    F = factor_spd(random_spd(12, 0))
    assert np.all(np.diag(F.lower) > 0)


def test_factorization_failed():
    with pytest.raises(FactorizationFailed):
        factor_spd(np.diag([1.0, -5.0]), jitter_ladder=[0.0])


def test_solve_identity():
    F = factor_spd(np.eye(4), jitter_ladder=[0.0])
    B = np.arange(8.0).reshape(4, 2)
    assert np.allclose(solve(F, B), B)


def test_solve_2x2_inverse():
    F = factor_spd(np.array([[4.0, 2.0], [2.0, 3.0]]), jitter_ladder=[0.0])
    inv = solve(F, np.eye(2))
    assert np.allclose(inv, [[3 / 8, -1 / 4], [-1 / 4, 1 / 2]])


def test_solve_round_trip():
    A = random_spd(20, 1)
    F = factor_spd(A, jitter_ladder=[0.0])
    B = np.random.default_rng(2).standard_normal((20, 3))
    assert np.allclose(A @ solve(F, B), B, atol=1e-8)


def test_solve_dimension_mismatch():
    F = factor_spd(np.eye(3), jitter_ladder=[0.0])
    with pytest.raises(DimensionMismatch):
        solve(F, np.zeros(4))


def test_logdet_identity():
    assert logdet(factor_spd(np.eye(5), jitter_ladder=[0.0])) == pytest.approx(0.0)


def test_logdet_diag():
    F = factor_spd(np.diag([2.0, 3.0]), jitter_ladder=[0.0])
    assert logdet(F) == pytest.approx(np.log(6.0))


def test_logdet_eigenvalue_oracle():
    A = random_spd(10, 3)
    expected = float(np.sum(np.log(np.linalg.eigvalsh(A))))
    assert logdet(factor_spd(A, jitter_ladder=[0.0])) == pytest.approx(expected, abs=1e-8)


def test_logdet_inverse_cancels():
    A = random_spd(8, 4)
    F = factor_spd(A, jitter_ladder=[0.0])
    Finv = factor_spd(solve(F, np.eye(8)), jitter_ladder=[0.0])
    assert logdet(F) + logdet(Finv) == pytest.approx(0.0, abs=1e-8)


def test_operator_norm_diag():
    assert operator_norm(np.diag([1.0, -3.0, 2.0])) == pytest.approx(3.0)


def test_operator_norm_zero():
    assert operator_norm(np.zeros((4, 4))) == 0.0


def test_operator_norm_eigensolver_oracle():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((15, 15))
    A = 0.5 * (A + A.T)
    expected = float(np.max(np.abs(np.linalg.eigvalsh(A))))
    assert operator_norm(A) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_operator_norm_below_trace_for_spd(seed):
    A = random_spd(7, seed)
    assert operator_norm(A) <= np.trace(A) + 1e-10
