import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpk import linalg
from mpk import symplectic as sp
from mpk.errors import NotSymplectic, OddDimension, SingularBlock11, SingularBlock12, SingularL

SIGMA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
R = 1 / np.sqrt(2)


def sym(rng, n, s=0.5):
    M = rng.uniform(-s, s, (n, n))
    return M + M.T


def test_standard_form_is_symplectic():
    for n in (1, 2, 3):
        assert sp.is_symplectic(sp.standard_form(n)).ok


def test_rank_one_blocks_example():
    xi = sp.rank_one_blocks()
    assert sp.is_symplectic(xi.matrix)
    for block in (xi.xi11, xi.xi12, xi.xi21, xi.xi22):
        assert np.linalg.matrix_rank(block) == 1


def test_non_symplectic_perturbation():
    M = np.eye(2)
    M[0, 1] = 1.0
    assert sp.is_symplectic(M).ok  # a 2x2 matrix with det 1 is symplectic
    M = np.eye(4)
    M[0, 3] = 1.0  # asymmetric upper-right block
    check = sp.is_symplectic(M)
    assert not check and check.residual == pytest.approx(1.0)
    with pytest.raises(NotSymplectic):
        sp.SymplecticMatrix(M)
    with pytest.raises(OddDimension):
        sp.is_symplectic(np.eye(3))


def test_block_conditions(rng):
    xi = sp.random_symplectic(3, rng)
    a, b, c, d = xi.xi11, xi.xi12, xi.xi21, xi.xi22
    assert np.allclose(a.T @ c, (a.T @ c).T)
    assert np.allclose(b.T @ d, (b.T @ d).T)
    assert np.allclose(a.T @ d - c.T @ b, np.eye(3))
    assert np.linalg.det(xi.matrix) == pytest.approx(1.0, abs=1e-8)


def test_inverse_examples(rng):
    assert np.allclose(sp.symplectic_inverse(SIGMA1).matrix, -SIGMA1)
    assert np.allclose(sp.symplectic_inverse(np.eye(4)).matrix, np.eye(4))
    xi = sp.random_symplectic(3, rng)
    assert np.max(np.abs(xi.inverse().matrix @ xi.matrix - np.eye(6))) <= 1e-10


def test_make_xi_abc_examples():
    assert np.allclose(sp.make_xi_abc(sp.ABCFormData(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))).matrix, np.eye(4))
    xi = sp.make_xi_abc(sp.ABCFormData(-1.0, np.sqrt(2.0), -1.0)).matrix
    assert np.allclose(xi, R * np.array([[1, 1], [-1, 1]]), atol=1e-15)
    xi = sp.make_xi_abc(sp.ABCFormData(0.0, 1.0, 0.7)).matrix
    assert np.allclose(xi, [[1, -0.7], [0, 1]])


def test_make_lambda_examples():
    assert np.allclose(sp.make_lambda_plq(sp.FreeFormData(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))).matrix,
                       sp.standard_form(2))
    assert np.allclose(sp.make_lambda_plq(sp.FreeFormData(0.0, -1.0, 0.0)).matrix, -SIGMA1)
    p, l, q = 0.3, -1.7, 2.1
    assert np.allclose(sp.make_lambda_plq(sp.FreeFormData(p, l, q)).matrix,
                       [[q / l, 1 / l], [p * q / l - l, p / l]])
    with pytest.raises(SingularL):
        sp.make_lambda_plq(sp.FreeFormData(0.0, 0.0, 0.0))


def test_factor_free_examples():
    d = sp.factor_free(SIGMA1)
    assert (d.P, d.L, d.Q) == (0.0, 1.0, 0.0)
    a, b, c = 0.5, 2.0, 0.3
    dd = (1 + b * c) / a
    d = sp.factor_free([[a, b], [c, dd]])
    assert np.allclose([d.P[0, 0], d.L[0, 0], d.Q[0, 0]], [dd / b, 1 / b, a / b])
    C = np.array([[2.0, 0.5], [0.5, 1.0]])
    M = np.block([[np.eye(2), C], [np.zeros((2, 2)), np.eye(2)]])
    d = sp.factor_free(M)
    Ci = np.linalg.inv(C)
    assert np.allclose(d.L, Ci) and np.allclose(d.P, Ci) and np.allclose(d.Q, Ci)
    with pytest.raises(SingularBlock12):
        sp.factor_free(np.eye(2))


def test_factor_abc_examples():
    d = sp.factor_abc(np.eye(4))
    assert np.allclose(d.A, 0) and np.allclose(d.B, np.eye(2)) and np.allclose(d.C, 0)
    S = np.array([[1.0, 2.0], [2.0, -1.0]])
    d = sp.factor_abc(np.block([[np.eye(2), np.zeros((2, 2))], [S, np.eye(2)]]))
    assert np.allclose(d.A, S) and np.allclose(d.B, np.eye(2)) and np.allclose(d.C, 0)
    d = sp.factor_abc(R * np.array([[1.0, 1.0], [-1.0, 1.0]]))
    assert np.allclose([d.A[0, 0], d.B[0, 0], d.C[0, 0]], [-1, np.sqrt(2), -1])
    with pytest.raises(SingularBlock11):
        sp.factor_abc(SIGMA1)


def test_round_trips(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        L = np.eye(n) + rng.uniform(-0.5, 0.5, (n, n))
        if abs(np.linalg.det(L)) < 0.1:
            continue
        d = sp.FreeFormData(sym(rng, n), L, sym(rng, n))
        e = sp.factor_free(sp.make_lambda_plq(d))
        assert max(np.max(np.abs(e.P - d.P)), np.max(np.abs(e.L - d.L)), np.max(np.abs(e.Q - d.Q))) <= 1e-9
        d = sp.ABCFormData(sym(rng, n), L, sym(rng, n))
        e = sp.factor_abc(sp.make_xi_abc(d))
        assert max(np.max(np.abs(e.A - d.A)), np.max(np.abs(e.B - d.B)), np.max(np.abs(e.C - d.C))) <= 1e-9


def _two_free_residual(xi):
    f1, f2 = sp.factor_two_free(xi)
    prod = sp.make_lambda_plq(f1).matrix @ sp.make_lambda_plq(f2).matrix
    return np.max(np.abs(prod - np.asarray(xi.matrix if hasattr(xi, "matrix") else xi)))


def test_two_free_examples(rng):
    assert _two_free_residual(sp.rank_one_blocks()) <= 1e-8
    assert _two_free_residual(sp.SymplecticMatrix(np.eye(4))) <= 1e-12
    assert _two_free_residual(sp.SymplecticMatrix(sp.standard_form(3))) <= 1e-12
    for _ in range(300):
        assert _two_free_residual(sp.random_symplectic(int(rng.integers(1, 5)), rng)) <= 1e-8


def test_two_free_shift_block():
    xi = sp.random_symplectic(2, np.random.default_rng(3))
    t = 2.5
    rest = xi.matrix @ sp.symplectic_inverse(sp.make_lambda_plq(sp.shift_data(2, t))).matrix
    assert np.allclose(rest[:2, 2:], -xi.xi11 + t * xi.xi12)


def test_mu_examples():
    for n in (1, 2, 3):
        assert sp.mu_of_symplectic(sp.standard_form(n)) == pytest.approx(n / (4 * np.pi), abs=1e-15)
        assert sp.mu_of_symplectic(np.eye(2 * n)) == 0.0
    a, b, c = 0.5, -2.0, 0.3
    assert sp.mu_of_symplectic([[a, b], [c, (1 + b * c) / a]]) == pytest.approx(2 / (4 * np.pi))
    assert sp.mu_of_symplectic(sp.rank_one_blocks()) == pytest.approx(1 / (4 * np.pi))
    r = sp.mu_report(sp.rank_one_blocks())
    assert r.singular_values == (1.0, 0.0) and r.trace_norm == pytest.approx(1.0)


def test_mu_literal_formula(rng):
    for _ in range(100):
        xi = sp.random_symplectic(int(rng.integers(1, 5)), rng)
        b = xi.xi12
        assert abs(np.trace(linalg.sqrt_psd(b.T @ b)) - linalg.schatten_norm(b, 1)) <= 1e-9


def test_generating_function(rng):
    """Xi_{A,B,C} sends (grad_eta S, eta) to (x, grad_x S) for S = (Ax.x + 2 Bx.eta + C eta.eta)/2."""
    for _ in range(200):
        n = int(rng.integers(1, 4))
        A, C = sym(rng, n), sym(rng, n)
        B = np.eye(n) + rng.uniform(-0.4, 0.4, (n, n))
        xi = sp.make_xi_abc(sp.ABCFormData(A, B, C)).matrix
        x, eta = rng.normal(size=n), rng.normal(size=n)
        grad_eta = B @ x + C @ eta
        grad_x = A @ x + B.T @ eta
        image = xi @ np.concatenate([grad_eta, eta])
        assert np.max(np.abs(image - np.concatenate([x, grad_x]))) <= 1e-9


@st.composite
def symplectic_matrices(draw):
    n = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return sp.random_symplectic(n, np.random.default_rng(seed))


@settings(max_examples=100, deadline=None)
@given(symplectic_matrices(), st.integers(0, 2 ** 32 - 1))
def test_group_closure(xi, seed):
    other = sp.random_symplectic(xi.n, np.random.default_rng(seed))
    assert sp.is_symplectic((xi @ other).matrix).ok
    assert sp.is_symplectic(sp.symplectic_inverse(xi).matrix).ok


@settings(max_examples=100, deadline=None)
@given(symplectic_matrices())
def test_mu_of_inverse_equals_mu(xi):
    # the upper-right block of the inverse is -xi12^T, which has the same singular values
    assert sp.mu_of_symplectic(sp.symplectic_inverse(xi)) == pytest.approx(sp.mu_of_symplectic(xi), abs=1e-12)
