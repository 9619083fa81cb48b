"""Weyl quantization of quadratic symbols in a truncated Hermite basis.

Basis: ``h_k(x) = (2 pi)^{1/4} psi_k(sqrt(2 pi) x)`` where ``psi_k`` are the
physicists' Hermite functions, so that ``pi (D^2 + x^2) h_k = (k + 1/2) h_k``
with ``D = (2 i pi)^{-1} d/dx``. With ``a = sqrt(pi) (x + iD)`` one has
``x = (a + a^+) / (2 sqrt(pi))`` and ``D = (a - a^+) / (2 i sqrt(pi))``.

An optional scale ``s`` per axis uses ``h_k(x/s)/sqrt(s)`` instead, which lets
a fixed truncation resolve states concentrated in one direction.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from ..errors import TruncationUnconverged

CONVERGENCE_STEP = 16
CONVERGENCE_TOL = 1e-8
DENSE_LIMIT = 400


@dataclass(frozen=True, eq=False)
class QuadraticSymbol:
    """``a(X) = <Q X, X> + <linear, X> + constant`` for ``X = (x, xi)`` in R^{2n}."""

    Q: np.ndarray
    constant: float = 0.0
    linear: np.ndarray = None

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if Q.shape[0] != Q.shape[1] or Q.shape[0] % 2:
            raise ValueError("Q must be 2n x 2n")
        if np.max(np.abs(Q - Q.T)) > 1e-12 * max(1.0, np.max(np.abs(Q))):
            raise ValueError("Q must be symmetric")
        b = np.zeros(Q.shape[0]) if self.linear is None else np.asarray(self.linear, dtype=float)
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "linear", b)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def n(self):
        return self.Q.shape[0] // 2

    def __call__(self, *coords):
        """Evaluate with ``2n`` broadcastable coordinate arrays ``x_1..x_n, xi_1..xi_n``."""
        X = [np.asarray(c, dtype=float) for c in coords]
        out = self.constant + sum(self.linear[i] * X[i] for i in range(len(X)))
        for i in range(len(X)):
            for j in range(len(X)):
                if self.Q[i, j]:
                    out = out + self.Q[i, j] * X[i] * X[j]
        return out

    def compose(self, chi):
        """Symbol ``a o chi`` for a linear map ``chi`` of R^{2n}."""
        chi = np.asarray(chi, dtype=float)
        return QuadraticSymbol(chi.T @ self.Q @ chi, self.constant, chi.T @ self.linear)

    def reflect(self, Y):
        """Symbol ``X -> a(2Y - X)``."""
        Y = np.asarray(Y, dtype=float)
        Q = self.Q
        return QuadraticSymbol(Q, self(*(2 * Y)), -4 * Q @ Y - self.linear)


def hcw_symbol(c, omega):
    """``(omega x)^2 + (c xi + x)^2`` in one dimension."""
    return QuadraticSymbol([[omega ** 2 + 1.0, c], [c, c * c]])


def hermite_functions(x, K, scale=1.0):
    """Rows ``h_0 .. h_{K-1}`` sampled at ``x`` (unit L2 norm)."""
    y = np.sqrt(2 * np.pi) * np.asarray(x, dtype=float) / scale
    out = np.zeros((K,) + y.shape)
    out[0] = np.pi ** -0.25 * np.exp(-y * y / 2)
    if K > 1:
        out[1] = np.sqrt(2.0) * y * out[0]
    for k in range(1, K - 1):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * y * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out * (2 * np.pi) ** 0.25 / np.sqrt(scale)


def position_momentum(T, scale=1.0):
    """Matrices of ``x`` and ``D`` on the first ``T`` basis functions (single axis)."""
    a = np.diag(np.sqrt(np.arange(1, T)), 1)
    X = (a + a.T) * (scale / (2 * np.sqrt(np.pi)))
    D = (a - a.T) / (2j * np.sqrt(np.pi) * scale)
    return X.astype(complex), D


def _kron_axis(op, axis, n, T):
    mats = [sparse.identity(T, format="csr")] * n
    mats[axis] = sparse.csr_matrix(op)
    out = mats[0]
    for m in mats[1:]:
        out = sparse.kron(out, m, format="csr")
    return out


def _build(q, T, scales):
    n = q.n
    pad = T + 2
    ops = []
    for i in range(2 * n):
        X, D = position_momentum(pad, scales[i % n])
        ops.append(X if i < n else D)
    H = q.constant * sparse.identity(T ** n, dtype=complex, format="csr")
    for i in range(2 * n):
        if q.linear[i]:
            H = H + q.linear[i] * _kron_axis(ops[i][:T, :T], i % n, n, T)
    for i in range(2 * n):
        for j in range(i, 2 * n):
            coef = q.Q[i, j] * (1 if i == j else 2)
            if not coef:
                continue
            ai, aj = i % n, j % n
            if ai == aj:
                sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
                H = H + coef * _kron_axis(sym[:T, :T], ai, n, T)
            else:
                # operators on different axes commute, so the product is a Kronecker product
                first, second = (ops[i], ops[j]) if ai < aj else (ops[j], ops[i])
                H = H + coef * sparse.kron(sparse.csr_matrix(first[:T, :T]),
                                           sparse.csr_matrix(second[:T, :T]), format="csr")
    return (0.5 * (H + H.conj().T)).tocsr()


@dataclass(frozen=True, eq=False)
class HermiteOperator:
    symbol: QuadraticSymbol
    truncation: int
    sparse_matrix: sparse.csr_matrix
    scales: tuple = field(default=None)

    @property
    def matrix(self):
        return self.sparse_matrix.toarray()

    @property
    def dim(self):
        return self.sparse_matrix.shape[0]

    def lowest_eigenvalue(self):
        if self.dim <= DENSE_LIMIT:
            return float(np.linalg.eigvalsh(self.matrix)[0])
        # shift below the Gershgorin bound so the wanted eigenvalue is the one nearest the shift
        H = self.sparse_matrix
        radius = np.asarray(abs(H).sum(axis=1)).ravel() - np.abs(H.diagonal())
        shift = float(np.min(H.diagonal().real - radius)) - 1.0
        val = eigsh(H, k=1, sigma=shift, which="LM", return_eigenvectors=False, tol=1e-14)
        return float(val[0].real)


def weyl_quadratic_hermite(q, truncation, scales=None):
    """Matrix of ``opw(q)`` on the first ``truncation`` basis functions per axis.

    Products are formed in a slightly larger basis and then cut, so every
    entry equals the exact matrix element of the operator.
    """
    if q.n > 2:
        raise ValueError("only n <= 2 is supported")
    if truncation < 16:
        raise ValueError("truncation must be at least 16")
    scales = tuple(float(s) for s in (scales or (1.0,) * q.n))
    return HermiteOperator(q, int(truncation), _build(q, truncation, scales), scales)


@dataclass(frozen=True)
class GroundEnergy:
    value: float
    next_value: float
    truncation: int
    tolerance: float

    @property
    def delta(self):
        return abs(self.value - self.next_value)

    @property
    def converged(self):
        return self.delta <= self.tolerance


def ground_energy(h, strict=False, step=CONVERGENCE_STEP, tol=CONVERGENCE_TOL):
    """Smallest eigenvalue of the truncated matrix, with a convergence certificate.

    The certificate compares against the basis enlarged by ``step`` per axis;
    energies can only decrease as the basis grows. With ``strict=True`` a
    difference above ``tol`` raises TruncationUnconverged.
    """
    e0 = h.lowest_eigenvalue()
    e1 = weyl_quadratic_hermite(h.symbol, h.truncation + step, h.scales).lowest_eigenvalue()
    report = GroundEnergy(e0, e1, h.truncation, tol)
    if strict and not report.converged:
        raise TruncationUnconverged(f"ground energy moved {report.delta:.3e} (> {tol:g})")
    return report


def slice_symbol(q, value):
    """Restrict a two-dimensional symbol without ``xi_2`` to ``x_2 = value``."""
    if q.n != 2:
        raise ValueError("slicing needs n = 2")
    if np.any(q.Q[3]) or q.linear[3]:
        raise ValueError("symbol depends on xi_2")
    keep = [0, 2]
    Q = q.Q[np.ix_(keep, keep)]
    linear = q.linear[keep] + 2 * value * q.Q[keep, 1]
    constant = q.constant + q.Q[1, 1] * value ** 2 + q.linear[1] * value
    return QuadraticSymbol(Q, constant, linear)


@dataclass(frozen=True)
class PartialMinReport:
    full: float
    slices: tuple
    slice_energies: tuple
    tolerance: float

    @property
    def sliced_min(self):
        return min(self.slice_energies)

    @property
    def difference(self):
        return abs(self.full - self.sliced_min)

    @property
    def passed(self):
        return self.difference <= self.tolerance


def partial_min_check(q, slices, truncation=32, concentration=0.05, slice_truncation=64, tol=2e-3):
    """Compare the ground energy of ``opw(q)`` with the minimum over slices in ``x_2``.

    ``q`` must not depend on ``xi_2``. The full operator uses a basis squeezed
    by ``concentration`` along ``x_2`` so that states concentrated there are
    representable at moderate truncation.
    """
    full = weyl_quadratic_hermite(q, truncation, (1.0, concentration))
    e_full = full.lowest_eigenvalue()
    energies = []
    for s in slices:
        h = weyl_quadratic_hermite(slice_symbol(q, s), slice_truncation)
        energies.append(h.lowest_eigenvalue())
    return PartialMinReport(e_full, tuple(float(s) for s in slices), tuple(energies), tol)
