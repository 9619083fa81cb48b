"""Real symplectic matrices: checks, generators, free and ABC factorizations.

Block convention: a 2n x 2n matrix ``xi`` is split as ``[[xi11, xi12], [xi21, xi22]]``
and acts on phase-space vectors ``x (+) xi``. The standard symplectic form is
``sigma = [[0, I], [-I, 0]]``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    FactorizationFailure,
    NotSymplectic,
    OddDimension,
    SingularB,
    SingularBlock11,
    SingularBlock12,
    SingularL,
)

SYMPLECTIC_TOL = 1e-9
INVERTIBLE_RTOL = 1e-10
# accept a shift in factor_two_free straight away once the block is this well conditioned
SHIFT_GOOD_RCOND = 1e-6
SHIFT_SCAN = [s * k for k in range(1, 9) for s in (1, -1)]
SHIFT_RANDOM_DRAWS = 8


def standard_form(n):
    """The matrix ``sigma`` of the symplectic form on R^n x R^n."""
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def _sym(M, name, tol=1e-10):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, np.max(np.abs(M), initial=0.0))
    if np.max(np.abs(M - M.T), initial=0.0) > tol * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


def _square(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def is_invertible(M, rtol=INVERTIBLE_RTOL):
    # a conditioning gate only, so LAPACK singular values are enough here
    s = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    return s[0] > 0 and s[-1] > rtol * s[0]


@dataclass(frozen=True)
class SymplecticCheck:
    ok: bool
    residual: float
    det: float
    tol: float

    def __bool__(self):
        return self.ok


def is_symplectic(M, tol=SYMPLECTIC_TOL):
    """Check ``M^T sigma M = sigma`` in max norm; also reports ``det M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise OddDimension(f"dimension {M.shape[0]} is odd")
    J = standard_form(M.shape[0] // 2)
    residual = float(np.max(np.abs(M.T @ J @ M - J), initial=0.0))
    return SymplecticCheck(residual <= tol, residual, float(np.linalg.det(M)), tol)


class SymplecticMatrix:
    """A validated element of Sp(2n, R)."""

    __slots__ = ("_m",)

    def __init__(self, matrix, tol=SYMPLECTIC_TOL, check=True):
        m = np.array(matrix, dtype=float)
        if check:
            report = is_symplectic(m, tol)
            if not report.ok:
                raise NotSymplectic(f"residual {report.residual:.3e} exceeds {tol:g}")
        elif m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise OddDimension(f"bad shape {m.shape}")
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_blocks(cls, b11, b12, b21, b22, **kw):
        return cls(np.block([[_square(b11, "11"), _square(b12, "12")],
                             [_square(b21, "21"), _square(b22, "22")]]), **kw)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(2 * n), check=False)

    @property
    def matrix(self):
        return self._m

    @property
    def n(self):
        return self._m.shape[0] // 2

    @property
    def xi11(self):
        return self._m[: self.n, : self.n]

    @property
    def xi12(self):
        return self._m[: self.n, self.n:]

    @property
    def xi21(self):
        return self._m[self.n:, : self.n]

    @property
    def xi22(self):
        return self._m[self.n:, self.n:]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __matmul__(self, other):
        other = other.matrix if isinstance(other, SymplecticMatrix) else np.asarray(other)
        product = self._m @ other
        if product.shape == self._m.shape:
            return SymplecticMatrix(product, check=False)
        return product

    def inverse(self):
        return symplectic_inverse(self)

    def __repr__(self):
        return f"SymplecticMatrix(n={self.n}, matrix={self._m.tolist()})"


def as_symplectic(xi, tol=SYMPLECTIC_TOL):
    return xi if isinstance(xi, SymplecticMatrix) else SymplecticMatrix(xi, tol=tol)


@dataclass(frozen=True, eq=False)
class FreeFormData:
    """Data ``(P, L, Q)`` of a free symplectic matrix ``Lambda_{P,L,Q}``."""

    P: np.ndarray
    L: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        P = _sym(self.P, "P")
        Q = _sym(self.Q, "Q")
        L = _square(self.L, "L")
        if not (P.shape == L.shape == Q.shape):
            raise ValueError("P, L, Q must share a shape")
        if abs(np.linalg.det(L)) <= 1e-12:
            raise SingularL("L is singular")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self):
        return self.L.shape[0]


@dataclass(frozen=True, eq=False)
class ABCFormData:
    """Data ``(A, B, C)`` of ``Xi_{A,B,C}``, the map generated by
    ``S(x, eta) = (<Ax,x> + 2<Bx,eta> + <C eta,eta>) / 2``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _sym(self.A, "A")
        C = _sym(self.C, "C")
        B = _square(self.B, "B")
        if not (A.shape == B.shape == C.shape):
            raise ValueError("A, B, C must share a shape")
        if abs(np.linalg.det(B)) <= 1e-12:
            raise SingularB("B is singular")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.B.shape[0]


def symplectic_inverse(xi):
    xi = as_symplectic(xi)
    return SymplecticMatrix.from_blocks(xi.xi22.T, -xi.xi12.T, -xi.xi21.T, xi.xi11.T, check=False)


def lower_shear(A):
    """``[[I, 0], [A, I]]`` for symmetric ``A``."""
    A = _sym(A, "A")
    n = A.shape[0]
    return SymplecticMatrix.from_blocks(np.eye(n), np.zeros((n, n)), A, np.eye(n), check=False)


def upper_shear(C):
    """``[[I, -C], [0, I]]`` for symmetric ``C``."""
    C = _sym(C, "C")
    n = C.shape[0]
    return SymplecticMatrix.from_blocks(np.eye(n), -C, np.zeros((n, n)), np.eye(n), check=False)


def block_dilation(B):
    """``[[B^-1, 0], [0, B^T]]`` for invertible ``B``."""
    B = _square(B, "B")
    n = B.shape[0]
    if not is_invertible(B):
        raise SingularB("B is singular")
    return SymplecticMatrix.from_blocks(np.linalg.inv(B), np.zeros((n, n)), np.zeros((n, n)), B.T, check=False)


def make_xi_abc(d):
    """``Xi_{A,B,C} = [[B^-1, -B^-1 C], [A B^-1, B^T - A B^-1 C]]``."""
    if not is_invertible(d.B):
        raise SingularB("B is singular")
    Bi = np.linalg.inv(d.B)
    return SymplecticMatrix.from_blocks(Bi, -Bi @ d.C, d.A @ Bi, d.B.T - d.A @ Bi @ d.C, check=False)


def make_lambda_plq(d):
    """``Lambda_{P,L,Q} = [[L^-1 Q, L^-1], [P L^-1 Q - L^T, P L^-1]]``."""
    if not is_invertible(d.L):
        raise SingularL("L is singular")
    Li = np.linalg.inv(d.L)
    return SymplecticMatrix.from_blocks(Li @ d.Q, Li, d.P @ Li @ d.Q - d.L.T, d.P @ Li, check=False)


def factor_free(xi):
    """Free-form data of ``xi``; requires ``xi12`` invertible."""
    xi = as_symplectic(xi)
    if not is_invertible(xi.xi12):
        raise SingularBlock12("upper-right block is singular; try the two-free factorization")
    X12i = np.linalg.inv(xi.xi12)
    P = xi.xi22 @ X12i
    Q = X12i @ xi.xi11
    return FreeFormData(0.5 * (P + P.T), X12i, 0.5 * (Q + Q.T))


def factor_abc(xi):
    """ABC data of ``xi``; requires ``xi11`` invertible."""
    xi = as_symplectic(xi)
    if not is_invertible(xi.xi11):
        raise SingularBlock11("upper-left block is singular")
    B = np.linalg.inv(xi.xi11)
    A = xi.xi21 @ B
    C = -B @ xi.xi12
    return ABCFormData(0.5 * (A + A.T), B, 0.5 * (C + C.T))


def shift_data(n, t):
    """Free-form data ``(0, I, tI)`` of the auxiliary factor used by the two-free scan."""
    return FreeFormData(np.zeros((n, n)), np.eye(n), t * np.eye(n))


def factor_two_free(xi, seed=0):
    """Write ``xi = Lambda_{f1} @ Lambda_{f2}`` with both factors free.

    The second factor is ``Lambda_{0,I,tI}``; the shift ``t`` is scanned over
    +-1, ..., +-8 and then a few seeded random values in [-10, 10]. The first
    value making ``xi @ Lambda_t^-1`` well conditioned in its upper-right block
    is taken; otherwise the best admissible one.
    """
    xi = as_symplectic(xi)
    n = xi.n
    rng = np.random.default_rng(seed)
    candidates = list(SHIFT_SCAN) + list(rng.uniform(-10.0, 10.0, SHIFT_RANDOM_DRAWS))
    best = None
    for t in candidates:
        f2 = shift_data(n, t)
        rest = xi.matrix @ symplectic_inverse(make_lambda_plq(f2)).matrix
        quality = linalg.rcond(rest[:n, n:])
        if best is None or quality > best[0]:
            best = (quality, t, rest, f2)
        if quality >= SHIFT_GOOD_RCOND:
            break
    quality, t, rest, f2 = best
    if quality <= INVERTIBLE_RTOL:
        raise FactorizationFailure("no admissible shift parameter found")
    f1 = factor_free(SymplecticMatrix(rest, check=False))
    return f1, f2


@dataclass(frozen=True)
class MuReport:
    mu: float
    singular_values: tuple
    trace_norm: float


def mu_report(xi):
    xi = as_symplectic(xi)
    _, s, _ = linalg.svd(xi.xi12)
    trace_norm = float(np.sum(s))
    return MuReport(trace_norm / (4 * np.pi), tuple(float(v) for v in s), trace_norm)


def mu_of_symplectic(xi):
    """Uncertainty constant ``||xi12||_{S^1} / (4 pi)``."""
    return mu_report(xi).mu


def rank_one_blocks():
    """A 4x4 symplectic matrix whose four blocks all have rank one."""
    return SymplecticMatrix([[0, 0, 1, 0],
                             [0, 1, 0, 0],
                             [-1, 0, 0, 0],
                             [0, 0, 0, 1]])


def random_symplectic(n, rng, scale=0.4, depth=2):
    """Product of random lower/upper shears and dilations (moderate entries)."""
    M = np.eye(2 * n)
    for _ in range(depth):
        A = rng.normal(scale=scale / 2, size=(n, n))
        C = rng.normal(scale=scale / 2, size=(n, n))
        B = np.eye(n) + rng.normal(scale=scale / 2, size=(n, n))
        while not is_invertible(B, 1e-3):
            B = np.eye(n) + rng.normal(scale=scale / 2, size=(n, n))
        M = M @ lower_shear(A + A.T).matrix @ block_dilation(B).matrix @ upper_shear(C + C.T).matrix
    return SymplecticMatrix(M)
