"""Closed-form calculus for centered Gaussians ``u(x) = c e^{i pi <Theta x, x>}``.

Square integrability needs ``Im Theta`` positive definite. All metaplectic
generators map such states to states of the same form, so norms, variances
and the action of a whole word are available exactly. Purely real ``Theta``
(a chirp) is accepted as a boundary case, which is what the Fourier transform
of a chirp produces.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from . import symplectic as sp
from .errors import NotSquareIntegrable, SingularTheta
from .metaplectic import Chirp, Dilation, FreeFactor, FreqChirp, MetaplecticWord, NormalizedFourier


@dataclass(frozen=True, eq=False)
class GaussianState:
    c: complex
    theta: np.ndarray

    def __post_init__(self):
        theta = np.atleast_2d(np.asarray(self.theta, dtype=complex))
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise ValueError("theta must be a square matrix")
        scale = max(1.0, np.max(np.abs(theta)))
        if np.max(np.abs(theta - theta.T)) > 1e-10 * scale:
            raise ValueError("theta must be symmetric")
        theta = 0.5 * (theta + theta.T)
        im = theta.imag
        w = np.linalg.eigvalsh(0.5 * (im + im.T))
        if w[0] < -1e-12 * scale:
            raise NotSquareIntegrable("Im theta has a negative eigenvalue")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "_min_im", float(w[0]))

    @property
    def n(self):
        return self.theta.shape[0]

    @property
    def square_integrable(self):
        return self._min_im > 1e-12

    def __call__(self, x):
        """Evaluate at points ``x`` of shape (..., n) (or (...,) when n == 1)."""
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        quad = np.einsum("...i,ij,...j->...", x, self.theta, x)
        return self.c * np.exp(1j * np.pi * quad)

    def scaled(self, z):
        return GaussianState(self.c * z, self.theta)


@dataclass(frozen=True)
class SignatureData:
    sig: int
    index: int


def signature(B):
    """Signature and negative index of a real symmetric invertible matrix."""
    w, _ = linalg.sym_eig(np.atleast_2d(np.asarray(B, dtype=float)))
    scale = max(np.max(np.abs(w)), 1e-300)
    if np.min(np.abs(w)) <= 1e-12 * scale:
        raise SingularTheta("matrix is singular")
    index = int(np.count_nonzero(w < 0))
    return SignatureData(len(w) - 2 * index, index)


def standard_gaussian(n):
    """``g0 = 2^{n/4} e^{-pi |x|^2}``, unit norm."""
    return GaussianState(2 ** (n / 4), 1j * np.eye(n))


def det_inv_sqrt(Z):
    """``det(Z)^{-1/2}`` continued from positive definite matrices.

    Valid when every eigenvalue of ``Z`` has nonnegative real part and none
    vanishes; the branch is the product of principal square roots of the
    eigenvalues, which is continuous on that set.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    lam = np.linalg.eigvals(Z)
    if np.min(np.abs(lam)) <= 1e-14 * max(1.0, np.max(np.abs(lam))):
        raise SingularTheta("matrix is singular")
    if np.min(lam.real) < -1e-9 * np.max(np.abs(lam)):
        raise ValueError("spectrum leaves the closed right half-plane")
    branch = np.prod(np.sqrt(lam))
    root = np.sqrt(np.linalg.det(Z))
    if abs(root - branch) > abs(root + branch):
        root = -root
    return 1.0 / root


def gaussian_norm_sq(g):
    if not g.square_integrable:
        raise NotSquareIntegrable("Im theta is not positive definite")
    return float(abs(g.c) ** 2 / np.sqrt(np.linalg.det(2 * g.theta.imag)))


def gaussian_variance(g):
    """``int |x|^2 |u(x)|^2 dx = ||u||^2 tr((Im Theta)^-1) / (4 pi)``."""
    norm_sq = gaussian_norm_sq(g)
    return float(norm_sq * np.trace(np.linalg.inv(g.theta.imag)) / (4 * np.pi))


def pairing(u, v):
    """``<u, v> = int u conj(v)``."""
    if u.n != v.n:
        raise ValueError("dimension mismatch")
    return complex(u.c * np.conj(v.c) * det_inv_sqrt(-1j * (u.theta - np.conj(v.theta))))


def _check_invertible(theta):
    if np.linalg.cond(theta) > 1e12:
        raise SingularTheta("theta is not invertible")


def fourier_gaussian(g):
    """Fourier transform ``int e^{-2 i pi x.xi} u(x) dx`` of a Gaussian.

    Amplitude ``c det(-i Theta)^{-1/2}``, matrix ``-Theta^-1``. For real
    ``Theta = B`` the amplitude is ``|det B|^{-1/2} e^{i pi sig(B)/4} c``.
    """
    _check_invertible(g.theta)
    factor = det_inv_sqrt(-1j * g.theta)
    return GaussianState(g.c * factor, -np.linalg.inv(g.theta))


def chirp_fourier_prefactor(B):
    """``|det B|^{-1/2} e^{i pi sig(B) / 4}``: Fourier amplitude of the chirp ``e^{i pi <Bx,x>}``."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    s = signature(B)
    return abs(np.linalg.det(B)) ** -0.5 * np.exp(1j * np.pi * s.sig / 4)


def inverse_fourier_gaussian(g):
    # centered Gaussians are even, so the inverse transform has the same formula
    return fourier_gaussian(g)


def apply_elementary(e, g):
    n = g.n
    if e.n != n:
        raise ValueError("dimension mismatch")
    if isinstance(e, Chirp):
        return GaussianState(g.c * 1j ** e.m, g.theta + e.A)
    if isinstance(e, Dilation):
        amp = 1j ** e.m * np.sqrt(abs(np.linalg.det(e.B)))
        return GaussianState(g.c * amp, e.B.T @ g.theta @ e.B)
    if isinstance(e, FreqChirp):
        h = fourier_gaussian(g)
        h = GaussianState(h.c * 1j ** e.m, h.theta + e.C)
        return inverse_fourier_gaussian(h)
    if isinstance(e, NormalizedFourier):
        h = fourier_gaussian(g)
        return h.scaled(np.exp(-1j * np.pi * n / 4))
    raise TypeError(f"not an elementary factor: {e!r}")


def apply_free_factor(f, g):
    """``Theta' = P - L^T (Q + Theta)^-1 L``; amplitude picks up the kernel prefactor
    and ``det(-i(Q + Theta))^{-1/2}``."""
    n = g.n
    if f.n != n:
        raise ValueError("dimension mismatch")
    M = f.Q + g.theta
    _check_invertible(M)
    amp = (np.exp(-1j * np.pi * n / 4) * 1j ** f.m * np.sqrt(abs(np.linalg.det(f.L)))
           * det_inv_sqrt(-1j * M))
    return GaussianState(g.c * amp, f.P - f.L.T @ np.linalg.solve(M, f.L))


def apply_factor(f, g):
    if isinstance(f, FreeFactor):
        return apply_free_factor(f, g)
    return apply_elementary(f, g)


def apply_word(w, g):
    for f in reversed(w.factors):
        g = apply_factor(f, g)
    return g.scaled(w.scalar_phase) if w.scalar_phase != 1 else g


def _as_word(op):
    if isinstance(op, MetaplecticWord):
        return op
    return MetaplecticWord([op])


def variance_product(op, g):
    """``V(op g) V(g)`` for a word or single generator ``op``."""
    return gaussian_variance(apply_word(_as_word(op), g)) * gaussian_variance(g)


@dataclass(frozen=True, eq=False)
class FamilyPoint:
    state: GaussianState
    product: float
    limit: float

    @property
    def sqrt_product(self):
        return float(np.sqrt(self.product))

    @property
    def gap(self):
        return self.sqrt_product - self.limit


def _adapted_metric(L):
    """``B^2`` with ``B = |Xi12|^{-1/2}``, ``Xi12 = L^-1``, rescaled to unit determinant."""
    n = L.shape[0]
    B = linalg.sqrt_psd(np.linalg.inv(linalg.abs_op(np.linalg.inv(L))))
    K = B @ B
    return K / np.linalg.det(K) ** (1.0 / n)


def optimizer_family(f, t, chirped=False):
    """Unit-norm Gaussian ``w_t`` with ``Theta = i t K`` and ``V(f w_t) V(w_t)``.

    ``K`` is the metric aligned with the singular vectors of ``Xi12 = L^-1``
    (identity in one dimension, so ``w_t = (2t)^{1/4} e^{-pi t x^2}``).
    The product tends to ``mu^2`` as ``t`` grows. With ``chirped=True`` the
    state also carries ``e^{-i pi <Qx,x>}``, which removes the ``Q`` dependence.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    n = f.n
    K = _adapted_metric(f.L)
    theta = 1j * t * K
    if chirped:
        theta = theta - f.Q
    w = GaussianState(np.linalg.det(2 * t * K) ** 0.25, theta)
    mu = sp.mu_of_symplectic(sp.make_lambda_plq(f.data))
    return FamilyPoint(w, variance_product(f, w), mu)


def adapted_gaussian(xi, eps):
    """Unit-norm Gaussian whose variance product under ``xi`` tends to ``mu(xi)^2`` as ``eps -> 0``.

    With ``xi12 = U diag(s) V^T`` of rank r: the metric is ``1/s_i`` on the
    right singular directions with ``s_i > 0`` and ``1/eps`` on the kernel
    (concentration), and the chirp cancels ``xi11`` on the range directions.
    Works for singular and invertible ``xi12`` alike.
    """
    xi = sp.as_symplectic(xi)
    n = xi.n
    U, s, V = linalg.svd(xi.xi12)
    r = int(np.count_nonzero(s > sp.INVERTIBLE_RTOL * s[0])) if s[0] > 0 else 0
    k = np.full(n, 1.0 / eps)
    k[:r] = 1.0 / s[:r]
    K = (V * k) @ V.T
    A = np.zeros((n, n))
    if r:
        Ur, Vr = U[:, :r], V[:, :r]
        inner = -(Ur.T @ xi.xi11 @ Vr) / s[:r, None]
        inner = 0.5 * (inner + inner.T)
        A = Vr @ inner @ Vr.T
    K = 0.5 * (K + K.T)
    return GaussianState(np.linalg.det(2 * K) ** 0.25, A + 1j * K)
