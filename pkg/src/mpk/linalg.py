"""Small dense matrix kernels written with Jacobi rotations.

Everything here works on real square matrices of modest size (n <= 16 in
practice). The routines are deliberately self-contained so that the
symplectic code does not depend on LAPACK for its rank decisions; numpy is
used only as an array container.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NotPositiveSemidefinite, NotSymmetric, UnsupportedIndex

SYM_TOL = 1e-12
CLAMP = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class PolarPair:
    """``T = unitary @ absolute`` with ``absolute`` symmetric positive semidefinite."""

    unitary: np.ndarray
    absolute: np.ndarray


def _as_square(T):
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {T.shape}")
    return T


def check_symmetric(S, rtol=SYM_TOL):
    S = _as_square(S)
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > rtol * max(scale, 1e-300):
        raise NotSymmetric(f"asymmetry {np.max(np.abs(S - S.T)):.3e} exceeds {rtol:g} * {scale:.3e}")
    return S


def sym_eig(S, rtol=SYM_TOL):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(w, V)`` with ``w`` ascending and ``S @ V = V @ diag(w)``.
    """
    S = check_symmetric(S, rtol)
    n = S.shape[0]
    A = 0.5 * (S + S.T)
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if n < 2 or scale == 0.0:
        return np.diag(A).copy(), V
    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= 1e-18 * scale:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise ConvergenceFailure(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _complete_basis(Q, n):
    """Extend the orthonormal columns of ``Q`` to a basis of R^n.

    New vectors come from Gram-Schmidt on e_1, ..., e_n in index order, so the
    completion is reproducible.
    """
    cols = [Q[:, j] for j in range(Q.shape[1])]
    extra = []
    for i in range(n):
        if len(cols) + len(extra) == n:
            break
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for u in cols + extra:
                v = v - (u @ v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            extra.append(v / nv)
    if extra:
        return np.column_stack(extra)
    return np.zeros((n, 0))


def svd(T):
    """Singular value decomposition ``T = U @ diag(s) @ V.T`` (one-sided Jacobi).

    Singular values are returned in descending order; those below
    ``CLAMP * s.max()`` are set to exactly zero and their left singular
    vectors are filled in deterministically.
    """
    T = _as_square(T)
    n = T.shape[0]
    # work with entries of order one so the rotation formulas neither overflow nor underflow
    scale = np.max(np.abs(T)) if T.size else 0.0
    if scale == 0.0:
        return np.eye(n), np.zeros(n), np.eye(n)
    A = T / scale
    V = np.eye(n)
    negligible = (1e-16 * np.linalg.norm(A)) ** 2
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap, aq = A[:, p], A[:, q]
                alpha = ap @ ap
                beta = aq @ aq
                gamma = ap @ aq
                if min(alpha, beta) <= negligible or abs(gamma) <= 1e-15 * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta == 0:
                    t = 1.0
                elif abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                A[:, p], A[:, q] = c * ap - s * aq, s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    else:
        raise ConvergenceFailure(f"one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")
    s = np.linalg.norm(A, axis=0) * scale
    order = np.argsort(-s, kind="stable")
    s, A, V = s[order], A[:, order], V[:, order]
    smax = s[0] if n else 0.0
    keep = s > CLAMP * smax if smax > 0 else np.zeros(n, dtype=bool)
    s = np.where(keep, s, 0.0)
    r = int(np.count_nonzero(keep))
    U = np.zeros((n, n))
    U[:, :r] = A[:, :r] * scale / s[:r]
    U[:, r:] = _complete_basis(U[:, :r], n)
    return U, s, V


def numerical_rank(T, rtol=CLAMP):
    _, s, _ = svd(T)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def rcond(T):
    """Ratio of smallest to largest singular value (0 for the zero matrix)."""
    _, s, _ = svd(T)
    return 0.0 if s[0] == 0.0 else float(s[-1] / s[0])


def abs_op(T):
    """Operator absolute value ``|T| = (T^T T)^(1/2)``."""
    _, s, V = svd(T)
    R = (V * s) @ V.T
    return 0.5 * (R + R.T)


def polar_unitary(T):
    """Polar decomposition ``T = W |T|`` with ``W`` orthogonal.

    For rank-deficient ``T`` the kernel (ordered Gram-Schmidt completion of the
    row space) is sent to the cokernel (same construction on the column space).
    """
    T = _as_square(T)
    n = T.shape[0]
    U, s, V = svd(T)
    r = int(np.count_nonzero(s))
    W = U[:, :r] @ V[:, :r].T
    if r < n:
        kernel = _complete_basis(V[:, :r], n)
        cokernel = _complete_basis(U[:, :r], n)
        W = W + cokernel @ kernel.T
    absolute = (V * s) @ V.T
    return PolarPair(W, 0.5 * (absolute + absolute.T))


def schatten_norm(T, p=1):
    """Schatten norm of index ``p`` in {1, 2, inf}."""
    _, s, _ = svd(T)
    if p == 1:
        return float(np.sum(s))
    if p == 2:
        return float(np.sqrt(np.sum(s * s)))
    if p == np.inf or p == "inf":
        return float(s[0]) if s.size else 0.0
    raise UnsupportedIndex(f"Schatten index {p!r} not supported (use 1, 2 or inf)")


def sqrt_psd(S, rtol=1e-8):
    """Symmetric square root of a positive semidefinite matrix."""
    w, V = sym_eig(S)
    scale = np.max(np.abs(S)) if np.size(S) else 0.0
    if w.size and w[0] < -rtol * scale:
        raise NotPositiveSemidefinite(f"eigenvalue {w[0]:.3e} below -{rtol:g} * {scale:.3e}")
    R = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    return 0.5 * (R + R.T)
