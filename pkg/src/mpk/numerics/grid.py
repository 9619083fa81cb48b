"""Uniform grids on [-L, L)^n and the operators that act on sampled functions.

Samples may carry leading batch axes; every routine acts on the trailing
``n`` axes so whole families of test functions can be pushed through a word
at once.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import AliasingRisk, GridMismatch, ResamplingRequired
from ..metaplectic import Chirp, Dilation, FreeFactor, FreqChirp, MetaplecticWord, NormalizedFourier

GUARD_BAND = 0.05
GUARD_REL = 1e-10


@dataclass(frozen=True, eq=False)
class GridFunction:
    samples: np.ndarray
    half_width: float
    n: int = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        n = s.ndim if self.n is None else int(self.n)
        if n not in (1, 2) or s.ndim < n:
            raise GridMismatch(f"unsupported grid dimension {n} for samples of shape {s.shape}")
        shape = s.shape[s.ndim - n:]
        N = shape[0]
        if any(k != N for k in shape) or N < 4 or N & (N - 1):
            raise GridMismatch(f"grid axes must share a power-of-two length, got {shape}")
        if self.half_width <= 0:
            raise GridMismatch("half width must be positive")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "half_width", float(self.half_width))

    @classmethod
    def sample(cls, func, n, N, half_width):
        """Sample ``func`` (called with n coordinate arrays) on the grid."""
        x = axis_points(N, half_width)
        if n == 1:
            return cls(func(x), half_width, 1)
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        return cls(func(X1, X2), half_width, 2)

    @property
    def N(self):
        return self.samples.shape[-1]

    @property
    def spacing(self):
        return 2 * self.half_width / self.N

    @property
    def axis(self):
        return axis_points(self.N, self.half_width)

    @property
    def batch_shape(self):
        return self.samples.shape[: self.samples.ndim - self.n]

    def coords(self):
        x = self.axis
        if self.n == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def radius_sq(self):
        return sum(c ** 2 for c in self.coords())

    def norm_sq(self):
        return np.sum(np.abs(self.samples) ** 2, axis=self._axes) * self.spacing ** self.n

    def inner(self, other):
        _same_grid(self, other)
        return np.sum(self.samples * np.conj(other.samples), axis=self._axes) * self.spacing ** self.n

    def normalized(self):
        nrm = np.sqrt(self.norm_sq())
        return self.with_samples(self.samples / np.reshape(nrm, self.batch_shape + (1,) * self.n))

    def with_samples(self, samples, half_width=None):
        return GridFunction(samples, self.half_width if half_width is None else half_width, self.n)

    @property
    def _axes(self):
        return tuple(range(-self.n, 0))

    def check_guard(self, rel=GUARD_REL, band=GUARD_BAND):
        """Raise AliasingRisk unless the outer band of every axis is negligible."""
        mag = np.abs(self.samples)
        peak = np.max(mag, axis=self._axes, keepdims=True)
        k = max(1, int(np.ceil(band * self.N)))
        worst = 0.0
        for ax in self._axes:
            edge = np.concatenate([np.take(mag, np.arange(k), axis=ax),
                                   np.take(mag, np.arange(self.N - k, self.N), axis=ax)], axis=ax)
            edge_peak = np.max(edge, axis=self._axes, keepdims=True)
            ratio = np.max(np.where(peak > 0, edge_peak / np.where(peak > 0, peak, 1), 0.0))
            worst = max(worst, float(ratio))
        if worst > rel:
            raise AliasingRisk(f"guard band holds {worst:.3e} of the peak (limit {rel:g})")
        return worst


def axis_points(N, half_width):
    return -half_width + (2 * half_width / N) * np.arange(N)


def dual_half_width(N, half_width):
    """Half width of the frequency grid: ``N / (4 L)``."""
    return N / (4 * half_width)


def _same_grid(u, v):
    if u.n != v.n or u.N != v.N or abs(u.half_width - v.half_width) > 1e-12 * u.half_width:
        raise GridMismatch("functions live on different grids")


def grid_fourier(u, inverse=False):
    """Riemann-sum Fourier transform ``int e^{-2 i pi x.xi} u(x) dx`` (or its inverse).

    The result lives on the dual grid of spacing ``1/(N h)`` spanning
    ``[-N/(4L), N/(4L))``; the map is unitary for the discrete L2 norms.
    """
    axes = u._axes
    h = u.spacing
    s = np.fft.ifftshift(u.samples, axes=axes)
    if inverse:
        s = np.fft.ifftn(s, axes=axes) * (u.N * h) ** u.n
    else:
        s = np.fft.fftn(s, axes=axes) * h ** u.n
    return u.with_samples(np.fft.fftshift(s, axes=axes), dual_half_width(u.N, u.half_width))


def _quadratic_form(M, coords):
    M = np.atleast_2d(M)
    n = len(coords)
    return sum(M[i, j] * coords[i] * coords[j] for i in range(n) for j in range(n))


@dataclass(frozen=True)
class PhaseSymmetry:
    """``u(y) -> u(2x - y) e^{-4 i pi (x - y).xi}`` about the phase-space point ``(x, xi)``."""

    x: tuple
    xi: tuple


@dataclass(frozen=True)
class PhaseTranslation:
    """``u(x) -> u(x - y) e^{2 i pi (x - y/2).eta}``."""

    y: tuple
    eta: tuple


def _lattice_steps(values, h, what):
    steps = np.asarray(values, dtype=float) / h
    rounded = np.rint(steps)
    if np.max(np.abs(steps - rounded), initial=0.0) > 1e-9:
        raise ResamplingRequired(f"{what} is not a multiple of the grid spacing")
    return rounded.astype(int)


def _shift_axis(a, k, axis):
    """``out[j] = a[j - k]`` with zeros shifted in."""
    out = np.zeros_like(a)
    N = a.shape[axis]
    if abs(k) >= N:
        return out
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if k >= 0:
        src[axis], dst[axis] = slice(0, N - k), slice(k, N)
    else:
        src[axis], dst[axis] = slice(-k, N), slice(0, N + k)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _reflect_axis(a, axis, offset=0):
    """``out[j] = a[N + offset - j]`` with zeros outside the grid (reflection about x = offset*h/2)."""
    N = a.shape[axis]
    idx = N + offset - np.arange(N)
    valid = (idx >= 0) & (idx < N)
    out = np.take(a, np.clip(idx, 0, N - 1), axis=axis)
    shape = [1] * a.ndim
    shape[axis] = N
    return out * valid.reshape(shape)


def _signed_permutation(B):
    B = np.atleast_2d(B)
    n = B.shape[0]
    if not np.allclose(np.abs(B), np.rint(np.abs(B)), atol=1e-12) or not np.all(
            np.isin(np.rint(B), (-1, 0, 1))):
        return None
    R = np.rint(B).astype(int)
    if not (np.all(np.sum(np.abs(R), axis=0) == 1) and np.all(np.sum(np.abs(R), axis=1) == 1)):
        return None
    perm = [int(np.nonzero(R[i])[0][0]) for i in range(n)]
    signs = [int(R[i, perm[i]]) for i in range(n)]
    return perm, signs


def apply_elementary_grid(e, u, check=True):
    """Apply a generator, phase symmetry or phase translation to sampled functions.

    With ``check`` the frequency-side samples of Fourier-based generators must
    also pass the guard band test.
    """
    if isinstance(e, Chirp):
        return u.with_samples(u.samples * (1j ** e.m * np.exp(1j * np.pi * _quadratic_form(e.A, u.coords()))))
    if isinstance(e, FreqChirp):
        U = grid_fourier(u)
        if check:
            U.check_guard()
        U = U.with_samples(U.samples * (1j ** e.m * np.exp(1j * np.pi * _quadratic_form(e.C, U.coords()))))
        return grid_fourier(U, inverse=True)
    if isinstance(e, NormalizedFourier):
        U = grid_fourier(u)
        if check:
            U.check_guard()
        return U.with_samples(U.samples * np.exp(-1j * np.pi * u.n / 4))
    if isinstance(e, Dilation):
        ps = _signed_permutation(e.B)
        if ps is None:
            raise ResamplingRequired("dilation does not map the grid to itself; use a free factor")
        perm, signs = ps
        s = u.samples
        if u.n == 2 and perm == [1, 0]:
            s = np.swapaxes(s, -1, -2)
        for i, sign in enumerate(signs):
            if sign < 0:
                s = _reflect_axis(s, s.ndim - u.n + i)
        return u.with_samples(s * 1j ** e.m)
    if isinstance(e, PhaseSymmetry):
        h = u.spacing
        steps = _lattice_steps(2 * np.atleast_1d(e.x), h, "2x")
        s = u.samples
        for i, k in enumerate(steps):
            s = _reflect_axis(s, s.ndim - u.n + i, int(k))
        coords = u.coords()
        x, xi = np.atleast_1d(e.x), np.atleast_1d(e.xi)
        phase = sum((x[i] - coords[i]) * xi[i] for i in range(u.n))
        return u.with_samples(s * np.exp(-4j * np.pi * phase))
    if isinstance(e, PhaseTranslation):
        h = u.spacing
        steps = _lattice_steps(np.atleast_1d(e.y), h, "translation")
        s = u.samples
        for i, k in enumerate(steps):
            s = _shift_axis(s, int(k), s.ndim - u.n + i)
        coords = u.coords()
        y, eta = np.atleast_1d(e.y), np.atleast_1d(e.eta)
        phase = sum((coords[i] - y[i] / 2) * eta[i] for i in range(u.n))
        return u.with_samples(s * np.exp(2j * np.pi * phase))
    raise TypeError(f"cannot apply {e!r} on a grid")


def _nonuniform_fourier(v, y, points, h):
    """``sum_y h^n e^{-2 i pi <p, y>} v(y)`` at arbitrary frequency points ``p`` (shape (M, n))."""
    n = points.shape[1]
    if n == 1:
        E = np.exp(-2j * np.pi * np.outer(points[:, 0], y))
        return (v @ E.T) * h
    E1 = np.exp(-2j * np.pi * np.outer(points[:, 0], y))
    E2 = np.exp(-2j * np.pi * np.outer(points[:, 1], y))
    W = v @ E2.T
    return np.einsum("ka,...ak->...k", E1, W) * h * h


def apply_free_factor_grid(f, u, out_half_width=None, out_N=None):
    """Apply a free factor by direct quadrature of its kernel (trapezoid weights)."""
    if f.n != u.n:
        raise GridMismatch("factor and grid dimensions differ")
    u.check_guard()
    N = u.N if out_N is None else out_N
    Lo = u.half_width if out_half_width is None else out_half_width
    y = u.axis
    coords_in = u.coords()
    v = u.samples * np.exp(1j * np.pi * _quadratic_form(f.Q, coords_in))
    x = axis_points(N, Lo)
    if u.n == 1:
        xs = x[:, None]
    else:
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        xs = np.column_stack([X1.ravel(), X2.ravel()])
    freqs = xs @ f.L.T
    vals = _nonuniform_fourier(v, y, freqs, u.spacing)
    vals = vals.reshape(u.batch_shape + (N,) * u.n)
    pref = np.exp(-1j * np.pi * u.n / 4) * 1j ** f.m * np.sqrt(abs(np.linalg.det(f.L)))
    coords_out = (x,) if u.n == 1 else tuple(np.meshgrid(x, x, indexing="ij"))
    out = GridFunction(pref * np.exp(1j * np.pi * _quadratic_form(f.P, coords_out)) * vals, Lo, u.n)
    out.check_guard()
    return out


def apply_factor_grid(f, u, check=True):
    if isinstance(f, FreeFactor):
        return apply_free_factor_grid(f, u)
    return apply_elementary_grid(f, u, check)


def apply_word_grid(w, u, check=True):
    if not isinstance(w, MetaplecticWord):
        w = MetaplecticWord([w])
    if check:
        u.check_guard()
    for f in reversed(w.factors):
        u = apply_factor_grid(f, u, check)
        if check:
            u.check_guard()
    if w.scalar_phase != 1:
        u = u.with_samples(u.samples * w.scalar_phase)
    return u


def variance_grid(u, check=True):
    """Riemann sum of ``|x|^2 |u(x)|^2``."""
    if check:
        u.check_guard()
    return np.sum(u.radius_sq() * np.abs(u.samples) ** 2, axis=u._axes) * u.spacing ** u.n


@dataclass(frozen=True, eq=False)
class WignerGrid:
    x: np.ndarray
    xi: np.ndarray
    values: np.ndarray

    def norm(self):
        dx = self.x[1] - self.x[0]
        dxi = self.xi[1] - self.xi[0]
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * dx * dxi))

    def integral(self):
        dx = self.x[1] - self.x[0]
        dxi = self.xi[1] - self.xi[0]
        return complex(np.sum(self.values) * dx * dxi)


def wigner_grid(u, v=None):
    """Cross-Wigner distribution ``int e^{-2 i pi z xi} u(x + z/2) conj(v(x - z/2)) dz`` (n = 1).

    The lag ``z`` runs over ``2h`` multiples so both arguments stay on the grid;
    the frequency axis has spacing ``1/(2 N h)``.
    """
    v = u if v is None else v
    _same_grid(u, v)
    if u.n != 1 or u.samples.ndim != 1:
        raise GridMismatch("wigner_grid handles a single one-dimensional function")
    N, h = u.N, u.spacing
    j = np.arange(N)[:, None]
    k = np.arange(-N // 2, N // 2)[None, :]
    a, b = j + k, j - k
    valid = (a >= 0) & (a < N) & (b >= 0) & (b < N)
    prod = np.where(valid, u.samples[np.clip(a, 0, N - 1)] * np.conj(v.samples[np.clip(b, 0, N - 1)]), 0)
    W = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(prod, axes=1), axis=1), axes=1) * (2 * h)
    xi = (np.arange(N) - N // 2) / (2 * N * h)
    return WignerGrid(u.axis, xi, W)


def weyl_kernel_matrix(symbol, N, half_width):
    """Matrix of the Weyl quantization of ``symbol(x, xi)`` on a 1-D grid.

    The kernel ``int e^{2 i pi (x - y) xi} a((x + y)/2, xi) d xi`` is computed
    by a Riemann sum over the dual frequency grid; the returned matrix already
    includes the quadrature weight, so ``op @ u.samples`` applies the operator.
    ``symbol`` must accept broadcast arrays.
    """
    h = 2 * half_width / N
    # 2N frequency samples make the kernel periodic in x - y with period 4L, longer than any separation
    M = 2 * N
    mid = -half_width + 0.5 * h * np.arange(2 * N - 1)
    xi = (np.arange(M) - M // 2) / (M * h)
    A = np.asarray(symbol(mid[:, None], xi[None, :]), dtype=complex) * np.ones((2 * N - 1, M))
    # G[s, d] = (1/(M h)) sum_k A[s, k] e^{2 i pi d (k - M/2) / M}
    G = np.fft.ifft(A, axis=1) / h
    i = np.arange(N)[:, None]
    jj = np.arange(N)[None, :]
    d = i - jj
    K = G[i + jj, d % M] * np.where(d % 2 == 0, 1.0, -1.0)
    return K * h
