"""Metaplectic operators as words in generators, with Z/4 Maslov indices.

A word ``[f1, f2, ..., fk]`` stands for the operator product ``f1 f2 ... fk``
(``fk`` acts first). Each word caches its projection onto Sp(2n, R) and a
canonical phase, the normalized pairing ``<W g0, g0>`` with the standard
Gaussian, which tells ``W`` apart from ``-W``.

Generators:

* ``FreeFactor(P, L, Q, m)``: the operator with kernel
  ``e^{-i pi n/4} e^{i pi m/2} |det L|^{1/2} e^{i pi (<Px,x> - 2<Lx,y> + <Qy,y>)}``.
* ``Chirp(A, m)``: multiplication by ``e^{i pi m/2} e^{i pi <Ax,x>}``, m in {0, 2}.
* ``Dilation(B, m)``: ``u -> e^{i pi m/2} |det B|^{1/2} u(Bx)``.
* ``FreqChirp(C, m)``: Fourier multiplier ``e^{i pi m/2} e^{i pi <C xi, xi>}``.
* ``NormalizedFourier(n)``: ``e^{-i pi n/4}`` times the Fourier transform.
"""

from dataclasses import dataclass

import numpy as np

from . import symplectic as sp
from .errors import DegeneratePairing, DimensionMismatch, IncompatibleIndex, SingularInput

PHASE_TOL = 1e-8


def _mat(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    return M


def _symmat(M, name):
    M = _mat(M, name)
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(M), initial=0.0)):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (M + M.T)


def maslov_set(B):
    """Admissible indices for ``B``: {0, 2} if det B > 0, {1, 3} if det B < 0."""
    d = np.linalg.det(_mat(B, "B"))
    if abs(d) <= 1e-12:
        raise SingularInput(f"|det B| = {abs(d):.3e} is too small")
    return frozenset({0, 2}) if d > 0 else frozenset({1, 3})


def _check_index(B, m):
    m = int(m) % 4
    if m not in maslov_set(B):
        raise IncompatibleIndex(f"index {m} is not compatible with sign(det) of the given matrix")
    return m


def maslov_transforms(B, m):
    """Indices to use for ``-B``, ``B^T`` and ``B^-1`` given ``m`` for ``B``.

    The value for ``B^-1`` is ``-m``, the one making ``Dilation(B^-1, -m)``
    the exact inverse of ``Dilation(B, m)``.
    """
    B = _mat(B, "B")
    m = _check_index(B, m)
    n = B.shape[0]
    return {"neg": (m + n) % 4, "transpose": m, "inverse": (-m) % 4}


@dataclass(frozen=True, eq=False)
class FreeFactor:
    data: sp.FreeFormData
    m: int

    def __post_init__(self):
        object.__setattr__(self, "m", _check_index(self.data.L, self.m))

    @classmethod
    def make(cls, P, L, Q, m=None):
        data = sp.FreeFormData(P, L, Q)
        if m is None:
            m = min(maslov_set(data.L))
        return cls(data, m)

    @property
    def n(self):
        return self.data.n

    @property
    def P(self):
        return self.data.P

    @property
    def L(self):
        return self.data.L

    @property
    def Q(self):
        return self.data.Q


@dataclass(frozen=True, eq=False)
class Chirp:
    A: np.ndarray
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "A", _symmat(self.A, "A"))
        m = int(self.m) % 4
        if m not in (0, 2):
            raise IncompatibleIndex("chirp index must be 0 or 2")
        object.__setattr__(self, "m", m)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class Dilation:
    B: np.ndarray
    m: int = None

    def __post_init__(self):
        B = _mat(self.B, "B")
        object.__setattr__(self, "B", B)
        m = min(maslov_set(B)) if self.m is None else self.m
        object.__setattr__(self, "m", _check_index(B, m))

    @property
    def n(self):
        return self.B.shape[0]


@dataclass(frozen=True, eq=False)
class FreqChirp:
    C: np.ndarray
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "C", _symmat(self.C, "C"))
        m = int(self.m) % 4
        if m not in (0, 2):
            raise IncompatibleIndex("frequency chirp index must be 0 or 2")
        object.__setattr__(self, "m", m)

    @property
    def n(self):
        return self.C.shape[0]


@dataclass(frozen=True)
class NormalizedFourier:
    n: int


ELEMENTARY = (Chirp, Dilation, FreqChirp, NormalizedFourier)
FACTORS = (FreeFactor,) + ELEMENTARY


def psi_factor(f):
    """Symplectic projection of a single generator."""
    if isinstance(f, FreeFactor):
        return sp.make_lambda_plq(f.data)
    if isinstance(f, Chirp):
        return sp.lower_shear(f.A)
    if isinstance(f, Dilation):
        return sp.block_dilation(f.B)
    if isinstance(f, FreqChirp):
        return sp.upper_shear(f.C)
    if isinstance(f, NormalizedFourier):
        return sp.SymplecticMatrix(sp.standard_form(f.n), check=False)
    raise TypeError(f"not a metaplectic generator: {f!r}")


def free_inverse(f):
    """Inverse free factor ``(-Q, -L^T, -P)`` with index ``n - m``."""
    return FreeFactor(sp.FreeFormData(-f.Q, -f.L.T, -f.P), (f.n - f.m) % 4)


def factor_inverse(f):
    """Generators whose product is the inverse of ``f``."""
    if isinstance(f, FreeFactor):
        return [free_inverse(f)]
    if isinstance(f, Chirp):
        return [Chirp(-f.A, -f.m)]
    if isinstance(f, Dilation):
        return [Dilation(np.linalg.inv(f.B), -f.m)]
    if isinstance(f, FreqChirp):
        return [FreqChirp(-f.C, -f.m)]
    if isinstance(f, NormalizedFourier):
        # the inverse transform is the transform followed by the parity operator
        return [NormalizedFourier(f.n), Dilation(-np.eye(f.n), f.n % 4)]
    raise TypeError(f"not a metaplectic generator: {f!r}")


class MetaplecticWord:
    """Immutable product of generators times an optional unit scalar."""

    __slots__ = ("factors", "n", "scalar_phase", "_psi", "_phase", "_image")

    def __init__(self, factors=(), n=None, scalar_phase=1.0, _tail=None):
        factors = tuple(factors)
        for f in factors:
            if not isinstance(f, FACTORS):
                raise TypeError(f"not a metaplectic generator: {f!r}")
        dims = {f.n for f in factors}
        if n is not None:
            dims.add(int(n))
        if len(dims) != 1:
            raise DimensionMismatch(f"factors have dimensions {sorted(dims)}" if dims else "dimension unknown")
        self.factors = factors
        self.n = dims.pop()
        self.scalar_phase = complex(scalar_phase)
        psi = np.eye(2 * self.n)
        for f in factors:
            psi = psi @ psi_factor(f).matrix
        self._psi = sp.SymplecticMatrix(psi, check=False)
        self._image, self._phase = _gaussian_image(self, _tail)

    @property
    def psi(self):
        return self._psi

    @property
    def phase(self):
        return self._phase

    def __matmul__(self, other):
        if not isinstance(other, MetaplecticWord):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"dimensions {self.n} and {other.n}")
        return MetaplecticWord(self.factors + other.factors, self.n, self.scalar_phase * other.scalar_phase,
                               _tail=(len(other.factors), other._image))

    def inverse(self):
        inv = []
        for f in reversed(self.factors):
            inv.extend(factor_inverse(f))
        return MetaplecticWord(inv, self.n, np.conj(self.scalar_phase))

    def with_phase(self, z):
        return MetaplecticWord(self.factors, self.n, z)

    def __len__(self):
        return len(self.factors)

    def __repr__(self):
        kinds = ", ".join(type(f).__name__ for f in self.factors)
        return f"MetaplecticWord(n={self.n}, [{kinds}], scalar_phase={self.scalar_phase:.6g})"


def word(*factors, n=None, scalar_phase=1.0):
    return MetaplecticWord(factors, n=n, scalar_phase=scalar_phase)


def psi_word(w):
    return w.psi


def _gaussian_image(w, tail=None):
    """``W g0`` without the scalar phase, and the canonical phase.

    ``tail = (k, state)`` says the last ``k`` factors are already applied to
    ``g0`` giving ``state``, so only the remaining ones are pushed through.
    """
    from . import gaussian

    g0 = gaussian.standard_gaussian(w.n)
    k, image = tail if tail is not None else (0, g0)
    for f in reversed(w.factors[: len(w.factors) - k]):
        image = gaussian.apply_factor(f, image)
    value = gaussian.pairing(image, g0) * w.scalar_phase
    if abs(value) < 1e-12:
        raise DegeneratePairing(f"|<W g0, g0>| = {abs(value):.3e}")
    return image, value / abs(value)


def canonical_phase(w):
    """``<W g0, g0> / |<W g0, g0>|`` for the standard Gaussian ``g0``."""
    return w.phase


def same_operator(w1, w2, tol=1e-9):
    """True when two words have equal projections and equal canonical phases."""
    return (np.max(np.abs(w1.psi.matrix - w2.psi.matrix)) <= tol
            and abs(w1.phase - w2.phase) <= tol)


def abc_word(d, m=None):
    """Word for the operator with generating data ``(A, B, C)`` and index ``m``.

    It multiplies by ``e^{i pi <Ax,x>}`` after the dilation by ``B`` and the
    frequency chirp by ``C``; its projection is ``Xi_{A,B,C}``.
    """
    return MetaplecticWord([Chirp(d.A), Dilation(d.B, m), FreqChirp(d.C)])


def compose_free_normal(f1, f2):
    """Rewrite ``f1 f2`` as five elementary factors.

    ``Chirp(P1) Dilation(-I, -n) Dilation(B, m1 + m2) FreqChirp(C) Chirp(Q2)``
    with ``B = L2^{-T} L1`` and ``C = L2^{-T} (Q1 + P2) L2^{-1}``.
    """
    if f1.n != f2.n:
        raise DimensionMismatch(f"dimensions {f1.n} and {f2.n}")
    n = f1.n
    L2i = np.linalg.inv(f2.L)
    B = L2i.T @ f1.L
    C = L2i.T @ (f1.Q + f2.P) @ L2i
    return MetaplecticWord([
        Chirp(f1.P),
        Dilation(-np.eye(n), (-n) % 4),
        Dilation(B, (f1.m + f2.m) % 4),
        FreqChirp(0.5 * (C + C.T)),
        Chirp(f2.Q),
    ])


def inverse_normalized_fourier(n):
    return [NormalizedFourier(n), Dilation(-np.eye(n), n % 4)]


def free_to_abc_word(f):
    """Word ``M_{P,-L,Q}^{m-n}`` followed by the inverse normalized Fourier transform."""
    n = f.n
    d = sp.ABCFormData(f.P, -f.L, f.Q)
    return MetaplecticWord(list(abc_word(d, (f.m - n) % 4).factors) + inverse_normalized_fourier(n))


def abc_to_free_word(d, m=None):
    """Word for ``M_{A,B,C}^m`` written as a free factor times the normalized Fourier transform."""
    n = d.n
    if m is None:
        m = min(maslov_set(d.B))
    return MetaplecticWord([FreeFactor(sp.FreeFormData(d.A, -d.B, d.C), (m + n) % 4), NormalizedFourier(n)])


def link_forms(f):
    """Return ``(abc_form, back)``: ``f`` as an ABC word and that word rewritten with a free factor."""
    n = f.n
    abc = free_to_abc_word(f)
    d = sp.ABCFormData(f.P, -f.L, f.Q)
    back = abc_to_free_word(d, (f.m - n) % 4) @ MetaplecticWord(inverse_normalized_fourier(n))
    return abc, back


def _match_sheet(candidate, target):
    """Multiply ``candidate`` by -1 (via ``Dilation(I, 2)``) if its phase disagrees with ``target``."""
    ratio = candidate.phase / target.phase
    if abs(ratio - 1) <= PHASE_TOL:
        return candidate
    if abs(ratio + 1) <= PHASE_TOL:
        return None
    raise DegeneratePairing(f"canonical phases differ by {ratio:.6g}, expected +-1")


def to_free_factor(w):
    """Single free factor equal to ``w`` (scalar phase must be 1); needs ``Xi12`` invertible."""
    if abs(w.scalar_phase - 1) > PHASE_TOL:
        raise ValueError("word carries a scalar phase; a free factor cannot absorb it")
    data = sp.factor_free(w.psi)
    m0 = min(maslov_set(data.L))
    cand = MetaplecticWord([FreeFactor(data, m0)])
    if _match_sheet(cand, w) is None:
        cand = MetaplecticWord([FreeFactor(data, m0 + 2)])
        _match_sheet(cand, w)
    return cand.factors[0]


def two_free_word(w):
    """Equivalent word made of two free factors (keeps the scalar phase)."""
    d1, d2 = sp.factor_two_free(w.psi)
    f1 = FreeFactor(d1, min(maslov_set(d1.L)))
    f2 = FreeFactor(d2, min(maslov_set(d2.L)))
    cand = MetaplecticWord([f1, f2], scalar_phase=w.scalar_phase)
    if _match_sheet(cand, w) is None:
        cand = MetaplecticWord([FreeFactor(d1, f1.m + 2), f2], scalar_phase=w.scalar_phase)
        _match_sheet(cand, w)
    return cand
