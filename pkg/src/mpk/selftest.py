"""Acceptance suites: ten named groups of randomized and closed-form checks.

Each group returns a GroupResult holding individual Check records, every one
carrying the measured value, the tolerance it was judged against and the
verdict. Groups are deterministic for a given seed.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gaussian as G
from . import metaplectic as mp
from . import symplectic as sp
from .numerics import (
    GridFunction,
    PhaseSymmetry,
    QuadraticSymbol,
    apply_elementary_grid,
    apply_word_grid,
    axis_points,
    ground_energy,
    grid_fourier,
    hcw_symbol,
    hermite_functions,
    partial_min_check,
    variance_grid,
    weyl_kernel_matrix,
    weyl_quadratic_hermite,
    wigner_grid,
)


@dataclass(frozen=True)
class Check:
    label: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    @classmethod
    def at_most(cls, label, value, tol):
        value = float(value)
        return cls(label, value, float(tol), bool(value <= tol), "<=")

    @classmethod
    def at_least(cls, label, value, bound):
        value = float(value)
        return cls(label, value, float(bound), bool(value >= bound), ">=")


@dataclass
class GroupResult:
    key: str
    name: str
    title: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    budget: float = 0.0
    error: str = ""

    @property
    def passed(self):
        return not self.error and all(c.passed for c in self.checks) and self.elapsed <= self.budget


# ---------------------------------------------------------------- random inputs

def random_symmetric(rng, n, scale):
    M = rng.uniform(-scale, scale, size=(n, n))
    return 0.5 * (M + M.T)


def random_invertible(rng, n, scale=0.5):
    while True:
        B = np.eye(n) + rng.uniform(-scale, scale, size=(n, n))
        if abs(np.linalg.det(B)) > 0.2:
            return B


def random_factor(rng, n, scale=0.5):
    """One generator of any kind with moderate parameters."""
    kind = rng.integers(0, 5)
    if kind == 0:
        return mp.Chirp(random_symmetric(rng, n, scale), int(rng.choice([0, 2])))
    if kind == 1:
        return mp.FreqChirp(random_symmetric(rng, n, scale), int(rng.choice([0, 2])))
    if kind == 2:
        return mp.NormalizedFourier(n)
    if kind == 3:
        B = random_invertible(rng, n)
        return mp.Dilation(B, int(rng.choice(sorted(mp.maslov_set(B)))))
    L = random_invertible(rng, n)
    return mp.FreeFactor.make(random_symmetric(rng, n, scale), L, random_symmetric(rng, n, scale),
                              int(rng.choice(sorted(mp.maslov_set(L)))))


def random_word(rng, n, length=(1, 5), scale=0.5):
    k = int(rng.integers(length[0], length[1] + 1))
    return mp.MetaplecticWord([random_factor(rng, n, scale) for _ in range(k)], n)


def grid_word(rng, n, scale):
    """Word whose factors all act on a self-dual grid (free factors only in 1-D)."""
    factors = []
    for _ in range(int(rng.integers(2, 6))):
        kind = rng.integers(0, 5 if n == 1 else 4)
        if kind == 0:
            factors.append(mp.Chirp(random_symmetric(rng, n, scale)))
        elif kind == 1:
            factors.append(mp.FreqChirp(random_symmetric(rng, n, scale)))
        elif kind == 2:
            factors.append(mp.NormalizedFourier(n))
        elif kind == 3:
            B = np.eye(n)[rng.permutation(n)] * rng.choice([-1, 1], size=n)
            factors.append(mp.Dilation(B, int(rng.choice(sorted(mp.maslov_set(B))))))
        else:
            l = rng.uniform(0.6, 1.6) * rng.choice([-1, 1])
            factors.append(mp.FreeFactor.make(rng.uniform(-scale, scale), l, rng.uniform(-scale, scale)))
    return mp.MetaplecticWord(factors, n)


def hermite_batch(rng, count, n, N, half_width, degree=10):
    """Normalized random combinations of Hermite functions of total degree <= ``degree``."""
    H = hermite_functions(axis_points(N, half_width), degree + 1)
    if n == 1:
        c = np.zeros((count, degree + 1), dtype=complex)
        for i in range(count):
            d = int(rng.integers(0, degree + 1))
            c[i, : d + 1] = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        return GridFunction(c @ H, half_width, 1).normalized()
    out = np.zeros((count, N, N), dtype=complex)
    for i in range(count):
        d = int(rng.integers(0, degree + 1))
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for j in range(d + 1):
            k = d + 1 - j
            c[j, :k] = rng.normal(size=k) + 1j * rng.normal(size=k)
        out[i] = H.T @ c @ H
    return GridFunction(out, half_width, 2).normalized()


def self_dual_half_width(N):
    return np.sqrt(N) / 2


def mobius(psi, theta):
    """Action of a symplectic matrix on the matrix of a centered Gaussian."""
    n = theta.shape[0]
    a, b, c, d = psi[:n, :n], psi[:n, n:], psi[n:, :n], psi[n:, n:]
    return (c + d @ theta) @ np.linalg.inv(a + b @ theta)


# ---------------------------------------------------------------- groups

def group_exact(seed):
    rng = np.random.default_rng(seed)
    worst_formula = worst_gap = 0.0
    for _ in range(100):
        l = rng.uniform(0.2, 5.0) * rng.choice([-1, 1])
        p, q = rng.uniform(-1, 1, size=2)
        f = mp.FreeFactor.make(p, l, q)
        for t in (1.0, 10.0, 1e3):
            pt = G.optimizer_family(f, t)
            formula = np.sqrt(1 + q * q / t ** 2) / (4 * np.pi * abs(l))
            worst_formula = max(worst_formula, abs(pt.sqrt_product - formula))
        worst_gap = max(worst_gap, abs(pt.gap))
    return [Check.at_most("sqrt product equals closed-form expression", worst_formula, 1e-12),
            Check.at_most("gap to 1/(4 pi |l|) at t = 1000", worst_gap, 5e-7)]


def group_lower_bound(seed):
    rng = np.random.default_rng(seed)
    checks = []
    for n, N, scale in ((1, 1024, 0.6), (2, 128, 0.4)):
        L = self_dual_half_width(N)
        U = hermite_batch(rng, 200, n, N, L)
        vu = variance_grid(U)
        worst = np.inf
        worst_norm = 0.0
        for _ in range(20):
            w = grid_word(rng, n, scale)
            mu = sp.mu_of_symplectic(w.psi)
            V = apply_word_grid(w, U)
            worst_norm = max(worst_norm, float(np.max(np.abs(V.norm_sq() - 1))))
            if mu > 0:
                worst = min(worst, float(np.min(np.sqrt(variance_grid(V) * vu)) / mu))
        checks.append(Check.at_least(f"n={n}: min sqrt(V(Mu)V(u)) / mu", worst, 1 - 1e-4))
        checks.append(Check.at_most(f"n={n}: discrete norm drift", worst_norm, 1e-8))
    return checks


def singular_word(rng):
    v = rng.normal(size=2)
    v /= np.linalg.norm(v)
    C = rng.uniform(0.5, 2.0) * rng.choice([-1, 1]) * np.outer(v, v)
    return mp.MetaplecticWord([mp.Chirp(random_symmetric(rng, 2, 0.4)), mp.FreqChirp(C),
                               mp.Chirp(random_symmetric(rng, 2, 0.4))])


def group_singular(seed):
    rng = np.random.default_rng(seed)
    worst_end = worst_grid = worst_rise = 0.0
    rank_ok = True
    N = 256
    L = self_dual_half_width(N)
    for _ in range(5):
        w = singular_word(rng)
        xi = w.psi
        rank_ok &= np.linalg.matrix_rank(xi.xi12, tol=1e-9) == 1
        mu = sp.mu_of_symplectic(xi)
        prev = np.inf
        for eps in np.geomspace(1.0, 1e-3, 13):
            g = G.adapted_gaussian(xi, eps)
            prod = G.variance_product(w, g)
            worst_rise = max(worst_rise, prod - prev)
            prev = prod
        worst_end = max(worst_end, abs(prod / mu ** 2 - 1))
        for eps in (0.5, 0.2):
            g = G.adapted_gaussian(xi, eps)
            u = GridFunction.sample(lambda x1, x2: g(np.stack([x1, x2], axis=-1)), 2, N, L)
            on_grid = variance_grid(apply_word_grid(w, u)) * variance_grid(u)
            worst_grid = max(worst_grid, abs(on_grid / G.variance_product(w, g) - 1))
    return [Check.at_most("rank of Xi12 is 1", 0 if rank_ok else 1, 0),
            Check.at_most("relative gap to mu^2 at sweep endpoint", worst_end, 1e-2),
            Check.at_most("product never increases along the sweep", worst_rise, 1e-12),
            Check.at_most("grid vs closed form on the family", worst_grid, 1e-6)]


def _rank_one_block(rng, n):
    """Symplectic matrix with ``xi12`` of rank one: shears and dilations around a partial Fourier map."""
    J = np.eye(2 * n)
    J[0, 0] = J[n, n] = 0.0
    J[0, n] = 1.0
    J[n, 0] = -1.0
    left = sp.lower_shear(random_symmetric(rng, n, 0.5)).matrix @ sp.block_dilation(random_invertible(rng, n)).matrix
    right = sp.block_dilation(random_invertible(rng, n)).matrix @ sp.lower_shear(random_symmetric(rng, n, 0.5)).matrix
    return sp.SymplecticMatrix(left @ J @ right)


def group_factorization(seed):
    rng = np.random.default_rng(seed)
    worst_two = worst_free = worst_abc = worst_word = 0.0
    for i in range(1000):
        n = 1 + i % 4
        if i == 0:
            xi = sp.rank_one_blocks()
        elif i % 3 == 1 and n > 1:
            xi = _rank_one_block(rng, n)
        else:
            xi = sp.random_symplectic(n, rng)
        M = xi.matrix
        scale = max(1.0, np.max(np.abs(M)))
        f1, f2 = sp.factor_two_free(xi, seed=i)
        prod = sp.make_lambda_plq(f1).matrix @ sp.make_lambda_plq(f2).matrix
        worst_two = max(worst_two, np.max(np.abs(prod - M)) / scale)
        if sp.is_invertible(xi.xi12):
            back = sp.make_lambda_plq(sp.factor_free(xi)).matrix
            worst_free = max(worst_free, np.max(np.abs(back - M)) / scale)
        if sp.is_invertible(xi.xi11):
            back = sp.make_xi_abc(sp.factor_abc(xi)).matrix
            worst_abc = max(worst_abc, np.max(np.abs(back - M)) / scale)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        L = random_invertible(rng, n)
        f = mp.FreeFactor.make(random_symmetric(rng, n, 0.5), L, random_symmetric(rng, n, 0.5),
                               int(rng.choice(sorted(mp.maslov_set(L)))))
        w = mp.MetaplecticWord([f])
        abc, back = mp.link_forms(f)
        for other in (abc, back, mp.MetaplecticWord([mp.to_free_factor(abc)])):
            worst_word = max(worst_word, np.max(np.abs(other.psi.matrix - w.psi.matrix)),
                             abs(other.phase - w.phase))
    return [Check.at_most("two-free product residual (incl. four rank-1 blocks)", worst_two, 1e-8),
            Check.at_most("free form round trip", worst_free, 1e-9),
            Check.at_most("ABC form round trip", worst_abc, 1e-9),
            Check.at_most("free/ABC operator round trip (projection and phase)", worst_word, 1e-9)]


def group_cover(seed):
    rng = np.random.default_rng(seed)
    worst_hom = worst_action = worst_phase = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 4))
        w1, w2 = random_word(rng, n), random_word(rng, n)
        w = w1 @ w2
        worst_hom = max(worst_hom, np.max(np.abs(w.psi.matrix - w1.psi.matrix @ w2.psi.matrix)))
        theta0 = (random_symmetric(rng, n, 0.5) + 1j * (np.eye(n) + 0.1 * random_symmetric(rng, n, 1.0)))
        g = G.GaussianState(1.0, theta0)
        # independent route: linear fractional action of the projection on the Gaussian matrix
        moved = G.apply_word(w, g).theta
        worst_action = max(worst_action, np.max(np.abs(moved - mobius(w.psi.matrix, theta0))))
        identities = [w @ w.inverse(), w1.inverse() @ w1,
                      mp.MetaplecticWord([mp.NormalizedFourier(n)] * 4),
                      w @ mp.two_free_word(w).inverse()]
        for ident in identities:
            worst_hom = max(worst_hom, np.max(np.abs(ident.psi.matrix - np.eye(2 * n))))
            z = ident.phase
            worst_phase = max(worst_phase, min(abs(z - 1), abs(z + 1)))
    return [Check.at_most("Psi(w1 w2) - Psi(w1) Psi(w2)", worst_hom, 1e-9),
            Check.at_most("Gaussian action matches linear fractional action", worst_action, 1e-9),
            Check.at_most("phase of identity-projection words in {+1, -1}", worst_phase, 1e-8)]


def group_generator(seed):
    rng = np.random.default_rng(seed)
    N, L = 1024, 8.0
    f = mp.to_free_factor(mp.abc_word(sp.ABCFormData(-1.0, np.sqrt(2.0), -1.0), 0))
    square = mp.MetaplecticWord([f, f])
    x = axis_points(N, L)
    H = hermite_functions(x, 8)
    c = rng.normal(size=(10, 8)) + 1j * rng.normal(size=(10, 8))
    u = GridFunction(c @ H, L, 1)
    got = apply_word_grid(square, u)
    # Hermite functions are Fourier eigenvectors with eigenvalues (-i)^k
    ref = np.exp(-1j * np.pi / 4) * ((c * (-1j) ** np.arange(8)) @ H)
    err = np.max(np.abs(got.samples - ref)) / np.max(np.abs(ref))
    psi_err = np.max(np.abs(square.psi.matrix - sp.standard_form(1)))
    phase_err = abs(square.phase - mp.MetaplecticWord([mp.NormalizedFourier(1)]).phase)
    return [Check.at_most("grid sup error of square vs e^{-i pi/4} Fourier", err, 1e-6),
            Check.at_most("projection of square equals sigma", psi_err, 1e-12),
            Check.at_most("phase of square equals normalized Fourier phase", phase_err, 1e-12)]


def group_wigner(seed):
    rng = np.random.default_rng(seed)
    N = 256
    L = self_dual_half_width(N)
    U = hermite_batch(rng, 50, 1, N, L, degree=8)
    V = hermite_batch(rng, 50, 1, N, L, degree=8)
    scale = rng.uniform(0.5, 2.0, size=50) * np.exp(2j * np.pi * rng.uniform(size=50))
    worst = worst_herm = 0.0
    for i in range(50):
        u = GridFunction(U.samples[i] * scale[i], L, 1)
        v = GridFunction(V.samples[i], L, 1)
        W = wigner_grid(u, v)
        expected = np.sqrt(u.norm_sq() * v.norm_sq())
        worst = max(worst, abs(W.norm() - expected) / expected)
        worst_herm = max(worst_herm, np.max(np.abs(W.values - np.conj(wigner_grid(v, u).values))))
    u1 = GridFunction.sample(lambda x: x * np.exp(-np.pi * x ** 2), 1, N, L)
    W = wigner_grid(u1)
    X, XI = np.meshgrid(W.x, W.xi, indexing="ij")
    r2 = X ** 2 + XI ** 2
    ref = np.sqrt(2) * np.exp(-2 * np.pi * r2) * (r2 - 1 / (4 * np.pi))
    return [Check.at_most("relative error of ||W(u,v)|| = ||u|| ||v||", worst, 1e-8),
            Check.at_most("W(u,v) = conj W(v,u)", worst_herm, 1e-10),
            Check.at_most("closed form for x e^{-pi x^2}", np.max(np.abs(W.values - ref)), 1e-6),
            Check.at_most("imaginary part of W(u1,u1)", np.max(np.abs(W.values.imag)), 1e-10)]


def group_spectra(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        c = rng.uniform(0.5, 2.0) * rng.choice([-1, 1])
        omega = rng.uniform(0.5, 2.0) * rng.choice([-1, 1])
        e = ground_energy(weyl_quadratic_hermite(hcw_symbol(c, omega), 64)).value
        worst = max(worst, abs(e - abs(c * omega) / (2 * np.pi)))
    ho = ground_energy(weyl_quadratic_hermite(QuadraticSymbol(np.eye(2)), 64))
    Q = np.zeros((4, 4))
    Q[0, 0], Q[1, 1], Q[2, 2] = 2.0, 2.0, 1.0
    Q[0, 2] = Q[2, 0] = 1.0
    report = partial_min_check(QuadraticSymbol(Q), np.linspace(-1.0, 1.0, 21))
    return [Check.at_most("ground energy of H_{c,omega} vs |c omega|/(2 pi)", worst, 1e-6),
            Check.at_most("harmonic oscillator vs 1/(2 pi)", abs(ho.value - 1 / (2 * np.pi)), 1e-8),
            Check.at_most("harmonic oscillator truncation certificate", ho.delta, 1e-8),
            Check.at_most("full vs sliced minimum", report.difference, 2e-3),
            Check.at_most("sliced minimum vs 1/(2 pi)", abs(report.sliced_min - 1 / (2 * np.pi)), 2e-3)]


def group_constants(seed):
    checks = []
    for n, N, L in ((1, 1024, 8.0), (2, 128, 6.0)):
        target = n * n / (16 * np.pi ** 2)
        g0 = G.standard_gaussian(n)
        nf = mp.NormalizedFourier(n)
        closed = G.variance_product(nf, g0)
        checks.append(Check.at_most(f"n={n}: closed-form product vs n^2/(16 pi^2)", abs(closed - target), 1e-15))
        if n == 1:
            u = GridFunction.sample(lambda x: g0(x), 1, N, L)
        else:
            u = GridFunction.sample(lambda x1, x2: g0(np.stack([x1, x2], axis=-1)), 2, N, L)
        on_grid = variance_grid(apply_word_grid(mp.MetaplecticWord([nf]), u)) * variance_grid(u)
        checks.append(Check.at_most(f"n={n}: grid product vs n^2/(16 pi^2)", abs(on_grid - target), 1e-8))
    B = np.diag([1.0, -2.0])
    prefactor = G.chirp_fourier_prefactor(B)
    closed_limit = G.det_inv_sqrt(-1j * B)
    checks.append(Check.at_most("chirp prefactor vs det(-iB)^{-1/2}", abs(prefactor - closed_limit), 1e-12))
    near = G.fourier_gaussian(G.GaussianState(1.0, B + 1e-9j * np.eye(2))).c
    checks.append(Check.at_most("damped amplitude tends to the prefactor", abs(near - prefactor), 1e-6))
    eps = 0.1
    damped = G.GaussianState(1.0, B + 1j * eps * np.eye(2))
    u = GridFunction.sample(lambda x1, x2: damped(np.stack([x1, x2], axis=-1)), 2, 1024, 10.0)
    u.check_guard()
    U = grid_fourier(u)
    U.check_guard()
    ref = G.fourier_gaussian(damped)
    X1, X2 = U.coords()
    err = np.max(np.abs(U.samples - ref(np.stack([X1, X2], axis=-1))))
    checks.append(Check.at_most("grid DFT of damped chirp vs closed form", err, 1e-6))
    return checks


def _apply_matrix(K, u):
    return u.with_samples(K @ u.samples)


def group_covariance(seed):
    rng = np.random.default_rng(seed)
    N = 256
    L = self_dual_half_width(N)
    h = 2 * L / N
    coef = rng.normal(size=7) + 1j * rng.normal(size=7)

    def u_func(x):
        return coef @ hermite_functions(x, 7)

    u = GridFunction.sample(u_func, 1, N, L)
    v = GridFunction(coef[::-1].conj() @ hermite_functions(u.axis, 7), L, 1)
    nu = np.sqrt(u.norm_sq())
    extra = QuadraticSymbol(random_symmetric(rng, 2, 1.0) + np.eye(2), 0.3, rng.normal(size=2))
    symbols = {"x^2": QuadraticSymbol(np.diag([1.0, 0.0])),
               "xi^2": QuadraticSymbol(np.diag([0.0, 1.0])),
               "x xi": QuadraticSymbol([[0.0, 0.5], [0.5, 0.0]]),
               "random": extra}
    A, C, B = 0.4, -0.3, 1.3
    chirp, freq = mp.Chirp(A), mp.FreqChirp(C)
    Y = np.array([4 * h + h / 2, 0.3])
    sigma = PhaseSymmetry((Y[0],), (Y[1],))
    errors = {k: 0.0 for k in ("fourier", "chirp", "freq-chirp", "dilation", "phase-symmetry")}
    for a in symbols.values():
        K = weyl_kernel_matrix(a, N, L)

        def op(b):
            return _apply_matrix(weyl_kernel_matrix(b, N, L), u)

        lhs = grid_fourier(_apply_matrix(K, grid_fourier(u)), inverse=True)
        errors["fourier"] = max(errors["fourier"], _rel(lhs, op(a.compose([[0, 1], [-1, 0]])), nu))
        inner = _apply_matrix(K, apply_elementary_grid(chirp, u))
        lhs = apply_elementary_grid(mp.Chirp(-A), inner)
        errors["chirp"] = max(errors["chirp"], _rel(lhs, op(a.compose([[1, 0], [A, 1]])), nu))
        inner = _apply_matrix(K, apply_elementary_grid(freq, u))
        lhs = apply_elementary_grid(mp.FreqChirp(-C), inner)
        errors["freq-chirp"] = max(errors["freq-chirp"], _rel(lhs, op(a.compose([[1, -C], [0, 1]])), nu))
        # non-lattice dilation: weak form with the dilated functions sampled exactly
        dil_u = GridFunction.sample(lambda x: np.sqrt(B) * u_func(B * x), 1, N, L)
        dil_v = GridFunction(np.sqrt(B) * (coef[::-1].conj() @ hermite_functions(B * u.axis, 7)), L, 1)
        lhs_weak = _apply_matrix(K, dil_u).inner(dil_v)
        rhs_weak = op(a.compose([[1 / B, 0], [0, B]])).inner(v)
        errors["dilation"] = max(errors["dilation"], abs(lhs_weak - rhs_weak) / (nu * np.sqrt(v.norm_sq())))
        lhs = apply_elementary_grid(sigma, _apply_matrix(K, apply_elementary_grid(sigma, u)))
        errors["phase-symmetry"] = max(errors["phase-symmetry"], _rel(lhs, op(a.reflect(Y)), nu))
    labels = {"fourier": "Fourier conjugation", "chirp": "chirp conjugation",
              "freq-chirp": "frequency chirp conjugation", "dilation": "dilation conjugation (weak form)",
              "phase-symmetry": "phase symmetry conjugation"}
    return [Check.at_most(labels[k], errors[k], 1e-5) for k in labels]


def _rel(a, b, scale):
    return float(np.sqrt(np.sum(np.abs(a.samples - b.samples) ** 2) * a.spacing) / scale)


GROUPS = {
    "1": ("exact", "optimizer family in the exact 1-D regime", group_exact, 1.0),
    "2": ("lower-bound", "variance product lower bound on grids", group_lower_bound, 60.0),
    "3": ("singular", "rank-one upper-right block", group_singular, 30.0),
    "4": ("factorization", "free, ABC and two-free factorizations", group_factorization, 10.0),
    "5": ("cover", "homomorphism and double cover", group_cover, 10.0),
    "6": ("generator", "square of the free generator is a Fourier transform", group_generator, 5.0),
    "7": ("wigner", "Wigner norm identity and closed form", group_wigner, 10.0),
    "8": ("spectra", "ground energies of quadratic Hamiltonians", group_spectra, 30.0),
    "9": ("constants", "Gaussian variance product and chirp prefactor", group_constants, 5.0),
    "10": ("covariance", "symplectic covariance of the Weyl calculus", group_covariance, 20.0),
}


def resolve(selection):
    """Map group numbers or names to keys, keeping the canonical order."""
    if not selection:
        return list(GROUPS)
    names = {v[0]: k for k, v in GROUPS.items()}
    keys = set()
    for item in selection:
        if item in GROUPS:
            keys.add(item)
        elif item in names:
            keys.add(names[item])
        else:
            raise KeyError(f"unknown selftest group {item!r}")
    return [k for k in GROUPS if k in keys]


def run_group(key, seed=0):
    name, title, fn, budget = GROUPS[key]
    result = GroupResult(key, name, title, budget=budget)
    start = time.perf_counter()
    try:
        result.checks = fn(seed)
    except Exception as exc:  # a crash is reported as a failed group, not a crashed suite
        result.error = f"{type(exc).__name__}: {exc}"
    result.elapsed = time.perf_counter() - start
    return result


def thread_count():
    try:
        return max(1, int(os.environ.get("MPK_THREADS", "1")))
    except ValueError:
        return 1


def run(selection=None, seed=0, threads=None):
    """Run the selected groups; results come back in group order regardless of threading."""
    keys = resolve(selection)
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [run_group(k, seed) for k in keys]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda k: run_group(k, seed), keys))
