import numpy as np
import pytest

from mpk import gaussian as gs
from mpk import metaplectic as mp
from mpk import symplectic as sp
from mpk.errors import NotSquareIntegrable, SingularTheta
from mpk.numerics import GridFunction, apply_free_factor_grid, grid_fourier, variance_grid
from mpk.selftest import mobius, random_factor, random_word


def unit_v(t):
    return gs.GaussianState((2 * t) ** 0.25, [[1j * t]])


def random_gaussian(rng, n):
    M = rng.normal(size=(n, n))
    im = M @ M.T + 0.3 * np.eye(n)
    re = rng.uniform(-1, 1, (n, n))
    return gs.GaussianState(rng.normal() + 1j * rng.normal(), 0.5 * (re + re.T) + 1j * im)


def test_norm_examples():
    assert gs.gaussian_norm_sq(gs.GaussianState(2 ** 0.25, [[1j]])) == pytest.approx(1.0, abs=1e-15)
    assert gs.gaussian_norm_sq(gs.GaussianState(np.sqrt(2), 1j * np.eye(2))) == pytest.approx(1.0, abs=1e-15)
    g = gs.GaussianState(0.7, [[0.2 + 1.5j]])
    assert gs.gaussian_norm_sq(g.scaled(2)) == pytest.approx(4 * gs.gaussian_norm_sq(g))


def test_variance_examples():
    for t in (0.1, 1.0, 7.0):
        assert gs.gaussian_variance(unit_v(t)) == pytest.approx(1 / (4 * np.pi * t))
    for n in (1, 2, 3):
        assert gs.gaussian_variance(gs.standard_gaussian(n)) == pytest.approx(n / (4 * np.pi))
    g = gs.GaussianState(1.3, 1j * np.diag([1.0, 4.0]))
    assert gs.gaussian_variance(g) == pytest.approx(1.25 / (4 * np.pi) * gs.gaussian_norm_sq(g))


def test_variance_matches_grid():
    g = gs.GaussianState(0.9, [[0.4 + 0.8j]])
    u = GridFunction.sample(g, 1, 1024, 8.0)
    assert variance_grid(u) == pytest.approx(gs.gaussian_variance(g), abs=1e-8)


def test_rejects_non_integrable():
    with pytest.raises(NotSquareIntegrable):
        gs.GaussianState(1.0, [[-1j]])
    with pytest.raises(NotSquareIntegrable):
        gs.gaussian_norm_sq(gs.GaussianState(1.0, [[0.5]]))
    with pytest.raises(ValueError):
        gs.GaussianState(1.0, [[1j, 1.0], [0.0, 1j]])


def test_fourier_examples():
    h = gs.fourier_gaussian(gs.GaussianState(1.0, 1j * np.eye(2)))
    assert h.c == pytest.approx(1.0) and np.allclose(h.theta, 1j * np.eye(2))
    t = 3.0
    h = gs.fourier_gaussian(gs.GaussianState(2.0, [[1j * t]]))
    assert h.c == pytest.approx(2.0 / np.sqrt(t)) and h.theta[0, 0] == pytest.approx(1j / t)
    B = np.diag([1.0, -2.0])
    h = gs.fourier_gaussian(gs.GaussianState(1.0, B))
    assert h.c == pytest.approx(2 ** -0.5) and np.allclose(h.theta, -np.linalg.inv(B))
    assert gs.chirp_fourier_prefactor(B) == pytest.approx(2 ** -0.5)
    with pytest.raises(SingularTheta):
        gs.fourier_gaussian(gs.GaussianState(1.0, np.diag([1.0, 0.0])))


def test_fourier_phase_matches_grid(rng):
    N, L = 1024, 16.0
    for _ in range(5):
        g = random_gaussian(rng, 1)
        u = GridFunction.sample(g, 1, N, L)
        U = grid_fourier(u)
        ref = gs.fourier_gaussian(g)(U.axis)
        assert np.max(np.abs(U.samples - ref)) <= 1e-8


def test_signature():
    s = gs.signature(np.diag([3.0, -1.0, -2.0]))
    assert (s.sig, s.index) == (-1, 2)


def test_apply_elementary_examples():
    g = gs.GaussianState(0.8, [[0.3 + 2j]])
    chirped = gs.apply_elementary(mp.Chirp(1.7), g)
    assert gs.gaussian_variance(chirped) == pytest.approx(gs.gaussian_variance(g))
    d = gs.apply_elementary(mp.Dilation(2.0, 0), unit_v(1.0))
    assert np.allclose(d.theta, 4j) and d.c == pytest.approx(np.sqrt(2) * 2 ** 0.25)
    assert gs.gaussian_norm_sq(d) == pytest.approx(1.0)
    for n in (1, 2, 3):
        g0 = gs.standard_gaussian(n)
        h = gs.apply_elementary(mp.NormalizedFourier(n), g0)
        assert h.c == pytest.approx(np.exp(-1j * np.pi * n / 4) * g0.c) and np.allclose(h.theta, g0.theta)


def test_free_factor_modulus():
    x = np.linspace(-3, 3, 31)
    for p, l, q, t in [(0.3, 1.2, 0.5, 1.0), (-1.0, -0.7, 2.0, 0.4), (0.0, 2.0, 0.0, 3.0)]:
        out = gs.apply_free_factor(mp.FreeFactor.make(p, l, q), unit_v(t))
        expected = np.sqrt(2 * t) * abs(l) / np.sqrt(t * t + q * q) * np.exp(-2 * np.pi * t * l * l * x ** 2 / (t * t + q * q))
        assert np.allclose(np.abs(out(x)) ** 2, expected, rtol=1e-12)
        product = gs.variance_product(mp.FreeFactor.make(p, l, q), unit_v(t))
        assert product == pytest.approx((1 + q * q / t ** 2) / ((4 * np.pi) ** 2 * l * l), rel=1e-12)


def test_fourier_type_factor_on_standard_gaussian():
    for n in (1, 2):
        g0 = gs.standard_gaussian(n)
        out = gs.apply_free_factor(mp.FreeFactor.make(np.zeros((n, n)), np.eye(n), np.zeros((n, n))), g0)
        assert np.allclose(out.theta, g0.theta) and abs(out.c) == pytest.approx(g0.c)


def test_unitarity(rng):
    for _ in range(500):
        n = int(rng.integers(1, 4))
        f = random_factor(rng, n)
        g = random_gaussian(rng, n)
        assert gs.gaussian_norm_sq(gs.apply_factor(f, g)) == pytest.approx(gs.gaussian_norm_sq(g), rel=1e-10)


def test_lower_bound(rng):
    count = 0
    while count < 500:
        n = int(rng.integers(1, 4))
        f = random_factor(rng, n)
        if not isinstance(f, mp.FreeFactor):
            continue
        count += 1
        g = random_gaussian(rng, n)
        mu = sp.mu_of_symplectic(mp.psi_factor(f))
        assert np.sqrt(gs.variance_product(f, g)) >= mu * gs.gaussian_norm_sq(g) * (1 - 1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_heisenberg_equality(n):
    g0 = gs.standard_gaussian(n)
    product = gs.variance_product(mp.NormalizedFourier(n), g0)
    assert product == pytest.approx(n * n / (16 * np.pi ** 2), rel=1e-14)


def test_free_factor_matches_grid(rng):
    N, L = 1024, 8.0
    for _ in range(3):
        f = mp.FreeFactor.make(rng.uniform(-1, 1), rng.choice([-1, 1]) * rng.uniform(0.7, 1.5), rng.uniform(-1, 1))
        g = gs.GaussianState(1.0, [[rng.uniform(-0.5, 0.5) + 1j * rng.uniform(0.6, 1.5)]])
        out = apply_free_factor_grid(f, GridFunction.sample(g, 1, N, L))
        ref = gs.apply_free_factor(f, g)(out.axis)
        assert np.max(np.abs(out.samples - ref)) <= 1e-6


def test_word_action_matches_mobius(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        w = random_word(rng, n)
        g = random_gaussian(rng, n)
        theta = gs.apply_word(w, g).theta
        assert np.max(np.abs(theta - mobius(w.psi.matrix, g.theta))) <= 1e-8


def test_optimizer_family_one_dimensional():
    p, l, q = 0.2, -1.5, 1.0
    f = mp.FreeFactor.make(p, l, q)
    for t in (1.0, 10.0, 1000.0):
        point = gs.optimizer_family(f, t)
        assert point.sqrt_product == pytest.approx(np.sqrt(1 + q * q / t ** 2) / (4 * np.pi * abs(l)), rel=1e-12)
        assert point.limit == pytest.approx(1 / (4 * np.pi * abs(l)))
    point = gs.optimizer_family(mp.FreeFactor.make(0.0, 1.0, 1.0), 1000.0)
    assert point.gap / point.limit <= 5e-7


def test_optimizer_family_identity_l_limit():
    for n in (2, 3):
        f = mp.FreeFactor.make(np.zeros((n, n)), np.eye(n), 0.3 * np.eye(n))
        point = gs.optimizer_family(f, 1e4)
        assert point.limit == pytest.approx(n / (4 * np.pi))
        assert point.gap <= 1e-8


def test_optimizer_family_rejects_nonpositive_t():
    with pytest.raises(ValueError):
        gs.optimizer_family(mp.FreeFactor.make(0.0, 1.0, 0.0), 0.0)


def test_adjoint_has_same_limit(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        f = random_factor(rng, n)
        if not isinstance(f, mp.FreeFactor):
            continue
        a = gs.optimizer_family(f, 1e6)
        b = gs.optimizer_family(mp.free_inverse(f), 1e6)
        assert abs(a.limit - b.limit) <= 1e-9


def test_chirped_family_observation():
    # removing the chirp makes the product independent of t; this is an observation, not an attainment claim
    f = mp.FreeFactor.make(0.0, 2.0, 0.7)
    for t in (0.5, 3.0):
        point = gs.optimizer_family(f, t, chirped=True)
        assert point.sqrt_product == pytest.approx(point.limit, rel=1e-12)


def test_adapted_gaussian_singular_block():
    xi = sp.rank_one_blocks()
    mu = sp.mu_of_symplectic(xi)
    previous = np.inf
    for eps in (1.0, 0.1, 0.01, 0.001):
        g = gs.adapted_gaussian(xi, eps)
        w = mp.MetaplecticWord([mp.FreeFactor(d, min(mp.maslov_set(d.L))) for d in sp.factor_two_free(xi)])
        gap = np.sqrt(gs.variance_product(w, g)) - mu
        assert gap >= -1e-12 and gap <= previous + 1e-12
        previous = gap
    assert previous / mu <= 1e-2


def test_freq_chirp_matches_grid(rng):
    from mpk.numerics import apply_elementary_grid

    N, L = 1024, 16.0
    for C in (0.7, -0.4):
        g = gs.GaussianState(1.0, [[0.2 + 1.1j]])
        out = apply_elementary_grid(mp.FreqChirp(C), GridFunction.sample(g, 1, N, L))
        ref = gs.apply_elementary(mp.FreqChirp(C), g)(out.axis)
        assert np.max(np.abs(out.samples - ref)) <= 1e-10
