import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from oracles import grid_hinf, kron_rowmajor_oracle, power_iteration_radius, scalar_care_root

from qlinsys.corpus import crandn, random_doubled_t, random_positive_definite, random_stable
from qlinsys.errors import (
    ImaginaryAxisEigenvalue,
    NotHermitian,
    SingularPencil,
    UnstableSystem,
)
from qlinsys.model import J
from qlinsys.numkernel import (
    care_residual,
    hermitian_inertia,
    hinf_norm,
    is_hurwitz,
    norm2,
    sigma_max_at,
    solve_care_stabilizing,
    solve_lyapunov,
    solve_sylvester,
    spectral_radius,
    stability_margin,
)


# -- Sylvester / Lyapunov ------------------------------------------------------------

def test_sylvester_forced_half():
    q = np.array([[1.0, 2.0 - 1j], [0.5j, -3.0]])
    x = solve_sylvester(-np.eye(2), -np.eye(2), q)
    np.testing.assert_allclose(x, q / 2, atol=1e-14)


def test_sylvester_diagonal_decoupling():
    a = np.diag([-1.0, -2.0])
    x = solve_sylvester(a, a.conj().T, np.eye(2))
    np.testing.assert_allclose(x, np.diag([0.5, 0.25]), atol=1e-14)


@pytest.mark.parametrize("method", ["kron", "schur", "auto"])
def test_sylvester_matches_rowmajor_oracle(rng, method):
    for _ in range(50):
        n, p = rng.integers(1, 7, size=2)
        a, b = random_stable(rng, n), random_stable(rng, p)
        c = crandn(rng, n, p)
        x = solve_sylvester(a, b, c, method=method)
        ref = kron_rowmajor_oracle(a, b, c)
        assert norm2(x - ref) <= 1e-10 * (1 + norm2(ref))
        assert norm2(a @ x + x @ b + c) / (1 + norm2(c)) < 1e-10


def test_sylvester_random_stable_hermitian_rhs(rng):
    a = random_stable(rng, 4)
    c = crandn(rng, 4, 4)
    c = c + c.conj().T
    x = solve_sylvester(a, a.conj().T, c)
    np.testing.assert_allclose(x, kron_rowmajor_oracle(a, a.conj().T, c), atol=1e-10)


def test_sylvester_large_uses_schur_path(rng):
    a, b = random_stable(rng, 25), random_stable(rng, 20)
    c = crandn(rng, 25, 20)
    x = solve_sylvester(a, b, c)
    assert norm2(a @ x + x @ b + c) / (1 + norm2(c)) < 1e-10


def test_sylvester_singular_pencil():
    a = np.diag([1.0, -2.0])
    with pytest.raises(SingularPencil):
        solve_sylvester(a, np.diag([-1.0, 5.0]), np.eye(2))


def test_sylvester_empty():
    assert solve_sylvester(np.zeros((0, 0)), -np.eye(2), np.zeros((0, 2))).shape == (0, 2)


def test_lyapunov_is_hermitian(rng):
    a = random_stable(rng, 5)
    q = random_positive_definite(rng, 5)
    x = solve_lyapunov(a, q)
    assert np.allclose(x, x.conj().T)
    assert norm2(a @ x + x @ a.conj().T + q) < 1e-10 * (1 + norm2(q))
    assert np.all(np.linalg.eigvalsh(x) > 0)


# -- Riccati -------------------------------------------------------------------------

def test_care_linear_case():
    sol = solve_care_stabilizing(-1.0, 0.0, 1.0)
    assert sol.X[0, 0] == pytest.approx(0.5, abs=1e-14)
    assert sol.stabilizing


def test_care_scalar_quadratic():
    sol = solve_care_stabilizing(0.0, -1.0, 1.0)
    assert sol.X[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert sol.closed_loop_abscissa == pytest.approx(-1.0, abs=1e-12)


def test_care_scalar_closed_form(rng):
    worst = 0.0
    for _ in range(200):
        a = complex(-rng.uniform(0.1, 3.0), rng.normal())
        w, q = -rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)
        x = solve_care_stabilizing(a, w, q).X[0, 0]
        ref = scalar_care_root(a, w, q)
        worst = max(worst, abs(x - ref) / (1 + abs(ref)))
    assert worst < 1e-10


def test_care_scalar_closed_form_indefinite_w(rng):
    for _ in range(100):
        a = complex(rng.normal(), rng.normal())
        w, q = rng.normal(), rng.normal()
        if a.real ** 2 - w * q < 0.05 or abs(w) < 0.05:
            continue
        x = solve_care_stabilizing(a, w, q).X[0, 0]
        assert abs(x - scalar_care_root(a, w, q)) < 1e-10 * (1 + abs(x))


def test_care_matrix_residual_and_stability(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        a = crandn(rng, n, n)
        b = crandn(rng, n, 2)
        w = -b @ b.conj().T
        q = random_positive_definite(rng, n)
        sol = solve_care_stabilizing(a, w, q)
        assert np.allclose(sol.X, sol.X.conj().T)
        assert norm2(care_residual(a, w, q, sol.X)) < 1e-8 * (1 + norm2(sol.X) ** 2)
        assert is_hurwitz(a + w @ sol.X)
        assert sol.stabilizing


def test_care_imaginary_axis():
    # A = 0, W = 0, Q = 0: Hamiltonian is zero.
    with pytest.raises(ImaginaryAxisEigenvalue):
        solve_care_stabilizing(0.0, 0.0, 0.0)
    # Lossless rotation without damping: eigenvalues +/- i.
    with pytest.raises(ImaginaryAxisEigenvalue):
        solve_care_stabilizing(np.array([[0, 1], [-1, 0]]), np.zeros((2, 2)), np.eye(2))


def test_care_not_hermitian():
    with pytest.raises(NotHermitian):
        solve_care_stabilizing(-np.eye(2), np.array([[0, 1], [0, 0]]), np.eye(2))


# -- H-infinity norm -----------------------------------------------------------------

def test_hinf_first_order_lag():
    assert hinf_norm(-1.0, 1.0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-6)


def test_hinf_zero_input():
    assert hinf_norm(-1.0, 0.0, 1.0, 0.0) == 0.0


def test_hinf_static_gain():
    k = np.array([[3.0, 0], [0, 1j]])
    assert hinf_norm(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), k) == \
        pytest.approx(3.0)


def test_hinf_unstable():
    with pytest.raises(UnstableSystem):
        hinf_norm(np.array([[0.1]]), 1.0, 1.0)


def test_hinf_resonant_peak():
    # 1 / (s^2 + 0.2 s + 1): peak 1 / (2 zeta sqrt(1 - zeta^2)) with zeta = 0.1
    f = np.array([[0.0, 1.0], [-1.0, -0.2]])
    g = np.array([[0.0], [1.0]])
    h = np.array([[1.0, 0.0]])
    zeta = 0.1
    assert hinf_norm(f, g, h) == pytest.approx(1 / (2 * zeta * np.sqrt(1 - zeta**2)), rel=1e-6)


def test_hinf_against_grid(rng):
    for _ in range(10):
        n, m, p = 4, 2, 2
        f = random_stable(rng, n, margin=0.2)
        g, h, k = crandn(rng, n, m), crandn(rng, p, n), 0.3 * crandn(rng, p, m)
        ref = grid_hinf(f, g, h, k)
        val = hinf_norm(f, g, h, k)
        assert abs(val - ref) < 1e-4 * max(1.0, ref)
        assert val >= ref * (1 - 1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), omega=st.floats(-50, 50))
def test_hinf_lower_bound_consistency(seed, omega):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    f = random_stable(rng, n)
    g, h = crandn(rng, n, 2), crandn(rng, 2, n)
    assert hinf_norm(f, g, h) >= sigma_max_at(f, g, h, np.zeros((2, 2)), omega) * (1 - 1e-8)


# -- spectral predicates -------------------------------------------------------------

def test_is_hurwitz_examples():
    assert is_hurwitz(np.diag([-1.0, -2.0]))
    assert not is_hurwitz(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    companion = np.array([[0.0, 1.0], [-1.0, -1.0]])
    assert np.all(np.roots([1, 1, 1]).real < 0)
    assert is_hurwitz(companion)


def test_stability_margin_is_relative():
    assert stability_margin(np.eye(3)) == pytest.approx(2e-9)
    assert not is_hurwitz(np.array([[-1e-12]]))


def test_spectral_radius_examples():
    assert spectral_radius(np.diag([0.5, 0.2])) == pytest.approx(0.5)
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_spectral_radius_power_iteration(rng):
    for _ in range(50):
        x = random_positive_definite(rng, 4, floor=0.0)
        y = random_positive_definite(rng, 4, floor=0.0)
        prod = x @ y
        assert spectral_radius(prod) == pytest.approx(power_iteration_radius(prod), rel=1e-8)


# -- inertia -------------------------------------------------------------------------

def test_inertia_examples():
    assert tuple(hermitian_inertia(J(2))) == (2, 2, 0)
    assert tuple(hermitian_inertia(np.eye(4))) == (4, 0, 0)
    assert tuple(hermitian_inertia(np.diag([1.0, 0.0, -2.0]))) == (1, 1, 1)


def test_inertia_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_inertia(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_inertia_congruence(seed, n):
    t = random_doubled_t(np.random.default_rng(seed), n)
    inertia = hermitian_inertia(t @ J(n) @ t.conj().T)
    assert tuple(inertia) == (n, n, 0)
    assert sum(inertia) == 2 * n
