"""Dense complex linear-algebra kernels.

Sylvester/Lyapunov solves, stabilizing Riccati solutions from ordered Schur
forms of the Hamiltonian matrix, H-infinity norm by bisection, and a few
spectral predicates. Everything works on complex ``numpy`` arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    ImaginaryAxisEigenvalue,
    NoStabilizingSolution,
    NotHermitian,
    SingularPencil,
    UnstableSystem,
)

EPS = np.finfo(float).eps

SYLVESTER_RTOL = 1e-10
HERMITIAN_RTOL = 1e-10
SINGULAR_PENCIL_TOL = 1e-10
KRON_MAX_SIZE = 400
IMAG_AXIS_RTOL = 1e-7


def as_cmat(a) -> np.ndarray:
    """Coerce to a 2-D complex array and reject non-finite entries."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got array with ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def norm2(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_part(a):
    return 0.5 * (a + a.conj().T)


def is_hermitian(a, rtol=HERMITIAN_RTOL) -> bool:
    a = as_cmat(a)
    if a.shape[0] != a.shape[1]:
        return False
    return norm2(a - a.conj().T) <= rtol * (1.0 + norm2(a))


def stability_margin(a) -> float:
    return 1e-9 * (1.0 + norm2(a))


def spectral_abscissa(a) -> float:
    a = as_cmat(a)
    if a.size == 0:
        return -np.inf
    return float(np.max(np.linalg.eigvals(a).real))


def is_hurwitz(a) -> bool:
    """True iff every eigenvalue of ``a`` has real part below ``-stability_margin(a)``.

    An empty matrix is Hurwitz.
    """
    a = as_cmat(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("is_hurwitz needs a square matrix")
    return spectral_abscissa(a) < -stability_margin(a)


def spectral_radius(a) -> float:
    a = as_cmat(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


@dataclass(frozen=True)
class Inertia:
    n_pos: int
    n_neg: int
    n_zero: int

    def __iter__(self):
        return iter((self.n_pos, self.n_neg, self.n_zero))


def hermitian_inertia(a) -> Inertia:
    """Count positive, negative and (numerically) zero eigenvalues of a Hermitian matrix.

    The zero threshold is ``dim * eps * ||a||``.
    """
    a = as_cmat(a)
    if not is_hermitian(a):
        raise NotHermitian("hermitian_inertia requires a Hermitian matrix")
    dim = a.shape[0]
    if dim == 0:
        return Inertia(0, 0, 0)
    w = np.linalg.eigvalsh(hermitian_part(a))
    thresh = dim * EPS * norm2(a)
    n_pos = int(np.sum(w > thresh))
    n_neg = int(np.sum(w < -thresh))
    return Inertia(n_pos, n_neg, dim - n_pos - n_neg)


# -- Sylvester ---------------------------------------------------------------

def _sylvester_kron(a, b, c):
    n, p = c.shape
    # Column-major vec: vec(AX + XB) = (I_p kron A + B^T kron I_n) vec(X)
    op = np.kron(np.eye(p), a) + np.kron(b.T, np.eye(n))
    x = np.linalg.solve(op, -c.reshape(-1, order="F"))
    return x.reshape((n, p), order="F")


def _sylvester_schur(a, b, c):
    # Bartels-Stewart via complex Schur forms; scipy solves AX + XB = Q.
    return sla.solve_sylvester(a, b, -c)


def solve_sylvester(a, b, c, method: str = "auto") -> np.ndarray:
    """Solve ``A X + X B + C = 0`` for ``X``.

    Parameters
    ----------
    a : (n, n) array_like
    b : (p, p) array_like
    c : (n, p) array_like
    method : {"auto", "kron", "schur"}
        ``"auto"`` uses Kronecker vectorization while ``n*p <= 400`` and the
        Schur-based substitution above that.

    Raises
    ------
    SingularPencil
        If an eigenvalue of ``a`` and an eigenvalue of ``-b`` coincide
        within tolerance, so the solution is not unique.
    """
    a, b, c = as_cmat(a), as_cmat(b), as_cmat(c)
    n, p = c.shape
    if a.shape != (n, n) or b.shape != (p, p):
        raise ValueError("solve_sylvester: incompatible shapes")
    if n == 0 or p == 0:
        return np.zeros((n, p), dtype=complex)
    la = np.linalg.eigvals(a)
    lb = np.linalg.eigvals(b)
    gap = np.min(np.abs(la[:, None] + lb[None, :]))
    scale = 1.0 + norm2(a) + norm2(b)
    if gap <= SINGULAR_PENCIL_TOL * scale:
        raise SingularPencil(
            f"spectra of A and -B overlap (gap {gap:.3e}); solution not unique")
    if method == "auto":
        method = "kron" if n * p <= KRON_MAX_SIZE else "schur"
    if method == "kron":
        x = _sylvester_kron(a, b, c)
    elif method == "schur":
        x = _sylvester_schur(a, b, c)
    else:
        raise ValueError(f"unknown method {method!r}")
    return x


def solve_lyapunov(a, q) -> np.ndarray:
    """Solve ``A X + X A^H + Q = 0`` and return the Hermitian part of ``X``."""
    a = as_cmat(a)
    x = solve_sylvester(a, a.conj().T, q)
    if is_hermitian(q):
        x = hermitian_part(x)
    return x


# -- Riccati ------------------------------------------------------------------

@dataclass(frozen=True)
class RiccatiSolution:
    X: np.ndarray
    residual_norm: float
    closed_loop_abscissa: float
    stabilizing: bool


def care_residual(a, w, q, x):
    return a.conj().T @ x + x @ a + x @ w @ x + q


def solve_care_stabilizing(a, w, q, refine_steps: int = 2) -> RiccatiSolution:
    """Stabilizing solution of ``A^H X + X A + X W X + Q = 0``.

    ``W`` and ``Q`` must be Hermitian. The solution is taken from the stable
    invariant subspace of ``[[A, W], [-Q, -A^H]]`` computed with an ordered
    complex Schur form, symmetrized, then polished by Newton steps if the
    residual is above ``1e-8 * (1 + ||X||^2)``.

    Raises
    ------
    NotHermitian
        If ``w`` or ``q`` is not Hermitian.
    ImaginaryAxisEigenvalue
        If the Hamiltonian has eigenvalues on the imaginary axis, including
        defective ones detected through a non-Hurwitz ``A + W X``.
    NoStabilizingSolution
        If the stable subspace exists but is not a graph over the first
        block (the leading block is singular).
    """
    a, w, q = as_cmat(a), as_cmat(w), as_cmat(q)
    n = a.shape[0]
    if a.shape != (n, n) or w.shape != (n, n) or q.shape != (n, n):
        raise ValueError("solve_care_stabilizing: incompatible shapes")
    if not is_hermitian(w) or not is_hermitian(q):
        raise NotHermitian("W and Q must be Hermitian")
    if n == 0:
        return RiccatiSolution(np.zeros((0, 0), complex), 0.0, -np.inf, True)
    w, q = hermitian_part(w), hermitian_part(q)

    ham = np.block([[a, w], [-q, -a.conj().T]])
    margin = stability_margin(ham)
    eigs = np.linalg.eigvals(ham)
    if np.any(np.abs(eigs.real) < margin):
        raise ImaginaryAxisEigenvalue(
            "Hamiltonian matrix has eigenvalues on the imaginary axis")

    t, z, sdim = sla.schur(ham, output="complex", sort="lhp")
    if sdim != n:
        raise ImaginaryAxisEigenvalue(
            f"stable subspace has dimension {sdim}, expected {n}")
    u1, u2 = z[:n, :n], z[n:, :n]
    if np.linalg.cond(u1) > 1.0 / (n * EPS * 1e2):
        raise NoStabilizingSolution("stable invariant subspace is not a graph")
    x = hermitian_part(np.linalg.solve(u1.conj().T, u2.conj().T).conj().T)

    for _ in range(refine_steps):
        res = care_residual(a, w, q, x)
        if norm2(res) < 1e-13 * (1 + norm2(x) ** 2):
            break
        acl = a + w @ x
        try:
            dx = solve_sylvester(acl.conj().T, acl, res)
        except SingularPencil:
            break
        x_new = hermitian_part(x + dx)
        if norm2(care_residual(a, w, q, x_new)) >= norm2(res):
            break
        x = x_new

    res_norm = norm2(care_residual(a, w, q, x))
    acl = a + w @ x
    abscissa = spectral_abscissa(acl)
    if not abscissa < -stability_margin(acl):
        # Defective axis eigenvalues split by ~sqrt(eps) and can slip past the margin test.
        raise ImaginaryAxisEigenvalue(
            f"closed loop A + WX has spectral abscissa {abscissa:.3e}; "
            "Hamiltonian eigenvalues lie on the imaginary axis")
    return RiccatiSolution(X=x, residual_norm=res_norm, closed_loop_abscissa=abscissa,
                           stabilizing=True)


# -- H-infinity norm ----------------------------------------------------------

def freq_response(f, g, h, k, s):
    """Evaluate ``H (sI - F)^-1 G + K`` at a single complex point."""
    n = f.shape[0]
    if n == 0:
        return k.copy()
    return h @ np.linalg.solve(s * np.eye(n) - f, g) + k


def sigma_max_at(f, g, h, k, omega) -> float:
    return norm2(freq_response(f, g, h, k, 1j * omega))


def _has_imag_axis_eig(f, g, h, k, gamma):
    """Return the imaginary-axis frequencies of the gamma-Hamiltonian (empty if none)."""
    m = g.shape[1]
    r = gamma**2 * np.eye(m) - k.conj().T @ k
    rinv = np.linalg.inv(r)
    ah = f + g @ rinv @ k.conj().T @ h
    ham = np.block([
        [ah, g @ rinv @ g.conj().T],
        [-h.conj().T @ (np.eye(k.shape[0]) + k @ rinv @ k.conj().T) @ h, -ah.conj().T],
    ])
    eigs = np.linalg.eigvals(ham)
    on_axis = np.abs(eigs.real) < IMAG_AXIS_RTOL * (1 + np.abs(eigs))
    return eigs[on_axis].imag


def hinf_norm(f, g, h, k=None, rtol: float = 1e-9) -> float:
    """H-infinity norm of ``H (sI - F)^-1 G + K`` for Hurwitz ``F``.

    Bisection on gamma: gamma is an upper bound exactly when the associated
    Hamiltonian has no imaginary-axis eigenvalues. Imaginary-axis
    eigenvalues found along the way are evaluated to tighten the lower
    bound. Complex systems are handled, so both signs of frequency count.
    """
    f, g, h = as_cmat(f), as_cmat(g), as_cmat(h)
    if k is None:
        k = np.zeros((h.shape[0], g.shape[1]), dtype=complex)
    k = as_cmat(k)
    n = f.shape[0]
    if n and not is_hurwitz(f):
        raise UnstableSystem("hinf_norm requires a Hurwitz state matrix")
    k_norm = norm2(k)
    if n == 0 or norm2(g) == 0.0 or norm2(h) == 0.0:
        return k_norm

    lower = max(sigma_max_at(f, g, h, k, 0.0), sigma_max_at(f, g, h, k, 1.0), k_norm)
    abscissa = abs(spectral_abscissa(f))
    upper = k_norm + 2.0 * norm2(h) * norm2(g) / abscissa
    upper = max(upper, 1.01 * lower, 1e-300)
    # The bracket above is cheap but not a certificate for non-normal F.
    for _ in range(200):
        freqs = _has_imag_axis_eig(f, g, h, k, upper)
        if freqs.size == 0:
            break
        lower = max(lower, max(sigma_max_at(f, g, h, k, w) for w in freqs))
        upper *= 2.0

    while upper - lower > rtol * upper:
        gamma = 0.5 * (lower + upper) if lower <= 0 else np.sqrt(lower * upper)
        if gamma <= k_norm * (1 + 1e-12):
            gamma = 0.5 * (lower + upper)
        freqs = _has_imag_axis_eig(f, g, h, k, gamma)
        if freqs.size == 0:
            upper = gamma
        else:
            peak = max(sigma_max_at(f, g, h, k, w) for w in freqs)
            lower = min(max(lower, gamma, peak), upper)
    return float(upper)
