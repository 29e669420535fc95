"""System representations and exact transformations between them.

Three representations are supported:

* :class:`GeneralQsde` -- the doubled annihilation/creation form, four
  complex matrices with the ``[[R1, R2], [R2#, R1#]]`` block structure;
* :class:`AnnihilationQsde` -- the annihilation-only form (passive systems);
* :class:`QuadratureQsde` -- the real position/momentum form.

Doubled matrices are plain complex ndarrays; the block structure is checked
with :func:`is_doubled` rather than encoded in a type.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameters,
    NonRealResult,
    NotDoubled,
    NotScattering,
    OddDimension,
    ResolventSingular,
    SingularT,
)
from .numkernel import (
    EPS,
    as_cmat,
    hermitian_inertia,
    is_hermitian,
    norm2,
)

STRUCTURE_RTOL = 1e-10
REAL_RESIDUE_TOL = 1e-12
T_COND_MAX = 1e12


# -- structural constants -----------------------------------------------------

def J(n: int) -> np.ndarray:
    """``diag(I_n, -I_n)``."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def Sigma(n: int) -> np.ndarray:
    """Block swap ``[[0, I], [I, 0]]``."""
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [i, z]]).astype(complex)


def Phi(n: int) -> np.ndarray:
    """Map from ``(a, a#)`` to ``(q, p)``: ``[[I, I], [-iI, iI]]``."""
    i = np.eye(n)
    return np.block([[i, i], [-1j * i, 1j * i]])


def Phi_inv(n: int) -> np.ndarray:
    # Phi Phi^H = 2I
    return 0.5 * Phi(n).conj().T


def J_tilde(n: int) -> np.ndarray:
    """Real symplectic form ``[[0, I], [-I, 0]]``."""
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


# -- doubled matrices -----------------------------------------------------------

def doubled(r1, r2) -> np.ndarray:
    """Assemble ``[[R1, R2], [conj(R2), conj(R1)]]``."""
    r1, r2 = as_cmat(r1), as_cmat(r2)
    if r1.shape != r2.shape:
        raise DimensionMismatch(f"blocks differ in shape: {r1.shape} vs {r2.shape}")
    return np.block([[r1, r2], [r2.conj(), r1.conj()]])


def blocks(r):
    """Return the (1,1) and (1,2) blocks of a doubled matrix."""
    r = as_cmat(r)
    p, q = r.shape[0] // 2, r.shape[1] // 2
    return r[:p, :q], r[:p, q:]


def doubling_residual(r) -> float:
    r = as_cmat(r)
    p2, q2 = r.shape
    if p2 % 2 or q2 % 2:
        raise OddDimension(f"shape {r.shape} is not even")
    return norm2(r @ Sigma(q2 // 2) - Sigma(p2 // 2) @ r.conj())


def is_doubled(r, rtol: float = STRUCTURE_RTOL) -> bool:
    """True iff ``R Sigma = Sigma R#`` within ``rtol * (1 + ||R||)``.

    Raises :class:`OddDimension` for odd row or column counts.
    """
    return doubling_residual(r) <= rtol * (1.0 + norm2(r))


def _require_doubled(name, r):
    if not is_doubled(r):
        raise NotDoubled(f"{name} does not have the doubled block structure")


# -- records -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneralQsde:
    """Doubled-form system ``(F, G, H, K)`` with ``n`` modes and ``m`` fields.

    Shapes are ``F: 2n x 2n``, ``G: 2n x 2m``, ``H: 2m x 2n``, ``K: 2m x 2m``.
    With ``strict=True`` (default) every matrix must be doubled.
    """
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    K: np.ndarray
    strict: bool = True

    def __post_init__(self):
        for name in "FGHK":
            object.__setattr__(self, name, as_cmat(getattr(self, name)))
        F, G, H, K = self.F, self.G, self.H, self.K
        if F.shape[0] % 2 or K.shape[0] % 2:
            raise OddDimension("doubled systems need even dimensions")
        n2, m2 = F.shape[0], K.shape[0]
        expected = {"F": (n2, n2), "G": (n2, m2), "H": (m2, n2), "K": (m2, m2)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if self.strict:
            for name in "FGHK":
                _require_doubled(name, getattr(self, name))

    @property
    def n(self) -> int:
        return self.F.shape[0] // 2

    @property
    def m(self) -> int:
        return self.K.shape[0] // 2

    def matrices(self):
        return self.F, self.G, self.H, self.K

    def is_doubled(self) -> bool:
        return all(is_doubled(x) for x in self.matrices())


@dataclass(frozen=True, eq=False)
class AnnihilationQsde:
    """Annihilation-only system ``(F, G, H, K)``; ``F: n x n``, ``K: m x m``."""
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        for name in "FGHK":
            object.__setattr__(self, name, as_cmat(getattr(self, name)))
        n, m = self.F.shape[0], self.K.shape[0]
        expected = {"F": (n, n), "G": (n, m), "H": (m, n), "K": (m, m)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def n(self) -> int:
        return self.F.shape[0]

    @property
    def m(self) -> int:
        return self.K.shape[0]

    def matrices(self):
        return self.F, self.G, self.H, self.K


@dataclass(frozen=True, eq=False)
class QuadratureQsde:
    """Real position/momentum system ``(A, B, C, D)``."""
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in "ABCD":
            arr = np.asarray(getattr(self, name))
            if np.iscomplexobj(arr):
                if np.max(np.abs(arr.imag), initial=0.0) > REAL_RESIDUE_TOL:
                    raise NonRealResult(f"{name} has a non-zero imaginary part")
                arr = arr.real
            arr = np.asarray(arr, dtype=float)
            if arr.ndim == 0:
                arr = arr.reshape(1, 1)
            object.__setattr__(self, name, arr)
        n2, m2 = self.A.shape[0], self.D.shape[0]
        if n2 % 2 or m2 % 2:
            raise OddDimension("quadrature systems need even dimensions")
        expected = {"A": (n2, n2), "B": (n2, m2), "C": (m2, n2), "D": (m2, m2)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def n(self) -> int:
        return self.A.shape[0] // 2

    @property
    def m(self) -> int:
        return self.D.shape[0] // 2

    def matrices(self):
        return self.A, self.B, self.C, self.D


@dataclass(frozen=True, eq=False)
class PhysicalParameters:
    """Scattering ``S`` (m x m), Hamiltonian ``M`` (2n x 2n), coupling ``N``
    (2m x 2n) and state transformation ``T`` (2n x 2n)."""
    S: np.ndarray
    M: np.ndarray
    N: np.ndarray
    T: np.ndarray | None = None

    def __post_init__(self):
        for name in ("S", "M", "N"):
            object.__setattr__(self, name, as_cmat(getattr(self, name)))
        if self.T is None:
            object.__setattr__(self, "T", np.eye(self.M.shape[0], dtype=complex))
        else:
            object.__setattr__(self, "T", as_cmat(self.T))

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2

    @property
    def m(self) -> int:
        return self.S.shape[0]

    def validate(self, rtol: float = STRUCTURE_RTOL):
        S, M, N, T = self.S, self.M, self.N, self.T
        n, m = self.n, self.m
        if M.shape != (2 * n, 2 * n) or N.shape != (2 * m, 2 * n) or T.shape != M.shape \
                or S.shape != (m, m):
            raise InvalidParameters("inconsistent parameter shapes")
        if norm2(S.conj().T @ S - np.eye(m)) > rtol * (1 + norm2(S)):
            raise InvalidParameters("S is not unitary")
        if not is_hermitian(M, rtol):
            raise InvalidParameters("M is not Hermitian")
        for name, r in (("M", M), ("N", N), ("T", T)):
            if not is_doubled(r, rtol):
                raise InvalidParameters(f"{name} is not doubled")


def unitary_to_doubled_k(S) -> np.ndarray:
    S = as_cmat(S)
    z = np.zeros_like(S)
    return np.block([[S, z], [z, S.conj()]])


# -- construction --------------------------------------------------------------

def theta_from_t(T) -> np.ndarray:
    """Commutation matrix ``T J T^H`` for a doubled nonsingular ``T``.

    Raises :class:`SingularT` when ``cond(T) >= 1e12`` and
    :class:`NotDoubled` when ``T`` lacks the doubled structure.
    """
    T = as_cmat(T)
    _require_doubled("T", T)
    if T.size and np.linalg.cond(T) >= T_COND_MAX:
        raise SingularT("T is singular or too badly conditioned")
    theta = T @ J(T.shape[0] // 2) @ T.conj().T
    return 0.5 * (theta + theta.conj().T)


def is_commutation_matrix(theta, rtol: float = STRUCTURE_RTOL) -> bool:
    """Check ``Theta = Theta^H``, ``Sigma Theta# Sigma = -Theta`` and inertia ``(n, n, 0)``."""
    theta = as_cmat(theta)
    n2 = theta.shape[0]
    if n2 % 2:
        return False
    n = n2 // 2
    scale = rtol * (1 + norm2(theta))
    if not is_hermitian(theta, rtol):
        return False
    if norm2(Sigma(n) @ theta.conj() @ Sigma(n) + theta) > scale:
        return False
    return tuple(hermitian_inertia(theta)) == (n, n, 0)


def build_from_theta(S, M, N, theta) -> GeneralQsde:
    """Doubled system generated by ``(S, M, N)`` under commutation matrix ``theta``."""
    S, M, N, theta = as_cmat(S), as_cmat(M), as_cmat(N), as_cmat(theta)
    n, m = M.shape[0] // 2, S.shape[0]
    z = np.zeros_like(S)
    F = -1j * theta @ M - 0.5 * theta @ N.conj().T @ J(m) @ N
    G = -theta @ N.conj().T @ np.block([[S, z], [z, -S.conj()]])
    H = N.copy()
    K = unitary_to_doubled_k(S)
    if n == 0:
        G = np.zeros((0, 2 * m), complex)
        H = np.zeros((2 * m, 0), complex)
    return GeneralQsde(F, G, H, K)


def build_general(params: PhysicalParameters):
    """Build the doubled system and its commutation matrix from physical parameters.

    Returns ``(system, theta)`` with ``theta = T J T^H``.
    """
    params.validate()
    theta = theta_from_t(params.T)
    return build_from_theta(params.S, params.M, params.N, theta), theta


def build_annihilation(S, M1, N1, theta1) -> AnnihilationQsde:
    """Annihilation-only system ``F = -i Th M1 - Th N1^H N1 / 2``, ``G = -Th N1^H S``,
    ``H = N1``, ``K = S`` with ``Th = theta1 > 0``."""
    S, M1, N1, theta1 = as_cmat(S), as_cmat(M1), as_cmat(N1), as_cmat(theta1)
    m, n = N1.shape
    if S.shape != (m, m) or M1.shape != (n, n) or theta1.shape != (n, n):
        raise InvalidParameters("inconsistent parameter shapes")
    if norm2(S.conj().T @ S - np.eye(m)) > STRUCTURE_RTOL * (1 + norm2(S)):
        raise InvalidParameters("S is not unitary")
    if not is_hermitian(M1):
        raise InvalidParameters("M1 is not Hermitian")
    if not is_hermitian(theta1):
        raise InvalidParameters("Theta1 is not Hermitian")
    if n and np.min(np.linalg.eigvalsh(0.5 * (theta1 + theta1.conj().T))) <= 0:
        raise InvalidParameters("Theta1 is not positive definite")
    F = -1j * theta1 @ M1 - 0.5 * theta1 @ N1.conj().T @ N1
    G = -theta1 @ N1.conj().T @ S
    return AnnihilationQsde(F, G, N1.copy(), S.copy())


def promote_to_general(sys: AnnihilationQsde) -> GeneralQsde:
    """Embed an annihilation-only system as a doubled system with zero off-diagonal blocks."""
    return GeneralQsde(*(doubled(x, np.zeros_like(x)) for x in sys.matrices()))


def promote_theta(theta1) -> np.ndarray:
    theta1 = as_cmat(theta1)
    return doubled(theta1, np.zeros_like(theta1)) @ J(theta1.shape[0])


# -- quadrature transform -------------------------------------------------------

def _conjugate_by_phi(r, rows: int, cols: int) -> np.ndarray:
    return Phi(rows) @ r @ Phi_inv(cols)


def _to_real(name, r):
    residue = np.max(np.abs(r.imag), initial=0.0)
    if residue >= REAL_RESIDUE_TOL * (1 + np.max(np.abs(r), initial=0.0)):
        raise NonRealResult(
            f"{name} has imaginary residue {residue:.3e}; input is not doubled")
    return r.real.copy()


def to_quadrature(sys: GeneralQsde, theta=None):
    """Real quadrature form ``A = Phi F Phi^-1`` etc.

    Returns ``(QuadratureQsde, theta_tilde)`` where
    ``theta_tilde = -(i/2) Phi theta Phi^H`` (``None`` when ``theta`` is not
    supplied).
    """
    n, m = sys.n, sys.m
    A = _to_real("A", _conjugate_by_phi(sys.F, n, n))
    B = _to_real("B", _conjugate_by_phi(sys.G, n, m))
    C = _to_real("C", _conjugate_by_phi(sys.H, m, n))
    D = _to_real("D", _conjugate_by_phi(sys.K, m, m))
    theta_tilde = None
    if theta is not None:
        theta = as_cmat(theta)
        theta_tilde = _to_real("ThetaTilde", -0.5j * Phi(n) @ theta @ Phi(n).conj().T)
    return QuadratureQsde(A, B, C, D), theta_tilde


def from_quadrature(sys: QuadratureQsde) -> GeneralQsde:
    """Inverse of :func:`to_quadrature`."""
    n, m = sys.n, sys.m

    def back(r, rows, cols):
        return Phi_inv(rows) @ r @ Phi(cols)

    return GeneralQsde(back(sys.A, n, n), back(sys.B, n, m),
                       back(sys.C, m, n), back(sys.D, m, m))


def theta_from_theta_tilde(theta_tilde) -> np.ndarray:
    """Inverse of ``theta_tilde = -(i/2) Phi theta Phi^H``."""
    theta_tilde = np.asarray(theta_tilde, dtype=complex)
    n = theta_tilde.shape[0] // 2
    return 2j * Phi_inv(n) @ theta_tilde @ Phi_inv(n).conj().T


# -- frequency domain ------------------------------------------------------------

def transfer_eval(F, G, H, K, s) -> np.ndarray:
    """``H (sI - F)^-1 G + K`` at complex ``s``.

    Raises :class:`ResolventSingular` if ``s`` is (numerically) an eigenvalue of ``F``.
    """
    F, G, H, K = as_cmat(F), as_cmat(G), as_cmat(H), as_cmat(K)
    n = F.shape[0]
    if n == 0:
        return K.copy()
    res = s * np.eye(n) - F
    sv = np.linalg.svd(res, compute_uv=False)
    if sv[-1] <= n * EPS * max(sv[0], 1.0) * 1e3:
        raise ResolventSingular(f"s = {s} is an eigenvalue of F")
    return H @ np.linalg.solve(res, G) + K


def transfer(sys, s) -> np.ndarray:
    return transfer_eval(*sys.matrices(), s)


def decompose_scattering(K, rtol: float = 1e-8) -> np.ndarray:
    """Recover unitary ``S`` from ``K = diag(S, S#)``.

    Succeeds iff ``K J K^H = J`` and ``K K^H = I``; otherwise raises
    :class:`NotScattering`.
    """
    K = as_cmat(K)
    if not is_doubled(K):
        raise NotScattering("K is not doubled")
    m = K.shape[0] // 2
    tol = rtol * (1 + norm2(K))
    if norm2(K @ J(m) @ K.conj().T - J(m)) > tol:
        raise NotScattering("K J K^H != J")
    if norm2(K @ K.conj().T - np.eye(2 * m)) > tol:
        raise NotScattering("K is not unitary")
    return K[:m, :m].copy()
