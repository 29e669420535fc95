"""Physical realizability tests and their frequency-domain counterparts.

Every check returns a :class:`RealizabilityReport`. Residuals are relative,
``||lhs|| / (1 + ||inputs||)``, and a condition holds when its residual is
below ``tol`` (default ``1e-8``). When the commutation matrix cannot be
recovered uniquely the verdict is ``INCONCLUSIVE``, never ``FAIL``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NotMinimal, ResolventSingular, SingularPencil, SingularTheta
from .model import (
    AnnihilationQsde,
    GeneralQsde,
    QuadratureQsde,
    Sigma,
    J,
    J_tilde,
    build_from_theta,
    decompose_scattering,
    transfer_eval,
)
from .numkernel import (
    EPS,
    as_cmat,
    hermitian_inertia,
    hermitian_part,
    is_hurwitz,
    norm2,
    solve_sylvester,
    spectral_abscissa,
)

DEFAULT_TOL = 1e-8
FREQ_TOL = 1e-7


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class RealizabilityReport:
    """Outcome of a realizability-type check.

    ``residuals`` maps condition names to relative residuals; conditions
    that are pass/fail predicates rather than equations are recorded as
    0.0 (holds) or 1.0 (violated). ``diagnostics`` holds advisory values
    (frequency sampling) that do not affect the verdict.
    """
    test: str
    verdict: Verdict
    certificate: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    failed_conditions: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def _rel(x, *inputs) -> float:
    return norm2(x) / (1.0 + sum(norm2(i) for i in inputs))


def _finish(test, residuals, tol, certificate, extra_failed=(), diagnostics=None):
    failed = [k for k, v in residuals.items() if not v < tol]
    failed.extend(c for c in extra_failed if c not in failed)
    verdict = Verdict.PASS if not failed and certificate is not None else Verdict.FAIL
    return RealizabilityReport(test, verdict, certificate, residuals, failed,
                               diagnostics or {})


def _inconclusive(test, residuals, message):
    return RealizabilityReport(test, Verdict.INCONCLUSIVE, None, residuals, [],
                               message=message)


def _flag(ok: bool) -> float:
    return 0.0 if ok else 1.0


# -- general doubled systems -----------------------------------------------------

def _scattering_residuals(K):
    m = K.shape[0] // 2
    return {
        "KJK^H=J": _rel(K @ J(m) @ K.conj().T - J(m), K),
        "KK^H=I": _rel(K @ K.conj().T - np.eye(2 * m), K),
    }


def _solve_theta(F, G, Jm):
    # F Theta + Theta F^H + G J G^H = 0; returns (raw solution, Hermitian part)
    raw = solve_sylvester(F, F.conj().T, G @ Jm @ G.conj().T)
    return raw, hermitian_part(raw)


def _theta_structure(raw, theta):
    n = theta.shape[0] // 2
    inertia = hermitian_inertia(theta)
    return {
        "theta_hermitian": _rel(raw - raw.conj().T, raw),
        "theta_doubled": _rel(Sigma(n) @ theta.conj() @ Sigma(n) + theta, theta),
    }, tuple(inertia) == (n, n, 0), inertia


def check_general(sys: GeneralQsde, tol: float = DEFAULT_TOL) -> RealizabilityReport:
    """Decide realizability of a doubled system.

    Checks the doubled block structure and the scattering conditions on
    ``K``, recovers ``Theta`` from
    ``F Theta + Theta F^H + G J G^H = 0``, verifies that ``Theta`` is a
    commutation matrix (Hermitian, ``Sigma Theta# Sigma = -Theta``, inertia
    ``(n, n, 0)``) and that
    ``G = -Theta H^H J K``.
    """
    F, G, H, K = sys.matrices()
    m = sys.m
    residuals = {"doubled": _flag(sys.is_doubled())}
    residuals.update(_scattering_residuals(K))
    try:
        raw, theta = _solve_theta(F, G, J(m))
    except SingularPencil as exc:
        return _inconclusive("general", residuals, str(exc))
    residuals["lyapunov"] = _rel(F @ theta + theta @ F.conj().T + G @ J(m) @ G.conj().T,
                                 F, theta, G)
    struct, inertia_ok, inertia = _theta_structure(raw, theta)
    residuals.update(struct)
    residuals["theta_inertia"] = _flag(inertia_ok)
    residuals["G=-ThetaH^HJK"] = _rel(G + theta @ H.conj().T @ J(m) @ K, G, theta, H)
    report = _finish("general", residuals, tol, theta)
    report.diagnostics["theta_inertia"] = tuple(inertia)
    return report


def check_annihilation(sys: AnnihilationQsde, tol: float = DEFAULT_TOL) -> RealizabilityReport:
    """Realizability of an annihilation-only system; certificate is ``Theta1 > 0``."""
    F, G, H, K = sys.matrices()
    n, m = sys.n, sys.m
    residuals = {"K^HK=I": _rel(K.conj().T @ K - np.eye(m), K)}
    try:
        theta1 = hermitian_part(solve_sylvester(F, F.conj().T, G @ G.conj().T))
    except SingularPencil as exc:
        return _inconclusive("annihilation", residuals, str(exc))
    residuals["lyapunov"] = _rel(F @ theta1 + theta1 @ F.conj().T + G @ G.conj().T,
                                 F, theta1, G)
    inertia = hermitian_inertia(theta1)
    residuals["theta1_positive"] = _flag(inertia.n_pos == n)
    residuals["G=-Theta1H^HK"] = _rel(G + theta1 @ H.conj().T @ K, G, theta1, H)
    report = _finish("annihilation", residuals, tol, theta1)
    report.diagnostics["theta1_inertia"] = tuple(inertia)
    return report


def check_quadrature(sys: QuadratureQsde, tol: float = DEFAULT_TOL) -> RealizabilityReport:
    """Realizability of a real quadrature system; certificate is real skew ``Theta~``."""
    A, B, C, D = sys.matrices()
    n, m = sys.n, sys.m
    Jm = J_tilde(m)
    residuals = {
        "DJD^T=J": _rel(D @ Jm @ D.T - Jm, D),
        "DD^T=I": _rel(D @ D.T - np.eye(2 * m), D),
    }
    try:
        tt = solve_sylvester(A, A.T, B @ Jm @ B.T).real
    except SingularPencil as exc:
        return _inconclusive("quadrature", residuals, str(exc))
    tt = 0.5 * (tt - tt.T)
    residuals["lyapunov"] = _rel(A @ tt + tt @ A.T + B @ Jm @ B.T, A, tt, B)
    # i*Theta~ is Hermitian with symmetric spectrum; nonsingular <=> inertia (n, n, 0)
    inertia = hermitian_inertia(1j * tt)
    residuals["theta_nonsingular"] = _flag(tuple(inertia) == (n, n, 0))
    residuals["B=ThetaC^TJD"] = _rel(B - tt @ C.T @ Jm @ D, B, tt, C)
    report = _finish("quadrature", residuals, tol, tt)
    report.diagnostics["theta_inertia"] = tuple(inertia)
    return report


# -- frequency-domain characterizations -------------------------------------------

def _random_rhp_points(count, rng):
    return rng.uniform(0.0, 3.0, count) + 1j * rng.uniform(-5.0, 5.0, count)


def dual_jj_residual(sys: GeneralQsde, s) -> float:
    """Relative residual of ``Gamma(s) J Gamma~(s) = J`` with ``Gamma~(s) = Gamma(-s*)^H``."""
    F, G, H, K = sys.matrices()
    Jm = J(sys.m)
    g = transfer_eval(F, G, H, K, s)
    g_tilde = transfer_eval(F, G, H, K, -np.conj(s)).conj().T
    return norm2(g @ Jm @ g_tilde - Jm) / (1.0 + norm2(g) * norm2(g_tilde))


def is_dual_jj_unitary(sys: GeneralQsde, tol: float = DEFAULT_TOL, samples: int = 20,
                       rng=None) -> RealizabilityReport:
    """State-space test for the dual (J, J)-unitary property.

    Verdict from ``K J K^H = J`` together with a Hermitian ``Theta``
    solving both ``F Theta + Theta F^H + G J G^H = 0`` and
    ``K J G^H + H Theta = 0``. The transfer-function identity at random
    right-half-plane points is recorded in ``diagnostics``.
    """
    rng = np.random.default_rng(rng)
    F, G, H, K = sys.matrices()
    m = sys.m
    residuals = {"KJK^H=J": _rel(K @ J(m) @ K.conj().T - J(m), K)}
    try:
        _, theta = _solve_theta(F, G, J(m))
    except SingularPencil as exc:
        return _inconclusive("dual_jj_unitary", residuals, str(exc))
    residuals["lyapunov"] = _rel(F @ theta + theta @ F.conj().T + G @ J(m) @ G.conj().T,
                                 F, theta, G)
    residuals["KJG^H+HTheta=0"] = _rel(K @ J(m) @ G.conj().T + H @ theta, K, G, H, theta)
    report = _finish("dual_jj_unitary", residuals, tol, theta)
    pts = _random_rhp_points(samples, rng)
    freq = []
    for s in pts:
        try:
            freq.append(dual_jj_residual(sys, s))
        except ResolventSingular:
            continue
    report.diagnostics["freq_residual_max"] = max(freq) if freq else 0.0
    report.diagnostics["freq_samples"] = len(freq)
    return report


def allpass_residual(sys: AnnihilationQsde, omega) -> float:
    g = transfer_eval(*sys.matrices(), 1j * omega)
    return norm2(g.conj().T @ g - np.eye(g.shape[1]))


def is_lossless_bounded_real(sys: AnnihilationQsde, tol: float = DEFAULT_TOL,
                             samples: int = 100) -> RealizabilityReport:
    """Complex lossless bounded real test for a minimal annihilation-only system.

    Requires ``F`` Hurwitz and ``X > 0`` with ``X F + F^H X + H^H H = 0``,
    ``H^H K = -X G`` and ``K^H K = I``. ``Gamma(iw)^H Gamma(iw) = I`` on
    log-spaced frequencies of both signs is recorded in ``diagnostics``.

    Raises :class:`NotMinimal` for non-minimal realizations.
    """
    F, G, H, K = sys.matrices()
    n, m = sys.n, sys.m
    if not is_minimal(F, G, H):
        raise NotMinimal("lossless bounded real test needs a minimal realization")
    residuals = {"K^HK=I": _rel(K.conj().T @ K - np.eye(m), K)}
    hurwitz = is_hurwitz(F)
    residuals["hurwitz"] = _flag(hurwitz)
    if not hurwitz:
        report = _finish("lossless_bounded_real", residuals, tol, None)
        report.diagnostics["spectral_abscissa"] = spectral_abscissa(F)
        return report
    x = hermitian_part(solve_sylvester(F.conj().T, F, H.conj().T @ H))
    residuals["lyapunov"] = _rel(x @ F + F.conj().T @ x + H.conj().T @ H, F, x, H)
    residuals["X_positive"] = _flag(hermitian_inertia(x).n_pos == n)
    residuals["H^HK=-XG"] = _rel(H.conj().T @ K + x @ G, H, K, x, G)
    report = _finish("lossless_bounded_real", residuals, tol, x)
    half = np.logspace(-3, 3, samples // 2)
    omegas = np.concatenate([-half[::-1], half]) if samples > 1 else np.array([0.0])
    report.diagnostics["freq_residual_max"] = max(allpass_residual(sys, w) for w in omegas)
    report.diagnostics["freq_samples"] = len(omegas)
    return report


# -- minimality --------------------------------------------------------------------

def _numerical_rank(mat) -> int:
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > max(mat.shape) * EPS * sv[0]))


def controllability_matrix(F, G):
    F, G = as_cmat(F), as_cmat(G)
    cols, block = [], G
    for _ in range(F.shape[0]):
        cols.append(block)
        block = F @ block
    return np.hstack(cols) if cols else np.zeros((0, G.shape[1]), complex)


def observability_matrix(F, H):
    return controllability_matrix(as_cmat(F).conj().T, as_cmat(H).conj().T).conj().T


def is_minimal(F, G, H) -> bool:
    """Controllability and observability rank test with a singular-value threshold."""
    F = as_cmat(F)
    n = F.shape[0]
    if n == 0:
        return True
    return (_numerical_rank(controllability_matrix(F, G)) == n
            and _numerical_rank(observability_matrix(F, H)) == n)


# -- parameter extraction -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExtractedParameters:
    S: np.ndarray
    M: np.ndarray
    N: np.ndarray
    theta: np.ndarray

    def rebuild(self) -> GeneralQsde:
        return build_from_theta(self.S, self.M, self.N, self.theta)


def extract_parameters(sys: GeneralQsde, theta) -> ExtractedParameters:
    """Recover ``(S, M, N)`` from a realizable system and its certificate.

    ``M = (i/2)(Theta^-1 F - F^H Theta^-1)``, ``N = H`` and ``S`` from
    ``K = diag(S, S#)``.
    """
    theta = as_cmat(theta)
    if theta.size and np.linalg.cond(theta) > 1e12:
        raise SingularTheta("commutation matrix is singular")
    F = sys.F
    tinv = np.linalg.inv(theta) if theta.size else theta
    M = hermitian_part(0.5j * (tinv @ F - F.conj().T @ tinv))
    S = decompose_scattering(sys.K)
    return ExtractedParameters(S=S, M=M, N=sys.H.copy(), theta=theta)
