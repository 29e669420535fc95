"""Coherent H-infinity controller synthesis for annihilation-only plants.

The plant is

    da = F a dt + [G0 G1 G2] [dv; dw; du]
    dz = H1 a dt + K12 du
    dy = H2 a dt + [K20 K21 0] [dv; dw; du]

and the controller is built from the stabilizing solutions of two complex
Riccati equations (central controller with unit attenuation gain). A
controller whose own transfer function has norm below one can then be
completed with extra noise channels so that it is physically realizable.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolation,
    ControllerNotDirectlyRealizable,
    CouplingFailure,
    DimensionMismatch,
    IndefiniteSolution,
    NoStabilizingSolution,
    NormTooLarge,
    NotHurwitz,
    NotMinimal,
    RiccatiUnsolvable,
)
from .model import AnnihilationQsde
from .numkernel import (
    RiccatiSolution,
    as_cmat,
    care_residual,
    hermitian_part,
    hinf_norm,
    is_hurwitz,
    norm2,
    solve_care_stabilizing,
    spectral_abscissa,
    spectral_radius,
)
from .realizability import check_annihilation, is_minimal

log = logging.getLogger(__name__)

# Disturbance attenuation gain in the central controller. Only g = 1 is
# consistent with the unit closed-loop H-infinity bound.
ATTENUATION_GAIN = 1.0

E_FLOOR = 1e-10
PSD_FLOOR = 1e-10
ZERO_AXIS_TOL = 1e-7
COUPLING_COND_MAX = 1e10
NORM_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class HinfPlant:
    F: np.ndarray
    G0: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    K12: np.ndarray
    K20: np.ndarray
    K21: np.ndarray

    NAMES = ("F", "G0", "G1", "G2", "H1", "H2", "K12", "K20", "K21")

    def __post_init__(self):
        for name in self.NAMES:
            object.__setattr__(self, name, as_cmat(getattr(self, name)))
        n = self.F.shape[0]
        m0, m1, m2 = self.G0.shape[1], self.G1.shape[1], self.G2.shape[1]
        p1, p2 = self.H1.shape[0], self.H2.shape[0]
        expected = {
            "F": (n, n), "G0": (n, m0), "G1": (n, m1), "G2": (n, m2),
            "H1": (p1, n), "H2": (p2, n), "K12": (p1, m2), "K20": (p2, m0),
            "K21": (p2, m1),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"plant matrix {name} has shape {getattr(self, name).shape}, "
                    f"expected {shape}")

    @property
    def dims(self) -> dict:
        return {"n": self.F.shape[0], "m0": self.G0.shape[1], "m1": self.G1.shape[1],
                "m2": self.G2.shape[1], "p1": self.H1.shape[0], "p2": self.H2.shape[0]}

    @property
    def E1(self):
        return self.K12.conj().T @ self.K12

    @property
    def E2(self):
        return self.K21 @ self.K21.conj().T


@dataclass(frozen=True, eq=False)
class Completion:
    """Noise channels that make a controller physically realizable.

    Input matrix ``[Gc0, Gc1, Gc]``, output matrix ``[Hc; Hc0; Hc1]`` and
    feedthrough ``diag(Kc, Kc0, Kc1)``.
    """
    Gc0: np.ndarray
    Gc1: np.ndarray
    Hc0: np.ndarray
    Hc1: np.ndarray
    Kc: np.ndarray
    Kc0: np.ndarray
    Kc1: np.ndarray
    theta1: np.ndarray | None = None

    NAMES = ("Gc0", "Gc1", "Hc0", "Hc1", "Kc", "Kc0", "Kc1")


@dataclass(frozen=True, eq=False)
class HinfController:
    Fc: np.ndarray
    Gc: np.ndarray
    Hc: np.ndarray
    completion: Completion | None = None

    def __post_init__(self):
        for name in ("Fc", "Gc", "Hc"):
            object.__setattr__(self, name, as_cmat(getattr(self, name)))
        nc = self.Fc.shape[0]
        if self.Fc.shape != (nc, nc) or self.Gc.shape[0] != nc or self.Hc.shape[1] != nc:
            raise DimensionMismatch("controller matrices are incompatible")

    def as_qsde(self) -> AnnihilationQsde:
        """The full controller QSDE including completion channels."""
        if self.completion is None:
            raise ValueError("controller has no realizability completion")
        c = self.completion
        G = np.hstack([c.Gc0, c.Gc1, self.Gc])
        H = np.vstack([self.Hc, c.Hc0, c.Hc1])
        K = _block_diag(c.Kc, c.Kc0, c.Kc1)
        return AnnihilationQsde(self.Fc, G, H, K)


def _block_diag(*mats):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


@dataclass
class ClosedLoop:
    Fcl: np.ndarray
    Gcl: np.ndarray
    Hcl: np.ndarray
    hurwitz: bool
    spectral_abscissa: float
    hinf_norm_value: float | None

    @property
    def meets_target(self) -> bool:
        return self.hurwitz and self.hinf_norm_value is not None and self.hinf_norm_value < 1


# -- assumptions ----------------------------------------------------------------

def invariant_zeros(F, G, H, K) -> np.ndarray:
    """Invariant zeros of ``[[F - sI, G], [H, K]]`` for ``K`` of full column rank.

    With ``K`` left-invertible the pencil drops column rank exactly at the
    unobservable eigenvalues of ``(F - G K^+ H, K_perp^H H)``, where
    ``K_perp`` spans the orthogonal complement of ``range(K)``. Those are
    found with a PBH rank test on each eigenvalue.
    """
    F, G, H, K = map(as_cmat, (F, G, H, K))
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, complex)
    kplus = np.linalg.pinv(K)
    a = F - G @ kplus @ H
    u, sv, _ = np.linalg.svd(K)
    rank = int(np.sum(sv > max(K.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0)))
    k_perp = u[:, rank:]
    c = k_perp.conj().T @ H
    eigs = np.linalg.eigvals(a)
    if c.shape[0] == 0:
        return eigs
    zeros = []
    scale = 1.0 + norm2(a) + norm2(c)
    for lam in eigs:
        pbh = np.vstack([a - lam * np.eye(n), c])
        if np.linalg.svd(pbh, compute_uv=False)[-1] < 1e-8 * scale:
            zeros.append(lam)
    return np.array(zeros, dtype=complex)


@dataclass
class AssumptionReport:
    passed: bool
    violations: list = field(default_factory=list)
    values: dict = field(default_factory=dict)


def check_plant_assumptions(plant: HinfPlant) -> AssumptionReport:
    """Check the four standing assumptions of the synthesis problem.

    i) ``E1 = K12^H K12 > 0``; ii) ``E2 = K21 K21^H > 0``; iii)/iv) the
    control and measurement system pencils have no invariant zeros within
    ``1e-7`` of the imaginary axis.
    """
    values, violations = {}, []
    for label, e in (("i", plant.E1), ("ii", plant.E2)):
        floor = float(np.min(np.linalg.eigvalsh(hermitian_part(e)))) if e.size else np.inf
        values[f"{label}:min_eig"] = floor
        if not floor > E_FLOOR:
            violations.append(label)

    def axis_distance(zs):
        return float(np.min(np.abs(zs.real))) if zs.size else np.inf

    if "i" not in violations:
        z = invariant_zeros(plant.F, plant.G2, plant.H1, plant.K12)
        values["iii:zeros"] = z
        values["iii:axis_distance"] = axis_distance(z)
        if values["iii:axis_distance"] < ZERO_AXIS_TOL:
            violations.append("iii")
    else:
        violations.append("iii")
    if "ii" not in violations:
        # Row-rank condition: apply the column test to the dual system.
        z = invariant_zeros(plant.F.conj().T, plant.H2.conj().T, plant.G1.conj().T,
                            plant.K21.conj().T).conj()
        values["iv:zeros"] = z
        values["iv:axis_distance"] = axis_distance(z)
        if values["iv:axis_distance"] < ZERO_AXIS_TOL:
            violations.append("iv")
    else:
        violations.append("iv")
    return AssumptionReport(not violations, violations, values)


# -- Riccati equations ------------------------------------------------------------

def riccati_x_data(plant: HinfPlant):
    """``(A, W, Q)`` such that the X-equation reads ``A^H X + X A + X W X + Q = 0``."""
    p = plant
    e1inv = np.linalg.inv(p.E1)
    a = p.F - p.G2 @ e1inv @ p.K12.conj().T @ p.H1
    w = p.G1 @ p.G1.conj().T - p.G2 @ e1inv @ p.G2.conj().T
    q = p.H1.conj().T @ (np.eye(p.K12.shape[0]) - p.K12 @ e1inv @ p.K12.conj().T) @ p.H1
    return a, hermitian_part(w), hermitian_part(q)


def riccati_y_data(plant: HinfPlant):
    """``(A, W, Q)`` such that the Y-equation reads ``A^H Y + Y A + Y W Y + Q = 0``.

    ``A`` is the conjugate transpose of ``F - G1 K21^H E2^-1 H2``.
    """
    p = plant
    e2inv = np.linalg.inv(p.E2)
    a = (p.F - p.G1 @ p.K21.conj().T @ e2inv @ p.H2).conj().T
    w = p.H1.conj().T @ p.H1 - p.H2.conj().T @ e2inv @ p.H2
    q = p.G1 @ (np.eye(p.K21.shape[1]) - p.K21.conj().T @ e2inv @ p.K21) @ p.G1.conj().T
    return a, hermitian_part(w), hermitian_part(q)


def x_closed_loop(plant, X):
    a, w, _ = riccati_x_data(plant)
    return a + w @ X


def y_closed_loop(plant, Y):
    a, w, _ = riccati_y_data(plant)
    return a.conj().T + Y @ w


@dataclass
class SynthesisResult:
    X: np.ndarray
    Y: np.ndarray
    controller: HinfController
    x_solution: RiccatiSolution
    y_solution: RiccatiSolution
    coupling_radius: float
    coupling_cond: float
    attenuation_gain: float = ATTENUATION_GAIN

    def __iter__(self):
        return iter((self.X, self.Y, self.controller))


def _solve_riccati(label, data):
    try:
        sol = solve_care_stabilizing(*data)
    except NoStabilizingSolution as exc:
        raise RiccatiUnsolvable(f"{label}: {exc}", hypothesis=label) from exc
    if not sol.stabilizing:
        raise RiccatiUnsolvable(f"{label}: solution is not stabilizing", hypothesis=label)
    x = sol.X
    floor = float(np.min(np.linalg.eigvalsh(x))) if x.size else 0.0
    if floor < -PSD_FLOOR * (1 + norm2(x)):
        raise IndefiniteSolution(
            f"{label}: solution has eigenvalue {floor:.3e} < 0", hypothesis=label)
    return sol


def synthesize(plant: HinfPlant, check_assumptions: bool = True) -> SynthesisResult:
    """Central coherent H-infinity controller.

    Raises
    ------
    AssumptionViolation
        If a standing plant assumption fails.
    RiccatiUnsolvable, IndefiniteSolution, CouplingFailure
        Each names the violated hypothesis (``riccati1``, ``riccati2`` or
        ``spectral_radius``) in its ``hypothesis`` attribute.
    """
    if check_assumptions:
        rep = check_plant_assumptions(plant)
        if not rep.passed:
            raise AssumptionViolation(
                f"plant assumptions violated: {', '.join(rep.violations)}",
                hypothesis="assumption " + ",".join(rep.violations))
    p = plant
    xs = _solve_riccati("riccati1", riccati_x_data(p))
    ys = _solve_riccati("riccati2", riccati_y_data(p))
    X, Y = xs.X, ys.X
    n = p.F.shape[0]
    rho = spectral_radius(X @ Y)
    if not rho < 1.0:
        raise CouplingFailure(f"spectral radius of XY is {rho:.6g} >= 1",
                              hypothesis="spectral_radius")
    coupling = np.eye(n) - Y @ X
    cond = float(np.linalg.cond(coupling)) if n else 1.0
    if cond > COUPLING_COND_MAX:
        raise CouplingFailure(f"I - YX is ill-conditioned (cond {cond:.3e})",
                              hypothesis="spectral_radius")

    g2 = ATTENUATION_GAIN**2
    e1inv, e2inv = np.linalg.inv(p.E1), np.linalg.inv(p.E2)
    Hc = -e1inv @ (g2 * p.G2.conj().T @ X + p.K12.conj().T @ p.H1)
    Gc = np.linalg.solve(coupling, Y @ p.H2.conj().T + p.G1 @ p.K21.conj().T) @ e2inv
    Fc = (p.F + p.G2 @ Hc - Gc @ p.H2
          + (p.G1 - Gc @ p.K21) @ p.G1.conj().T @ X)
    log.debug("synthesized controller: rho(XY)=%.3g cond(I-YX)=%.3g", rho, cond)
    return SynthesisResult(X, Y, HinfController(Fc, Gc, Hc), xs, ys, rho, cond)


def close_loop(plant: HinfPlant, ctrl: HinfController, compute_norm: bool = True) -> ClosedLoop:
    """Assemble the closed loop from ``w`` to ``z`` and evaluate its stability and norm.

    The norm is only computed when the loop is Hurwitz; otherwise
    ``hinf_norm_value`` is ``None``.
    """
    p = plant
    if ctrl.Gc.shape[1] != p.H2.shape[0] or ctrl.Hc.shape[0] != p.G2.shape[1]:
        raise DimensionMismatch("controller does not match plant measurement/control sizes")
    Fcl = np.block([[p.F, p.G2 @ ctrl.Hc], [ctrl.Gc @ p.H2, ctrl.Fc]])
    Gcl = np.vstack([p.G1, ctrl.Gc @ p.K21])
    Hcl = np.hstack([p.H1, p.K12 @ ctrl.Hc])
    hurwitz = is_hurwitz(Fcl)
    value = hinf_norm(Fcl, Gcl, Hcl) if hurwitz and compute_norm else None
    return ClosedLoop(Fcl, Gcl, Hcl, hurwitz, spectral_abscissa(Fcl), value)


# -- realizable completion -----------------------------------------------------------

def complete_realizable(Fc, Gc, Hc) -> tuple[AnnihilationQsde, np.ndarray]:
    """Add noise channels to ``(Fc, Gc, Hc)`` so that the result is physically realizable.

    Solves ``Fc Th + Th Fc^H + Th Hc^H Hc Th + Gc Gc^H = 0`` for the
    stabilizing ``Th > 0`` and returns the system with input matrix
    ``[-Th Hc^H, Gc]``, output matrix ``[Hc; -Gc^H Th^-1]`` and identity
    feedthrough, together with ``Th``.
    """
    Fc, Gc, Hc = as_cmat(Fc), as_cmat(Gc), as_cmat(Hc)
    if not is_hurwitz(Fc):
        raise NotHurwitz("controller state matrix is not Hurwitz", hypothesis="hurwitz")
    if not is_minimal(Fc, Gc, Hc):
        raise NotMinimal("controller realization is not minimal")
    gamma = hinf_norm(Fc, Gc, Hc)
    if not gamma < 1.0 - NORM_MARGIN:
        raise NormTooLarge(f"controller H-infinity norm {gamma:.6g} is not below 1",
                           hypothesis="norm_bound")
    a, w, q = Fc.conj().T, Hc.conj().T @ Hc, Gc @ Gc.conj().T
    try:
        sol = solve_care_stabilizing(a, w, q)
    except NoStabilizingSolution as exc:
        raise NormTooLarge(f"bounded-real Riccati has no stabilizing solution: {exc}",
                           hypothesis="norm_bound") from exc
    theta1 = sol.X
    G2 = -theta1 @ Hc.conj().T
    H2 = -Gc.conj().T @ np.linalg.inv(theta1)
    m = Hc.shape[0] + Gc.shape[1]
    sys = AnnihilationQsde(Fc, np.hstack([G2, Gc]), np.vstack([Hc, H2]),
                           np.eye(m, dtype=complex))
    return sys, theta1


@dataclass
class RealizableSynthesis:
    controller: HinfController
    closed_loop: ClosedLoop
    synthesis: SynthesisResult
    controller_norm: float


def synthesize_realizable(plant: HinfPlant) -> RealizableSynthesis:
    """Synthesize, complete to a physically realizable controller and verify the loop.

    Raises :class:`ControllerNotDirectlyRealizable` when the central
    controller is unstable, non-minimal or has norm not below one.
    """
    res = synthesize(plant)
    ctrl = res.controller
    try:
        _, theta1 = complete_realizable(ctrl.Fc, ctrl.Gc, ctrl.Hc)
    except (NormTooLarge, NotHurwitz, NotMinimal) as exc:
        raise ControllerNotDirectlyRealizable(
            f"central controller cannot be completed: {exc}",
            hypothesis="controller_realizability") from exc
    nc = ctrl.Fc.shape[0]
    m2, p2 = ctrl.Hc.shape[0], ctrl.Gc.shape[1]
    completion = Completion(
        Gc0=-theta1 @ ctrl.Hc.conj().T,
        Gc1=np.zeros((nc, 0), complex),
        Hc0=np.zeros((0, nc), complex),
        Hc1=-ctrl.Gc.conj().T @ np.linalg.inv(theta1),
        Kc=np.eye(m2, dtype=complex),
        Kc0=np.zeros((0, 0), complex),
        Kc1=np.eye(p2, dtype=complex),
        theta1=theta1,
    )
    full = HinfController(ctrl.Fc, ctrl.Gc, ctrl.Hc, completion)
    report = check_annihilation(full.as_qsde())
    if not report.passed:
        raise ControllerNotDirectlyRealizable(
            f"completed controller failed realizability: {report.failed_conditions}",
            hypothesis="controller_realizability")
    loop = close_loop(plant, full)
    return RealizableSynthesis(full, loop, res, hinf_norm(ctrl.Fc, ctrl.Gc, ctrl.Hc))


def riccati_residuals(plant: HinfPlant, X, Y) -> dict:
    """Relative residuals of both Riccati equations at ``(X, Y)``."""
    out = {}
    for label, data, sol in (("riccati1", riccati_x_data(plant), X),
                             ("riccati2", riccati_y_data(plant), Y)):
        r = care_residual(*data, sol)
        out[label] = norm2(r) / (1 + norm2(sol) ** 2)
    return out
