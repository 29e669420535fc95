"""Linear quantum stochastic systems: construction, realizability and coherent H-infinity control."""
from .document import SystemDocument, emit_document, parse_document, read_document, write_document
from .errors import *  # noqa: F401,F403
from .model import (
    AnnihilationQsde,
    GeneralQsde,
    PhysicalParameters,
    QuadratureQsde,
    build_annihilation,
    build_from_theta,
    build_general,
    from_quadrature,
    promote_to_general,
    theta_from_t,
    to_quadrature,
    transfer,
)
from .numkernel import (
    hermitian_inertia,
    hinf_norm,
    solve_care_stabilizing,
    solve_lyapunov,
    solve_sylvester,
    spectral_radius,
)
from .realizability import (
    RealizabilityReport,
    Verdict,
    check_annihilation,
    check_general,
    check_quadrature,
    extract_parameters,
    is_dual_jj_unitary,
    is_lossless_bounded_real,
)
from .synthesis import (
    HinfController,
    HinfPlant,
    check_plant_assumptions,
    close_loop,
    complete_realizable,
    synthesize,
    synthesize_realizable,
)

__version__ = "0.1.0"
