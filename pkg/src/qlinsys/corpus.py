"""Random generators for test corpora.

Doubled matrices are drawn by sampling both blocks freely and mirroring the
conjugates, so the structure is exact by construction.
"""
from __future__ import annotations

import numpy as np

from .model import AnnihilationQsde, GeneralQsde, PhysicalParameters, doubled


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, m):
    q, r = np.linalg.qr(crandn(rng, m, m))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n):
    a = crandn(rng, n, n)
    return 0.5 * (a + a.conj().T)


def random_doubled(rng, p, q):
    return doubled(crandn(rng, p, q), crandn(rng, p, q))


def random_doubled_hermitian(rng, n):
    """Hermitian doubled matrix: M1 Hermitian, M2 complex symmetric."""
    m2 = crandn(rng, n, n)
    return doubled(random_hermitian(rng, n), 0.5 * (m2 + m2.T))


def random_doubled_t(rng, n, cond_max=1e6):
    while True:
        t = random_doubled(rng, n, n)
        if np.linalg.cond(t) < cond_max:
            return t


def random_physical_parameters(rng, n, m, identity_t=False, scale=1.0):
    return PhysicalParameters(
        S=random_unitary(rng, m),
        M=scale * random_doubled_hermitian(rng, n),
        N=scale * random_doubled(rng, m, n),
        T=np.eye(2 * n, dtype=complex) if identity_t else random_doubled_t(rng, n),
    )


def random_positive_definite(rng, n, floor=0.2):
    a = crandn(rng, n, n)
    return a @ a.conj().T / n + floor * np.eye(n)


def random_stable(rng, n, margin=0.3):
    """Random complex Hurwitz matrix with spectral abscissa ``-margin``."""
    f = crandn(rng, n, n)
    return f - (np.max(np.linalg.eigvals(f).real) + margin) * np.eye(n)


def random_doubled_system(rng, n, m):
    return GeneralQsde(random_doubled(rng, n, n), random_doubled(rng, n, m),
                       random_doubled(rng, m, n), random_doubled(rng, m, m))


def random_annihilation_params(rng, n, m):
    """(S, M1, N1, Theta1) for :func:`qlinsys.model.build_annihilation`."""
    return (random_unitary(rng, m), random_hermitian(rng, n), crandn(rng, m, n),
            random_positive_definite(rng, n))


def random_annihilation_system(rng, n, m):
    f = random_stable(rng, n)
    return AnnihilationQsde(f, crandn(rng, n, m), crandn(rng, m, n), crandn(rng, m, m))


def random_plant(rng, n=None, scale=None):
    """Random plant with identity-padded ``K12``/``K21`` and a stable ``F``.

    Not every draw satisfies the synthesis hypotheses; callers
    rejection-sample on :func:`qlinsys.synthesis.synthesize`.
    """
    from .synthesis import HinfPlant

    n = int(rng.integers(1, 5)) if n is None else n
    m0, m1, m2 = (int(x) for x in rng.integers(1, 3, size=3))
    p1 = m2 + int(rng.integers(0, 2))
    p2 = int(rng.integers(1, m1 + 1))
    c = rng.uniform(0.1, 0.6) if scale is None else scale
    return HinfPlant(
        F=random_stable(rng, n, margin=rng.uniform(0.2, 1.0)),
        G0=crandn(rng, n, m0),
        G1=c * crandn(rng, n, m1),
        G2=crandn(rng, n, m2),
        H1=c * crandn(rng, p1, n),
        H2=crandn(rng, p2, n),
        K12=np.eye(p1, m2, dtype=complex),
        K20=crandn(rng, p2, m0),
        K21=np.eye(p2, m1, dtype=complex),
    )
