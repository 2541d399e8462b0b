"""Determinants of Laplacians on flat surfaces: special functions, tori, degenerations,
tau-function bookkeeping, circle operators, gluing experiments and slit-disk constants."""

from .special import (
    DomainError,
    EULER_GAMMA,
    ZetaDetResult,
    dedekind_eta,
    epstein_zeta_det,
    hurwitz_zeta,
    hurwitz_zeta_deriv,
    jacobi_theta1,
    riemann_theta,
    zeta_constants,
)
from .torus import TorusGeometry, torus_det_formula, torus_green, torus_spectral_det

__all__ = [
    "DomainError",
    "EULER_GAMMA",
    "TorusGeometry",
    "ZetaDetResult",
    "dedekind_eta",
    "epstein_zeta_det",
    "hurwitz_zeta",
    "hurwitz_zeta_deriv",
    "jacobi_theta1",
    "riemann_theta",
    "torus_det_formula",
    "torus_green",
    "torus_spectral_det",
    "zeta_constants",
]
