"""Flat tori: closed-form determinant, spectral determinant and Green function."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import DomainError, ZetaDetResult, dedekind_eta, epstein_zeta_det, jacobi_theta1


@dataclass(frozen=True)
class TorusGeometry:
    """Flat torus C / (A Z + B Z)."""

    period_a: complex
    period_b: complex

    def __post_init__(self):
        a, b = complex(self.period_a), complex(self.period_b)
        if a == 0 or (a.conjugate() * b).imag <= 0:
            raise DomainError("periods must satisfy Im(conj(A) B) > 0")
        object.__setattr__(self, "period_a", a)
        object.__setattr__(self, "period_b", b)

    @property
    def sigma(self) -> complex:
        return self.period_b / self.period_a

    @property
    def area(self) -> float:
        return (self.period_a.conjugate() * self.period_b).imag

    def eigenvalues(self, radius: float) -> np.ndarray:
        """Nonzero Laplace eigenvalues 4 pi^2 |mB - nA|^2 / Area^2 up to ``radius``."""
        out = []
        a, b = self.period_a, self.period_b
        nmax = int(radius * self.area / (2 * math.pi * min(abs(a), abs(b)) * 0.5)) + 2
        for m in range(-nmax, nmax + 1):
            for n in range(-nmax, nmax + 1):
                if m == 0 and n == 0:
                    continue
                lam = 4 * math.pi**2 * abs(m * b - n * a) ** 2 / self.area**2
                if lam <= radius:
                    out.append(lam)
        return np.sort(np.array(out))

    def reduce(self, z: complex) -> complex:
        """Representative of z in the parallelogram centred at the origin."""
        u = complex(z) / self.period_a
        s = self.sigma
        n = round(u.imag / s.imag)
        u -= n * s
        u -= round(u.real)
        return u * self.period_a


@dataclass(frozen=True)
class GreenFunctionSample:
    argument: complex
    value: float


def torus_det_formula(t: TorusGeometry) -> float:
    """Closed form 4 Im(sigma) Area |eta(sigma)|^4."""
    return 4.0 * t.sigma.imag * t.area * abs(dedekind_eta(t.sigma)) ** 4


def torus_spectral_det(t: TorusGeometry) -> ZetaDetResult:
    """Spectral determinant of the torus Laplacian from its eigenvalue lattice."""
    return epstein_zeta_det(t.period_a, t.period_b)


def torus_green(z, t: TorusGeometry) -> GreenFunctionSample:
    """Mean-zero Green function with Laplacian -delta + 1/Area.

    G(z) = -(1/2pi) log|theta_1(z/A)/eta| + (Im z/A)^2 / (2 Im sigma), evaluated at
    the lattice representative of z so that the quadratic term matches the cell.
    """
    zr = t.reduce(z)
    u = zr / t.period_a
    s = t.sigma
    if abs(u) < 1e-300:
        raise DomainError("Green function is singular on the period lattice")
    th = jacobi_theta1(u, s)
    val = -math.log(abs(th / dedekind_eta(s))) / (2 * math.pi) + u.imag**2 / (2 * s.imag)
    return GreenFunctionSample(argument=zr, value=float(val))
