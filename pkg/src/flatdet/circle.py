"""Operators on the unit circle in the exponential basis e^{ik phi}.

Includes Fourier multipliers, truncated operator matrices, the harmonic calculus
on an annulus eps <= |z| <= 1, heat coefficients of corners, and a regularized
determinant for first-order operators obtained by subtracting the asymptotics of
the eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import zeta as hurwitz

from .special import EULER_GAMMA, ZetaDetResult, zeta_constants


@dataclass(frozen=True)
class FourierMultiplier:
    """Diagonal operator f -> sum alpha(k) f_k e^{ik phi}, |alpha(k)| <= bound_const (1+|k|)^bound_order."""

    rule: Callable[[int], complex]
    bound_const: float = 1.0
    bound_order: float = 1.0

    def __call__(self, k: int) -> complex:
        return self.rule(k)

    def values(self, n: int) -> np.ndarray:
        return np.array([self.rule(k) for k in range(-n, n + 1)], dtype=complex)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        n = (len(coeffs) - 1) // 2
        return self.values(n) * coeffs


def multiplier_nu() -> FourierMultiplier:
    return FourierMultiplier(lambda k: complex(k), 1.0, 1.0)


def multiplier_abs_nu() -> FourierMultiplier:
    return FourierMultiplier(lambda k: complex(abs(k)), 1.0, 1.0)


def det_star_abs_nu() -> float:
    """det*|nu| = exp(-zeta'_{|nu|}(0)) with zeta_{|nu|} = 2 zeta."""
    zc = zeta_constants()
    return math.exp(-2.0 * zc.zeta_prime_at_0)


@dataclass(frozen=True)
class CircleOperatorMatrix:
    """Truncation of a circle operator to modes -N..N; row/column of mode k is k + N."""

    trunc: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (2 * self.trunc + 1, 2 * self.trunc + 1):
            raise ValueError("matrix size does not match truncation")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix has non-finite entries")
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_multiplier(cls, mult: FourierMultiplier, n: int) -> "CircleOperatorMatrix":
        return cls(n, np.diag(mult.values(n)))

    def index(self, k: int) -> int:
        return k + self.trunc

    def modes(self) -> np.ndarray:
        return np.arange(-self.trunc, self.trunc + 1)

    def truncate(self, n: int) -> "CircleOperatorMatrix":
        if n > self.trunc:
            raise ValueError("cannot enlarge a truncation")
        lo = self.trunc - n
        return CircleOperatorMatrix(n, self.entries[lo:lo + 2 * n + 1, lo:lo + 2 * n + 1])

    def __add__(self, other: "CircleOperatorMatrix") -> "CircleOperatorMatrix":
        n = min(self.trunc, other.trunc)
        return CircleOperatorMatrix(n, self.truncate(n).entries + other.truncate(n).entries)

    def __sub__(self, other: "CircleOperatorMatrix") -> "CircleOperatorMatrix":
        n = min(self.trunc, other.trunc)
        return CircleOperatorMatrix(n, self.truncate(n).entries - other.truncate(n).entries)

    def scale(self, c: complex) -> "CircleOperatorMatrix":
        return CircleOperatorMatrix(self.trunc, c * self.entries)


# ---------------------------------------------------------------- annulus calculus

def annulus_boundary_values(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Fourier coefficients of u on |z| = eps for u = a_0 + sum a_k r^k e^{ik phi} + sum b_k r^-k e^{ik phi}."""
    n = (len(a) - 1) // 2
    k = np.arange(-n, n + 1)
    f = a * eps ** k.astype(float) + b * eps ** (-k.astype(float))
    f[n] = a[n]
    return f


def annulus_dtn_action(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Coefficients of eps * du/dn on |z| = eps (normal pointing into the disk)."""
    n = (len(a) - 1) // 2
    k = np.arange(-n, n + 1).astype(float)
    return k * (b * eps ** (-k) - a * eps**k)


def annulus_restriction(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of u on |z| = 1."""
    n = (len(a) - 1) // 2
    g = a + b
    g[n] = a[n]
    return g


def annulus_identity_rhs(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Op(2/(eps^k - eps^-k)) nu R u - Op((eps^k + eps^-k)/(eps^k - eps^-k)) nu u|_eps."""
    n = (len(a) - 1) // 2
    k = np.arange(-n, n + 1).astype(float)
    f = annulus_boundary_values(a, b, eps)
    g = annulus_restriction(a, b)
    out = np.zeros_like(f)
    nz = k != 0
    ek, emk = eps ** k[nz], eps ** (-k[nz])
    out[nz] = (2 * k[nz] * g[nz] - (ek + emk) * k[nz] * f[nz]) / (ek - emk)
    return out


# ---------------------------------------------------------------- norms

def trace_norm(m, tail_estimate: float = 0.0) -> float:
    """Sum of singular values of the truncated matrix, plus an optional tail estimate."""
    mat = m.entries if isinstance(m, CircleOperatorMatrix) else np.asarray(m)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False).sum() + tail_estimate)


def rescaled_det(det_value: float, zeta_at_0: float, eps: float) -> float:
    """det*(eps A) = eps^{zeta_A(0)} det*(A)."""
    return eps**zeta_at_0 * det_value


# ---------------------------------------------------------------- corners

def corner_heat_coefficient(beta: float) -> float:
    """Heat-trace constant of a corner with interior angle beta: (pi^2 - beta^2)/(24 pi beta)."""
    if not beta > 0:
        raise ValueError("corner angle must be positive")
    return (math.pi**2 - beta**2) / (24 * math.pi * beta)


def corner_heat_coefficient_rational(ratio: Fraction) -> Fraction:
    """Same coefficient for beta = ratio * pi, as an exact rational: (1 - r^2)/(24 r)."""
    r = Fraction(ratio)
    if r <= 0:
        raise ValueError("corner angle must be positive")
    return (1 - r * r) / (24 * r)


def h0_slit_disk() -> Fraction:
    """Constant heat coefficient of a disk with a radial slit: 1/6 + two corners of angle 2 pi."""
    return Fraction(1, 6) + 2 * corner_heat_coefficient_rational(Fraction(2))


# ---------------------------------------------------------------- regularized determinant

def _labels(count: int) -> np.ndarray:
    if count % 2:
        return np.concatenate([[0], np.repeat(np.arange(1, count // 2 + 1), 2)])
    return np.repeat(np.arange(1, count // 2 + 1), 2)


def _remainder_derivative(alpha: float, beta: float, n_terms: int = 200000) -> float:
    n = np.arange(1, n_terms + 1, dtype=float)
    x = alpha / n + beta / n**2
    terms = -np.log1p(x) + x - alpha**2 / (2 * n**2)
    tail = (alpha * beta - alpha**3 / 3) / (2 * n_terms**2)
    return float(terms.sum() + tail)


def zeta_det_regularized(m, zero_modes: int = 0, model_order: int = 2,
                         fit_fraction: float = 1.0 / 3.0) -> ZetaDetResult:
    """Regularized determinant of a self-adjoint first-order circle operator.

    The eigenvalues are sorted and labelled n = 0, 1, 1, 2, 2, ... (n = 0 only for
    an odd count after removing ``zero_modes`` smallest ones). The top part of the
    spectrum is fitted by c (n + alpha + beta/n); the zeta function of this model
    is continued analytically with Riemann-zeta constants and the remainder
    sum_j (log lambda_j - log model_j) is taken over the computed spectrum.
    ``model_order`` 1 fixes beta = 0.
    """
    mat = m.entries if isinstance(m, CircleOperatorMatrix) else np.asarray(m)
    herm = 0.5 * (mat + mat.conj().T)
    lam = np.sort(np.linalg.eigvalsh(herm))
    lam = lam[zero_modes:]
    if lam.size < 6:
        raise ValueError("spectrum too short to fit the asymptotic model")
    if lam[0] <= 0:
        raise ValueError("operator is not positive on the complement of the declared kernel")
    labels = _labels(lam.size)
    start = int(lam.size * (1 - fit_fraction))
    start = max(start, 1 if labels[0] == 0 else 0)
    nfit = labels[start:].astype(float)
    yfit = lam[start:]
    # extra inverse powers stabilise the fit; they are summable and handled as a tail
    design = np.column_stack([nfit, np.ones_like(nfit), 1 / nfit, 1 / nfit**2, 1 / nfit**3])
    colscale = np.abs(design).max(axis=0)
    coef, *_ = np.linalg.lstsq(design / colscale, yfit, rcond=None)
    coef = coef / colscale
    c = coef[0]
    alpha = coef[1] / c
    beta = coef[2] / c if model_order >= 2 else 0.0
    resid = np.abs(design @ coef - yfit).max()
    pos = labels >= 1
    model_vals = c * (labels[pos] + alpha + beta / labels[pos])
    if c <= 0 or np.any(model_vals <= 0) or np.any(1 + alpha / np.arange(1, 50) + beta / np.arange(1, 50) ** 2 <= 0):
        raise ValueError("asymptotic model is not positive")
    # spectrum beyond the truncation: lambda/model - 1 ~ (d1/n + d2/n^2 + d3/n^3)/n
    nmax = int(labels[-1])
    d1 = coef[2] / c - beta
    d2, d3 = coef[3] / c, coef[4] / c
    tail = 2 * (d1 * hurwitz(2, nmax + 1) + d2 * hurwitz(3, nmax + 1) + d3 * hurwitz(4, nmax + 1))
    zc = zeta_constants()
    f0 = zc.zeta_at_0 - alpha
    f1 = zc.zeta_prime_at_0 - alpha * EULER_GAMMA + (alpha**2 / 2 - beta) * math.pi**2 / 6
    rem = _remainder_derivative(alpha, beta)
    zeta0 = 2 * f0
    zeta1 = 2 * (-math.log(c) * f0 + f1 + rem)
    zeta1 -= np.sum(np.log(lam[pos]) - np.log(model_vals)) + tail
    if labels[0] == 0:
        zeta0 += 1
        zeta1 -= math.log(lam[0])
    return ZetaDetResult(
        log_det=float(-zeta1),
        zeta_at_0=float(zeta0),
        model=f"c(n + alpha + beta/n): c={c:.12g}, alpha={alpha:.6g}, beta={beta:.6g}",
        error_estimate=float(2 * resid / c + 1e-14),
    )
