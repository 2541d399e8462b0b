"""Special functions: Dedekind eta, Jacobi theta_1, Riemann theta, Hurwitz zeta,
and the spectral determinant of a flat torus via an Epstein zeta split.

Everything runs in double precision. Truncated sums stop once a geometric or
Gaussian tail bound falls below the requested tolerance.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import bernoulli, exp1, gammaincc, gamma

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class TruncationPolicy:
    max_lattice_radius: float = 12.0
    tail_tolerance: float = 1e-16

    def __post_init__(self):
        if self.max_lattice_radius <= 0 or self.tail_tolerance <= 0:
            raise ValueError("truncation parameters must be positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class ModulusPoint:
    """Torus modulus sigma = B/A in the upper half plane."""

    sigma: complex

    def __post_init__(self):
        if not complex(self.sigma).imag > 0:
            raise DomainError(f"modulus must lie in the upper half plane, got {self.sigma}")


def _as_sigma(sigma) -> complex:
    if isinstance(sigma, ModulusPoint):
        return complex(sigma.sigma)
    s = complex(sigma)
    if not s.imag > 0:
        raise DomainError(f"modulus must lie in the upper half plane, got {sigma}")
    return s


@dataclass(frozen=True)
class PeriodMatrix:
    """Symmetric g x g matrix with positive definite imaginary part."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if m.shape[0] != m.shape[1]:
            raise DomainError("period matrix must be square")
        if not np.allclose(m, m.T, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise DomainError("period matrix must be symmetric")
        if np.linalg.eigvalsh(m.imag).min() <= 0:
            raise DomainError("imaginary part of the period matrix must be positive definite")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


# ---------------------------------------------------------------- eta / theta_1

def dedekind_eta(sigma, tol: float = 1e-17) -> complex:
    """Dedekind eta as the q-product exp(pi i sigma/12) prod (1 - q^n), q = exp(2 pi i sigma)."""
    s = _as_sigma(sigma)
    q = np.exp(2j * np.pi * s)
    prod = 1.0 + 0j
    qn = q
    # tail of prod(1 - q^n) beyond n is bounded by ~2|q|^n/(1-|q|)
    while abs(qn) > tol * (1.0 - abs(q)):
        prod *= 1.0 - qn
        qn *= q
    return np.exp(1j * np.pi * s / 12.0) * prod


def _theta1_reduce(z: complex, s: complex):
    """Shift z into |Im z| <= Im(sigma)/2 and return (z_red, log multiplier)."""
    n = round(z.imag / s.imag)
    zr = z - n * s
    m = round(zr.real)
    zr = zr - m
    # theta1(z + 1) = -theta1(z); theta1(z + sigma) = -exp(-i pi sigma - 2 pi i z) theta1(z)
    # so theta1(zr + n sigma) = (-1)^n exp(-i pi n^2 sigma - 2 pi i n zr) theta1(zr)
    logfac = 1j * np.pi * (m + n) - 1j * np.pi * n * n * s - 2j * np.pi * n * zr
    return zr, logfac


def _theta1_series(z: complex, s: complex, deriv: int = 0, tol: float = 1e-18) -> complex:
    # 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z), q = exp(i pi sigma)
    total = 0j
    n = 0
    while True:
        k = 2 * n + 1
        w = np.exp(1j * np.pi * s * (n + 0.5) ** 2)
        arg = k * np.pi * z
        if deriv == 0:
            f = np.sin(arg)
        elif deriv == 1:
            f = k * np.pi * np.cos(arg)
        elif deriv == 2:
            f = -((k * np.pi) ** 2) * np.sin(arg)
        else:
            f = -((k * np.pi) ** 3) * np.cos(arg)
        term = (-1) ** n * w * f
        total += term
        bound = abs(w) * (k * np.pi) ** deriv * np.exp(k * np.pi * abs(z.imag))
        if n > 1 and bound < tol * max(abs(total), 1e-300):
            break
        n += 1
        if n > 400:
            break
    return 2.0 * total


def jacobi_theta1(z, sigma, deriv: int = 0) -> complex:
    """Odd Jacobi theta function theta_1(z | sigma) with period 1 in z (up to sign).

    ``deriv`` in {0, 1, 2, 3} selects a z-derivative. Quasi-periodicity is used to
    bring z into the central strip before summing, except for derivatives where
    the series is summed directly.
    """
    s = _as_sigma(sigma)
    z = complex(z)
    if deriv == 0:
        zr, logfac = _theta1_reduce(z, s)
        return np.exp(logfac) * _theta1_series(zr, s)
    return _theta1_series(z, s, deriv=deriv)


def log_theta1_derivs(u: complex, sigma) -> tuple[complex, complex]:
    """Return ((log theta1)'(u), (log theta1)''(u)), computed after reduction to the central cell."""
    s = _as_sigma(sigma)
    u = complex(u)
    n = round(u.imag / s.imag)
    ur = u - n * s
    ur = ur - round(ur.real)
    t0 = _theta1_series(ur, s)
    t1 = _theta1_series(ur, s, 1)
    t2 = _theta1_series(ur, s, 2)
    d1 = t1 / t0 - 2j * np.pi * n  # from the factor exp(-2 pi i n z)
    d2 = (t2 * t0 - t1 * t1) / (t0 * t0)
    return d1, d2


# ---------------------------------------------------------------- lattice enumeration

def lattice_points(gram: np.ndarray, radius: float, center=None) -> np.ndarray:
    """Integer vectors n with (n + c)^T G (n + c) <= radius^2."""
    gram = np.atleast_2d(np.asarray(gram, dtype=float))
    g = gram.shape[0]
    c = np.zeros(g) if center is None else np.asarray(center, dtype=float)
    ginv = np.linalg.inv(gram)
    half = radius * np.sqrt(np.diag(ginv))
    ranges = [range(int(math.floor(-c[i] - half[i])), int(math.ceil(-c[i] + half[i])) + 1) for i in range(g)]
    pts = np.array(list(product(*ranges)), dtype=float).reshape(-1, g)
    y = pts + c
    q = np.einsum("ij,jk,ik->i", y, gram, y)
    return pts[q <= radius * radius].astype(int)


def _shortest_vector_length(chol_scaled: np.ndarray) -> float:
    g = chol_scaled.shape[0]
    best = np.inf
    for n in product(range(-3, 4), repeat=g):
        if any(n):
            best = min(best, float(np.linalg.norm(chol_scaled @ np.array(n, dtype=float))))
    return best


def _theta_tail_bound(g: int, rho: float, radius: float) -> float:
    # sum_{|x|>R} exp(-|x|^2) over a lattice with minimal distance rho
    if radius <= rho / 2:
        return np.inf
    return 0.5 * g * (2.0 / rho) ** g * gammaincc(g / 2.0, (radius - rho / 2.0) ** 2) * gamma(g / 2.0)


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    tail_bound: float
    n_terms: int


def riemann_theta(v, omega, policy: TruncationPolicy = DEFAULT_POLICY, full: bool = False):
    """Riemann theta sum_n exp(pi i n.Omega.n + 2 pi i n.v) over an ellipsoid of integer vectors.

    With ``full=True`` returns a ``ThetaValue`` carrying the Gaussian tail bound.
    """
    om = omega if isinstance(omega, PeriodMatrix) else PeriodMatrix(np.atleast_2d(omega))
    m = om.entries
    g = om.dim
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.shape != (g,):
        raise DomainError(f"vector of length {v.shape} does not match period matrix of size {g}")
    y = m.imag
    c = np.linalg.solve(y, v.imag)
    t = np.linalg.cholesky(np.pi * y).T  # pi y = t^T t
    rho = _shortest_vector_length(t)
    amp = np.exp(np.pi * c @ y @ c)
    radius = rho / 2 + 1.0
    while _theta_tail_bound(g, rho, radius) * amp > policy.tail_tolerance * max(amp, 1.0):
        radius += 0.25
        if radius > policy.max_lattice_radius * max(1.0, np.sqrt(np.pi)):
            break
    # ellipsoid in terms of the quadratic form pi (n + c)^T y (n + c)
    pts = lattice_points(np.pi * y, radius, center=c)
    phase = np.pi * 1j * np.einsum("ij,jk,ik->i", pts, m, pts) + 2j * np.pi * pts @ v
    val = complex(np.exp(phase).sum())
    bound = _theta_tail_bound(g, rho, radius) * amp
    if full:
        return ThetaValue(val, float(bound), len(pts))
    return val


def theta_genus1(v, sigma) -> complex:
    """One-variable Riemann theta (theta_3) as the g = 1 case."""
    return riemann_theta(np.array([v]), np.array([[_as_sigma(sigma)]]))


# ---------------------------------------------------------------- zeta functions

_N_CORRECTIONS = 20
_BERN = bernoulli(2 * _N_CORRECTIONS)


def _hurwitz_em(t: complex, a: float, N: int = 12):
    """Euler-Maclaurin value and t-derivative of the Hurwitz zeta function."""
    n = np.arange(N) + a
    logn = np.log(n)
    powers = np.exp(-t * logn)
    val = powers.sum()
    der = -(logn * powers).sum()
    x = N + a
    lx = math.log(x)
    xt = np.exp(-t * lx)
    # x^{1-t}/(t-1)
    val += x * xt / (t - 1)
    der += x * xt * (-lx / (t - 1) - 1.0 / (t - 1) ** 2)
    val += xt / 2
    der += -lx * xt / 2
    # sum_k B_2k/(2k)! (t)_{2k-1} x^{-t-2k+1}
    for k in range(1, _N_CORRECTIONS + 1):
        m = 2 * k - 1
        factors = [t + j for j in range(m)]
        poch = np.prod(factors)
        dpoch = sum(np.prod([f for i, f in enumerate(factors) if i != l]) for l in range(m))
        coef = _BERN[2 * k] / math.factorial(2 * k)
        xp = xt * x ** (-(2 * k - 1))
        val += coef * poch * xp
        der += coef * (dpoch * xp - lx * poch * xp)
    return complex(val), complex(der)


def hurwitz_zeta(t, a: float) -> complex:
    """Analytically continued Hurwitz zeta sum_{n>=0} (n + a)^{-t}."""
    t = complex(t)
    if a <= 0:
        raise DomainError("Hurwitz parameter must be positive")
    if t == 1:
        raise DomainError("pole of the Hurwitz zeta function at t = 1")
    return _hurwitz_em(t, a)[0]


def hurwitz_zeta_deriv(t, a: float) -> complex:
    """Derivative in t of the Hurwitz zeta function."""
    t = complex(t)
    if a <= 0:
        raise DomainError("Hurwitz parameter must be positive")
    if t == 1:
        raise DomainError("pole of the Hurwitz zeta function at t = 1")
    return _hurwitz_em(t, a)[1]


@dataclass(frozen=True)
class ZetaConstants:
    zeta_at_0: float
    zeta_prime_at_0: float
    zeta_prime_at_minus1: float


@functools.lru_cache(maxsize=1)
def zeta_constants() -> ZetaConstants:
    return ZetaConstants(
        zeta_at_0=-0.5,
        zeta_prime_at_0=-0.5 * math.log(2 * math.pi),
        zeta_prime_at_minus1=hurwitz_zeta_deriv(-1.0, 1.0).real,
    )


# ---------------------------------------------------------------- Epstein zeta determinant

@dataclass(frozen=True)
class ZetaDetResult:
    """A zeta-regularized determinant with the data used to produce it."""

    log_det: float
    zeta_at_0: float
    model: str
    error_estimate: float

    @property
    def value(self) -> float:
        return math.exp(self.log_det)


def epstein_zeta_det(period_a, period_b, tol: float = 1e-17) -> ZetaDetResult:
    """det* of the flat torus Laplacian C/(A Z + B Z), zero mode removed.

    The spectral zeta function of the eigenvalues 4 pi^2 |mB - nA|^2 / Area^2 is
    split in heat time at Area/(4 pi); the small-time half is rewritten with
    Poisson summation over the period lattice, both halves converge like
    exp(-pi |k|^2).
    """
    a, b = complex(period_a), complex(period_b)
    area = (a.conjugate() * b).imag
    if abs(area) < 1e-14 * max(abs(a), abs(b)) ** 2:
        raise DomainError("periods are collinear over the reals")
    if area < 0:
        a, b = b, a
        area = -area
    # both lattices share the Gram form of (a, b) up to scale
    basis = np.array([[a.real, b.real], [a.imag, b.imag]])
    gram = basis.T @ basis  # |n a + m b|^2 = (n,m) G (n,m)^T
    x0 = area / (4 * np.pi)
    # dual side: lambda x0 = pi |mB - nA|^2/area ; direct side: |gamma|^2/(4 x0) = pi |gamma|^2/area
    radius = math.sqrt(-math.log(tol) / math.pi * area) + 2 * math.sqrt(max(np.diag(gram)))
    pts = lattice_points(gram, radius)
    pts = pts[np.any(pts != 0, axis=1)]
    sq = np.einsum("ij,jk,ik->i", pts, gram, pts)
    lam_x0 = np.pi * sq / area
    dual = exp1(lam_x0).sum()
    direct = (area / (np.pi * sq) * np.exp(-np.pi * sq / area)).sum()
    g0 = dual - area / (4 * np.pi * x0) - math.log(x0) + direct
    zeta_prime = g0 - EULER_GAMMA
    return ZetaDetResult(
        log_det=float(-zeta_prime),
        zeta_at_0=-1.0,
        model="theta split (Poisson) at heat time Area/(4 pi)",
        error_estimate=float(tol * len(pts)),
    )
