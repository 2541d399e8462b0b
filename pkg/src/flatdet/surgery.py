"""Gluing formulas for determinants across a small circle on a flat torus.

The exterior Dirichlet-to-Neumann operator of T \\ B(eps) is computed with a
basis of periodic harmonic multipoles: Phi_1 is the harmonic, doubly periodic
completion of (log theta_1)'(z/A)/A and Phi_k for k >= 2 are its normalized
z-derivatives, so Phi_k = z^-k + (regular part). Matching boundary Fourier
coefficients on |z| = eps gives the operator in the exponential basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import (
    CircleOperatorMatrix,
    FourierMultiplier,
    corner_heat_coefficient_rational,
    h0_slit_disk,
    trace_norm,
    zeta_det_regularized,
)
from .degeneration import loglog_slope
from .special import ZetaDetResult, jacobi_theta1, zeta_constants
from .torus import TorusGeometry, torus_det_formula


class SolverError(RuntimeError):
    """Linear solve for the boundary problem was inaccurate."""


@dataclass(frozen=True)
class SurgeryScene:
    surface: TorusGeometry
    eps: float
    excision_center: complex = 0j

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("disk radius must be positive")
        if self.eps >= 0.5 * injectivity_radius(self.surface) * 2 * 0.9:
            raise ValueError("disk does not embed in the torus")


def injectivity_radius(t: TorusGeometry) -> float:
    """Half the length of the shortest nonzero lattice vector."""
    a, b = t.period_a, t.period_b
    best = min(abs(m * a + n * b) for m in range(-3, 4) for n in range(-3, 4) if (m, n) != (0, 0))
    return 0.5 * best


def square_torus(side: float = 1.0) -> TorusGeometry:
    return TorusGeometry(side, 1j * side)


# ---------------------------------------------------------------- disk

def disk_det(eps: float) -> float:
    """Dirichlet determinant of the disk of radius eps: 2^-1/6 pi^-1/2 eps^-1/3 e^{-2 zeta'(-1) - 5/12}."""
    if not eps > 0:
        raise ValueError("radius must be positive")
    zp = zeta_constants().zeta_prime_at_minus1
    return 2 ** (-1 / 6) * math.pi**-0.5 * eps ** (-1 / 3) * math.exp(-2 * zp - 5 / 12)


def exterior_det_constant() -> float:
    """2^{7/6} sqrt(pi) e^{2 zeta'(-1) + 5/12}."""
    zp = zeta_constants().zeta_prime_at_minus1
    return 2 ** (7 / 6) * math.sqrt(math.pi) * math.exp(2 * zp + 5 / 12)


def dtn_interior_disk(eps: float) -> FourierMultiplier:
    return FourierMultiplier(lambda k: complex(abs(k)) / eps, 1.0 / eps, 1.0)


# ---------------------------------------------------------------- multipole data

def _lattice_distance(sigma: complex) -> float:
    return min(abs(m + n * sigma) for m in range(-3, 4) for n in range(-3, 4) if (m, n) != (0, 0))


def theta_log_taylor(sigma: complex, mmax: int, radius_fraction: float = 0.8) -> np.ndarray:
    """Taylor coefficients h_0..h_mmax of h(u) = log(theta_1(u) / (u theta_1'(0)))."""
    d = _lattice_distance(sigma)
    r = radius_fraction * d
    npts = max(256, 4 * (mmax + 1))
    u = r * np.exp(2j * np.pi * np.arange(npts) / npts)
    t1p = jacobi_theta1(0, sigma, 1)
    vals = np.array([jacobi_theta1(x, sigma) / (x * t1p) for x in u])
    logv = np.log(np.abs(vals)) + 1j * np.unwrap(np.angle(vals))
    logv -= 2j * np.pi * round(logv.imag.mean() / (2 * np.pi))
    c = np.fft.fft(logv) / npts
    return np.array([c[m] / r**m for m in range(mmax + 1)])


@dataclass
class MultipoleBasis:
    """Regular parts of the periodic multipoles around the excision centre."""

    surface: TorusGeometry
    kmax: int
    coeffs: np.ndarray = field(init=False)  # coeffs[k, j]: z^j coefficient of Phi_k
    lin_z: complex = field(init=False)
    lin_zbar: complex = field(init=False)
    const2: complex = field(init=False)

    def __post_init__(self):
        a = self.surface.period_a
        s = self.surface.sigma
        h = theta_log_taylor(s, 2 * self.kmax + 2)
        big_h = h * a ** (-np.arange(len(h), dtype=float))
        co = np.zeros((self.kmax + 1, self.kmax + 1), dtype=complex)
        for k in range(1, self.kmax + 1):
            for j in range(0, self.kmax + 1):
                m = j + k
                if m % 2 or m >= len(big_h):
                    continue
                co[k, j] = (-1) ** (k - 1) * k * math.comb(m, k) * big_h[m]
        self.coeffs = co
        # periodizing correction of Phi_1 and its derivative
        self.lin_z = math.pi / (a * a * s.imag)
        self.lin_zbar = -math.pi / (abs(a) ** 2 * s.imag)
        self.const2 = -math.pi / (a * a * s.imag)

    def terms(self, k: int, eps: float):
        """(mode, coefficient, radial power) of eps^k Phi_k on |z| = eps."""
        out = [(-k, 1.0 + 0j, -k)]
        for j in range(self.kmax + 1):
            c = self.coeffs[k, j]
            if c != 0:
                out.append((j, c * eps ** (k + j), j))
        if k == 1:
            out.append((1, self.lin_z * eps**2, 1))
            out.append((-1, self.lin_zbar * eps**2, 1))
        if k == 2:
            out.append((0, self.const2 * eps**2, 0))
        return out

    def evaluate(self, k: int, z: complex) -> complex:
        """Phi_k(z) near the centre from its local expansion."""
        val = z ** (-k) + sum(self.coeffs[k, j] * z**j for j in range(self.kmax + 1))
        if k == 1:
            val += self.lin_z * z + self.lin_zbar * np.conj(z)
        if k == 2:
            val += self.const2
        return val


def _boundary_system(scene: SurgeryScene, kmax: int, basis: MultipoleBasis | None = None):
    eps = scene.eps
    basis = basis or MultipoleBasis(scene.surface, kmax)
    size = 2 * kmax + 1
    v = np.zeros((size, size), dtype=complex)
    d = np.zeros((size, size), dtype=complex)
    # unknown ordering: column of mode m is the multipole whose leading mode is m
    v[kmax, kmax] = 1.0
    for k in range(1, kmax + 1):
        for conj in (False, True):
            col = kmax + (k if conj else -k)
            for mode, coef, rpow in basis.terms(k, eps):
                if conj:
                    mode, coef = -mode, np.conj(coef)
                if abs(mode) > kmax:
                    continue
                v[kmax + mode, col] += coef
                d[kmax + mode, col] += -rpow / eps * coef
    return v, d, basis


def dtn_exterior_torus(scene: SurgeryScene, trunc: int = 64, pad: int = 20,
                       tol: float = 1e-8) -> CircleOperatorMatrix:
    """Exterior DtN operator of T \\ B(eps) on modes -trunc..trunc (outer normal points into the disk)."""
    kmax = trunc + pad
    v, d, _ = _boundary_system(scene, kmax)
    n_full = np.linalg.solve(v.T, d.T).T  # d v^-1
    resid = np.abs(n_full @ v - d).max() / max(np.abs(d).max(), 1.0)
    if resid > tol:
        raise SolverError(f"boundary solve residual {resid:.2e}")
    full = CircleOperatorMatrix(kmax, n_full)
    return full.truncate(trunc)


def restriction_operator(scene: SurgeryScene, radius: float, trunc: int = 32, pad: int = 20) -> np.ndarray:
    """Matrix of f -> u|_{|z| = radius} for the exterior harmonic extension u of f."""
    kmax = trunc + pad
    v, _, basis = _boundary_system(scene, kmax)
    eps = scene.eps
    # values of each normalized multipole on |z| = radius, in Fourier modes
    npts = 4 * kmax + 8
    phi = 2 * np.pi * np.arange(npts) / npts
    z = radius * np.exp(1j * phi)
    w = np.zeros((2 * kmax + 1, 2 * kmax + 1), dtype=complex)
    w[:, kmax] = 0
    w[kmax, kmax] = 1.0
    for k in range(1, kmax + 1):
        vals = eps**k * np.array([basis.evaluate(k, x) for x in z])
        for conj, col in ((False, kmax - k), (True, kmax + k)):
            f = np.conj(vals) if conj else vals
            c = np.fft.fft(f) / npts
            w[:, col] = np.array([c[m % npts] for m in range(-kmax, kmax + 1)])
    r = np.linalg.solve(v.T, w.T).T
    lo = kmax - trunc
    return r[lo:lo + 2 * trunc + 1, lo:lo + 2 * trunc + 1]


# ---------------------------------------------------------------- trace-norm estimates

def dtn_trace_norm_defect(scene: SurgeryScene, trunc: int = 48) -> float:
    """Truncated trace norm of eps N_eps - |nu|."""
    n = dtn_exterior_torus(scene, trunc)
    k = np.abs(n.modes()).astype(float)
    return trace_norm(n.entries * scene.eps - np.diag(k))


@dataclass(frozen=True)
class SlopeFit:
    params: tuple
    values: tuple
    slope: float


def trace_norm_slope(surface: TorusGeometry, eps_values, trunc: int = 48) -> SlopeFit:
    vals = [dtn_trace_norm_defect(SurgeryScene(surface, e), trunc) for e in eps_values]
    return SlopeFit(tuple(eps_values), tuple(vals), loglog_slope(eps_values, vals))


# ---------------------------------------------------------------- gluing

def glued_dtn_det(scene: SurgeryScene, trunc: int = 64) -> ZetaDetResult:
    """det*(N_exterior + N_interior) on the circle |z| = eps, one zero mode removed."""
    n1 = dtn_exterior_torus(scene, trunc)
    n2 = np.diag(np.abs(n1.modes()) / scene.eps)
    return zeta_det_regularized(n1.entries + n2, zero_modes=1)


@dataclass(frozen=True)
class GluedLimitResult:
    eps: tuple
    ratios: tuple
    extrapolated: float
    scaled_dets: tuple  # det*(eps (N1 + N2))


def prop3_limit(surface: TorusGeometry, eps_values, trunc: int = 64) -> GluedLimitResult:
    """det*(N1 + N2)/(2 pi eps) for each eps, extrapolated to eps = 0."""
    eps_values = list(eps_values)
    ratios, scaled = [], []
    for e in eps_values:
        r = glued_dtn_det(SurgeryScene(surface, e), trunc)
        ratios.append(r.value / (2 * math.pi * e))
        # det*(eps A) = eps^{zeta_A(0)} det*(A)
        scaled.append(e ** r.zeta_at_0 * r.value)
    order = np.argsort(eps_values)[:3]
    x = np.array(eps_values)[order]
    y = np.array(ratios)[order]
    # polynomial in eps through the smallest radii; the error observed on tori is O(eps^2)
    extrap = float(np.polyfit(x, y, len(x) - 1)[-1]) if len(x) >= 2 else float(y[0])
    return GluedLimitResult(tuple(eps_values), tuple(ratios), extrap, tuple(scaled))


def bfk_assemble(det1: float, det2: float, det_dtn_star: float, area: float, length: float) -> float:
    """Area/length * det(X1) * det(X2) * det*(N1 + N2)."""
    for v in (det1, det2, det_dtn_star, area, length):
        if not v > 0:
            raise ValueError("all factors must be positive")
    return area / length * det1 * det2 * det_dtn_star


def exterior_det(surface: TorusGeometry, eps: float, det_star_laplacian: float | None = None,
                 trunc: int = 64) -> float:
    """det(Delta, T \\ B(eps)) obtained by solving the gluing formula for it."""
    det_star = torus_det_formula(surface) if det_star_laplacian is None else det_star_laplacian
    dn = glued_dtn_det(SurgeryScene(surface, eps), trunc).value
    return det_star * 2 * math.pi * eps / (surface.area * disk_det(eps) * dn)


@dataclass(frozen=True)
class ExteriorDetResult:
    eps: tuple
    exterior_dets: tuple
    ratios: tuple
    slope: float


def corollary1_ratio(surface: TorusGeometry, eps_values, trunc: int = 64) -> ExteriorDetResult:
    """Exterior determinant over its small-eps asymptotic form, and its eps-slope."""
    det_star = torus_det_formula(surface)
    dets, ratios = [], []
    for e in eps_values:
        d = exterior_det(surface, e, det_star, trunc)
        rhs = exterior_det_constant() * det_star / surface.area * e ** (1 / 3)
        dets.append(d)
        ratios.append(d / rhs)
    slope = loglog_slope(eps_values, dets)
    return ExteriorDetResult(tuple(eps_values), tuple(dets), tuple(ratios), slope)


# ---------------------------------------------------------------- exact constant bookkeeping

CONSTANT_BASES = (
    "two", "pi", "e_zeta", "eps", "area", "det_star_Delta",
    "det_nu_ND", "det_B1_D", "det_nu_NN", "det_B1_DN",
)


@dataclass
class ConstantMonomial:
    """Product of bases raised to exact rational powers; e_zeta = e^{2 zeta'(-1) + 5/12}."""

    powers: dict = field(default_factory=lambda: {b: Fraction(0) for b in CONSTANT_BASES})

    @classmethod
    def of(cls, **kw) -> "ConstantMonomial":
        m = cls()
        for k, v in kw.items():
            if k not in m.powers:
                raise KeyError(k)
            m.powers[k] = Fraction(v)
        return m

    def __mul__(self, other: "ConstantMonomial") -> "ConstantMonomial":
        return ConstantMonomial({b: self.powers[b] + other.powers[b] for b in CONSTANT_BASES})

    def mismatch(self, other: "ConstantMonomial") -> dict:
        return {b: (self.powers[b], other.powers[b]) for b in CONSTANT_BASES
                if self.powers[b] != other.powers[b]}


@dataclass(frozen=True)
class ConstantAlgebraReport:
    dirichlet_asymptotic: ConstantMonomial
    neumann_asymptotic: ConstantMonomial
    product: ConstantMonomial
    target: ConstantMonomial
    mismatches: dict
    ok: bool


def section33_constant_algebra() -> ConstantAlgebraReport:
    """Check exactly that the Dirichlet and Neumann asymptotics multiply to 2 kappa0/Area (det*)^2 eps^1/2."""
    h0 = h0_slit_disk()
    # heat coefficient of the slit disk; the disk boundary gives 1/6, each slit end a 2 pi corner
    assert h0 == Fraction(1, 6) + 2 * corner_heat_coefficient_rational(Fraction(2))
    exterior = ConstantMonomial.of(two=Fraction(7, 6), pi=Fraction(1, 2), e_zeta=1, area=-1,
                                   det_star_Delta=1, eps=Fraction(1, 3))
    slit_d = ConstantMonomial.of(eps=-2 * h0, det_B1_D=1)
    slit_dn = ConstantMonomial.of(eps=-2 * h0, det_B1_DN=1)
    # Dirichlet: no kernel, zeta(0) = 0, so det(N + N^D) -> det(|nu| + N_1^D)
    dirichlet = exterior * slit_d * ConstantMonomial.of(det_nu_ND=1)
    # Neumann: Area/(2 pi eps) prefactor and det*(N + N^N) ~ eps det*(|nu| + N_1^N)
    neumann = (ConstantMonomial.of(area=1, two=-1, pi=-1, eps=-1) * exterior * slit_dn
               * ConstantMonomial.of(eps=1, det_nu_NN=1))
    product = dirichlet * neumann
    kappa0 = ConstantMonomial.of(two=Fraction(1, 3), e_zeta=2, det_nu_ND=1, det_B1_D=1,
                                 det_nu_NN=1, det_B1_DN=1)
    target = ConstantMonomial.of(two=1, area=-1, det_star_Delta=2, eps=Fraction(1, 2)) * kappa0
    mism = product.mismatch(target)
    return ConstantAlgebraReport(dirichlet, neumann, product, target, mism, not mism)
