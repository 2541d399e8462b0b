"""Genus-one tau function and exact exponent bookkeeping for degenerating tau functions.

The genus-one objects live on C / (Z + sigma Z) with the holomorphic differential
dz: prime form, canonical bidifferential, the sigma differential and the
invariant C. From them |tau_1|^2 follows in closed form.

The exponent ledger tracks, with exact rationals, how Delta(s) = 4/s and the
prime form E_+(P, P_+) enter tau^-6 of a surface glued from components of
genera g_plus and g_minus along a slit of length s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .special import (
    DomainError,
    ModulusPoint,
    dedekind_eta,
    jacobi_theta1,
    log_theta1_derivs,
    theta_genus1,
)

DELTA1 = 4.0 / (2 * math.pi) ** (4.0 / 3.0)


class CoincidentPointsError(ValueError):
    pass


class ThetaZeroError(ValueError):
    pass


@dataclass(frozen=True)
class Genus1Frame:
    """Torus with periods 1 and sigma, flat coordinate z, differential dz."""

    sigma: complex

    def __post_init__(self):
        object.__setattr__(self, "sigma", complex(ModulusPoint(self.sigma).sigma))

    @property
    def area(self) -> float:
        return self.sigma.imag


def _as_frame(f) -> Genus1Frame:
    return f if isinstance(f, Genus1Frame) else Genus1Frame(f)


def _is_lattice_point(u: complex, sigma: complex, tol: float = 1e-13) -> bool:
    n = round(u.imag / sigma.imag)
    r = u - n * sigma
    return abs(r - round(r.real)) < tol


def prime_form_genus1(x: complex, y: complex, f) -> complex:
    """E(x, y) = theta_1(y - x) / theta_1'(0)."""
    f = _as_frame(f)
    u = complex(y) - complex(x)
    if _is_lattice_point(u, f.sigma):
        raise CoincidentPointsError("prime form vanishes on the diagonal")
    return jacobi_theta1(u, f.sigma) / jacobi_theta1(0, f.sigma, 1)


def bidifferential_genus1(x: complex, y: complex, f) -> complex:
    """Canonical bidifferential d_x d_y log E(x, y) = -(log theta_1)''(y - x)."""
    f = _as_frame(f)
    u = complex(y) - complex(x)
    if _is_lattice_point(u, f.sigma):
        raise CoincidentPointsError("bidifferential has a double pole on the diagonal")
    return -log_theta1_derivs(u, f.sigma)[1]


def _log_theta_hessian(e: complex, sigma: complex, h: float) -> complex:
    def d2(step):
        tp = theta_genus1(e + step, sigma)
        tm = theta_genus1(e - step, sigma)
        t0 = theta_genus1(e, sigma)
        return (np.log(tp / t0) + np.log(tm / t0)) / step**2

    # one Richardson step on the O(h^2) central difference
    return (4 * d2(h / 2) - d2(h)) / 3


def verify_fay_identity(x: complex, y: complex, e: complex, f, h: float = 1e-3,
                        min_theta: float = 1e-6) -> float:
    """|LHS - RHS| of the genus-one Fay identity for theta_3.

    theta(u - e) theta(u + e) / (theta(e)^2 E(x, y)^2) = W(x, y) + (log theta)''(e),
    u = y - x.
    """
    f = _as_frame(f)
    te = theta_genus1(e, f.sigma)
    if abs(te) < min_theta:
        raise ThetaZeroError(f"theta(e) = {abs(te):.2e} is too close to zero")
    u = complex(y) - complex(x)
    lhs = theta_genus1(u - e, f.sigma) * theta_genus1(u + e, f.sigma) / (te**2 * prime_form_genus1(x, y, f) ** 2)
    rhs = bidifferential_genus1(x, y, f) + _log_theta_hessian(complex(e), f.sigma, h)
    return float(abs(lhs - rhs))


def sigma_genus1(p: complex, q: complex, f, n_nodes: int = 128, height: float | None = None,
                 return_error: bool = False):
    """sigma(P, Q) = exp(-int_a log(E(x, P)/E(x, Q)) dx) along a horizontal a-cycle.

    The cycle runs along Im x = height (default: midway between the points, shifted
    by half a period). The logarithm is unwrapped between nodes; its linear winding
    is integrated exactly and the periodic remainder by the trapezoid rule.
    """
    f = _as_frame(f)
    p, q = complex(p), complex(q)
    if p == q:
        return (1.0 + 0j, 0.0) if return_error else 1.0 + 0j
    if height is None:
        height = 0.5 * (p.imag + q.imag) - 0.5 * f.sigma.imag

    def integral(n):
        t = np.arange(n) / n
        xs = t + 1j * height
        vals = np.array([jacobi_theta1(p - x, f.sigma) / jacobi_theta1(q - x, f.sigma) for x in xs])
        if np.any(vals == 0):
            raise DomainError("a-cycle passes through P or Q")
        ph = np.unwrap(np.angle(vals))
        end = jacobi_theta1(p - xs[0] - 1, f.sigma) / jacobi_theta1(q - xs[0] - 1, f.sigma)
        ph_end = ph[-1] + np.angle(end / vals[-1])
        if np.max(np.abs(np.diff(np.append(ph, ph_end)))) > np.pi / 2:
            raise DomainError("logarithm branch tracking failed; refine the quadrature")
        winding = round((ph_end - ph[0]) / (2 * np.pi))
        periodic = np.log(np.abs(vals)) + 1j * (ph - 2 * np.pi * winding * t)
        return periodic.mean() + 1j * np.pi * winding

    i1 = integral(n_nodes)
    i2 = integral(2 * n_nodes)
    val = np.exp(-i2)
    if return_error:
        return val, float(abs(np.exp(-i1) - val))
    return val


def riemann_constants_genus1(f) -> complex:
    """Vector of Riemann constants for g = 1: 1/2 + sigma/2."""
    f = _as_frame(f)
    return 0.5 + 0.5 * f.sigma


def c_invariant_genus1(f) -> complex:
    """C = 2 pi i eta^3 exp(-pi i sigma / 4)."""
    f = _as_frame(f)
    s = f.sigma
    return 2j * math.pi * dedekind_eta(s) ** 3 * np.exp(-1j * math.pi * s / 4)


def c_invariant_from_theta(p: complex, q1: complex, f) -> complex:
    """C(P) from theta(int_P^Q1 v + K) sigma(Q1, P) / (v(Q1) E(P, Q1)) with v = dz."""
    f = _as_frame(f)
    k = riemann_constants_genus1(f)
    th = theta_genus1(complex(q1) - complex(p) + k, f.sigma)
    return th * sigma_genus1(q1, p, f) / prime_form_genus1(p, q1, f)


@dataclass(frozen=True)
class TauValue:
    tau_abs_sq: float
    phase_defined: bool = False


def tau_genus1(f) -> TauValue:
    """|tau_1|^2 from tau^-6 = exp(2 pi i r K) C^-4 with r = -1."""
    f = _as_frame(f)
    k = riemann_constants_genus1(f)
    c = c_invariant_genus1(f)
    log_abs_inv6 = (-2j * math.pi * k).real - 4 * math.log(abs(c))
    return TauValue(tau_abs_sq=math.exp(-log_abs_inv6 / 3), phase_defined=False)


def delta1_closure(f) -> float:
    """delta_1 Im(sigma) Area |tau_1|^2, to be compared with the closed-form determinant."""
    f = _as_frame(f)
    return DELTA1 * f.sigma.imag * f.area * tau_genus1(f).tau_abs_sq


# ---------------------------------------------------------------- exponent ledger

ATOMS = (
    "Delta_s",
    "E_plus_P_Pplus",
    "E_minus",
    "E_plus_D",
    "sigma_plus",
    "sigma_minus",
    "sigma_plus_D",
    "C_plus",
    "C_minus",
    "theta_plus",
    "theta_minus",
    "phase",
)


@dataclass
class ExponentLedger:
    """Exact exponents of asymptotic atoms in a product, with per-factor provenance."""

    atoms: dict = field(default_factory=lambda: {a: Fraction(0) for a in ATOMS})
    contributions: list = field(default_factory=list)

    def add(self, label: str, power, **atom_exponents):
        power = Fraction(power)
        entry = {}
        for atom, e in atom_exponents.items():
            if atom not in self.atoms:
                raise KeyError(f"unknown atom {atom}")
            v = power * Fraction(e)
            self.atoms[atom] += v
            entry[atom] = v
        self.contributions.append((label, entry))

    def total(self, atom: str) -> Fraction:
        return self.atoms[atom]


def ledger_assemble(g_plus: int, g_minus: int) -> ExponentLedger:
    """Exponents of Delta(s) and of the prime-form atoms in tau^-6 of the glued surface.

    The base point P lies on the plus component. Each factor of tau^-6 is
    replaced by its leading asymptotic monomial; the ledger sums exponents.
    """
    if g_plus < 1 or g_minus < 1:
        raise ValueError("component genera must be positive")
    b, a = Fraction(g_plus), Fraction(g_minus)
    g = a + b
    m_plus, m_minus = 2 * b - 2, 2 * a - 2
    led = ExponentLedger()
    # C(P)^-4, with C(P) ~ C+(P) C-(P-) E+(P,P+)^{a(g-1)} sigma+(P+,P)^a Delta^{a^2 - a}
    led.add("C(P)^-4", -4, C_plus=1, C_minus=1, E_plus_P_Pplus=a * (g - 1), sigma_plus=a,
            Delta_s=a * a - a)
    # sigma(D+, P) ~ sigma+(D+,P) [E+(P,P+)/E+(D+,P+)]^a, one per zero on the plus side
    led.add("sigma(D+,P)", m_plus, sigma_plus_D=1, E_plus_P_Pplus=a, E_plus_D=-a)
    # sigma(P_r,P) sigma(P_l,P) ~ [sigma+(P+,P) E+(P+,P)^a Delta^{(3a-b)/4}]^2
    led.add("sigma(P_r,P) sigma(P_l,P)", 2, sigma_plus=1, E_plus_P_Pplus=a, Delta_s=(3 * a - b) / 4)
    # sigma(D-, P) ~ sigma-(D-,P-) sigma+(P+,P) E+(P+,P)^a / E-(D-,P-)^b Delta^{a-b}
    led.add("sigma(D-,P)", m_minus, sigma_minus=1, sigma_plus=1, E_plus_P_Pplus=a, E_minus=-b,
            Delta_s=a - b)
    # prime forms raised to g - 1 at every zero of the differential
    led.add("E(D+,P)^(g-1)", m_plus * (g - 1), E_plus_D=1)
    # E(P_r,P)^2 ~ (2/sqrt s) E+(P,P+)^2 = Delta^{1/2} E+^2, likewise at P_l
    led.add("E(P_r,P) E(P_l,P)", 2 * (g - 1), Delta_s=Fraction(1, 4), E_plus_P_Pplus=1)
    # E(D-,P)^2 ~ -(16/s^2) E+(P,P+)^2 E-(D-,P-)^2 = -Delta^2 E+^2 E-^2
    led.add("E(D-,P)", m_minus * (g - 1), Delta_s=1, E_plus_P_Pplus=1, E_minus=1)
    return led


@dataclass(frozen=True)
class TauPrefactor:
    coefficient: float
    s_power: Fraction
    delta_power_in_tau_inv6: Fraction


def tau_factorization_prefactor(g_plus: int = 1, g_minus: int = 1) -> TauPrefactor:
    """tau ~ coefficient * s^s_power * tau_plus * tau_minus, derived from the ledger.

    With Delta(s) = 4/s entering tau^-6 with power d, tau carries Delta^(-d/6)
    = 4^(-d/6) s^(d/6).
    """
    led = ledger_assemble(g_plus, g_minus)
    d = led.total("Delta_s")
    if d != Fraction(3, 2) or led.total("E_plus_P_Pplus") != 0:
        raise ArithmeticError(f"exponent ledger does not close: Delta power {d}")
    tau_power = -d / 6  # power of Delta in tau
    coeff = 4.0 ** float(tau_power)
    return TauPrefactor(coefficient=coeff, s_power=-tau_power, delta_power_in_tau_inv6=d)


def delta_g(g: int, kappa0: float) -> float:
    """(2 sqrt 2 kappa0)^(g-1) delta_1^g."""
    if g < 1:
        raise ValueError("genus must be positive")
    if not kappa0 > 0:
        raise ValueError("kappa0 must be positive")
    return (2 * math.sqrt(2) * kappa0) ** (g - 1) * DELTA1**g
