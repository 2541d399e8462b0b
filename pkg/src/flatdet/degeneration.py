"""Genus-zero testbeds for three degenerating families of Riemann surfaces.

* Slit gluing along [0, s] (``CaseI``): the double cover of the sphere branched at
  0 and s, uniformized by X = z - s/2 + sqrt(z(z - s)).
* Slit gluing along [-sqrt t, sqrt t] (``CaseIa``): uniformized by
  gamma = z + sqrt(z^2 - t).
* Plumbing (``CaseIb``): two spheres glued by z_plus z_minus = t.

In the uniformizing coordinate each family is the Riemann sphere, so the canonical
bidifferential is dX dY / (X - Y)^2 and all asymptotic claims can be checked
against exact values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P


class BranchError(ValueError):
    """Point lies on a branch cut or coincides with a pole."""


class ConvergenceError(RuntimeError):
    """Quadrature or extrapolation failed to reach the requested tolerance."""


class FamilyKind(enum.Enum):
    CaseI = "I"
    CaseIa = "Ia"
    CaseIb = "Ib"


class Sheet(enum.IntEnum):
    plus = 1
    minus = -1


@dataclass(frozen=True)
class DegenFamily:
    kind: FamilyKind
    param: complex

    def __post_init__(self):
        if not abs(self.param) < 1:
            raise ValueError("degeneration parameter must satisfy |param| < 1")


@dataclass(frozen=True)
class SheetedPoint:
    z: complex
    sheet: Sheet = Sheet.plus


def _on_segment(z: complex, a: complex, b: complex, tol: float = 1e-14) -> bool:
    d = b - a
    if d == 0:
        return abs(z - a) < tol
    u = (z - a) / d
    return abs(u.imag) * abs(d) < tol and -tol <= u.real <= 1 + tol


# ---------------------------------------------------------------- slit along [-sqrt t, sqrt t]

def _root_ia(z: complex, t: complex, sheet: int) -> complex:
    # sqrt((z - sqrt t)(z + sqrt t)) ~ z at infinity, cut on the segment between the roots
    r = np.sqrt(complex(t))
    if _on_segment(z, -r, r):
        raise BranchError(f"point {z} lies on the cut between the branch points")
    if z == 0:
        return sheet * 1j * r  # t != 0 here, otherwise z would be on the degenerate cut
    return sheet * z * np.sqrt(1 - t / (z * z))


def uniformizer_case_ia(p: SheetedPoint, t: complex) -> complex:
    """gamma = z + sqrt(z^2 - t) with the sheet selecting the root's sign."""
    z = complex(p.z)
    return z + _root_ia(z, complex(t), int(p.sheet))


def _gamma_ia_with_derivative(p: SheetedPoint, t: complex):
    z = complex(p.z)
    root = _root_ia(z, complex(t), int(p.sheet))
    return z + root, 1 + z / root


def bidiff_case_ia(p: SheetedPoint, q: SheetedPoint, t: complex) -> complex:
    """Coefficient of the sphere bidifferential pulled back to the z-coordinates."""
    gp, dp = _gamma_ia_with_derivative(p, t)
    gq, dq = _gamma_ia_with_derivative(q, t)
    if abs(gp - gq) < 1e-300:
        raise BranchError("coincident points")
    return dp * dq / (gp - gq) ** 2


def case_ia_leading(p: SheetedPoint, q: SheetedPoint, t: complex) -> complex:
    """Leading terms: 1/(z - w)^2 + t/(4 z^2 w^2) on one sheet, -t/(4 z^2 w^2) across."""
    z, w = complex(p.z), complex(q.z)
    corr = t / (4 * z * z * w * w)
    if p.sheet == q.sheet:
        return 1 / (z - w) ** 2 + corr
    return -corr


# ---------------------------------------------------------------- plumbing

class Placement(enum.Enum):
    plus_plus = "plus_plus"
    minus_minus = "minus_minus"
    cross = "cross"


def bidiff_case_ib(p_coord: complex, q_coord: complex, placement: Placement, t: complex) -> complex:
    """Sphere bidifferential for two spheres joined by plumbing z = v, z = t w."""
    placement = Placement(placement)
    p_coord, q_coord = complex(p_coord), complex(q_coord)
    if placement is Placement.plus_plus:
        d = p_coord - q_coord
        scale = 1.0
    elif placement is Placement.minus_minus:
        d = t * (p_coord - q_coord)
        scale = t * t
    else:
        d = p_coord - t * q_coord
        scale = t
    if abs(d) < 1e-300:
        raise BranchError("coincident points")
    return scale / d**2


# ---------------------------------------------------------------- slit along [0, s]

def _root_i(z: complex, s: complex, sheet: int) -> complex:
    if _on_segment(z, 0, s):
        raise BranchError(f"point {z} lies on the cut [0, s]")
    w = z - s / 2
    return sheet * w * np.sqrt(1 - s * s / (4 * w * w))


def uniformizer_case_i(p: SheetedPoint, s: complex) -> complex:
    """X = z - s/2 + sqrt(z(z - s)), principal branch on the plus sheet."""
    z, s = complex(p.z), complex(s)
    return z - s / 2 + _root_i(z, s, int(p.sheet))


def case_i_dX_dz(p: SheetedPoint, s: complex) -> complex:
    z, s = complex(p.z), complex(s)
    rho = _root_i(z, s, int(p.sheet))
    return (z - s / 2 + rho) / rho


def case_i_inverse(X: complex, s: complex) -> complex:
    """z as a function of X (the sheet is encoded by |X| relative to |s|/2)."""
    return X / 2 + s / 2 + s * s / (8 * X)


def monomial_change_of_basis(n: int, s: complex):
    """Polynomials p, q with X^n dX = [p(z) + q(z)/sqrt(z(z-s))] dz * s^s_power.

    Returns ``(p, q, s_power)``; coefficient arrays are in increasing powers of z.
    For n < 0 the factor s^(2n+2) (a negative power for n <= -2) is split off.
    """
    s = complex(s)
    w = np.array([-s / 2, 1.0 + 0j])  # z - s/2
    rho2 = np.array([0j, -s, 1.0 + 0j])  # z^2 - s z
    if n >= 0:
        m, prefactor, s_power = n + 1, 1.0, 0
    else:
        k = -n
        m, prefactor, s_power = k - 1, 4.0 ** (k - 1), -(2 * k - 2)
    sign = 1 if n >= 0 else -1  # (w + rho)^m or (w - rho)^m
    p = np.zeros(1, dtype=complex)
    q = np.zeros(1, dtype=complex)
    for j in range(m + 1):
        coef = math.comb(m, j) * sign**j * prefactor
        wpart = P.polypow(w, m - j) if m - j > 0 else np.array([1.0 + 0j])
        if j % 2 == 1:
            r = P.polypow(rho2, (j - 1) // 2) if j > 1 else np.array([1.0 + 0j])
            p = P.polyadd(p, coef * P.polymul(wpart, r))
        else:
            r = P.polypow(rho2, j // 2) if j > 0 else np.array([1.0 + 0j])
            q = P.polyadd(q, coef * P.polymul(wpart, r))
    p = np.trim_zeros(np.asarray(p, dtype=complex), "b")
    q = np.trim_zeros(np.asarray(q, dtype=complex), "b")
    return p, q, s_power


def polyval_or_zero(z, coeffs) -> complex:
    """Polynomial value, treating an empty coefficient array as the zero polynomial."""
    return P.polyval(z, coeffs) if len(coeffs) else 0j


@dataclass(frozen=True)
class LaurentRepr:
    """v dz = sum a_k z^k dz + sum b_k z^k dz / sqrt(z(z - s)) in the pinching zone."""

    trunc: int
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    s: complex
    gamma_pos: np.ndarray
    gamma_neg: np.ndarray
    residual: float

    def evaluate(self, p: SheetedPoint) -> complex:
        z = complex(p.z)
        rho = _root_i(z, self.s, int(p.sheet))
        return polyval_or_zero(z, self.a_coeffs) + polyval_or_zero(z, self.b_coeffs) / rho


def _circle_coeffs(sampler, r: float, m: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(m) / m
    pts = r * np.exp(1j * theta)
    vals = np.array([sampler(x) for x in pts], dtype=complex)
    return np.fft.fft(vals) / m


def laurent_fit(sampler: Callable[[complex], complex], s: complex, K: int = 40,
                r_outer: float = 0.9, inner_factor: float = 3.6, tol: float = 1e-12,
                max_points: int = 4096) -> LaurentRepr:
    """Laurent coefficients of f(X) dX on the annulus, converted to the (a, b) form.

    ``sampler`` returns f(X). Positive coefficients come from |X| = r_outer and
    negative ones from |X| = |s|^2 / inner_factor; the trapezoid rule is refined
    until successive coefficient sets agree to ``tol`` (relative).
    """
    s = complex(s)
    r_inner = abs(s) ** 2 / inner_factor
    if r_inner <= 0 or r_inner >= r_outer:
        raise ValueError("annulus is empty for this parameter")
    m = max(64, 4 * K)
    prev = None
    while True:
        co = _circle_coeffs(sampler, r_outer, m)
        ci = _circle_coeffs(sampler, r_inner, m)
        gp = np.array([co[n] / r_outer**n for n in range(K + 1)])
        gn = np.array([ci[-n] * r_inner**n for n in range(1, K + 1)])  # gamma_{-n}, n = 1..K
        cur = np.concatenate([gp, gn])
        scale = max(np.abs(cur).max(), 1e-300)
        if prev is not None:
            diff = np.abs(cur - prev).max() / scale
            if diff < tol:
                break
        if 2 * m > max_points:
            if prev is None:
                raise ConvergenceError("Laurent quadrature did not converge")
            diff = np.abs(cur - prev).max() / scale
            if diff > 1e3 * tol:
                raise ConvergenceError(f"Laurent quadrature residual {diff:.2e} above tolerance")
            break
        prev = cur
        m *= 2
    a = np.zeros(K + 2, dtype=complex)
    b = np.zeros(K + 2, dtype=complex)
    for n in range(-K, K + 1):
        g = gp[n] if n >= 0 else gn[-n - 1]
        if g == 0:
            continue
        p, q, spow = monomial_change_of_basis(n, s)
        fac = g * s**spow
        a[: len(p)] += fac * p[: K + 2]
        b[: len(q)] += fac * q[: K + 2]
    res = 0.0 if prev is None else float(np.abs(cur - prev).max())
    return LaurentRepr(trunc=K, a_coeffs=a[: K + 1], b_coeffs=b[: K + 1], s=s,
                       gamma_pos=gp, gamma_neg=gn, residual=res)


def sphere_sampler(q: SheetedPoint, s: complex) -> Callable[[complex], complex]:
    """f(X) for the differential W(., Q) = dX dX_Q / (X - X_Q)^2 in the z_Q coordinate."""
    xq = uniformizer_case_i(q, s)
    dq = case_i_dX_dz(q, s)
    return lambda X: dq / (X - xq) ** 2


@dataclass(frozen=True)
class StructureResiduals:
    b0_at_0: float
    a0_minus_b1: float
    b0_prime_plus_half_b1: float
    a0_at_0: complex
    b1_at_0: complex
    b0_prime_at_0: complex


def structure_relations_residual(family: Callable[[complex], LaurentRepr], s0: complex = 0.02,
                                 levels: int = 4) -> StructureResiduals:
    """Residuals of b0(0) = 0, a0(0) = b1(0) and b0'(0) + b1(0)/2 = 0.

    The family is sampled at s0 2^-j; a polynomial in s through these samples
    (Richardson extrapolation with ratio 2) yields values and slopes at s = 0.
    """
    svals = np.array([s0 * 2.0**-j for j in range(levels)], dtype=complex)
    reps = [family(sv) for sv in svals]
    a0 = np.array([r.a_coeffs[0] for r in reps])
    b0 = np.array([r.b_coeffs[0] for r in reps])
    b1 = np.array([r.b_coeffs[1] if len(r.b_coeffs) > 1 else 0 for r in reps])
    # exact polynomial through the samples in the scaled variable s/s0
    x = (svals / s0).real
    vander = np.vander(x, levels, increasing=True)

    def coeffs(y):
        return np.linalg.solve(vander, y)

    ca0, cb0, cb1 = coeffs(a0), coeffs(b0), coeffs(b1)
    a00, b00, b10 = ca0[0], cb0[0], cb1[0]
    b0p = cb0[1] / s0
    return StructureResiduals(
        b0_at_0=float(abs(b00)),
        a0_minus_b1=float(abs(a00 - b10)),
        b0_prime_plus_half_b1=float(abs(b0p + b10 / 2)),
        a0_at_0=complex(a00),
        b1_at_0=complex(b10),
        b0_prime_at_0=complex(b0p),
    )


class BranchEnd(enum.Enum):
    P_r = "P_r"
    P_l = "P_l"


def bidiff_at_branch(p: SheetedPoint, which_end: BranchEnd, s: complex) -> complex:
    """W(P, branch point) in the local parameter t at that branch point.

    At P_r the parameter is t with z = s + t^2 and at P_l it is t with z = t^2.
    The branch point images are X = s/2 and X = -s/2, with dX/dt = sqrt(s) and
    dX/dt = -i sqrt(s) respectively (branch of sqrt(z - s) at P_l fixed by
    sqrt(-s) = -i sqrt(s)).
    """
    s = complex(s)
    end = BranchEnd(which_end)
    z = complex(p.z)
    if abs(z) < 2 * abs(s):
        raise BranchError("point lies in the pinching zone")
    xp = uniformizer_case_i(p, s)
    dxp = case_i_dX_dz(p, s)
    root = np.sqrt(s)
    if end is BranchEnd.P_r:
        x_end, dx_dt = s / 2, root
    else:
        x_end, dx_dt = -s / 2, -1j * root
    return dxp * dx_dt / (xp - x_end) ** 2


def branch_leading(p: SheetedPoint, which_end: BranchEnd, s: complex) -> complex:
    """Leading term sqrt(s)/2 W(P_0, P) (times -i at P_l), limit surface on P's sheet."""
    z = complex(p.z)
    # the limiting component bidifferential between the node and P is 1/z^2 on either sheet
    lead = np.sqrt(complex(s)) / 2 / z**2
    if BranchEnd(which_end) is BranchEnd.P_l:
        lead *= -1j
    if p.sheet == Sheet.minus:
        # X_P ~ s^2/(8 z) and dX_P/dz ~ -s^2/(8 z^2): the sign flips at both ends
        lead = -lead
    return lead


def loglog_slope(params: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log|error| against log|param|."""
    x = np.log(np.abs(np.asarray(params, dtype=float)))
    y = np.log(np.abs(np.asarray(errors)).astype(float))
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------- remainder sweeps

DEGEN_CASES = ("ia-same", "ia-cross", "ib-cross", "branch-r", "branch-l")

_P_DEFAULT = 1.3 + 0.4j
_Q_DEFAULT = 0.5 - 0.7j


@dataclass(frozen=True)
class RemainderRow:
    param: float
    exact: complex
    leading: complex
    remainder: float
    relative: float


@dataclass(frozen=True)
class RemainderSweep:
    case: str
    rows: tuple
    slope: float
    relative_slope: float
    claimed_order: float
    uses_relative: bool

    @property
    def fitted_order(self) -> float:
        return self.relative_slope if self.uses_relative else self.slope


def remainder_sweep(case: str, params: Sequence[float], p: complex = _P_DEFAULT,
                    q: complex = _Q_DEFAULT) -> RemainderSweep:
    """Exact value, leading term and remainder of a degeneration expansion over ``params``.

    ``ia-same``/``ia-cross`` test the slit family with both points on one sheet
    or on opposite sheets (raw remainder order 2), ``ib-cross`` the plumbing
    cross term and ``branch-r``/``branch-l`` the bidifferential at a branch
    point of the [0, s] family (remainder order 1 relative to the leading term).
    """
    if case not in DEGEN_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {DEGEN_CASES}")
    rows = []
    for t in params:
        t = float(t)
        if case in ("ia-same", "ia-cross"):
            sq = Sheet.plus if case == "ia-same" else Sheet.minus
            pp, qq = SheetedPoint(p), SheetedPoint(q, sq)
            exact = bidiff_case_ia(pp, qq, t)
            lead = case_ia_leading(pp, qq, t)
        elif case == "ib-cross":
            exact = bidiff_case_ib(p, q, Placement.cross, t)
            lead = t / p**2
        else:
            end = BranchEnd.P_r if case == "branch-r" else BranchEnd.P_l
            pp = SheetedPoint(p)
            exact = bidiff_at_branch(pp, end, t)
            lead = branch_leading(pp, end, t)
        rem = abs(exact - lead)
        rows.append(RemainderRow(t, complex(exact), complex(lead), float(rem), float(rem / abs(lead))))
    x = [r.param for r in rows]
    slope = loglog_slope(x, [r.remainder for r in rows])
    rel = loglog_slope(x, [r.relative for r in rows])
    relative = case in ("ib-cross", "branch-r", "branch-l")
    claimed = 2.0 if case in ("ia-same", "ia-cross") else 1.0
    return RemainderSweep(case, tuple(rows), slope, rel, claimed, relative)
