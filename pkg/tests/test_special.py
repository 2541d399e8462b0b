import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from flatdet.special import (
    DomainError,
    PeriodMatrix,
    TruncationPolicy,
    dedekind_eta,
    epstein_zeta_det,
    hurwitz_zeta,
    hurwitz_zeta_deriv,
    jacobi_theta1,
    lattice_points,
    log_theta1_derivs,
    riemann_theta,
    theta_genus1,
    zeta_constants,
)

mp.mp.dps = 30

upper = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.3, 3.0))
small_z = st.builds(complex, st.floats(-0.45, 0.45), st.floats(-0.4, 0.4))


def mp_eta(sigma):
    q = mp.exp(2j * mp.pi * sigma)
    return complex(mp.exp(2j * mp.pi * sigma / 24) * mp.qp(q))


def mp_theta1(z, sigma, deriv=0):
    q = mp.exp(1j * mp.pi * sigma)
    return complex(mp.pi**deriv * mp.jtheta(1, mp.pi * z, q, deriv))


@pytest.mark.parametrize("sigma", [1j, 0.5 + 0.866j, -0.3 + 0.4j, 0.1 + 2.5j])
def test_eta_matches_q_product(sigma):
    assert abs(dedekind_eta(sigma) - mp_eta(sigma)) < 1e-14 * abs(mp_eta(sigma))


def test_eta_at_i_closed_form():
    assert abs(dedekind_eta(1j) - math.gamma(0.25) / (2 * math.pi**0.75)) < 1e-15


@given(upper)
def test_eta_modular_s(sigma):
    lhs = dedekind_eta(-1 / sigma)
    rhs = np.sqrt(-1j * sigma) * dedekind_eta(sigma)
    assert abs(lhs - rhs) < 1e-11 * max(1.0, abs(rhs))


@given(upper)
def test_eta_modular_t(sigma):
    lhs = dedekind_eta(sigma + 1)
    rhs = np.exp(1j * np.pi / 12) * dedekind_eta(sigma)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_eta_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        dedekind_eta(-1j)


@pytest.mark.parametrize("z,sigma", [(0.3 + 0.1j, 1j), (0.1 - 0.2j, 0.2 + 0.8j), (0.45, 0.5 + 1.5j)])
@pytest.mark.parametrize("deriv", [0, 1, 2, 3])
def test_theta1_matches_mpmath(z, sigma, deriv):
    ref = mp_theta1(z, sigma, deriv)
    assert abs(abs(jacobi_theta1(z, sigma, deriv)) - abs(ref)) < 1e-12 * max(1, abs(ref))
    assert abs(jacobi_theta1(z, sigma, deriv) - ref) < 1e-12 * max(1, abs(ref)) or \
        abs(jacobi_theta1(z, sigma, deriv) + ref) < 1e-12 * max(1, abs(ref))


@given(upper)
def test_theta1_derivative_at_zero_is_2pi_eta_cubed(sigma):
    lhs = abs(jacobi_theta1(0, sigma, 1))
    rhs = 2 * math.pi * abs(dedekind_eta(sigma)) ** 3
    assert abs(lhs - rhs) < 1e-11 * rhs


@given(small_z, upper)
def test_theta1_quasi_periodicity(z, sigma):
    base = jacobi_theta1(z, sigma)
    assert abs(jacobi_theta1(z + 1, sigma) + base) < 1e-10 * max(1, abs(base))
    shifted = jacobi_theta1(z + sigma, sigma)
    factor = -np.exp(-1j * np.pi * sigma - 2j * np.pi * z)
    assert abs(shifted - factor * base) < 1e-9 * max(1, abs(factor * base))


@given(small_z, upper)
def test_log_theta1_derivs_consistent(z, sigma):
    lattice = [m + n * sigma for m in (-1, 0, 1) for n in (-1, 0, 1)]
    assume(min(abs(z - w) for w in lattice) > 0.05)
    d1, d2 = log_theta1_derivs(z, sigma)
    t0, t1, t2 = (jacobi_theta1(z, sigma, k) for k in range(3))
    assert abs(d1 - t1 / t0) < 1e-9 * max(1, abs(d1))
    assert abs(d2 - (t2 / t0 - (t1 / t0) ** 2)) < 1e-8 * max(1, abs(d2))


def test_lattice_points_brute_force():
    gram = np.array([[2.0, 0.5], [0.5, 1.0]])
    pts = {tuple(p) for p in lattice_points(gram, 3.0)}
    brute = {(i, j) for i in range(-10, 11) for j in range(-10, 11)
             if np.array([i, j]) @ gram @ np.array([i, j]) <= 9.0}
    assert pts == brute


@pytest.mark.parametrize("v,sigma", [(0.2 + 0.1j, 1j), (0.37 - 0.2j, 0.3 + 0.7j)])
def test_theta_genus1_matches_jtheta3(v, sigma):
    ref = complex(mp.jtheta(3, mp.pi * v, mp.exp(1j * mp.pi * sigma)))
    assert abs(theta_genus1(v, sigma) - ref) < 1e-13 * abs(ref)


def test_riemann_theta_genus2_matches_brute_force():
    omega = np.array([[1.1j, 0.3 + 0.2j], [0.3 + 0.2j, 0.2 + 0.9j]])
    v = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    brute = 0j
    for n in range(-12, 13):
        for m in range(-12, 13):
            k = np.array([n, m])
            brute += np.exp(1j * np.pi * k @ omega @ k + 2j * np.pi * k @ v)
    res = riemann_theta(v, omega, full=True)
    assert abs(res.value - brute) < 1e-13
    assert res.tail_bound < 1e-14


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_riemann_theta_quasi_periodic(n, m):
    omega = np.array([[1.1j, 0.3 + 0.2j], [0.3 + 0.2j, 0.2 + 0.9j]])
    v = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    k = np.array([n, m])
    base = riemann_theta(v, omega)
    assert abs(riemann_theta(v + k, omega) - base) < 1e-11
    shifted = riemann_theta(v + omega @ k, omega)
    factor = np.exp(-1j * np.pi * k @ omega @ k - 2j * np.pi * k @ v)
    assert abs(shifted - factor * base) < 1e-9 * abs(factor * base)


def test_period_matrix_validation():
    with pytest.raises(DomainError):
        PeriodMatrix(np.array([[1j, 0.2], [0.3, 1j]]))
    with pytest.raises(DomainError):
        PeriodMatrix(np.array([[-1j]]))
    with pytest.raises(ValueError):
        TruncationPolicy(max_lattice_radius=-1)


@pytest.mark.parametrize("t,a", [(2.5, 1.0), (3.0 + 1j, 0.5), (-1.5, 2.0), (0.5 + 2j, 1.3)])
def test_hurwitz_zeta_matches_mpmath(t, a):
    ref = complex(mp.zeta(t, a))
    assert abs(hurwitz_zeta(t, a) - ref) < 1e-12 * max(1, abs(ref))


@pytest.mark.parametrize("t,a", [(-1.0, 1.0), (0.0, 1.0), (2.0, 0.7), (-0.5 + 1j, 1.5)])
def test_hurwitz_zeta_derivative_matches_mpmath(t, a):
    ref = complex(mp.zeta(t, a, 1))
    assert abs(hurwitz_zeta_deriv(t, a) - ref) < 1e-11 * max(1, abs(ref))


def test_zeta_constants():
    zc = zeta_constants()
    assert zc.zeta_at_0 == -0.5
    assert abs(zc.zeta_prime_at_0 + 0.5 * math.log(2 * math.pi)) < 1e-16
    assert abs(zc.zeta_prime_at_minus1 - float(mp.zeta(-1, 1, 1))) < 1e-14


def kronecker_log_det(sigma):
    # first Kronecker limit formula for the eigenvalues 4 pi^2 |m sigma - n|^2 / y^2
    y = sigma.imag
    return math.log(y * y * abs(dedekind_eta(sigma)) ** 4)


@pytest.mark.parametrize("sigma", [1j, 0.5 + 0.866025403784j, 0.2 + 0.3j, -0.4 + 3.0j])
def test_epstein_det_matches_kronecker_limit(sigma):
    res = epstein_zeta_det(1.0, sigma)
    assert abs(res.log_det - kronecker_log_det(sigma)) < 1e-11
    assert res.zeta_at_0 == -1.0


def test_epstein_det_brute_force_heat_split():
    # independent evaluation: heat-trace split with mpmath incomplete gamma on the raw eigenvalues
    sigma = 0.3 + 1.1j
    y = sigma.imag
    lam = [4 * math.pi**2 * abs(m * sigma - n) ** 2 / y**2
           for m in range(-25, 26) for n in range(-25, 26) if (m, n) != (0, 0)]
    t0 = 1 / (4 * math.pi) * y
    big = sum(float(mp.e1(l * t0)) for l in lam if l * t0 < 60)
    # small-time part via Poisson: heat trace K(t) = (area/(4 pi t)) sum exp(-|gamma|^2/(4t)) - 1
    area = y
    gam = [abs(m * sigma + n) ** 2 for m in range(-25, 26) for n in range(-25, 26) if (m, n) != (0, 0)]
    small = sum(area / (math.pi * g) * math.exp(-g / (4 * t0)) for g in gam)
    zp = big - area / (4 * math.pi * t0) - math.log(t0) - float(mp.euler) + small
    assert abs(epstein_zeta_det(1.0, sigma).log_det + zp) < 1e-10


@given(upper)
def test_epstein_det_lattice_invariance(sigma):
    a = epstein_zeta_det(1.0, sigma).log_det
    b = epstein_zeta_det(1.0, sigma + 1).log_det
    c = epstein_zeta_det(sigma, -1.0).log_det
    assert abs(a - b) < 1e-10
    assert abs(a - c) < 1e-10


def test_epstein_rejects_degenerate_periods():
    with pytest.raises(DomainError):
        epstein_zeta_det(1.0, 2.0)
