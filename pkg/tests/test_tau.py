import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flatdet.special import dedekind_eta, jacobi_theta1
from flatdet.tau import (
    DELTA1,
    CoincidentPointsError,
    Genus1Frame,
    ThetaZeroError,
    bidifferential_genus1,
    c_invariant_from_theta,
    c_invariant_genus1,
    delta1_closure,
    delta_g,
    ledger_assemble,
    prime_form_genus1,
    riemann_constants_genus1,
    sigma_genus1,
    tau_factorization_prefactor,
    tau_genus1,
    verify_fay_identity,
)
from flatdet.torus import TorusGeometry, torus_det_formula

upper = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.5, 2.0))


def test_prime_form_local_behaviour():
    f = Genus1Frame(0.2 + 1.1j)
    x, h = 0.3 + 0.2j, 1e-6
    assert prime_form_genus1(x, x + h, f) / h == pytest.approx(1.0, rel=1e-6)
    assert prime_form_genus1(x + h, x, f) == pytest.approx(-prime_form_genus1(x, x + h, f), rel=1e-12)
    with pytest.raises(CoincidentPointsError):
        prime_form_genus1(x, x + 1, f)


def test_bidifferential_double_pole_and_derivative():
    f = Genus1Frame(1j)
    x, y = 0.1 + 0.1j, 0.35 - 0.2j
    h = 1e-4
    # W = d_x d_y log E by central differences
    le = lambda a, b: np.log(prime_form_genus1(a, b, f))
    fd = (le(x + h, y + h) - le(x + h, y - h) - le(x - h, y + h) + le(x - h, y - h)) / (4 * h * h)
    assert abs(fd - bidifferential_genus1(x, y, f)) < 1e-5
    d = 1e-3
    assert abs(bidifferential_genus1(x, x + d, f) * d * d - 1) < 1e-5


def test_bidifferential_a_period_vanishes():
    f = Genus1Frame(0.3 + 0.9j)
    y = 0.2 + 0.45j
    xs = np.arange(256) / 256 + 0.05j
    assert abs(np.mean([bidifferential_genus1(x, y, f) for x in xs])) < 1e-10


@pytest.mark.parametrize("x,y,e", [(0.1 + 0.1j, 0.4 - 0.1j, 0.2 + 0.3j), (0.0, 0.25 + 0.3j, 0.1 - 0.2j)])
def test_fay_identity(x, y, e):
    assert verify_fay_identity(x, y, e, 0.1 + 1.2j) < 1e-7


def test_fay_rejects_theta_zero():
    f = Genus1Frame(1j)
    with pytest.raises(ThetaZeroError):
        verify_fay_identity(0.1, 0.3, riemann_constants_genus1(f), f)


@given(upper)
def test_sigma_inverse_symmetry(sigma):
    f = Genus1Frame(sigma)
    p, q = 0.2 + 0.1 * sigma, 0.6 + 0.3 * sigma
    assert abs(sigma_genus1(p, q, f) * sigma_genus1(q, p, f) - 1) < 1e-10


def test_sigma_quadrature_converged():
    _, err = sigma_genus1(0.1 + 0.1j, 0.7 + 0.4j, Genus1Frame(0.1 + 1.05j), return_error=True)
    assert err < 1e-12


@pytest.mark.parametrize("q1", [0.3 + 0.2j, 0.55 + 0.1j, 0.8 + 0.35j, 0.15 + 0.6j, 0.45 + 0.45j])
def test_c_invariant_independent_of_auxiliary_point(q1):
    f = Genus1Frame(1j)
    p = 0.05 + 0.05j
    assert abs(c_invariant_from_theta(p, q1, f)) == pytest.approx(abs(c_invariant_genus1(f)), rel=1e-9)


def test_c_invariant_square_torus_value():
    # frozen from the theta representation at five auxiliary points
    assert abs(c_invariant_genus1(1j)) == pytest.approx(6.2479850455714, rel=1e-12)


@given(upper)
def test_delta1_closure_matches_closed_form(sigma):
    lhs = delta1_closure(Genus1Frame(sigma))
    rhs = torus_det_formula(TorusGeometry(1.0, sigma))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_tau_abs_square_closed_form():
    sigma = 0.25 + 0.8j
    # |tau|^2 = (4 / delta1) |eta|^4, independent of the phase convention
    assert tau_genus1(sigma).tau_abs_sq == pytest.approx(4 / DELTA1 * abs(dedekind_eta(sigma)) ** 4, rel=1e-12)


def test_delta1_value():
    assert DELTA1 == pytest.approx(4 / (2 * math.pi) ** (4 / 3), rel=1e-15)


@given(st.integers(1, 25), st.integers(1, 25))
def test_ledger_totals(gp, gm):
    led = ledger_assemble(gp, gm)
    assert led.total("Delta_s") == Fraction(3, 2)
    assert led.total("E_plus_P_Pplus") == 0
    assert led.total("sigma_plus") == -2 * gm


def test_ledger_rejects_genus_zero():
    with pytest.raises(ValueError):
        ledger_assemble(0, 2)


def test_ledger_records_every_factor():
    led = ledger_assemble(2, 3)
    labels = [c[0] for c in led.contributions]
    assert len(labels) == 7 and labels[0] == "C(P)^-4"
    summed = sum(entry.get("Delta_s", 0) for _, entry in led.contributions)
    assert summed == led.total("Delta_s")


def test_tau_prefactor_derived():
    pre = tau_factorization_prefactor()
    assert pre.coefficient == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert pre.s_power == Fraction(1, 4)
    assert pre.delta_power_in_tau_inv6 == Fraction(3, 2)


@given(st.integers(1, 10), st.floats(0.1, 5.0))
def test_delta_g_recursion(g, k0):
    assert delta_g(g + 1, k0) / delta_g(g, k0) == pytest.approx(2 * math.sqrt(2) * k0 * DELTA1, rel=1e-12)


def test_delta_g_domain():
    with pytest.raises(ValueError):
        delta_g(0, 1.0)
    with pytest.raises(ValueError):
        delta_g(2, -1.0)
