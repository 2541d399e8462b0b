import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flatdet.special import DomainError, dedekind_eta
from flatdet.torus import TorusGeometry, torus_det_formula, torus_green, torus_spectral_det

upper = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.4, 2.5))


def test_geometry_basics():
    t = TorusGeometry(2.0, 1 + 3j)
    assert t.area == pytest.approx(6.0)
    assert t.sigma == pytest.approx(0.5 + 1.5j)
    with pytest.raises(DomainError):
        TorusGeometry(1.0, -1j)


def test_eigenvalues_square_torus():
    lam = TorusGeometry(1.0, 1j).eigenvalues(4 * math.pi**2 * 2.01)
    # |(m, n)|^2 = 1 (4 times) and 2 (4 times)
    assert np.allclose(lam, 4 * math.pi**2 * np.array([1, 1, 1, 1, 2, 2, 2, 2]))


@given(upper)
def test_reduce_is_a_lattice_translate(sigma):
    t = TorusGeometry(1.0, sigma)
    z = 3.7 - 2.2j
    r = t.reduce(z)
    u = (z - r) / t.period_a
    n = round(u.imag / sigma.imag)
    assert abs(u - n * sigma - round((u - n * sigma).real)) < 1e-12


@pytest.mark.parametrize("sigma", [1j, 0.3 + 0.8j, -0.2 + 2.0j])
def test_closed_form_is_four_times_spectral(sigma):
    # the closed form carries a factor 4 relative to the spectral zeta determinant
    t = TorusGeometry(1.0, sigma)
    assert torus_det_formula(t) / torus_spectral_det(t).value == pytest.approx(4.0, rel=1e-11)


def test_spectral_det_square_torus_value():
    eta = dedekind_eta(1j)
    assert torus_spectral_det(TorusGeometry(1.0, 1j)).value == pytest.approx(abs(eta) ** 4, rel=1e-12)


@given(st.floats(0.5, 3.0), upper)
def test_spectral_det_scaling(scale, sigma):
    # eigenvalues scale by scale^-2 and zeta(0) = -1, so det* scales by scale^2
    a = torus_spectral_det(TorusGeometry(1.0, sigma)).log_det
    b = torus_spectral_det(TorusGeometry(scale, scale * sigma)).log_det
    assert b - a == pytest.approx(2 * math.log(scale), abs=1e-10)


@given(upper)
def test_green_periodic(sigma):
    t = TorusGeometry(1.0, sigma)
    z = 0.23 + 0.17j
    g = torus_green(z, t).value
    assert torus_green(z + 1, t).value == pytest.approx(g, abs=1e-12)
    assert torus_green(z + sigma, t).value == pytest.approx(g, abs=1e-12)


def test_green_symmetric():
    t = TorusGeometry(1.0, 0.3 + 1.1j)
    for z in (0.2 + 0.1j, -0.4 + 0.5j):
        assert torus_green(-z, t).value == pytest.approx(torus_green(z, t).value, abs=1e-13)


def test_green_laplacian_is_inverse_area():
    t = TorusGeometry(1.0, 0.3 + 1.1j)
    z, h = 0.31 + 0.42j, 1e-3
    g = lambda w: torus_green(w, t).value
    lap = (g(z + h) + g(z - h) + g(z + 1j * h) + g(z - 1j * h) - 4 * g(z)) / h**2
    # -Delta G = -delta + 1/Area away from the lattice, with Delta = -(d_xx + d_yy)
    assert lap == pytest.approx(1 / t.area, rel=1e-4)


def test_green_mean_zero():
    t = TorusGeometry(1.0, 1j)
    n = 64
    # midpoint grid avoids the logarithmic singularity; error is O(log n / n^2)
    xs = (np.arange(n) + 0.5) / n - 0.5
    total = sum(torus_green(x + 1j * y, t).value for x in xs for y in xs) / n**2
    assert abs(total) < 2e-4


def test_green_log_singularity():
    t = TorusGeometry(1.0, 1j)
    r = 1e-4
    g = torus_green(r, t).value
    # G ~ -(1/2 pi) log r + const near the lattice
    g2 = torus_green(r / 2, t).value
    assert g2 - g == pytest.approx(math.log(2) / (2 * math.pi), rel=1e-6)
    with pytest.raises(DomainError):
        torus_green(0.0, t)
