import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatdet.circle import zeta_det_regularized
from flatdet.slit import (
    SlitBC,
    SlitDomainSpec,
    det_nu_plus_slit_dtn,
    exact_disk_log_det,
    heat_split_log_det,
    kappa0_prefactor,
    polar_laplacian,
    slit_dtn,
    slit_laplacian_det_estimate,
)
from flatdet.surgery import disk_det


def test_spec_validation():
    with pytest.raises(ValueError):
        SlitDomainSpec(1.0)
    with pytest.raises(ValueError):
        SlitDomainSpec(0.5, "X")
    assert SlitDomainSpec(0.5, "N").bc_slit is SlitBC.Neumann


def test_dirichlet_sine_block_is_diag_k():
    # odd data in phi extends by zero across the slit: the DtN acts on it like |nu|
    n = slit_dtn(SlitDomainSpec(0.5, SlitBC.Dirichlet), 12)
    for k in range(1, 8):
        v = np.zeros(25, complex)
        v[12 + k], v[12 - k] = 1, -1
        out = n.entries @ v
        assert np.abs(out - k * v).max() < 1e-10


@given(st.floats(0.05, 0.6))
@settings(max_examples=6)
def test_slit_dtn_hermitian_and_nonnegative(a):
    for bc in SlitBC:
        e = slit_dtn(SlitDomainSpec(a, bc), 12).entries
        assert np.abs(e - e.conj().T).max() < 1e-9
        assert np.linalg.eigvalsh(0.5 * (e + e.conj().T)).min() > -1e-9


def test_slit_dtn_rejects_long_slits():
    with pytest.raises(ValueError):
        slit_dtn(SlitDomainSpec(0.8), 12)


def test_neumann_slit_vanishing_length_limit():
    n = slit_dtn(SlitDomainSpec(0.01, SlitBC.Neumann), 12)
    assert np.abs(n.entries - np.diag(np.abs(n.modes()))).max() < 1e-4


def test_neumann_slit_kills_constants():
    n = slit_dtn(SlitDomainSpec(0.5, SlitBC.Neumann), 12)
    assert np.abs(n.entries[:, 12]).max() < 1e-10


def test_dirichlet_slit_dominates_neumann():
    d = slit_dtn(SlitDomainSpec(0.5, SlitBC.Dirichlet), 12).entries
    n = slit_dtn(SlitDomainSpec(0.5, SlitBC.Neumann), 12).entries
    assert np.linalg.eigvalsh(0.5 * ((d - n) + (d - n).conj().T)).min() > -1e-9


@pytest.mark.parametrize("bc,zeta0", [(SlitBC.Dirichlet, 0.0), (SlitBC.Neumann, -1.0)])
def test_zeta_at_zero_kernel_accounting(bc, zeta0):
    r = det_nu_plus_slit_dtn(SlitDomainSpec(0.5, bc), 32)
    assert r.zeta_at_0 == pytest.approx(zeta0, abs=1e-6)


def test_slit_dtn_det_self_convergence():
    a = det_nu_plus_slit_dtn(SlitDomainSpec(0.5, SlitBC.Dirichlet), 24).log_det
    b = det_nu_plus_slit_dtn(SlitDomainSpec(0.5, SlitBC.Dirichlet), 48).log_det
    assert abs(a - b) < 1e-6


def test_polar_laplacian_is_symmetric_positive():
    m, area = polar_laplacian(8, 0.5, SlitBC.Neumann)
    assert abs(m - m.T).max() < 1e-12
    assert area.sum() == pytest.approx(math.pi)
    assert np.linalg.eigvalsh(m.toarray()).min() > 0


def test_polar_laplacian_lowest_disk_eigenvalue():
    from scipy.sparse.linalg import eigsh
    from scipy.special import jn_zeros

    m, _ = polar_laplacian(32, None, None)
    lam = eigsh(m, k=1, sigma=0, return_eigenvectors=False)[0]
    assert lam == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=2e-3)


def test_slit_eigenvalue_monotonicity():
    # a Neumann cut enlarges the form domain, a Dirichlet cut shrinks it
    from scipy.sparse.linalg import eigsh

    base = eigsh(polar_laplacian(16, None, None)[0], k=1, sigma=0, return_eigenvectors=False)[0]
    dn = eigsh(polar_laplacian(16, 0.5, SlitBC.Neumann)[0], k=1, sigma=0, return_eigenvectors=False)[0]
    dd = eigsh(polar_laplacian(16, 0.5, SlitBC.Dirichlet)[0], k=1, sigma=0, return_eigenvectors=False)[0]
    assert dn <= base + 1e-9
    assert dd > base


def test_heat_split_with_exact_disk_spectrum():
    assert exact_disk_log_det() == pytest.approx(math.log(disk_det(1.0)), abs=1e-3)


def test_heat_split_is_insensitive_to_cutoff_time():
    assert exact_disk_log_det(0.02) == pytest.approx(exact_disk_log_det(0.05), abs=1e-3)


def test_heat_split_empty_spectrum_and_zero_model():
    assert heat_split_log_det(np.array([]), 0.0, 0.0, 0.0, 0.0, 0.1) == 0.0


def test_fd_disk_pipeline_within_five_percent():
    est = slit_laplacian_det_estimate(None, levels=(8, 16, 32))
    assert abs(est.value / disk_det(1.0) - 1) < 0.05


def test_slit_tip_must_sit_on_a_face():
    with pytest.raises(ValueError):
        slit_laplacian_det_estimate(SlitDomainSpec(0.5), levels=(9, 18))


def test_kappa0_prefactor_value():
    import mpmath as mp

    ref = mp.mpf(2) ** (mp.mpf(1) / 3) * mp.exp(4 * mp.zeta(-1, 1, 1) + mp.mpf(5) / 6)
    assert kappa0_prefactor() == pytest.approx(float(ref), rel=1e-14)
