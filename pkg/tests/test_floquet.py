import numpy as np
import pytest

from sinegordon_n2.errors import (AnalyticContinuationUnavailable, ParamOutOfRange,
                                  ParityUntagged, ZeroEnergy)
from sinegordon_n2.floquet import (PeriodicPotential, default_E_samples, even_potential,
                                   free_discriminant, free_potential, imaginary_shift_check,
                                   odd_potential, scan, transfer_matrix,
                                   verify_spectral_symmetry)


@pytest.mark.parametrize("E", [0.01, 0.04])
def test_free_closed_form(E):
    L = 2.0
    res = transfer_matrix(free_potential(L), E)
    s = np.sqrt(E)
    assert abs(res.delta - 2 * np.cos(L * (s - 1 / (16 * s)))) < 1e-8
    assert abs(free_discriminant(E, L) - res.delta) < 1e-8


def test_free_symmetry_closed_form():
    for E in (0.01, 0.3, 2.0 + 0.5j):
        assert abs(free_discriminant(1 / (256 * E), 2.0) - free_discriminant(E, 2.0)) < 1e-12


@pytest.mark.parametrize("E", [0.02, 0.3 + 0.2j, -0.05, 1.7])
def test_det_and_rho(E):
    res = transfer_matrix(even_potential(), E)
    assert abs(res.det - 1) < 1e-8
    r1, r2 = res.rho_pm
    assert abs(r1 * r2 - 1) < 1e-8
    assert abs(r1 + r2 - res.delta) < 1e-10


def test_delta_real_on_real_axis():
    for E in (0.02, 0.3, 1.7):
        assert abs(transfer_matrix(even_potential(), E).delta.imag) < 1e-8


@pytest.mark.parametrize("E", [0.3, 2.0])
def test_analytic_in_E(E):
    pot = even_potential()
    h = 1e-4
    fd = (transfer_matrix(pot, E + h).delta - transfer_matrix(pot, E - h).delta) / (2 * h)
    cs = transfer_matrix(pot, E + 1j * h).delta.imag / h
    assert abs(fd.real - cs) < 1e-6 * abs(cs)


@pytest.mark.parametrize("E", [0.05, 0.4 - 0.1j])
def test_gauge_forms_agree(E):
    for pot in (even_potential(), odd_potential()):
        assert abs(transfer_matrix(pot, E).delta - transfer_matrix(pot, E, gauge=True).delta) < 1e-8


def test_spectral_symmetry_even_odd():
    E = default_E_samples(20)
    even = verify_spectral_symmetry(even_potential(), E)
    odd = verify_spectral_symmetry(odd_potential(), E)
    assert even["sign"] == 1 and even["max_defect"] < 1e-6
    assert odd["sign"] == -1 and odd["max_defect"] < 1e-6


def test_odd_sign_matters():
    # the odd potential does not satisfy the even-case relation
    pot = odd_potential()
    d1 = transfer_matrix(pot, 0.3).delta
    d2 = transfer_matrix(pot, 1 / (256 * 0.3)).delta
    assert abs(d2 - d1) > 1e-3


def test_errors():
    pot = PeriodicPotential(lambda x: 0.1 * np.cos(np.pi * x), 2.0)
    with pytest.raises(ParityUntagged):
        verify_spectral_symmetry(pot, [0.1])
    with pytest.raises(ZeroEnergy):
        transfer_matrix(pot, 0.0)
    with pytest.raises(ParamOutOfRange):
        PeriodicPotential(lambda x: x, 2.0, M=0)
    with pytest.raises(ParamOutOfRange):
        PeriodicPotential(lambda x: np.sin(np.pi * x), 2.0, parity="even")


def test_numeric_derivative_fallback():
    a = even_potential()
    b = PeriodicPotential(a.u, a.L, 0, parity="even")
    assert abs(transfer_matrix(a, 0.2).delta - transfer_matrix(b, 0.2).delta) < 1e-7


def test_imaginary_shift():
    rep = imaginary_shift_check(k=0.5, E_samples=default_E_samples(10))
    assert rep["pointwise"] < 1e-10
    assert rep["max_defect"] < 1e-5
    with pytest.raises(AnalyticContinuationUnavailable):
        imaginary_shift_check(k=0.5, x0=0.3j)


def test_imaginary_shift_zero_is_plain_symmetry():
    rep = imaginary_shift_check(k=0.5, x0=0, E_samples=default_E_samples(5))
    assert rep["sign"] == 1 and rep["max_defect"] < 1e-6


def test_scan_rows():
    rows = scan(free_potential(), [0.01, 0.04])
    assert len(rows) == 2 and rows[0][2] < 1e-10
