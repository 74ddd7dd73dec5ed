import mpmath as mp
import numpy as np
import pytest

from plexsim.riccati import (RiccatiRangeError, log_derivative_psi,
                             riccati_functions)

mp.mp.dps = 40


def _psi_mp(n, z):
    z = mp.mpmathify(z)
    return mp.sqrt(mp.pi * z / 2) * mp.besselj(n + mp.mpf(1) / 2, z)


def _chi_mp(n, z):
    z = mp.mpmathify(z)
    return -mp.sqrt(mp.pi * z / 2) * mp.bessely(n + mp.mpf(1) / 2, z)


def test_order_zero_closed_forms():
    z = 1.7 - 0.4j
    tab = riccati_functions(3, z)
    assert tab.psi[0] == pytest.approx(np.sin(z), rel=1e-14)
    assert tab.chi[0] == pytest.approx(np.cos(z), rel=1e-14)
    assert tab.dpsi[0] == pytest.approx(np.cos(z), rel=1e-14)
    assert tab.dchi[0] == pytest.approx(-np.sin(z), rel=1e-14)
    assert tab.xi[0] == pytest.approx(np.sin(z) - 1j * np.cos(z), rel=1e-14)


def test_reference_value_high_precision():
    # frozen from a 40-digit spherical-Bessel series evaluation
    tab = riccati_functions(5, 2 + 1j)
    ref = -0.011048021337478924043 + 0.20171764724352422043j
    assert abs(tab.psi[3] - ref) / abs(ref) < 1e-12


@pytest.mark.parametrize("z", [0.35, 3.2, 2 + 1j, 10 - 3j, 40 + 5j,
                               120 + 40j, 199.0, 5 + 150j])
def test_against_multiprecision_oracle(z):
    n_max = 60
    tab = riccati_functions(n_max, z)
    for n in (0, 1, 2, 5, 13, 27, 41, 60):
        ref_psi = complex(_psi_mp(n, z))
        ref_chi = complex(_chi_mp(n, z))
        if abs(ref_psi) > 1e-250:
            assert abs(tab.psi[n] - ref_psi) / abs(ref_psi) < 1e-10
        if abs(ref_chi) > 1e-250:
            assert abs(tab.chi[n] - ref_chi) / abs(ref_chi) < 1e-10


@pytest.mark.parametrize("z", [0.5, 4.0 + 0.5j, 30 - 2j, 80 + 10j])
def test_wronskian_identity(z):
    # chi_n psi_n' - chi_n' psi_n = 1 exactly for every order; measured
    # relative to the product magnitudes, which carry e^{2|Im z|}
    tab = riccati_functions(50, z)
    w = tab.chi * tab.dpsi - tab.dchi * tab.psi
    scale = 1.0 + np.abs(tab.chi * tab.dpsi) + np.abs(tab.dchi * tab.psi)
    assert np.max(np.abs(w - 1.0) / scale) < 1e-12


def test_wronskian_mie_regime_absolute():
    # small arguments (the scattering regime): identity at machine precision
    for z in (0.3, 0.6 + 0.2j, 1.2 + 0.9j):
        tab = riccati_functions(80, z)
        w = tab.chi * tab.dpsi - tab.dchi * tab.psi
        assert np.max(np.abs(w - 1.0)) < 1e-10


def test_derivative_consistency_with_oracle():
    z = 2 + 1j
    tab = riccati_functions(8, z)
    h = mp.mpf(1) / 10**12
    for n in (1, 4, 8):
        num = (_psi_mp(n, mp.mpmathify(z) + h) - _psi_mp(n, mp.mpmathify(z) - h)) / (2 * h)
        assert abs(tab.dpsi[n] - complex(num)) / abs(complex(num)) < 1e-8


def test_zero_argument_rejected():
    with pytest.raises(ValueError):
        riccati_functions(5, 0.0)
    with pytest.raises(ValueError):
        log_derivative_psi(5, 0.0)


def test_bad_order_rejected():
    with pytest.raises(ValueError):
        riccati_functions(0, 1.0)


def test_overflow_reports_offending_order():
    # Im z beyond the exponent range overflows the e^{|Im z|} envelope
    with pytest.raises(RiccatiRangeError):
        riccati_functions(10, 1e-3 + 720j)
    # extreme order at small |z| overflows the growing family
    with pytest.raises(RiccatiRangeError) as err:
        riccati_functions(250, 0.05)
    assert err.value.order >= 1


def test_log_derivative_matches_ratio():
    z = 6.0 - 1.5j
    tab = riccati_functions(30, z)
    d = log_derivative_psi(30, z)
    assert np.allclose(d, tab.dpsi / tab.psi, rtol=1e-9)
