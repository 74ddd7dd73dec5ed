import numpy as np
import pytest
from scipy.signal import find_peaks

from plexsim.materials import DrudeParams, LorentzShellParams, MaterialStack
from plexsim.mie import (bare_coefficients, core_ratio, cross_sections,
                         cross_section_spectrum, geometry_for, mie_coefficients)

AG = DrudeParams(eps_inf=3.7, omega_p=8.55, gamma=0.065)
SHELL = LorentzShellParams(eps_inf=1.69, f_nominal=0.3, omega_ex=3.07,
                           gamma_ex=0.05, omega_ref=1.8)
EPS_B = 1.69

BARE = MaterialStack(core=AG, core_radius=20.0, eps_background=EPS_B)
COATED = MaterialStack(core=AG, core_radius=20.0, shell=SHELL,
                       shell_thickness=2.0, eps_background=EPS_B)


def _constant_shell(eps):
    # Lorentz oscillator switched off leaves the constant eps_inf
    return LorentzShellParams(eps_inf=eps, f_nominal=0.0, omega_ex=3.0,
                              gamma_ex=0.05, omega_ref=1.8)


def test_shell_matching_background_reduces_to_bare_core():
    stack = MaterialStack(core=AG, core_radius=20.0,
                          shell=_constant_shell(EPS_B),
                          shell_thickness=2.0, eps_background=EPS_B)
    for w in np.linspace(2.5, 4.2, 50):
        coated = mie_coefficients(stack, w, 40)
        geom = geometry_for(BARE, w)
        ref = bare_coefficients(geom.m1, geom.k3 * 20.0, 40, w)
        num = np.abs(coated.a[:8] - ref.a[:8])
        den = np.abs(ref.a[:8])
        assert np.all(num <= 1e-12 * den + 1e-300)
        assert np.allclose(coated.b[:8], ref.b[:8], rtol=1e-12, atol=1e-300)


def test_shell_matching_core_reduces_to_enlarged_sphere():
    # a fake Drude shell identical to the core: one homogeneous sphere of R2
    stack = MaterialStack(core=AG, core_radius=20.0,
                          shell=None, shell_thickness=0.0, eps_background=EPS_B)
    for w in np.linspace(2.6, 4.1, 50):
        eps1 = AG.epsilon(w)
        merged = MaterialStack(core=AG, core_radius=20.0,
                               shell=_constant_shell(1.0), shell_thickness=2.0,
                               eps_background=EPS_B)
        # overwrite the constant shell with the core permittivity value
        object.__setattr__(merged.shell, "eps_inf", eps1)
        coated = mie_coefficients(merged, w, 30)
        geom = geometry_for(stack, w)
        big = bare_coefficients(geom.m1, geom.k3 * 22.0, 30, w)
        assert np.allclose(coated.a[:8], big.a[:8], rtol=1e-10, atol=1e-300)
        assert np.allclose(coated.b[:8], big.b[:8], rtol=1e-10, atol=1e-300)


def test_core_ratio_vanishing_shell_limit():
    # shell index equal to the exterior: the ratio reproduces the bare a_n
    # through the effective-derivative chain (checked via mie_coefficients
    # in the background-matching test); here check it stays finite and small
    geom = geometry_for(COATED, 3.1)
    val = core_ratio(1, geom)
    assert np.isfinite(val.real) and np.isfinite(val.imag)


def test_dipole_coefficient_peaks_at_lspr():
    ws = np.arange(2.8, 3.4, 0.002)
    mags = []
    for w in ws:
        geom = geometry_for(BARE, w)
        c = bare_coefficients(geom.m1, geom.k3 * 20.0, 5, w)
        mags.append(abs(c.a[0]))
    peak = ws[int(np.argmax(mags))]
    assert abs(peak - 3.07) < 0.02


def test_rayleigh_scaling_at_low_frequency():
    ws = np.linspace(0.1, 0.3, 12)
    mags = []
    for w in ws:
        c = mie_coefficients(BARE, w, 5)
        mags.append(abs(c.a[0]))
    slope = np.polyfit(np.log(ws), np.log(mags), 1)[0]
    assert abs(slope - 3.0) < 0.05


def test_coated_coefficients_converged_at_n60():
    c = mie_coefficients(COATED, 3.14, 60)
    assert abs(c.a[59]) / abs(c.a[0]) < 1e-8
    assert np.all(np.isfinite(c.a)) and np.all(np.isfinite(c.b))


def test_bare_extinction_peak_position():
    ws = np.arange(2.8, 3.4, 0.002)
    ext = cross_section_spectrum(BARE, ws)[:, 0]
    assert abs(ws[int(np.argmax(ext))] - 3.07) < 0.02


def test_coated_extinction_has_three_peaks():
    ws = np.arange(2.5, 4.2, 0.002)
    ext = cross_section_spectrum(COATED, ws)[:, 0]
    pk, _ = find_peaks(ext, prominence=0.01 * ext.max())
    assert len(pk) == 3


def test_lossless_sphere_obeys_optical_theorem():
    lossless_core = _constant_shell(6.25)  # n = 2.5 dielectric
    stack = MaterialStack(core=AG, core_radius=20.0, eps_background=EPS_B)
    # build a lossless "metal-free" stack by reusing the constant model
    stack = MaterialStack(
        core=DrudeParams(eps_inf=6.25, omega_p=1e-6, gamma=1e-9),
        core_radius=20.0, shell=_constant_shell(4.0), shell_thickness=2.0,
        eps_background=EPS_B)
    for w in (2.0, 3.0, 4.0):
        ext, sca = cross_sections(stack, w, 40)
        assert ext == pytest.approx(sca, rel=1e-8)


def test_absorbing_sphere_has_ext_above_sca():
    for w in (2.8, 3.07, 3.5):
        ext, sca = cross_sections(BARE, w)
        assert sca >= 0
        assert ext > sca


def test_cross_sections_positive_over_band():
    ws = np.arange(2.5, 4.2, 0.05)
    sig = cross_section_spectrum(COATED, ws)
    assert np.all(sig > 0)


def test_multipole_convergence_of_extinction():
    for stack in (BARE, COATED):
        for w in (2.98, 3.14, 3.75):
            e60, _ = cross_sections(stack, w, 60)
            e80, _ = cross_sections(stack, w, 80)
            assert abs(e80 - e60) / e60 < 1e-8


def test_rejects_nonpositive_energy():
    with pytest.raises(ValueError):
        mie_coefficients(BARE, -1.0)
