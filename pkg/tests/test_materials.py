import numpy as np
import pytest

from plexsim.materials import (DrudeParams, LorentzShellParams, MaterialStack,
                               negative_permittivity_window)

AG = DrudeParams(eps_inf=3.7, omega_p=8.55, gamma=0.065)
SHELL = LorentzShellParams(eps_inf=1.69, f_nominal=0.3, omega_ex=3.07,
                           gamma_ex=0.05, omega_ref=1.8)


def test_drude_high_frequency_limit():
    assert AG.epsilon(5e4) == pytest.approx(3.7, abs=1e-5)


def test_drude_frohlich_crossing():
    # bisection oracle on Re[eps] + 2*1.69 over [2, 4] eV
    f = lambda w: AG.epsilon(w).real + 2 * 1.69
    lo, hi = 2.0, 4.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(3.2126, abs=2e-3)
    assert abs(root - 3.21) < 0.01


def test_drude_lspr_bracket():
    eps = AG.epsilon(3.07)
    assert eps.real < -2 * 1.69
    assert 0 < eps.imag < 1


def test_drude_rejects_nonpositive_omega():
    with pytest.raises(ValueError):
        AG.epsilon(0.0)
    with pytest.raises(ValueError):
        AG.epsilon(np.array([1.0, -2.0]))


def test_drude_passivity():
    grid = np.arange(0.05, 12.0, 0.01)
    assert np.all(AG.epsilon(grid).imag > 0)


def test_shell_zero_strength_is_background():
    off = LorentzShellParams(eps_inf=1.69, f_nominal=0.0, omega_ex=3.07,
                             gamma_ex=0.05, omega_ref=1.8)
    grid = np.arange(1.0, 5.0, 0.05)
    assert np.allclose(off.epsilon(grid), 1.69 + 0j)


def test_shell_effective_strength():
    assert SHELL.f_eff == pytest.approx(0.176, abs=0.001)


def test_shell_resonant_absorption():
    # f_nominal * omega_ref / gamma_ex, independent of where the line sits
    val = SHELL.epsilon(SHELL.omega_ex).imag
    assert val == pytest.approx(10.8, rel=1e-12)


def test_shell_rescaling_invariance():
    vals = []
    for wex in (2.5, 3.07, 3.5):
        p = LorentzShellParams(eps_inf=1.69, f_nominal=0.3, omega_ex=wex,
                               gamma_ex=0.05, omega_ref=1.8)
        vals.append(p.epsilon(wex).imag)
    assert np.ptp(vals) < 1e-12


def test_shell_passivity():
    grid = np.arange(0.05, 8.0, 0.005)
    assert np.all(SHELL.epsilon(grid).imag >= 0)


def test_negative_window_above_exciton():
    win = negative_permittivity_window(SHELL, 2.5, 4.2, 0.001)
    assert win is not None
    lo, hi = win
    assert lo > SHELL.omega_ex
    assert hi > lo


def test_no_negative_window_for_weak_oscillator():
    weak = LorentzShellParams(eps_inf=1.69, f_nominal=0.01, omega_ex=3.07,
                              gamma_ex=0.05, omega_ref=1.8)
    assert negative_permittivity_window(weak) is None


def test_stack_radii_and_flags():
    st = MaterialStack(core=AG, core_radius=20.0, shell=SHELL,
                       shell_thickness=2.0, eps_background=1.69)
    assert st.outer_radius == 22.0
    assert st.has_shell
    bare = MaterialStack(core=AG, core_radius=20.0, eps_background=1.69)
    assert bare.outer_radius == 20.0
    assert not bare.has_shell


def test_stack_rejects_bad_values():
    with pytest.raises(ValueError):
        MaterialStack(core=AG, core_radius=-1.0)
    with pytest.raises(ValueError):
        MaterialStack(core=AG, core_radius=20.0, eps_background=0.5)
    with pytest.raises(ValueError):
        DrudeParams(eps_inf=3.7, omega_p=8.55, gamma=-0.1)


def test_layer_permittivities_fall_back_to_background():
    bare = MaterialStack(core=AG, core_radius=20.0, eps_background=1.69)
    _, eps2, eps3 = bare.layer_permittivities(3.0)
    assert eps2 == pytest.approx(1.69 + 0j)
    assert eps3 == 1.69
