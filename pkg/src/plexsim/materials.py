"""Frequency-dependent permittivities of the layered nanoparticle.

Drude metal core, Lorentz-oscillator molecular shell (with the effective
oscillator-strength rescaling pinned to a reference frequency), and a
non-dispersive background.  All model evaluators accept scalar or array
photon energies in eV and return complex relative permittivities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _check_positive_omega(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("photon energy must be positive (eV)")
    return w


@dataclass(frozen=True)
class DrudeParams:
    """Drude metal: eps_inf - omega_p^2 / (omega*(omega + i*gamma))."""

    eps_inf: float
    omega_p: float   # plasma energy, eV
    gamma: float     # damping, eV

    def __post_init__(self):
        if self.eps_inf <= 0 or self.omega_p <= 0 or self.gamma <= 0:
            raise ValueError("Drude parameters must be positive")

    def epsilon(self, omega):
        """Complex permittivity at photon energy omega (eV)."""
        w = _check_positive_omega(omega)
        return self.eps_inf - self.omega_p**2 / (w * (w + 1j * self.gamma))


@dataclass(frozen=True)
class LorentzShellParams:
    """Single Lorentz oscillator with strength rescaled by omega_ref/omega_ex.

    The nominal strength f_nominal is defined at the reference energy
    omega_ref; the value entering the oscillator is
    f_eff = f_nominal * omega_ref / omega_ex, which keeps the on-resonance
    absorption Im[eps] = f_nominal * omega_ref / gamma_ex independent of
    where the resonance is tuned.
    """

    eps_inf: float
    f_nominal: float
    omega_ex: float    # exciton energy, eV
    gamma_ex: float    # exciton linewidth, eV
    omega_ref: float   # strength reference energy, eV

    def __post_init__(self):
        if self.f_nominal < 0:
            raise ValueError("oscillator strength must be non-negative")
        if self.gamma_ex <= 0 or self.omega_ref <= 0 or self.omega_ex <= 0:
            raise ValueError("shell energies/linewidth must be positive")

    @property
    def f_eff(self) -> float:
        return self.f_nominal * self.omega_ref / self.omega_ex

    def epsilon(self, omega):
        """Complex permittivity at photon energy omega (eV)."""
        w = _check_positive_omega(omega)
        num = self.f_eff * self.omega_ex**2
        return self.eps_inf + num / (self.omega_ex**2 - w**2 - 1j * self.gamma_ex * w)


@dataclass(frozen=True)
class MaterialStack:
    """Core/shell/background composition and layer radii of the particle.

    shell=None (or shell_thickness=0) describes the bare sphere.
    """

    core: DrudeParams
    core_radius: float          # nm
    shell: LorentzShellParams | None = None
    shell_thickness: float = 0.0  # nm
    eps_background: float = 1.0

    def __post_init__(self):
        if self.core_radius <= 0:
            raise ValueError("core radius must be positive")
        if self.shell_thickness < 0:
            raise ValueError("shell thickness must be non-negative")
        if self.eps_background < 1.0:
            raise ValueError("background permittivity must be >= 1")
        if self.shell is not None and self.shell_thickness == 0.0:
            object.__setattr__(self, "shell", None)

    @property
    def outer_radius(self) -> float:
        return self.core_radius + self.shell_thickness

    @property
    def has_shell(self) -> bool:
        return self.shell is not None and self.shell_thickness > 0.0

    def layer_permittivities(self, omega):
        """(eps_core, eps_shell, eps_background) at omega; eps_shell falls
        back to the background value for a bare sphere."""
        eps1 = self.core.epsilon(omega)
        if self.has_shell:
            eps2 = self.shell.epsilon(omega)
        else:
            eps2 = np.full_like(np.asarray(omega, dtype=float), self.eps_background) + 0j
        return eps1, eps2, self.eps_background


def drude_permittivity(params: DrudeParams, omega):
    return params.epsilon(omega)


def shell_permittivity(params: LorentzShellParams, omega):
    return params.epsilon(omega)


def negative_permittivity_window(params: LorentzShellParams,
                                 omega_min: float = 2.5,
                                 omega_max: float = 4.2,
                                 step: float = 0.001):
    """Scan for the spectral window where Re[eps_shell] < 0.

    Returns (lo, hi) in eV, or None if the real part stays positive over the
    scanned range.  Resolution defaults to 1 meV.
    """
    grid = np.arange(omega_min, omega_max + 0.5 * step, step)
    neg = params.epsilon(grid).real < 0.0
    if not np.any(neg):
        return None
    idx = np.nonzero(neg)[0]
    return float(grid[idx[0]]), float(grid[idx[-1]])
