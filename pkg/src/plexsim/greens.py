"""On-axis scattering Green's tensor, Purcell factor, and the coupling-kernel
spectrum at the emitter position.

For a radially oriented dipole on the symmetry axis only the TM multipoles
contribute; the zz scattering component at the coincident point reduces to a
single sum over the a_n coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .constants import HBARC_EV_NM, KERNEL_PREFACTOR_MEV_NM3
from .materials import MaterialStack
from .mie import DEFAULT_N_MAX, geometry_for, mie_coefficients
from .riccati import riccati_functions


class GeometryError(ValueError):
    """Emitter placed inside the particle."""


@dataclass(frozen=True)
class EmitterConfig:
    """Two-level emitter on the symmetry axis, dipole along z (radial)."""

    dipole_debye: float        # transition dipole, Debye
    gap: float                 # metal-surface-to-emitter distance, nm
    omega_e: float             # transition energy, eV
    omega_g: float = 0.0       # ground-state reference; inert in the dynamics

    def __post_init__(self):
        if self.dipole_debye <= 0:
            raise ValueError("transition dipole must be positive")
        if self.gap <= 0:
            raise ValueError("gap must be positive")

    def distance_from_center(self, stack: MaterialStack) -> float:
        """Center-to-emitter distance; the emitter must sit outside the shell."""
        if self.gap <= stack.shell_thickness:
            raise GeometryError("emitter lies inside the shell (gap <= shell thickness)")
        return stack.core_radius + self.gap


@dataclass(frozen=True)
class KernelSpectrum:
    """Sampled coupling-kernel spectrum K(omega) with provenance metadata.

    grid in eV (strictly increasing), values in meV.  Areas under isolated
    Lorentzian-like peaks then come out in meV^2.
    """

    grid: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def interp(self, omega):
        """Linear interpolation of K at omega (eV)."""
        return np.interp(omega, self.grid, self.values)

    @property
    def total_area(self) -> float:
        """Integral of K over the sampled band, meV^2."""
        return float(np.trapezoid(self.values, self.grid * 1e3))

    def to_csv(self, path, header_comments: list[str] | None = None):
        lines = [f"# {c}" for c in (header_comments or [])]
        lines.append("omega_eV,K_meV")
        lines += [f"{w:.6f},{v:.10e}" for w, v in zip(self.grid, self.values)]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path):
        payload = {
            "metadata": self.metadata,
            "omega_eV": self.grid.tolist(),
            "K_meV": self.values.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            payload = json.load(fh)
        return cls(grid=np.array(payload["omega_eV"]),
                   values=np.array(payload["K_meV"]),
                   metadata=payload.get("metadata", {}))


def scattering_gzz(stack: MaterialStack, R: float, omega: float,
                   n_max: int = DEFAULT_N_MAX) -> complex:
    """zz component of the scattering Green's tensor at the coincident point
    (R, R) on the axis, in 1/nm."""
    if R <= stack.outer_radius:
        raise GeometryError(f"R = {R} nm must exceed the outer radius "
                            f"{stack.outer_radius} nm")
    coeffs = mie_coefficients(stack, omega, n_max)
    k3 = geometry_for(stack, omega).k3
    kR = k3 * R
    tab = riccati_functions(n_max, kR)
    h = tab.xi[1:] / kR                      # spherical Hankel h_n^(1)(k3 R)
    n = np.arange(1, n_max + 1)
    s = np.sum((2 * n + 1) * n * (n + 1) / kR**2 * coeffs.a * h**2)
    return complex(-1j * k3 / (4.0 * np.pi) * s)


def purcell_factor(stack: MaterialStack, R: float, omega: float,
                   n_max: int = DEFAULT_N_MAX) -> float:
    """Total decay enhancement of a radial dipole at distance R from center."""
    if R <= stack.outer_radius:
        raise GeometryError(f"R = {R} nm must exceed the outer radius "
                            f"{stack.outer_radius} nm")
    coeffs = mie_coefficients(stack, omega, n_max)
    k3 = geometry_for(stack, omega).k3
    kR = k3 * R
    tab = riccati_functions(n_max, kR)
    h = tab.xi[1:] / kR
    n = np.arange(1, n_max + 1)
    s = np.sum(n * (n + 1) * (2 * n + 1) * (coeffs.a * (h / kR) ** 2).real)
    return float(1.0 - 1.5 * s)


def kernel_value(stack: MaterialStack, emitter: EmitterConfig, omega: float,
                 n_max: int = DEFAULT_N_MAX) -> float:
    """K(omega) in meV at a single photon energy."""
    R = emitter.distance_from_center(stack)
    im_g = scattering_gzz(stack, R, omega, n_max).imag
    return (KERNEL_PREFACTOR_MEV_NM3 * emitter.dipole_debye**2
            * (omega / HBARC_EV_NM) ** 2 * im_g)


def kernel_spectrum(stack: MaterialStack, emitter: EmitterConfig, grid,
                    n_max: int = DEFAULT_N_MAX) -> KernelSpectrum:
    """Sample K(omega) on an energy grid (eV).

    The omega^2 prefactor is evaluated at every grid point, not frozen at the
    emitter frequency.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.array([kernel_value(stack, emitter, float(w), n_max) for w in grid])
    meta = {
        "core_radius_nm": stack.core_radius,
        "shell_thickness_nm": stack.shell_thickness,
        "eps_background": stack.eps_background,
        "dipole_debye": emitter.dipole_debye,
        "gap_nm": emitter.gap,
        "n_max": n_max,
    }
    return KernelSpectrum(grid=grid, values=values, metadata=meta)
