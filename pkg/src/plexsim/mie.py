"""Lorenz-Mie coefficients of bare and coated spheres, and far-field
cross sections.

The coated-sphere coefficients are evaluated in logarithmic-derivative form:
the core ratio and the effective shell derivative are built from ratios that
stay O(1) in magnitude (or underflow gracefully to zero at high order), so
absorbing shells and high multipole orders do not overflow the raw
Riccati-Bessel products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBARC_EV_NM
from .materials import MaterialStack
from .riccati import riccati_functions, log_derivative_psi

DEFAULT_N_MAX = 60


class MieSingularityError(ArithmeticError):
    """A coefficient denominator vanished; carries (order, omega)."""

    def __init__(self, order: int, omega: float):
        self.order = order
        self.omega = omega
        super().__init__(f"singular Mie denominator at n={order}, omega={omega} eV")


@dataclass(frozen=True)
class MieGeometry:
    """Radii, layer wavenumbers and relative indices at one photon energy."""

    R1: float          # core radius, nm
    R2: float          # outer radius, nm
    k1: complex        # core wavenumber, 1/nm
    k2: complex        # shell wavenumber, 1/nm
    k3: float          # exterior wavenumber, 1/nm (real: lossless host)
    omega: float       # photon energy, eV

    def __post_init__(self):
        if not (self.R2 >= self.R1 > 0):
            raise ValueError("radii must satisfy R2 >= R1 > 0")
        if self.k3 <= 0:
            raise ValueError("exterior wavenumber must be positive real")
        if self.k1.imag < 0 or self.k2.imag < 0:
            raise ValueError("layer wavenumbers must have Im k >= 0 (passive media)")

    @property
    def m1(self) -> complex:
        return self.k1 / self.k3

    @property
    def m2(self) -> complex:
        return self.k2 / self.k3


@dataclass(frozen=True)
class MieCoefficients:
    """TM (a_n) and TE (b_n) scattering coefficients for n = 1..n_max."""

    omega: float
    a: np.ndarray
    b: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.a)


def geometry_for(stack: MaterialStack, omega: float) -> MieGeometry:
    """Build the per-frequency geometry record from a material stack."""
    eps1, eps2, eps3 = stack.layer_permittivities(omega)
    k0 = omega / HBARC_EV_NM
    return MieGeometry(
        R1=stack.core_radius,
        R2=stack.outer_radius,
        k1=complex(np.sqrt(complex(eps1)) * k0),
        k2=complex(np.sqrt(complex(eps2)) * k0),
        k3=float(np.sqrt(eps3) * k0),
        omega=omega,
    )


def _cross_ratio(n_max: int, v: complex, w: complex,
                 d1v, dxv, d1w, dxw) -> np.ndarray:
    """q_n = psi_n(v)*chi_n(w) / (chi_n(v)*psi_n(w)) for n = 0..n_max.

    Built by upward recurrence on log-derivative ratios so the result decays
    smoothly (~(R1/R2)^(2n+1)) instead of hitting 0*inf.
    """
    q = np.zeros(n_max + 1, dtype=complex)
    q[0] = np.tan(v) / np.tan(w)
    for n in range(1, n_max + 1):
        q[n] = q[n - 1] \
            * (dxv[n] + n / v) / (d1v[n] + n / v) \
            * (d1w[n] + n / w) / (dxw[n] + n / w)
    return q


def _scatter_from_logderiv(aeff: np.ndarray, mult: complex, x: float,
                           psi_x: np.ndarray, xi_x: np.ndarray,
                           omega: float) -> np.ndarray:
    """a- or b-type coefficients from the effective shell log derivative."""
    n = np.arange(1, len(aeff))
    fac = aeff[1:] * mult + n / x
    num = fac * psi_x[1:] - psi_x[:-1]
    den = fac * xi_x[1:] - xi_x[:-1]
    out = np.zeros(len(n), dtype=complex)
    for i in range(len(n)):
        if den[i] == 0 or not np.isfinite(den[i]):
            if num[i] == 0 or not np.isfinite(num[i]):
                out[i] = 0.0  # order underflowed entirely: contributes nothing
            else:
                raise MieSingularityError(int(n[i]), omega)
        else:
            out[i] = num[i] / den[i]
    return np.nan_to_num(out)


def bare_coefficients(m: complex, x: float, n_max: int,
                      omega: float = 0.0) -> MieCoefficients:
    """Homogeneous-sphere coefficients; m relative index, x = k3*R."""
    tab = riccati_functions(n_max, x)
    d1 = log_derivative_psi(n_max, m * x)
    a = _scatter_from_logderiv(d1, 1.0 / m, x, tab.psi, tab.xi, omega)
    b = _scatter_from_logderiv(d1, m, x, tab.psi, tab.xi, omega)
    return MieCoefficients(omega=omega, a=a, b=b)


def core_ratio(n: int, geom: MieGeometry, te: bool = False) -> complex:
    """Core ratio of the coated-sphere recursion for a single order n.

    te=True gives the TE (b-type) ratio, obtained by replacing the relative
    indices by their reciprocals in the coefficient positions.
    """
    u = geom.m1 * geom.k3 * geom.R1
    v = geom.m2 * geom.k3 * geom.R1
    d1u = log_derivative_psi(n, u)
    d1v = log_derivative_psi(n, v)
    tv = riccati_functions(n, v)
    dxv = tv.dchi / tv.chi
    c1, c2 = (1.0 / geom.m2, 1.0 / geom.m1) if te else (geom.m2, geom.m1)
    g = (c1 * d1u[n] - c2 * d1v[n]) / (c1 * d1u[n] - c2 * dxv[n])
    return complex((tv.psi[n] / tv.chi[n]) * g)


def mie_coefficients(stack: MaterialStack, omega: float,
                     n_max: int = DEFAULT_N_MAX) -> MieCoefficients:
    """Scattering coefficients a_n, b_n (n = 1..n_max) of the stack."""
    if omega <= 0:
        raise ValueError("photon energy must be positive")
    geom = geometry_for(stack, omega)
    x = geom.k3 * geom.R2
    tab_x = riccati_functions(n_max, x)

    if not stack.has_shell:
        d1 = log_derivative_psi(n_max, geom.m1 * x)
        a = _scatter_from_logderiv(d1, 1.0 / geom.m1, x, tab_x.psi, tab_x.xi, omega)
        b = _scatter_from_logderiv(d1, geom.m1, x, tab_x.psi, tab_x.xi, omega)
        return MieCoefficients(omega=omega, a=a, b=b)

    u = geom.m1 * geom.k3 * geom.R1
    v = geom.m2 * geom.k3 * geom.R1
    w = geom.m2 * geom.k3 * geom.R2
    d1u = log_derivative_psi(n_max, u)
    d1v = log_derivative_psi(n_max, v)
    d1w = log_derivative_psi(n_max, w)
    tv = riccati_functions(n_max, v)
    tw = riccati_functions(n_max, w)
    dxv = tv.dchi / tv.chi
    dxw = tw.dchi / tw.chi
    q = _cross_ratio(n_max, v, w, d1v, dxv, d1w, dxw)

    out = {}
    for te in (False, True):
        c1, c2 = (1.0 / geom.m2, 1.0 / geom.m1) if te else (geom.m2, geom.m1)
        g = (c1 * d1u - c2 * d1v) / (c1 * d1u - c2 * dxv)
        sigma = q * g                      # core ratio scaled by chi_n(w)/psi_n(w)
        aeff = (d1w - sigma * dxw) / (1.0 - sigma)
        mult = geom.m2 if te else 1.0 / geom.m2
        out[te] = _scatter_from_logderiv(aeff, mult, x, tab_x.psi, tab_x.xi, omega)
    return MieCoefficients(omega=omega, a=out[False], b=out[True])


def cross_sections(stack: MaterialStack, omega: float,
                   n_max: int = DEFAULT_N_MAX) -> tuple[float, float]:
    """(sigma_ext, sigma_sca) in nm^2 at photon energy omega (eV)."""
    coeffs = mie_coefficients(stack, omega, n_max)
    k3 = geometry_for(stack, omega).k3
    n = np.arange(1, coeffs.n_max + 1)
    pref = 2.0 * np.pi / k3**2
    ext = pref * np.sum((2 * n + 1) * (coeffs.a + coeffs.b).real)
    sca = pref * np.sum((2 * n + 1) * (np.abs(coeffs.a) ** 2 + np.abs(coeffs.b) ** 2))
    return float(ext), float(sca)


def cross_section_spectrum(stack: MaterialStack, grid,
                           n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """Columns (sigma_ext, sigma_sca) over an energy grid; shape (len(grid), 2)."""
    out = np.empty((len(grid), 2))
    for i, w in enumerate(grid):
        out[i] = cross_sections(stack, float(w), n_max)
    return out
