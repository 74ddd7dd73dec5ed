"""Riccati-Bessel functions psi, chi, xi and derivatives for complex argument.

psi_n(z) = z*j_n(z) is computed by downward recurrence (the decaying
solution is unstable upward), chi_n(z) = -z*y_n(z) by upward recurrence
(it grows with order, so upward is stable), and xi_n = psi_n - i*chi_n.
Derivatives use f_n'(z) = f_{n-1}(z) - (n/z) f_n(z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RiccatiRangeError(ArithmeticError):
    """chi_n overflowed; carries the first non-finite order."""

    def __init__(self, order: int, z: complex):
        self.order = order
        self.z = z
        super().__init__(f"chi_n overflow at order n={order} for z={z}")


@dataclass(frozen=True)
class RiccatiTable:
    """psi, chi, xi and first derivatives for orders 0..n_max at one z."""

    z: complex
    psi: np.ndarray
    chi: np.ndarray
    xi: np.ndarray
    dpsi: np.ndarray
    dchi: np.ndarray
    dxi: np.ndarray


def _start_order(n_max: int, z: complex) -> int:
    # standard safety margin for downward recurrence
    return n_max + max(16, int(round(abs(z)))) + 16


def riccati_functions(n_max: int, z: complex) -> RiccatiTable:
    """Evaluate all three Riccati-Bessel families up to order n_max.

    Parameters
    ----------
    n_max : highest order returned (>= 1)
    z : complex argument, z != 0

    Raises
    ------
    ValueError : z == 0 or n_max < 1
    RiccatiRangeError : chi_n overflows before reaching n_max
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    z = complex(z)
    if z == 0:
        raise ValueError("Riccati-Bessel functions are singular at z = 0")

    s, c = np.sin(z), np.cos(z)
    n = np.arange(n_max + 1)

    with np.errstate(over="ignore", invalid="ignore"):
        # downward recurrence for psi, normalized against sin z (or psi_1
        # when sin z is near a zero)
        m = _start_order(n_max, z)
        f = np.zeros(m + 2, dtype=complex)
        f[m] = 1e-280
        for k in range(m, 0, -1):
            f[k - 1] = (2 * k + 1) / z * f[k] - f[k + 1]
        psi1_ref = s / z - c
        if abs(s) >= abs(psi1_ref):
            scale = s / f[0]
        else:
            scale = psi1_ref / f[1]
        psi = f[: n_max + 1] * scale

        # The growing-with-order family comes from an upward recurrence.  For
        # Im z >= 0 the outgoing xi is recursed directly (chi = i(xi - psi)
        # would otherwise lose its exponentially small e^{+iz} component);
        # for Im z < 0 the roles swap and chi is recursed instead.
        up = np.zeros(n_max + 1, dtype=complex)
        if z.imag >= 0:
            eiz = np.exp(1j * z)
            up[0] = -1j * eiz
            up[1] = -eiz * (1.0 + 1j / z)
        else:
            up[0] = c
            up[1] = c / z + s
        for k in range(1, n_max):
            up[k + 1] = (2 * k + 1) / z * up[k] - up[k - 1]
        if not np.all(np.isfinite(up)):
            bad = int(np.nonzero(~np.isfinite(up))[0][0])
            raise RiccatiRangeError(bad, z)
        if z.imag >= 0:
            xi = up
            chi = 1j * (xi - psi)
        else:
            chi = up
            xi = psi - 1j * chi
        for arr in (psi, chi):
            if not np.all(np.isfinite(arr)):
                bad = int(np.nonzero(~np.isfinite(arr))[0][0])
                raise RiccatiRangeError(bad, z)

    psi_m1 = np.concatenate(([c], psi[:-1]))   # psi_{-1}(z) = cos z
    chi_m1 = np.concatenate(([-s], chi[:-1]))  # chi_{-1}(z) = -sin z
    xi_m1 = psi_m1[0] - 1j * chi_m1[0]         # = e^{iz}
    xi_m1 = np.concatenate(([xi_m1], xi[:-1]))
    dpsi = psi_m1 - n / z * psi
    dchi = chi_m1 - n / z * chi
    dxi = xi_m1 - n / z * xi

    return RiccatiTable(z=z, psi=psi, chi=chi, xi=xi,
                        dpsi=dpsi, dchi=dchi, dxi=dxi)


def log_derivative_psi(n_max: int, z: complex) -> np.ndarray:
    """D_n(z) = psi_n'(z)/psi_n(z) for n = 0..n_max, by downward recurrence.

    Stable for arbitrary complex z (BHMIE-style), independent of the psi
    normalisation.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("logarithmic derivative is singular at z = 0")
    m = _start_order(n_max, z)
    d = np.zeros(m + 1, dtype=complex)
    for k in range(m, 0, -1):
        d[k - 1] = k / z - 1.0 / (d[k] + k / z)
    return d[: n_max + 1]
