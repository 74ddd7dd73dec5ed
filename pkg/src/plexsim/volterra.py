"""Direct numerical solver of the emitter's memory-kernel equation.

Independent of the pole/residue machinery: the delay kernel is built by
quadrature from the sampled spectrum and the amplitude equation

    dC/dt = - int_0^t Kern(t - t') C(t') dt',  C(0) = 1

is integrated with second-order (trapezoidal) product integration.  Useful
as a validation path for the analytic solution with fitted kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import COUPLING_SCALE, HBAR_MEV_FS
from .dynamics import AmplitudeTrace, ResolutionError
from .greens import KernelSpectrum

DEFAULT_TAIL_TOLERANCE = 0.05


class BandTruncationError(ValueError):
    """Sampled band misses too much spectral weight; carries the estimate."""

    def __init__(self, missing_fraction: float, detail: str):
        self.missing_fraction = missing_fraction
        super().__init__(f"estimated out-of-band kernel weight "
                         f"{missing_fraction:.2%}: {detail}")


@dataclass(frozen=True)
class TimeKernel:
    """Delay kernel Kern(tau) sampled on a tau grid (fs), complex meV^2
    in coupling-weighted units (already includes COUPLING_SCALE)."""

    tau: np.ndarray
    values: np.ndarray
    omega_e: float

    @property
    def zero_value(self) -> complex:
        return complex(self.values[0])


def estimate_band_tail(spectrum: KernelSpectrum) -> tuple[float, str]:
    """Estimate the fraction of kernel weight outside the sampled band.

    Each edge is extrapolated as a resonance wing decaying from the nearest
    dominant peak: tail ~ K(edge) * distance(edge, peak).  This is exact for
    a Lorentzian wing and conservative for faster-decaying backgrounds.
    """
    g_mev = spectrum.grid * 1e3
    k = spectrum.values
    total = np.trapezoid(k, g_mev)
    i_pk = int(np.argmax(k))
    lo = k[0] * abs(g_mev[i_pk] - g_mev[0])
    hi = k[-1] * abs(g_mev[-1] - g_mev[i_pk])
    frac = (lo + hi) / total if total > 0 else np.inf
    detail = (f"lower-edge {lo:.3g} meV^2, upper-edge {hi:.3g} meV^2, "
              f"in-band {total:.3g} meV^2")
    return float(frac), detail


def time_kernel(spectrum: KernelSpectrum, omega_e: float, tau_fs,
                tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                coupling_scale: float = COUPLING_SCALE) -> TimeKernel:
    """Kern(tau) = scale * int K(omega) exp(-i(omega-omega_e) tau) domega,
    trapezoid quadrature on the sampled grid."""
    frac, detail = estimate_band_tail(spectrum)
    if frac > tail_tolerance:
        raise BandTruncationError(frac, detail)
    tau = np.asarray(tau_fs, dtype=float) / HBAR_MEV_FS
    w = spectrum.grid * 1e3
    det = w - omega_e * 1e3
    phases = np.exp(-1j * np.outer(tau, det))
    vals = coupling_scale * np.trapezoid(spectrum.values[None, :] * phases, w, axis=1)
    return TimeKernel(tau=np.asarray(tau_fs, dtype=float), values=vals, omega_e=omega_e)


def solve_direct(spectrum: KernelSpectrum, omega_e: float, t_fs,
                 tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                 coupling_scale: float = COUPLING_SCALE,
                 max_step_fs: float = 0.02) -> AmplitudeTrace:
    """Trapezoidal product-integration solve of the amplitude equation.

    t_fs must be uniform with step <= max_step_fs (resolution of the fastest
    kernel oscillation across the sampled band).
    """
    t = np.asarray(t_fs, dtype=float)
    if len(t) < 3 or t[0] != 0.0:
        raise ValueError("time grid must start at 0 with at least 3 points")
    steps = np.diff(t)
    dt_fs = steps[0]
    if not np.allclose(steps, dt_fs, rtol=1e-9):
        raise ValueError("time grid must be uniform")
    if dt_fs > max_step_fs + 1e-12:
        raise ResolutionError(f"step {dt_fs:.4g} fs exceeds the {max_step_fs} fs "
                              "resolution bound for this band")

    kern = time_kernel(spectrum, omega_e, t, tail_tolerance, coupling_scale).values
    dt = dt_fs / HBAR_MEV_FS
    n = len(t)
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    conv = np.zeros(n, dtype=complex)   # trapezoid of kern(t_k - t_j) c_j
    k0 = kern[0]
    denom = 1.0 + (dt / 2.0) ** 2 * k0
    for k in range(1, n):
        part = dt * (0.5 * kern[k] * c[0] + np.dot(kern[k - 1:0:-1], c[1:k]))
        c[k] = (c[k - 1] - dt / 2.0 * (conv[k - 1] + part)) / denom
        conv[k] = part + dt / 2.0 * k0 * c[k]
    return AmplitudeTrace(t=t, amplitude=c, source="direct")
