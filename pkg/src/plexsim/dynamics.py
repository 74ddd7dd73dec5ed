"""Analytic emitter dynamics from a Lorentzian kernel decomposition.

The excited-state amplitude obeys a convolution equation whose Laplace
transform is the rational function Q(s)/P(s); its poles and residues give
the time trace as a sum of damped complex exponentials, from which the
population, the coherence spectrum, the stationary photon spectrum absent
further emission, and a coupling-regime label all follow in closed form.

Energies are carried in meV inside this module.  The kernel areas A_j are
coupling-weighted by COUPLING_SCALE when they enter the evolution (see
constants.py).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .constants import COUPLING_SCALE, HBAR_MEV_FS
from .pseudomode import LorentzianSet


class DegeneratePoleError(ArithmeticError):
    """Nearly repeated roots; perturb the fit parameters and retry."""


class ResolutionError(ValueError):
    """Time trace too coarse for the requested transform."""


@dataclass(frozen=True)
class TransferFunction:
    """Laplace-domain amplitude Q(s)/P(s); coefficient arrays are highest
    power first, P monic with deg P = deg Q + 1."""

    q_coeffs: np.ndarray
    p_coeffs: np.ndarray
    omega_e: float              # eV
    btilde: np.ndarray          # shifted complex rates B_j + i(Omega_j - omega_e), meV
    areas: np.ndarray           # coupling-weighted areas entering P(s), meV^2

    def q(self, s):
        return np.polyval(self.q_coeffs, s)

    def p(self, s):
        return np.polyval(self.p_coeffs, s)

    def dp(self, s):
        return np.polyval(np.polyder(self.p_coeffs), s)


@dataclass(frozen=True)
class PoleDecomposition:
    """Poles s_m = -gamma_m + i*omega_m (meV) and residues, sorted by |R|."""

    poles: np.ndarray
    residues: np.ndarray
    omega_e: float              # eV

    @property
    def gammas(self) -> np.ndarray:
        return -self.poles.real

    @property
    def frequencies(self) -> np.ndarray:
        return self.poles.imag

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.residues)

    def to_rows(self) -> list[dict]:
        return [{"gamma_meV": float(-p.real), "omega_meV": float(p.imag),
                 "abs_R": float(abs(r))}
                for p, r in zip(self.poles, self.residues)]


@dataclass(frozen=True)
class AmplitudeTrace:
    """Excited-state amplitude and population on a time grid (fs)."""

    t: np.ndarray
    amplitude: np.ndarray
    source: str = "residue"

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def to_csv(self, path, header_comments: list[str] | None = None):
        lines = [f"# {c}" for c in (header_comments or [])]
        lines.append("t_fs,re,im,population")
        for t, c in zip(self.t, self.amplitude):
            lines.append(f"{t:.6f},{c.real:.10e},{c.imag:.10e},{abs(c)**2:.10e}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def build_transfer_function(lset: LorentzianSet, omega_e: float,
                            coupling_scale: float = COUPLING_SCALE) -> TransferFunction:
    """Assemble Q(s) and P(s) = s*Q(s) + sum_k a_k*Q_k(s) from the set."""
    bt = lset.halfwidths + 1j * (lset.centers - omega_e) * 1e3
    areas = lset.areas * coupling_scale
    q = np.array([1.0 + 0j])
    for b in bt:
        q = np.polymul(q, [1.0, b])
    p = np.polymul([1.0, 0.0], q)
    for k, a in enumerate(areas):
        qk = np.array([1.0 + 0j])
        for j, b in enumerate(bt):
            if j != k:
                qk = np.polymul(qk, [1.0, b])
        p = np.polyadd(p, a * qk)
    return TransferFunction(q_coeffs=q, p_coeffs=p, omega_e=omega_e,
                            btilde=bt, areas=areas)


def find_poles(tf: TransferFunction, degeneracy_rtol: float = 1e-9) -> PoleDecomposition:
    """Roots of P via the companion matrix, polished by Newton steps, with
    residues R_m = Q(s_m)/P'(s_m)."""
    roots = np.roots(tf.p_coeffs)
    for _ in range(4):  # Newton polish
        dp = tf.dp(roots)
        step = np.where(dp != 0, tf.p(roots) / np.where(dp == 0, 1, dp), 0)
        roots = roots - step
    scale = max(np.max(np.abs(roots)), 1.0)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < degeneracy_rtol * scale:
                raise DegeneratePoleError(
                    f"poles {roots[i]:.6g} and {roots[j]:.6g} are degenerate within "
                    f"{degeneracy_rtol:g} relative; perturb the fit parameters")
    residues = tf.q(roots) / tf.dp(roots)
    order = np.argsort(-np.abs(residues))
    return PoleDecomposition(poles=roots[order], residues=residues[order],
                             omega_e=tf.omega_e)


def decompose(lset: LorentzianSet, omega_e: float,
              coupling_scale: float = COUPLING_SCALE) -> PoleDecomposition:
    """Shorthand: transfer function + pole/residue extraction."""
    return find_poles(build_transfer_function(lset, omega_e, coupling_scale))


def amplitude_trace(decomp: PoleDecomposition, t_fs) -> AmplitudeTrace:
    """C(t) = sum_m R_m exp(s_m t) on a time grid in fs."""
    t = np.asarray(t_fs, dtype=float)
    if np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be non-negative and ascending")
    tau = t / HBAR_MEV_FS   # 1/meV
    amp = (decomp.residues[None, :] * np.exp(np.outer(tau, decomp.poles))).sum(axis=1)
    return AmplitudeTrace(t=t, amplitude=amp, source="residue")


def single_lorentzian_closed_form(area: float, btilde: complex, t_fs,
                                  coupling_scale: float = COUPLING_SCALE) -> AmplitudeTrace:
    """Closed form for one Lorentzian term:
    C(t) = e^{-Bt/2} [cos(bt) + (B/(2b)) sin(bt)], 2b = sqrt(4a - B^2),
    with a the coupling-weighted area.  The critically damped point b = 0
    takes the analytic limit."""
    if area <= 0:
        raise ValueError("area must be positive")
    a = area * coupling_scale
    t = np.asarray(t_fs, dtype=float)
    tau = t / HBAR_MEV_FS
    b = np.sqrt(complex(a - btilde**2 / 4.0))
    if abs(b) < 1e-14:
        amp = np.exp(-btilde * tau / 2.0) * (1.0 + btilde / 2.0 * tau)
    else:
        amp = np.exp(-btilde * tau / 2.0) * (np.cos(b * tau)
                                             + btilde / (2.0 * b) * np.sin(b * tau))
    return AmplitudeTrace(t=t, amplitude=amp, source="closed-form")


def coherence_spectrum(decomp: PoleDecomposition, omega_grid) -> np.ndarray:
    """|Im C(omega)| of the lab-frame amplitude, evaluated analytically from
    the poles; omega_grid in eV, result in fs."""
    w = np.asarray(omega_grid, dtype=float) * 1e3
    we = decomp.omega_e * 1e3
    s = np.zeros(len(w), dtype=complex)
    for pole, res in zip(decomp.poles, decomp.residues):
        s += (res / (1j * (w + we) - pole)
              - np.conj(res) / (1j * (w - we) - np.conj(pole))) / 2j
    return np.abs(s) * HBAR_MEV_FS


def coherence_spectrum_numeric(decomp: PoleDecomposition, omega_grid,
                               t_max_fs: float = 2000.0, dt_fs: float = 0.05) -> np.ndarray:
    """Cross-check mode: half-line Fourier transform of the time trace."""
    t = np.arange(0.0, t_max_fs + dt_fs / 2, dt_fs)
    trace = amplitude_trace(decomp, t)
    w = np.asarray(omega_grid, dtype=float) * 1e3
    we = decomp.omega_e * 1e3
    tau = t / HBAR_MEV_FS
    lab = np.imag(trace.amplitude * np.exp(-1j * we * tau))
    out = np.empty(len(w))
    for i, wi in enumerate(w):
        out[i] = abs(np.trapezoid(lab * np.exp(-1j * wi * tau), tau))
    return out * HBAR_MEV_FS


def rabi_splitting(decomp: PoleDecomposition, omega_grid=None,
                   floor: float = 0.1) -> tuple[float, np.ndarray]:
    """Peak-to-peak separation (meV) of the two tallest coherence peaks.

    Returns (splitting, peak_positions_eV); splitting is 0 when no secondary
    peak reaches `floor` times the spectrum maximum.
    """
    if omega_grid is None:
        omega_grid = np.arange(2.5, 4.2001, 0.0005)
    spec = coherence_spectrum(decomp, omega_grid)
    pk, _ = find_peaks(spec, prominence=0.01 * spec.max())
    if len(pk) == 0:
        return 0.0, np.array([])
    heights = spec[pk]
    keep = pk[heights >= floor * spec.max()]
    positions = omega_grid[keep]
    if len(keep) < 2:
        return 0.0, positions
    top2 = keep[np.argsort(-spec[keep])[:2]]
    split = abs(omega_grid[top2[0]] - omega_grid[top2[1]]) * 1e3
    return float(split), positions


def stationary_photon_spectrum(lset: LorentzianSet, omega_e: float, delta_grid,
                               coupling_scale: float = COUPLING_SCALE) -> np.ndarray:
    """Long-time photon spectral density versus detuning delta (meV):
    S(delta) = K_c(omega_e + delta) * |Q(-i delta)/P(-i delta)|^2 with K_c the
    coupling-weighted kernel."""
    tf = build_transfer_function(lset, omega_e, coupling_scale)
    d = np.asarray(delta_grid, dtype=float)
    s = -1j * d
    ratio = np.abs(tf.q(s) / tf.p(s)) ** 2
    k = coupling_scale * lset.evaluate(omega_e + d / 1e3)
    return k * ratio


def photon_amplitude(kernel, trace: AmplitudeTrace, omega_grid, omega_e: float,
                     t_fs: float, coupling_scale: float = COUPLING_SCALE) -> np.ndarray:
    """Single-photon amplitude C_1(omega, t) by quadrature over the trace.

    kernel may be a LorentzianSet or a sampled KernelSpectrum (anything with
    .evaluate or .interp); omega_e and omega_grid in eV.  The trace must
    cover [0, t_fs] with at least ~10 points per fastest oscillation.
    """
    w = np.asarray(omega_grid, dtype=float)
    sel = trace.t <= t_fs + 1e-12
    t = trace.t[sel]
    if len(t) < 2 or t[-1] < t_fs - 1e-9:
        raise ResolutionError("trace does not cover the requested time")
    dt = t[1] - t[0]
    det = (w - omega_e) * 1e3
    max_det = np.max(np.abs(det))
    if max_det > 0:
        period_fs = 2 * np.pi * HBAR_MEV_FS / max_det
        if dt > period_fs / 10:
            raise ResolutionError(
                f"trace step {dt:.3g} fs exceeds a tenth of the fastest "
                f"oscillation period {period_fs:.3g} fs")
    tau = t / HBAR_MEV_FS
    kvals = _kernel_values(kernel, w)
    phases = np.exp(1j * np.outer(det, tau))
    integ = np.trapezoid(phases * trace.amplitude[None, sel], tau, axis=1)
    return -1j * np.sqrt(np.maximum(coupling_scale * kvals, 0.0)) * integ


def photon_norm(kernel, trace: AmplitudeTrace, omega_grid, omega_e: float,
                t_fs: float, coupling_scale: float = COUPLING_SCALE) -> float:
    """Integral over omega (meV measure) of |C_1(omega, t)|^2."""
    c1 = photon_amplitude(kernel, trace, omega_grid, omega_e, t_fs, coupling_scale)
    w_mev = np.asarray(omega_grid, dtype=float) * 1e3
    return float(np.trapezoid(np.abs(c1) ** 2, w_mev))


def _kernel_values(kernel, omega_grid):
    if hasattr(kernel, "evaluate"):
        return np.asarray(kernel.evaluate(omega_grid), dtype=float)
    if hasattr(kernel, "interp"):
        return np.asarray(kernel.interp(omega_grid), dtype=float)
    raise TypeError("kernel must be a LorentzianSet or KernelSpectrum")


@dataclass(frozen=True)
class RegimeReport:
    label: str                       # 'WC', 'SC', or 'MM-SC'
    residue_weights: np.ndarray
    two_omega1: float                # meV
    rabi_splitting: float            # meV (0 when unresolved)
    divergence: float                # |2w1 - OmegaR| / OmegaR
    peak_positions: np.ndarray       # eV
    thresholds: dict = field(default_factory=dict)


def classify_regime(decomp: PoleDecomposition,
                    wc_threshold: float = 0.9,
                    significance: float = 0.2,
                    peak_floor: float = 0.1,
                    divergence_threshold: float = 0.1,
                    omega_grid=None) -> RegimeReport:
    """Label the coupling regime from the residue distribution and the
    coherence spectrum.

    WC: one residue dominates, or the spectrum shows no resolved splitting.
    MM-SC: three or more significant residues, or a resolved splitting whose
    size diverges from the dominant pole frequency 2*omega_1.
    SC: otherwise (a resolved splitting consistent with a near-conjugate
    pole pair).
    """
    weights = decomp.weights
    two_w1 = 2.0 * abs(decomp.poles[0].imag)
    split, positions = rabi_splitting(decomp, omega_grid, floor=peak_floor)
    div = abs(two_w1 - split) / split if split > 0 else np.inf
    n_sig = int(np.sum(weights >= significance))

    if weights[0] > wc_threshold:
        label = "WC"
    elif split == 0.0:
        label = "WC"
    elif n_sig >= 3:
        label = "MM-SC"
    elif div > divergence_threshold:
        label = "MM-SC"
    else:
        label = "SC"
    return RegimeReport(label=label, residue_weights=weights, two_omega1=two_w1,
                        rabi_splitting=split, divergence=float(div),
                        peak_positions=positions,
                        thresholds={"wc": wc_threshold, "significance": significance,
                                    "peak_floor": peak_floor,
                                    "divergence": divergence_threshold})
