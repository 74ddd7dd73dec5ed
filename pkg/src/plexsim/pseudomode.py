"""Positive-amplitude multi-Lorentzian decomposition of a kernel spectrum.

Each term behaves as an effective lossy mode: center Omega (eV), half-width
B (meV, FWHM = 2B), area A (meV^2).  Fitting runs Levenberg-Marquardt on
log-parameterised (A, B) so positivity needs no explicit constraints.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths

from .greens import KernelSpectrum


@dataclass(frozen=True)
class LorentzianTerm:
    center: float      # Omega_j, eV
    halfwidth: float   # B_j, meV
    area: float        # A_j, meV^2

    def __post_init__(self):
        if self.area <= 0 or self.halfwidth <= 0:
            raise ValueError("Lorentzian area and half-width must be positive")

    @property
    def peak_value(self) -> float:
        """K at the center, meV."""
        return self.area / (np.pi * self.halfwidth)


@dataclass(frozen=True)
class LorentzianSet:
    """Ordered (by center) collection of positive-amplitude Lorentzians."""

    terms: tuple[LorentzianTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           tuple(sorted(self.terms, key=lambda t: t.center)))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def centers(self) -> np.ndarray:
        return np.array([t.center for t in self.terms])

    @property
    def halfwidths(self) -> np.ndarray:
        return np.array([t.halfwidth for t in self.terms])

    @property
    def areas(self) -> np.ndarray:
        return np.array([t.area for t in self.terms])

    def evaluate(self, omega):
        """Kernel density (meV) of the Lorentzian sum at omega (eV)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float)) * 1e3  # meV
        om = self.centers[:, None] * 1e3
        b = self.halfwidths[:, None]
        a = self.areas[:, None]
        val = np.sum(a / np.pi * b / ((w[None, :] - om) ** 2 + b**2), axis=0)
        return float(val[0]) if np.isscalar(omega) else val

    def to_json(self, path=None):
        """Serialize as rows (j, Omega_eV, B_eV, A_meV2)."""
        rows = [{"j": j + 1, "Omega_eV": t.center, "B_eV": t.halfwidth / 1e3,
                 "A_meV2": t.area} for j, t in enumerate(self.terms)]
        if path is None:
            return rows
        with open(path, "w") as fh:
            json.dump(rows, fh, indent=1)
        return rows

    @classmethod
    def from_json(cls, source):
        """Load from a path, file object, or already-parsed row list."""
        if isinstance(source, (list, tuple)):
            rows = source
        elif hasattr(source, "read"):
            rows = json.load(source)
        else:
            with open(source) as fh:
                rows = json.load(fh)
        terms = [LorentzianTerm(center=r["Omega_eV"], halfwidth=r["B_eV"] * 1e3,
                                area=r["A_meV2"]) for r in rows]
        return cls(terms=tuple(terms))


def evaluate_lorentzian_sum(lset: LorentzianSet, omega):
    return lset.evaluate(omega)


def criterion_ratio(term: LorentzianTerm) -> float:
    """Single-peak coupling ratio 2A/B^2; values above 1 mark a peak able to
    split the emission line on its own."""
    return 2.0 * term.area / term.halfwidth**2


def load_reference_set(name: str) -> LorentzianSet:
    """Golden decompositions shipped with the package ('bare' or 'coated')."""
    fname = {"bare": "bare_fit_table.json", "coated": "coated_fit_table.json"}[name]
    ref = resources.files("plexsim.data").joinpath(fname)
    with ref.open() as fh:
        return LorentzianSet.from_json(fh)


@dataclass
class FitReport:
    residual_rms: float                  # relative to K rms
    iterations: int
    converged: bool
    weighting: str
    n_detected_peaks: int
    warnings: list[str] = field(default_factory=list)
    parameter_stderr: np.ndarray | None = None


def _model(wm, centers_mev, b, a):
    return np.sum(a[:, None] / np.pi * b[:, None]
                  / ((wm[None, :] - centers_mev[:, None]) ** 2 + b[:, None] ** 2),
                  axis=0)


def _pack(om, b, a):
    return np.concatenate([om, np.log(b), np.log(a)])


def _unpack(x):
    k = len(x) // 3
    return x[:k], np.exp(np.clip(x[k:2 * k], -50, 50)), np.exp(np.clip(x[2 * k:], -50, 50))


def _detect_peaks(grid, values, prominence_rel=0.01):
    pk, props = find_peaks(values, prominence=prominence_rel * values.max())
    if len(pk) == 0:
        pk = np.array([int(np.argmax(values))])
        widths = np.array([20.0])
    else:
        widths = peak_widths(values, pk, rel_height=0.5)[0] * (grid[1] - grid[0]) * 1e3 / 2
    om = grid[pk] * 1e3
    b = np.maximum(widths, 5.0)
    a = values[pk] * np.pi * b
    return om, b, a


def fit_kernel(spectrum: KernelSpectrum, n: int,
               init: LorentzianSet | None = None,
               weighting: str = "uniform",
               window: tuple[float, float] | None = None,
               max_nfev: int = 60000) -> tuple[LorentzianSet, FitReport]:
    """Least-squares fit of n positive Lorentzians to a sampled kernel.

    weighting: 'uniform' minimises absolute residuals, 'relative' divides
    residuals by the local kernel value (log-scale fidelity).  window
    restricts the fitted band (eV).  Terms beyond the detected peaks are
    inserted greedily at the largest residual.
    """
    if n < 1:
        raise ValueError("need at least one Lorentzian")
    if weighting not in ("uniform", "relative"):
        raise ValueError("weighting must be 'uniform' or 'relative'")
    grid, K = spectrum.grid, spectrum.values
    if window is not None:
        sel = (grid >= window[0]) & (grid <= window[1])
        grid, K = grid[sel], K[sel]
    if len(grid) < 3 * n:
        raise ValueError("spectrum too short for the requested number of terms")
    wm = grid * 1e3
    floor = max(K.max() * 1e-12, 1e-30)

    def resid(x):
        om_, b_, a_ = _unpack(x)
        r = _model(wm, om_, b_, a_) - K
        if weighting == "relative":
            r = r / np.maximum(K, floor)
        return r

    warnings: list[str] = []
    if init is not None:
        om = list(init.centers * 1e3)
        b = list(init.halfwidths)
        a = list(init.areas)
        n_det = len(om)
    else:
        om0, b0, a0 = _detect_peaks(grid, K)
        n_det = len(om0)
        if n_det > n:
            order = np.argsort(-a0)[:n]
            om0, b0, a0 = om0[order], b0[order], a0[order]
        om, b, a = list(om0), list(b0), list(a0)
    if n_det < n:
        warnings.append(f"requested n={n} exceeds {n_det} detected peaks; "
                        "extra terms seeded from fit residuals")

    nfev = 0
    while True:
        res = least_squares(resid, _pack(np.array(om), np.array(b), np.array(a)),
                            method="lm", max_nfev=max_nfev)
        nfev += res.nfev
        om_, b_, a_ = _unpack(res.x)
        if len(om) >= n:
            break
        r = np.abs(_model(wm, om_, b_, a_) - K)
        if weighting == "relative":
            r = r / np.maximum(K, floor)
        i = int(np.argmax(r))
        om = list(om_) + [wm[i]]
        b = list(b_) + [20.0]
        a = list(a_) + [max(abs(K[i] - _model(wm, om_, b_, a_)[i]) * np.pi * 20.0, 1e-3)]

    order = np.argsort(om_)
    om_, b_, a_ = om_[order], b_[order], a_[order]
    model = _model(wm, om_, b_, a_)
    rms = float(np.sqrt(np.mean((model - K) ** 2)) / np.sqrt(np.mean(K**2)))
    # linearised parameter uncertainties from the final Jacobian
    stderr = None
    try:
        jtj = res.jac.T @ res.jac
        cov = np.linalg.pinv(jtj) * np.mean(res.fun**2)
        stderr = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        pass
    report = FitReport(residual_rms=rms, iterations=nfev,
                       converged=bool(res.status > 0), weighting=weighting,
                       n_detected_peaks=n_det, warnings=warnings,
                       parameter_stderr=stderr)
    terms = tuple(LorentzianTerm(center=o / 1e3, halfwidth=bb, area=aa)
                  for o, bb, aa in zip(om_, b_, a_))
    return LorentzianSet(terms=terms), report


def fit_kernel_auto(spectrum: KernelSpectrum, n_start: int = 1, n_cap: int = 12,
                    improvement: float = 0.01, **kwargs):
    """Increase the number of terms until the residual gain drops below
    `improvement` (relative); returns the last accepted fit."""
    best = fit_kernel(spectrum, n_start, **kwargs)
    for n in range(n_start + 1, n_cap + 1):
        cand = fit_kernel(spectrum, n, **kwargs)
        if best[1].residual_rms - cand[1].residual_rms < improvement * best[1].residual_rms:
            return best
        best = cand
    return best
