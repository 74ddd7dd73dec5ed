"""Non-Markovian emitter dynamics near bare and molecule-coated silver
nanospheres: permittivities, coated-sphere Mie scattering, the local
coupling-kernel spectrum, its pseudo-mode decomposition, and analytic
pole/residue dynamics validated by a direct memory-kernel solver."""

__version__ = "0.1.0"

from .materials import DrudeParams, LorentzShellParams, MaterialStack
from .mie import MieCoefficients, MieGeometry, cross_sections, mie_coefficients
from .greens import EmitterConfig, KernelSpectrum, kernel_spectrum, purcell_factor
from .pseudomode import (FitReport, LorentzianSet, LorentzianTerm,
                         criterion_ratio, fit_kernel, load_reference_set)
from .dynamics import (AmplitudeTrace, PoleDecomposition, TransferFunction,
                       amplitude_trace, build_transfer_function, classify_regime,
                       coherence_spectrum, decompose, find_poles,
                       photon_amplitude, stationary_photon_spectrum)
from .volterra import TimeKernel, solve_direct, time_kernel

__all__ = [
    "DrudeParams", "LorentzShellParams", "MaterialStack",
    "MieCoefficients", "MieGeometry", "cross_sections", "mie_coefficients",
    "EmitterConfig", "KernelSpectrum", "kernel_spectrum", "purcell_factor",
    "FitReport", "LorentzianSet", "LorentzianTerm", "criterion_ratio",
    "fit_kernel", "load_reference_set",
    "AmplitudeTrace", "PoleDecomposition", "TransferFunction",
    "amplitude_trace", "build_transfer_function", "classify_regime",
    "coherence_spectrum", "decompose", "find_poles", "photon_amplitude",
    "stationary_photon_spectrum",
    "TimeKernel", "solve_direct", "time_kernel",
]
