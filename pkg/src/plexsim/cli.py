"""Command-line front end: scenario configs, pipeline subcommands, presets.

Every subcommand reads a scenario (JSON file or named preset), runs one
pipeline stage, and writes plot-ready CSV/JSON under the output directory.
Config parsing rejects unknown keys so silent typos in physics parameters
cannot slip through.

Exit codes: 0 success, 1 config error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks

from . import __version__
from .constants import COUPLING_SCALE
from .materials import DrudeParams, LorentzShellParams, MaterialStack
from .mie import cross_section_spectrum
from .greens import EmitterConfig, kernel_spectrum, purcell_factor
from .pseudomode import criterion_ratio, fit_kernel, load_reference_set, LorentzianSet
from .dynamics import (amplitude_trace, classify_regime, coherence_spectrum,
                       decompose)
from .volterra import solve_direct


class ConfigError(ValueError):
    pass


PRESETS = {
    "bare": {
        "materials": {
            "core": {"eps_inf": 3.7, "omega_p_eV": 8.55, "gamma_eV": 0.065},
            "shell": None,
        },
        "geometry": {"core_radius_nm": 20.0, "shell_thickness_nm": 0.0,
                     "eps_background": 1.69},
        "emitter": {"dipole_debye": 24.0, "gap_nm": 3.0, "omega_e_eV": 3.1441},
        "numerics": {"fit_n": 7},
    },
    "coated": {
        "materials": {
            "core": {"eps_inf": 3.7, "omega_p_eV": 8.55, "gamma_eV": 0.065},
            "shell": {"eps_inf": 1.69, "f_nominal": 0.3, "omega_ex_eV": 3.07,
                      "gamma_ex_eV": 0.05, "omega_ref_eV": 1.8},
        },
        "geometry": {"core_radius_nm": 20.0, "shell_thickness_nm": 2.0,
                     "eps_background": 1.69},
        "emitter": {"dipole_debye": 24.0, "gap_nm": 3.0, "omega_e_eV": 3.1441},
        "numerics": {"fit_n": 8},
    },
}

DEFAULT_NUMERICS = {
    "n_max": 60,
    "omega_grid_eV": [2.5, 4.2, 0.001],
    "time_grid_fs": [0.0, 100.0, 0.01],
    "sweep_grid_eV": [2.8, 3.9, 0.01],
    "fit_n": 8,
    "fit_weighting": "relative",
    "fit_window_eV": [2.8, 4.2],
    "oracle_tail_tolerance": 0.05,
    "wc_threshold": 0.9,
    "significance_threshold": 0.2,
    "peak_floor": 0.1,
    "divergence_threshold": 0.1,
}

_SCHEMA = {
    "materials": {"core": {"eps_inf", "omega_p_eV", "gamma_eV"},
                  "shell": {"eps_inf", "f_nominal", "omega_ex_eV",
                            "gamma_ex_eV", "omega_ref_eV"}},
    "geometry": {"core_radius_nm", "shell_thickness_nm", "eps_background"},
    "emitter": {"dipole_debye", "gap_nm", "omega_e_eV"},
    "numerics": set(DEFAULT_NUMERICS),
    "outputs": {"directory", "formats"},
}


def _check_keys(block: dict, allowed, path: str):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}'"
                              f" (allowed: {sorted(allowed)})")


def validate_config(raw: dict) -> dict:
    """Validate and normalize a raw scenario dict; returns a full config."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    _check_keys(raw, set(_SCHEMA), "")
    for section in ("materials", "geometry", "emitter"):
        if section not in raw:
            raise ConfigError(f"missing required section '{section}'")
    _check_keys(raw["materials"], {"core", "shell"}, "materials")
    if "core" not in raw["materials"]:
        raise ConfigError("missing required section 'materials.core'")
    _check_keys(raw["materials"]["core"], _SCHEMA["materials"]["core"], "materials.core")
    shell = raw["materials"].get("shell")
    if shell is not None:
        _check_keys(shell, _SCHEMA["materials"]["shell"], "materials.shell")
    _check_keys(raw["geometry"], _SCHEMA["geometry"], "geometry")
    _check_keys(raw["emitter"], _SCHEMA["emitter"], "emitter")
    _check_keys(raw.get("numerics", {}), _SCHEMA["numerics"], "numerics")
    _check_keys(raw.get("outputs", {}), _SCHEMA["outputs"], "outputs")

    cfg = copy.deepcopy(raw)
    numerics = dict(DEFAULT_NUMERICS)
    numerics.update(cfg.get("numerics", {}))
    cfg["numerics"] = numerics
    cfg.setdefault("outputs", {})
    cfg["outputs"].setdefault("directory", "out")
    cfg["outputs"].setdefault("formats", ["csv", "json"])
    try:
        build_stack(cfg)
        build_emitter(cfg)
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path=None, preset=None) -> dict:
    if (path is None) == (preset is None):
        raise ConfigError("provide exactly one of --config or --preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}' "
                              f"(available: {sorted(PRESETS)})")
        return validate_config(copy.deepcopy(PRESETS[preset]))
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}, "
                          f"column {exc.colno}): {exc.msg}") from exc
    return validate_config(raw)


def build_stack(cfg: dict) -> MaterialStack:
    mc = cfg["materials"]["core"]
    core = DrudeParams(eps_inf=mc["eps_inf"], omega_p=mc["omega_p_eV"],
                       gamma=mc["gamma_eV"])
    shell_cfg = cfg["materials"].get("shell")
    shell = None
    if shell_cfg is not None:
        shell = LorentzShellParams(eps_inf=shell_cfg["eps_inf"],
                                   f_nominal=shell_cfg["f_nominal"],
                                   omega_ex=shell_cfg["omega_ex_eV"],
                                   gamma_ex=shell_cfg["gamma_ex_eV"],
                                   omega_ref=shell_cfg["omega_ref_eV"])
    g = cfg["geometry"]
    return MaterialStack(core=core, core_radius=g["core_radius_nm"],
                         shell=shell, shell_thickness=g["shell_thickness_nm"],
                         eps_background=g["eps_background"])


def build_emitter(cfg: dict) -> EmitterConfig:
    e = cfg["emitter"]
    return EmitterConfig(dipole_debye=e["dipole_debye"], gap=e["gap_nm"],
                         omega_e=e["omega_e_eV"])


def _grid(spec3) -> np.ndarray:
    lo, hi, step = spec3
    return np.arange(lo, hi + step / 2, step)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _provenance(cfg: dict) -> list[str]:
    return [f"plexsim {__version__}", f"config sha256:{config_hash(cfg)}"]


def _write_csv(path: Path, header: str, rows, comments: list[str]):
    lines = [f"# {c}" for c in comments] + [header] + rows
    path.write_text("\n".join(lines) + "\n")


def run_xsec(cfg: dict, out: Path) -> Path:
    stack = build_stack(cfg)
    grid = _grid(cfg["numerics"]["omega_grid_eV"])
    sig = cross_section_spectrum(stack, grid, cfg["numerics"]["n_max"])
    rows = [f"{w:.6f},{e:.8e},{s:.8e}" for w, (e, s) in zip(grid, sig)]
    path = out / "cross_sections.csv"
    _write_csv(path, "omega_eV,sigma_ext_nm2,sigma_sca_nm2", rows, _provenance(cfg))
    return path


def _compute_kernel(cfg: dict):
    stack = build_stack(cfg)
    emitter = build_emitter(cfg)
    grid = _grid(cfg["numerics"]["omega_grid_eV"])
    return kernel_spectrum(stack, emitter, grid, cfg["numerics"]["n_max"])


def run_kernel(cfg: dict, out: Path) -> Path:
    spec = _compute_kernel(cfg)
    path = out / "kernel.csv"
    spec.to_csv(path, _provenance(cfg))
    if "json" in cfg["outputs"]["formats"]:
        spec.to_json(out / "kernel.json")
    return path


def run_fit(cfg: dict, out: Path) -> Path:
    spec = _compute_kernel(cfg)
    num = cfg["numerics"]
    window = tuple(num["fit_window_eV"]) if num["fit_window_eV"] else None
    lset, report = fit_kernel(spec, num["fit_n"], weighting=num["fit_weighting"],
                              window=window)
    path = out / "fit.json"
    lset.to_json(path)
    report_payload = {
        "residual_rms": report.residual_rms,
        "iterations": report.iterations,
        "converged": report.converged,
        "weighting": report.weighting,
        "n_detected_peaks": report.n_detected_peaks,
        "warnings": report.warnings,
        "criterion_ratios": [criterion_ratio(t) for t in lset],
    }
    (out / "fit_report.json").write_text(json.dumps(report_payload, indent=1))
    return path


def _load_fit_or_compute(cfg: dict, fit_json=None) -> LorentzianSet:
    if fit_json is not None:
        return LorentzianSet.from_json(fit_json)
    spec = _compute_kernel(cfg)
    num = cfg["numerics"]
    window = tuple(num["fit_window_eV"]) if num["fit_window_eV"] else None
    lset, _ = fit_kernel(spec, num["fit_n"], weighting=num["fit_weighting"],
                         window=window)
    return lset


def run_dynamics(cfg: dict, out: Path, fit_json=None) -> Path:
    lset = _load_fit_or_compute(cfg, fit_json)
    num = cfg["numerics"]
    omega_e = cfg["emitter"]["omega_e_eV"]
    decomp = decompose(lset, omega_e)
    t = _grid(num["time_grid_fs"])
    trace = amplitude_trace(decomp, t)
    trace.to_csv(out / "trace.csv", _provenance(cfg))
    ogrid = _grid(num["omega_grid_eV"])
    spec = coherence_spectrum(decomp, ogrid)
    rows = [f"{w:.6f},{v:.8e}" for w, v in zip(ogrid, spec)]
    _write_csv(out / "coherence.csv", "omega_eV,imC_fs", rows, _provenance(cfg))
    report = classify_regime(decomp, wc_threshold=num["wc_threshold"],
                             significance=num["significance_threshold"],
                             peak_floor=num["peak_floor"],
                             divergence_threshold=num["divergence_threshold"])
    payload = {
        "omega_e_eV": omega_e,
        "coupling_scale": COUPLING_SCALE,
        "poles": decomp.to_rows(),
        "regime": report.label,
        "two_omega1_meV": report.two_omega1,
        "rabi_splitting_meV": report.rabi_splitting,
        "divergence": report.divergence,
        "coherence_peaks_eV": report.peak_positions.tolist(),
    }
    path = out / "poles.json"
    path.write_text(json.dumps(payload, indent=1))
    return path


def run_oracle(cfg: dict, out: Path) -> Path:
    spec = _compute_kernel(cfg)
    num = cfg["numerics"]
    t = _grid(num["time_grid_fs"])
    trace = solve_direct(spec, cfg["emitter"]["omega_e_eV"], t,
                         tail_tolerance=num["oracle_tail_tolerance"])
    path = out / "trace_direct.csv"
    trace.to_csv(path, _provenance(cfg) + ["source=oracle"])
    return path


def run_sweep(cfg: dict, out: Path, threads: int = 1) -> Path:
    lset = _load_fit_or_compute(cfg)
    num = cfg["numerics"]
    sweep = _grid(num["sweep_grid_eV"])
    t = _grid(num["time_grid_fs"])
    ogrid = _grid(num["omega_grid_eV"])

    def one(we: float):
        decomp = decompose(lset, float(we))
        pop = amplitude_trace(decomp, t).population
        coh = coherence_spectrum(decomp, ogrid)
        return pop, coh

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(one, sweep))

    header_t = "omega_e_eV," + ",".join(f"{x:.4f}" for x in t)
    rows = [f"{we:.4f}," + ",".join(f"{p:.6e}" for p in pop)
            for we, (pop, _) in zip(sweep, results)]
    _write_csv(out / "sweep_population.csv", header_t, rows, _provenance(cfg))
    header_w = "omega_e_eV," + ",".join(f"{x:.4f}" for x in ogrid)
    rows = [f"{we:.4f}," + ",".join(f"{v:.6e}" for v in coh)
            for we, (_, coh) in zip(sweep, results)]
    path = out / "sweep_coherence.csv"
    _write_csv(path, header_w, rows, _provenance(cfg))
    return path


def run_validate(cfg: dict, out: Path, full: bool = False) -> bool:
    """Fast self-checks against the shipped reference data; returns True when
    everything passed.  --full adds the fit-recovery and direct-solver
    equivalence checks (slower)."""
    checks: list[tuple[str, bool, str]] = []

    def add(name: str, ok: bool, detail: str):
        checks.append((name, bool(ok), detail))

    bare_cfg = validate_config(copy.deepcopy(PRESETS["bare"]))
    stack = build_stack(bare_cfg)
    for we, ref in [(2.98, 551.0), (3.14, 578.0), (3.75, 1717.0)]:
        fp = purcell_factor(stack, 23.0, we)
        add(f"purcell@{we}", abs(fp - ref) / ref < 0.02, f"{fp:.1f} vs {ref}")

    for name, j, ref in [("coated", 0, 0.66), ("coated", 1, 12.10), ("bare", 6, 1.41)]:
        lset = load_reference_set(name)
        val = criterion_ratio(lset.terms[j])
        add(f"criterion:{name}[j={j+1}]", abs(val - ref) <= 0.015, f"{val:.4f} vs {ref}")

    table2 = [("bare", 2.9782, "WC"), ("bare", 3.1441, "WC"),
              ("bare", 3.63, "SC"), ("bare", 3.75, "WC"),
              ("coated", 2.9782, "MM-SC"), ("coated", 3.1441, "MM-SC"),
              ("coated", 3.63, "MM-SC"), ("coated", 3.75, "SC")]
    num = cfg["numerics"]
    for name, we, ref_label in table2:
        lset = load_reference_set(name)
        decomp = decompose(lset, we)
        report = classify_regime(decomp, wc_threshold=num["wc_threshold"],
                                 significance=num["significance_threshold"],
                                 peak_floor=num["peak_floor"],
                                 divergence_threshold=num["divergence_threshold"])
        add(f"regime:{name}@{we}", report.label == ref_label,
            f"{report.label} vs {ref_label}")
        add(f"residue-sum:{name}@{we}",
            abs(np.sum(decomp.residues) - 1.0) < 1e-8,
            f"sum={np.sum(decomp.residues):.2e}")
        add(f"stability:{name}@{we}", bool(np.all(decomp.poles.real < 0)),
            "max Re s = %.3g" % np.max(decomp.poles.real))

    coated = load_reference_set("coated")
    d314 = decompose(coated, 3.1441)
    t = np.arange(0.0, 40.0001, 0.01)
    pop = amplitude_trace(d314, t).population
    below = t[pop < 0.02]
    add("population-collapse@3.14", len(below) > 0 and 6.0 <= below[0] <= 8.0,
        f"first t<0.02 at {below[0]:.2f} fs" if len(below) else "never below 0.02")

    if full:
        spec = _compute_kernel(cfg)
        window = tuple(num["fit_window_eV"]) if num["fit_window_eV"] else None
        lset, rep = fit_kernel(spec, num["fit_n"], weighting=num["fit_weighting"],
                               window=window)
        add("fit-residual", rep.residual_rms < 0.05, f"rms {rep.residual_rms:.3%}")
        tgrid = np.arange(0.0, 100.0001, 0.01)
        direct = solve_direct(spec, cfg["emitter"]["omega_e_eV"], tgrid,
                              tail_tolerance=num["oracle_tail_tolerance"])
        resid = amplitude_trace(decompose(lset, cfg["emitter"]["omega_e_eV"]), tgrid)
        dmax = float(np.max(np.abs(direct.population - resid.population)))
        add("direct-vs-residue", dmax < 0.05, f"max |dpop| {dmax:.4f}")

    ok_all = all(ok for _, ok, _ in checks)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in checks]
    report_text = "\n".join(lines)
    print(report_text)
    (out / "validate_report.txt").write_text(report_text + "\n")
    return ok_all


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plexsim",
        description="Emitter dynamics near bare and molecule-coated nanospheres")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="scenario JSON file")
        p.add_argument("--preset", help="named preset: " + ", ".join(sorted(PRESETS)))
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--nmax", type=int, default=None, help="multipole cutoff")
        p.add_argument("--omega-e", type=float, default=None,
                       help="override emitter energy (eV)")
        p.add_argument("--threads", type=int, default=1)

    for name, help_text in [
            ("xsec", "extinction/scattering cross sections"),
            ("kernel", "coupling-kernel spectrum"),
            ("fit", "multi-Lorentzian kernel decomposition"),
            ("dynamics", "poles, population trace, coherence spectrum"),
            ("oracle", "direct integro-differential solve"),
            ("sweep", "2-d population/coherence maps over emitter energy"),
            ("validate", "self-check against shipped reference data")]:
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        if name == "dynamics":
            p.add_argument("--fit-json", help="use an existing fit instead of refitting")
        if name == "validate":
            p.add_argument("--full", action="store_true",
                           help="include fit recovery and direct-solver checks")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.preset)
        if args.nmax is not None:
            cfg["numerics"]["n_max"] = args.nmax
        if args.omega_e is not None:
            cfg["emitter"]["omega_e_eV"] = args.omega_e
        out = Path(args.out or cfg["outputs"]["directory"])
        out.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "xsec":
            run_xsec(cfg, out)
        elif args.command == "kernel":
            run_kernel(cfg, out)
        elif args.command == "fit":
            run_fit(cfg, out)
        elif args.command == "dynamics":
            run_dynamics(cfg, out, fit_json=args.fit_json)
        elif args.command == "oracle":
            run_oracle(cfg, out)
        elif args.command == "sweep":
            run_sweep(cfg, out, threads=args.threads)
        elif args.command == "validate":
            if not run_validate(cfg, out, full=args.full):
                return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure in '{args.command}': {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
