"""Deterministic CSV/JSON writers for every data product.

Floats go through ``format_float`` (12 significant digits) and rows are
emitted in index order, so identical inputs give byte-identical files.
"""

import csv
import json
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from ..models.bands import BandSurface, ButterflySpectrum
from ..models.circuit import MODES, PAIRS, CircuitParams, EigenmodeSolution
from ..models.lattice import LiebLatticeSpec, RealSpaceHamiltonian, SiteIndex, StateVector
from ..models.pump import SteadyStateResult
from ..utils.units import angular_to_ghz, angular_to_mhz, format_float
from ..version import REPORT_GENERATOR
from . import circuit_service
from .band_service import nnn_half_width_estimate, nnn_strength
from .steady_state_service import SWEEP_KINDS, SweepRow

BANDS_COLUMNS = ("kx", "ky", "E_minus_MHz", "E_zero_MHz", "E_plus_MHz")
BUTTERFLY_COLUMNS = ("theta_over_pi", "eigen_index", "energy_MHz")
SSPN_COLUMNS = ("m", "n", "sublattice", "re_a", "im_a", "sspn")
LOCFACTOR_COLUMNS = ("tbc_dc_MHz", "lf_single", "lf_rm1", "lf_rm2", "lf_rm3")
COORDINATE_COLUMNS = ("row", "col", "re", "im")
RINGMODE_COLUMNS = ("kind", "m", "n", "sublattice", "re", "im")


class ExportError(Exception):
    """Raised when an output file cannot be written."""


def ensure_output_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ExportError(f"Cannot create output directory {path}: {e}") from e
    return path


def _write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow(row)
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}") from e
    print(f"[Export] Wrote {os.path.basename(path)}")
    return path


def read_csv(path: str) -> List[Dict[str, str]]:
    """Rows of an emitted CSV as dicts keyed by header."""
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _plain(value: Any) -> Any:
    """numpy scalars/arrays and non-finite floats made JSON-safe."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_json(data: Mapping[str, Any], path: str) -> str:
    text = json.dumps(_plain(dict(data)), indent=2, sort_keys=True)
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}") from e
    print(f"[Export] Wrote {os.path.basename(path)}")
    return path


# ------------------------------------------------------------------ lattice data

def write_bands_csv(surface: BandSurface, path: str) -> str:
    def rows():
        for i, kx in enumerate(surface.kx):
            for j, ky in enumerate(surface.ky):
                energies = surface.energies[i, j]
                yield [format_float(kx), format_float(ky)] + [format_float(angular_to_mhz(e)) for e in energies]
    return _write_csv(path, BANDS_COLUMNS, rows())


def write_butterfly_csv(spectrum: ButterflySpectrum, path: str) -> str:
    def rows():
        for theta, energies in zip(spectrum.thetas, spectrum.energies):
            for index, energy in enumerate(energies):
                yield [format_float(theta / math.pi), index, format_float(angular_to_mhz(energy))]
    return _write_csv(path, BUTTERFLY_COLUMNS, rows())


def write_sspn_csv(result: SteadyStateResult, spec: LiebLatticeSpec, path: str) -> str:
    def rows():
        for index, amplitude in enumerate(result.amplitudes):
            site = SiteIndex.from_flat(index, spec.nx)
            yield [site.m, site.n, site.sublattice.name, format_float(amplitude.real),
                   format_float(amplitude.imag), format_float(result.sspn[index])]
    return _write_csv(path, SSPN_COLUMNS, rows())


def write_locfactor_csv(rows_in: Sequence[SweepRow], path: str) -> str:
    def rows():
        for row in rows_in:
            factors = [row.factors.get(kind, float("nan")) for kind in SWEEP_KINDS]
            yield [format_float(angular_to_mhz(row.tbc_dc))] + [format_float(f) for f in factors]
    return _write_csv(path, LOCFACTOR_COLUMNS, rows())


def write_coordinate_list(h: RealSpaceHamiltonian, path: str, tol: float = 0.0) -> str:
    """Nonzero entries as (row, col, re, im) in rad/s, row-major."""
    def rows():
        for row, col in zip(*np.nonzero(np.abs(h.entries) > tol)):
            value = h.entries[row, col]
            yield [int(row), int(col), format_float(value.real), format_float(value.imag)]
    return _write_csv(path, COORDINATE_COLUMNS, rows())


def write_ringmodes_csv(states: Mapping[str, StateVector], path: str, tol: float = 1e-12) -> str:
    def rows():
        for kind, state in states.items():
            for site in state.support(tol):
                value = state.amplitudes[site.flat(state.nx)]
                yield [kind, site.m, site.n, site.sublattice.name, format_float(value.real), format_float(value.imag)]
    return _write_csv(path, RINGMODE_COLUMNS, rows())


# ------------------------------------------------------------------ reports

def circuit_report(sol: EigenmodeSolution, p: CircuitParams, delta: float,
                   operating_T: float, warnings: Optional[Sequence[str]] = None) -> Dict[str, Any]:
    """Everything the circuit layer derives from one parameter set, in GHz/MHz."""
    dc = circuit_service.dc_mixing_matrix(sol, p)
    pair_keys = [(m, n) for i, m in enumerate(MODES) for n in MODES[i + 1:]]
    tbc = dc["B"]["C"]
    omega_p = circuit_service.plasma_frequency(p)

    parametric = {pair: circuit_service.parametric_strength(sol, p, pair) for pair in PAIRS}
    required = {}
    for pair in PAIRS:
        try:
            required[pair] = circuit_service.required_ac_amplitude(sol, p, pair, operating_T)
        except circuit_service.EigenmodeError:
            required[pair] = float("nan")

    return {
        "generator": REPORT_GENERATOR,
        "eigenfrequencies_GHz": {m: angular_to_ghz(sol.omega[m]) for m in MODES},
        "bare_frequencies_GHz": {m: angular_to_ghz(w) for m, w in circuit_service.bare_frequencies(p).items()},
        "wavenumbers_per_m": dict(sol.k),
        "L_J_H": p.L_J,
        "phi_over_phi0": circuit_service.phi_over_phi0(sol),
        "esr": {m: {a: circuit_service.esr(sol, p, m, a) for a in MODES} for m in MODES},
        "orthonormality_residual": circuit_service.orthonormality_residual(sol),
        "kirchhoff_residual": {m: circuit_service.kirchhoff_residual(sol, m) for m in MODES},
        "T_dc_MHz": {f"{m}{n}": angular_to_mhz(dc[m][n]) for m, n in pair_keys},
        "T_self_MHz": {m: angular_to_mhz(dc[m][m]) for m in MODES},
        "derived_tprime_MHz": angular_to_mhz(nnn_strength(tbc, delta)),
        "nnn_half_width_estimate_MHz": angular_to_mhz(nnn_half_width_estimate(tbc, delta)),
        "fourth_order_ratio": circuit_service.fourth_order_ratio(sol, p),
        "T_parametric_MHz": {pair: angular_to_mhz(v) for pair, v in parametric.items()},
        "parametric_phase_rad": {pair: circuit_service.parametric_phase(p, pair) for pair in PAIRS},
        "operating_T_MHz": angular_to_mhz(operating_T),
        "Phi_ac_for_operating_T_Phi0": required,
        "plasma_frequency_GHz": angular_to_ghz(omega_p),
        "plasma_over_delta": omega_p / delta,
        "plasma_over_2delta": omega_p / (2.0 * delta),
        "warnings": list(warnings or []),
    }


def noise_report(budget: Mapping[str, Mapping[str, Any]], flux_resolve: Mapping[str, float],
                 operating_T: float) -> Dict[str, Any]:
    """Noise budget converted to MHz, plus the re-solved flux shifts."""
    report: Dict[str, Any] = {"generator": REPORT_GENERATOR, "operating_T_MHz": angular_to_mhz(operating_T)}
    for channel, entry in budget.items():
        report[channel] = {
            "amplitude": entry["amplitude"],
            "variance": entry["variance"],
            "std": entry["std"],
            "range_bound": entry["range_bound"],
            "delta_omega_MHz": {m: angular_to_mhz(v) for m, v in entry["delta_omega"].items()},
            "delta_T_MHz": {pair: angular_to_mhz(v) for pair, v in entry["delta_T"].items()},
            "max_delta_omega_MHz": angular_to_mhz(entry["max_delta_omega"]),
            "max_delta_T_MHz": angular_to_mhz(entry["max_delta_T"]),
            "max_delta_omega_over_T": entry["max_delta_omega"] / operating_T,
            "max_delta_T_over_T": entry["max_delta_T"] / operating_T,
        }
    report["flux_resolve_delta_omega_MHz"] = {m: angular_to_mhz(v) for m, v in flux_resolve.items()}
    return report
