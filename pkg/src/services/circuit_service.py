"""Eigenmodes of three lambda/2 TLRs grounded through one SQUID, and the couplings they imply.

Each TLR alpha carries f_alpha(x) = C_alpha sin(k x), x in [0, L_alpha], with
the grounded ends (f = 0) at x = 0 and the shared SQUID node at x = L_alpha.
Continuity at the node plus Kirchhoff's current law there give a 3x3 homogeneous system
M(k) C = 0; its determinant is scanned for sign changes and polished with
Brent's method.
"""

import math
from typing import Dict, List, Tuple

import numpy as np
from scipy.constants import e, hbar
from scipy.integrate import simpson
from scipy.optimize import brentq

from ..models.circuit import MODES, PAIRS, REDUCED_PHI0, CircuitParams, EigenmodeSolution

# Scan window around the bare lambda/2 wavenumbers, as a fraction of them.
SCAN_WINDOW = 0.2
SCAN_POINTS = 40001
ROOT_RTOL = 1e-12
ROOT_XTOL = 1e-13

# Composite Simpson intervals per TLR (even).
QUADRATURE_INTERVALS = 10000

# Two roots closer than this (relative) are reported as a crossing.
DEGENERACY_RTOL = 1e-6

AC_RATIO_WARNING = 0.1
CRITICAL_CURRENT_TOLERANCE = 0.05


class EigenmodeError(Exception):
    """Raised for invalid circuit parameters, failed bracketing or degenerate roots."""


# ------------------------------------------------------------------ parameters

def validate_params(p: CircuitParams) -> List[str]:
    """Reject non-physical values; return (and print) consistency warnings."""
    positive = {
        "l": p.l, "c": p.c, "L_A": p.L_A, "L_B": p.L_B, "L_C": p.L_C,
        "I_J0": p.I_J0, "I_J": p.I_J, "C_J": p.C_J, "Phi_dc": p.Phi_dc,
    }
    for name, value in positive.items():
        if not (value > 0.0) or not math.isfinite(value):
            raise EigenmodeError(f"Circuit parameter {name} must be positive and finite, got {value}.")
    for name in ("Phi_ac_CA", "Phi_ac_BA"):
        if getattr(p, name) < 0.0:
            raise EigenmodeError(f"Circuit parameter {name} must be >= 0, got {getattr(p, name)}.")

    warnings: List[str] = []
    for pair in PAIRS:
        ratio = p.ac_amplitude(pair) / p.Phi_dc
        if ratio > AC_RATIO_WARNING:
            warnings.append(f"Phi_ac_{pair}/Phi_dc = {ratio:.3f} is not small; the flux expansion may fail.")
    expected = p.I_J0 * math.cos(math.pi * p.Phi_dc)
    if abs(p.I_J - expected) > CRITICAL_CURRENT_TOLERANCE * abs(p.I_J):
        warnings.append(
            f"I_J = {p.I_J * 1e6:.3f} uA differs from I_J0*cos(pi*Phi_dc) = {expected * 1e6:.3f} uA "
            f"by more than {CRITICAL_CURRENT_TOLERANCE:.0%}."
        )
    for message in warnings:
        print(f"[Circuit] Warning: {message}")
    return warnings


def bare_frequencies(p: CircuitParams) -> Dict[str, float]:
    """Angular frequencies pi*v/L_alpha of the isolated lambda/2 resonators."""
    v = p.phase_velocity
    return {mode: math.pi * v / length for mode, length in zip(MODES, p.lengths)}


# ------------------------------------------------------------------ eigenproblem

def eigenmode_matrix(k: float, p: CircuitParams) -> np.ndarray:
    """M(k): two continuity rows and the current-balance row (in units of l)."""
    L_J = p.L_J
    s = [math.sin(k * L) for L in p.lengths]
    c = [math.cos(k * L) for L in p.lengths]
    g = p.l - p.C_J * L_J * k * k / p.c
    return np.array([
        [s[0], -s[1], 0.0],
        [0.0, s[1], -s[2]],
        [L_J * k * c[0] + g * s[0], L_J * k * c[1], L_J * k * c[2]],
    ])


def eigenmode_determinant(k, p: CircuitParams):
    """det M(k), vectorized over ``k``.

    Equals sA*sB*sC * [L_J k (cot kL_A + cot kL_B + cot kL_C) + l - C_J L_J k^2/c]
    but stays finite at the bare resonances.
    """
    k = np.asarray(k, dtype=float)
    L_J = p.L_J
    sA, sB, sC = (np.sin(k * L) for L in p.lengths)
    cA, cB, cC = (np.cos(k * L) for L in p.lengths)
    g = p.l - p.C_J * L_J * k * k / p.c
    return L_J * k * (sA * sB * cC + sA * sC * cB + sB * sC * cA) + g * sA * sB * sC


def _find_roots(p: CircuitParams) -> List[float]:
    bare = [math.pi / L for L in p.lengths]
    lo = (1.0 - SCAN_WINDOW) * min(bare)
    hi = (1.0 + SCAN_WINDOW) * max(bare)
    grid = np.linspace(lo, hi, SCAN_POINTS)
    values = eigenmode_determinant(grid, p)

    roots: List[float] = []
    for i in range(grid.size - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(brentq(lambda x: float(eigenmode_determinant(x, p)), grid[i], grid[i + 1],
                                xtol=ROOT_XTOL, rtol=ROOT_RTOL))
    return roots


def _assign_modes(roots: List[float], p: CircuitParams) -> Dict[str, float]:
    if len(roots) < 3:
        raise EigenmodeError(
            f"Found {len(roots)} eigenmode root(s) near the bare resonances, expected 3; "
            f"check the TLR lengths and SQUID parameters."
        )
    lowest = sorted(roots)[:3]
    for first, second in zip(lowest, lowest[1:]):
        if second - first < DEGENERACY_RTOL * second:
            raise EigenmodeError(f"Eigenmode roots {first:.9g} and {second:.9g} 1/m are degenerate.")

    bare = {mode: math.pi / L for mode, L in zip(MODES, p.lengths)}
    assigned: Dict[str, float] = {}
    for k in lowest:
        mode = min(MODES, key=lambda m: abs(k - bare[m]) / bare[m])
        if mode in assigned:
            raise EigenmodeError(
                f"Roots {assigned[mode]:.9g} and {k:.9g} 1/m both sit nearest TLR {mode}; "
                f"modes have crossed and cannot be labelled."
            )
        assigned[mode] = k
    return assigned


def _sin_squared_integral(k: float, length: float) -> float:
    x = np.linspace(0.0, length, QUADRATURE_INTERVALS + 1)
    return float(simpson(np.sin(k * x) ** 2, x=x))


def _normalized_coefficients(k: float, p: CircuitParams) -> np.ndarray:
    """Null vector of the continuity rows, scaled so the node value is positive and norm one."""
    s = np.array([math.sin(k * L) for L in p.lengths])
    raw = np.array([s[1] * s[2], s[0] * s[2], s[0] * s[1]])
    node = raw[0] * s[0]
    if node < 0.0:
        raw = -raw
        node = -node

    norm = sum(raw[i] ** 2 * _sin_squared_integral(k, L) for i, L in enumerate(p.lengths))
    norm += (p.C_J / p.c) * node ** 2
    return raw / math.sqrt(norm)


def solve_eigenmodes(p: CircuitParams) -> EigenmodeSolution:
    """Three lowest modes, capacitance-normalized, with their SQUID zero-point fluxes."""
    validate_params(p)
    ks = _assign_modes(_find_roots(p), p)
    v = p.phase_velocity

    omega: Dict[str, float] = {}
    coeffs: Dict[str, np.ndarray] = {}
    phi: Dict[str, float] = {}
    for mode in MODES:
        k = ks[mode]
        omega[mode] = v * k
        coeffs[mode] = _normalized_coefficients(k, p)
        node = coeffs[mode][0] * math.sin(k * p.L_A)
        phi[mode] = abs(node) * math.sqrt(hbar / (2.0 * omega[mode] * p.c))

    return EigenmodeSolution(k=ks, omega=omega, coeffs=coeffs, phi_J_rms=phi, params=p)


def mode_overlap(sol: EigenmodeSolution, m: str, n: str) -> float:
    """Weighted inner product of two mode functions, including the C_J/c node term."""
    p = sol.params
    total = 0.0
    for i, L in enumerate(p.lengths):
        x = np.linspace(0.0, L, QUADRATURE_INTERVALS + 1)
        fm = sol.coeffs[m][i] * np.sin(sol.k[m] * x)
        fn = sol.coeffs[n][i] * np.sin(sol.k[n] * x)
        total += float(simpson(fm * fn, x=x))
    return total + (p.C_J / p.c) * sol.node_value(m) * sol.node_value(n)


def orthonormality_residual(sol: EigenmodeSolution) -> float:
    """max |<f_m, f_n> - delta_mn| over all nine pairs."""
    return max(
        abs(mode_overlap(sol, m, n) - (1.0 if m == n else 0.0))
        for m in MODES for n in MODES
    )


def kirchhoff_residual(sol: EigenmodeSolution, mode: str) -> float:
    """Relative current imbalance at the SQUID node for one solved mode."""
    p = sol.params
    k = sol.k[mode]
    coeffs = sol.coeffs[mode]
    L_J = p.L_J
    branch = [L_J * k * coeffs[i] * math.cos(k * L) for i, L in enumerate(p.lengths)]
    g = p.l - p.C_J * L_J * k * k / p.c
    node = g * coeffs[0] * math.sin(k * p.L_A)
    scale = sum(abs(b) for b in branch) + abs(node)
    return abs(sum(branch) + node) / scale


# ------------------------------------------------------------------ energies

def mode_energies(sol: EigenmodeSolution, mode: str) -> Tuple[Dict[str, float], float]:
    """Per-TLR energy integrals and the SQUID node energy for one mode."""
    p = sol.params
    k = sol.k[mode]
    w = sol.omega[mode]
    weight = 0.5 * (p.c * w * w + k * k / p.l)

    per_tlr: Dict[str, float] = {}
    for i, (alpha, L) in enumerate(zip(MODES, p.lengths)):
        x = np.linspace(0.0, L, QUADRATURE_INTERVALS + 1)
        f = sol.coeffs[mode][i] * np.sin(k * x)
        per_tlr[alpha] = weight * float(simpson(f * f, x=x))

    node = 0.5 * (p.C_J * w * w + 1.0 / p.L_J) * sol.node_value(mode) ** 2
    return per_tlr, node


def esr(sol: EigenmodeSolution, p: CircuitParams, mode: str, tlr: str) -> float:
    """Share of mode ``mode``'s energy stored in TLR ``tlr``."""
    if mode not in MODES or tlr not in MODES:
        raise EigenmodeError(f"Mode and TLR must be among {MODES}, got {mode!r}, {tlr!r}.")
    if p is not sol.params and p != sol.params:
        raise EigenmodeError("ESR requested with parameters that differ from the solved ones.")
    per_tlr, node = mode_energies(sol, mode)
    return per_tlr[tlr] / (sum(per_tlr.values()) + node)


# ------------------------------------------------------------------ couplings

def _second_order(sol: EigenmodeSolution, p: CircuitParams, m: str, n: str) -> float:
    return sol.phi_ratio(m) * sol.phi_ratio(n) * p.E_J0 * math.cos(p.dc_phase) / hbar


def dc_mixing(sol: EigenmodeSolution, p: CircuitParams, m: str, n: str) -> float:
    """T_mn^dc = (phi^m phi^n / phi0^2) E_J0 cos(Phi_dc / 2 phi0) / hbar (rad/s)."""
    if m == n:
        raise EigenmodeError(f"d.c. mixing couples two different modes, got {m!r} twice.")
    return _second_order(sol, p, m, n)


def dc_self_term(sol: EigenmodeSolution, p: CircuitParams, m: str) -> float:
    """Coefficient T_mm of (a_m + a_m^dagger)^2 in the same expansion."""
    return _second_order(sol, p, m, m)


def dc_mixing_matrix(sol: EigenmodeSolution, p: CircuitParams) -> Dict[str, Dict[str, float]]:
    return {m: {n: _second_order(sol, p, m, n) for n in MODES} for m in MODES}


def fourth_order_ratio(sol: EigenmodeSolution, p: CircuitParams) -> float:
    """Largest quartic coefficient (1/48)(phi^j/phi0)^4 E_J0 cos(.) over the smallest T_mn^dc."""
    cos_term = p.E_J0 * math.cos(p.dc_phase) / hbar
    quartic = max(abs(sol.phi_ratio(j) ** 4 * cos_term / 48.0) for j in MODES)
    mixing = min(abs(dc_mixing(sol, p, m, n)) for m in MODES for n in MODES if m != n)
    if mixing == 0.0:
        return 0.0 if quartic == 0.0 else math.inf
    return quartic / mixing


def _pair_modes(pair: str) -> Tuple[str, str]:
    if pair not in PAIRS:
        raise EigenmodeError(f"Parametric pair must be one of {PAIRS}, got {pair!r}.")
    return pair[0], pair[1]


def parametric_strength(sol: EigenmodeSolution, p: CircuitParams, pair: str) -> float:
    """Tone-induced hopping (phi^a phi^b/phi0^2) E_J0 sin(Phi_dc/2phi0) (2*pi*Phi_ac/4) / hbar."""
    a, b = _pair_modes(pair)
    amplitude = p.ac_amplitude(pair) * 2.0 * math.pi / 4.0
    return sol.phi_ratio(a) * sol.phi_ratio(b) * p.E_J0 * math.sin(p.dc_phase) * amplitude / hbar


def parametric_phase(p: CircuitParams, pair: str) -> float:
    """The induced hopping inherits the tone's initial phase."""
    _pair_modes(pair)
    return p.ac_phase(pair)


def required_ac_amplitude(sol: EigenmodeSolution, p: CircuitParams, pair: str, target: float) -> float:
    """Tone amplitude (Phi0) that would give hopping ``target`` (rad/s)."""
    per_unit = parametric_strength(sol, p, pair) / p.ac_amplitude(pair) if p.ac_amplitude(pair) else 0.0
    if per_unit == 0.0:
        raise EigenmodeError(f"Pair {pair} has no tone response at Phi_dc = {p.Phi_dc}.")
    return target / per_unit


def plasma_frequency(p: CircuitParams) -> float:
    """omega_p = sqrt(8 E_C E_J)/hbar with the Cooper-pair charging energy (2e)^2/(2 C_J)."""
    charging = (2.0 * e) ** 2 / (2.0 * p.C_J)
    return math.sqrt(8.0 * charging * p.E_J) / hbar


def phi_over_phi0(sol: EigenmodeSolution) -> Dict[str, float]:
    return {m: sol.phi_J_rms[m] / REDUCED_PHI0 for m in MODES}
