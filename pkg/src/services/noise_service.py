"""Quasi-static 1/f disturbances of the mode frequencies and hoppings.

A slow fluctuation is frozen for one experimental run, so its effect is the
first-order Taylor shift of the SQUID energy with respect to the fluctuating
variable. Two channels are covered: the d.c. flux bias and the critical
current E_J0.
"""

import dataclasses
import math
from typing import Dict, Optional, Tuple

from scipy.constants import hbar

from ..models.circuit import MODES, PAIRS, CircuitParams, Disturbance, EigenmodeSolution, NoiseSpec
from .circuit_service import EigenmodeError, parametric_strength, solve_eigenmodes

# Fluctuation range in units of the 1/f amplitude.
RANGE_MULTIPLIER = 5.0


def noise_variance(n: NoiseSpec) -> Tuple[float, float]:
    """(A^2 ln(omega_max/omega_min), 5 A) for a 1/f spectrum between the cutoffs."""
    variance = n.A_O ** 2 * math.log(n.omega_max / n.omega_min)
    return variance, RANGE_MULTIPLIER * abs(n.A_O)


def _hoppings(sol: EigenmodeSolution, p: CircuitParams, hopping: Optional[float]) -> Dict[str, float]:
    if hopping is not None:
        return {pair: hopping for pair in PAIRS}
    return {pair: parametric_strength(sol, p, pair) for pair in PAIRS}


def flux_noise_disturbance(sol: EigenmodeSolution, p: CircuitParams, dPhi: float,
                           hopping: Optional[float] = None) -> Disturbance:
    """Shifts caused by a bias offset of ``dPhi`` flux quanta.

    The diagonal part of (dPhi Phi0 / 4 phi0^3) E_J0 sin(.) [sum phi^m (a+a^dag)]^2
    moves omega_m by -(pi dPhi)(phi^m/phi0)^2 E_J0 sin(.)/hbar. The tone-induced
    hopping scales with sin(.), so it moves by T * pi dPhi * cot(.). ``hopping``
    is the operating hopping (rad/s); by default each pair's own parametric value.
    """
    sin_term = p.E_J0 * math.sin(p.dc_phase) / hbar
    delta_omega = {m: -math.pi * dPhi * sol.phi_ratio(m) ** 2 * sin_term for m in MODES}

    tan_phase = math.tan(p.dc_phase)
    if tan_phase == 0.0:
        raise EigenmodeError(f"Tone-induced hopping vanishes at Phi_dc = {p.Phi_dc}; no flux sensitivity defined.")
    delta_T = {pair: T * math.pi * dPhi / tan_phase for pair, T in _hoppings(sol, p, hopping).items()}
    return Disturbance(delta_omega=delta_omega, delta_T=delta_T)


def critical_current_noise_disturbance(sol: EigenmodeSolution, p: CircuitParams, dI_over_I: float,
                                       hopping: Optional[float] = None) -> Disturbance:
    """Shifts caused by a relative change of I_J0; both channels are linear in E_J0."""
    cos_term = p.E_J0 * math.cos(p.dc_phase) / hbar
    delta_omega = {m: dI_over_I * sol.phi_ratio(m) ** 2 * cos_term for m in MODES}
    delta_T = {pair: T * dI_over_I for pair, T in _hoppings(sol, p, hopping).items()}
    return Disturbance(delta_omega=delta_omega, delta_T=delta_T)


def flux_shift_by_resolve(p: CircuitParams, dPhi: float) -> Dict[str, float]:
    """omega_m(Phi_dc + dPhi) - omega_m(Phi_dc) from two full eigenmode solves.

    The effective critical current follows I_J cos(pi Phi) as the bias moves.
    """
    shifted_bias = p.Phi_dc + dPhi
    scale = math.cos(math.pi * shifted_bias) / math.cos(p.dc_phase)
    if not scale > 0.0:
        raise EigenmodeError(f"Bias {shifted_bias} Phi0 leaves no effective critical current.")
    shifted = dataclasses.replace(p, Phi_dc=shifted_bias, I_J=p.I_J * scale)

    base = solve_eigenmodes(p)
    moved = solve_eigenmodes(shifted)
    return {m: moved.omega[m] - base.omega[m] for m in MODES}


def noise_budget(sol: EigenmodeSolution, p: CircuitParams, flux: NoiseSpec, current: NoiseSpec,
                 hopping: Optional[float] = None) -> Dict[str, Dict[str, object]]:
    """Apply the +/-5A rule to both 1/f channels and propagate the bounds.

    ``flux.A_O`` is in flux quanta, ``current.A_O`` is relative to I_J0.
    """
    budget: Dict[str, Dict[str, object]] = {}
    channels = (
        ("flux", flux, flux_noise_disturbance),
        ("critical_current", current, critical_current_noise_disturbance),
    )
    for name, spec, propagate in channels:
        variance, bound = noise_variance(spec)
        disturbance = propagate(sol, p, bound, hopping)
        budget[name] = {
            "amplitude": spec.A_O,
            "variance": variance,
            "std": math.sqrt(variance),
            "range_bound": bound,
            "delta_omega": {m: abs(v) for m, v in disturbance.delta_omega.items()},
            "delta_T": {pair: abs(v) for pair, v in disturbance.delta_T.items()},
            "max_delta_omega": disturbance.max_delta_omega,
            "max_delta_T": disturbance.max_delta_T,
        }
    return budget
