"""Physical-circuit parameters and results for one TLR unit cell.

All fields are SI. Flux values that are naturally quoted in flux quanta
(``Phi_dc``, ``Phi_ac_*``) are stored in units of Phi0.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.constants import e, h, hbar

# Superconducting flux quantum and reduced flux quantum (Wb).
PHI0 = h / (2.0 * e)
REDUCED_PHI0 = hbar / (2.0 * e)

MODES = ("A", "B", "C")
PAIRS = ("BA", "CA")


@dataclass(frozen=True)
class CircuitParams:
    l: float            # H/m
    c: float            # F/m
    L_A: float          # m
    L_B: float
    L_C: float
    I_J0: float         # A
    Phi_dc: float       # Phi0
    I_J: float          # A
    C_J: float          # F
    Phi_ac_CA: float    # Phi0
    Phi_ac_BA: float    # Phi0
    theta_CA: float = 0.0
    theta_BA: float = 0.0

    @property
    def lengths(self) -> Tuple[float, float, float]:
        return (self.L_A, self.L_B, self.L_C)

    @property
    def phase_velocity(self) -> float:
        return 1.0 / math.sqrt(self.l * self.c)

    @property
    def E_J(self) -> float:
        """Effective Josephson energy I_J * phi0 (J)."""
        return self.I_J * REDUCED_PHI0

    @property
    def E_J0(self) -> float:
        return self.I_J0 * REDUCED_PHI0

    @property
    def L_J(self) -> float:
        """Josephson inductance phi0^2 / E_J (H)."""
        return REDUCED_PHI0 ** 2 / self.E_J

    @property
    def dc_phase(self) -> float:
        """Phi_dc / (2 phi0) = pi * Phi_dc[Phi0]."""
        return math.pi * self.Phi_dc

    def ac_amplitude(self, pair: str) -> float:
        return {"CA": self.Phi_ac_CA, "BA": self.Phi_ac_BA}[pair]

    def ac_phase(self, pair: str) -> float:
        return {"CA": self.theta_CA, "BA": self.theta_BA}[pair]


@dataclass(frozen=True, eq=False)
class EigenmodeSolution:
    """Three lowest coupled modes, labelled by the TLR that stores most of their energy.

    ``coeffs[m]`` holds (C_A, C_B, C_C) for mode ``m`` with
    f_{alpha,m}(x) = C_alpha sin(k_m x), normalized including the C_J/c node term.
    ``phi_J_rms[m]`` is the zero-point node flux at the SQUID (Wb).
    """
    k: Dict[str, float]
    omega: Dict[str, float]
    coeffs: Dict[str, np.ndarray]
    phi_J_rms: Dict[str, float]
    params: CircuitParams = field(repr=False)

    def node_value(self, mode: str) -> float:
        """f_{alpha,m}(L_alpha), identical for every alpha by continuity."""
        coeffs = self.coeffs[mode]
        return float(coeffs[0] * math.sin(self.k[mode] * self.params.L_A))

    def phi_ratio(self, mode: str) -> float:
        """phi^m / phi0."""
        return self.phi_J_rms[mode] / REDUCED_PHI0


@dataclass(frozen=True)
class NoiseSpec:
    """1/f spectrum S(omega) = 2*pi*A^2/omega between two angular cutoffs."""
    A_O: float
    omega_min: float
    omega_max: float

    def __post_init__(self):
        if not (0.0 < self.omega_min < self.omega_max):
            raise ValueError(
                f"Noise cutoffs must satisfy 0 < omega_min < omega_max, got "
                f"{self.omega_min} and {self.omega_max}."
            )


@dataclass(frozen=True)
class Disturbance:
    """Mode-frequency shifts (per mode) and hopping shifts (per pair), rad/s."""
    delta_omega: Dict[str, float]
    delta_T: Dict[str, float]

    @property
    def max_delta_omega(self) -> float:
        return max(abs(v) for v in self.delta_omega.values())

    @property
    def max_delta_T(self) -> float:
        return max(abs(v) for v in self.delta_T.values())
