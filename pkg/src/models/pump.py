"""Coherent pump and steady-state result types."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .lattice import SiteIndex


class PumpKind(Enum):
    SINGLE_B = "single_B"
    RM1 = "RM1"
    RM2 = "RM2"
    RM3 = "RM3"

    @classmethod
    def parse(cls, value: str) -> "PumpKind":
        text = str(value).strip()
        for kind in cls:
            if kind.value.lower() == text.lower():
                return kind
        raise ValueError(f"Unknown pump kind '{value}'. Use single_B, RM1, RM2 or RM3.")


@dataclass(frozen=True, eq=False)
class PumpConfig:
    """Pump vector P (rad/s), pump detuning Omega_P and uniform decay kappa (rad/s)."""
    pump: np.ndarray
    detuning_OmegaP: float
    kappa: float
    support: Tuple[SiteIndex, ...]
    kind: PumpKind = PumpKind.SINGLE_B

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}.")

    def scaled(self, factor: complex) -> "PumpConfig":
        return PumpConfig(pump=self.pump * factor, detuning_OmegaP=self.detuning_OmegaP,
                          kappa=self.kappa, support=self.support, kind=self.kind)


@dataclass(frozen=True, eq=False)
class SteadyStateResult:
    """Mean-field amplitudes <a_j>, photon numbers |<a_j>|^2 and the solve residual (rad/s)."""
    amplitudes: np.ndarray
    sspn: np.ndarray
    residual: float

    @property
    def total_photons(self) -> float:
        return float(self.sspn.sum())


@dataclass(frozen=True)
class PumpSettings:
    """Pump parameters as configured, before a lattice turns them into a vector."""
    kind: PumpKind
    anchor: SiteIndex
    T_P: float
    kappa: float
    detuning: float = 0.0
