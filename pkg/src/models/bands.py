"""Momentum-space and flux-sweep spectra."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .lattice import LiebLatticeSpec


@dataclass(frozen=True, eq=False)
class BlochMatrix:
    """3x3 Hermitian H_k in the (A, B, C) basis, rad/s."""
    k: Tuple[float, float]
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class BandSurface:
    """Eigenvalues on an Nk x Nk grid.

    ``kx``/``ky`` are the 1-D axes; ``energies[i, j, b]`` is band ``b`` at
    (kx[i], ky[j]), ascending in ``b``.
    """
    kx: np.ndarray
    ky: np.ndarray
    energies: np.ndarray
    hopping_T: float
    nnn_tprime: float

    @property
    def nk(self) -> int:
        return self.kx.shape[0]

    def sheet(self, band: int) -> np.ndarray:
        return self.energies[:, :, band]


@dataclass(frozen=True, eq=False)
class ButterflySpectrum:
    """Open-boundary spectra, one sorted row of 3*nx*ny eigenvalues per theta."""
    thetas: np.ndarray
    energies: np.ndarray
    spec: LiebLatticeSpec

    def column(self, theta_index: int) -> np.ndarray:
        return self.energies[theta_index]
