"""Bloch Hamiltonians, analytic Lieb bands and flatness of the middle sheet.

k convention: NN entries are T(1 + e^{i kx}) (A-B) and T(1 + e^{-i ky}) (A-C)
with kx, ky in [0, 2*pi], so the three bands touch at (pi, pi).
"""

import math
from typing import List, Tuple

import numpy as np

from ..models.bands import BandSurface, BlochMatrix
from ..utils.parallel import ordered_map


class BandError(Exception):
    """Raised for an invalid k-grid or band index."""


def nnn_strength(tbc_dc: float, delta: float) -> float:
    """Effective next-nearest hopping t' = T_BC^2 / (3 Delta) (rad/s)."""
    if delta <= 0.0:
        raise BandError(f"Detuning Delta must be positive, got {delta}.")
    return tbc_dc * tbc_dc / (3.0 * delta)


def nnn_half_width_estimate(tbc_dc: float, delta: float) -> float:
    """Closed-form middle-band scale T_BC^2 / (2 Delta) (rad/s)."""
    if delta <= 0.0:
        raise BandError(f"Detuning Delta must be positive, got {delta}.")
    return tbc_dc * tbc_dc / (2.0 * delta)


def bloch_hamiltonian(k: Tuple[float, float], T: float, tprime: float = 0.0) -> BlochMatrix:
    """H_k with the NNN diagonal 2t' * diag(0, -cos(kx - ky), +cos(kx - ky))."""
    kx, ky = float(k[0]), float(k[1])
    if not (math.isfinite(kx) and math.isfinite(ky)):
        raise BandError(f"k must be finite, got ({kx}, {ky}).")

    ab = T * (1.0 + complex(math.cos(kx), math.sin(kx)))
    ac = T * (1.0 + complex(math.cos(ky), -math.sin(ky)))
    shift = 2.0 * tprime * math.cos(kx - ky)

    matrix = np.array([
        [0.0, ab, ac],
        [ab.conjugate(), -shift, 0.0],
        [ac.conjugate(), 0.0, shift],
    ], dtype=complex)
    return BlochMatrix(k=(kx, ky), matrix=matrix)


def analytic_bands(k: Tuple[float, float], T: float) -> Tuple[float, float, float]:
    """(Omega_-, Omega_0, Omega_+) = (-2T*s, 0, 2T*s), s = sqrt(cos^2(kx/2) + cos^2(ky/2))."""
    kx, ky = float(k[0]), float(k[1])
    s = math.sqrt(math.cos(kx / 2.0) ** 2 + math.cos(ky / 2.0) ** 2)
    return (-2.0 * T * s, 0.0, 2.0 * T * s)


def _row(args) -> np.ndarray:
    kx, ky_axis, T, tprime = args
    return np.array([bloch_hamiltonian((kx, ky), T, tprime).eigenvalues() for ky in ky_axis])


def band_grid(nk: int, T: float, tprime: float = 0.0, workers: int = 1) -> BandSurface:
    """Diagonalize H_k on the uniform nk x nk grid over [0, 2*pi]^2 (endpoints included)."""
    if nk < 2:
        raise BandError(f"Band grid needs nk >= 2, got {nk}.")
    axis = np.linspace(0.0, 2.0 * math.pi, nk)
    rows: List[np.ndarray] = ordered_map(_row, [(kx, axis, T, tprime) for kx in axis], workers)
    energies = np.sort(np.stack(rows), axis=2, kind="stable")
    return BandSurface(kx=axis, ky=axis.copy(), energies=energies, hopping_T=T, nnn_tprime=tprime)


def flatness(surface: BandSurface, band: int) -> Tuple[float, float]:
    """(width, width / total span) of one sheet. A constant spectrum gives (0, 0)."""
    if band not in (0, 1, 2):
        raise BandError(f"Band index must be 0, 1 or 2, got {band}.")
    sheet = surface.sheet(band)
    width = float(sheet.max() - sheet.min())
    span = float(surface.energies.max() - surface.energies.min())
    ratio = width / span if span > 0.0 else 0.0
    return width, ratio


def middle_band_half_width(surface: BandSurface) -> float:
    """Largest |E| on the middle sheet."""
    return float(np.max(np.abs(surface.sheet(1))))


def bloch_union(nx: int, ny: int, T: float, tprime: float = 0.0) -> np.ndarray:
    """Sorted Bloch eigenvalues over the discrete momenta of an nx x ny torus."""
    values = [
        bloch_hamiltonian((2.0 * math.pi * p / nx, 2.0 * math.pi * q / ny), T, tprime).eigenvalues()
        for p in range(nx)
        for q in range(ny)
    ]
    return np.sort(np.concatenate(values))
