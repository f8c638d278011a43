"""Open-boundary spectrum versus Landau phase theta (the Hofstadter butterfly).

Each theta point is a full dense diagonalization of the real-space matrix;
at 12x12 cells that is a 432x432 Hermitian eigenproblem.
"""

import math
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

from ..models.bands import ButterflySpectrum
from ..models.lattice import Boundary, LiebLatticeSpec
from ..utils.parallel import ordered_map
from .lattice_builder import build_lieb

DEFAULT_DIM_CAP = 5000
DEFAULT_THETA_POINTS = 201


class HofstadterError(Exception):
    """Raised for an oversized lattice, an empty theta grid or an empty energy window."""


def theta_grid(points: int = DEFAULT_THETA_POINTS, theta_max: float = math.pi) -> np.ndarray:
    """Uniform theta values over [0, theta_max], both ends included."""
    if points < 1:
        raise HofstadterError(f"Theta grid needs at least one point, got {points}.")
    if points == 1:
        return np.array([0.0])
    return np.linspace(0.0, theta_max, points)


def _wrap_theta(theta: float) -> float:
    wrapped = math.fmod(theta, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    # fmod can land exactly on 2*pi after the shift for tiny negative inputs
    return 0.0 if wrapped >= 2.0 * math.pi else wrapped


def butterfly(nx: int, ny: int, T: float, tprime: float, thetas: Sequence[float],
              dim_cap: int = DEFAULT_DIM_CAP, workers: int = 1) -> ButterflySpectrum:
    """All eigenvalues of the open lattice at every theta in ``thetas``."""
    thetas = np.asarray(list(thetas), dtype=float)
    if thetas.size == 0:
        raise HofstadterError("Theta grid is empty.")
    template = LiebLatticeSpec(nx=nx, ny=ny, hopping_T=T, gauge_theta=0.0,
                               nnn_tprime=tprime, boundary=Boundary.OPEN)
    if template.dim > dim_cap:
        raise HofstadterError(
            f"Lattice dimension {template.dim} exceeds the cap of {dim_cap}; "
            f"raise butterfly.dim_cap to run it anyway."
        )

    def solve(theta: float) -> np.ndarray:
        spec = LiebLatticeSpec(nx=nx, ny=ny, hopping_T=T, gauge_theta=_wrap_theta(theta),
                               nnn_tprime=tprime, boundary=Boundary.OPEN)
        return eigh(build_lieb(spec).entries, eigvals_only=True)

    print(f"[Hofstadter] Diagonalizing {thetas.size} theta points at dimension {template.dim}")
    rows = ordered_map(solve, list(thetas), workers)
    return ButterflySpectrum(thetas=thetas, energies=np.vstack(rows), spec=template)


def middle_cluster_width(spectrum: ButterflySpectrum, window: float) -> np.ndarray:
    """Per theta, max - min of the eigenvalues inside [-window, +window]."""
    if not window > 0.0:
        raise HofstadterError(f"Energy window must be positive, got {window}.")
    widths = np.empty(spectrum.thetas.shape[0])
    for i, row in enumerate(spectrum.energies):
        inside = row[np.abs(row) <= window]
        if inside.size == 0:
            raise HofstadterError(
                f"No eigenvalue within +/-{window:.6g} rad/s at theta index {i}; widen the window."
            )
        widths[i] = inside.max() - inside.min()
    return widths


def zero_mode_counts(spectrum: ButterflySpectrum, tol: float) -> np.ndarray:
    """Number of eigenvalues with |E| < tol at each theta."""
    return np.count_nonzero(np.abs(spectrum.energies) < tol, axis=1)
