"""Value types for the real-space Lieb lattice.

Geometry: A_{m,n} sits at (m, n), B_{m,n} on the west edge (m - 1/2, n),
C_{m,n} on the north edge (m, n + 1/2). A_{m,n} therefore neighbours
B_{m,n}, B_{m+1,n}, C_{m,n} and C_{m,n-1}.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class LatticeError(Exception):
    """Raised for an invalid lattice, footprint or gauge with a readable message."""


class Sublattice(Enum):
    A = 0
    B = 1
    C = 2


class Boundary(Enum):
    OPEN = "open"
    PERIODIC = "periodic"

    @classmethod
    def parse(cls, value: str) -> "Boundary":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise LatticeError(f"Unknown boundary '{value}'. Use 'open' or 'periodic'.")


@dataclass(frozen=True)
class SiteIndex:
    """One lattice site: 1-based unit-cell column ``m``, row ``n``, sublattice."""
    m: int
    n: int
    sublattice: Sublattice = Sublattice.A

    def flat(self, nx: int) -> int:
        """Row-major flat index, 3 entries per cell in A, B, C order."""
        return 3 * ((self.n - 1) * nx + (self.m - 1)) + self.sublattice.value

    @classmethod
    def from_flat(cls, index: int, nx: int) -> "SiteIndex":
        cell, ordinal = divmod(index, 3)
        row, col = divmod(cell, nx)
        return cls(col + 1, row + 1, Sublattice(ordinal))

    @property
    def cell(self) -> Tuple[int, int]:
        return (self.m, self.n)

    def label(self) -> str:
        return f"{self.sublattice.name}_{self.m},{self.n}"


@dataclass(frozen=True)
class LiebLatticeSpec:
    """Single source of truth for building a lattice Hamiltonian.

    Strengths are angular frequencies (rad/s); ``gauge_theta`` is the Landau
    phase per row step, flux per plaquette is 2*theta.
    """
    nx: int
    ny: int
    hopping_T: float
    gauge_theta: float = 0.0
    nnn_tprime: float = 0.0
    boundary: Boundary = Boundary.OPEN
    # On-site detunings (rad/s), length 3*nx*ny. None means a clean lattice.
    disorder: Optional[Tuple[float, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise LatticeError(f"Lattice needs at least one cell per side, got {self.nx}x{self.ny}.")
        if not (self.hopping_T >= 0.0) or not math.isfinite(self.hopping_T):
            raise LatticeError(f"hopping_T must be finite and >= 0, got {self.hopping_T}.")
        if not (self.nnn_tprime >= 0.0) or not math.isfinite(self.nnn_tprime):
            raise LatticeError(f"nnn_tprime must be finite and >= 0, got {self.nnn_tprime}.")
        if not (0.0 <= self.gauge_theta < 2.0 * math.pi):
            raise LatticeError(f"gauge_theta must lie in [0, 2*pi), got {self.gauge_theta}.")
        if not isinstance(self.boundary, Boundary):
            object.__setattr__(self, "boundary", Boundary.parse(self.boundary))
        if self.disorder is not None and len(self.disorder) != self.dim:
            raise LatticeError(
                f"Disorder vector has length {len(self.disorder)}, lattice has {self.dim} sites."
            )

    @property
    def dim(self) -> int:
        return 3 * self.nx * self.ny

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def contains_cell(self, m: int, n: int) -> bool:
        return 1 <= m <= self.nx and 1 <= n <= self.ny

    def index(self, site: SiteIndex) -> int:
        if not self.contains_cell(site.m, site.n):
            raise LatticeError(f"Site {site.label()} is outside the {self.nx}x{self.ny} lattice.")
        return site.flat(self.nx)

    def wrap(self, m: int, n: int) -> Optional[Tuple[int, int]]:
        """Cell (m, n) folded back onto the lattice, or None if it falls off an open edge."""
        if self.periodic:
            return ((m - 1) % self.nx + 1, (n - 1) % self.ny + 1)
        if self.contains_cell(m, n):
            return (m, n)
        return None


@dataclass(frozen=True)
class HoppingTerm:
    """Amplitude ``strength * exp(i*phase)`` for a photon hopping ``source`` -> ``target``.

    ``strength`` is signed: the B-B next-nearest channel enters with a minus sign.

    Its Hermitian partner (target -> source, phase negated) is implied and
    written by the builder at the same time.
    """
    source: SiteIndex
    target: SiteIndex
    strength: float
    phase: float = 0.0
    nearest_neighbor: bool = True

    @property
    def amplitude(self) -> complex:
        return self.strength * complex(math.cos(self.phase), math.sin(self.phase))

    def conjugate(self) -> "HoppingTerm":
        return HoppingTerm(self.target, self.source, self.strength, -self.phase,
                           self.nearest_neighbor)


@dataclass(frozen=True, eq=False)
class RealSpaceHamiltonian:
    """The matrix B with a^dagger B a = H_L, in rad/s.

    ``nearest_neighbor`` keeps the pure NN part (no NNN, no disorder) for the
    destructive-interference check.
    """
    spec: LiebLatticeSpec
    entries: np.ndarray
    nearest_neighbor: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def gauge_transformed(self, chi: np.ndarray) -> "RealSpaceHamiltonian":
        """Apply a_j -> exp(i*chi_j) a_j, i.e. U B U^dagger with U = diag(exp(i*chi))."""
        chi = np.asarray(chi, dtype=float)
        if chi.shape != (self.dim,):
            raise LatticeError(f"Gauge vector has shape {chi.shape}, expected ({self.dim},).")
        u = np.exp(1j * chi)
        return RealSpaceHamiltonian(
            spec=self.spec,
            entries=u[:, None] * self.entries * np.conj(u)[None, :],
            nearest_neighbor=u[:, None] * self.nearest_neighbor * np.conj(u)[None, :],
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Single-photon amplitudes P_{r,alpha} over all sites (dimensionless)."""
    amplitudes: np.ndarray
    nx: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def support(self, tol: float = 1e-12) -> Tuple[SiteIndex, ...]:
        """Sites carrying a non-negligible amplitude, in flat-index order."""
        scale = max(float(np.max(np.abs(self.amplitudes), initial=0.0)), 1.0)
        idx = np.flatnonzero(np.abs(self.amplitudes) > tol * scale)
        return tuple(SiteIndex.from_flat(int(i), self.nx) for i in idx)


class RingModeKind(Enum):
    """Compact zero-energy ring states.

    RM1 circles one plaquette, RM2 is the difference of two neighbouring RM1
    states, RM3 circles a 3x1 strip whose enclosed flux is 2*pi at theta = pi/3.
    """
    RM1 = "RM1"
    RM2 = "RM2"
    RM3 = "RM3"

    @classmethod
    def parse(cls, value: str) -> "RingModeKind":
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise LatticeError(f"Unknown ring mode '{value}'. Use RM1, RM2 or RM3.")
