"""Real-space Lieb lattice construction and ring-mode states.

Pure numpy/scipy, no I/O. The builder walks the bond list once and writes each
amplitude together with its conjugate, so the matrix is Hermitian by
construction rather than symmetrized afterwards.

Gauge: an eastward hop across a horizontal half-bond in row ``n`` picks up the
phase ``-theta*n`` (vector potential -theta*n e_x); vertical bonds carry none.
Counterclockwise flux through every plaquette is then +2*theta.
"""

import dataclasses
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from ..models.lattice import (
    HoppingTerm,
    LatticeError,
    LiebLatticeSpec,
    RealSpaceHamiltonian,
    RingModeKind,
    SiteIndex,
    StateVector,
    Sublattice,
)

A, B, C = Sublattice.A, Sublattice.B, Sublattice.C

# Plaquettes in the strip that hosts the magnetic ring mode; 3 * (2*pi/3) = 2*pi.
RM3_STRIP_PLAQUETTES = 3
RM3_THETA = math.pi / 3

# Relative singular-value cutoff when extracting ring zero modes.
NULL_SPACE_RCOND = 1e-10

# Periodic-gauge consistency tolerance on theta*ny/pi being an integer.
FLUX_QUANTUM_TOL = 1e-9

# On-site spread, in units of T, above which build_lieb warns.
DISORDER_WARNING = 0.1


def _east_phase(theta: float, row: int) -> float:
    return -theta * row


def hopping_terms(spec: LiebLatticeSpec) -> List[HoppingTerm]:
    """Every bond of the lattice, once, in a fixed cell-major order.

    Nearest-neighbour bonds leave from A sites; next-nearest channels run along
    the (1, 1) diagonal between like sublattices (+t' for C, -t' for B).
    """
    theta = spec.gauge_theta
    terms: List[HoppingTerm] = []

    for n in range(1, spec.ny + 1):
        for m in range(1, spec.nx + 1):
            a = SiteIndex(m, n, A)

            # West half-bond, same cell: hopping A -> B runs westward.
            terms.append(HoppingTerm(a, SiteIndex(m, n, B), spec.hopping_T,
                                     -_east_phase(theta, n)))

            east = spec.wrap(m + 1, n)
            if east is not None:
                terms.append(HoppingTerm(a, SiteIndex(east[0], east[1], B), spec.hopping_T,
                                         _east_phase(theta, n)))

            terms.append(HoppingTerm(a, SiteIndex(m, n, C), spec.hopping_T, 0.0))

            south = spec.wrap(m, n - 1)
            if south is not None:
                terms.append(HoppingTerm(a, SiteIndex(south[0], south[1], C), spec.hopping_T, 0.0))

    if spec.nnn_tprime > 0.0:
        for n in range(1, spec.ny + 1):
            for m in range(1, spec.nx + 1):
                diag = spec.wrap(m + 1, n + 1)
                if diag is None:
                    continue
                terms.append(HoppingTerm(SiteIndex(m, n, C), SiteIndex(diag[0], diag[1], C),
                                         spec.nnn_tprime, 0.0, nearest_neighbor=False))
                terms.append(HoppingTerm(SiteIndex(m, n, B), SiteIndex(diag[0], diag[1], B),
                                         -spec.nnn_tprime, 0.0, nearest_neighbor=False))
    return terms


def _check_flux_quantization(spec: LiebLatticeSpec):
    """Landau gauge on a torus: the row-ny -> row-1 seam must see flux 2*theta too."""
    if not spec.periodic or spec.gauge_theta == 0.0:
        return
    turns = spec.gauge_theta * spec.ny / math.pi
    if abs(turns - round(turns)) > FLUX_QUANTUM_TOL:
        raise LatticeError(
            f"Periodic boundary with theta={spec.gauge_theta:.6g} rad on {spec.ny} rows: "
            f"2*theta*ny is not a multiple of 2*pi, the gauge does not close on the torus."
        )


def build_lieb(spec: LiebLatticeSpec) -> RealSpaceHamiltonian:
    """Assemble the Hermitian hopping matrix (rad/s) for ``spec``."""
    _check_flux_quantization(spec)

    dim = spec.dim
    full = np.zeros((dim, dim), dtype=complex)
    nearest = np.zeros((dim, dim), dtype=complex)

    for term in hopping_terms(spec):
        i = spec.index(term.source)
        j = spec.index(term.target)
        amp = term.amplitude
        full[j, i] += amp
        full[i, j] += amp.conjugate()
        if term.nearest_neighbor:
            nearest[j, i] += amp
            nearest[i, j] += amp.conjugate()

    if spec.disorder is not None:
        onsite = np.asarray(spec.disorder, dtype=float)
        spread = float(np.max(np.abs(onsite), initial=0.0))
        if spec.hopping_T > 0.0 and spread > DISORDER_WARNING * spec.hopping_T:
            print(f"[LatticeBuilder] Warning: on-site disorder up to {spread / spec.hopping_T:.3g} T "
                  f"exceeds {DISORDER_WARNING:g} T.")
        full[np.diag_indices(dim)] += onsite

    return RealSpaceHamiltonian(spec=spec, entries=full, nearest_neighbor=nearest)


def draw_disorder(nx: int, ny: int, half_width: float, seed: Optional[int] = None) -> Tuple[float, ...]:
    """Uniform on-site detunings in [-half_width, half_width] (rad/s), reproducible by seed."""
    if half_width < 0.0:
        raise LatticeError(f"Disorder half-width must be >= 0, got {half_width}.")
    rng = np.random.default_rng(seed)
    return tuple(float(x) for x in rng.uniform(-half_width, half_width, size=3 * nx * ny))


# ------------------------------------------------------------------ plaquettes

def _plaquette_loop(spec: LiebLatticeSpec, anchor: SiteIndex) -> List[SiteIndex]:
    """Counterclockwise loop of 8 sites around the plaquette whose lower-left corner is A_anchor."""
    m, n = anchor.m, anchor.n
    if not spec.contains_cell(m, n):
        raise LatticeError(f"Plaquette anchor {anchor.label()} is outside the lattice.")

    cells = {
        "ll": (m, n),
        "lr": spec.wrap(m + 1, n),
        "ur": spec.wrap(m + 1, n + 1),
        "ul": spec.wrap(m, n + 1),
    }
    if any(c is None for c in cells.values()):
        raise LatticeError(f"Plaquette at {anchor.label()} touches the open edge; bonds are missing.")

    ll, lr, ur, ul = cells["ll"], cells["lr"], cells["ur"], cells["ul"]
    loop = [
        SiteIndex(ll[0], ll[1], A),
        SiteIndex(lr[0], lr[1], B),
        SiteIndex(lr[0], lr[1], A),
        SiteIndex(lr[0], lr[1], C),
        SiteIndex(ur[0], ur[1], A),
        SiteIndex(ur[0], ur[1], B),
        SiteIndex(ul[0], ul[1], A),
        SiteIndex(ll[0], ll[1], C),
    ]
    if len(set(loop)) != len(loop):
        raise LatticeError("Lattice is too small for a plaquette with eight distinct sites.")
    return loop


def plaquette_flux(h: RealSpaceHamiltonian, plaquette_anchor: SiteIndex) -> float:
    """Gauge-invariant flux through one plaquette, wrapped into (-pi, pi]."""
    spec = h.spec
    loop = _plaquette_loop(spec, plaquette_anchor)

    product = complex(1.0, 0.0)
    for here, there in zip(loop, loop[1:] + loop[:1]):
        value = h.entries[spec.index(there), spec.index(here)]
        if abs(value) == 0.0:
            raise LatticeError(
                f"Missing bond {here.label()} -> {there.label()} around plaquette "
                f"{plaquette_anchor.label()}."
            )
        product *= value / abs(value)

    flux = math.atan2(product.imag, product.real)
    if flux <= -math.pi:
        flux += 2.0 * math.pi
    return flux


# ------------------------------------------------------------------ ring modes

def _require_cells(spec: LiebLatticeSpec, anchor: SiteIndex, width: int, height: int, what: str):
    for dm in range(width + 1):
        for dn in range(height + 1):
            if not spec.contains_cell(anchor.m + dm, anchor.n + dn):
                raise LatticeError(
                    f"{what} anchored at ({anchor.m},{anchor.n}) needs cells up to "
                    f"({anchor.m + width},{anchor.n + height}); lattice is {spec.nx}x{spec.ny}."
                )


def _state_from(spec: LiebLatticeSpec, weights: Dict[SiteIndex, complex]) -> StateVector:
    amplitudes = np.zeros(spec.dim, dtype=complex)
    for site, value in weights.items():
        amplitudes[spec.index(site)] += value
    return StateVector(amplitudes=amplitudes, nx=spec.nx)


def strip_ring_sites(anchor: SiteIndex, width: int) -> Tuple[List[SiteIndex], List[SiteIndex]]:
    """(ring B/C sites, corner A sites) around a ``width`` x 1 strip of plaquettes."""
    x0, y0 = anchor.m, anchor.n
    ring = [SiteIndex(x0, y0, C), SiteIndex(x0 + width, y0, C)]
    for k in range(1, width + 1):
        ring.append(SiteIndex(x0 + k, y0, B))
        ring.append(SiteIndex(x0 + k, y0 + 1, B))
    corners = [SiteIndex(x0 + k, y0 + dy, A) for dy in (0, 1) for k in range(width + 1)]
    return ring, corners


def strip_zero_modes(spec: LiebLatticeSpec, anchor: SiteIndex, width: int) -> np.ndarray:
    """Null space of the corner-from-ring block of a ``width`` x 1 plaquette strip.

    Columns are zero modes living on the strip boundary (order of
    ``strip_ring_sites``). Empty when the enclosed flux is not a multiple of 2*pi.
    """
    if width < 1:
        raise LatticeError(f"Strip width must be >= 1, got {width}.")
    _require_cells(spec, anchor, width, 1, f"{width}x1 plaquette strip")

    unit = dataclasses.replace(spec, hopping_T=1.0, nnn_tprime=0.0, disorder=None)
    matrix = build_lieb(unit).nearest_neighbor
    ring, corners = strip_ring_sites(anchor, width)
    rows = [unit.index(s) for s in corners]
    cols = [unit.index(s) for s in ring]
    block = matrix[np.ix_(rows, cols)]
    return null_space(block, rcond=NULL_SPACE_RCOND)


def _fix_global_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate so the first sizeable component is real and positive."""
    pivot = vector[np.argmax(np.abs(vector) > 1e-8)]
    return vector * (abs(pivot) / pivot)


def ring_mode(kind: RingModeKind, anchor: SiteIndex, spec: LiebLatticeSpec) -> StateVector:
    """Unit-norm ring state anchored at the lower-left cell ``anchor``."""
    kind = RingModeKind.parse(kind.value if isinstance(kind, RingModeKind) else kind)
    x0, y0 = anchor.m, anchor.n

    if kind is RingModeKind.RM1:
        _require_cells(spec, anchor, 1, 1, "RM1")
        half = 0.5
        return _state_from(spec, {
            SiteIndex(x0, y0, C): half,
            SiteIndex(x0 + 1, y0, B): -half,
            SiteIndex(x0 + 1, y0, C): half,
            SiteIndex(x0 + 1, y0 + 1, B): -half,
        })

    if kind is RingModeKind.RM2:
        _require_cells(spec, anchor, 2, 1, "RM2")
        w = 1.0 / math.sqrt(6.0)
        return _state_from(spec, {
            SiteIndex(x0, y0, C): w,
            SiteIndex(x0 + 2, y0, C): -w,
            SiteIndex(x0 + 1, y0, B): -w,
            SiteIndex(x0 + 1, y0 + 1, B): -w,
            SiteIndex(x0 + 2, y0, B): w,
            SiteIndex(x0 + 2, y0 + 1, B): w,
        })

    if abs(spec.gauge_theta - RM3_THETA) > 1e-12:
        raise LatticeError(
            f"RM3 lives at theta = pi/3; lattice has theta = {spec.gauge_theta / math.pi:.6g}*pi."
        )
    modes = strip_zero_modes(spec, anchor, RM3_STRIP_PLAQUETTES)
    if modes.shape[1] != 1:
        raise LatticeError(f"Expected one RM3 zero mode, found {modes.shape[1]}.")
    ring, _ = strip_ring_sites(anchor, RM3_STRIP_PLAQUETTES)
    vector = _fix_global_phase(modes[:, 0])
    vector = vector / np.linalg.norm(vector)
    return _state_from(spec, dict(zip(ring, vector)))


# ------------------------------------------------------------------ interference

def interference_residual(state: StateVector, h: RealSpaceHamiltonian) -> float:
    """||H_NN . state||; zero means the state satisfies the destructive-interference condition."""
    amplitudes = np.asarray(state.amplitudes)
    if amplitudes.shape != (h.dim,):
        raise LatticeError(f"State has length {amplitudes.shape[0]}, Hamiltonian dimension is {h.dim}.")
    return float(np.linalg.norm(h.nearest_neighbor @ amplitudes))


def neighbor_sums(state: StateVector, spec: LiebLatticeSpec) -> np.ndarray:
    """Phase-weighted sum of neighbour amplitudes at every site, straight from the bond list.

    A state is a flat-band (zero-energy) state exactly when every entry vanishes.
    """
    amplitudes = np.asarray(state.amplitudes, dtype=complex)
    if amplitudes.shape != (spec.dim,):
        raise LatticeError(f"State has length {amplitudes.shape[0]}, lattice has {spec.dim} sites.")
    sums = np.zeros(spec.dim, dtype=complex)
    for term in hopping_terms(spec):
        if not term.nearest_neighbor:
            continue
        i = spec.index(term.source)
        j = spec.index(term.target)
        amp = term.amplitude
        sums[j] += amp * amplitudes[i]
        sums[i] += amp.conjugate() * amplitudes[j]
    return sums


def single_site_state(site: SiteIndex, spec: LiebLatticeSpec) -> StateVector:
    return _state_from(spec, {site: 1.0})
