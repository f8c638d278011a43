"""Driven-dissipative steady state of the pumped lattice.

The mean field obeys [B - (Omega_P + i*kappa/2) I] <a> + P = 0. With kappa > 0
and Hermitian B the shifted matrix is never singular, so a dense LU solve is
all that is needed at the sizes used here.
"""

import dataclasses
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from ..models.lattice import LatticeError, LiebLatticeSpec, RealSpaceHamiltonian, RingModeKind, SiteIndex, Sublattice
from ..models.pump import PumpConfig, PumpKind, SteadyStateResult
from ..utils.parallel import ordered_map
from ..utils.units import angular_to_mhz
from .band_service import nnn_strength
from .lattice_builder import RM3_THETA, build_lieb, ring_mode

# Relative residual above which a solve is rejected.
RESIDUAL_TOLERANCE = 1e-10

# Cells are counted as neighbours of the pump support when they share an edge.
VON_NEUMANN_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))

SWEEP_KINDS = (PumpKind.SINGLE_B, PumpKind.RM1, PumpKind.RM2, PumpKind.RM3)


class SteadyStateError(Exception):
    """Raised for dimension mismatches, singular systems and empty LF regions."""


def make_pump(kind: PumpKind, anchor: SiteIndex, T_P: float, spec: LiebLatticeSpec,
              kappa: float, detuning: float = 0.0) -> PumpConfig:
    """Pump vector for one of the four pumping schemes, scaled by T_P (rad/s)."""
    if not isinstance(kind, PumpKind):
        kind = PumpKind.parse(kind)

    try:
        if kind is PumpKind.SINGLE_B:
            site = SiteIndex(anchor.m, anchor.n, Sublattice.B)
            vector = np.zeros(spec.dim, dtype=complex)
            vector[spec.index(site)] = T_P
        else:
            state = ring_mode(RingModeKind(kind.value), anchor, spec)
            vector = T_P * state.amplitudes
    except LatticeError as e:
        raise SteadyStateError(f"Cannot place {kind.value} pump: {e}") from e

    scale = max(float(np.max(np.abs(vector), initial=0.0)), 1e-300)
    idx = np.flatnonzero(np.abs(vector) > 1e-12 * scale)
    support = tuple(SiteIndex.from_flat(int(i), spec.nx) for i in idx)
    return PumpConfig(pump=vector, detuning_OmegaP=detuning, kappa=kappa, support=support, kind=kind)


def steady_state(h: RealSpaceHamiltonian, cfg: PumpConfig) -> SteadyStateResult:
    """Solve for <a>; the relative residual is checked before returning."""
    pump = np.asarray(cfg.pump, dtype=complex)
    if pump.shape != (h.dim,):
        raise SteadyStateError(f"Pump has length {pump.shape[0]}, lattice dimension is {h.dim}.")

    shifted = h.entries - (cfg.detuning_OmegaP + 0.5j * cfg.kappa) * np.eye(h.dim)
    try:
        lu, piv = lu_factor(shifted, check_finite=True)
        amplitudes = lu_solve((lu, piv), -pump)
    except (LinAlgError, ValueError) as e:
        raise SteadyStateError(f"Steady-state system is singular: {e}") from e

    residual = float(np.linalg.norm(shifted @ amplitudes + pump))
    pump_norm = float(np.linalg.norm(pump))
    if not np.all(np.isfinite(amplitudes)):
        raise SteadyStateError("Steady-state solve produced non-finite amplitudes.")
    if pump_norm > 0.0 and residual > RESIDUAL_TOLERANCE * pump_norm:
        raise SteadyStateError(
            f"Steady-state residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:g} x |P| = "
            f"{RESIDUAL_TOLERANCE * pump_norm:.3e}."
        )

    return SteadyStateResult(amplitudes=amplitudes, sspn=np.abs(amplitudes) ** 2, residual=residual)


def neighborhood_cells(support: Sequence[SiteIndex], spec: LiebLatticeSpec) -> Set[Tuple[int, int]]:
    """Cells holding pump sites plus their edge-sharing neighbours (wrapped when periodic)."""
    cells: Set[Tuple[int, int]] = set()
    for site in support:
        cells.add(site.cell)
        for dm, dn in VON_NEUMANN_STEPS:
            neighbor = spec.wrap(site.m + dm, site.n + dn)
            if neighbor is not None:
                cells.add(neighbor)
    return cells


def localization_factor(result: SteadyStateResult, cfg: PumpConfig, spec: LiebLatticeSpec) -> float:
    """SSPN on the pump sites over SSPN on the pump cells and their four neighbour cells."""
    if not cfg.support:
        raise SteadyStateError("Pump has no support; localization factor is undefined.")

    numerator = float(sum(result.sspn[spec.index(s)] for s in cfg.support))
    region = neighborhood_cells(cfg.support, spec)
    denominator = 0.0
    for m, n in sorted(region):
        for sub in Sublattice:
            denominator += float(result.sspn[spec.index(SiteIndex(m, n, sub))])

    if denominator <= 0.0:
        raise SteadyStateError("No photons in the pump neighbourhood; localization factor is undefined.")
    return numerator / denominator


@dataclass(frozen=True)
class SweepRow:
    tbc_dc: float
    tprime: float
    factors: Dict[PumpKind, float]


def localization_sweep(tbc_dc_grid: Sequence[float], delta: float, base_spec: LiebLatticeSpec,
                       anchor: SiteIndex, T_P: float, kappa: float, detuning: float = 0.0,
                       kinds: Sequence[PumpKind] = SWEEP_KINDS, workers: int = 1) -> List[SweepRow]:
    """Localization factor per pump kind as t' = T_BC^2/(3 Delta) grows.

    RM3 runs on a copy of the lattice at theta = pi/3; the other schemes use
    ``base_spec``'s gauge.
    """
    grid = [float(x) for x in tbc_dc_grid]
    if not grid:
        raise SteadyStateError("Sweep grid is empty.")

    def point(tbc: float) -> SweepRow:
        tprime = nnn_strength(tbc, delta)
        factors: Dict[PumpKind, float] = {}
        built: Dict[float, Tuple[LiebLatticeSpec, RealSpaceHamiltonian]] = {}
        for kind in kinds:
            theta = RM3_THETA if kind is PumpKind.RM3 else base_spec.gauge_theta
            if theta not in built:
                spec = dataclasses.replace(base_spec, gauge_theta=theta, nnn_tprime=tprime)
                built[theta] = (spec, build_lieb(spec))
            spec, h = built[theta]
            cfg = make_pump(kind, anchor, T_P, spec, kappa, detuning)
            factors[kind] = localization_factor(steady_state(h, cfg), cfg, spec)
        return SweepRow(tbc_dc=tbc, tprime=tprime, factors=factors)

    rows = ordered_map(point, grid, workers)
    for row in rows:
        summary = ", ".join(f"{k.value}={v:.4f}" for k, v in row.factors.items())
        print(f"[SteadyState] T_BC/2pi={angular_to_mhz(row.tbc_dc):.3f} MHz: {summary}")
    return rows


def dark_state_amplitudes(cfg: PumpConfig) -> Optional[np.ndarray]:
    """-2iP/kappa, the exact response when P is a zero mode and Omega_P = 0."""
    if cfg.detuning_OmegaP != 0.0:
        return None
    return -2j * np.asarray(cfg.pump) / cfg.kappa
