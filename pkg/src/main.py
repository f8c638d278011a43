"""Command-line front end.

Every command reads the layered config, applies flag overrides on top of it,
runs one experiment and writes its data files into ``run.output_dir``.
Service progress lines go to stderr; stdout carries exactly one summary line.
"""

import argparse
import contextlib
import dataclasses
import math
import os
import sys
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .models.config import Config, ConfigError
from .models.lattice import Boundary, LatticeError, RingModeKind, SiteIndex, Sublattice
from .models.pump import PumpKind
from .services import band_service, export_service, hofstadter_service, lattice_builder, noise_service
from .services import steady_state_service
from .services.band_service import BandError
from .services.circuit_service import EigenmodeError, solve_eigenmodes, validate_params
from .services.export_service import ExportError
from .services.hofstadter_service import HofstadterError
from .services.steady_state_service import SteadyStateError
from .utils.units import angular_to_ghz, angular_to_mhz, ghz_to_angular, mhz_to_angular
from .version import __version__

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_CONFIG = 2

SOLVER_ERRORS = (
    LatticeError, BandError, HofstadterError, SteadyStateError, EigenmodeError, ExportError,
    ValueError,
)

SCHEMAS = """\
output files:
  bands.csv            kx, ky, E_minus_MHz, E_zero_MHz, E_plus_MHz
  butterfly.csv        theta_over_pi, eigen_index, energy_MHz
  sspn.csv             m, n, sublattice, re_a, im_a, sspn
  locfactor.csv        tbc_dc_MHz, lf_single, lf_rm1, lf_rm2, lf_rm3
  ringmodes.csv        kind, m, n, sublattice, re, im
  hamiltonian_coo.csv  row, col, re, im   (rad/s)
  circuit_report.json  eigenfrequencies, ESR table, phi/phi0, T_dc, T_parametric, omega_p
  noise_report.json    flux and critical-current budgets (MHz)
"""

# flag dest -> (section, key)
OVERRIDES: Dict[str, tuple] = {
    "output_dir": ("run", "output_dir"),
    "workers": ("run", "workers"),
    "nx": ("lattice", "nx"),
    "ny": ("lattice", "ny"),
    "T": ("lattice", "T_MHz"),
    "tprime": ("lattice", "tprime_MHz"),
    "theta": ("lattice", "theta_over_pi"),
    "boundary": ("lattice", "boundary"),
    "disorder": ("lattice", "disorder_MHz"),
    "seed": ("lattice", "disorder_seed"),
    "nk": ("bands", "nk"),
    "kind": ("pump", "kind"),
    "anchor_m": ("pump", "anchor_m"),
    "anchor_n": ("pump", "anchor_n"),
    "tp": ("pump", "T_P_MHz"),
    "kappa": ("pump", "kappa_MHz"),
    "detuning": ("pump", "detuning_MHz"),
    "points": ("butterfly", "theta_points"),
    "theta_max": ("butterfly", "theta_max_over_pi"),
    "window": ("butterfly", "window_MHz"),
    "dim_cap": ("butterfly", "dim_cap"),
    "tbc_from": ("sweep", "tbc_from_MHz"),
    "tbc_to": ("sweep", "tbc_to_MHz"),
    "sweep_points": ("sweep", "points"),
    "delta": ("sweep", "delta_GHz"),
    "I_J": ("circuit", "I_J_uA"),
    "Phi_dc": ("circuit", "Phi_dc_Phi0"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatband-studio",
        description="Flat-band Lieb-lattice simulator: bands, Hofstadter spectra, "
                    "driven-dissipative steady states and circuit eigenmodes.",
        epilog=SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="settings file replacing the user override layer")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--workers", type=int)

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--nx", type=int)
    lattice.add_argument("--ny", type=int)
    lattice.add_argument("--T", type=float, help="nearest-neighbour hopping T/2pi (MHz)")
    lattice.add_argument("--tprime", type=float, help="NNN strength t'/2pi (MHz)")
    lattice.add_argument("--theta", type=float, help="gauge phase per row in units of pi")
    lattice.add_argument("--boundary", choices=[b.value for b in Boundary])
    lattice.add_argument("--disorder", type=float, help="on-site disorder half-width (MHz)")
    lattice.add_argument("--seed", type=int)

    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("bands", parents=[common], help="Bloch bands on a k-grid -> bands.csv")
    p.add_argument("--nk", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--tprime", type=float)

    p = sub.add_parser("butterfly", parents=[common], help="open-boundary spectrum vs theta -> butterfly.csv")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--tprime", type=float)
    p.add_argument("--points", type=int, help="number of theta values")
    p.add_argument("--theta-max", dest="theta_max", type=float, help="last theta in units of pi")
    p.add_argument("--window", type=float, help="middle-cluster half window (MHz)")
    p.add_argument("--dim-cap", dest="dim_cap", type=int)

    pump_args = argparse.ArgumentParser(add_help=False)
    pump_args.add_argument("--anchor-m", dest="anchor_m", type=int)
    pump_args.add_argument("--anchor-n", dest="anchor_n", type=int)
    pump_args.add_argument("--tp", type=float, help="pump strength T_P/2pi (MHz)")
    pump_args.add_argument("--kappa", type=float, help="decay rate kappa/2pi (MHz)")
    pump_args.add_argument("--detuning", type=float, help="pump detuning Omega_P/2pi (MHz)")

    p = sub.add_parser("steady", parents=[common, lattice, pump_args], help="steady state of one pump -> sspn.csv")
    p.add_argument("--kind", choices=[k.value for k in PumpKind])

    p = sub.add_parser("sweep", parents=[common, lattice, pump_args],
                       help="localization factor vs T_BC -> locfactor.csv")
    p.add_argument("--tbc-from", dest="tbc_from", type=float, help="first T_BC/2pi (MHz)")
    p.add_argument("--tbc-to", dest="tbc_to", type=float, help="last T_BC/2pi (MHz)")
    p.add_argument("--points", dest="sweep_points", type=int)
    p.add_argument("--delta", type=float, help="detuning Delta/2pi (GHz)")

    sub.add_parser("ringmodes", parents=[common, lattice, pump_args],
                   help="RM1/RM2/RM3 amplitudes and residuals -> ringmodes.csv, hamiltonian_coo.csv")

    p = sub.add_parser("circuit", parents=[common], help="TLR+SQUID eigenmodes and couplings -> circuit_report.json")
    p.add_argument("--I-J", dest="I_J", type=float, help="effective critical current (uA)")
    p.add_argument("--Phi-dc", dest="Phi_dc", type=float, help="d.c. flux bias (Phi0)")

    p = sub.add_parser("noise", parents=[common], help="1/f disturbance budget -> noise_report.json")
    p.add_argument("--I-J", dest="I_J", type=float)
    p.add_argument("--Phi-dc", dest="Phi_dc", type=float)
    return parser


def apply_overrides(config: Config, args: argparse.Namespace):
    """Copy every flag that was given onto its config key."""
    for dest, (section, key) in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            config.set_setting(section, key, value)


# ------------------------------------------------------------------ commands

def _output_path(config: Config, name: str) -> str:
    directory = export_service.ensure_output_dir(config.get_str("run", "output_dir"))
    return os.path.join(directory, name)


def run_bands(config: Config, args: argparse.Namespace) -> str:
    nk = config.get_int("bands", "nk")
    T = mhz_to_angular(config.get_float("lattice", "T_MHz"))
    tprime = mhz_to_angular(config.get_float("lattice", "tprime_MHz"))
    surface = band_service.band_grid(nk, T, tprime, config.workers())
    export_service.write_bands_csv(surface, _output_path(config, "bands.csv"))
    width, ratio = band_service.flatness(surface, 1)
    return f"middle band width: {angular_to_mhz(width):.3f} MHz (ratio {ratio:.3e})"


def run_butterfly(config: Config, args: argparse.Namespace) -> str:
    nx = config.get_int("butterfly", "nx") if args.nx is None else args.nx
    ny = config.get_int("butterfly", "ny") if args.ny is None else args.ny
    T = mhz_to_angular(config.get_float("lattice", "T_MHz"))
    tprime = mhz_to_angular(config.get_float("lattice", "tprime_MHz"))
    thetas = hofstadter_service.theta_grid(config.get_int("butterfly", "theta_points"),
                                           math.pi * config.get_float("butterfly", "theta_max_over_pi"))
    spectrum = hofstadter_service.butterfly(nx, ny, T, tprime, thetas,
                                            dim_cap=config.get_int("butterfly", "dim_cap"),
                                            workers=config.workers())
    export_service.write_butterfly_csv(spectrum, _output_path(config, "butterfly.csv"))
    widths = hofstadter_service.middle_cluster_width(spectrum, mhz_to_angular(config.get_float("butterfly", "window_MHz")))
    return (f"{len(thetas)} theta points, dim {spectrum.spec.dim}, "
            f"max middle-cluster width: {angular_to_mhz(float(widths.max())):.3f} MHz")


def _lattice_for(config: Config, kind: PumpKind, theta_given: bool):
    """The configured lattice; RM3 moves to theta = pi/3 unless --theta was set."""
    spec = config.lattice_spec()
    if kind is PumpKind.RM3 and not theta_given and spec.gauge_theta != lattice_builder.RM3_THETA:
        print(f"[SteadyState] RM3 pump: using theta = pi/3 instead of {spec.gauge_theta / math.pi:.4g} pi")
        spec = dataclasses.replace(spec, gauge_theta=lattice_builder.RM3_THETA)
    return spec


def run_steady(config: Config, args: argparse.Namespace) -> str:
    pump = config.pump_settings()
    spec = _lattice_for(config, pump.kind, getattr(args, "theta", None) is not None)
    h = lattice_builder.build_lieb(spec)
    cfg = steady_state_service.make_pump(pump.kind, pump.anchor, pump.T_P, spec, pump.kappa, pump.detuning)
    result = steady_state_service.steady_state(h, cfg)
    export_service.write_sspn_csv(result, spec, _output_path(config, "sspn.csv"))
    lf = steady_state_service.localization_factor(result, cfg, spec)
    return (f"{pump.kind.value} pump: localization factor {lf:.6f}, "
            f"total photons {result.total_photons:.6e}, residual {result.residual:.3e} rad/s")


def run_sweep(config: Config, args: argparse.Namespace) -> str:
    pump = config.pump_settings()
    spec = config.lattice_spec()
    points = config.get_int("sweep", "points")
    if points < 1:
        raise ConfigError(f"sweep.points must be >= 1, got {points}")
    grid = np.linspace(mhz_to_angular(config.get_float("sweep", "tbc_from_MHz")),
                       mhz_to_angular(config.get_float("sweep", "tbc_to_MHz")), points)
    delta = config.get_float("sweep", "delta_GHz")
    if not delta > 0.0:
        raise ConfigError(f"sweep.delta_GHz must be positive, got {delta}")

    rows = steady_state_service.localization_sweep(grid, ghz_to_angular(delta), spec, pump.anchor,
                                                   pump.T_P, pump.kappa, pump.detuning,
                                                   workers=config.workers())
    export_service.write_locfactor_csv(rows, _output_path(config, "locfactor.csv"))
    single = [row.factors[PumpKind.SINGLE_B] for row in rows]
    ring = [min(row.factors[k] for k in (PumpKind.RM1, PumpKind.RM2, PumpKind.RM3)) for row in rows]
    ordered = all(r > s for r, s in zip(ring, single))
    return (f"{len(rows)} points, LF(RM1) first row {rows[0].factors[PumpKind.RM1]:.6f}, "
            f"RM above single_B at every point: {'yes' if ordered else 'no'}")


def run_ringmodes(config: Config, args: argparse.Namespace) -> str:
    pump = config.pump_settings()
    base = config.lattice_spec()
    anchor = SiteIndex(pump.anchor.m, pump.anchor.n, Sublattice.A)

    states = {}
    residuals = []
    for kind in RingModeKind:
        theta = lattice_builder.RM3_THETA if kind is RingModeKind.RM3 else 0.0
        spec = dataclasses.replace(base, gauge_theta=theta, disorder=None)
        state = lattice_builder.ring_mode(kind, anchor, spec)
        states[kind.value] = state
        residual = lattice_builder.interference_residual(state, lattice_builder.build_lieb(spec))
        scale = spec.hopping_T if spec.hopping_T > 0.0 else 1.0
        residuals.append(f"{kind.value}={residual / scale:.2e}")

    export_service.write_ringmodes_csv(states, _output_path(config, "ringmodes.csv"))
    export_service.write_coordinate_list(lattice_builder.build_lieb(base), _output_path(config, "hamiltonian_coo.csv"))
    return "ring-mode residuals (units of T): " + ", ".join(residuals)


def _solve_circuit(config: Config):
    params = config.circuit_params()
    warnings = validate_params(params)
    return params, warnings, solve_eigenmodes(params)


def run_circuit(config: Config, args: argparse.Namespace) -> str:
    params, warnings, sol = _solve_circuit(config)
    _, _, operating_T = config.noise_settings()
    report = export_service.circuit_report(sol, params, config.circuit_delta(), operating_T, warnings)
    export_service.write_json(report, _output_path(config, "circuit_report.json"))
    freqs = ", ".join(f"{m}={angular_to_ghz(sol.omega[m]):.3f}" for m in ("A", "B", "C"))
    return f"eigenfrequencies (GHz): {freqs}; omega_p/2pi = {report['plasma_frequency_GHz']:.1f} GHz"


def run_noise(config: Config, args: argparse.Namespace) -> str:
    params, _, sol = _solve_circuit(config)
    flux, current, operating_T = config.noise_settings()
    budget = noise_service.noise_budget(sol, params, flux, current, operating_T)
    resolve = noise_service.flux_shift_by_resolve(params, budget["flux"]["range_bound"])
    report = export_service.noise_report(budget, resolve, operating_T)
    export_service.write_json(report, _output_path(config, "noise_report.json"))
    return (f"flux: max delta_omega/2pi {report['flux']['max_delta_omega_MHz']:.3e} MHz; "
            f"critical current: max delta_omega/2pi {report['critical_current']['max_delta_omega_MHz']:.3e} MHz")


COMMANDS: Dict[str, Callable[[Config, argparse.Namespace], str]] = {
    "bands": run_bands,
    "butterfly": run_butterfly,
    "steady": run_steady,
    "sweep": run_sweep,
    "ringmodes": run_ringmodes,
    "circuit": run_circuit,
    "noise": run_noise,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the flatband-studio CLI. Returns the process exit code."""
    args = build_parser().parse_args(argv)
    stdout = sys.stdout
    try:
        with contextlib.redirect_stdout(sys.stderr):
            config = Config(config_path=args.config)
            apply_overrides(config, args)
            summary = COMMANDS[args.command](config, args)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SOLVER_ERRORS as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_SOLVER
    print(summary, file=stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
