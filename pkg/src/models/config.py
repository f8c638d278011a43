import copy
import json
import math
import os
from typing import Any, Dict, Optional, Tuple

from ..utils.paths import get_config_dir, get_env_config_path, get_user_config_dir
from ..utils.units import ghz_to_angular, hz_to_angular, mhz_to_angular
from .circuit import CircuitParams, NoiseSpec
from .lattice import Boundary, LatticeError, LiebLatticeSpec, SiteIndex, Sublattice
from .pump import PumpKind, PumpSettings


class ConfigError(Exception):
    """A missing or ill-typed configuration value; the message names ``section.key``."""


class Config:
    """Layered settings: bundled defaults, then a user override file.

    The override layer is, in order of precedence, an explicit ``config_path``,
    the file named by FLATBAND_STUDIO_CONFIG, or ``settings.json`` in the
    per-user config directory. Merging happens per section so keys added to the
    bundled file still reach users with an older override.
    """

    def __init__(self, config_dir: Optional[str] = None, config_path: Optional[str] = None):
        # Bundled config directory (ships with the sources, read-only)
        self.bundled_config_dir = config_dir if config_dir else get_config_dir()
        self.user_config_dir = get_user_config_dir()
        self.override_path = config_path or get_env_config_path()

        self.settings: Dict[str, Dict[str, Any]] = {}
        self.load_settings()

    def load_settings(self):
        """Merge bundled defaults with the override layer, section by section.

        An explicit override file must parse and may only name known keys. The
        implicit per-user file is lenient: problems are reported and skipped.
        """
        bundled_path = os.path.join(self.bundled_config_dir, "settings.json")
        strict = bool(self.override_path)
        if strict:
            if not os.path.exists(self.override_path):
                raise ConfigError(f"Config file not found: {self.override_path}")
            user_path = self.override_path
        else:
            user_path = os.path.join(self.user_config_dir, "settings.json")

        bundled = self._read_json(bundled_path) or self._get_default_settings()
        user = self._read_json(user_path, strict=strict) or {}
        user = self._check_keys(user, strict)

        merged = copy.deepcopy(bundled)
        for section, values in user.items():
            if isinstance(values, dict) and isinstance(merged.get(section), dict):
                merged[section] = {**merged[section], **values}
            else:
                merged[section] = values
        self.settings = merged

    def _read_json(self, path: str, strict: bool = False) -> Optional[dict]:
        """Read a JSON object; None if missing, or if invalid and not ``strict``."""
        if not os.path.exists(path):
            return None
        name = os.path.basename(path)
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            if strict:
                raise ConfigError(f"{path} is not valid JSON: {e}") from e
            print(f"[Config] Error loading {name}: {e}")
            return None
        if not isinstance(data, dict):
            if strict:
                raise ConfigError(f"{path}: top level must be an object")
            print(f"[Config] Ignoring {name}: top level must be an object.")
            return None
        return data

    def _check_keys(self, user: Dict[str, Any], strict: bool) -> Dict[str, Any]:
        """Drop (or, when ``strict``, reject) sections and keys the simulator never reads."""
        known = self._get_default_settings()
        kept: Dict[str, Any] = {}
        for section, values in user.items():
            if section not in known:
                if strict:
                    raise ConfigError(f"Unknown section '{section}'")
                print(f"[Config] Ignoring unknown section '{section}'.")
                continue
            if not isinstance(values, dict):
                if strict:
                    raise ConfigError(f"Section '{section}' must be an object, got {values!r}")
                print(f"[Config] Ignoring section '{section}': not an object.")
                continue
            section_values = {}
            for key, value in values.items():
                if key not in known[section]:
                    if strict:
                        raise ConfigError(f"Unknown key '{section}.{key}'")
                    print(f"[Config] Ignoring unknown key '{section}.{key}'.")
                    continue
                section_values[key] = value
            kept[section] = section_values
        return kept

    # ========== Raw access ==========

    def get_setting(self, section: str, key: str, default=None):
        return self.settings.get(section, {}).get(key, default)

    def set_setting(self, section: str, key: str, value):
        self.settings.setdefault(section, {})[key] = value

    def _require(self, section: str, key: str) -> Any:
        values = self.settings.get(section)
        if not isinstance(values, dict) or key not in values:
            raise ConfigError(f"Missing configuration key {section}.{key}")
        return values[key]

    def get_float(self, section: str, key: str) -> float:
        value = self._require(section, key)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{section}.{key} must be a finite number, got {value!r}")
        return float(value)

    def get_int(self, section: str, key: str) -> int:
        value = self._require(section, key)
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
        return value

    def get_str(self, section: str, key: str) -> str:
        value = self._require(section, key)
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key} must be a string, got {value!r}")
        return value

    def get_optional_int(self, section: str, key: str) -> Optional[int]:
        if self.get_setting(section, key) is None:
            return None
        return self.get_int(section, key)

    # ========== Typed accessors ==========

    def lattice_spec(self) -> LiebLatticeSpec:
        """The configured lattice, with seeded on-site disorder when ``disorder_MHz`` > 0."""
        nx = self.get_int("lattice", "nx")
        ny = self.get_int("lattice", "ny")
        boundary_text = self.get_str("lattice", "boundary")
        try:
            boundary = Boundary.parse(boundary_text)
        except (ValueError, LatticeError) as e:
            raise ConfigError(f"lattice.boundary: {e}") from e

        theta = math.pi * self.get_float("lattice", "theta_over_pi")
        if theta != 0.0:
            theta = math.fmod(theta, 2.0 * math.pi)
            theta = theta + 2.0 * math.pi if theta < 0.0 else theta

        disorder = None
        half_width = self.get_float("lattice", "disorder_MHz")
        if half_width < 0.0:
            raise ConfigError(f"lattice.disorder_MHz must be >= 0, got {half_width}")
        if half_width > 0.0 and nx >= 1 and ny >= 1:
            from ..services.lattice_builder import draw_disorder
            disorder = draw_disorder(nx, ny, mhz_to_angular(half_width),
                                     self.get_optional_int("lattice", "disorder_seed"))

        try:
            return LiebLatticeSpec(
                nx=nx,
                ny=ny,
                hopping_T=mhz_to_angular(self.get_float("lattice", "T_MHz")),
                gauge_theta=theta,
                nnn_tprime=mhz_to_angular(self.get_float("lattice", "tprime_MHz")),
                boundary=boundary,
                disorder=disorder,
            )
        except LatticeError as e:
            raise ConfigError(f"lattice: {e}") from e

    def pump_settings(self) -> PumpSettings:
        try:
            kind = PumpKind.parse(self.get_str("pump", "kind"))
        except ValueError as e:
            raise ConfigError(f"pump.kind: {e}") from e
        kappa = mhz_to_angular(self.get_float("pump", "kappa_MHz"))
        if not kappa > 0.0:
            raise ConfigError(f"pump.kappa_MHz must be positive, got {self.get_float('pump', 'kappa_MHz')}")
        anchor = SiteIndex(self.get_int("pump", "anchor_m"), self.get_int("pump", "anchor_n"), Sublattice.A)
        return PumpSettings(
            kind=kind,
            anchor=anchor,
            T_P=mhz_to_angular(self.get_float("pump", "T_P_MHz")),
            kappa=kappa,
            detuning=mhz_to_angular(self.get_float("pump", "detuning_MHz")),
        )

    def circuit_params(self) -> CircuitParams:
        def get(key: str) -> float:
            return self.get_float("circuit", key)

        return CircuitParams(
            l=get("l_H_per_m"),
            c=get("c_F_per_m"),
            L_A=get("L_A_mm") * 1e-3,
            L_B=get("L_B_mm") * 1e-3,
            L_C=get("L_C_mm") * 1e-3,
            I_J0=get("I_J0_uA") * 1e-6,
            Phi_dc=get("Phi_dc_Phi0"),
            I_J=get("I_J_uA") * 1e-6,
            C_J=get("C_J_fF") * 1e-15,
            Phi_ac_CA=get("Phi_ac_CA_Phi0"),
            Phi_ac_BA=get("Phi_ac_BA_Phi0"),
            theta_CA=get("theta_CA_rad"),
            theta_BA=get("theta_BA_rad"),
        )

    def circuit_delta(self) -> float:
        """Detuning Delta between neighbouring TLR frequencies (rad/s)."""
        return ghz_to_angular(self.get_float("circuit", "delta_GHz"))

    def noise_settings(self) -> Tuple[NoiseSpec, NoiseSpec, float]:
        """(flux spectrum in Phi0, relative critical-current spectrum, operating hopping in rad/s)."""
        omega_min = hz_to_angular(self.get_float("noise", "omega_min_Hz"))
        omega_max = hz_to_angular(self.get_float("noise", "omega_max_Hz"))
        try:
            flux = NoiseSpec(A_O=self.get_float("noise", "A_flux_Phi0"), omega_min=omega_min, omega_max=omega_max)
            current = NoiseSpec(A_O=self.get_float("noise", "A_current_rel"), omega_min=omega_min, omega_max=omega_max)
        except ValueError as e:
            raise ConfigError(f"noise: {e}") from e
        return flux, current, mhz_to_angular(self.get_float("noise", "operating_T_MHz"))

    def workers(self) -> int:
        workers = self.get_int("run", "workers")
        if workers < 1:
            raise ConfigError(f"run.workers must be >= 1, got {workers}")
        return workers

    @staticmethod
    def _get_default_settings() -> Dict[str, Dict[str, Any]]:
        """Representative circuit values and the 12x12 pumping experiment."""
        return {
            "lattice": {
                "nx": 12,
                "ny": 12,
                "T_MHz": 10.0,
                "theta_over_pi": 0.0,
                "tprime_MHz": 0.6,
                "boundary": "open",
                "disorder_MHz": 0.0,
                "disorder_seed": None,
            },
            "pump": {
                "kind": "RM1",
                "anchor_m": 6,
                "anchor_n": 6,
                "T_P_MHz": 1.0,
                "kappa_MHz": 0.1,
                "detuning_MHz": 0.0,
            },
            "bands": {"nk": 64},
            "butterfly": {
                "nx": 12,
                "ny": 12,
                "theta_points": 201,
                "theta_max_over_pi": 1.0,
                "dim_cap": 5000,
                "window_MHz": 1.5,
            },
            "sweep": {
                "tbc_from_MHz": 0.0,
                "tbc_to_MHz": 80.0,
                "points": 17,
                "delta_GHz": 2.0,
            },
            "circuit": {
                "l_H_per_m": 4.1e-7,
                "c_F_per_m": 1.6e-10,
                "L_A_mm": 5.6,
                "L_B_mm": 6.8,
                "L_C_mm": 4.1,
                "I_J0_uA": 75.5,
                "Phi_dc_Phi0": 0.37,
                "I_J_uA": 30.0,
                "C_J_fF": 500.0,
                "Phi_ac_CA_Phi0": 0.013,
                "Phi_ac_BA_Phi0": 0.009,
                "theta_CA_rad": 0.0,
                "theta_BA_rad": 0.0,
                "delta_GHz": 2.0,
            },
            "noise": {
                "omega_min_Hz": 1.0,
                "omega_max_Hz": 1e9,
                "A_flux_Phi0": 1e-5,
                "A_current_rel": 1e-6,
                "operating_T_MHz": 10.0,
            },
            "run": {"output_dir": "output", "workers": 1},
        }
