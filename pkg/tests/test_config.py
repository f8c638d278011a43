"""Tests for src/models/config.py: layered settings and typed accessors."""

import json
import math

import pytest

from src.models.config import ConfigError
from src.models.lattice import Boundary, SiteIndex
from src.models.pump import PumpKind
from src.utils.units import mhz_to_angular


# --------------------------------------------------------------- settings merge

class TestSettingsMerge:
    def test_defaults_used_when_no_bundled_file(self, make_config):
        cfg = make_config()
        assert cfg.get_setting("lattice", "nx") == 12
        assert cfg.get_setting("circuit", "I_J0_uA") == 75.5
        assert cfg.get_setting("pump", "kind") == "RM1"

    def test_user_overrides_bundled_per_key(self, make_config):
        cfg = make_config(
            bundled_settings={"lattice": {"nx": 12, "ny": 12, "T_MHz": 10.0}},
            user_settings={"lattice": {"nx": 6}},
        )
        # user value wins, sibling keys of the same section survive
        assert cfg.get_setting("lattice", "nx") == 6
        assert cfg.get_setting("lattice", "ny") == 12
        assert cfg.get_setting("lattice", "T_MHz") == 10.0

    def test_new_bundled_section_reaches_old_user_file(self, make_config):
        cfg = make_config(
            bundled_settings={"lattice": {"nx": 12}, "noise": {"A_flux_Phi0": 1e-5}},
            user_settings={"lattice": {"nx": 3}},
        )
        assert cfg.get_setting("noise", "A_flux_Phi0") == 1e-5

    def test_invalid_user_json_is_ignored(self, make_config, user_config_dir):
        with open(f"{user_config_dir}/settings.json", "w") as f:
            f.write("{ not json")
        cfg = make_config()
        assert cfg.get_setting("lattice", "nx") == 12

    def test_unknown_section_is_reported(self, make_config, capsys):
        make_config(user_settings={"gui": {"theme": "dark"}})
        assert "Ignoring unknown section 'gui'" in capsys.readouterr().out

    def test_unknown_user_key_is_reported_and_dropped(self, make_config, capsys):
        cfg = make_config(user_settings={"lattice": {"T_Mhz": 25.0, "nx": 6}})
        assert "Ignoring unknown key 'lattice.T_Mhz'" in capsys.readouterr().out
        assert cfg.get_setting("lattice", "T_Mhz") is None
        assert cfg.get_int("lattice", "nx") == 6
        assert cfg.get_float("lattice", "T_MHz") == 10.0

    def test_get_and_set_setting(self, make_config):
        cfg = make_config()
        assert cfg.get_setting("lattice", "missing", "fallback") == "fallback"
        assert cfg.get_setting("nope", "missing") is None
        cfg.set_setting("pump", "kappa_MHz", 0.2)
        assert cfg.get_float("pump", "kappa_MHz") == 0.2


# --------------------------------------------------------------- override file

class TestOverrideFile:
    def test_explicit_path_replaces_user_layer(self, make_config, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"lattice": {"nx": 5}}))
        cfg = make_config(user_settings={"lattice": {"nx": 7}}, config_path=str(path))
        assert cfg.get_int("lattice", "nx") == 5

    def test_environment_variable_names_the_file(self, make_config, tmp_path, monkeypatch):
        path = tmp_path / "env.json"
        path.write_text(json.dumps({"pump": {"kind": "single_B"}}))
        monkeypatch.setenv("FLATBAND_STUDIO_CONFIG", str(path))
        cfg = make_config()
        assert cfg.pump_settings().kind is PumpKind.SINGLE_B

    def test_missing_override_file_raises(self, make_config, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            make_config(config_path=str(tmp_path / "absent.json"))

    def test_malformed_override_file_raises(self, make_config, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(ConfigError, match="broken.json"):
            make_config(config_path=str(path))

    def test_override_file_must_hold_an_object(self, make_config, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="top level"):
            make_config(config_path=str(path))

    def test_misspelled_key_in_override_file_is_named(self, make_config, tmp_path):
        path = tmp_path / "typo.json"
        path.write_text(json.dumps({"lattice": {"T_Mhz": 25.0}}))
        with pytest.raises(ConfigError, match=r"lattice\.T_Mhz"):
            make_config(config_path=str(path))

    def test_unknown_section_in_override_file_raises(self, make_config, tmp_path):
        path = tmp_path / "gui.json"
        path.write_text(json.dumps({"gui": {"theme": "dark"}}))
        with pytest.raises(ConfigError, match="gui"):
            make_config(config_path=str(path))


# --------------------------------------------------------------- typed access

class TestTypedAccess:
    def test_missing_key_names_section_and_key(self, make_config):
        cfg = make_config(bundled_settings={"lattice": {"nx": 4}})
        with pytest.raises(ConfigError, match=r"lattice\.ny"):
            cfg.get_int("lattice", "ny")

    def test_ill_typed_values_name_the_key(self, make_config):
        cfg = make_config(user_settings={"lattice": {"nx": "twelve", "T_MHz": True}})
        with pytest.raises(ConfigError, match=r"lattice\.nx"):
            cfg.get_int("lattice", "nx")
        with pytest.raises(ConfigError, match=r"lattice\.T_MHz"):
            cfg.get_float("lattice", "T_MHz")

    def test_integral_float_accepted_as_int(self, make_config):
        cfg = make_config(user_settings={"lattice": {"nx": 6.0}})
        assert cfg.get_int("lattice", "nx") == 6
        cfg.set_setting("lattice", "nx", 6.5)
        with pytest.raises(ConfigError):
            cfg.get_int("lattice", "nx")

    def test_optional_int(self, make_config):
        cfg = make_config()
        assert cfg.get_optional_int("lattice", "disorder_seed") is None
        cfg.set_setting("lattice", "disorder_seed", 11)
        assert cfg.get_optional_int("lattice", "disorder_seed") == 11

    def test_non_finite_float_rejected(self, make_config):
        cfg = make_config()
        cfg.set_setting("pump", "T_P_MHz", math.inf)
        with pytest.raises(ConfigError, match=r"pump\.T_P_MHz"):
            cfg.get_float("pump", "T_P_MHz")


# --------------------------------------------------------------- builders

class TestBuilders:
    def test_default_lattice(self, make_config):
        spec = make_config().lattice_spec()
        assert (spec.nx, spec.ny) == (12, 12)
        assert spec.hopping_T == pytest.approx(mhz_to_angular(10.0))
        assert spec.nnn_tprime == pytest.approx(mhz_to_angular(0.6))
        assert spec.boundary is Boundary.OPEN
        assert spec.disorder is None

    def test_theta_given_in_units_of_pi(self, make_config):
        spec = make_config(user_settings={"lattice": {"theta_over_pi": 1 / 3}}).lattice_spec()
        assert spec.gauge_theta == pytest.approx(math.pi / 3)

    def test_theta_wrapped_into_one_turn(self, make_config):
        spec = make_config(user_settings={"lattice": {"theta_over_pi": 2.5}}).lattice_spec()
        assert spec.gauge_theta == pytest.approx(0.5 * math.pi)

    def test_bad_boundary_is_a_config_error(self, make_config):
        cfg = make_config(user_settings={"lattice": {"boundary": "twisted"}})
        with pytest.raises(ConfigError, match=r"lattice\.boundary"):
            cfg.lattice_spec()

    def test_invalid_lattice_is_a_config_error(self, make_config):
        cfg = make_config(user_settings={"lattice": {"nx": 0}})
        with pytest.raises(ConfigError, match="lattice"):
            cfg.lattice_spec()

    def test_seeded_disorder_is_reproducible(self, make_config):
        settings = {"lattice": {"nx": 3, "ny": 3, "disorder_MHz": 0.5, "disorder_seed": 4}}
        first = make_config(user_settings=settings).lattice_spec()
        second = make_config(user_settings=settings).lattice_spec()
        assert first.disorder == second.disorder
        assert len(first.disorder) == 27
        assert max(abs(x) for x in first.disorder) <= mhz_to_angular(0.5)

    def test_negative_disorder_rejected(self, make_config):
        cfg = make_config(user_settings={"lattice": {"disorder_MHz": -1.0}})
        with pytest.raises(ConfigError, match="disorder_MHz"):
            cfg.lattice_spec()

    def test_pump_settings(self, make_config):
        pump = make_config().pump_settings()
        assert pump.kind is PumpKind.RM1
        assert pump.anchor == SiteIndex(6, 6)
        assert pump.kappa == pytest.approx(mhz_to_angular(0.1))
        assert pump.T_P == pytest.approx(mhz_to_angular(1.0))

    def test_unknown_pump_kind(self, make_config):
        cfg = make_config(user_settings={"pump": {"kind": "RM9"}})
        with pytest.raises(ConfigError, match=r"pump\.kind"):
            cfg.pump_settings()

    def test_non_positive_kappa(self, make_config):
        cfg = make_config(user_settings={"pump": {"kappa_MHz": 0.0}})
        with pytest.raises(ConfigError, match="kappa"):
            cfg.pump_settings()

    def test_circuit_params_in_si_units(self, make_config):
        p = make_config().circuit_params()
        assert p.L_A == pytest.approx(5.6e-3)
        assert p.I_J0 == pytest.approx(75.5e-6)
        assert p.C_J == pytest.approx(500e-15)
        assert p.Phi_dc == 0.37
        assert make_config().circuit_delta() == pytest.approx(2 * math.pi * 2e9)

    def test_noise_settings(self, make_config):
        flux, current, operating_T = make_config().noise_settings()
        assert flux.A_O == 1e-5
        assert current.A_O == 1e-6
        assert flux.omega_max / flux.omega_min == pytest.approx(1e9)
        assert operating_T == pytest.approx(mhz_to_angular(10.0))

    def test_bad_noise_cutoffs(self, make_config):
        cfg = make_config(user_settings={"noise": {"omega_min_Hz": 10.0, "omega_max_Hz": 1.0}})
        with pytest.raises(ConfigError, match="noise"):
            cfg.noise_settings()

    def test_workers_must_be_positive(self, make_config):
        assert make_config().workers() == 1
        with pytest.raises(ConfigError, match=r"run\.workers"):
            make_config(user_settings={"run": {"workers": 0}}).workers()
