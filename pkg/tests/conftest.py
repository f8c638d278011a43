"""Shared pytest fixtures for the Flatband Studio test suite.

Everything under test is pure logic (``src/models`` and ``src/services``) plus
the CLI driven in-process through ``main(argv)``. Frequencies are handled in
rad/s throughout; fixtures take readable MHz values and convert them.
"""

import json
import os

import pytest

from src.utils.units import mhz_to_angular


@pytest.fixture
def bundled_config_dir(tmp_path):
    """An empty bundled-config directory (ships with the sources, read-only in prod)."""
    d = tmp_path / "bundled_config"
    d.mkdir()
    return str(d)


@pytest.fixture
def user_config_dir(tmp_path, monkeypatch):
    """Redirect Config's user-config directory to a temp dir.

    ``Config`` imports ``get_user_config_dir`` into its own module namespace,
    so we patch it there. FLATBAND_STUDIO_CONFIG is cleared so a developer's
    environment cannot leak into the tests.
    """
    d = tmp_path / "user_config"
    d.mkdir()
    monkeypatch.setattr(
        "src.models.config.get_user_config_dir", lambda: str(d)
    )
    monkeypatch.delenv("FLATBAND_STUDIO_CONFIG", raising=False)
    return str(d)


@pytest.fixture
def make_config(bundled_config_dir, user_config_dir):
    """Factory that builds a Config against isolated temp dirs.

    Optionally seed bundled/user ``settings.json`` before construction so the
    merge paths can be exercised.
    """
    from src.models.config import Config

    def _write(directory, name, data):
        if data is not None:
            with open(os.path.join(directory, name), "w") as f:
                json.dump(data, f)

    def _build(bundled_settings=None, user_settings=None, config_path=None):
        _write(bundled_config_dir, "settings.json", bundled_settings)
        _write(user_config_dir, "settings.json", user_settings)
        return Config(config_dir=bundled_config_dir, config_path=config_path)

    return _build


@pytest.fixture
def make_spec():
    """Factory for small lattices; strengths are given in MHz."""
    from src.models.lattice import Boundary, LiebLatticeSpec

    def _make(nx=4, ny=4, T_mhz=10.0, theta=0.0, tprime_mhz=0.0, boundary=Boundary.OPEN, disorder=None):
        return LiebLatticeSpec(
            nx=nx,
            ny=ny,
            hopping_T=mhz_to_angular(T_mhz),
            gauge_theta=theta,
            nnn_tprime=mhz_to_angular(tprime_mhz),
            boundary=boundary,
            disorder=disorder,
        )

    return _make


def _representative_cell():
    from src.models.circuit import CircuitParams

    return CircuitParams(
        l=4.1e-7,
        c=1.6e-10,
        L_A=5.6e-3,
        L_B=6.8e-3,
        L_C=4.1e-3,
        I_J0=75.5e-6,
        Phi_dc=0.37,
        I_J=30e-6,
        C_J=500e-15,
        Phi_ac_CA=0.013,
        Phi_ac_BA=0.009,
    )


@pytest.fixture
def cell_params():
    """Representative circuit parameters of one TLR unit cell."""
    return _representative_cell()


@pytest.fixture(scope="session")
def default_solution():
    """Eigenmodes for the representative parameters, solved once per session."""
    from src.services.circuit_service import solve_eigenmodes

    return solve_eigenmodes(_representative_cell())

