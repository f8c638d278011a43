"""Tests for src/services/export_service.py: file formats and byte-for-byte determinism."""

import json
import math

import numpy as np
import pytest

from src.models.circuit import NoiseSpec
from src.models.lattice import RingModeKind, SiteIndex
from src.models.pump import PumpKind
from src.services import export_service
from src.services.band_service import band_grid
from src.services.export_service import ExportError, read_csv
from src.services.hofstadter_service import butterfly
from src.services.lattice_builder import build_lieb, ring_mode
from src.services.noise_service import noise_budget
from src.services.steady_state_service import SweepRow, make_pump, steady_state
from src.utils.units import format_float, ghz_to_angular, mhz_to_angular

T = mhz_to_angular(10.0)


class TestFormat:
    def test_twelve_significant_digits(self):
        assert format_float(1.0) == "1.00000000000e+00"
        assert format_float(-0.0) == "0.00000000000e+00"
        assert format_float(math.nan) == "nan"


# ------------------------------------------------------------------ CSV products

class TestCsvWriters:
    def test_bands_rows_and_header(self, tmp_path):
        path = export_service.write_bands_csv(band_grid(4, T), str(tmp_path / "bands.csv"))
        rows = read_csv(path)
        assert len(rows) == 16
        assert list(rows[0]) == list(export_service.BANDS_COLUMNS)
        assert float(rows[0]["kx"]) == 0.0
        # (0, 0): -2*sqrt(2)*T in MHz
        assert float(rows[0]["E_minus_MHz"]) == pytest.approx(-20 * math.sqrt(2), rel=1e-9)

    def test_identical_inputs_identical_bytes(self, tmp_path):
        first = export_service.write_bands_csv(band_grid(6, T, mhz_to_angular(0.6)), str(tmp_path / "a.csv"))
        second = export_service.write_bands_csv(band_grid(6, T, mhz_to_angular(0.6)), str(tmp_path / "b.csv"))
        with open(first, "rb") as f1, open(second, "rb") as f2:
            assert f1.read() == f2.read()

    def test_butterfly_long_format(self, tmp_path):
        spectrum = butterfly(2, 2, T, 0.0, [0.0, math.pi / 2])
        rows = read_csv(export_service.write_butterfly_csv(spectrum, str(tmp_path / "butterfly.csv")))
        assert len(rows) == 2 * 12
        assert float(rows[-1]["theta_over_pi"]) == pytest.approx(0.5)
        assert rows[-1]["eigen_index"] == "11"

    def test_sspn_one_row_per_site(self, tmp_path, make_spec):
        spec = make_spec(nx=3, ny=3)
        cfg = make_pump(PumpKind.RM1, SiteIndex(1, 1), mhz_to_angular(1.0), spec, mhz_to_angular(0.1))
        result = steady_state(build_lieb(spec), cfg)
        rows = read_csv(export_service.write_sspn_csv(result, spec, str(tmp_path / "sspn.csv")))
        assert len(rows) == spec.dim
        assert (rows[1]["m"], rows[1]["n"], rows[1]["sublattice"]) == ("1", "1", "B")
        total = sum(float(r["sspn"]) for r in rows)
        assert total == pytest.approx(result.total_photons, rel=1e-9)

    def test_locfactor_marks_missing_kinds(self, tmp_path):
        row = SweepRow(tbc_dc=mhz_to_angular(20.0), tprime=0.0,
                       factors={PumpKind.SINGLE_B: 0.4, PumpKind.RM1: 0.99})
        rows = read_csv(export_service.write_locfactor_csv([row], str(tmp_path / "lf.csv")))
        assert float(rows[0]["tbc_dc_MHz"]) == pytest.approx(20.0)
        assert float(rows[0]["lf_rm1"]) == pytest.approx(0.99)
        assert rows[0]["lf_rm3"] == "nan"

    def test_coordinate_list_holds_both_triangles(self, tmp_path, make_spec):
        h = build_lieb(make_spec(nx=2, ny=2))
        rows = read_csv(export_service.write_coordinate_list(h, str(tmp_path / "coo.csv")))
        # 12 bonds on an open 2x2 lattice
        assert len(rows) == 24
        pairs = {(int(r["row"]), int(r["col"])) for r in rows}
        assert all((c, r) in pairs for r, c in pairs)
        assert np.count_nonzero(h.entries) == len(rows)

    def test_ringmodes_support_only(self, tmp_path, make_spec):
        spec = make_spec()
        states = {"RM1": ring_mode(RingModeKind.RM1, SiteIndex(1, 1), spec),
                  "RM2": ring_mode(RingModeKind.RM2, SiteIndex(1, 1), spec)}
        rows = read_csv(export_service.write_ringmodes_csv(states, str(tmp_path / "rm.csv")))
        assert [r["kind"] for r in rows].count("RM1") == 4
        assert [r["kind"] for r in rows].count("RM2") == 6

    def test_unwritable_targets(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ExportError):
            export_service.ensure_output_dir(str(blocker))
        with pytest.raises(ExportError):
            export_service.write_bands_csv(band_grid(2, T), str(tmp_path))


# ------------------------------------------------------------------ JSON reports

class TestReports:
    def test_json_sorted_and_json_safe(self, tmp_path):
        path = export_service.write_json({"b": np.float64(1.5), "a": [math.inf, np.int64(2)]},
                                         str(tmp_path / "r.json"))
        text = open(path, encoding="utf-8").read()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": ["inf", 2], "b": 1.5}

    def test_circuit_report(self, default_solution, cell_params):
        report = export_service.circuit_report(default_solution, cell_params, ghz_to_angular(2.0), T)
        assert report["eigenfrequencies_GHz"]["A"] == pytest.approx(11.0, rel=0.02)
        assert set(report["T_dc_MHz"]) == {"AB", "AC", "BC"}
        assert report["esr"]["C"]["C"] > 0.99
        assert report["plasma_over_2delta"] > 30
        assert report["Phi_ac_for_operating_T_Phi0"]["CA"] == pytest.approx(0.0362, rel=0.1)
        assert report["warnings"] == []
        json.dumps(report)

    def test_noise_report_in_mhz(self, default_solution, cell_params):
        spectrum = NoiseSpec(A_O=1e-5, omega_min=2 * math.pi, omega_max=2 * math.pi * 1e9)
        current = NoiseSpec(A_O=1e-6, omega_min=2 * math.pi, omega_max=2 * math.pi * 1e9)
        budget = noise_budget(default_solution, cell_params, spectrum, current, T)
        report = export_service.noise_report(budget, {"A": -1.0, "B": -1.0, "C": -1.0}, T)
        flux = report["flux"]
        assert flux["max_delta_omega_over_T"] == pytest.approx(
            budget["flux"]["max_delta_omega"] / T, rel=1e-12
        )
        assert flux["max_delta_omega_MHz"] == pytest.approx(budget["flux"]["max_delta_omega"] / T * 10.0, rel=1e-9)
        assert set(report["flux_resolve_delta_omega_MHz"]) == {"A", "B", "C"}
