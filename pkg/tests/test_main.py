"""End-to-end tests of the CLI, driven in-process through ``main(argv)``.

The bundled config/settings.json is used as-is; the user layer is redirected
to an empty temp dir so a developer's own settings cannot leak in.
"""

import json
import re

import pytest

from src.main import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main
from src.services import band_service
from src.services.export_service import read_csv


@pytest.fixture
def run(user_config_dir, tmp_path, capsys):
    """Run one command into a fresh output dir; returns (code, stdout, stderr, out_dir)."""
    counter = {"n": 0}

    def _run(*argv):
        counter["n"] += 1
        out_dir = tmp_path / f"out{counter['n']}"
        code = main(list(argv) + ["--output-dir", str(out_dir)])
        captured = capsys.readouterr()
        return code, captured.out, captured.err, out_dir

    return _run


# ------------------------------------------------------------------ lattice commands

class TestLatticeCommands:
    def test_bands_without_nnn_is_flat(self, run):
        code, out, _, out_dir = run("bands", "--nk", "65", "--tprime", "0")
        assert code == EXIT_OK
        assert "middle band width: 0.000 MHz" in out
        assert len(read_csv(str(out_dir / "bands.csv"))) == 65 * 65

    def test_bands_with_nnn(self, run):
        code, out, _, _ = run("bands", "--nk", "33")
        assert code == EXIT_OK
        # default t' = 0.6 MHz spreads the middle sheet over 4t'
        assert "middle band width: 2.400 MHz" in out

    def test_reruns_are_byte_identical(self, run):
        _, _, _, first = run("bands", "--nk", "9")
        _, _, _, second = run("bands", "--nk", "9")
        assert (first / "bands.csv").read_bytes() == (second / "bands.csv").read_bytes()

    def test_butterfly(self, run):
        code, out, _, out_dir = run("butterfly", "--nx", "3", "--ny", "3", "--points", "5")
        assert code == EXIT_OK
        assert out.startswith("5 theta points, dim 27")
        assert len(read_csv(str(out_dir / "butterfly.csv"))) == 5 * 27

    def test_butterfly_dimension_cap_is_a_solver_error(self, run):
        code, out, err, _ = run("butterfly", "--nx", "2", "--ny", "2", "--dim-cap", "10")
        assert code == EXIT_SOLVER
        assert out == ""
        assert "HofstadterError" in err

    def test_ringmodes(self, run):
        code, out, _, out_dir = run("ringmodes")
        assert code == EXIT_OK
        assert out.startswith("ring-mode residuals (units of T): RM1=")
        kinds = [r["kind"] for r in read_csv(str(out_dir / "ringmodes.csv"))]
        assert kinds.count("RM1") == 4
        assert kinds.count("RM3") == 8
        assert (out_dir / "hamiltonian_coo.csv").exists()


# ------------------------------------------------------------------ pumping

class TestPumping:
    def test_ring_pump_stays_dark(self, run):
        code, out, err, out_dir = run("steady", "--nx", "6", "--ny", "6", "--anchor-m", "3",
                                      "--anchor-n", "3", "--tprime", "0", "--kind", "RM1")
        assert code == EXIT_OK
        assert "localization factor 1.000000" in out
        assert len(read_csv(str(out_dir / "sspn.csv"))) == 108
        # progress lines go to stderr, stdout keeps the summary only
        assert "[Export] Wrote sspn.csv" in err
        assert "[Export]" not in out

    def test_rm3_moves_to_its_flux(self, run):
        code, out, err, _ = run("steady", "--nx", "8", "--ny", "6", "--anchor-m", "2", "--anchor-n", "2",
                                "--tprime", "0", "--kind", "RM3")
        assert code == EXIT_OK
        assert "theta = pi/3" in err
        assert "localization factor 1.000000" in out

    def test_rm3_with_explicit_wrong_theta_fails(self, run):
        code, _, err, _ = run("steady", "--nx", "8", "--ny", "6", "--anchor-m", "2", "--anchor-n", "2",
                              "--kind", "RM3", "--theta", "0")
        assert code == EXIT_SOLVER
        assert "SteadyStateError" in err

    def test_pump_outside_lattice(self, run):
        code, _, err, _ = run("steady", "--anchor-m", "12", "--anchor-n", "12")
        assert code == EXIT_SOLVER
        assert "SteadyStateError" in err

    def test_sweep(self, run):
        code, out, _, out_dir = run("sweep", "--nx", "8", "--ny", "8", "--anchor-m", "4", "--anchor-n", "4",
                                    "--tbc-from", "0", "--tbc-to", "5", "--points", "2")
        assert code == EXIT_OK
        assert "LF(RM1) first row 1.000000" in out
        assert out.rstrip().endswith("yes")
        rows = read_csv(str(out_dir / "locfactor.csv"))
        assert [float(r["tbc_dc_MHz"]) for r in rows] == [0.0, 5.0]


# ------------------------------------------------------------------ circuit

class TestCircuitCommands:
    def test_circuit_report(self, run):
        code, out, _, out_dir = run("circuit")
        assert code == EXIT_OK
        match = re.search(r"A=([\d.]+), B=([\d.]+), C=([\d.]+)", out)
        assert match is not None
        assert [float(x) for x in match.groups()] == pytest.approx([11.0, 9.0, 15.0], rel=0.02)
        report = json.loads((out_dir / "circuit_report.json").read_text())
        assert report["T_dc_MHz"]["BC"] == pytest.approx(64.1, rel=0.1)
        assert report["fourth_order_ratio"] < 1e-5

    def test_circuit_flag_overrides(self, run):
        code, _, err, out_dir = run("circuit", "--I-J", "45")
        assert code == EXIT_OK
        assert "[Circuit] Warning" in err
        report = json.loads((out_dir / "circuit_report.json").read_text())
        assert report["warnings"]

    def test_noise_report(self, run):
        code, out, _, out_dir = run("noise")
        assert code == EXIT_OK
        assert out.startswith("flux: max delta_omega/2pi")
        report = json.loads((out_dir / "noise_report.json").read_text())
        assert set(report) >= {"flux", "critical_current", "flux_resolve_delta_omega_MHz"}
        assert report["flux"]["range_bound"] == pytest.approx(5e-5)


# ------------------------------------------------------------------ configuration

class TestConfiguration:
    def test_ill_typed_value_exits_with_config_code(self, run, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"lattice": {"nx": "twelve"}}))
        code, out, err, _ = run("steady", "--config", str(path))
        assert code == EXIT_CONFIG
        assert out == ""
        assert "lattice.nx" in err

    def test_missing_config_file(self, run, tmp_path):
        code, _, err, _ = run("bands", "--config", str(tmp_path / "absent.json"))
        assert code == EXIT_CONFIG
        assert "not found" in err

    def test_config_file_feeds_the_run(self, run, tmp_path):
        path = tmp_path / "small.json"
        path.write_text(json.dumps({"bands": {"nk": 5}, "lattice": {"tprime_MHz": 0.0}}))
        code, out, _, out_dir = run("bands", "--config", str(path))
        assert code == EXIT_OK
        assert len(read_csv(str(out_dir / "bands.csv"))) == 25

    def test_unknown_choice_rejected_by_parser(self, user_config_dir):
        with pytest.raises(SystemExit) as exc:
            main(["steady", "--kind", "RM7"])
        assert exc.value.code == 2

    def test_malformed_config_file_exits_with_config_code(self, run, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ not json")
        code, out, err, out_dir = run("bands", "--nk", "4", "--config", str(path))
        assert code == EXIT_CONFIG
        assert out == ""
        assert "bad.json" in err
        assert not (out_dir / "bands.csv").exists()

    def test_misspelled_key_in_config_file_is_named(self, run, tmp_path):
        path = tmp_path / "typo.json"
        path.write_text(json.dumps({"lattice": {"T_Mhz": 25.0}}))
        code, out, err, _ = run("bands", "--nk", "4", "--config", str(path))
        assert code == EXIT_CONFIG
        assert out == ""
        assert "lattice.T_Mhz" in err


# ------------------------------------------------------------------ solver errors

class TestSolverErrors:
    def test_value_error_from_a_model_exits_with_solver_code(self, run, monkeypatch):
        def failing_grid(*args, **kwargs):
            raise ValueError("kappa must be positive")

        monkeypatch.setattr(band_service, "band_grid", failing_grid)
        code, out, err, _ = run("bands", "--nk", "4")
        assert code == EXIT_SOLVER
        assert out == ""
        assert "ValueError: kappa must be positive" in err
