import json
import os
import pathlib

import numpy as np
import pytest

from dimergate.cli import (
    Config,
    ConfigError,
    main,
    parse_config,
    parse_config_text,
    parse_provenance,
)

REPO = pathlib.Path(__file__).resolve().parent.parent
PRESETS = REPO / "presets"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"

MINIMAL = """
delta_minus_mhz = 2320
delta_plus_half_mhz = 0
v12_mhz = 950
gamma12_mhz = 9
delta_eps_mhz = 0
ell1_mhz = 50
ell2_mhz = 50
gamma1_mhz = 50
gamma2_mhz = 50
"""


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.params.delta_minus == 2320.0
        assert cfg.params.v12 == 950.0
        assert cfg.sweep is None and cfg.geometry is None

    def test_fig2_preset(self):
        cfg = parse_config(str(PRESETS / "fig2.cfg"))
        p = cfg.params
        assert (p.gamma1, p.gamma2, p.gamma12) == (50.0, 50.0, 9.0)
        assert p.delta_minus == 2320.0 and p.v12 == 950.0
        assert cfg.sweep.variable == "delta_plus_half"
        assert cfg.sweep.points == 401

    def test_cp_bound_violation(self):
        text = MINIMAL.replace("gamma12_mhz = 9", "gamma12_mhz = 60")
        with pytest.raises(ConfigError, match="positivity"):
            parse_config_text(text)

    def test_empty_file_lists_required_keys(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("")
        for key in ("delta_minus_mhz", "ell1_mhz", "gamma2_mhz", "v12_mhz"):
            assert key in str(err.value)

    def test_unknown_key_names_line(self):
        with pytest.raises(ConfigError, match=":2: unknown key 'typo_mhz'"):
            parse_config_text("# comment\ntypo_mhz = 1\n" + MINIMAL)

    def test_malformed_number_names_line(self):
        bad = MINIMAL.replace("v12_mhz = 950", "v12_mhz = abc")
        with pytest.raises(ConfigError, match="cannot parse number 'abc'"):
            parse_config_text(bad)

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(MINIMAL + "\nv12_mhz = 1\n")

    def test_comments_and_blank_lines(self):
        cfg = parse_config_text(MINIMAL + "\n# trailing comment\n\n")
        assert cfg.params.ell1 == 50.0

    def test_geometry_fills_couplings(self):
        lam, n = 580.0, 1.5
        r12 = 0.1 * lam / (2 * np.pi * n)  # z = 0.1
        text = f"""
delta_minus_mhz = 2320
delta_plus_half_mhz = 0
delta_eps_mhz = 0
ell1_mhz = 0
ell2_mhz = 0
gamma1_mhz = 50
gamma2_mhz = 50
r12_nm = {r12!r}
n_index = {n}
lambda0_nm = {lam}
d1 = 1,0,0
d2 = 1,0,0
r12_axis = 0,0,1
"""
        cfg = parse_config_text(text)
        assert cfg.params.v12 == pytest.approx(150.0 / (8 * np.pi * 1e-3), rel=1e-12)
        assert cfg.params.gamma12 == pytest.approx(50.0)
        assert cfg.geometry is not None

    def test_incomplete_geometry_rejected(self):
        text = MINIMAL + "\nr12_nm = 10\n"
        with pytest.raises(ConfigError, match="incomplete geometry"):
            parse_config_text(text)

    def test_incomplete_sweep_rejected(self):
        text = MINIMAL + "\nsweep_var = delta_minus\n"
        with pytest.raises(ConfigError, match="incomplete sweep"):
            parse_config_text(text)

    def test_lines_round_trip(self):
        cfg = parse_config(str(PRESETS / "fig2.cfg"))
        again = parse_config_text("\n".join(cfg.lines()))
        assert again == cfg


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def sweep_cfg(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(MINIMAL + "\nsweep_var = delta_plus_half\n"
                    "sweep_start = -100\nsweep_stop = 100\nsweep_points = 9\n")
    return str(path)


class TestCliCommands:
    def test_eigen_csv(self, tmp_path, sweep_cfg):
        out = tmp_path / "eigen.csv"
        code = run_cli("eigen", "--config", sweep_cfg, "--out", str(out), "--quiet")
        assert code == 0
        lines = out.read_text().splitlines()
        header = [l for l in lines if not l.startswith("#")][0]
        assert header.startswith("delta_minus_mhz") or header.startswith("delta_plus_half_mhz")
        assert header.endswith("a11_4")
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == 9

    def test_provenance_round_trip(self, tmp_path, sweep_cfg):
        out = tmp_path / "spec.csv"
        assert run_cli("spectrum", "--config", sweep_cfg, "--out", str(out),
                       "--quiet") == 0
        recovered = parse_provenance(str(out))
        assert recovered == parse_config(sweep_cfg)

    def test_delta_eps_override_recorded(self, tmp_path, sweep_cfg):
        out = tmp_path / "spec.csv"
        assert run_cli("spectrum", "--config", sweep_cfg, "--delta-eps", "-320",
                       "--out", str(out), "--quiet") == 0
        recovered = parse_provenance(str(out))
        assert recovered.params.delta_eps == -320.0

    def test_json_format(self, tmp_path, sweep_cfg):
        out = tmp_path / "spec.json"
        assert run_cli("spectrum", "--config", sweep_cfg, "--out", str(out),
                       "--format", "json", "--quiet") == 0
        doc = json.loads(out.read_text())
        assert doc["columns"][0] == "delta_plus_half_mhz"
        assert len(doc["rows"]) == 9
        assert any("delta_minus_mhz" in line for line in doc["config"])

    def test_validation_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense = 1\n")
        out = tmp_path / "x.csv"
        assert run_cli("eigen", "--config", str(bad), "--out", str(out),
                       "--quiet") == 1
        assert not out.exists()

    def test_numerical_error_exit_code(self, tmp_path):
        # gamma = 0 makes the steady state degenerate: numerical failure
        cfg = tmp_path / "nodecay.cfg"
        cfg.write_text(MINIMAL.replace("gamma1_mhz = 50", "gamma1_mhz = 0")
                              .replace("gamma2_mhz = 50", "gamma2_mhz = 0")
                              .replace("gamma12_mhz = 9", "gamma12_mhz = 0")
                       + "\nsweep_var = delta_plus_half\nsweep_start = -10\n"
                         "sweep_stop = 10\nsweep_points = 5\n")
        out = tmp_path / "x.csv"
        assert run_cli("spectrum", "--config", str(cfg), "--out", str(out),
                       "--quiet") == 1  # caught at validation: no dissipation
        cfg2 = tmp_path / "dark.cfg"
        # nonzero but fully collective rates leave a dark steady-state manifold
        cfg2.write_text(MINIMAL.replace("delta_minus_mhz = 2320", "delta_minus_mhz = 0")
                               .replace("gamma12_mhz = 9", "gamma12_mhz = 50")
                               .replace("ell1_mhz = 50", "ell1_mhz = 0")
                               .replace("ell2_mhz = 50", "ell2_mhz = 0")
                        + "\nsweep_var = delta_plus_half\nsweep_start = -10\n"
                          "sweep_stop = 10\nsweep_points = 5\n")
        assert run_cli("spectrum", "--config", str(cfg2), "--out", str(out),
                       "--quiet") == 2
        assert not out.exists()

    def test_usage_error_exit_code(self):
        assert run_cli("eigen") == 1
        assert run_cli("frobnicate") == 1

    def test_evolve(self, tmp_path, sweep_cfg):
        out = tmp_path / "traj.csv"
        assert run_cli("evolve", "--config", sweep_cfg, "--t-final", "10",
                       "--stride", "1", "--out", str(out), "--quiet") == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "t_ns,p00,p01,p10,p11"
        assert len(lines) == 12

    def test_gate_cnot(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run_cli("gate", "cnot", "--config", str(PRESETS / "fig3a.cfg"),
                       "--out", str(out), "--stride", "0.125", "--quiet") == 0
        text = out.read_text()
        assert "# pulse_end_ns = 1.25" in text
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert lines[0] == "t_ns,p00,p01,p10,p11,fidelity"
        final = lines[-1].split(",")
        assert float(final[0]) == pytest.approx(1.25)
        assert 0.0 <= float(final[5]) <= 1.0

    def test_bell(self, tmp_path):
        out = tmp_path / "bell.csv"
        assert run_cli("bell", "--config", str(PRESETS / "fig3b.cfg"),
                       "--out", str(out), "--stride", "0.25", "--quiet") == 0
        text = out.read_text()
        assert "# pulse_end_ns = 7.5" in text
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert lines[0] == "t_ns,p00,p01,p10,p11,fidelity"

    def test_xy(self, tmp_path, sweep_cfg):
        out = tmp_path / "xy.json"
        assert run_cli("xy", "--config", sweep_cfg, "--out", str(out),
                       "--quiet") == 0
        doc = json.loads(out.read_text())
        assert doc["t_xy_ns"] == pytest.approx(125.0 / 950.0)
        gate = np.array(doc["unitary_re"]) + 1j * np.array(doc["unitary_im"])
        assert abs(abs(gate[2, 1]) - 1.0) < 1e-12

    def test_threads_env(self, tmp_path, sweep_cfg, monkeypatch):
        out = tmp_path / "a.csv"
        monkeypatch.setenv("DIMERGATE_THREADS", "2")
        assert run_cli("eigen", "--config", sweep_cfg, "--out", str(out),
                       "--quiet") == 0
        monkeypatch.setenv("DIMERGATE_THREADS", "oops")
        assert run_cli("eigen", "--config", sweep_cfg, "--out", str(out),
                       "--quiet") == 1

    def test_quiet_suppresses_progress(self, tmp_path, sweep_cfg, capsys):
        out = tmp_path / "a.csv"
        run_cli("eigen", "--config", sweep_cfg, "--out", str(out))
        assert "points" in capsys.readouterr().err
        run_cli("eigen", "--config", sweep_cfg, "--out", str(out), "--quiet")
        assert capsys.readouterr().err == ""


class TestGoldenRegression:
    """Byte-level regression against outputs of the first validated run."""

    def run_and_strip(self, tmp_path, golden_name, *argv):
        out = tmp_path / golden_name
        assert run_cli(*argv, "--out", str(out), "--quiet") == 0
        # the command line echoes tmp paths; compare everything after it
        lines = [l for l in out.read_text().splitlines()
                 if not l.startswith("# command:")]
        return "\n".join(lines) + "\n"

    @pytest.mark.parametrize("golden_name,argv", [
        ("eigen_mini.csv",
         ("eigen", "--config", str(GOLDEN / "mini_eigen.cfg"))),
        ("spectrum_mini.csv",
         ("spectrum", "--config", str(GOLDEN / "mini_spectrum.cfg"))),
        ("cnot_mini.csv",
         ("gate", "cnot", "--config", str(PRESETS / "fig3a.cfg"),
          "--stride", "0.125")),
    ])
    def test_golden(self, tmp_path, golden_name, argv):
        produced = self.run_and_strip(tmp_path, golden_name, *argv)
        golden_path = GOLDEN / golden_name
        assert golden_path.exists(), f"golden file missing: {golden_path}"
        assert produced == golden_path.read_text()


class TestAtomicWrites:
    def test_no_partial_file_on_midwrite_error(self, tmp_path, sweep_cfg,
                                               monkeypatch):
        out = tmp_path / "out.csv"
        import dimergate.cli as climod

        def bomb(path, content):
            raise RuntimeError("disk on fire")

        monkeypatch.setattr(climod, "_atomic_write", bomb)
        with pytest.raises(RuntimeError):
            run_cli("eigen", "--config", sweep_cfg, "--out", str(out), "--quiet")
        assert not out.exists()
        assert not list(tmp_path.glob(".dimergate-*"))
