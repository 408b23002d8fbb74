import pathlib
import subprocess
import sys

import pytest

REPO = pathlib.Path(__file__).resolve().parent.parent.parent
PRESETS = REPO / "presets"


def dimergate(*argv):
    """Run the simulator CLI as a subprocess (the CSV files are the interface)."""
    proc = subprocess.run([sys.executable, "-m", "dimergate", *argv],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def preset_csvs(tmp_path_factory):
    """The three standard CSVs produced from the bundled presets."""
    out = tmp_path_factory.mktemp("csv")
    eigen = out / "eigen.csv"
    spectrum = out / "spectrum.csv"
    traces = out / "traces.csv"
    dimergate("eigen", "--config", str(PRESETS / "fig1a.cfg"),
              "--out", str(eigen), "--quiet")
    dimergate("spectrum", "--config", str(PRESETS / "fig2.cfg"),
              "--delta-eps", "320", "--out", str(spectrum), "--quiet")
    dimergate("gate", "cnot", "--config", str(PRESETS / "fig3a.cfg"),
              "--stride", "0.025", "--out", str(traces), "--quiet")
    return {"eigen": eigen, "spectrum": spectrum, "traces": traces}
