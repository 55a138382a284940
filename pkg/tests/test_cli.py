import csv
import io
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from efimov import cli as cli_mod, core, hyperradial
from efimov.cli import OutputFormat, cli, format_number
from efimov.errors import SolverError


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


def _table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = next(reader)
    return header, [[float(v) for v in row] for row in reader]


def _run(runner, args, code=0):
    result = runner.invoke(cli, args)
    assert result.exit_code == code, result.output
    return result


def _strip_timestamp(text):
    return "\n".join(ln for ln in text.splitlines() if "timestamp" not in ln)


# ------------------------------------------------------------------ spectrum

def test_spectrum_lossless(runner, s):
    header, rows = _table(_run(runner, ["spectrum", "--eta", "0", "--n-min", "-2", "--n-max", "2"]).output)
    assert header == list(cli_mod.SPECTRUM_COLUMNS)
    assert [r[0] for r in rows] == [-2, -1, 0, 1, 2]
    for r in rows:
        assert r[2] == 0
        assert r[4] == pytest.approx(math.pi, rel=1e-11)
    for a, b in zip(rows, rows[1:]):
        assert b[3] / a[3] == pytest.approx(math.exp(2 * math.pi / s.magnitude), rel=1e-10)


def test_spectrum_small_loss(runner, s):
    _, rows = _table(_run(runner, ["spectrum", "--eta", "0.06", "--n-min", "0", "--n-max", "0"]).output)
    (row,) = rows
    assert row[5] / row[3] == pytest.approx(2 * math.sin(0.12 / s.magnitude), rel=1e-10)


def test_spectrum_rt_scaling(runner):
    _, a = _table(_run(runner, ["spectrum", "--n-min", "0", "--n-max", "0"]).output)
    _, b = _table(_run(runner, ["spectrum", "--n-min", "0", "--n-max", "0", "--rt", "2"]).output)
    assert b[0][3] == pytest.approx(a[0][3] / 4, rel=1e-11)


def test_spectrum_critical_eta(runner):
    result = _run(runner, ["spectrum", "--eta", "1.6"], code=3)
    assert "no normalisable solution" in result.output


def test_spectrum_parameter_errors(runner):
    _run(runner, ["spectrum", "--precision", "3"], code=2)
    _run(runner, ["spectrum", "--precision", "18"], code=2)
    _run(runner, ["spectrum", "--n-min", "2", "--n-max", "1"], code=2)
    _run(runner, ["spectrum", "--eta", "-0.1"], code=2)
    _run(runner, ["spectrum", "--rt", "0"], code=2)
    _run(runner, ["spectrum", "--format", "xml"], code=2)


def test_solver_error_exit_code(runner, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverError("forced")

    monkeypatch.setattr(core, "analytic_state", boom)
    result = _run(runner, ["spectrum"], code=5)
    assert "forced" in result.output


def test_spectrum_physical_units(runner):
    out = _run(runner, ["spectrum", "--eta", "0.06", "--units", "physical", "--n-min", "0", "--n-max", "0"]).output
    assert '"rt_nm": 30.0' in out and '"mass_amu": 133.0' in out
    _, rows = _table(out)
    units = core.UnitSystem.cesium()
    state = core.analytic_state(0, core.ModelParams(0.06), core.channel_exponent())
    assert rows[0][3] == pytest.approx(abs(state.energy) * units.energy_unit, rel=1e-11)
    assert rows[0][8] == pytest.approx(state.size * 30e-9, rel=1e-11)


# ------------------------------------------------------------------ rotate

def test_rotate_arc(runner, s):
    steps = 40
    _, rows = _table(_run(runner, ["rotate", "--n", "0", "--eta-steps", str(steps)]).output)
    assert len(rows) == steps
    assert rows[0][3] == pytest.approx(math.pi, rel=1e-11)
    assert 2 * math.pi - rows[-1][3] <= 2 * math.pi / steps * (1 + 1e-9)
    assert rows[-1][0] == pytest.approx(core.critical_eta(s) * (1 - 1 / steps), rel=1e-11)
    gamma = [r[4] for r in rows]
    peak = int(np.argmax(gamma))
    assert 0 < peak < steps - 1
    assert rows[peak][0] == pytest.approx(math.pi * s.magnitude / 4, abs=core.critical_eta(s) / steps)
    assert gamma[-1] < 0.2 * gamma[peak]


def test_rotate_steps_validation(runner):
    _run(runner, ["rotate", "--eta-steps", "1"], code=2)


# ------------------------------------------------------------------ wavefunction

def test_wavefunction_real_profile(runner):
    _, rows = _table(_run(runner, ["wavefunction", "--eta", "0", "--r-max", "5", "--points", "50",
                                   "--precision", "15"]).output)
    assert rows[0][0] == pytest.approx(1e-3) and rows[-1][0] == pytest.approx(5)
    phases = [math.atan2(r[2], r[1]) % math.pi for r in rows]
    assert max(phases) - min(phases) < 1e-8


def test_wavefunction_tail_slope(runner, s):
    eta = 0.5
    kappa = core.kappa_of_energy(core.lossy_energy(0, core.ModelParams(eta), s))
    r_max = 60 / abs(kappa)
    _, rows = _table(_run(runner, ["wavefunction", "--eta", str(eta), "--r-max", str(r_max),
                                   "--points", "400"]).output)
    tail = [r for r in rows if abs(kappa) * r[0] > 20]
    radii = np.array([r[0] for r in tail])
    logs = np.log(np.array([r[3] for r in tail]) * np.sqrt(radii))
    slope = np.polyfit(radii, logs, 1)[0]
    assert slope == pytest.approx(-kappa.real, rel=1e-2)


def test_wavefunction_near_critical_envelope(runner, s):
    eta = core.critical_eta(s) - 1e-3
    kappa = core.kappa_of_energy(core.lossy_energy(0, core.ModelParams(eta), s))
    r_max = 200 / abs(kappa)
    _, rows = _table(_run(runner, ["wavefunction", "--eta", repr(eta), "--r-max", str(r_max),
                                   "--points", "300"]).output)
    r = np.array([row[0] for row in rows])
    mag = np.array([row[3] for row in rows])
    far = abs(kappa) * r > 20
    rate = -np.polyfit(r[far], np.log(mag[far] * np.sqrt(r[far])), 1)[0]
    assert rate < 0.01 * abs(kappa)


def test_wavefunction_validation(runner):
    _run(runner, ["wavefunction", "--points", "1"], code=2)
    _run(runner, ["wavefunction", "--r-max", "0"], code=2)
    _run(runner, ["wavefunction", "--eta", "2"], code=3)


# ------------------------------------------------------------------ output contract

@pytest.mark.parametrize("args", [
    ["spectrum", "--eta", "0.3"],
    ["rotate", "--eta-steps", "7", "--format", "json"],
    ["wavefunction", "--points", "9", "--eta", "1.1"],
])
def test_determinism(runner, args):
    a = _run(runner, args).output
    b = _run(runner, args).output
    assert _strip_timestamp(a) == _strip_timestamp(b)


def test_csv_schema(runner):
    out = _run(runner, ["rotate", "--eta-steps", "3"]).output
    lines = out.splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    assert lines[:len(comments)] == comments
    keys = [ln[2:].split(":", 1)[0] for ln in comments]
    assert keys == ["command", "parameters", "channel_exponent", "tool_version", "timestamp"]
    assert lines[len(comments)] == ",".join(cli_mod.ROTATE_COLUMNS)
    assert len(lines) == len(comments) + 1 + 3


@pytest.mark.parametrize("precision", [6, 9, 12, 17])
def test_precision_round_trip(runner, precision):
    exact = core.lossy_energy(1, core.ModelParams(0.7), core.channel_exponent())
    out = _run(runner, ["spectrum", "--eta", "0.7", "--n-min", "1", "--n-max", "1",
                        "--precision", str(precision)]).output
    _, rows = _table(out)
    assert abs(rows[0][1] - exact.real) / abs(exact.real) < 10.0 ** (-precision + 1)
    assert abs(rows[0][2] - exact.imag) / abs(exact.imag) < 10.0 ** (-precision + 1)


def test_json_structure(runner, s):
    payload = json.loads(_run(runner, ["spectrum", "--format", "json", "--eta", "0.2"]).output)
    assert set(payload) == {"manifest", "columns", "rows"}
    assert payload["columns"] == list(cli_mod.SPECTRUM_COLUMNS)
    assert payload["manifest"]["command"] == "spectrum"
    assert payload["manifest"]["channel_exponent"] == s.magnitude
    assert payload["manifest"]["parameters"]["eta"] == 0.2
    assert all(isinstance(v, (int, float)) for row in payload["rows"] for v in row)


def test_out_file(runner, tmp_path):
    path = tmp_path / "spec.csv"
    _run(runner, ["spectrum", "--out", str(path)])
    assert path.read_text().startswith("# command: spectrum")


@pytest.mark.parametrize("x, p, text", [
    (0.0, 12, "0"),
    (3, 12, "3"),
    (1.5e-5, 6, "1.50000e-05"),
    (2.5e6, 6, "2.50000e+06"),
    (-1.0994505524731987, 6, "-1.09945"),
    (515.0350013848, 8, "515.03500"),
])
def test_format_number(x, p, text):
    assert format_number(x, p) == text


def test_output_format_validation():
    with pytest.raises(ValueError):
        OutputFormat("xml")
    with pytest.raises(ValueError):
        OutputFormat("csv", 5)


# ------------------------------------------------------------------ verify

def test_verify_full_passes(runner):
    result = _run(runner, ["verify", "--level", "full"])
    assert "14/14 checks passed" in result.output


def test_verify_fast_subset_of_full(runner):
    fast = json.loads(_run(runner, ["verify", "--level", "fast", "--format", "json"]).output)
    full = json.loads(_run(runner, ["verify", "--level", "full", "--format", "json"]).output)
    fast_names = {c["name"] for c in fast["checks"]}
    full_names = {c["name"] for c in full["checks"]}
    assert fast_names < full_names
    assert {"ode_residual", "bethe_peierls"} <= full_names - fast_names


def test_verify_detects_sign_flip(runner, monkeypatch):
    original = hyperradial.reflection_amplitude
    monkeypatch.setattr(hyperradial, "reflection_amplitude", lambda eta: -original(eta))
    result = runner.invoke(cli, ["verify", "--level", "fast"])
    assert result.exit_code == 4
    failed = [ln.split()[1] for ln in result.output.splitlines() if ln.startswith("FAIL")]
    assert "boundary_amplitudes" in failed
    assert "verification failed at" in result.output
