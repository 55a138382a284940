"""Command-line front end.

Usage::

    efimov spectrum --eta 0.06 --n-min -1 --n-max 1
    efimov rotate --n 0 --eta-steps 50 --format json
    efimov wavefunction --n 0 --eta 0.5 --r-max 10 --points 200
    efimov verify --level full

Exit codes: 0 success, 2 parameter error, 3 eta* >= eta*_c,
4 verification failure, 5 internal solver error.
"""

from __future__ import annotations

import csv
import datetime as _dt
import functools
import io
import json
import math
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__, core, hyperradial
from .errors import AccuracyError, DomainError, SolverError
from .verification import run_verification

EXIT_DOMAIN = 3
EXIT_VERIFY = 4
EXIT_SOLVER = 5

SPECTRUM_COLUMNS = ("n", "re_E", "im_E", "abs_E", "arg_E", "gamma_hbar", "re_kappa", "im_kappa", "size")
ROTATE_COLUMNS = ("eta", "re_E", "im_E", "arg_E", "gamma_hbar")
WAVEFUNCTION_COLUMNS = ("R", "re_F", "im_F", "abs_F")


@dataclass(frozen=True)
class OutputFormat:
    kind: str = "csv"
    precision: int = 12

    def __post_init__(self):
        if self.kind not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.kind!r}")
        if not 6 <= self.precision <= 17:
            raise ValueError("precision must lie in [6, 17]")


@dataclass
class RunManifest:
    command: str
    parameters: dict
    channel_exponent: float
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "channel_exponent": self.channel_exponent,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


def format_number(x, precision: int) -> str:
    """Significant-digit formatting; scientific for |x| < 1e-4 or |x| >= 1e6."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        return "0"
    if not math.isfinite(x):
        return repr(x)
    ax = abs(x)
    if ax < 1e-4 or ax >= 1e6:
        return f"{x:.{precision - 1}e}"
    decimals = max(precision - 1 - int(math.floor(math.log10(ax))), 0)
    return f"{x:.{decimals}f}"


def _json_number(x, precision: int):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(format_number(x, precision))


def render_table(columns, rows, manifest: RunManifest, fmt: OutputFormat) -> str:
    """CSV with '#' manifest lines, or a single JSON object."""
    if fmt.kind == "json":
        payload = {
            "manifest": manifest.as_dict(),
            "columns": list(columns),
            "rows": [[_json_number(v, fmt.precision) for v in row] for row in rows],
        }
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    for key, value in manifest.as_dict().items():
        if isinstance(value, dict):
            value = json.dumps(value, sort_keys=True)
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(v, fmt.precision) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def common_options(func):
    """Flags shared by every table-producing subcommand."""
    options = [
        click.option("--format", "fmt_kind", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True, help="Output format."),
        click.option("--precision", type=click.IntRange(6, 17), default=12, show_default=True,
                     help="Significant digits."),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Output file (default: standard output)."),
        click.option("--rt", type=float, default=1.0, show_default=True,
                     help="Three-body parameter R_t in natural length units."),
        click.option("--units", type=click.Choice(["natural", "physical"]), default="natural",
                     show_default=True),
        click.option("--rt-nm", type=float, default=None, help="R_t in nm (physical units; default 30)."),
        click.option("--mass-amu", type=float, default=None, help="Atomic mass in u (physical units; default 133)."),
    ]
    for option in reversed(options):
        func = option(func)

    @functools.wraps(func)
    def wrapper(**kwargs):
        if kwargs["rt"] <= 0:
            raise click.BadParameter("must be positive", param_hint="--rt")
        try:
            return func(**kwargs)
        except DomainError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
        except (SolverError, AccuracyError) as exc:
            click.echo(f"solver error: {exc}", err=True)
            sys.exit(EXIT_SOLVER)

    return wrapper


def _unit_system(units, rt_nm, mass_amu) -> core.UnitSystem | None:
    if units == "natural":
        return None
    rt_nm = 30.0 if rt_nm is None else rt_nm
    mass_amu = 133.0 if mass_amu is None else mass_amu
    if rt_nm <= 0 or mass_amu <= 0:
        raise click.BadParameter("--rt-nm and --mass-amu must be positive")
    return core.UnitSystem.from_nm_amu(rt_nm, mass_amu)


def _base_parameters(kw) -> dict:
    params = {"rt": kw["rt"], "units": kw["units"], "precision": kw["precision"]}
    if kw["units"] == "physical":
        params["rt_nm"] = 30.0 if kw["rt_nm"] is None else kw["rt_nm"]
        params["mass_amu"] = 133.0 if kw["mass_amu"] is None else kw["mass_amu"]
    return params


def _check_eta(eta: float, s: core.ChannelExponent) -> None:
    if eta < 0:
        raise click.BadParameter("must be >= 0", param_hint="--eta")
    if eta >= core.critical_eta(s):
        raise DomainError(
            f"eta* = {eta} >= eta*_c = pi|s|/2 = {core.critical_eta(s):.10f}: "
            "there is no normalisable solution"
        )


@click.group()
@click.version_option(__version__, prog_name="efimov")
def cli():
    """Efimov trimers with three-body losses."""


@cli.command()
@click.option("--eta", type=float, default=0.0, show_default=True, help="Inelasticity eta*.")
@click.option("--n-min", type=int, default=-1, show_default=True)
@click.option("--n-max", type=int, default=1, show_default=True)
@common_options
def spectrum(eta, n_min, n_max, fmt_kind, precision, out, rt, units, rt_nm, mass_amu):
    """Rotated Efimov spectrum for n in [n_min, n_max]."""
    if n_min > n_max:
        raise click.BadParameter("--n-min must not exceed --n-max")
    s = core.channel_exponent()
    _check_eta(eta, s)
    unit_sys = _unit_system(units, rt_nm, mass_amu)
    r_t = 1.0 if unit_sys else rt
    params = core.ModelParams(eta, r_t)
    rows = []
    for n in range(n_min, n_max + 1):
        state = core.analytic_state(n, params, s)
        e, kappa, gamma, size = state.energy, state.kappa, state.gamma, state.size
        if unit_sys:
            e, _, size = core.to_physical_units(state, unit_sys)
            gamma *= unit_sys.energy_unit
            kappa /= unit_sys.r_t_meters
        rows.append((n, e.real, e.imag, abs(e), core.energy_angle(e), gamma, kappa.real, kappa.imag, size))
    kw = dict(rt=rt, units=units, precision=precision, rt_nm=rt_nm, mass_amu=mass_amu)
    manifest = RunManifest("spectrum", {**_base_parameters(kw), "eta": eta, "n_min": n_min, "n_max": n_max},
                           s.magnitude)
    _emit(render_table(SPECTRUM_COLUMNS, rows, manifest, OutputFormat(fmt_kind, precision)), out)


@cli.command()
@click.option("--n", "n", type=int, default=0, show_default=True, help="Efimov index.")
@click.option("--eta-steps", type=click.IntRange(min=2), default=50, show_default=True)
@common_options
def rotate(n, eta_steps, fmt_kind, precision, out, rt, units, rt_nm, mass_amu):
    """Trajectory of E_n as eta* sweeps [0, eta*_c)."""
    s = core.channel_exponent()
    unit_sys = _unit_system(units, rt_nm, mass_amu)
    scale = unit_sys.energy_unit if unit_sys else 1.0
    params_rt = 1.0 if unit_sys else rt
    eta_c = core.critical_eta(s)
    rows = []
    for j in range(eta_steps):
        eta = eta_c * j / eta_steps
        e = core.lossy_energy(n, core.ModelParams(eta, params_rt), s)
        rows.append((eta, e.real * scale, e.imag * scale, core.energy_angle(e), core.decay_rate(e) * scale))
    kw = dict(rt=rt, units=units, precision=precision, rt_nm=rt_nm, mass_amu=mass_amu)
    manifest = RunManifest("rotate", {**_base_parameters(kw), "n": n, "eta_steps": eta_steps}, s.magnitude)
    _emit(render_table(ROTATE_COLUMNS, rows, manifest, OutputFormat(fmt_kind, precision)), out)


@cli.command()
@click.option("--n", "n", type=int, default=0, show_default=True)
@click.option("--eta", type=float, default=0.0, show_default=True)
@click.option("--r-max", type=float, default=10.0, show_default=True, help="Largest hyperradius (units of R_t).")
@click.option("--points", type=click.IntRange(min=2), default=100, show_default=True)
@common_options
def wavefunction(n, eta, r_max, points, fmt_kind, precision, out, rt, units, rt_nm, mass_amu):
    """Hyperradial wavefunction K_s(kappa R) on a log grid in [1e-3, r_max]."""
    if r_max <= 1e-3:
        raise click.BadParameter("must exceed 1e-3", param_hint="--r-max")
    s = core.channel_exponent()
    _check_eta(eta, s)
    unit_sys = _unit_system(units, rt_nm, mass_amu)
    params = core.ModelParams(eta, 1.0 if unit_sys else rt)
    radii = np.geomspace(1e-3 * params.r_t, r_max * params.r_t, points)
    profile = hyperradial.radial_wavefunction(core.lossy_energy(n, params, s), radii, s)
    length = unit_sys.r_t_meters if unit_sys else 1.0
    rows = [(r * length, f.real, f.imag, abs(f)) for r, f in zip(profile.radii, profile.values)]
    kw = dict(rt=rt, units=units, precision=precision, rt_nm=rt_nm, mass_amu=mass_amu)
    manifest = RunManifest("wavefunction",
                           {**_base_parameters(kw), "n": n, "eta": eta, "r_max": r_max, "points": points},
                           s.magnitude)
    _emit(render_table(WAVEFUNCTION_COLUMNS, rows, manifest, OutputFormat(fmt_kind, precision)), out)


@cli.command()
@click.option("--level", type=click.Choice(["fast", "full"]), default="full", show_default=True)
@click.option("--format", "fmt_kind", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(level, fmt_kind, out):
    """Cross-check the closed-form results against the numerical solvers."""
    s = core.channel_exponent()
    results = run_verification(level, s)
    failures = [r for r in results if not r.passed]
    if fmt_kind == "json":
        manifest = RunManifest("verify", {"level": level}, s.magnitude)
        text = json.dumps({
            "manifest": manifest.as_dict(),
            "checks": [{"name": r.name, "passed": r.passed, "measured": r.measured,
                        "threshold": r.threshold, "detail": r.detail} for r in results],
            "passed": not failures,
        }, indent=1) + "\n"
    else:
        lines = [r.line() for r in results]
        lines.append(f"{len(results) - len(failures)}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
    _emit(text, out)
    if failures:
        first = failures[0]
        click.echo(f"verification failed at {first.name}: {first.detail or first.line()}", err=True)
        sys.exit(EXIT_VERIFY)


def main():  # pragma: no cover
    cli()


if __name__ == "__main__":  # pragma: no cover
    main()
