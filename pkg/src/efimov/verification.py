"""Numerical verification suite behind ``efimov verify``.

Each check compares an independently computed quantity with the closed-form
result and reports the measured error next to its threshold.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ansatz3d, core, hyperradial, specfun
from .errors import EfimovError

N_GRID = (-1, 0, 1)
ETA_GRID = (0.0, 0.06, 0.5, 1.0, 1.5)

# |kappa| R range and step of the finite-difference certification grid
RESIDUAL_GRID = (0.75, 7.5, 0.015)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<28s} measured={self.measured:.3e}  threshold={self.threshold:.1e}"
        return f"{text}  {self.detail}" if self.detail else text


def residual_grid(energy) -> np.ndarray:
    kappa = abs(core.kappa_of_energy(energy))
    lo, hi, step = RESIDUAL_GRID
    n = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, n) / kappa


class _Context:
    """Lazily solved grid states shared between checks."""

    def __init__(self, s: core.ChannelExponent, cfg: hyperradial.SolverConfig):
        self.s = s
        self.cfg = cfg
        self._states = {}

    def state(self, n: int, eta: float) -> core.TrimerState:
        key = (n, eta)
        if key not in self._states:
            params = core.ModelParams(eta)
            seed = hyperradial.detuned_seed(n, params, self.s)
            self._states[key] = hyperradial.find_state(seed, params, self.s, self.cfg, n=n)
        return self._states[key]


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


def check_channel_exponent(ctx: _Context) -> CheckResult:
    err = abs(core.solve_channel_exponent(1e-10).magnitude - 1.00624)
    return CheckResult("channel_exponent", err <= 1e-5, err, 1e-5)


def check_critical_eta(ctx: _Context) -> CheckResult:
    err = abs(core.critical_eta(ctx.s) - 1.5806)
    return CheckResult("critical_eta", err <= 2e-4, err, 2e-4)


def check_rotation_law(ctx: _Context) -> CheckResult:
    worst, where = 0.0, ""
    for n in N_GRID:
        for eta in ETA_GRID:
            expected = cmath.exp(2j * eta / ctx.s.magnitude) * core.lossless_energy(n, ctx.s)
            err = _rel(ctx.state(n, eta).energy, expected)
            if err > worst:
                worst, where = err, f"n={n} eta={eta}"
    return CheckResult("rotation_law_Q_roots", worst <= 1e-8, worst, 1e-8, where)


def check_decay_rates(ctx: _Context) -> CheckResult:
    worst = 0.0
    for n in N_GRID:
        for eta in ETA_GRID:
            e0 = abs(core.lossless_energy(n, ctx.s))
            numeric = -2.0 * ctx.state(n, eta).energy.imag
            closed = 2.0 * math.sin(2.0 * eta / ctx.s.magnitude) * e0
            worst = max(worst, abs(numeric - closed) / (closed if closed > 0 else e0))
    return CheckResult("decay_rate_closed_form", worst <= 1e-7, worst, 1e-7)


def check_small_loss(ctx: _Context) -> CheckResult:
    worst = 0.0
    for eta in (0.01, 0.02, 0.05):
        state = ctx.state(0, eta)
        approx = 4.0 * eta / ctx.s.magnitude * abs(core.lossless_energy(0, ctx.s))
        worst = max(worst, _rel(approx, -2.0 * state.energy.imag))
    return CheckResult("decay_rate_small_loss", worst <= 2e-3, worst, 2e-3)


def check_geometric_ratio(ctx: _Context) -> CheckResult:
    worst = 0.0
    for eta in ETA_GRID:
        for n in N_GRID[:-1]:
            ratio = abs(ctx.state(n + 1, eta).energy) / abs(ctx.state(n, eta).energy)
            worst = max(worst, abs(ratio / ctx.s.scaling_factor - 1.0))
    return CheckResult("geometric_ratio", worst <= 1e-10, worst, 1e-10)


def check_boundary_amplitudes(ctx: _Context) -> CheckResult:
    worst, where = 0.0, ""
    for n in N_GRID:
        for eta in ETA_GRID:
            params = core.ModelParams(eta)
            state = ctx.state(n, eta)
            amp = hyperradial.bc_amplitudes(hyperradial.small_r_profile(state.energy, ctx.s, params),
                                            params, ctx.s)
            err = abs(amp.ratio + math.exp(-2.0 * eta))
            if err > worst:
                worst, where = err, f"n={n} eta={eta} ratio={amp.ratio:.6g}"
    return CheckResult("boundary_amplitudes", worst <= 1e-6, worst, 1e-6, where)


def check_critical_limit(ctx: _Context) -> CheckResult:
    eta = core.critical_eta(ctx.s) - 1e-3
    state = ctx.state(0, eta)
    e0 = abs(core.lossless_energy(0, ctx.s))
    im_ratio = state.energy.imag / abs(state.energy)
    approach = abs(state.energy - e0) / e0
    growth = state.size / ctx.state(0, 0.0).size
    ok = -2e-3 < im_ratio < 0 and approach <= 2e-3 and growth > 500
    return CheckResult("critical_limit", ok, approach, 2e-3,
                       f"ImE/|E|={im_ratio:.3e} size_ratio={growth:.1f}")


def check_bessel_regimes(ctx: _Context) -> CheckResult:
    rng = random.Random(20240601)
    worst = 0.0
    for _ in range(40):
        z = cmath.rect(rng.uniform(1.0, 4.0), rng.uniform(-1.4, 1.4))
        a = specfun.bessel_k_series(ctx.s.s, z)
        worst = max(worst, _rel(specfun.bessel_k_integral(ctx.s.s, z), a))
    return CheckResult("bessel_regimes", worst <= 1e-9, worst, 1e-9)


def check_ln_gamma(ctx: _Context) -> CheckResult:
    rng = random.Random(20240602)
    worst = 0.0
    for _ in range(40):
        z = complex(rng.uniform(-4.5, 4.5), rng.choice((-1, 1)) * rng.uniform(0.05, 2.0))
        recur = cmath.exp(specfun.ln_gamma(z + 1) - specfun.ln_gamma(z)) / z
        refl = cmath.exp(specfun.ln_gamma(z) + specfun.ln_gamma(1 - z)) * cmath.sin(math.pi * z) / math.pi
        worst = max(worst, abs(recur - 1.0), abs(refl - 1.0))
    return CheckResult("ln_gamma_identities", worst <= 1e-10, worst, 1e-10)


def check_norm_growth(ctx: _Context) -> CheckResult:
    worst_step = math.inf
    for n in N_GRID:
        norms = [hyperradial.norm_integral(ctx.state(n, eta).energy, ctx.s) for eta in ETA_GRID]
        if not all(math.isfinite(v) and v > 0 for v in norms):
            return CheckResult("norm_growth", False, math.nan, 0.0, f"n={n} non-finite norm")
        worst_step = min(worst_step, min(b / a - 1.0 for a, b in zip(norms, norms[1:])))
    return CheckResult("norm_growth", worst_step > 0, worst_step, 0.0, "min relative increase")


def check_shooting(ctx: _Context) -> CheckResult:
    worst = 0.0
    for n in N_GRID:
        for eta in ETA_GRID:
            params = core.ModelParams(eta)
            q_root = ctx.state(n, eta)
            seed = hyperradial.detuned_seed(n, params, ctx.s)
            shot = hyperradial.find_shooting_root(seed, params, ctx.s, ctx.cfg, n=n)
            worst = max(worst, _rel(shot.energy, q_root.energy))
    return CheckResult("shooting_roots", worst <= 1e-7, worst, 1e-7)


def check_ode_residual(ctx: _Context) -> CheckResult:
    worst = 0.0
    for n in N_GRID:
        for eta in ETA_GRID:
            energy = ctx.state(n, eta).energy
            profile = hyperradial.radial_wavefunction(energy, residual_grid(energy), ctx.s)
            worst = max(worst, hyperradial.ode_residual(profile, ctx.s))
    return CheckResult("ode_residual", worst <= 1e-5, worst, 1e-5)


def check_bethe_peierls(ctx: _Context) -> CheckResult:
    energy = core.lossless_energy(0, ctx.s)
    center, third = (0.1, -0.2, 0.05), (0.7, 0.4, -0.3)
    _, ratio = ansatz3d.bethe_peierls_check(center, third, energy, ctx.s)
    detuned = core.ChannelExponent(1.01 * ctx.s.magnitude)
    _, ratio_off = ansatz3d.bethe_peierls_check(center, third, energy, detuned)
    ok = ratio < 1e-4 and ratio_off > 1e-2
    return CheckResult("bethe_peierls", ok, ratio, 1e-4, f"detuned ratio={ratio_off:.3e} (> 1e-2)")


FAST_CHECKS: tuple[Callable[[_Context], CheckResult], ...] = (
    check_channel_exponent,
    check_critical_eta,
    check_bessel_regimes,
    check_ln_gamma,
    check_rotation_law,
    check_decay_rates,
    check_small_loss,
    check_geometric_ratio,
    check_boundary_amplitudes,
    check_critical_limit,
)
FULL_CHECKS = FAST_CHECKS + (check_norm_growth, check_shooting, check_ode_residual, check_bethe_peierls)


def run_verification(level: str = "full", s: core.ChannelExponent | None = None,
                     cfg: hyperradial.SolverConfig | None = None) -> list[CheckResult]:
    """Run the fast or full list of checks; errors inside a check count as failures."""
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    ctx = _Context(s or core.channel_exponent(), cfg or hyperradial.SolverConfig())
    results = []
    for check in FAST_CHECKS if level == "fast" else FULL_CHECKS:
        name = check.__name__.removeprefix("check_")
        try:
            results.append(check(ctx))
        except EfimovError as exc:
            results.append(CheckResult(name, False, math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return results
