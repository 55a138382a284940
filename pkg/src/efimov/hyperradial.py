r"""Numerical solution of the hyperradial problem with lossy short-range boundary.

The radial equation (natural units, :math:`\kappa^2 = -2E`)

.. math::
    F'' + \frac{1}{R}F' - \frac{s^2}{R^2}F = \kappa^2 F

is solved two ways, neither of which uses the rotated-spectrum formula:

1. **Matching residual.** The regular solution is :math:`K_s(\kappa R)`.
   Its small-:math:`R` form :math:`c_-(R/R_t)^{-s} + c_+(R/R_t)^{s}` must
   satisfy :math:`c_+/c_- = -e^{-2\eta_*}`. With
   :math:`c_\mp = \tfrac12\Gamma(\pm s)(\kappa R_t/2)^{\mp s}` this reads

   .. math::
       Q(E) = e^{-2\eta_*} + \frac{\Gamma(-s)}{\Gamma(s)}
              \left(\frac{\kappa R_t}{2}\right)^{2s} = 0 .

2. **Shooting.** The equation is integrated in :math:`u = \ln R`, where it
   becomes :math:`F_{uu} = (s^2 + \kappa^2 e^{2u})F` and the
   :math:`1/R^2` singularity disappears. The outward solution starts from
   the Frobenius pair :math:`(R/R_t)^{\mp s}(1 + O(\kappa^2R^2))` combined
   with the lossy reflection amplitude. The inward solution starts at
   :math:`|\kappa| R_{max}` from the Hankel expansion of the decaying
   solution. The mismatch of the two log-derivatives at
   :math:`R_m = 1/|\kappa|` vanishes on the spectrum.

A purely outward shot cannot resolve a bound state at
:math:`|\kappa|R \sim 30`: any admixture of the growing solution is amplified
by :math:`e^{2\,\mathrm{Re}\,\kappa R}`. That is why the shooting functional
is two-sided.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    ChannelExponent,
    ModelParams,
    TrimerState,
    critical_eta,
    kappa_of_energy,
    lossless_energy,
)
from .errors import AccuracyError, BranchError, DomainError, FitError, SolverError
from .specfun import QuadratureSpec, bessel_k, integrate_adaptive, ln_gamma

__all__ = [
    "SolverConfig",
    "RadialProfile",
    "BoundaryAmplitudes",
    "reflection_amplitude",
    "quantization_residual",
    "find_state",
    "detuned_seed",
    "scan_states",
    "radial_wavefunction",
    "ode_residual",
    "frobenius_solution",
    "asymptotic_log_derivative",
    "integrate_ode",
    "integrate_inward",
    "shoot_match",
    "find_shooting_root",
    "bc_amplitudes",
    "small_r_profile",
    "norm_integral",
]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and grid bounds for root finding and shooting.

    ``match_kappa`` places the shooting match point at ``|kappa| R = match_kappa``.
    """

    r_min: float = 1e-3
    r_max_kappa: float = 30.0
    ode_tolerance: float = 1e-10
    root_tolerance: float = 1e-12
    max_newton_iterations: int = 60
    match_kappa: float = 1.0

    def __post_init__(self):
        for name in ("r_min", "r_max_kappa", "ode_tolerance", "root_tolerance", "match_kappa"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SolverConfig.{name} must be positive")
        if self.max_newton_iterations < 1:
            raise ValueError("max_newton_iterations must be >= 1")
        if not self.r_min < 0.1:
            raise ValueError("r_min must be small compared to R_t")


@dataclass(frozen=True)
class RadialProfile:
    """Complex hyperradial wavefunction sampled on an increasing grid."""

    radii: np.ndarray
    values: np.ndarray
    energy: complex

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if radii.ndim != 1 or radii.size < 2 or radii.shape != values.shape:
            raise ValueError("RadialProfile needs equal-length 1-D radii and values (>= 2)")
        if radii[0] <= 0 or np.any(np.diff(radii) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "energy", complex(self.energy))


@dataclass(frozen=True)
class BoundaryAmplitudes:
    """Coefficients of ``(R/R_t)^{-s}`` (ingoing) and ``(R/R_t)^{s}`` (outgoing)."""

    ingoing: complex
    outgoing: complex
    condition_number: float = field(default=1.0, compare=False)

    @property
    def ratio(self) -> complex:
        return self.outgoing / self.ingoing


def reflection_amplitude(eta_star: float) -> float:
    """Outgoing/ingoing amplitude magnitude ``exp(-2 eta*)`` at short distance."""
    return math.exp(-2.0 * eta_star)


# ---------------------------------------------------------------------------
# matching residual


def quantization_residual(energy, params: ModelParams, s: ChannelExponent) -> complex:
    """``Q(E) = exp(-2 eta*) + Gamma(-s)/Gamma(s) (kappa R_t / 2)^{2s}``."""
    kappa = kappa_of_energy(energy)
    sv = s.s
    log_ratio = ln_gamma(-sv) - ln_gamma(sv) + 2.0 * sv * cmath.log(0.5 * kappa * params.r_t)
    return reflection_amplitude(params.eta_star) + cmath.exp(log_ratio)


def _newton(func, seed: complex, cfg: SolverConfig, what: str) -> tuple[complex, list]:
    """Damped complex Newton iteration with a central-difference derivative."""
    e = complex(seed)
    try:
        q = func(e)
    except DomainError as exc:
        raise SolverError(f"{what}: seed {e!r} outside the domain ({exc})") from exc
    trace = [(e, abs(q))]
    for _ in range(cfg.max_newton_iterations):
        if abs(q) < cfg.root_tolerance:
            return e, trace
        h = 1e-7 * abs(e)
        try:
            dq = (func(e + h) - func(e - h)) / (2.0 * h)
        except DomainError as exc:
            raise SolverError(f"{what}: derivative stencil left the domain at {e!r}", trace) from exc
        if dq == 0:
            raise SolverError(f"{what}: vanishing derivative at {e!r}", trace)
        step = q / dq
        # halve the step until the residual decreases and the iterate stays valid
        for _ in range(40):
            trial = e - step
            try:
                q_trial = func(trial)
            except DomainError:
                q_trial = None
            if q_trial is not None and abs(q_trial) < abs(q):
                break
            step *= 0.5
        else:
            raise SolverError(f"{what}: line search failed at {e!r}", trace)
        e, q = trial, q_trial
        trace.append((e, abs(q)))
    if abs(q) < cfg.root_tolerance:
        return e, trace
    raise SolverError(
        f"{what}: no convergence in {cfg.max_newton_iterations} iterations (|residual| = {abs(q):.3e})",
        trace,
    )


def _label(energy: complex, params: ModelParams, s: ChannelExponent) -> int:
    ratio = abs(energy) / abs(lossless_energy(0, s, params.r_t))
    return int(round(math.log(ratio) * s.magnitude / (2.0 * math.pi)))


def _as_state(n, energy, what) -> TrimerState:
    try:
        return TrimerState.from_energy(n, energy)
    except DomainError as exc:
        raise BranchError(f"{what}: root {energy!r} has Re kappa <= 0") from exc


def find_state(seed, params: ModelParams, s: ChannelExponent,
               cfg: SolverConfig = SolverConfig(), n: int | None = None) -> TrimerState:
    """Newton root of :func:`quantization_residual` started from ``seed``.

    ``n`` labels the returned state; when omitted it is inferred from
    ``|E|`` on the geometric ladder.

    Raises
    ------
    SolverError
        No convergence; ``trace`` lists ``(E, |Q|)`` per iterate.
    BranchError
        Converged to a root with ``Re kappa <= 0``.
    """
    if complex(seed) == 0:
        raise DomainError("find_state: seed must be nonzero")
    energy, _ = _newton(lambda e: quantization_residual(e, params, s), seed, cfg, "find_state")
    if n is None:
        n = _label(energy, params, s)
    return _as_state(n, energy, "find_state")


def detuned_seed(n: int, params: ModelParams, s: ChannelExponent,
                 modulus_factor: float = 1.3, angle_factor: float = 1.9) -> complex:
    """Starting point that is deliberately off the expected root.

    Modulus scaled by 1.3 and rotation angle ``1.9 eta*/|s|`` instead of
    ``2 eta*/|s|``.
    """
    e0 = lossless_energy(n, s, params.r_t)
    return modulus_factor * cmath.exp(1j * angle_factor * params.eta_star / s.magnitude) * e0


def scan_states(n_min: int, n_max: int, params: ModelParams, s: ChannelExponent,
                cfg: SolverConfig = SolverConfig(), ratio_tol: float = 1e-8) -> list[TrimerState]:
    """Solve for every ``n`` in ``[n_min, n_max]`` from detuned seeds.

    Adjacent energies are checked against the geometric ratio
    ``exp(2 pi/|s|)``.
    """
    if n_min > n_max:
        raise DomainError("scan_states: n_min > n_max")
    if not params.eta_star < critical_eta(s):
        raise DomainError("scan_states: eta* >= eta*_c, no normalisable solution")
    states = []
    for n in range(n_min, n_max + 1):
        try:
            states.append(find_state(detuned_seed(n, params, s), params, s, cfg, n=n))
        except SolverError as exc:
            raise SolverError(f"scan_states: n = {n} failed: {exc}", exc.trace) from exc
    for a, b in zip(states, states[1:]):
        err = abs(b.energy / a.energy / s.scaling_factor - 1.0)
        if err > ratio_tol:
            raise SolverError(f"scan_states: ratio E_{b.n}/E_{a.n} off by {err:.2e}")
    return states


# ---------------------------------------------------------------------------
# analytic profile and certification


def radial_wavefunction(energy, radii, s: ChannelExponent) -> RadialProfile:
    """Unnormalised ``F(R) = K_s(kappa R)`` on ``radii``."""
    kappa = kappa_of_energy(energy)
    radii = np.asarray(radii, dtype=float)
    values = np.array([bessel_k(s.s, kappa * r) for r in radii])
    return RadialProfile(radii, values, energy)


def ode_residual(profile: RadialProfile, s: ChannelExponent) -> float:
    """Relative residual of the radial equation from 5-point finite differences.

    Returns ``max |F'' + F'/R - s^2 F/R^2 + 2 E F| / max |2 E F|`` over the
    interior points of a uniform grid.
    """
    r, f = profile.radii, profile.values
    if r.size < 5:
        raise DomainError("ode_residual: need at least 5 grid points")
    h = r[1] - r[0]
    if not np.allclose(np.diff(r), h, rtol=1e-8, atol=0):
        raise DomainError("ode_residual: grid must be uniform")
    kappa = kappa_of_energy(profile.energy)
    if h * abs(kappa) > 0.5:
        raise DomainError(f"ode_residual: step {h:g} too coarse for |kappa| = {abs(kappa):.3g}")
    d1 = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    rc, fc = r[2:-2], f[2:-2]
    two_e = 2.0 * profile.energy
    res = d2 + d1 / rc - (s.s ** 2) * fc / rc ** 2 + two_e * fc
    return float(np.max(np.abs(res)) / np.max(np.abs(two_e * fc)))


# ---------------------------------------------------------------------------
# shooting


def frobenius_solution(order: complex, kappa: complex, r: float, r_t: float = 1.0) -> tuple[complex, complex]:
    r"""Regular series :math:`(R/R_t)^{\nu}\sum_k a_k (R/R_t)^{2k}` and its R-derivative.

    :math:`a_k = (\kappa R_t/2)^{2k} / (k!\,(1+\nu)_k)`, summed to round-off.
    """
    x = r / r_t
    q = (0.5 * kappa * r_t) ** 2 * x * x
    term = 1.0 + 0j
    total, dtotal = term, order * term
    for k in range(1, 200):
        term *= q / (k * (k + order))
        total += term
        dtotal += (order + 2 * k) * term
        if abs(term) < 1e-17 * abs(total):
            break
    power = cmath.exp(order * math.log(x))
    return power * total, power * dtotal / r


def asymptotic_log_derivative(order: complex, z: complex) -> complex:
    r""":math:`d\ln K_\nu(z)/dz` from the Hankel expansion (large ``|z|``).

    :math:`K_\nu(z) \sim \sqrt{\pi/2z}\,e^{-z}\sum_k a_k z^{-k}` with
    :math:`a_k = a_{k-1}(4\nu^2 - (2k-1)^2)/(8k)`; the sum is cut at its
    smallest term.
    """
    mu = 4.0 * order * order
    a = 1.0 + 0j
    series, dseries = a, 0j
    prev = math.inf
    for k in range(1, 200):
        a *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
        term = a / z ** k
        if abs(term) > prev:
            break
        series += term
        dseries -= k * term / z
        prev = abs(term)
        if prev < 1e-18 * abs(series):
            break
    return -1.0 - 0.5 / z + dseries / series


def _rhs(kappa2: complex, s2: complex):
    def rhs(u, y):
        return np.array([y[1], (s2 + kappa2 * math.exp(2.0 * u)) * y[0]])
    return rhs


def _integrate_log(y0, u0, u1, kappa2, s2, tol, u_eval=()):
    """Integrate ``(F, F_u)`` from ``u0`` to ``u1`` with DOP853, rescaling past |F| = 1e100.

    Returns the end state and ``F`` at the requested ``u_eval`` points, in
    the order visited.
    """
    n_chunks = max(1, int(math.ceil(abs(u1 - u0) / 2.0)))
    bounds = np.linspace(u0, u1, n_chunks + 1)
    forward = u1 > u0
    u_eval = np.sort(np.asarray(u_eval, dtype=float))
    if not forward:
        u_eval = u_eval[::-1]
    y = np.asarray(y0, dtype=complex)
    log_scale = 0.0
    samples_u, samples_f = [], []
    for i, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        last = i == n_chunks - 1
        lo, hi = min(a, b), max(a, b)
        # half-open chunks so boundary points are sampled once
        if forward:
            sel = (u_eval >= lo) & ((u_eval <= hi) if last else (u_eval < hi))
        else:
            sel = (u_eval <= hi) & ((u_eval >= lo) if last else (u_eval > lo))
        picked = np.clip(u_eval[sel], lo, hi)
        # the chunk end is always evaluated: it seeds the next chunk
        at_end = picked.size > 0 and picked[-1] == b
        t_eval = picked if at_end else np.append(picked, b)
        sol = solve_ivp(_rhs(kappa2, s2), (a, b), y, method="DOP853", rtol=tol,
                        atol=tol * 1e-6 * float(np.max(np.abs(y))), t_eval=t_eval)
        if sol.status != 0:
            raise SolverError(f"ODE integration failed on [{a:.4g}, {b:.4g}]: {sol.message}")
        keep = picked.size
        samples_u.extend(sol.t[:keep])
        samples_f.extend(sol.y[0, :keep] * math.exp(log_scale))
        y = sol.y[:, -1]
        size = abs(y[0])
        if size > 1e100:
            y = y / size
            log_scale += math.log(size)
    return y, np.array(samples_u), np.array(samples_f, dtype=complex)


def _r_start(kappa: complex, cfg: SolverConfig) -> float:
    return min(cfg.r_min, 0.1 * cfg.match_kappa / abs(kappa))


def integrate_ode(energy, params: ModelParams, s: ChannelExponent,
                  cfg: SolverConfig = SolverConfig(), r_end: float | None = None,
                  radii=None) -> tuple[complex, RadialProfile]:
    """Outward shot from the short-distance boundary condition.

    Starts at ``min(r_min, 0.1 R_m)`` from
    ``(R/R_t)^{-s} - exp(-2 eta*) (R/R_t)^{s}`` with series corrections and
    integrates to ``r_end`` (default ``r_max_kappa / |kappa|``).

    Returns
    -------
    log_derivative : complex
        ``F'/F`` at ``r_end``.
    profile : RadialProfile or None
        ``F`` at ``radii`` (default: 64 log-spaced points); ``None`` when
        fewer than two radii are requested.
    """
    kappa = kappa_of_energy(energy)
    r0 = _r_start(kappa, cfg)
    if r_end is None:
        r_end = cfg.r_max_kappa / abs(kappa)
    if not r_end > r0:
        raise DomainError("integrate_ode: r_end must exceed the start radius")
    sv = s.s
    f_in, df_in = frobenius_solution(-sv, kappa, r0, params.r_t)
    f_out, df_out = frobenius_solution(sv, kappa, r0, params.r_t)
    refl = reflection_amplitude(params.eta_star)
    f0 = f_in - refl * f_out
    df0 = df_in - refl * df_out
    if radii is None:
        radii = np.geomspace(r0, r_end, 64)
    y, u_s, f_s = _integrate_log([f0, r0 * df0], math.log(r0), math.log(r_end),
                                 kappa * kappa, sv * sv, cfg.ode_tolerance, np.log(radii))
    logd = y[1] / (r_end * y[0])
    if len(radii) < 2:
        return logd, None
    return logd, RadialProfile(np.exp(u_s), f_s, energy)


def integrate_inward(energy, s: ChannelExponent, cfg: SolverConfig = SolverConfig(),
                     r_end: float | None = None, radii=None) -> tuple[complex, RadialProfile]:
    """Inward shot of the decaying solution from ``|kappa| R = r_max_kappa``.

    Returns ``F'/F`` at ``r_end`` (default: the match radius) and the profile
    on ``radii`` (ascending; default 64 log-spaced points).
    """
    kappa = kappa_of_energy(energy)
    r_max = cfg.r_max_kappa / abs(kappa)
    if r_end is None:
        r_end = cfg.match_kappa / abs(kappa)
    if not 0 < r_end < r_max:
        raise DomainError("integrate_inward: r_end must lie inside (0, R_max)")
    slope = kappa * asymptotic_log_derivative(s.s, kappa * r_max)
    if radii is None:
        radii = np.geomspace(r_end, r_max, 64)
    y, u_s, f_s = _integrate_log([1.0, r_max * slope], math.log(r_max), math.log(r_end),
                                 kappa * kappa, s.s ** 2, cfg.ode_tolerance, np.log(radii))
    logd = y[1] / (r_end * y[0])
    if len(radii) < 2:
        return logd, None
    return logd, RadialProfile(np.exp(u_s[::-1]), f_s[::-1], energy)


def shoot_match(energy, params: ModelParams, s: ChannelExponent,
                cfg: SolverConfig = SolverConfig()) -> complex:
    """Log-derivative mismatch ``(F'/F)_out - (F'/F)_in`` at ``|kappa| R = match_kappa``.

    Vanishes exactly on the spectrum; independent of the special-function
    code.
    """
    kappa = kappa_of_energy(energy)
    r_m = cfg.match_kappa / abs(kappa)
    out, _ = integrate_ode(energy, params, s, cfg, r_end=r_m, radii=())
    inn, _ = integrate_inward(energy, s, cfg, r_end=r_m, radii=())
    return out - inn


def find_shooting_root(seed, params: ModelParams, s: ChannelExponent,
                       cfg: SolverConfig = SolverConfig(), n: int | None = None) -> TrimerState:
    """Newton root of :func:`shoot_match`.

    The mismatch is only resolved to the ODE tolerance, so the stopping
    threshold is ``100 * ode_tolerance * |kappa|``.
    """
    if complex(seed) == 0:
        raise DomainError("find_shooting_root: seed must be nonzero")
    scale = abs(kappa_of_energy(seed))
    tol = 100.0 * cfg.ode_tolerance
    shoot_cfg = SolverConfig(cfg.r_min, cfg.r_max_kappa, cfg.ode_tolerance, tol,
                             cfg.max_newton_iterations, cfg.match_kappa)
    energy, _ = _newton(lambda e: shoot_match(e, params, s, cfg) / scale, seed, shoot_cfg,
                        "find_shooting_root")
    if n is None:
        n = _label(energy, params, s)
    return _as_state(n, energy, "find_shooting_root")


# ---------------------------------------------------------------------------
# short-distance amplitudes and norm


def small_r_profile(energy, s: ChannelExponent, params: ModelParams = ModelParams(),
                    radii=None) -> RadialProfile:
    """Analytic profile on ``R/R_t`` in ``[1e-4, 1e-2]`` for :func:`bc_amplitudes`."""
    if radii is None:
        radii = np.geomspace(1e-4, 1e-2, 12) * params.r_t
    return radial_wavefunction(energy, radii, s)


def bc_amplitudes(profile: RadialProfile, params: ModelParams, s: ChannelExponent,
                  max_condition: float = 1e8) -> BoundaryAmplitudes:
    """Least-squares split of a small-R profile into ingoing and outgoing waves.

    Uses the points with ``R/R_t <= 1e-2``. The basis functions are the two
    Frobenius solutions, i.e. ``(R/R_t)^{-s}`` and ``(R/R_t)^{s}`` each with
    its ``(kappa R)^2`` series attached, so that the fit is not biased by the
    curvature term.

    Raises
    ------
    DomainError
        Fewer than four radii with ``R/R_t <= 1e-2``.
    FitError
        Condition number of the design matrix above ``max_condition``.
    """
    mask = profile.radii <= 1e-2 * params.r_t
    r = profile.radii[mask]
    f = profile.values[mask]
    if r.size < 4:
        raise DomainError("bc_amplitudes: need >= 4 radii with R/R_t <= 1e-2")
    kappa = kappa_of_energy(profile.energy)
    sv = s.s
    design = np.array([[frobenius_solution(-sv, kappa, ri, params.r_t)[0],
                        frobenius_solution(sv, kappa, ri, params.r_t)[0]] for ri in r])
    cond = float(np.linalg.cond(design))
    if not cond <= max_condition:
        raise FitError(f"bc_amplitudes: ill-conditioned fit (condition number {cond:.3e})")
    coef, *_ = np.linalg.lstsq(design, f, rcond=None)
    return BoundaryAmplitudes(complex(coef[0]), complex(coef[1]), cond)


def norm_integral(energy, s: ChannelExponent,
                  spec: QuadratureSpec = QuadratureSpec(1e-10, 1e-300, 4000)) -> float:
    r""":math:`\int_0^\infty R\,|K_s(\kappa R)|^2\,dR`.

    Split at ``1/|kappa|``; the tail is cut where
    :math:`e^{-2\mathrm{Re}\,\kappa R}` falls below ``tol * e^{-40}``.
    """
    kappa = kappa_of_energy(energy)
    sv = s.s
    r_split = 1.0 / abs(kappa)
    r_cut = r_split + (40.0 + math.log(1.0 / spec.relative_tolerance)) / (2.0 * kappa.real)

    def integrand(r):
        return np.array([ri * abs(bessel_k(sv, kappa * ri)) ** 2 for ri in r])

    inner = integrate_adaptive(integrand, 0.0, r_split, spec)
    outer = integrate_adaptive(integrand, r_split, r_cut, spec)
    total = (inner + outer).real
    if not (math.isfinite(total) and total > 0):
        raise AccuracyError("norm_integral: non-finite or non-positive result", estimate=total)
    return total
