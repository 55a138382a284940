r"""Closed-form Efimov spectrum with Braaten-Hammer three-body losses.

Natural units throughout: :math:`\hbar = m = 1`, lengths in units of the
three-body parameter, energies in :math:`\hbar^2/(m R_t^2)`. Physical
numbers only appear through :func:`to_physical_units`.

The channel exponent is :math:`s = i|s|` with :math:`|s|` the positive root of

.. math::
    x\cosh(\pi x/2) - \frac{8}{\sqrt 3}\sinh(\pi x/6) = 0,

which is :math:`s\cos(s\pi/2) - (8/\sqrt3)\sin(s\pi/6) = 0` evaluated at
:math:`s = ix` (``cos(ix) = cosh x``, ``sin(ix) = i sinh x``) and divided by
the overall factor ``i``.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

from scipy import constants

from .errors import DomainError, SolverError
from .specfun import ln_gamma

__all__ = [
    "ChannelExponent",
    "ModelParams",
    "TrimerState",
    "UnitSystem",
    "transcendental_residual",
    "solve_channel_exponent",
    "channel_exponent",
    "lossless_energy",
    "lossy_energy",
    "critical_eta",
    "kappa_of_energy",
    "decay_rate",
    "decay_rate_closed_form",
    "trimer_size",
    "loss_probability",
    "energy_angle",
    "analytic_state",
    "to_physical_units",
    "from_physical_units",
]

_EIGHT_OVER_ROOT3 = 8.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class ChannelExponent:
    """``s = i * magnitude`` together with the residual reached by the solver."""

    magnitude: float
    residual: float = 0.0

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError("channel exponent magnitude must be positive")

    @property
    def s(self) -> complex:
        return 1j * self.magnitude

    @property
    def scaling_factor(self) -> float:
        """Energy ratio between neighbouring states, ``exp(2 pi / |s|)``."""
        return math.exp(2.0 * math.pi / self.magnitude)


@dataclass(frozen=True)
class ModelParams:
    """Inelasticity ``eta_star`` and three-body parameter ``r_t``."""

    eta_star: float = 0.0
    r_t: float = 1.0

    def __post_init__(self):
        if not self.eta_star >= 0:
            raise ValueError(f"eta_star must be >= 0, got {self.eta_star}")
        if not self.r_t > 0:
            raise ValueError(f"r_t must be > 0, got {self.r_t}")


@dataclass(frozen=True)
class TrimerState:
    """One resonance of the rotated spectrum, in natural units.

    Attributes
    ----------
    n : int
        Efimov index.
    energy : complex
        ``E = -kappa**2 / 2``.
    kappa : complex
        Decay constant with ``Re kappa > 0``.
    gamma : float
        ``hbar * Gamma = -2 Im E``.
    size : float
        ``1 / Re kappa``.
    """

    n: int
    energy: complex
    kappa: complex
    gamma: float
    size: float

    @classmethod
    def from_energy(cls, n: int, energy: complex) -> "TrimerState":
        kappa = kappa_of_energy(energy)
        return cls(n=n, energy=complex(energy), kappa=kappa,
                   gamma=decay_rate(energy), size=1.0 / kappa.real)


@dataclass(frozen=True)
class UnitSystem:
    """Length of one natural unit (``R_t``) in metres and the atomic mass in kg."""

    r_t_meters: float
    mass_kg: float

    def __post_init__(self):
        if not (self.r_t_meters > 0 and self.mass_kg > 0):
            raise ValueError("UnitSystem needs positive r_t_meters and mass_kg")

    @classmethod
    def from_nm_amu(cls, r_t_nm: float, mass_amu: float) -> "UnitSystem":
        return cls(r_t_meters=r_t_nm * 1e-9,
                   mass_kg=mass_amu * constants.physical_constants["atomic mass constant"][0])

    @classmethod
    def cesium(cls) -> "UnitSystem":
        """133Cs near the -11 G resonance: R_t = 30 nm."""
        return cls.from_nm_amu(30.0, 133.0)

    @property
    def energy_unit(self) -> float:
        """``hbar**2 / (m R_t**2)`` in joules."""
        return constants.hbar ** 2 / (self.mass_kg * self.r_t_meters ** 2)


def transcendental_residual(x: float) -> float:
    """``x cosh(pi x/2) - (8/sqrt 3) sinh(pi x/6)``; vanishes at ``x = |s|``."""
    if not x > 0:
        raise DomainError(f"transcendental_residual needs x > 0, got {x}")
    return x * math.cosh(0.5 * math.pi * x) - _EIGHT_OVER_ROOT3 * math.sinh(math.pi * x / 6.0)


def _residual_slope(x: float) -> float:
    return (math.cosh(0.5 * math.pi * x) + 0.5 * math.pi * x * math.sinh(0.5 * math.pi * x)
            - _EIGHT_OVER_ROOT3 * math.pi / 6.0 * math.cosh(math.pi * x / 6.0))


def solve_channel_exponent(tol: float = 1e-12, bracket: tuple[float, float] = (0.5, 2.0),
                           max_iter: int = 200) -> ChannelExponent:
    """Root of :func:`transcendental_residual` by Newton steps kept inside a bisection bracket.

    The returned iterate is the one with the smallest residual seen, so a
    tighter ``tol`` can never give a worse answer.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    lo, hi = bracket
    f_lo, f_hi = transcendental_residual(lo), transcendental_residual(hi)
    if f_lo * f_hi > 0:
        raise SolverError(f"no sign change of the residual on [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    best_x, best_f = x, math.inf
    for _ in range(max_iter):
        f = transcendental_residual(x)
        if abs(f) < best_f:
            best_x, best_f = x, abs(f)
        if abs(f) < tol or f == 0.0:
            return ChannelExponent(best_x, best_f)
        if (f < 0) == (f_lo < 0):
            lo, f_lo = x, f
        else:
            hi = x
        step = x - f / _residual_slope(x)
        x = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo < 4 * math.ulp(x):
            break
    if best_f < tol:
        return ChannelExponent(best_x, best_f)
    raise SolverError(f"channel exponent: residual {best_f:.3e} above tol {tol:.3e}")


@functools.lru_cache(maxsize=None)
def channel_exponent() -> ChannelExponent:
    """The bosonic channel exponent solved to 1e-14, computed once."""
    return solve_channel_exponent(1e-14)


def lossless_energy(n: int, s: ChannelExponent, r_t: float = 1.0) -> float:
    """Efimov energy ``E_n^0`` without losses (strictly negative)."""
    if not r_t > 0:
        raise DomainError("r_t must be positive")
    mag = s.magnitude
    arg_gamma = ln_gamma(1.0 + s.s).imag
    return -2.0 / r_t ** 2 * math.exp(2.0 * arg_gamma / mag + 2.0 * math.pi * n / mag)


def critical_eta(s: ChannelExponent) -> float:
    """Inelasticity ``pi |s| / 2`` above which no normalisable state exists."""
    return 0.5 * math.pi * s.magnitude


def _check_eta(eta_star: float, s: ChannelExponent) -> None:
    if not 0 <= eta_star < critical_eta(s):
        raise DomainError(
            f"eta* = {eta_star} outside [0, {critical_eta(s):.6f}): "
            "no normalisable solution for eta* >= pi|s|/2"
        )


def lossy_energy(n: int, params: ModelParams, s: ChannelExponent) -> complex:
    """Rotated energy ``exp(2i eta*/|s|) E_n^0``."""
    _check_eta(params.eta_star, s)
    e0 = lossless_energy(n, s, params.r_t)
    if params.eta_star == 0:
        return complex(e0, 0.0)
    return cmath.exp(2j * params.eta_star / s.magnitude) * e0


def kappa_of_energy(energy) -> complex:
    """``kappa = sqrt(-2E)`` on the branch ``Re kappa > 0``."""
    energy = complex(energy)
    if energy == 0:
        raise DomainError("kappa_of_energy: E = 0 has no decay constant")
    kappa = cmath.sqrt(-2.0 * energy)
    if kappa.real <= 0:
        raise DomainError(
            f"kappa_of_energy: E = {energy!r} on the positive real axis has Re kappa = 0 "
            "(eta* = eta*_c boundary)"
        )
    return kappa


def decay_rate(energy, rel_tol: float = 1e-13) -> float:
    """``hbar Gamma = -2 Im E``.

    Imaginary parts above zero but within ``rel_tol * |E|`` are round-off and
    give zero; larger ones describe a growing state and are rejected.
    """
    energy = complex(energy)
    if energy.imag > 0:
        if energy.imag > rel_tol * abs(energy):
            raise DomainError(f"decay_rate: Im E = {energy.imag:.3e} > 0 is a growing state")
        return 0.0
    return -2.0 * energy.imag


def decay_rate_closed_form(n: int, params: ModelParams, s: ChannelExponent) -> float:
    """``2 sin(2 eta*/|s|) |E_n^0|``."""
    _check_eta(params.eta_star, s)
    return 2.0 * math.sin(2.0 * params.eta_star / s.magnitude) * abs(lossless_energy(n, s, params.r_t))


def trimer_size(state: TrimerState) -> float:
    """Size ``1 / Re kappa`` (units of R_t)."""
    kappa = complex(state.kappa)
    if kappa.real <= 0:
        raise DomainError("trimer_size needs Re kappa > 0")
    return 1.0 / kappa.real


def loss_probability(eta_star: float) -> float:
    """Probability ``1 - exp(-4 eta*)`` of recombination per short-range reflection."""
    if not eta_star >= 0:
        raise DomainError("eta_star must be >= 0")
    return -math.expm1(-4.0 * eta_star)


def energy_angle(energy) -> float:
    """Argument of E in ``[0, 2 pi)``, counterclockwise from the positive real axis."""
    phi = cmath.phase(complex(energy))
    return phi + 2.0 * math.pi if phi < 0 else phi


def analytic_state(n: int, params: ModelParams, s: ChannelExponent) -> TrimerState:
    return TrimerState.from_energy(n, lossy_energy(n, params, s))


def to_physical_units(state: TrimerState, units: UnitSystem) -> tuple[complex, float, float]:
    """Return ``(energy_joules, gamma_per_second, size_meters)``."""
    e_unit = units.energy_unit
    return (complex(state.energy) * e_unit,
            state.gamma * e_unit / constants.hbar,
            state.size * units.r_t_meters)


def from_physical_units(n: int, energy_joules: complex, units: UnitSystem) -> TrimerState:
    """Inverse of :func:`to_physical_units` (the state is rebuilt from its energy)."""
    return TrimerState.from_energy(n, complex(energy_joules) / units.energy_unit)
