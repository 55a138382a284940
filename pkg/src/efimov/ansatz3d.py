r"""Three-boson wavefunction in Efimov's product form, and the contact condition.

.. math::
    \psi = F(R)\,(1 + P_{13} + P_{23})\,\frac{\sin[s\arctan(\rho/r)]}{r\rho},
    \qquad r = |r_2 - r_1|,\ \rho = |2r_3 - r_1 - r_2|/\sqrt3,
    \ R = \sqrt{(r^2+\rho^2)/2}.

:func:`bethe_peierls_check` brings one pair together at fixed centre of mass
and extracts :math:`r_{12}\psi = A + B\,r_{12} + O(r_{12}^2)`. At unitarity
the constant term ``B`` must vanish. That happens only for the ``s`` solving
the transcendental equation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ChannelExponent, ModelParams, kappa_of_energy
from .errors import DomainError, FitError
from .specfun import bessel_k

__all__ = [
    "Positions",
    "JacobiSet",
    "jacobi",
    "angular_factor",
    "radial_evaluator",
    "psi",
    "bethe_peierls_check",
]

_ROOT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Positions:
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray

    def __post_init__(self):
        for name in ("r1", "r2", "r3"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, v)

    def permuted(self, order: tuple[int, int, int]) -> "Positions":
        pts = (self.r1, self.r2, self.r3)
        return Positions(*(pts[i] for i in order))

    def translated(self, shift) -> "Positions":
        shift = np.asarray(shift, dtype=float)
        return Positions(self.r1 + shift, self.r2 + shift, self.r3 + shift)

    def min_pair_distance(self) -> float:
        return min(np.linalg.norm(self.r1 - self.r2), np.linalg.norm(self.r1 - self.r3),
                   np.linalg.norm(self.r2 - self.r3))


@dataclass(frozen=True)
class JacobiSet:
    r: float
    rho: float
    hyper_r: float


def jacobi(positions: Positions) -> JacobiSet:
    """Pair distance, third-particle coordinate and hyperradius."""
    r = float(np.linalg.norm(positions.r2 - positions.r1))
    rho = float(np.linalg.norm(2.0 * positions.r3 - positions.r1 - positions.r2)) / _ROOT3
    return JacobiSet(r, rho, math.sqrt(0.5 * (r * r + rho * rho)))


def _faddeev_term(r: float, rho: float, s: complex) -> complex:
    # sin(s atan(rho/r)) / (r rho), regular at rho -> 0
    if r <= 0:
        raise DomainError("coincident pair: psi diverges, use bethe_peierls_check")
    x = rho / r
    if x < 1e-5:
        return s / (r * r) * (1.0 - (1.0 / 3.0 + s * s / 6.0) * x * x)
    return cmath.sin(s * math.atan(x)) / (r * rho)


# identity, P13, P23
_LABELINGS = ((0, 1, 2), (2, 1, 0), (0, 2, 1))


def angular_factor(positions: Positions, s: ChannelExponent) -> complex:
    """Sum of the three Faddeev components, without ``F(R)``."""
    total = 0j
    for order in _LABELINGS:
        j = jacobi(positions.permuted(order))
        total += _faddeev_term(j.r, j.rho, s.s)
    return total


def radial_evaluator(energy, s: ChannelExponent) -> Callable[[float], complex]:
    """``R -> K_s(kappa R)``."""
    kappa = kappa_of_energy(energy)
    return lambda big_r: bessel_k(s.s, kappa * big_r)


def psi(positions: Positions, energy, s: ChannelExponent,
        radial: Callable[[float], complex] | None = None) -> complex:
    """Unnormalised three-body wavefunction.

    Raises
    ------
    DomainError
        If two particles coincide.
    """
    if positions.min_pair_distance() <= 0:
        raise DomainError("coincident pair: psi diverges, use bethe_peierls_check")
    if radial is None:
        radial = radial_evaluator(energy, s)
    big_r = jacobi(positions).hyper_r
    return radial(big_r) * angular_factor(positions, s)


def _richardson(values: np.ndarray, orders: int) -> tuple[complex, float]:
    """Eliminate ``h, h^2, ...`` from a sequence with step ratio 2.

    Returns the finest extrapolated value and the change from the previous
    column, as an error estimate.
    """
    col = np.asarray(values, dtype=complex)
    prev = col
    for p in range(1, orders + 1):
        prev = col
        col = (2 ** p * col[1:] - col[:-1]) / (2 ** p - 1)
    return complex(col[-1]), float(abs(col[-1] - prev[-1]))


def bethe_peierls_check(center, r3, energy, s: ChannelExponent,
                        params: ModelParams = ModelParams(), direction=(1.0, 0.0, 0.0),
                        k_values=range(4, 13)) -> tuple[complex, float]:
    """Test the zero-range contact condition at infinite scattering length.

    Particles 1 and 2 sit at ``center -/+ h/2 * direction`` with
    ``h = 2^-k R_t``. The constant term of ``h * psi`` is obtained from
    Richardson-extrapolated divided differences.

    Returns
    -------
    divergent_coeff : complex
        ``lim h psi``.
    constant_term_ratio : float
        ``|B| R_0 / |A|`` with ``R_0`` the hyperradius at coincidence.
    """
    center = np.asarray(center, dtype=float)
    r3 = np.asarray(r3, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    if np.linalg.norm(r3 - center) <= 0:
        raise DomainError("bethe_peierls_check: r3 must differ from the pair centre")
    radial = radial_evaluator(energy, s)
    hs = np.array([2.0 ** -k for k in k_values]) * params.r_t
    if hs.size < 4:
        raise DomainError("bethe_peierls_check: need at least 4 step sizes")
    g = np.array([h * psi(Positions(center - 0.5 * h * d, center + 0.5 * h * d, r3), energy, s, radial)
                  for h in hs])
    a, _ = _richardson(g, 2)
    slopes = (g[:-1] - g[1:]) / (hs[:-1] - hs[1:])
    b, _ = _richardson(slopes, 2)
    if not (cmath.isfinite(a) and cmath.isfinite(b)) or a == 0:
        raise FitError("bethe_peierls_check: extrapolation failed")
    r0 = jacobi(Positions(center, center, r3)).hyper_r
    return a, abs(b) * r0 / abs(a)
