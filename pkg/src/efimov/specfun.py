r"""Complex special functions: log-gamma, Macdonald function, adaptive quadrature.

Only what the spectrum and the hyperradial wavefunction need is covered:

* :func:`ln_gamma` -- principal branch of :math:`\log\Gamma(z)` (Lanczos, g=7)
  with upward recurrence for :math:`\mathrm{Re}\,z < 1/2`.
* :func:`bessel_k` -- :math:`K_\nu(z)` for complex order and
  :math:`\mathrm{Re}\,z > 0`. Two regimes:

  - :math:`|z| \le 2`: ascending series
    :math:`K_\nu = \frac{\pi}{2}\,\frac{I_{-\nu}(z) - I_\nu(z)}{\sin \pi\nu}`,
  - :math:`|z| > 2`: :math:`K_\nu(z) = e^{-z}\int_0^T e^{-z(\cosh t - 1)}
    \cosh(\nu t)\,dt` with :math:`T` chosen from the doubly exponential decay,
  - :math:`|z| > 2` with :math:`\mathrm{Re}\,z < |z|/2`: a Laplace-type
    integral (:func:`bessel_k_laplace`) whose damping is independent of
    :math:`\arg z`.

  Orders within ``0.01`` of an integer always use the integral, since the
  reflection formula degenerates there.
* :func:`integrate_adaptive` -- vectorised Gauss-Kronrod (7, 15) on complex
  integrands.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "SERIES_CROSSOVER",
    "ln_gamma",
    "gamma",
    "bessel_k",
    "bessel_k_series",
    "bessel_k_integral",
    "bessel_k_laplace",
    "bessel_i_series",
    "small_z_coefficients",
    "integrate_adaptive",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and panel budget for :func:`integrate_adaptive`."""

    relative_tolerance: float = 1e-12
    absolute_tolerance: float = 1e-14
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()

#: |z| at which bessel_k switches from the ascending series to the integral.
SERIES_CROSSOVER = 2.0
# beyond the crossover, arguments with Re z < LAPLACE_SWITCH |z| use bessel_k_laplace
LAPLACE_SWITCH = 0.5

# ---------------------------------------------------------------------------
# log-gamma

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _ln_gamma_lanczos(z: complex) -> complex:
    # valid for Re z >= 1/2
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def ln_gamma(z) -> complex:
    """Principal branch of ``log Gamma(z)``.

    The branch is the one analytic on the plane cut along the non-positive
    real axis, i.e. the one satisfying ``ln_gamma(z + 1) = ln_gamma(z) + log(z)``
    with the principal ``log``.

    Raises
    ------
    DomainError
        If ``z`` is a pole (0, -1, -2, ...).
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"ln_gamma: non-finite argument {z!r}")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise DomainError(f"ln_gamma: pole of Gamma at z = {int(z.real)}")
    if z.real >= 0.5:
        return _ln_gamma_lanczos(z)
    shift = int(math.ceil(0.5 - z.real))
    acc = 0j
    for j in range(shift):
        acc += cmath.log(z + j)
    return _ln_gamma_lanczos(z + shift) - acc


def gamma(z) -> complex:
    """``Gamma(z)`` as ``exp(ln_gamma(z))``."""
    return cmath.exp(ln_gamma(z))


# ---------------------------------------------------------------------------
# adaptive quadrature

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
# Gauss points are the odd-indexed Kronrod abscissae
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[[9, 11, 13]] = _WG[2::-1]
_WG15[7] = _WG[3]


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(t.ravel()), dtype=complex).reshape(t.shape)
    if not np.all(np.isfinite(vals)):
        raise AccuracyError("integrand returned non-finite values")
    k = half * (vals @ _WK)
    g = half * (vals @ _WG15)
    return k, np.abs(k - g)


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    initial_panels: int = 8,
) -> complex:
    """Integrate a complex function over ``[a, b]``.

    ``f`` is called with 1-D arrays of abscissae and must return an array of
    the same length. Panels are bisected level by level until the summed
    Kronrod-Gauss difference is below
    ``max(absolute_tolerance, relative_tolerance * |I|)``.

    Raises
    ------
    AccuracyError
        When the panel budget is exhausted; ``estimate`` and ``error`` carry
        the best result.
    """
    if not b > a:
        raise DomainError(f"integrate_adaptive needs a < b, got [{a}, {b}]")
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    done_val = 0j
    done_err = 0.0
    n_panels = initial_panels
    while True:
        val, err = _gk15(f, lo, hi)
        total = done_val + val.sum()
        total_err = done_err + err.sum()
        target = max(spec.absolute_tolerance, spec.relative_tolerance * abs(total))
        if total_err <= target:
            return complex(total)
        # panels meeting a length-proportional share of the target are frozen
        share = target * (hi - lo) / (b - a)
        ok = err <= share
        done_val += val[ok].sum()
        done_err += err[ok].sum()
        lo, hi = lo[~ok], hi[~ok]
        n_panels += lo.size
        if n_panels > spec.max_subdivisions or lo.size == 0:
            raise AccuracyError(
                f"integrate_adaptive: budget of {spec.max_subdivisions} panels "
                f"exhausted (error {total_err:.3e} > target {target:.3e})",
                estimate=complex(total),
                error=float(total_err),
            )
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])


# ---------------------------------------------------------------------------
# modified Bessel functions


def _check_arg(z: complex) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"bessel_k: non-finite argument {z!r}")
    if z.real <= 0.0:
        raise DomainError(f"bessel_k: needs Re z > 0, got z = {z!r}")


def bessel_i_series(order, z, max_terms: int = 400) -> complex:
    r"""Ascending series for :math:`I_\nu(z)`.

    Terms are generated by the ratio
    :math:`t_{k}/t_{k-1} = (z/2)^2 / (k(k+\nu))`, starting from
    :math:`(z/2)^\nu/\Gamma(\nu+1)`.
    """
    nu = complex(order)
    z = complex(z)
    q = 0.25 * z * z
    term = cmath.exp(nu * cmath.log(0.5 * z) - ln_gamma(nu + 1.0))
    total = term
    for k in range(1, max_terms):
        term *= q / (k * (k + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise AccuracyError("bessel_i_series did not converge", estimate=total)


def _near_integer(nu: complex) -> bool:
    return abs(cmath.sin(math.pi * nu)) < 1e-2


def bessel_k_series(order, z) -> complex:
    r"""Small-argument :math:`K_\nu(z)` through the reflection formula."""
    nu = complex(order)
    z = complex(z)
    _check_arg(z)
    if _near_integer(nu):
        raise DomainError(f"bessel_k_series: order {nu!r} too close to an integer")
    diff = bessel_i_series(-nu, z) - bessel_i_series(nu, z)
    return 0.5 * math.pi * diff / cmath.sin(math.pi * nu)


def _truncation_point(z: complex, nu: complex, tol: float) -> float:
    # Re z (cosh T - 1) - |Re nu| T >= 40 + ln(1/tol)
    budget = 40.0 + math.log(1.0 / tol)
    growth = abs(nu.real)
    t = math.acosh(1.0 + budget / z.real)
    while z.real * (math.cosh(t) - 1.0) - growth * t < budget:
        t *= 1.25
    return t


def bessel_k_integral(order, z, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    r""":math:`K_\nu(z)` from :math:`\int_0^\infty e^{-z\cosh t}\cosh(\nu t)\,dt`.

    The factor :math:`e^{-z}` is pulled out so that the quadrature works on
    an integrand of order one whatever :math:`\mathrm{Re}\,z`.
    """
    nu = complex(order)
    z = complex(z)
    _check_arg(z)
    upper = _truncation_point(z, nu, spec.relative_tolerance)

    def integrand(t):
        return np.exp(-2.0 * z * np.sinh(0.5 * t) ** 2) * np.cosh(nu * t)

    return cmath.exp(-z) * integrate_adaptive(integrand, 0.0, upper, spec)


def bessel_k_laplace(order, z, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    r""":math:`K_\nu(z)` from the Laplace-type integral, for ``Re nu > -1/2``.

    .. math::
        K_\nu(z) = \sqrt{\frac{\pi}{2z}}\,\frac{e^{-z}}{\Gamma(\nu+\tfrac12)}
        \int_0^\infty e^{-u}\,u^{\nu-1/2}\,\Bigl(1+\frac{u}{2z}\Bigr)^{\nu-1/2}du

    evaluated in ``x = ln u``. The damping ``e^{-u}`` does not depend on
    ``arg z``, so this stays cheap near the imaginary axis where the cosh
    integral oscillates wildly.
    """
    nu = complex(order)
    z = complex(z)
    _check_arg(z)
    a = nu.real + 0.5
    if a <= 0:
        raise DomainError("bessel_k_laplace: needs Re(order) > -1/2")
    budget = 40.0 + math.log(1.0 / spec.relative_tolerance) + 0.5 * math.pi * abs(nu.imag)
    x_lo = -budget / a
    u_hi = budget + 1.0
    while u_hi - (a + abs(nu.real - 0.5)) * math.log(u_hi) < budget:
        u_hi *= 1.5
    half = nu - 0.5

    def integrand(x):
        u = np.exp(x)
        return np.exp(-u + (nu + 0.5) * x + half * np.log(1.0 + u / (2.0 * z)))

    total = integrate_adaptive(integrand, x_lo, math.log(u_hi), spec)
    return cmath.sqrt(0.5 * math.pi / z) * cmath.exp(-z - ln_gamma(nu + 0.5)) * total


def bessel_k(order, z, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    r"""Modified Bessel function of the second kind :math:`K_\nu(z)`.

    Parameters
    ----------
    order : complex
        Order :math:`\nu`; purely imaginary in all physical uses.
    z : complex
        Argument with ``Re z > 0``.
    spec : QuadratureSpec
        Tolerances for the integral regime.

    Raises
    ------
    DomainError
        If ``Re z <= 0``.
    AccuracyError
        If the quadrature budget is exhausted.
    """
    nu = complex(order)
    z = complex(z)
    _check_arg(z)
    # K is even in the order; fold onto Re nu >= 0 (Im nu >= 0 on the axis)
    if nu.real < 0 or (nu.real == 0 and nu.imag < 0):
        nu = -nu
    if abs(z) <= SERIES_CROSSOVER and not _near_integer(nu):
        return bessel_k_series(nu, z)
    if z.real < LAPLACE_SWITCH * abs(z):
        return bessel_k_laplace(nu, z, spec)
    return bessel_k_integral(nu, z, spec)


def small_z_coefficients(order, kappa, r_t: float) -> tuple[complex, complex]:
    r"""Leading small-argument amplitudes of :math:`K_s(\kappa R)`.

    Returns ``(c_minus, c_plus)`` with

    .. math::
        K_s(\kappa R) = c_- (R/R_t)^{-s} + c_+ (R/R_t)^{s} + O(R^2),
        \qquad c_\mp = \tfrac12\,\Gamma(\pm s)\,(\kappa R_t/2)^{\mp s}.
    """
    s = complex(order)
    kappa = complex(kappa)
    if _near_integer(s):
        raise DomainError(f"small_z_coefficients: integer order {s!r} has log terms")
    if kappa.real <= 0:
        raise DomainError(f"small_z_coefficients: needs Re kappa > 0, got {kappa!r}")
    log_half = cmath.log(0.5 * kappa * r_t)
    c_minus = 0.5 * cmath.exp(ln_gamma(s) - s * log_half)
    c_plus = 0.5 * cmath.exp(ln_gamma(-s) + s * log_half)
    return c_minus, c_plus
