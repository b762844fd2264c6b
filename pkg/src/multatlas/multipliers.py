"""Multipliers of periodic orbits and their logarithmic derivatives in c.

For an orbit z_0 -> ... -> z_{n-1} -> z_0 of f_c(z) = z^2 + c the multiplier
is rho = prod(2 z_i). Differentiating the cyclic relations
z_{i+1} = z_i^2 + c with respect to c gives the derivative rho' without ever
dividing by an orbit point, and nu = rho' / (n rho).
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import IncompleteOrbitsError, ParabolicError, PoleError

EPS_PARAB = 1e-8
EPS_CLASS = 1e-9


@dataclass(frozen=True)
class NuValue:
    value: complex
    orbit_period: int
    multiplier: complex
    well_defined: bool
    reason: str = ""


@dataclass(frozen=True)
class GOValue:
    """A |O|-th root of the multiplier on the sector (-pi/n, pi/n]."""

    value: complex
    period: int
    branch_arg_bound: float


def _as_complex(c):
    return complex(c)


def cycle_derivatives(cycles):
    """Parameter derivatives z_i'(c) of every point of every cycle.

    Parameters
    ----------
    cycles : ndarray of complex, shape (k, n)
        Row j holds one orbit in forward order.

    Returns
    -------
    ndarray of complex, shape (k, n)
        For each rotation i, z_i' = (1 + sum_{k=1}^{n-1} prod_{j=k}^{n-1} A_{i+j})
        / (1 - rho) with A = 2 z. Evaluating the closed form at every rotation
        avoids the forward recursion z'_{i+1} = A_i z'_i + 1, which amplifies
        rounding by |A| per step on expanding orbits.
    """
    cycles = np.ascontiguousarray(np.atleast_2d(np.asarray(cycles, dtype=complex)))
    return _kernels.cycle_point_derivatives(cycles)


def multiplier_arrays(cycles, eps_parab=EPS_PARAB):
    """Vectorised rho, rho' for a stack of cycles of equal length.

    Rows whose |1 - rho| <= eps_parab get rho' = nan.
    """
    cycles = np.ascontiguousarray(np.atleast_2d(np.asarray(cycles, dtype=complex)))
    rho, rho_prime = _kernels.cycle_multipliers(cycles)
    rho_prime[np.abs(1.0 - rho) <= eps_parab] = np.nan
    return rho, rho_prime


def nu_arrays(cycles, eps_parab=EPS_PARAB, eps_zero=EPS_CLASS):
    """rho, rho', nu for each row of `cycles`.

    nu is nan where undefined: |rho| <= eps_zero (superattracting, rho is 0
    up to rounding) or |rho - 1| <= eps_parab.
    """
    cycles = np.atleast_2d(np.asarray(cycles, dtype=complex))
    n = cycles.shape[1]
    rho, rho_prime = multiplier_arrays(cycles, eps_parab)
    bad = (np.abs(rho) <= eps_zero) | (np.abs(rho - 1.0) <= eps_parab)
    with np.errstate(divide="ignore", invalid="ignore"):
        nu = rho_prime / (n * rho)
    nu[bad] = np.nan
    return rho, rho_prime, nu


def orbit_multiplier_and_derivative(c, orbit_points, eps_parab=EPS_PARAB):
    """Multiplier rho and its derivative rho'(c) for one orbit.

    Raises
    ------
    ParabolicError
        If |1 - rho| <= eps_parab, where the derivative system is singular.
    """
    pts = np.asarray(orbit_points, dtype=complex).reshape(1, -1)
    rho = complex(np.prod(2.0 * pts))
    if abs(1.0 - rho) <= eps_parab:
        raise ParabolicError("parabolic: derivative system singular")
    _, rho_prime = multiplier_arrays(pts, eps_parab)
    return rho, complex(rho_prime[0])


def nu_of_orbit(c, orbit, eps_parab=EPS_PARAB, eps_zero=EPS_CLASS):
    """nu = rho' / (|O| rho) for a located orbit, or an undefined marker."""
    period = orbit.period
    rho = complex(orbit.multiplier)
    if abs(rho) <= eps_zero:
        return NuValue(complex("nan"), period, rho, False, "superattracting")
    if abs(rho - 1.0) <= eps_parab:
        return NuValue(complex("nan"), period, rho, False, "primitive parabolic")
    rho_prime = orbit.multiplier_derivative
    if rho_prime is None:
        _, rho_prime = orbit_multiplier_and_derivative(c, orbit.points, eps_parab)
    return NuValue(complex(rho_prime) / (period * rho), period, rho, True)


def g_of_orbit(orbit):
    return g_value(orbit.multiplier, orbit.period)


def g_value(rho, period):
    rho = complex(rho)
    if rho == 0:
        raise ValueError("g is undefined for a superattracting orbit (rho = 0)")
    arg = cmath.phase(rho)
    if arg == -math.pi:
        arg = math.pi
    value = abs(rho) ** (1.0 / period) * cmath.exp(1j * arg / period)
    return GOValue(value, period, math.pi / period)


def nu_closed_form(c, period, branch=1):
    """Closed-form nu for periods 1, 2 and 3.

    ``branch`` (+1 or -1) selects the sign of the principal square root; the
    two signs correspond to the two orbits of period 1 (or 3). Period 2 has
    a single orbit and ignores the branch.
    """
    c = _as_complex(c)
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if period == 1:
        den = 4 * c - 1 - branch * cmath.sqrt(1 - 4 * c)
        if abs(den) < 1e-300:
            raise PoleError("period-1 formula has a pole here")
        return 2 / den
    if period == 2:
        if abs(2 * c + 2) < 1e-300:
            raise PoleError("period-2 formula has a pole at c = -1")
        return 1 / (2 * c + 2)
    if period == 3:
        cubic = c**3 + 2 * c**2 + c + 1
        den = 6 * (4 * c + 7) * cubic
        if abs(den) < 1e-300:
            raise PoleError("period-3 formula has a pole here")
        root = branch * cmath.sqrt(-4 * c - 7)
        num = 12 * c**3 + 37 * c**2 + 32 * c + 7 - (c**2 + 6 * c + 7) * root
        return num / den
    raise ValueError("closed forms exist only for periods 1, 2, 3")


def nu_closed_form_set(c, period):
    if period == 2:
        return [nu_closed_form(c, 2)]
    return [nu_closed_form(c, period, 1), nu_closed_form(c, period, -1)]


def asymptotic_nu(c):
    """Large-|c| reference value 1/(2c)."""
    c = _as_complex(c)
    if c == 0:
        raise ZeroDivisionError("asymptotic_nu is undefined at c = 0")
    return 1 / (2 * c)


def nu_values_continued(c, period, radius=1e-3, samples=16, cfg=None):
    """nu values of all exact-period orbits at c, by analytic continuation.

    Useful at satellite parabolic parameters such as c = -3/4, where an orbit
    collapses onto a lower-period one and cannot be located directly while
    its nu is still analytic. The monic polynomial whose roots are the nu
    values has single-valued coefficients, so averaging them over a small
    circle around c recovers them at c (mean value property). Not valid when
    two orbits of the same period collide at c.
    """
    from .orbits import orbits_of_period

    c = _as_complex(c)
    coeffs = None
    count = None
    for k in range(samples):
        ck = c + radius * cmath.exp(2j * math.pi * (k + 0.5) / samples)
        block = orbits_of_period(ck, period, cfg)
        if block.incomplete:
            raise IncompleteOrbitsError(
                f"orbit set incomplete at contour point {ck}", [period]
            )
        _, _, nu = nu_arrays(block.cycles)
        if count is None:
            count = len(nu)
            coeffs = np.zeros(count + 1, dtype=complex)
        elif len(nu) != count:
            raise ValueError("orbit count changed along the contour")
        coeffs += np.poly(nu) if count else np.ones(1)
    coeffs /= samples
    if count == 0:
        return np.zeros(0, dtype=complex)
    return np.roots(coeffs)
