"""Dynamics of the critical orbit in the parameter plane.

F_k(c) = f_c^(k-1)(c) is the k-th iterate of the critical point 0. By Vieta
it equals the product of all fixed points of f_c^k, which ties it to the
orbit multipliers (``vieta_product_residual``) and, after a logarithmic
derivative, to the nu values (``summation_identity_residual``).
"""
import cmath
import math
from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .exceptions import CriticallyPeriodicError, EscapedError, IncompleteOrbitsError
from .orbits import as_complex

ESCAPE_RADIUS = 2.0
RENDER_BUDGET = 2000
QUERY_BUDGET = 50000


@dataclass(frozen=True)
class EscapeResult:
    in_mandelbrot: bool
    escape_iter: Optional[int]
    final_modulus: float


@dataclass(frozen=True)
class CriticalOrbitDerivatives:
    F_value: complex
    F_derivative: complex
    k: int


def mandelbrot_member(c, max_iters=QUERY_BUDGET, escape_radius=ESCAPE_RADIUS):
    """Escape-time test from z = 0; in_mandelbrot means "did not escape"."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if escape_radius < 2:
        raise ValueError("escape_radius must be >= 2")
    it, modulus = _kernels.escape_time(as_complex(c), int(max_iters), float(escape_radius))
    if it < 0:
        return EscapeResult(True, None, float(modulus))
    return EscapeResult(False, int(it), float(modulus))


def critical_orbit_derivatives(c, k):
    """F_k(c) and F_k'(c) from w <- w^2 + c, u <- 2 w u + 1 starting at (c, 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    w, u, escaped = _kernels.critical_orbit(as_complex(c), int(k))
    if escaped:
        raise EscapedError("escaped beyond representable range")
    return CriticalOrbitDerivatives(complex(w), complex(u), int(k))


def _divisors(k):
    return [m for m in range(1, k + 1) if k % m == 0]


def _orbits_for(orbits, k):
    flagged = getattr(orbits, "incomplete", {}) or {}
    out = {}
    bad = []
    for m in _divisors(k):
        if m not in orbits or m in flagged:
            bad.append(m)
        else:
            out[m] = orbits[m]
    if bad:
        raise IncompleteOrbitsError(f"orbit data missing or incomplete for periods {bad}", bad)
    return out


def summation_identity_residual(c, k, orbits, f_tol=1e-12):
    """|F_k'/(k F_k) - sum_{m|k} sum_{O of period m} (m/k) nu_O|.

    Every orbit counts, whatever its stability.
    """
    crit = critical_orbit_derivatives(c, k)
    if abs(crit.F_value) <= f_tol:
        raise CriticallyPeriodicError("critically periodic: F_k(c) vanishes")
    lhs = crit.F_derivative / (k * crit.F_value)
    rhs = 0j
    for m, orbs in _orbits_for(orbits, k).items():
        for o in orbs:
            if o.nu is None:
                raise IncompleteOrbitsError(
                    f"nu undefined for a period-{m} orbit ({o.stability.value})", [m]
                )
            rhs += (m / k) * o.nu
    return abs(lhs - rhs)


def vieta_product_residual(c, k, orbits, f_tol=1e-12):
    """|F_k - 2^(-2^k) prod rho_O| / |F_k| over all orbits of period m | k."""
    crit = critical_orbit_derivatives(c, k)
    if abs(crit.F_value) <= f_tol:
        raise CriticallyPeriodicError("critically periodic: F_k(c) vanishes")
    log_prod = -(2**k) * math.log(2.0)
    for orbs in _orbits_for(orbits, k).values():
        for o in orbs:
            if o.multiplier == 0:
                return 1.0
            log_prod += cmath.log(o.multiplier)
    return abs(crit.F_value - cmath.exp(log_prod)) / abs(crit.F_value)
