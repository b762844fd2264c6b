"""Periodic-orbit multipliers of z^2 + c and the accumulation set X.

Finds every periodic orbit up to a period cap, computes multipliers and
their logarithmic derivatives nu in the parameter, and uses the convex hull
of the nu values to decide, pixel by pixel, whether c lies in X.
"""
__version__ = "0.1.0"

from .atlas import (
    IN_M,
    NOT_DETECTED,
    GridSpec,
    RenderConfig,
    XGrid,
    YcDataset,
    averaging_density_probe,
    build_yc,
    classify_parameter,
    render_xset,
)
from .dynamics import (
    critical_orbit_derivatives,
    mandelbrot_member,
    summation_identity_residual,
    vieta_product_residual,
)
from .exceptions import (
    CriticallyPeriodicError,
    EscapedError,
    IncompleteOrbitsError,
    MultatlasError,
    ParabolicError,
    PoleError,
)
from .hull import HullPolygon, contains_origin, convex_hull, signed_distance
from .multipliers import (
    asymptotic_nu,
    g_of_orbit,
    nu_closed_form,
    nu_of_orbit,
    nu_values_continued,
    orbit_multiplier_and_derivative,
)
from .orbits import (
    ComplexParam,
    OrbitFinderConfig,
    PeriodicOrbit,
    Stability,
    find_periodic_points,
    group_into_orbits,
    iterate_map,
    orbits_of_period,
    orbits_up_to,
)
from .output import emit_xset_image, emit_yc_figure

__all__ = [
    "IN_M",
    "NOT_DETECTED",
    "GridSpec",
    "RenderConfig",
    "XGrid",
    "YcDataset",
    "averaging_density_probe",
    "build_yc",
    "classify_parameter",
    "render_xset",
    "critical_orbit_derivatives",
    "mandelbrot_member",
    "summation_identity_residual",
    "vieta_product_residual",
    "CriticallyPeriodicError",
    "EscapedError",
    "IncompleteOrbitsError",
    "MultatlasError",
    "ParabolicError",
    "PoleError",
    "HullPolygon",
    "contains_origin",
    "convex_hull",
    "signed_distance",
    "asymptotic_nu",
    "g_of_orbit",
    "nu_closed_form",
    "nu_of_orbit",
    "nu_values_continued",
    "orbit_multiplier_and_derivative",
    "ComplexParam",
    "OrbitFinderConfig",
    "PeriodicOrbit",
    "Stability",
    "find_periodic_points",
    "group_into_orbits",
    "iterate_map",
    "orbits_of_period",
    "orbits_up_to",
    "emit_xset_image",
    "emit_yc_figure",
]
