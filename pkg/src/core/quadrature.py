"""Improper integrals of the form ∫ g(t) dt/t on (0, ∞).

Everything in the growth calculus integrates against the scale-invariant
measure dt/t, so quadrature runs in the log variable s = log t, where power
laws become exponentials and a fixed number of octaves covers every scale.
Tails beyond the truncation radius are closed with the power law fitted to
the last octave.
"""

import logging
import math
import warnings
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

logger = logging.getLogger(__name__)

# Octaves integrated numerically before the power-law tail takes over
TRUNCATION_OCTAVES = 60
# Log-slopes flatter than this are treated as non-decaying
MIN_DECAY_SLOPE = 1e-3

ScalarFn = Callable[[float], float]


class NonConvergenceError(ArithmeticError):
    """A quadrature, bisection or limit did not settle."""


def _quad_log(g: ScalarFn, lo: float, hi: float, rel_tol: float) -> float:
    """∫_lo^hi g(t) dt/t computed as ∫ g(e^s) ds."""
    if hi <= lo:
        return 0.0

    def integrand(s: float) -> float:
        return float(g(math.exp(s)))

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, abserr = quad(
                integrand,
                math.log(lo),
                math.log(hi),
                epsabs=0.0,
                epsrel=rel_tol,
                limit=400,
            )
        except IntegrationWarning as e:
            raise NonConvergenceError(f"Quadrature did not converge on [{lo:g}, {hi:g}]: {e}") from e

    if not math.isfinite(value):
        raise NonConvergenceError(f"Quadrature produced {value} on [{lo:g}, {hi:g}]")
    logger.debug("quad [%g, %g] = %.12g (err %.2g)", lo, hi, value, abserr)
    return value


def _log_slope(g: ScalarFn, t: float, towards: float) -> float:
    """Observed d log g / d log t over one octave ending at t."""
    a, b = float(g(t)), float(g(t * towards))
    if a <= 0.0 or b <= 0.0:
        return 0.0
    return (math.log(a) - math.log(b)) / math.log(1.0 / towards)


def log_integral(g: ScalarFn, lo: float, hi: float, rel_tol: float = 1e-9) -> float:
    """∫_lo^hi g(t) dt/t for 0 < lo <= hi < ∞."""
    if lo <= 0.0:
        raise ValueError(f"Lower limit must be positive, got {lo}")
    return _quad_log(g, lo, hi, rel_tol)


def integral_to_infinity(
    g: ScalarFn,
    r: float,
    rel_tol: float = 1e-9,
    r_max: float = None,
) -> Tuple[float, float]:
    """∫_r^∞ g(t) dt/t; returns (value, truncation radius).

    Raises NonConvergenceError when g does not decay like a power at the
    truncation radius.
    """
    if r <= 0.0:
        raise ValueError(f"Lower limit must be positive, got {r}")
    big = r_max if r_max is not None else r * 2.0**TRUNCATION_OCTAVES
    body = _quad_log(g, r, big, rel_tol)

    slope = _log_slope(g, big, 0.5)
    g_big = float(g(big))
    if g_big == 0.0:
        return body, big
    if slope > -MIN_DECAY_SLOPE:
        raise NonConvergenceError(
            f"Integrand does not decay at t={big:g} (log-slope {slope:.3g}); tail diverges"
        )
    return body + g_big / (-slope), big


def integral_from_zero(
    g: ScalarFn,
    r: float,
    rel_tol: float = 1e-9,
) -> Tuple[float, float]:
    """∫_0^r g(t) dt/t; returns (value, truncation radius near zero)."""
    if r <= 0.0:
        return 0.0, 0.0
    small = r * 2.0**-TRUNCATION_OCTAVES
    body = _quad_log(g, small, r, rel_tol)

    g_small = float(g(small))
    if g_small == 0.0:
        return body, small
    slope = _log_slope(g, small, 2.0)
    if slope < MIN_DECAY_SLOPE:
        raise NonConvergenceError(
            f"Integrand does not vanish at t={small:g} (log-slope {slope:.3g}); head diverges"
        )
    return body + g_small / slope, small
