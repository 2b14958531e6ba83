"""Exact rational and adaptive Gauss-Legendre integration.

Integrands of the form weight x (derivative of f) x (derivative of f) are
the only thing the rest of the package integrates.  When every factor is a
rational piecewise polynomial the integral is computed exactly with
:class:`~fractions.Fraction`; otherwise panels are split at every declared
breakpoint and refined by bisection until a 16-node and a 32-node
Gauss-Legendre rule agree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import poly as P
from .errors import ConvergenceError, ModeError, ParameterError
from .funcspace import Interval, PiecewisePolynomial, Weight, combine

DEFAULT_TOL = 1e-11
LOW_NODES, HIGH_NODES = 16, 32
MAX_SUBDIVISIONS = 4096

_X16, _W16 = leggauss(LOW_NODES)
_X32, _W32 = leggauss(HIGH_NODES)
# Panels whose two rules differ by less than this many ulps of the
# absolute integral are at the roundoff floor and cannot be improved.
_ROUNDOFF_ULPS = 64


class QuadMode(enum.Enum):
    EXACT = "Exact"
    ADAPTIVE = "Adaptive"


@dataclass(frozen=True)
class QuadratureResult:
    value: Fraction | float
    abs_error_estimate: float
    mode: QuadMode
    subdivisions: int

    def __float__(self):
        return float(self.value)


def _as_pp(obj):
    if isinstance(obj, Weight):
        return obj.poly
    return obj


def integrate_poly_exact(p: PiecewisePolynomial, iv: Interval | None = None) -> Fraction:
    """Sum of antiderivative differences over the pieces inside ``iv``."""
    p = _as_pp(p)
    if not isinstance(p, PiecewisePolynomial) or not p.is_rational:
        raise ModeError("exact integration needs rational piecewise-polynomial input")
    if iv is not None:
        if not iv.is_rational:
            raise ModeError("exact integration needs a rational interval")
        p = p.restrict(iv.a, iv.b)
    total = Fraction(0)
    for (lo, hi), piece in zip(zip(p.breakpoints, p.breakpoints[1:]), p.pieces):
        total += P.definite(piece, lo, hi)
    return total


def _panels(iv: Interval, breakpoints):
    a, b = float(iv.a), float(iv.b)
    pts = sorted({a, b} | {float(x) for x in breakpoints if a < float(x) < b})
    return np.array(pts[:-1]), np.array(pts[1:])


def integrate_adaptive(
    g,
    iv: Interval,
    tol: float = DEFAULT_TOL,
    breakpoints=(),
    max_subdivisions: int = MAX_SUBDIVISIONS,
) -> QuadratureResult:
    """Integrate a vectorised callable ``g`` over ``iv``.

    Panels start at ``iv`` split at ``breakpoints`` (plus any
    ``g.breakpoints``).  A panel is accepted when the 16- and 32-node rules
    agree to within its share of ``tol``, or to within the roundoff floor of
    the panel's absolute integral; otherwise it is bisected.  The estimate
    returned is the accepted 32-node sum and the error the sum of
    disagreements.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    bps = list(breakpoints) + list(getattr(g, "breakpoints", ()))
    lo, hi = _panels(iv, bps)
    total_len = float(iv.b) - float(iv.a)
    value, error, accepted, splits = 0.0, 0.0, 0, 0
    eps = np.finfo(float).eps
    while lo.size:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        y16 = g(mid[:, None] + half[:, None] * _X16[None, :])
        y32 = g(mid[:, None] + half[:, None] * _X32[None, :])
        q16 = half * (y16 @ _W16)
        q32 = half * (y32 @ _W32)
        absq = half * (np.abs(y32) @ _W32)
        err = np.abs(q32 - q16)
        ok = err <= np.maximum(tol * (2 * half) / total_len, _ROUNDOFF_ULPS * eps * absq)
        value += float(np.sum(q32[ok]))
        error += float(np.sum(err[ok]))
        accepted += int(np.sum(ok))
        bad_lo, bad_hi = lo[~ok], hi[~ok]
        if bad_lo.size:
            splits += bad_lo.size
            if splits > max_subdivisions:
                value += float(np.sum(q32[~ok]))
                error += float(np.sum(err[~ok]))
                raise ConvergenceError(
                    f"subdivision budget {max_subdivisions} exhausted "
                    f"(error estimate {error:.3g} > tol {tol:.3g})",
                    best_estimate=value,
                    error_estimate=error,
                )
            m = 0.5 * (bad_lo + bad_hi)
            lo = np.concatenate([bad_lo, m])
            hi = np.concatenate([m, bad_hi])
        else:
            break
    return QuadratureResult(value, error, QuadMode.ADAPTIVE, accepted)


def _product_callable(w, u, v):
    def g(x):
        return w(x) * u(x) * v(x)

    g.breakpoints = tuple(
        bp for f in (w, u, v) for bp in getattr(f, "breakpoints", ())
    )
    return g


def weighted_product_integral(
    w, u, v, iv: Interval | None = None, tol: float = DEFAULT_TOL, exact: bool | None = None
) -> QuadratureResult:
    """``integral of w*u*v over iv``.

    Routes to exact rational integration over the merged breakpoint partition
    when all three factors are rational piecewise polynomials (unless
    ``exact=False``); ``exact=True`` makes the exact route mandatory.
    """
    w, u, v = _as_pp(w), _as_pp(u), _as_pp(v)
    if iv is None:
        iv = w.interval if isinstance(w, PiecewisePolynomial) else u.interval
    can_exact = iv.is_rational and all(
        isinstance(f, PiecewisePolynomial) and f.is_rational for f in (w, u, v)
    )
    if exact and not can_exact:
        raise ModeError("exact mode needs rational piecewise-polynomial factors")
    if can_exact and exact is not False:
        prod = combine(combine(w, u, P.mul), v, P.mul)
        value = integrate_poly_exact(prod, iv)
        return QuadratureResult(value, 0.0, QuadMode.EXACT, len(prod.pieces))
    return integrate_adaptive(_product_callable(w, u, v), iv, tol)


def integrate_poly_cos_grid(p: PiecewisePolynomial, origin, period) -> dict[int, Fraction]:
    """Exact ``integral of p(x) * cos(2*pi*(x - origin)/period)`` over ``p``'s span.

    Every breakpoint of ``p`` must sit on the grid ``origin + k*period`` so the
    cosine is 1 and the sine 0 there.  The result is returned as
    ``{m: c_m}`` meaning ``sum(c_m * pi**(-2*m))``.
    """
    if not p.is_rational or not (P.is_rational(origin) and P.is_rational(period)):
        raise ModeError("cosine-grid integration needs rational data")
    origin, period = Fraction(origin), Fraction(period)
    for x in p.breakpoints:
        if ((x - origin) / period).denominator != 1:
            raise ModeError(f"breakpoint {x} is off the grid {origin} + k*{period}")
    # Integration by parts: sum over odd j of (-1)^((j-1)/2) [p^(j)] / omega^(j+1),
    # with 1/omega^(2m) = (period/2)^(2m) * pi^(-2m).
    out: dict[int, Fraction] = {}
    half = period / 2
    for (lo, hi), piece in zip(zip(p.breakpoints, p.breakpoints[1:]), p.pieces):
        j = 1
        while j < len(piece):
            d = P.deriv(piece, j)
            m = (j + 1) // 2
            sign = -1 if (m - 1) % 2 else 1
            jump = P.evaluate(d, hi) - P.evaluate(d, lo)
            if jump:
                out[m] = out.get(m, Fraction(0)) + sign * jump * half ** (2 * m)
            j += 2
    return {m: c for m, c in out.items() if c != 0}


def pi_series_value(series: dict[int, Fraction]) -> float:
    return math.fsum(float(c) * math.pi ** (-2 * m) for m, c in series.items())
