"""C^2 concave approximations of piecewise-linear concave weights.

The target is continued linearly past both ends, convolved with the C^2
bump ``35/32 (1 - t^2)^3`` scaled to half-width ``h``, restricted back, and
lifted by a constant if it dips below zero.  Convolution with a nonnegative
unit-mass kernel keeps concavity and reproduces affine functions, so only
the ``h``-neighbourhoods of the target's kinks change.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import poly as P
from .errors import HypothesisError, ParameterError
from .funcspace import Concavity, Nonnegativity, PiecewisePolynomial, Weight

GRID_POINTS = 4097

# (1 - t^2)^3 with unit mass on [-1, 1]
KERNEL = P.scale(P.mul(P.mul((1, 0, -1), (1, 0, -1)), (1, 0, -1)), Fraction(35, 32))


def _ramp_profile():
    # R(t) = int_{-1}^{t} (t - s) K(s) ds, the smoothed version of max(t, 0).
    k_anti = P.antideriv(KERNEL)
    sk_anti = P.antideriv(P.mul((0, 1), KERNEL))
    first = P.sub(k_anti, (P.evaluate(k_anti, -1),))
    second = P.sub(sk_anti, (P.evaluate(sk_anti, -1),))
    return P.sub(P.mul((0, 1), first), second)


RAMP = _ramp_profile()


@dataclass(frozen=True)
class SmoothingSchedule:
    """Target weight and number of levels; level ``n`` uses half-width
    ``(b - a) / (8 * 2**n)``."""

    target: Weight
    levels: int

    def __post_init__(self):
        if self.levels < 1:
            raise ParameterError(f"levels must be >= 1, got {self.levels}")
        if self.target.poly.degree > 1:
            raise ParameterError("smoothing targets must be piecewise linear")

    def halfwidth(self, n: int):
        return self.target.interval.length / (8 * 2**n)

    @property
    def lipschitz(self):
        return max(abs(s) for s in self.target.slopes())


def _kinks(target: Weight):
    return [(x, jump) for x, jump in target.poly.jumps(1) if jump != 0]


def _ramp(h, centre):
    # h * R((x - centre)/h) in the global variable
    return P.scale(P.compose_affine(RAMP, 1 / h, -centre / h), h)


def smooth_concave(schedule: SmoothingSchedule, n: int) -> Weight:
    """Level-``n`` C^2 concave nonnegative approximation of the target."""
    if not 1 <= n <= schedule.levels:
        raise ParameterError(f"level must be in 1..{schedule.levels}, got {n}")
    target = schedule.target
    if target.concavity is not Concavity.CERTIFIED_CONCAVE:
        raise HypothesisError(f"target is not certified concave ({target.concavity.value})")
    if target.nonnegativity is not Nonnegativity.CERTIFIED_NONNEGATIVE:
        raise HypothesisError("target is not certified nonnegative")
    iv = target.interval
    a, b = iv.a, iv.b
    h = schedule.halfwidth(n)
    base = target.poly.pieces[0]
    kinks = _kinks(target)
    cuts = {a, b}
    for x, _ in kinks:
        cuts |= {c for c in (x - h, x + h) if a < c < b}
    bp = sorted(cuts)
    pieces = []
    for lo, hi in zip(bp, bp[1:]):
        p = base
        for x, jump in kinks:
            if lo >= x + h:
                p = P.add(p, P.scale((-x, 1), jump))
            elif hi > x - h:
                p = P.add(p, P.scale(_ramp(h, x), jump))
        pieces.append(p)
    pp = PiecewisePolynomial(bp, pieces)
    lowest = min(pp.value(a), pp.value(b))  # concave: minimum at an end
    if lowest < 0:
        pp = pp.map(lambda q: P.add(q, (-lowest,)))
    return Weight("piecewise_polynomial", pp.simplify())


def sup_distance(w1: Weight, w2: Weight, points: int = GRID_POINTS) -> float:
    iv = w1.interval
    x = np.linspace(float(iv.a), float(iv.b), points)
    return float(np.max(np.abs(w1(x) - w2(x))))


def grid_error_bound(schedule: SmoothingSchedule, points: int = GRID_POINTS) -> float:
    """How far the grid maximum can sit below the true sup distance: both
    functions are Lipschitz with the target's constant."""
    spacing = float(schedule.target.interval.length) / (points - 1)
    return float(schedule.lipschitz) * spacing


def smoothing_convergence(schedule: SmoothingSchedule, points: int = GRID_POINTS) -> list[tuple[int, float]]:
    """``(n, sup distance to the target)`` for every level."""
    return [
        (n, sup_distance(smooth_concave(schedule, n), schedule.target, points))
        for n in range(1, schedule.levels + 1)
    ]
