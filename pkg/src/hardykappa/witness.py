"""Counterexamples for convex and decreasing weights.

For ``w(x) = x**4`` on ``[0, 1]`` the linear-quintic-linear family ``f_delta``
drives kappa to infinity as ``delta -> 0``.  Everything here runs in exact
rational arithmetic so the closed forms for the coefficients and for kappa
can be compared bit for bit with the interpolation solve and exact
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import poly as P
from .errors import ParameterError
from .funcspace import DD, UNIT, PiecewisePolynomial, TestFunction, Weight, half_sine
from .kappa import KappaReport, compute_kappa

DEFAULT_DELTAS = tuple(
    Fraction(1, d) for d in (Fraction(5, 2), 4, 10, 20, 100, 1000)
)
LIMIT_DELTA_KAPPA = Fraction(3003**2, 26 * 858 * 2042)


def quartic_weight() -> Weight:
    return Weight.polynomial((0, 0, 0, 0, 1), UNIT)


def _check_delta(delta) -> Fraction:
    delta = P.to_rational(delta)
    if not 0 < delta < Fraction(1, 2):
        raise ParameterError(f"delta must lie in (0, 1/2), got {delta}")
    return delta


def solve_rational(matrix, rhs):
    """Gauss-Jordan elimination over the rationals."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular interpolation system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * p for v, p in zip(aug[r], aug[col])]
    return [row[-1] for row in aug]


def _hermite_row(x, nu, degree=5):
    # d^nu/dx^nu of x^k at x, for k = 0..degree
    row = []
    for k in range(degree + 1):
        if k < nu:
            row.append(Fraction(0))
        else:
            row.append(Fraction(math.perm(k, nu)) * Fraction(x) ** (k - nu))
    return row


def witness_coefficients(delta) -> list[Fraction]:
    """Quintic on ``[delta, 2 delta]`` matching value, slope and curvature of
    the outer linear pieces, by solving the 6x6 interpolation system."""
    d = _check_delta(delta)
    conditions = [
        (d, 0, 1),
        (2 * d, 0, 1),
        (d, 1, 1 / d),
        (2 * d, 1, -1 / (1 - 2 * d)),
        (d, 2, 0),
        (2 * d, 2, 0),
    ]
    matrix = [_hermite_row(x, nu) for x, nu, _ in conditions]
    return solve_rational(matrix, [v for _, _, v in conditions])


def build_witness(delta) -> TestFunction:
    """``x/delta`` on ``[0, delta]``, the interpolating quintic on
    ``[delta, 2 delta]``, ``(1-x)/(1-2 delta)`` on ``[2 delta, 1]``."""
    d = _check_delta(delta)
    quintic = witness_coefficients(d)
    pieces = [
        (0, 1 / d),
        quintic,
        (1 / (1 - 2 * d), -1 / (1 - 2 * d)),
    ]
    return TestFunction(PiecewisePolynomial((0, d, 2 * d, 1), pieces), DD)


def paper_coefficients(delta) -> list[Fraction]:
    """Closed forms for the quintic coefficients ``a0 .. a5``."""
    d = _check_delta(delta)
    q = 2 * d - 1
    return [
        (48 * d - 17) / q,
        -(183 * d - 64) / (d * q),
        12 * (23 * d - 8) / (d**2 * q),
        -2 * (99 * d - 34) / (d**3 * q),
        (68 * d - 23) / (d**4 * q),
        -3 * (3 * d - 1) / (d**5 * q),
    ]


def kappa_closed_form(delta) -> Fraction:
    """Closed-form rational expression for kappa(x**4, f_delta)."""
    d = _check_delta(delta)
    num = (3003 + 14474 * d**3 - 53525 * d**4 - 12344 * d**5) ** 2
    den = (
        26
        * d
        * (858 + 72450 * d**5 - 531793 * d**6 + 674178 * d**7)
        * (2042 - 11999 * d + 20182 * d**2)
    )
    return num / den


def interpolation_residuals(fn: TestFunction) -> list[Fraction]:
    """Value, slope and curvature jumps at the two interior junctions."""
    return [jump for nu in range(3) for _, jump in fn.body.jumps(nu)]


@dataclass(frozen=True)
class WitnessResult:
    delta: Fraction
    coefficients: tuple
    kappa_exact: Fraction
    kappa_closed: Fraction
    report: KappaReport

    @property
    def match(self) -> bool:
        return self.kappa_exact == self.kappa_closed

    @property
    def delta_times_kappa(self) -> Fraction:
        return self.delta * self.kappa_exact

    def to_json(self) -> dict:
        return {
            "delta": str(self.delta),
            **{f"a{k}": str(c) for k, c in enumerate(self.coefficients)},
            "kappa_exact": str(self.kappa_exact),
            "kappa_exact_decimal": float(self.kappa_exact),
            "kappa_closed_form": str(self.kappa_closed),
            "kappa_closed_form_decimal": float(self.kappa_closed),
            "match": self.match,
            "delta_times_kappa": str(self.delta_times_kappa),
            "delta_times_kappa_decimal": float(self.delta_times_kappa),
        }


def witness_result(delta) -> WitnessResult:
    d = _check_delta(delta)
    fn = build_witness(d)
    report = compute_kappa(quartic_weight(), fn, UNIT, exact=True)
    return WitnessResult(d, tuple(fn.body.pieces[1]), report.kappa, kappa_closed_form(d), report)


def witness_study(deltas=DEFAULT_DELTAS) -> list[WitnessResult]:
    """Exact kappa of the witness at each delta, next to the closed form."""
    return [witness_result(d) for d in deltas]


def monotonicity_example() -> KappaReport:
    """kappa for ``w = 1 - x`` and ``f = sin(pi x / 2)`` (``f(0) = f'(1) = 0``)."""
    return compute_kappa(Weight.polynomial((1, -1), UNIT), half_sine(UNIT, 1))


def monotonicity_closed_form() -> float:
    pi2 = math.pi**2
    return ((pi2 + 4) / (pi2 - 4)) ** 2


__all__ = [
    "DEFAULT_DELTAS",
    "LIMIT_DELTA_KAPPA",
    "WitnessResult",
    "build_witness",
    "interpolation_residuals",
    "kappa_closed_form",
    "monotonicity_closed_form",
    "monotonicity_example",
    "paper_coefficients",
    "quartic_weight",
    "solve_rational",
    "witness_coefficients",
    "witness_result",
    "witness_study",
]
