"""The weighted quotient

    kappa(w, f) = (int w f'^2)^2 / (int w f^2 * int w f''^2)

together with checks of the bound ``kappa <= 1`` for concave weights, its
equality cases, the even-reflection trick for Dirichlet-Neumann data, and
numerical checks of the integration-by-parts identities behind the bound.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import poly as P
from .errors import (
    ConcavityError,
    DegenerateInputError,
    HypothesisError,
    ModeError,
    ParameterError,
)
from .funcspace import (
    DD,
    DN,
    UNIT,
    Concavity,
    HalfSineCombination,
    Interval,
    Nonnegativity,
    PiecewisePolynomial,
    SineCombination,
    TestFunction,
    Weight,
    check_admissible,
    check_nondecreasing,
    random_admissible_function,
    random_concave_weight,
    reflect_piecewise,
)
from .quadrature import (
    DEFAULT_TOL,
    QuadMode,
    integrate_poly_cos_grid,
    integrate_poly_exact,
    pi_series_value,
    weighted_product_integral,
)
from .schema import digest, function_to_json, weight_to_json

THEOREM_SLACK_FLOOR = 1e-9


def _num(x):
    """JSON-friendly rendering: rationals as strings, everything else as float."""
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


@dataclass(frozen=True)
class KappaReport:
    """The three integrals, their quotient, and how they were obtained.

    In exact mode ``I0``, ``I1``, ``I2`` and ``kappa`` are Fractions when all
    inputs are rational piecewise polynomials.  For a single sine mode
    against a weight whose breakpoints sit on the mode's half-period grid the
    integrals involve pi and are floats, but ``kappa`` is still computed in
    closed form (and is exactly ``Fraction(1)`` when the weight is linear on
    every half period).
    """

    I0: Fraction | float
    I1: Fraction | float
    I2: Fraction | float
    kappa: Fraction | float
    mode: QuadMode
    error_bound: float = 0.0

    @property
    def exact(self) -> bool:
        return self.mode is QuadMode.EXACT

    def to_json(self) -> dict:
        out = {
            "I0": _num(self.I0),
            "I1": _num(self.I1),
            "I2": _num(self.I2),
            "kappa": _num(self.kappa),
            "kappa_decimal": float(self.kappa),
            "mode": self.mode.value,
            "error_bound": float(self.error_bound),
        }
        return out


def _interval_of(w: Weight, f: TestFunction, iv: Interval | None) -> Interval:
    iv = f.interval if iv is None else iv
    if w.interval != iv:
        raise ParameterError(
            f"weight lives on [{w.interval.a}, {w.interval.b}], expected [{iv.a}, {iv.b}]"
        )
    return iv


def _single_mode_grid(w: Weight, f: TestFunction, iv: Interval):
    """Half-period of a single rational-grid sine mode, or None."""
    body = f.body
    if not isinstance(body, SineCombination) or len(body.terms) != 1:
        return None
    if not (w.is_rational and iv.is_rational):
        return None
    n = body.terms[0][1]
    half_period = iv.length / n
    if all(((x - iv.a) / half_period).denominator == 1 for x in w.breakpoints):
        return half_period
    return None


def _kappa_single_mode(w: Weight, f: TestFunction, iv: Interval, half_period) -> KappaReport:
    # f = c*sin(theta), theta = n*pi*(x-a)/L.  With S = int w and
    # C = int w*cos(2*theta):  I0 = c^2/2 (S - C), I1 = c^2 om^2/2 (S + C),
    # I2 = c^2 om^4/2 (S - C), so kappa = ((S + C)/(S - C))^2.
    c, n = f.body.terms[0]
    S = integrate_poly_exact(w.poly, iv)
    series = integrate_poly_cos_grid(w.poly, iv.a, half_period)
    C = pi_series_value(series)
    om = n * math.pi / float(iv.length)
    c2 = float(c) ** 2
    I0 = c2 / 2 * (float(S) - C)
    I1 = c2 * om**2 / 2 * (float(S) + C)
    I2 = c2 * om**4 / 2 * (float(S) - C)
    if S == 0 or c == 0 or not I0 > 0:
        raise DegenerateInputError("w or f vanishes identically")
    kappa = Fraction(1) if not series else ((float(S) + C) / (float(S) - C)) ** 2
    return KappaReport(I0, I1, I2, kappa, QuadMode.EXACT, 0.0)


def _integral(w, u, v, iv, tol, exact):
    return weighted_product_integral(w, u, v, iv, tol, exact=exact)


def compute_kappa(
    w: Weight,
    f: TestFunction,
    iv: Interval | None = None,
    tol: float = DEFAULT_TOL,
    exact: bool | None = None,
) -> KappaReport:
    """kappa(w, f) on ``iv`` with its three integrals.

    Works for any of the three boundary-condition kinds.  ``exact=None``
    picks the exact route whenever one applies; ``exact=False`` forces
    adaptive quadrature.
    """
    iv = _interval_of(w, f, iv)
    if w.nonnegativity is Nonnegativity.CERTIFIED_NEGATIVE_SOMEWHERE:
        raise HypothesisError(f"weight is negative somewhere ({w.nonnegativity_detail})")
    adm = check_admissible(f, iv)
    if not adm:
        raise HypothesisError(f"function is not admissible: {adm.violation}")
    if exact is not False:
        grid = _single_mode_grid(w, f, iv)
        if grid is not None:
            return _kappa_single_mode(w, f, iv, grid)
    d0, d1, d2 = (f.derivative(k) for k in range(3))
    r0 = _integral(w, d0, d0, iv, tol, exact)
    r1 = _integral(w, d1, d1, iv, tol, exact)
    r2 = _integral(w, d2, d2, iv, tol, exact)
    I0, I1, I2 = r0.value, r1.value, r2.value
    if not (I0 > 0 and I2 > 0):
        raise DegenerateInputError("w or f vanishes identically (I0 * I2 = 0)")
    if all(r.mode is QuadMode.EXACT for r in (r0, r1, r2)):
        return KappaReport(I0, I1, I2, I1 * I1 / (I0 * I2), QuadMode.EXACT, 0.0)
    kappa = I1 * I1 / (I0 * I2)
    rel = 2 * r1.abs_error_estimate / max(I1, 1e-300) + r0.abs_error_estimate / I0 + r2.abs_error_estimate / I2
    return KappaReport(I0, I1, I2, kappa, QuadMode.ADAPTIVE, float(kappa) * rel)


def middle_integral(w: Weight, f: TestFunction, iv: Interval | None = None, tol: float = DEFAULT_TOL, exact=None):
    """``-int w f f''`` as its own quadrature."""
    iv = _interval_of(w, f, iv)
    r = _integral(w, f.derivative(0), f.derivative(2), iv, tol, exact)
    return -r.value, r.abs_error_estimate


@dataclass(frozen=True)
class ChainCheck:
    """The two-step bound ``I1 <= -int w f f'' <= sqrt(I0 * I2)``.

    Residuals are positive parts of the violations, divided by
    ``max(1, I1)`` so the tolerance is scale-aware.
    """

    I1: float
    middle: float
    geometric_mean: float
    first_residual: float
    second_residual: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.first_residual <= self.tol and self.second_residual <= self.tol


def proof_chain(w: Weight, f: TestFunction, iv: Interval | None = None, tol: float = 1e-9, report=None) -> ChainCheck:
    iv = _interval_of(w, f, iv)
    report = compute_kappa(w, f, iv, exact=False) if report is None else report
    middle, _ = middle_integral(w, f, iv, exact=False)
    I0, I1, I2 = float(report.I0), float(report.I1), float(report.I2)
    gm = math.sqrt(I0 * I2)
    middle = float(middle)
    scale = max(1.0, I1)
    return ChainCheck(
        I1, middle, gm, max(0.0, I1 - middle) / scale, max(0.0, middle - gm) / scale, tol
    )


# ---------------------------------------------------------------------------
# The bound, directly and through even reflection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremCheck:
    passed: bool
    report: KappaReport
    slack: float

    def __bool__(self):
        return self.passed


def _require_concave_nonnegative(w: Weight):
    if w.concavity is not Concavity.CERTIFIED_CONCAVE:
        raise HypothesisError(
            f"weight is not certified concave ({w.concavity.value}: {w.concavity_detail})"
        )
    if w.nonnegativity is not Nonnegativity.CERTIFIED_NONNEGATIVE:
        raise HypothesisError(f"weight is not certified nonnegative ({w.nonnegativity_detail})")


def _bound_check(report: KappaReport, slack) -> TheoremCheck:
    if report.exact and isinstance(report.kappa, Fraction):
        return TheoremCheck(report.kappa <= 1, report, 0.0)
    if slack is None:
        slack = max(THEOREM_SLACK_FLOOR, 10 * report.error_bound)
    return TheoremCheck(float(report.kappa) <= 1 + slack, report, slack)


def verify_theorem(
    w: Weight, f: TestFunction, iv: Interval | None = None, slack: float | None = None, exact=None
) -> TheoremCheck:
    """Check ``kappa <= 1 + slack`` for a certified concave nonnegative ``w``
    and Dirichlet-Dirichlet ``f``.  Exact results use slack 0."""
    _require_concave_nonnegative(w)
    if f.bc is not DD:
        raise HypothesisError(f"the bound needs f(a) = f(b) = 0, got {f.bc.value}")
    return _bound_check(compute_kappa(w, f, iv, exact=exact), slack)


def reflect_even(w: Weight, f: TestFunction, iv: Interval | None = None):
    """Extend ``w`` and ``f`` evenly about ``b`` to ``[a, 2b - a]``.

    Needs ``f(a) = f'(b) = 0`` and ``w`` concave, nonnegative and
    non-decreasing; the extended pair then satisfies the hypotheses of the
    Dirichlet-Dirichlet bound.
    """
    iv = _interval_of(w, f, iv)
    if f.bc is not DN:
        raise HypothesisError(f"reflection needs f(a) = f'(b) = 0, got {f.bc.value}")
    adm = check_admissible(f, iv)
    if not adm:
        raise HypothesisError(f"function is not admissible: {adm.violation}")
    _require_concave_nonnegative(w)
    mono = check_nondecreasing(w)
    if not mono:
        raise HypothesisError(f"weight is not non-decreasing ({mono.detail}); its reflection is not concave")
    a, b = iv.a, iv.b
    ext = Interval(a, 2 * b - a)
    wpp = reflect_piecewise(w.poly, b).simplify()
    if len(wpp.pieces) == 1 and w.kind in ("constant", "polynomial"):
        w2 = Weight(w.kind, wpp)
    else:
        w2 = Weight("piecewise_linear" if wpp.degree <= 1 else "piecewise_polynomial", wpp)
    body = f.body
    if isinstance(body, HalfSineCombination):
        # sin((2n-1) pi (x-a) / (2L)) is already even about b on [a, a + 2L].
        f2 = TestFunction(SineCombination(ext, tuple((c, 2 * n - 1) for c, n in body.terms)), DD)
    elif isinstance(body, PiecewisePolynomial):
        f2 = TestFunction(reflect_piecewise(body, b).simplify(), DD)
    else:
        raise HypothesisError("a sine combination does not satisfy f'(b) = 0")
    return w2, f2, ext


@dataclass(frozen=True)
class CorollaryCheck:
    direct: TheoremCheck
    reflected: TheoremCheck
    agreement: float

    @property
    def passed(self) -> bool:
        return self.direct.passed and self.reflected.passed

    def __bool__(self):
        return self.passed


def verify_corollary(w: Weight, f: TestFunction, iv: Interval | None = None, slack=None, exact=None) -> CorollaryCheck:
    """Both routes for ``f(a) = f'(b) = 0``: the bound checked on ``[a, b]``
    directly, and on the even reflection via :func:`verify_theorem`."""
    iv = _interval_of(w, f, iv)
    w2, f2, ext = reflect_even(w, f, iv)
    direct = _bound_check(compute_kappa(w, f, iv, exact=exact), slack)
    reflected = verify_theorem(w2, f2, ext, slack, exact=exact)
    agreement = abs(float(direct.report.kappa) - float(reflected.report.kappa))
    return CorollaryCheck(direct, reflected, agreement)


# ---------------------------------------------------------------------------
# Equality cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EqualityCase:
    interval: Interval
    n: int
    lam: Fraction | float
    weight: Weight
    function: TestFunction

    @property
    def grid(self):
        return tuple(self.interval.a + k * self.interval.length / self.n for k in range(self.n + 1))


def make_equality_case(iv: Interval, n: int, lam, node_values: Sequence) -> EqualityCase:
    """``f = lam * sin(n pi (x-a)/(b-a))`` with ``w`` linear on each of the
    ``n`` equal subintervals, taking ``node_values`` at the grid nodes."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if lam == 0:
        raise ParameterError("lambda must be nonzero")
    if len(node_values) != n + 1:
        raise ParameterError(f"need {n + 1} node values, got {len(node_values)}")
    values = [P.to_rational(v) if not isinstance(v, float) else v for v in node_values]
    if any(v < 0 for v in values):
        raise HypothesisError("node values must be nonnegative")
    if all(v == 0 for v in values):
        raise DegenerateInputError("all node values are zero")
    grid = [iv.a + k * iv.length / n for k in range(n + 1)]
    h = iv.length / n
    slopes = [(v1 - v0) / h for v0, v1 in zip(values, values[1:])]
    for k, (s0, s1) in enumerate(zip(slopes, slopes[1:])):
        if s1 > s0:
            raise ConcavityError(f"slope increases at node {k + 1}: {s0} -> {s1}")
    if n == 1 or all(s == slopes[0] for s in slopes):
        weight = Weight.piecewise_linear([iv.a, iv.b], [values[0], values[-1]])
    else:
        weight = Weight.piecewise_linear(grid, values)
    fn = TestFunction(SineCombination(iv, ((lam, n),)), DD)
    return EqualityCase(iv, n, lam, weight, fn)


def random_equality_case(seed, iv: Interval = UNIT, n: int = 2) -> EqualityCase:
    """Equality case with random concave node values (strictly decreasing
    slopes) and a random nonzero amplitude."""
    rng = np.random.default_rng(seed)
    h = iv.length / n
    raw = rng.choice(np.arange(-4096, 4096), size=n, replace=False)
    slopes = sorted((Fraction(int(s), 1024) for s in raw), reverse=True)
    values = [Fraction(0)]
    for s in slopes:
        values.append(values[-1] + s * h)
    low = min(values[0], values[-1])
    offset = Fraction(int(rng.integers(0, 1024)), 1024)
    values = [v - low + offset for v in values]
    if all(v == 0 for v in values):
        values = [v + 1 for v in values]
    lam = Fraction(int(rng.integers(1, 64)), 8) * (1 if rng.random() < 0.5 else -1)
    return make_equality_case(iv, n, lam, values)


def perturb_segment(case: EqualityCase, k: int | None = None, fraction=Fraction(1, 2)) -> Weight:
    """Break the linearity of ``case.weight`` on one grid segment by raising
    its midpoint, keeping the weight concave.

    ``fraction`` is the share of the largest concavity-preserving bump that is
    applied.  ``k`` picks the segment; by default the one allowing the
    largest bump.
    """
    grid = case.grid
    vals = [case.weight.value(x) for x in grid]
    h = case.interval.length / case.n
    slopes = [(v1 - v0) / h for v0, v1 in zip(vals, vals[1:])]
    # Raising the midpoint by t turns slope s into s + 2t/h and s - 2t/h.
    def room(j):
        left = slopes[j - 1] - slopes[j] if j > 0 else None
        right = slopes[j] - slopes[j + 1] if j < case.n - 1 else None
        limits = [r for r in (left, right) if r is not None]
        return min(limits) * h / 2 if limits else Fraction(max(max(vals), 1))

    candidates = range(case.n) if k is None else [k]
    j = max(candidates, key=room)
    t = room(j) * P.to_rational(fraction)
    if t <= 0:
        raise ConcavityError(f"segment {j} has no room for a concave bump")
    mid = (grid[j] + grid[j + 1]) / 2
    xs = list(grid[: j + 1]) + [mid] + list(grid[j + 1 :])
    ys = list(vals[: j + 1]) + [(vals[j] + vals[j + 1]) / 2 + t] + list(vals[j + 1 :])
    return Weight.piecewise_linear(xs, ys)


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------


def _one(iv: Interval):
    return PiecewisePolynomial.polynomial((1,), iv)


def parts_identity_sides(w: Weight, f: TestFunction, iv: Interval | None = None, tol=DEFAULT_TOL):
    """``(int w'' f^2, 2 int w (f f'' + f'^2))``."""
    iv = _interval_of(w, f, iv)
    if f.bc is not DD:
        raise HypothesisError("the identity needs f(a) = f(b) = 0")
    if w.poly.smoothness(1) < 1:
        raise ModeError("w'' is only distributional for a kinked weight; use lemma4_residual")
    d0, d1, d2 = (f.derivative(k) for k in range(3))
    lhs = weighted_product_integral(w.poly.derivative(2), d0, d0, iv, tol).value
    cross = weighted_product_integral(w, d0, d2, iv, tol).value
    grad = weighted_product_integral(w, d1, d1, iv, tol).value
    return lhs, 2 * (cross + grad)


def parts_identity_residual(w: Weight, f: TestFunction, iv: Interval | None = None, tol=DEFAULT_TOL) -> float:
    """``|int w'' f^2 - 2 int w (f f'' + f'^2)|``; vanishes when ``f(a)=f(b)=0``."""
    lhs, rhs = parts_identity_sides(w, f, iv, tol)
    return float(abs(lhs - rhs))


def lemma4_sides(w: Weight, f: TestFunction, iv: Interval | None = None, tol=DEFAULT_TOL):
    """``(int w f', -int w'_- f)`` for piecewise-linear ``w``."""
    iv = _interval_of(w, f, iv)
    if w.poly.degree > 1:
        raise ModeError("lemma4_residual expects a piecewise-linear weight")
    adm = check_admissible(TestFunction(f.body, DD), iv)
    if not adm:
        raise HypothesisError(f"f must vanish at both ends: {adm.violation}")
    if isinstance(f.body, PiecewisePolynomial) and f.body.smoothness(1) < 1:
        raise HypothesisError("f must be continuously differentiable")
    one = _one(iv)
    lhs = weighted_product_integral(w, f.derivative(1), one, iv, tol).value
    rhs = -weighted_product_integral(w.poly.derivative(1), f.derivative(0), one, iv, tol).value
    return lhs, rhs


def lemma4_residual(w: Weight, f: TestFunction, iv: Interval | None = None, tol=DEFAULT_TOL) -> float:
    lhs, rhs = lemma4_sides(w, f, iv, tol)
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class EpsilonCheck:
    """``B^2 <= A C`` versus ``B <= eps A + C/(4 eps)`` on a grid of eps."""

    product_holds: bool
    per_eps: tuple
    eps_holds: bool
    minimizer: Fraction | float
    grid_has_minimizer: bool

    @property
    def agree(self) -> bool:
        return self.product_holds == self.eps_holds


def epsilon_equivalence_check(A, B, C, eps_grid: Sequence, rtol: float = 0.0) -> EpsilonCheck:
    """Compare the two forms of the product bound.

    Exact for rational inputs.  ``rtol`` loosens both comparisons
    multiplicatively for float inputs coming from quadrature.
    """
    for name, v in (("A", A), ("B", B), ("C", C)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")
    if not eps_grid or any(not e > 0 for e in eps_grid):
        raise ParameterError("eps grid must be non-empty and positive")
    product_holds = B * B <= A * C * (1 + rtol)
    per_eps = tuple((e, B <= (e * A + C / (4 * e)) * (1 + rtol)) for e in eps_grid)
    star = B / (2 * A)
    return EpsilonCheck(
        bool(product_holds),
        per_eps,
        all(ok for _, ok in per_eps),
        star,
        any(e == star for e in eps_grid),
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepParams:
    """Generator settings for :func:`sweep`.

    ``family`` is ``"random"`` (random concave piecewise-linear weight and
    sine combination) or ``"equality"`` (random equality cases).
    """

    family: str = "random"
    max_pieces: int = 5
    max_mode: int = 6
    max_equality_mode: int = 3

    def __post_init__(self):
        if self.family not in ("random", "equality"):
            raise ParameterError(f"unknown sweep family {self.family!r}")
        if self.max_pieces < 1 or self.max_mode < 1 or self.max_equality_mode < 1:
            raise ParameterError("generator sizes must be >= 1")


@dataclass(frozen=True)
class SweepEntry:
    index: int
    kappa: float
    I0: float
    I1: float
    I2: float
    passed: bool
    chain_holds: bool
    weight_hash: str
    function_hash: str
    weight: Weight = field(repr=False, compare=False)
    function: TestFunction = field(repr=False, compare=False)


@dataclass(frozen=True)
class SweepReport:
    seed: int
    count: int
    params: SweepParams
    entries: tuple

    @property
    def max_kappa(self) -> float:
        return max(e.kappa for e in self.entries)

    @property
    def min_kappa(self) -> float:
        return min(e.kappa for e in self.entries)

    @property
    def failures(self) -> list[int]:
        return [e.index for e in self.entries if not (e.passed and e.chain_holds)]

    def closest(self, k: int = 10) -> list[SweepEntry]:
        return sorted(self.entries, key=lambda e: (abs(1 - e.kappa), e.index))[:k]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "params": {
                "family": self.params.family,
                "max_pieces": self.params.max_pieces,
                "max_mode": self.params.max_mode,
                "max_equality_mode": self.params.max_equality_mode,
            },
            "max_kappa": self.max_kappa,
            "min_kappa": self.min_kappa,
            "failures": self.failures,
            "closest_to_one": [
                {
                    "index": e.index,
                    "kappa": e.kappa,
                    "weight": weight_to_json(e.weight),
                    "function": function_to_json(e.function),
                }
                for e in self.closest()
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "kappa", "I0", "I1", "I2", "weight_hash", "function_hash"])
        for e in self.entries:
            writer.writerow(
                [e.index, repr(e.kappa), repr(e.I0), repr(e.I1), repr(e.I2), e.weight_hash, e.function_hash]
            )
        return buf.getvalue()


def _generate(seed: int, index: int, iv: Interval, params: SweepParams):
    rng = np.random.default_rng([seed, index])
    if params.family == "equality":
        n = int(rng.integers(1, params.max_equality_mode + 1))
        case = random_equality_case([seed, index, 1], iv, n)
        return case.weight, case.function
    pieces = int(rng.integers(1, params.max_pieces + 1))
    mode = int(rng.integers(1, params.max_mode + 1))
    w = random_concave_weight([seed, index, 1], iv, pieces)
    f = random_admissible_function([seed, index, 2], iv, mode)
    return w, f


def sweep_entry(seed: int, index: int, iv: Interval = UNIT, params: SweepParams = SweepParams()) -> SweepEntry:
    w, f = _generate(seed, index, iv, params)
    check = verify_theorem(w, f, iv)
    chain = proof_chain(w, f, iv, report=None if check.report.exact else check.report)
    r = check.report
    return SweepEntry(
        index,
        float(r.kappa),
        float(r.I0),
        float(r.I1),
        float(r.I2),
        check.passed,
        chain.holds,
        digest(weight_to_json(w)),
        digest(function_to_json(f)),
        w,
        f,
    )


def sweep(seed: int, count: int, iv: Interval = UNIT, params: SweepParams = SweepParams()) -> SweepReport:
    """Run :func:`verify_theorem` and the proof chain on ``count`` generated
    pairs.  Entry ``i`` depends only on ``(seed, i)``."""
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    entries = tuple(sweep_entry(seed, i, iv, params) for i in range(count))
    return SweepReport(seed, count, params, entries)
