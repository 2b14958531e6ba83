"""Weights, test functions, and their certification.

Weights are always stored as a :class:`PiecewisePolynomial` with rational
coefficients; the ``kind`` tag only records how the weight was built and how
it serialises.  Test functions are sine combinations, half-sine combinations,
or piecewise polynomials, each paired with a :class:`BoundaryCondition`.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import poly as P
from .errors import DomainError, ParameterError


def _number(x):
    """Keep exact inputs exact; leave floats alone."""
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, Fraction):
        return x
    return float(x)


@dataclass(frozen=True)
class Interval:
    """The closed interval ``[a, b]`` with ``a < b``."""

    a: Fraction | float
    b: Fraction | float

    def __post_init__(self):
        a, b = _number(self.a), _number(self.b)
        if not a < b:
            raise ParameterError(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self):
        return self.b - self.a

    @property
    def is_rational(self) -> bool:
        return P.is_rational(self.a) and P.is_rational(self.b)

    def contains(self, x) -> bool:
        return self.a <= x <= self.b

    def __iter__(self):
        yield self.a
        yield self.b


UNIT = Interval(0, 1)


class BoundaryCondition(enum.Enum):
    DIRICHLET_DIRICHLET = "DirichletDirichlet"  # f(a) = f(b) = 0
    DIRICHLET_NEUMANN = "DirichletNeumann"  # f(a) = f'(b) = 0
    NEUMANN_DIRICHLET = "NeumannDirichlet"  # f'(a) = f(b) = 0


DD = BoundaryCondition.DIRICHLET_DIRICHLET
DN = BoundaryCondition.DIRICHLET_NEUMANN
ND = BoundaryCondition.NEUMANN_DIRICHLET


# ---------------------------------------------------------------------------
# Piecewise polynomials
# ---------------------------------------------------------------------------


class PiecewisePolynomial:
    """A function given by one polynomial per breakpoint interval.

    Coefficients are in ascending powers of the global variable ``x``.  At an
    interior breakpoint every evaluation uses the piece on the left.

    Parameters
    ----------
    breakpoints : sequence
        Strictly increasing; the first and last entries are the interval ends.
    pieces : sequence of sequences
        ``len(breakpoints) - 1`` coefficient lists.
    """

    __slots__ = ("breakpoints", "pieces", "_fbp", "_fcoef")

    def __init__(self, breakpoints: Sequence, pieces: Sequence[Sequence]):
        bp = tuple(_number(x) for x in breakpoints)
        if len(bp) < 2:
            raise ParameterError("need at least two breakpoints")
        if any(not u < v for u, v in zip(bp, bp[1:])):
            raise ParameterError("breakpoints must be strictly increasing")
        if len(pieces) != len(bp) - 1:
            raise ParameterError(
                f"{len(bp) - 1} intervals but {len(pieces)} coefficient lists"
            )
        self.breakpoints = bp
        self.pieces = tuple(P.trim(_number(c) for c in p) for p in pieces)
        self._fbp = np.array([float(x) for x in bp])
        self._fcoef = None

    @classmethod
    def polynomial(cls, coefficients: Sequence, interval: Interval) -> "PiecewisePolynomial":
        return cls((interval.a, interval.b), [coefficients])

    @classmethod
    def linear_interpolant(cls, xs: Sequence, ys: Sequence) -> "PiecewisePolynomial":
        xs = [_number(x) for x in xs]
        ys = [_number(y) for y in ys]
        if len(xs) != len(ys):
            raise ParameterError("xs and ys differ in length")
        pieces = []
        for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
            slope = (y1 - y0) / (x1 - x0)
            pieces.append((y0 - slope * x0, slope))
        return cls(xs, pieces)

    @property
    def interval(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    @property
    def is_rational(self) -> bool:
        return all(P.is_rational(x) for x in self.breakpoints) and all(
            P.is_rational(c) for p in self.pieces for c in p
        )

    @property
    def degree(self) -> int:
        return max(P.degree(p) for p in self.pieces)

    def __repr__(self):
        return f"PiecewisePolynomial(breakpoints={self.breakpoints!r}, pieces={self.pieces!r})"

    def __eq__(self, other):
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        return self.breakpoints == other.breakpoints and self.pieces == other.pieces

    def __hash__(self):
        return hash((self.breakpoints, self.pieces))

    def piece_index(self, x) -> int:
        a, b = self.breakpoints[0], self.breakpoints[-1]
        if not a <= x <= b:
            raise DomainError(f"x={x} outside [{a}, {b}]")
        i = bisect.bisect_left(self.breakpoints, x) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def value(self, x, nu: int = 0):
        """Exact (for rational ``x``) value of the ``nu``-th derivative."""
        p = self.pieces[self.piece_index(x)]
        return P.evaluate(P.deriv(p, nu), x)

    def __call__(self, x):
        """Vectorised float evaluation."""
        x = np.asarray(x, dtype=float)
        if self._fcoef is None:
            # Expand each piece about its left breakpoint: global-variable
            # coefficients of narrow high-degree pieces cancel badly in floats.
            deg = max(len(p) for p in self.pieces)
            coef = np.zeros((len(self.pieces), max(deg, 1)))
            for i, p in enumerate(self.pieces):
                local = P.compose_affine(p, 1, self.breakpoints[i])
                coef[i, : len(local)] = [float(c) for c in local]
            self._fcoef = coef
        idx = np.clip(np.searchsorted(self._fbp, x, side="left") - 1, 0, len(self.pieces) - 1)
        c = self._fcoef[idx]
        t = x - self._fbp[idx]
        acc = np.zeros_like(x)
        for k in range(c.shape[-1] - 1, -1, -1):
            acc = acc * t + c[..., k]
        return acc

    def derivative(self, k: int = 1) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.breakpoints, [P.deriv(p, k) for p in self.pieces])

    def map(self, fn) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.breakpoints, [fn(p) for p in self.pieces])

    def refine(self, points) -> "PiecewisePolynomial":
        """Same function with extra breakpoints inserted (points outside are ignored)."""
        a, b = self.breakpoints[0], self.breakpoints[-1]
        new = sorted(set(self.breakpoints) | {_number(x) for x in points if a < x < b})
        pieces = [self.pieces[self.piece_index((u + v) / 2)] for u, v in zip(new, new[1:])]
        return PiecewisePolynomial(new, pieces)

    def restrict(self, lo, hi) -> "PiecewisePolynomial":
        ref = self.refine([lo, hi])
        bp = [x for x in ref.breakpoints if lo <= x <= hi]
        pieces = [ref.pieces[ref.piece_index((u + v) / 2)] for u, v in zip(bp, bp[1:])]
        return PiecewisePolynomial(bp, pieces)

    def simplify(self) -> "PiecewisePolynomial":
        """Merge neighbouring pieces that carry the same polynomial."""
        bp, pieces = [self.breakpoints[0]], []
        for x, p in zip(self.breakpoints[1:], self.pieces):
            if pieces and pieces[-1] == p:
                bp[-1] = x
            else:
                pieces.append(p)
                bp.append(x)
        return PiecewisePolynomial(bp, pieces)

    def jumps(self, nu: int):
        """Right-minus-left jump of the ``nu``-th derivative at each interior breakpoint."""
        out = []
        for i in range(1, len(self.breakpoints) - 1):
            x = self.breakpoints[i]
            left = P.evaluate(P.deriv(self.pieces[i - 1], nu), x)
            right = P.evaluate(P.deriv(self.pieces[i], nu), x)
            out.append((x, right - left))
        return out

    def smoothness(self, max_order: int = 2, tol: float = 0.0) -> int:
        """Largest ``k <= max_order`` with value and derivatives up to ``k``
        continuous at every interior breakpoint; -1 if not even continuous."""
        for nu in range(max_order + 1):
            for _, jump in self.jumps(nu):
                if abs(jump) > tol:
                    return nu - 1
        return max_order


def combine(a: PiecewisePolynomial, b: PiecewisePolynomial, op) -> PiecewisePolynomial:
    """Pointwise ``op(pa, pb)`` on the merged breakpoint partition."""
    bp = sorted(set(a.breakpoints) | set(b.breakpoints))
    lo, hi = max(a.breakpoints[0], b.breakpoints[0]), min(a.breakpoints[-1], b.breakpoints[-1])
    bp = [x for x in bp if lo <= x <= hi]
    pieces = []
    for u, v in zip(bp, bp[1:]):
        m = (u + v) / 2
        pieces.append(op(a.pieces[a.piece_index(m)], b.pieces[b.piece_index(m)]))
    return PiecewisePolynomial(bp, pieces)


def reflect_piecewise(p: PiecewisePolynomial, about) -> PiecewisePolynomial:
    """Extension of ``p`` from ``[a, about]`` to ``[a, 2*about - a]`` by
    ``p(about + s) = p(about - s)``."""
    if p.breakpoints[-1] != about:
        raise ParameterError("reflection point must be the right endpoint")
    mirrored_bp = [2 * about - x for x in reversed(p.breakpoints)]
    mirrored = [P.compose_affine(q, -1, 2 * about) for q in reversed(p.pieces)]
    return PiecewisePolynomial(list(p.breakpoints) + mirrored_bp[1:], list(p.pieces) + mirrored)


# ---------------------------------------------------------------------------
# Trigonometric bodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SineCombination:
    """``sum(coef * sin(n*pi*(x - a)/(b - a)))`` over ``terms = ((coef, n), ...)``."""

    interval: Interval
    terms: tuple

    def __post_init__(self):
        terms = tuple((_number(c), int(n)) for c, n in self.terms)
        if not terms:
            raise ParameterError("a sine combination needs at least one term")
        if any(n < 1 for _, n in terms):
            raise ParameterError("sine modes must be >= 1")
        object.__setattr__(self, "terms", terms)

    def frequencies(self):
        L = float(self.interval.length)
        return [(float(c), n * math.pi / L) for c, n in self.terms]

    def derivative_values(self, x, k: int):
        x = np.asarray(x, dtype=float)
        t = x - float(self.interval.a)
        out = np.zeros_like(t)
        for c, om in self.frequencies():
            out = out + c * om**k * _sin_shift(om * t, k)
        return out


@dataclass(frozen=True)
class HalfSineCombination:
    """``sum(coef * sin((2n-1)*pi*(x - a)/(2*(b - a))))``: vanishes at ``a``,
    flat at ``b``."""

    interval: Interval
    terms: tuple

    def __post_init__(self):
        terms = tuple((_number(c), int(n)) for c, n in self.terms)
        if not terms:
            raise ParameterError("a half-sine combination needs at least one term")
        if any(n < 1 for _, n in terms):
            raise ParameterError("half-sine indices must be >= 1")
        object.__setattr__(self, "terms", terms)

    def frequencies(self):
        L = float(self.interval.length)
        return [(float(c), (2 * n - 1) * math.pi / (2 * L)) for c, n in self.terms]

    derivative_values = SineCombination.derivative_values


def _sin_shift(theta, k):
    # k-th derivative of sin is sin(theta + k*pi/2); pick exact branches.
    r = k % 4
    if r == 0:
        return np.sin(theta)
    if r == 1:
        return np.cos(theta)
    if r == 2:
        return -np.sin(theta)
    return -np.cos(theta)


class TrigDerivative:
    """Callable ``k``-th derivative of a trigonometric body, for quadrature."""

    def __init__(self, body, k: int):
        self.body = body
        self.k = k
        self.breakpoints = (body.interval.a, body.interval.b)

    def __call__(self, x):
        return self.body.derivative_values(x, self.k)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """An admissible ``f`` together with its declared boundary conditions."""

    __test__ = False  # not a pytest class

    body: SineCombination | HalfSineCombination | PiecewisePolynomial
    bc: BoundaryCondition = DD

    @property
    def interval(self) -> Interval:
        if isinstance(self.body, PiecewisePolynomial):
            return self.body.interval
        return self.body.interval

    @property
    def is_rational(self) -> bool:
        return isinstance(self.body, PiecewisePolynomial) and self.body.is_rational

    @property
    def breakpoints(self):
        if isinstance(self.body, PiecewisePolynomial):
            return self.body.breakpoints
        return (self.interval.a, self.interval.b)

    def derivative(self, k: int = 0):
        """The ``k``-th derivative as a quadrature-ready evaluable."""
        if isinstance(self.body, PiecewisePolynomial):
            return self.body.derivative(k)
        return TrigDerivative(self.body, k)

    def scaled(self, c) -> "TestFunction":
        if isinstance(self.body, PiecewisePolynomial):
            return TestFunction(self.body.map(lambda p: P.scale(p, _number(c))), self.bc)
        body = type(self.body)(self.body.interval, tuple((c * t, n) for t, n in self.body.terms))
        return TestFunction(body, self.bc)


def sine(interval: Interval = UNIT, n: int = 1, coef=1) -> TestFunction:
    return TestFunction(SineCombination(interval, ((coef, n),)), DD)


def half_sine(interval: Interval = UNIT, n: int = 1, coef=1) -> TestFunction:
    return TestFunction(HalfSineCombination(interval, ((coef, n),)), DN)


def eval_derivatives(fn: TestFunction, x):
    """``(f(x), f'(x), f''(x))``; left-piece values at interior breakpoints."""
    iv = fn.interval
    if not iv.contains(x):
        raise DomainError(f"x={x} outside [{iv.a}, {iv.b}]")
    if isinstance(fn.body, PiecewisePolynomial):
        return tuple(fn.body.value(x, k) for k in range(3))
    return tuple(float(fn.body.derivative_values(float(x), k)) for k in range(3))


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


class Concavity(enum.Enum):
    CERTIFIED_CONCAVE = "CertifiedConcave"
    CERTIFIED_NOT_CONCAVE = "CertifiedNotConcave"
    UNKNOWN = "Unknown"


class Nonnegativity(enum.Enum):
    CERTIFIED_NONNEGATIVE = "CertifiedNonnegative"
    CERTIFIED_NEGATIVE_SOMEWHERE = "CertifiedNegativeSomewhere"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Certificate:
    """A verdict and, when negative, the evidence for it."""

    verdict: enum.Enum
    detail: str | None = None

    def __bool__(self):
        return self.verdict in (Concavity.CERTIFIED_CONCAVE, Nonnegativity.CERTIFIED_NONNEGATIVE)


WEIGHT_KINDS = ("constant", "polynomial", "piecewise_linear", "piecewise_polynomial", "sampled")


@dataclass(frozen=True, eq=False)
class Weight:
    """A nonnegative weight on an interval.

    Build with :meth:`constant`, :meth:`polynomial`, :meth:`piecewise_linear`,
    :meth:`piecewise_polynomial` or :meth:`sampled`.  Concavity and
    nonnegativity are certified exactly at construction for every kind except
    ``sampled``, whose samples can refute concavity but never certify it.
    """

    kind: str
    poly: PiecewisePolynomial
    concavity: Concavity = field(init=False)
    nonnegativity: Nonnegativity = field(init=False)
    concavity_detail: str | None = field(init=False, default=None)
    nonnegativity_detail: str | None = field(init=False, default=None)

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ParameterError(f"unknown weight kind {self.kind!r}")
        c = _certify_concave(self.poly, sampled=self.kind == "sampled")
        n = _certify_nonnegative(self.poly, sampled=self.kind == "sampled")
        object.__setattr__(self, "concavity", c.verdict)
        object.__setattr__(self, "concavity_detail", c.detail)
        object.__setattr__(self, "nonnegativity", n.verdict)
        object.__setattr__(self, "nonnegativity_detail", n.detail)

    @classmethod
    def constant(cls, value, interval: Interval = UNIT) -> "Weight":
        return cls("constant", PiecewisePolynomial.polynomial((value,), interval))

    @classmethod
    def polynomial(cls, coefficients, interval: Interval = UNIT) -> "Weight":
        return cls("polynomial", PiecewisePolynomial.polynomial(coefficients, interval))

    @classmethod
    def piecewise_linear(cls, breakpoints, values) -> "Weight":
        return cls("piecewise_linear", PiecewisePolynomial.linear_interpolant(breakpoints, values))

    @classmethod
    def piecewise_polynomial(cls, pp: PiecewisePolynomial) -> "Weight":
        return cls("piecewise_polynomial", pp)

    @classmethod
    def sampled(cls, xs, ys) -> "Weight":
        return cls("sampled", PiecewisePolynomial.linear_interpolant(xs, ys))

    @property
    def interval(self) -> Interval:
        return self.poly.interval

    @property
    def breakpoints(self):
        return self.poly.breakpoints

    @property
    def is_rational(self) -> bool:
        return self.poly.is_rational

    @property
    def is_concave(self) -> bool:
        return self.concavity is Concavity.CERTIFIED_CONCAVE

    @property
    def is_nonnegative(self) -> bool:
        return self.nonnegativity is Nonnegativity.CERTIFIED_NONNEGATIVE

    def __call__(self, x):
        return self.poly(x)

    def value(self, x, nu: int = 0):
        return self.poly.value(x, nu)

    def scaled(self, c) -> "Weight":
        return Weight(self.kind, self.poly.map(lambda p: P.scale(p, _number(c))))

    def slopes(self):
        """Slopes of a piecewise-linear weight, left to right."""
        if self.poly.degree > 1:
            raise ParameterError("weight is not piecewise linear")
        return [p[1] if len(p) > 1 else 0 for p in self.poly.pieces]

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return self.kind == other.kind and self.poly == other.poly

    def __hash__(self):
        return hash((self.kind, self.poly))

    def __repr__(self):
        return f"Weight(kind={self.kind!r}, poly={self.poly!r}, concavity={self.concavity.value})"


def _exact(pp: PiecewisePolynomial) -> PiecewisePolynomial | None:
    if pp.is_rational:
        return pp
    try:
        return PiecewisePolynomial(
            [P.to_rational(x) for x in pp.breakpoints],
            [[P.to_rational(c) for c in p] for p in pp.pieces],
        )
    except (TypeError, ValueError):
        return None


def _certify_concave(pp: PiecewisePolynomial, sampled: bool = False) -> Certificate:
    pp = _exact(pp)
    if pp is None:
        return Certificate(Concavity.UNKNOWN, "non-finite coefficients")
    bp = pp.breakpoints
    for x, jump in pp.jumps(0):
        if jump != 0:
            return Certificate(Concavity.CERTIFIED_NOT_CONCAVE, f"discontinuous at x={x}")
    if sampled:
        for (x, jump) in pp.jumps(1):
            if jump > 0:
                return Certificate(
                    Concavity.CERTIFIED_NOT_CONCAVE, f"secant slope increases at sample x={x}"
                )
        return Certificate(Concavity.UNKNOWN, "samples are consistent with concavity")
    for i, p in enumerate(pp.pieces):
        ok, where = P.max_sign_on(P.deriv(p, 2), bp[i], bp[i + 1])
        if not ok:
            return Certificate(
                Concavity.CERTIFIED_NOT_CONCAVE, f"second derivative positive at x={where}"
            )
    for x, jump in pp.jumps(1):
        if jump > 0:
            i = bp.index(x)
            left = P.evaluate(P.deriv(pp.pieces[i - 1], 1), x)
            return Certificate(
                Concavity.CERTIFIED_NOT_CONCAVE,
                f"slope increases at x={x}: {left} -> {left + jump}",
            )
    return Certificate(Concavity.CERTIFIED_CONCAVE)


def _certify_nonnegative(pp: PiecewisePolynomial, sampled: bool = False) -> Certificate:
    pp = _exact(pp)
    if pp is None:
        return Certificate(Nonnegativity.UNKNOWN, "non-finite coefficients")
    bp = pp.breakpoints
    if sampled:
        for x in bp:
            if pp.value(x) < 0:
                return Certificate(Nonnegativity.CERTIFIED_NEGATIVE_SOMEWHERE, f"w({x}) < 0")
        return Certificate(Nonnegativity.UNKNOWN, "samples are nonnegative")
    for i, p in enumerate(pp.pieces):
        ok, where = P.max_sign_on(P.scale(p, -1), bp[i], bp[i + 1])
        if not ok:
            return Certificate(Nonnegativity.CERTIFIED_NEGATIVE_SOMEWHERE, f"w({where}) < 0")
    return Certificate(Nonnegativity.CERTIFIED_NONNEGATIVE)


def check_concave(w: Weight) -> Certificate:
    """Exact concavity verdict with the offending slope pair or sign point."""
    return Certificate(w.concavity, w.concavity_detail)


def check_nonnegative(w: Weight) -> Certificate:
    return Certificate(w.nonnegativity, w.nonnegativity_detail)


def check_nondecreasing(w: Weight) -> Certificate:
    """Exact test that ``w' >= 0`` on every piece (``w`` assumed continuous)."""
    pp = _exact(w.poly)
    if pp is None:
        return Certificate(Nonnegativity.UNKNOWN, "non-finite coefficients")
    bp = pp.breakpoints
    for i, p in enumerate(pp.pieces):
        ok, where = P.max_sign_on(P.scale(P.deriv(p), -1), bp[i], bp[i + 1])
        if not ok:
            return Certificate(Nonnegativity.CERTIFIED_NEGATIVE_SOMEWHERE, f"w'({where}) < 0")
    return Certificate(Nonnegativity.CERTIFIED_NONNEGATIVE)


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Admissibility:
    passed: bool
    violation: str | None = None
    smoothness: int | None = None

    def __bool__(self):
        return self.passed


BC_TOL = 1e-12


def check_admissible(fn: TestFunction, iv: Interval | None = None, tol: float = BC_TOL) -> Admissibility:
    """Check the declared boundary conditions and, for piecewise bodies, C^2
    junctions.  Exact for rational bodies; trig bodies use ``tol``."""
    iv = fn.interval if iv is None else iv
    if fn.interval != iv:
        return Admissibility(False, f"function lives on [{fn.interval.a}, {fn.interval.b}]")
    body = fn.body
    smooth = None
    if isinstance(body, PiecewisePolynomial):
        exact = body.is_rational
        t = 0 if exact else tol
        for nu in range(3):
            for x, jump in body.jumps(nu):
                if abs(jump) > t:
                    return Admissibility(
                        False, f"derivative {nu} jumps by {jump} at x={x}", nu - 1
                    )
        smooth = 2
        value = body.value
    else:
        t = tol

        def value(x, nu=0):
            return float(body.derivative_values(float(x), nu))

    checks = {
        DD: ((iv.a, 0, "f(a)"), (iv.b, 0, "f(b)")),
        DN: ((iv.a, 0, "f(a)"), (iv.b, 1, "f'(b)")),
        ND: ((iv.a, 1, "f'(a)"), (iv.b, 0, "f(b)")),
    }[fn.bc]
    for x, nu, label in checks:
        v = value(x, nu)
        scale = 1.0
        if not isinstance(body, PiecewisePolynomial):
            scale = max(1.0, sum(abs(c) * om**nu for c, om in body.frequencies()))
        if abs(v) > t * scale:
            return Admissibility(False, f"{label}={v}", smooth)
    return Admissibility(True, None, smooth)


# ---------------------------------------------------------------------------
# Random generators
# ---------------------------------------------------------------------------

_GRID = 1024  # denominators of generated breakpoints and slopes


def _rng(seed):
    return np.random.default_rng(seed)


def _random_breakpoints(rng, iv: Interval, pieces: int):
    if not iv.is_rational:
        raise ParameterError("generators need a rational interval")
    inner = rng.choice(np.arange(1, _GRID), size=pieces - 1, replace=False)
    fr = sorted(Fraction(int(k), _GRID) for k in inner)
    return [iv.a] + [iv.a + t * iv.length for t in fr] + [iv.b]


def random_concave_weight(seed, iv: Interval = UNIT, pieces: int = 3, nondecreasing: bool = False) -> Weight:
    """Piecewise-linear weight with strictly decreasing random slopes.

    Shifted by a constant so that its minimum is 0 (half the time) or a random
    positive offset.  With ``nondecreasing=True`` all slopes are positive.
    """
    if pieces < 1:
        raise ParameterError(f"pieces must be >= 1, got {pieces}")
    rng = _rng(seed)
    bp = _random_breakpoints(rng, iv, pieces)
    lo_slope = 0 if nondecreasing else -4 * _GRID
    raw = rng.choice(np.arange(lo_slope + 1, 4 * _GRID), size=pieces, replace=False)
    slopes = sorted((Fraction(int(s), _GRID) for s in raw), reverse=True)
    values = [Fraction(0)]
    for s, (u, v) in zip(slopes, zip(bp, bp[1:])):
        values.append(values[-1] + s * (v - u))
    lowest = min(values[0], values[-1])  # concave: minimum sits at an endpoint
    offset = Fraction(0) if rng.random() < 0.5 else Fraction(int(rng.integers(1, _GRID)), _GRID)
    values = [v - lowest + offset for v in values]
    return Weight.piecewise_linear(bp, values)


def random_concave_polynomial(seed, iv: Interval = UNIT, degree: int = 3) -> Weight:
    """Polynomial weight with ``w'' <= 0`` built from a nonnegative Bernstein
    combination, then shifted to be nonnegative on ``iv``."""
    if degree < 2:
        raise ParameterError("degree must be >= 2")
    rng = _rng(seed)
    a, L = iv.a, iv.length
    # Bernstein basis of degree d on [a, b] in the global variable.
    d = degree - 2
    t = P.compose_affine((0, 1), 1 / L, -a / L)  # (x - a)/L
    one_minus_t = P.sub((1,), t)
    second = P.ZERO
    for k in range(d + 1):
        c = Fraction(int(rng.integers(0, 64)), 8)
        term = P.scale((math.comb(d, k),), c)
        for _ in range(k):
            term = P.mul(term, t)
        for _ in range(d - k):
            term = P.mul(term, one_minus_t)
        second = P.add(second, term)
    if not second:
        second = (Fraction(1),)
    w = P.scale(P.antideriv(P.antideriv(second)), -1)
    slope = Fraction(int(rng.integers(-64, 65)), 16)
    w = P.add(w, (0, slope))
    lowest = min(P.evaluate(w, a), P.evaluate(w, iv.b))
    offset = Fraction(int(rng.integers(0, 16)), 16)
    w = P.add(w, (offset - lowest,))
    return Weight.polynomial(w, iv)


def random_admissible_function(seed, iv: Interval = UNIT, max_mode: int = 4) -> TestFunction:
    """Sine combination over modes ``1..max_mode`` with coefficients in [-1, 1]."""
    if max_mode < 1:
        raise ParameterError(f"max_mode must be >= 1, got {max_mode}")
    rng = _rng(seed)
    coefs = rng.uniform(-1.0, 1.0, size=max_mode)
    while not np.any(coefs):
        coefs = rng.uniform(-1.0, 1.0, size=max_mode)
    return TestFunction(
        SineCombination(iv, tuple((float(c), n + 1) for n, c in enumerate(coefs))), DD
    )


def random_half_sine_function(seed, iv: Interval = UNIT, max_mode: int = 4) -> TestFunction:
    """Half-sine combination satisfying ``f(a) = f'(b) = 0``."""
    if max_mode < 1:
        raise ParameterError(f"max_mode must be >= 1, got {max_mode}")
    rng = _rng(seed)
    coefs = rng.uniform(-1.0, 1.0, size=max_mode)
    while not np.any(coefs):
        coefs = rng.uniform(-1.0, 1.0, size=max_mode)
    return TestFunction(
        HalfSineCombination(iv, tuple((float(c), n + 1) for n, c in enumerate(coefs))), DN
    )
