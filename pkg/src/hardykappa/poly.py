"""Dense univariate polynomials with exact rational coefficients.

Polynomials are plain tuples of coefficients in ascending powers, so
``(1, 0, -3)`` is ``1 - 3x**2``.  Every routine is exact when the
coefficients and arguments are :class:`~fractions.Fraction` or ``int``;
floats are accepted for evaluation only.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

Poly = tuple

ZERO: Poly = ()


def to_rational(value) -> Fraction:
    """Convert ``value`` to a Fraction.

    Accepts ints, Fractions, ``"p/q"`` strings and floats (converted exactly,
    so ``0.1`` becomes ``3602879701896397/36028797018963968``).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        return Fraction(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def is_rational(value) -> bool:
    return isinstance(value, (int, Fraction, np.integer)) and not isinstance(value, bool)


def trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Poly) -> int:
    """Degree of ``p``; the zero polynomial has degree -1."""
    return len(trim(p)) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def scale(p: Poly, c) -> Poly:
    return trim(c * x for x in p)


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, scale(q, -1))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return trim(out)


def deriv(p: Poly, k: int = 1) -> Poly:
    for _ in range(k):
        p = trim(i * p[i] for i in range(1, len(p)))
    return p


def antideriv(p: Poly) -> Poly:
    """Antiderivative vanishing at 0."""
    if not p:
        return ZERO
    return (0,) + tuple(Fraction(c) / (i + 1) if is_rational(c) else c / (i + 1)
                        for i, c in enumerate(p))


def evaluate(p: Poly, x):
    """Horner evaluation; exact for rational ``x``, vectorised for arrays."""
    if isinstance(x, np.ndarray) or isinstance(x, (float, np.floating)):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(p):
            acc = acc * x + float(c)
        return acc
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def definite(p: Poly, lo, hi):
    """Integral of ``p`` over ``[lo, hi]``."""
    P = antideriv(p)
    return evaluate(P, hi) - evaluate(P, lo)


def compose_affine(p: Poly, alpha, beta) -> Poly:
    """Coefficients of ``x -> p(alpha*x + beta)``."""
    out: Poly = ZERO
    lin: Poly = trim((beta, alpha))
    for c in reversed(p):
        out = add(mul(out, lin), (c,) if c != 0 else ZERO)
    return out


def divmod_poly(p: Poly, q: Poly):
    """Euclidean division over the rationals."""
    p = [Fraction(c) for c in trim(p)]
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        shift = len(p) - len(q)
        c = p[-1] / lead
        quot[shift] = c
        for i, qi in enumerate(q):
            p[shift + i] -= c * qi
        p = list(trim(p))
    return trim(quot), trim(p)


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [trim(p), deriv(p)]
    while seq[-1]:
        _, r = divmod_poly(seq[-2], seq[-1])
        seq.append(scale(r, -1))
    return seq[:-1]


def _sign_changes(seq: list[Poly], x) -> int:
    signs = [s for s in (evaluate(q, x) for q in seq) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def count_roots(p: Poly, lo, hi, seq: list[Poly] | None = None) -> int:
    """Number of distinct real roots of ``p`` in the half-open ``(lo, hi]``."""
    seq = sturm_sequence(p) if seq is None else seq
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def _split_point(p: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    # Prefer the midpoint; nudge to a non-root so interval endpoints stay root-free.
    for num, den in ((1, 2), (3, 7), (4, 7), (2, 5), (3, 5), (5, 11), (6, 11)):
        x = lo + (hi - lo) * num / den
        if evaluate(p, x) != 0:
            return x
    raise AssertionError("polynomial vanishes at every trial split point")


def isolate_roots(p: Poly, lo, hi) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(l, u)``, each holding exactly one distinct root of
    ``p`` in the open interval ``(lo, hi)``.

    ``p`` must not vanish at ``lo`` or ``hi``; interval endpoints returned are
    never roots.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if evaluate(p, lo) == 0 or evaluate(p, hi) == 0:
        raise ValueError("isolate_roots needs p(lo) != 0 and p(hi) != 0")
    seq = sturm_sequence(p)
    out = []
    stack = [(lo, hi)]
    while stack:
        l, u = stack.pop()
        n = count_roots(p, l, u, seq)
        if n == 0:
            continue
        if n == 1:
            out.append((l, u))
            continue
        m = _split_point(p, l, u)
        stack.append((m, u))
        stack.append((l, m))
    out.sort()
    return out


def max_sign_on(p: Poly, lo, hi):
    """Decide exactly whether ``p <= 0`` on ``[lo, hi]``.

    Returns ``(True, None)`` when it holds, otherwise ``(False, x)`` with a
    rational ``x`` in ``[lo, hi]`` where ``p(x) > 0``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    p = tuple(Fraction(c) for c in trim(p))
    if not p:
        return True, None
    for x in (lo, hi):
        if evaluate(p, x) > 0:
            return False, x
    # Strip roots at the endpoints: p = (x-lo)^r (x-hi)^s q with q(lo), q(hi) != 0.
    q, sign = p, 1
    for root in (lo, hi):
        while evaluate(q, root) == 0:
            q, _ = divmod_poly(q, (-root, 1))
            if root == hi:
                sign = -sign  # (x - hi) < 0 on the open interval
    samples = [lo, hi] + [u for _, u in isolate_roots(q, lo, hi)]
    for x in samples:
        # Endpoint samples stand in for the adjacent open gaps.
        if sign * evaluate(q, x) > 0:
            if x in (lo, hi):
                x = _interior_witness(p, lo, hi, x)
            return False, x
    return True, None


def _interior_witness(p: Poly, lo, hi, x):
    # p is positive just inside the endpoint x; walk inward until it shows.
    step = (hi - lo) / 2
    while step > 0:
        y = x + step if x == lo else x - step
        if evaluate(p, y) > 0:
            return y
        step /= 2
    raise AssertionError("no interior witness found")  # pragma: no cover
