import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardykappa.errors import DomainError, ParameterError
from hardykappa.funcspace import (
    DD,
    DN,
    UNIT,
    Concavity,
    Interval,
    Nonnegativity,
    PiecewisePolynomial,
    TestFunction,
    Weight,
    check_admissible,
    check_concave,
    check_nondecreasing,
    check_nonnegative,
    eval_derivatives,
    half_sine,
    random_admissible_function,
    random_concave_polynomial,
    random_concave_weight,
    random_half_sine_function,
    reflect_piecewise,
    sine,
)
from hardykappa.witness import build_witness

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_interval_validation():
    assert UNIT.length == 1 and UNIT.is_rational
    with pytest.raises(ParameterError):
        Interval(1, 1)
    assert Interval("1/3", 2).a == Fraction(1, 3)


class TestEvalDerivatives:
    def test_peak(self):
        f, f1, f2 = eval_derivatives(sine(), 0.5)
        assert f == pytest.approx(1) and abs(f1) < 1e-12 and f2 == pytest.approx(-math.pi**2)

    def test_endpoint(self):
        f, f1, f2 = eval_derivatives(sine(), 0)
        assert abs(f) < 1e-15 and f1 == pytest.approx(math.pi) and abs(f2) < 1e-12

    def test_witness_linear_piece(self):
        assert eval_derivatives(build_witness(Fraction(1, 4)), Fraction(1, 8)) == (Fraction(1, 2), 4, 0)

    def test_outside(self):
        with pytest.raises(DomainError):
            eval_derivatives(sine(), 1.5)


class TestConcavity:
    def test_quartic_not_concave(self):
        w = Weight.polynomial((0, 0, 0, 0, 1))
        cert = check_concave(w)
        assert cert.verdict is Concavity.CERTIFIED_NOT_CONCAVE and not cert

    def test_decreasing_line(self):
        assert check_concave(Weight.polynomial((1, -1))).verdict is Concavity.CERTIFIED_CONCAVE

    def test_tent(self):
        tent = Weight.piecewise_linear((0, Fraction(1, 2), 1), (0, Fraction(1, 2), 0))
        assert tent.is_concave and list(tent.slopes()) == [1, -1]

    def test_convex_kink(self):
        v = Weight.piecewise_linear((0, Fraction(1, 2), 1), (1, 0, 1))
        assert check_concave(v).verdict is Concavity.CERTIFIED_NOT_CONCAVE

    def test_sampled_never_certified(self):
        w = Weight.sampled((0, Fraction(1, 2), 1), (0, 1, 0))
        assert w.concavity is Concavity.UNKNOWN

    def test_nonnegativity(self):
        assert check_nonnegative(Weight.polynomial((0, 1, -1))).verdict is Nonnegativity.CERTIFIED_NONNEGATIVE
        neg = check_nonnegative(Weight.polynomial((Fraction(-1, 10), 1)))
        assert neg.verdict is Nonnegativity.CERTIFIED_NEGATIVE_SOMEWHERE

    def test_nondecreasing(self):
        assert check_nondecreasing(Weight.polynomial((0, 1)))
        assert not check_nondecreasing(Weight.polynomial((1, -1)))


class TestAdmissible:
    def test_sine(self):
        assert check_admissible(sine(UNIT, 2), UNIT)

    def test_identity_fails_at_right_end(self):
        f = TestFunction(PiecewisePolynomial.polynomial((0, 1), UNIT), DD)
        res = check_admissible(f, UNIT)
        assert not res and "f(b)" in res.violation

    def test_witness_is_c2(self):
        res = check_admissible(build_witness(Fraction(1, 4)), UNIT)
        assert res and res.smoothness == 2

    def test_half_sine(self):
        assert check_admissible(half_sine(UNIT, 3), UNIT)
        assert not check_admissible(TestFunction(half_sine().body, DD), UNIT)


class TestGenerators:
    def test_single_piece(self):
        w = random_concave_weight(1, UNIT, 1)
        assert len(w.breakpoints) == 2 and w.is_nonnegative

    @given(seeds, st.integers(1, 6))
    def test_postconditions(self, seed, pieces):
        w = random_concave_weight(seed, UNIT, pieces)
        slopes = w.slopes()
        assert len(slopes) == pieces
        assert all(s1 < s0 for s0, s1 in zip(slopes, slopes[1:]))
        assert min(w.value(x) for x in w.breakpoints) >= 0
        assert w.is_concave and w.is_nonnegative

    def test_seed_seven(self):
        w = random_concave_weight(7, UNIT, 5)
        slopes = w.slopes()
        assert all(s1 < s0 for s0, s1 in zip(slopes, slopes[1:]))
        assert min(w.value(x) for x in w.breakpoints) >= 0

    def test_min_zero_occurs(self):
        mins = {min(w.value(x) for x in w.breakpoints) == 0 for w in (random_concave_weight(s, UNIT, 3) for s in range(20))}
        assert mins == {True, False}

    def test_pieces_zero(self):
        with pytest.raises(ParameterError):
            random_concave_weight(0, UNIT, 0)

    @given(seeds, st.booleans())
    def test_nondecreasing_option(self, seed, flag):
        w = random_concave_weight(seed, UNIT, 4, nondecreasing=flag)
        if flag:
            assert check_nondecreasing(w)

    def test_single_mode_function(self):
        f = random_admissible_function(0, UNIT, 1)
        assert len(f.body.terms) == 1 and f.body.terms[0][1] == 1 and f.body.terms[0][0] != 0

    def test_determinism(self):
        assert random_admissible_function(3, UNIT, 4) == random_admissible_function(3, UNIT, 4)
        assert check_admissible(random_admissible_function(3, UNIT, 4), UNIT)

    @given(seeds, st.integers(2, 6))
    def test_concave_polynomial(self, seed, degree):
        w = random_concave_polynomial(seed, UNIT, degree)
        assert w.is_concave and w.is_nonnegative

    @given(seeds)
    def test_half_sine_generator(self, seed):
        f = random_half_sine_function(seed, UNIT, 4)
        assert f.bc is DN and check_admissible(f, UNIT)


class TestPiecewise:
    def test_value_and_float_eval_agree(self):
        pp = PiecewisePolynomial((0, Fraction(1, 3), 1), [(0, 3), (Fraction(3, 2), Fraction(-3, 2))])
        xs = np.linspace(0, 1, 11)
        assert np.allclose(pp(xs), [float(pp.value(Fraction(x).limit_denominator(1000))) for x in xs])

    def test_jumps_and_smoothness(self):
        tent = PiecewisePolynomial.linear_interpolant((0, Fraction(1, 2), 1), (0, 1, 0))
        assert tent.jumps(1) == [(Fraction(1, 2), -4)]
        assert tent.smoothness() == 0

    def test_reflection(self):
        p = PiecewisePolynomial.polynomial((0, 1), UNIT)
        r = reflect_piecewise(p, 1)
        assert r.interval == Interval(0, 2)
        assert r.value(Fraction(3, 2)) == Fraction(1, 2)

    @given(st.fractions(min_value=0, max_value=1, max_denominator=64))
    def test_scaled_weight(self, x):
        w = Weight.polynomial((1, 2, -3))
        assert w.scaled(3).value(x) == 3 * w.value(x)
