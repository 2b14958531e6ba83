import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardykappa.errors import HypothesisError, ParameterError
from hardykappa.funcspace import UNIT, Weight, check_admissible, half_sine
from hardykappa.kappa import reflect_even
from hardykappa.witness import (
    LIMIT_DELTA_KAPPA,
    build_witness,
    interpolation_residuals,
    kappa_closed_form,
    monotonicity_closed_form,
    monotonicity_example,
    paper_coefficients,
    witness_coefficients,
    witness_result,
    witness_study,
)

deltas = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(499, 1000), max_denominator=1000).filter(
    lambda d: 0 < d < Fraction(1, 2)
)

QUARTER_KAPPA = Fraction(1185963245618, 217307830103)


def test_quarter_coefficients():
    assert witness_coefficients(Fraction(1, 4)) == [10, -146, 864, -2368, 3072, -1536]
    assert paper_coefficients(Fraction(1, 4))[0] == 10
    assert paper_coefficients(Fraction(1, 4))[5] == -1536


def test_first_piece_value():
    assert build_witness(Fraction(1, 4)).body.value(Fraction(1, 8)) == Fraction(1, 2)


@pytest.mark.parametrize("d", [Fraction(1, 2), Fraction(0), Fraction(-1, 3), Fraction(3, 4)])
def test_delta_range(d):
    with pytest.raises(ParameterError):
        build_witness(d)


@given(deltas)
def test_solve_matches_closed_forms(d):
    assert witness_coefficients(d) == paper_coefficients(d)
    fn = build_witness(d)
    assert all(r == 0 for r in interpolation_residuals(fn))
    assert check_admissible(fn, UNIT)


def test_quarter_kappa_frozen():
    r = witness_result(Fraction(1, 4))
    assert r.kappa_exact == QUARTER_KAPPA == kappa_closed_form(Fraction(1, 4))
    assert r.match and r.report.exact


def test_divergence_trend():
    assert kappa_closed_form(Fraction(1, 100)) > kappa_closed_form(Fraction(1, 10))
    small = Fraction(1, 10**6)
    assert abs(small * kappa_closed_form(small) - LIMIT_DELTA_KAPPA) < Fraction(1, 10**4)
    assert float(LIMIT_DELTA_KAPPA) == pytest.approx(0.198, abs=1e-3)


def test_study_values():
    rows = witness_study([Fraction(2, 5), Fraction(1, 4), Fraction(1, 10), Fraction(1, 20), Fraction(1, 100)])
    assert all(r.match for r in rows)
    # values as computed; the sequence dips between 1/4 and 1/10
    assert [round(float(r.kappa_exact), 4) for r in rows] == [2.2933, 5.4575, 3.8945, 5.4223, 21.0108]
    assert witness_study([]) == []
    doc = rows[1].to_json()
    assert doc["a5"] == "-1536" and doc["match"] is True


def test_monotonicity_example():
    r = monotonicity_example()
    assert float(r.kappa) == pytest.approx(5.5835, abs=1e-4)
    assert float(r.kappa) == pytest.approx(monotonicity_closed_form(), rel=1e-13)
    with pytest.raises(HypothesisError):
        reflect_even(Weight.polynomial((1, -1)), half_sine(), UNIT)
    assert monotonicity_closed_form() == pytest.approx(((math.pi**2 + 4) / (math.pi**2 - 4)) ** 2)
