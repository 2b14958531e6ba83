from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardykappa.errors import ConfigError
from hardykappa.funcspace import UNIT, random_admissible_function, random_concave_weight, random_half_sine_function
from hardykappa.schema import decode_number, digest, encode_number, problem_from_json, problem_to_json
from hardykappa.witness import build_witness, quartic_weight


def test_numbers():
    assert encode_number(Fraction(1, 3)) == "1/3"
    assert decode_number("1/3") == Fraction(1, 3)
    assert decode_number(0.25) == 0.25
    with pytest.raises(ConfigError):
        decode_number("one third")
    with pytest.raises(ConfigError):
        decode_number(True)


@given(st.integers(0, 10**6))
def test_roundtrip_random(seed):
    w = random_concave_weight(seed, UNIT, 3)
    f = random_admissible_function(seed, UNIT, 3)
    doc = problem_to_json(UNIT, w, f)
    iv, w2, f2 = problem_from_json(doc)
    assert iv == UNIT and w2 == w and f2 == f
    assert digest(problem_to_json(iv, w2, f2)) == digest(doc)


def test_roundtrip_half_sine_and_witness():
    for f in (random_half_sine_function(1, UNIT, 3), build_witness(Fraction(1, 10))):
        _, w2, f2 = problem_from_json(problem_to_json(UNIT, quartic_weight(), f))
        assert f2 == f and w2 == quartic_weight()


@pytest.mark.parametrize(
    "doc",
    [
        {"interval": ["0", "1"], "extra": 1},
        {"interval": ["0", "1"], "weight": {"kind": "polynomial", "coefficients": ["1"], "x": 2}},
        {"interval": ["0", "1"], "weight": {"kind": "spline"}},
        {"interval": ["1", "0"]},
        {"interval": ["0", "1"], "function": {"kind": "sine", "terms": [["1", 1.5]]}},
        {"interval": ["0", "1"], "function": {"kind": "sine", "terms": [["1", 1]], "bc": "Robin"}},
        {"interval": ["0", "1"], "weight": {"kind": "piecewise_linear", "breakpoints": ["0", "1/2"], "values": ["0", "1"]}},
    ],
)
def test_strict_schema(doc):
    with pytest.raises((ConfigError, ValueError)):
        problem_from_json(doc)
