from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardykappa.errors import HypothesisError, ParameterError
from hardykappa.funcspace import UNIT, Weight, random_concave_weight, sine
from hardykappa.kappa import compute_kappa
from hardykappa.poly import definite
from hardykappa.smoothing import (
    KERNEL,
    SmoothingSchedule,
    grid_error_bound,
    smooth_concave,
    smoothing_convergence,
    sup_distance,
)

TENT = Weight.piecewise_linear((0, Fraction(1, 2), 1), (0, Fraction(1, 2), 0))


def test_kernel_unit_mass():
    assert definite(KERNEL, -1, 1) == 1


def test_constant_fixed():
    one = Weight.constant(1)
    sched = SmoothingSchedule(one, 3)
    assert all(d == 0 for _, d in smoothing_convergence(sched))
    assert smooth_concave(sched, 2).value(Fraction(1, 3)) == 1


def test_affine_fixed():
    line = Weight.polynomial((0, 1))
    w = smooth_concave(SmoothingSchedule(line, 2), 2)
    for x in (0, Fraction(1, 7), Fraction(1, 2), 1):
        assert w.value(x) == x


def test_tent_level_four():
    sched = SmoothingSchedule(TENT, 4)
    w4 = smooth_concave(sched, 4)
    h = sched.halfwidth(4)
    assert w4.poly.smoothness(2) >= 2 and w4.is_concave and w4.is_nonnegative
    assert sup_distance(w4, TENT) <= float(h) * float(sched.lipschitz)
    # the kink gets smoothed by exactly 2 * 35/256 * h at its centre
    assert TENT.value(Fraction(1, 2)) - w4.value(Fraction(1, 2)) == 2 * Fraction(35, 256) * h


def test_tent_halving():
    dists = [d for _, d in smoothing_convergence(SmoothingSchedule(TENT, 6))]
    ratios = [b / a for a, b in zip(dists, dists[1:])]
    assert all(0.45 <= r <= 0.55 for r in ratios)


def test_kappa_continuity():
    w6 = smooth_concave(SmoothingSchedule(TENT, 6), 6)
    assert abs(float(compute_kappa(w6, sine(UNIT, 2)).kappa) - 1) <= 1e-3


@settings(max_examples=10)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_random_targets_monotone(seed, pieces):
    sched = SmoothingSchedule(random_concave_weight(seed, UNIT, pieces), 5)
    dists = [d for _, d in smoothing_convergence(sched)]
    slack = grid_error_bound(sched)
    assert all(b <= a + slack for a, b in zip(dists, dists[1:]))
    for n in (1, 5):
        w = smooth_concave(sched, n)
        assert w.is_concave and w.is_nonnegative


def test_rejects_non_concave_target():
    v = Weight.piecewise_linear((0, Fraction(1, 2), 1), (1, 0, 1))
    with pytest.raises(HypothesisError):
        smooth_concave(SmoothingSchedule(v, 2), 1)


def test_schedule_validation():
    with pytest.raises(ParameterError):
        SmoothingSchedule(TENT, 0)
    with pytest.raises(ParameterError):
        SmoothingSchedule(Weight.polynomial((0, 1, -1)), 2)
    with pytest.raises(ParameterError):
        smooth_concave(SmoothingSchedule(TENT, 2), 3)


def test_sup_distance_dense_grid():
    w = smooth_concave(SmoothingSchedule(TENT, 2), 2)
    coarse = sup_distance(w, TENT, 257)
    fine = sup_distance(w, TENT)
    assert coarse <= fine + 1e-15
    assert np.isfinite(fine)
