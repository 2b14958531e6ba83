"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured
quantities before asserting, so ``pytest -s`` doubles as a report.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hardykappa.errors import HypothesisError
from hardykappa.funcspace import (
    DD,
    UNIT,
    Concavity,
    Interval,
    Nonnegativity,
    SineCombination,
    TestFunction,
    Weight,
    random_admissible_function,
    random_concave_polynomial,
    random_concave_weight,
    random_half_sine_function,
    sine,
)
from hardykappa.kappa import (
    SweepParams,
    compute_kappa,
    lemma4_residual,
    parts_identity_residual,
    parts_identity_sides,
    perturb_segment,
    random_equality_case,
    reflect_even,
    sweep,
    verify_corollary,
)
from hardykappa.search import (
    assemble_forms,
    correlation,
    gradient_check,
    initial_guess,
    maximize_kappa,
)
from hardykappa.smoothing import SmoothingSchedule, smooth_concave, smoothing_convergence
from hardykappa.witness import (
    LIMIT_DELTA_KAPPA,
    monotonicity_example,
    paper_coefficients,
    witness_coefficients,
    witness_result,
)


def verdict(criterion, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, detail


def test_criterion_01_monotonicity_example():
    t0 = time.perf_counter()
    report = monotonicity_example()
    elapsed = time.perf_counter() - t0
    pi2 = math.pi**2
    closed = ((pi2 + 4) / (pi2 - 4)) ** 2
    k = float(report.kappa)
    ok = abs(k - 5.5835) <= 1e-4 and abs(k - closed) <= 1e-12 and elapsed < 1.0
    verdict(1, ok, f"kappa = {k:.12f}, closed form = {closed:.12f}, {elapsed:.3f} s")


def test_criterion_02_witness_coefficients():
    rng = np.random.default_rng(20240602)
    t0 = time.perf_counter()
    deltas = set()
    while len(deltas) < 20:
        q = int(rng.integers(101, 5000))
        p = int(rng.integers(1, q))
        d = Fraction(p, q)
        if Fraction(1, 100) < d < Fraction(49, 100):
            deltas.add(d)
    mismatches = [d for d in sorted(deltas) if witness_coefficients(d) != paper_coefficients(d)]
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 5.0
    verdict(2, ok, f"{len(deltas)} deltas, {len(mismatches)} mismatches, {elapsed:.3f} s")


def test_criterion_03_witness_kappa():
    t0 = time.perf_counter()
    deltas = [Fraction(2, 5), Fraction(1, 4), Fraction(1, 10), Fraction(1, 20), Fraction(1, 100)]
    rows = [witness_result(d) for d in deltas]
    exact_match = all(r.match for r in rows)
    kappas = [r.kappa_exact for r in rows]
    increasing = all(k1 > k0 for k0, k1 in zip(kappas, kappas[1:]))
    tiny = witness_result(Fraction(1, 1000))
    rel = abs(tiny.delta_times_kappa - LIMIT_DELTA_KAPPA) / LIMIT_DELTA_KAPPA
    elapsed = time.perf_counter() - t0
    table = ", ".join(f"{r.delta}: {float(r.kappa_exact):.4f}" for r in rows)
    ok = exact_match and increasing and rel <= Fraction(1, 100) and elapsed < 30.0
    verdict(
        3,
        ok,
        f"exact match = {exact_match}; kappa by delta {{{table}}}; strictly increasing as delta "
        f"decreases = {increasing}; delta*kappa(1/1000) off the limit by {float(rel):.4%}; {elapsed:.2f} s",
    )


def test_criterion_04_theorem_sweep():
    t0 = time.perf_counter()
    report = sweep(2024, 1000, UNIT, SweepParams(family="random"))
    elapsed = time.perf_counter() - t0
    over = [e.index for e in report.entries if e.kappa > 1 + 1e-9]
    chain_bad = [e.index for e in report.entries if not e.chain_holds]
    ok = not over and not chain_bad and elapsed < 60.0
    verdict(
        4,
        ok,
        f"1000 pairs, max kappa = {report.max_kappa:.12f}, kappa > 1+1e-9: {len(over)}, "
        f"chain violations: {len(chain_bad)}, {elapsed:.2f} s",
    )


def test_criterion_05_equality_suite():
    worst_eq, worst_pert, exact_all = 0.0, 0.0, True
    bad = []
    for n in (1, 2, 3):
        for trial in range(10):
            case = random_equality_case([5, n, trial], UNIT, n)
            assert set(case.weight.breakpoints) <= set(case.grid)
            exact = compute_kappa(case.weight, case.function, exact=True)
            approx = compute_kappa(case.weight, case.function, exact=False)
            exact_all &= exact.kappa == 1
            worst_eq = max(worst_eq, abs(float(approx.kappa) - 1))
            pert = compute_kappa(perturb_segment(case), case.function)
            gap = 1 - float(pert.kappa)
            if gap <= 1e-6:
                bad.append((n, trial, float(pert.kappa)))
            worst_pert = max(worst_pert, float(pert.kappa))
    ok = exact_all and worst_eq <= 1e-9 and not bad
    verdict(
        5,
        ok,
        f"30 cases, exact kappa == 1 for all: {exact_all}, max |kappa-1| adaptive = {worst_eq:.2e}, "
        f"largest perturbed kappa = {worst_pert:.6f}",
    )


def test_criterion_06_corollary_suite():
    worst, disagree, failed = 0.0, 0.0, 0
    for i in range(200):
        pieces = 1 + i % 4
        w = random_concave_weight([6, i, 1], UNIT, pieces, nondecreasing=True)
        f = random_half_sine_function([6, i, 2], UNIT, 1 + i % 5)
        res = verify_corollary(w, f, UNIT)
        kd, kr = float(res.direct.report.kappa), float(res.reflected.report.kappa)
        worst = max(worst, kd, kr)
        disagree = max(disagree, res.agreement)
        failed += not (kd <= 1 + 1e-9 and kr <= 1 + 1e-9)
    try:
        reflect_even(Weight.polynomial((1, -1), UNIT), random_half_sine_function(0, UNIT, 1), UNIT)
        rejects = False
    except HypothesisError:
        rejects = True
    ok = failed == 0 and disagree <= 1e-9 and rejects
    verdict(
        6,
        ok,
        f"200 pairs, max kappa = {worst:.12f}, bound violations = {failed}, "
        f"max path disagreement = {disagree:.2e}, w = 1-x rejected: {rejects}",
    )


def test_criterion_07_identities():
    worst_parts = 0.0
    for i in range(100):
        w = random_concave_polynomial([7, i, 1], UNIT, 2 + i % 4)
        f = random_admissible_function([7, i, 2], UNIT, 1 + i % 5)
        worst_parts = max(worst_parts, parts_identity_residual(w, f, UNIT))
    w = Weight.polynomial((0, 1, -1), UNIT)
    lhs, rhs = parts_identity_sides(w, sine(UNIT, 1), UNIT)
    closed = abs(float(lhs) + 1) <= 1e-12 and abs(float(rhs) + 1) <= 1e-12
    worst_l4 = 0.0
    for i in range(100):
        w = random_concave_weight([8, i, 1], UNIT, 1 + i % 5)
        f = random_admissible_function([8, i, 2], UNIT, 1 + i % 5)
        worst_l4 = max(worst_l4, lemma4_residual(w, f, UNIT))
    ok = worst_parts <= 1e-9 and closed and worst_l4 <= 1e-9
    verdict(
        7,
        ok,
        f"parts identity max residual = {worst_parts:.2e}, closed-form sides = ({float(lhs):.15f}, "
        f"{float(rhs):.15f}), one-sided-derivative identity max residual = {worst_l4:.2e}",
    )


def test_criterion_08_smoothing():
    tent = Weight.piecewise_linear((0, Fraction(1, 2), 1), (0, 1, 0))
    schedule = SmoothingSchedule(tent, 6)
    rows = smoothing_convergence(schedule)
    dists = [d for _, d in rows]
    ratios = [d1 / d0 for d0, d1 in zip(dists, dists[1:])]
    structural = True
    for n in range(1, 7):
        wn = smooth_concave(schedule, n)
        structural &= (
            wn.concavity is Concavity.CERTIFIED_CONCAVE
            and wn.nonnegativity is Nonnegativity.CERTIFIED_NONNEGATIVE
            and wn.poly.smoothness(2) >= 2
        )
    deepest = smooth_concave(schedule, 6)
    k = float(compute_kappa(deepest, sine(UNIT, 2)).kappa)
    ok = structural and all(0.45 <= r <= 0.55 for r in ratios) and abs(k - 1) <= 1e-3
    verdict(
        8,
        ok,
        f"C2 concave nonnegative at all levels: {structural}, ratios = "
        f"{[round(r, 4) for r in ratios]}, kappa(w6, sin 2 pi x) = {k:.8f}",
    )


def test_criterion_09_search():
    forms = assemble_forms(Weight.constant(1, UNIT), UNIT, 24)
    res = maximize_kappa(forms, seed=0, init="sine")
    target = forms.basis.project(lambda x: np.sin(np.pi * x))
    corr = abs(correlation(forms, res.best_coefficients, target))
    flat_ok = 1 - 1e-4 <= res.best_kappa <= 1 + 1e-6 and corr >= 0.999

    quartic = Weight.polynomial((0, 0, 0, 0, 1), UNIT)
    values = []
    grad_err = 0.0
    for m in (16, 32, 64):
        fq = assemble_forms(quartic, UNIT, m)
        values.append(maximize_kappa(fq, seed=0, init="epsilon").best_kappa)
        grad_err = max(grad_err, gradient_check(fq, initial_guess(fq, 1)))
    grad_err = max(grad_err, gradient_check(forms, initial_guess(forms, 1)))
    grows = all(b > a for a, b in zip(values, values[1:])) and values[-1] > 1.5
    ok = flat_ok and grows and grad_err <= 1e-5
    verdict(
        9,
        ok,
        f"w=1: kappa = {res.best_kappa:.8f}, correlation = {corr:.6f}; w=x^4: kappa(16,32,64) = "
        f"{[round(v, 3) for v in values]}; gradient check max rel error = {grad_err:.2e}",
    )


def _dilate_weight(w, a, L):
    xs = [a + L * x for x in w.breakpoints]
    ys = [w.value(x) for x in w.breakpoints]
    return Weight.piecewise_linear(xs, ys)


def test_criterion_10_invariance():
    rng = np.random.default_rng(10)
    worst = {"f": 0.0, "w": 0.0, "dilation": 0.0}
    for i in range(50):
        w = random_concave_weight([10, i, 1], UNIT, 1 + i % 5)
        f = random_admissible_function([10, i, 2], UNIT, 1 + i % 4)
        base = float(compute_kappa(w, f).kappa)
        c = Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 1000)))
        s = Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 1000)))
        kf = float(compute_kappa(w, f.scaled(c)).kappa)
        kw = float(compute_kappa(w.scaled(s), f).kappa)
        a = Fraction(int(rng.integers(-50, 50)), 7)
        L = Fraction(int(rng.integers(1, 200)), 13)
        iv = Interval(a, a + L)
        fd = TestFunction(SineCombination(iv, f.body.terms), DD)
        kd = float(compute_kappa(_dilate_weight(w, a, L), fd, iv).kappa)
        worst["f"] = max(worst["f"], abs(kf - base) / base)
        worst["w"] = max(worst["w"], abs(kw - base) / base)
        worst["dilation"] = max(worst["dilation"], abs(kd - base) / base)
    ok = all(v <= 1e-10 for v in worst.values())
    verdict(10, ok, "max relative deviation over 50 instances: " + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


@pytest.fixture(scope="module", autouse=True)
def _total_budget():
    t0 = time.perf_counter()
    yield
    print(f"\nacceptance module wall time: {time.perf_counter() - t0:.1f} s (budget 180 s)")

