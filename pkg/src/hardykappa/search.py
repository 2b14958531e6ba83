"""Discrete search for the supremum of kappa at a fixed weight.

Test functions are restricted to C^2 cubic splines on a uniform grid that
vanish at both ends.  The three integrals become quadratic forms in the
spline coefficients, assembled exactly from the weight's polynomial pieces,
and ``log kappa`` is maximised by gradient ascent with Armijo backtracking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline
from scipy.linalg import cho_factor, cho_solve, eigh
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import poly as P
from .errors import ConvergenceError, ParameterError
from .funcspace import DD, Interval, PiecewisePolynomial, TestFunction, Weight

# Uniform cubic B-spline pieces on [0, 1] for the four splines alive on a
# knot interval, ordered left to right.
_LOCAL = (
    P.scale((1, -3, 3, -1), Fraction(1, 6)),
    P.scale((4, 0, -6, 3), Fraction(1, 6)),
    P.scale((1, 3, 3, -3), Fraction(1, 6)),
    P.scale((0, 0, 0, 1), Fraction(1, 6)),
)


class SplineBasis:
    """C^2 cubic splines on ``n_basis - 1`` uniform intervals, zero at both ends.

    Raw B-splines ``B_j`` (centred at knot ``j``, ``j = -1 .. N+1``) are
    combined so every basis function vanishes at ``a`` and ``b``: near ``a``
    the pair ``B_0 - 4 B_-1`` and ``B_1 - B_-1``, mirrored near ``b``, and the
    interior splines unchanged.
    """

    def __init__(self, interval: Interval, n_basis: int):
        if n_basis < 4:
            raise ParameterError(f"need at least 4 basis functions, got {n_basis}")
        self.interval = interval
        self.n_basis = n_basis
        self.n_intervals = n_basis - 1
        N = self.n_intervals
        a, b = interval.a, interval.b
        self.h = (b - a) / N
        self.knots = [a + i * self.h for i in range(N + 1)]
        T = np.zeros((n_basis, N + 3), dtype=int)
        # raw column r holds B_{r-1}
        T[0, 1], T[0, 0] = 1, -4
        T[1, 2], T[1, 0] = 1, -1
        for k in range(2, n_basis - 2):
            T[k, k + 1] = 1
        T[n_basis - 2, N], T[n_basis - 2, N + 2] = 1, -1
        T[n_basis - 1, N + 1], T[n_basis - 1, N + 2] = 1, -4
        self.transform = T
        fa, fh = float(a), float(self.h)
        self._bspline_knots = fa + fh * np.arange(-3, N + 4)

    def raw(self, c):
        return self.transform.T @ np.asarray(c)

    def evaluate(self, c, x, nu: int = 0):
        spl = BSpline(self._bspline_knots, self.raw(np.asarray(c, dtype=float)), 3, extrapolate=False)
        return spl(np.asarray(x, dtype=float), nu)

    def to_function(self, c) -> TestFunction:
        """The spanned function as an exact piecewise polynomial."""
        raw = [sum(Fraction(int(t)) * P.to_rational(ci) for t, ci in zip(col, c)) for col in self.transform.T]
        pieces = []
        for i, x0 in enumerate(self.knots[:-1]):
            local = P.ZERO
            for p in range(4):
                local = P.add(local, P.scale(_LOCAL[p], raw[i + p]))
            pieces.append(P.compose_affine(local, 1 / self.h, -x0 / self.h))
        return TestFunction(PiecewisePolynomial(self.knots, pieces), DD)

    def project(self, g) -> np.ndarray:
        """Unweighted L^2 projection of a vectorised callable onto the basis."""
        gram = assemble_forms(Weight.constant(1, self.interval), self.interval, self.n_basis).A0
        nodes, weights = leggauss(16)
        load = np.zeros(self.n_intervals + 3)
        fh = float(self.h)
        for i, x0 in enumerate(self.knots[:-1]):
            t = 0.5 * (nodes + 1)
            gx = g(float(x0) + fh * t)
            for p in range(4):
                bp = P.evaluate(_LOCAL[p], t)
                load[i + p] += 0.5 * fh * np.sum(weights * gx * bp)
        return np.linalg.solve(gram, self.transform @ load)

    def describe(self) -> dict:
        return {
            "kind": "cubic_spline",
            "n_basis": self.n_basis,
            "intervals": self.n_intervals,
            "interval": [str(self.interval.a), str(self.interval.b)],
        }


@dataclass(frozen=True)
class QuadraticForms:
    """``A_k[i, j] = int w phi_i^(k) phi_j^(k)`` for ``k = 0, 1, 2``."""

    basis: SplineBasis
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray

    def values(self, c):
        c = np.asarray(c, dtype=float)
        return c @ self.A0 @ c, c @ self.A1 @ c, c @ self.A2 @ c

    def kappa(self, c) -> float:
        q0, q1, q2 = self.values(c)
        return q1 * q1 / (q0 * q2)

    def log_kappa(self, c) -> float:
        q0, q1, q2 = self.values(c)
        return 2 * math.log(q1) - math.log(q0) - math.log(q2)

    def gradient(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        a0, a1, a2 = self.A0 @ c, self.A1 @ c, self.A2 @ c
        return 4 * a1 / (c @ a1) - 2 * a0 / (c @ a0) - 2 * a2 / (c @ a2)


def _local_products():
    out = {}
    for k in range(3):
        ders = [P.deriv(p, k) for p in _LOCAL]
        for p in range(4):
            for q in range(p, 4):
                out[k, p, q] = P.mul(ders[p], ders[q])
    return out


_PRODUCTS = _local_products()


def assemble_forms(w: Weight, iv: Interval | None = None, m: int = 16) -> QuadraticForms:
    """Exact rational assembly of the three Gram matrices on ``m`` splines."""
    iv = w.interval if iv is None else iv
    if m < 4:
        raise ParameterError(f"m must be >= 4, got {m}")
    if w.interval != iv:
        raise ParameterError("weight and basis intervals differ")
    basis = SplineBasis(iv, m)
    wpp = w.poly
    if not wpp.is_rational:
        wpp = PiecewisePolynomial(
            [P.to_rational(x) for x in wpp.breakpoints],
            [[P.to_rational(c) for c in p] for p in wpp.pieces],
        )
    h = basis.h
    R = [[[Fraction(0)] * (m + 2) for _ in range(m + 2)] for _ in range(3)]
    for i, x0 in enumerate(basis.knots[:-1]):
        x1 = basis.knots[i + 1]
        cuts = [x0] + [x for x in wpp.breakpoints if x0 < x < x1] + [x1]
        moments = [Fraction(0)] * 11  # int t^j w(x0 + h t) dt over [0, 1]
        for lo, hi in zip(cuts, cuts[1:]):
            piece = wpp.pieces[wpp.piece_index((lo + hi) / 2)]
            wl = P.compose_affine(piece, h, x0)
            t0, t1 = (lo - x0) / h, (hi - x0) / h
            for j in range(11):
                moments[j] += P.definite(P.mul((0,) * j + (1,), wl), t0, t1)
        for (k, p, q), prod in _PRODUCTS.items():
            val = sum((c * moments[j] for j, c in enumerate(prod)), Fraction(0))
            val *= h ** (1 - 2 * k)
            R[k][i + p][i + q] += val
            if p != q:
                R[k][i + q][i + p] += val
    T = basis.transform
    mats = []
    for k in range(3):
        raw = np.array([[float(v) for v in row] for row in R[k]])
        A = T @ raw @ T.T
        mats.append(0.5 * (A + A.T))
    return QuadraticForms(basis, *mats)


@dataclass(frozen=True)
class SearchResult:
    best_kappa: float
    best_coefficients: np.ndarray
    iterations: int
    converged: bool
    gradient_norm_final: float
    restarts: int = 0
    trace: tuple = ()  # log kappa of every accepted iterate

    def to_json(self, basis: SplineBasis | None = None, grid_points: int = 257) -> dict:
        out = {
            "best_kappa": float(self.best_kappa),
            "best_coefficients": [float(c) for c in self.best_coefficients],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "gradient_norm_final": float(self.gradient_norm_final),
            "restarts": int(self.restarts),
        }
        if basis is not None:
            a, b = float(basis.interval.a), float(basis.interval.b)
            x = np.linspace(a, b, grid_points)
            y = basis.evaluate(self.best_coefficients, x)
            out["basis"] = basis.describe()
            out["grid"] = {"x": x.tolist(), "f": np.nan_to_num(y).tolist()}
        return out


def initial_guess(forms: QuadraticForms, seed, perturbation: float = 0.1) -> np.ndarray:
    """Projection of the first sine mode plus a seeded random perturbation.

    The perturbation's size is relative in the ``A2`` energy (the curvature
    term), so high-frequency noise cannot swamp the starting quotient.
    """
    basis = forms.basis
    a, L = float(basis.interval.a), float(basis.interval.length)
    c = basis.project(lambda x: np.sin(np.pi * (x - a) / L))
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(c.shape)
    c = c + perturbation * math.sqrt((c @ forms.A2 @ c) / (noise @ forms.A2 @ noise)) * noise
    return c / math.sqrt(c @ forms.A0 @ c)


def _pencil_top(forms: QuadraticForms, eps: float):
    B = eps * forms.A0 + forms.A2 / (4 * eps)
    m = forms.A1.shape[0]
    vals, vecs = eigh(forms.A1, B, subset_by_index=[m - 1, m - 1])
    return float(vals[0]), vecs[:, 0]


@dataclass(frozen=True)
class EpsilonSweep:
    kappa: float
    eps: float
    coefficients: np.ndarray


def epsilon_sweep(forms: QuadraticForms, n_grid: int = 300) -> EpsilonSweep:
    """Discrete supremum of kappa through the one-parameter family of
    symmetric pencils ``A1 - lambda (eps A0 + A2 / (4 eps))``.

    Since ``min over eps of eps*q0 + q2/(4 eps)`` is ``sqrt(q0 q2)``, the
    supremum of kappa is the square of the largest top eigenvalue over eps.
    A log grid of eps is scanned and every local peak refined.
    """
    d0, d2 = np.diag(forms.A0), np.diag(forms.A2)
    top = math.log10(float(np.max(d2 / np.maximum(d0, np.finfo(float).tiny))))
    log_eps = np.linspace(-4.0, top + 2.0, n_grid) * math.log(10)
    lam = np.array([_pencil_top(forms, math.exp(u))[0] for u in log_eps])
    best = (-math.inf, None)
    for i in range(n_grid):
        if (i > 0 and lam[i] < lam[i - 1]) or (i < n_grid - 1 and lam[i] < lam[i + 1]):
            continue
        lo, hi = log_eps[max(i - 1, 0)], log_eps[min(i + 1, n_grid - 1)]
        res = minimize_scalar(
            lambda u: -_pencil_top(forms, math.exp(u))[0],
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        u = res.x if -res.fun > lam[i] else log_eps[i]
        val = max(-res.fun, lam[i])
        if val > best[0]:
            best = (val, u)
    val, u = best
    _, c = _pencil_top(forms, math.exp(u))
    c = c / math.sqrt(c @ forms.A0 @ c)
    return EpsilonSweep(val * val, math.exp(u), c)


def _feasible(forms, c) -> bool:
    q0, q1, q2 = forms.values(c)
    return q0 > 0 and q1 > 0 and q2 > 0


def maximize_kappa(
    forms: QuadraticForms,
    seed=0,
    max_iter: int = 5000,
    grad_tol: float = 1e-8,
    step_rule: str = "armijo",
    armijo: float = 1e-4,
    backtrack: float = 0.5,
    perturbation: float = 0.1,
    max_restarts: int = 3,
    init: str = "epsilon",
) -> SearchResult:
    """Gradient ascent on ``log kappa(c)``.

    ``step_rule="armijo"`` follows the Euclidean gradient;
    ``"armijo-mass"`` follows the gradient in the ``A0`` inner product,
    which removes most of the grid-dependent ill-conditioning.  Iterates are
    rescaled to ``c^T A0 c = 1`` after every step.

    ``init="epsilon"`` (the default) starts from the maximiser found by
    :func:`epsilon_sweep`, which is already the discrete supremum up to the
    scalar search in ``eps``; ``init="sine"`` starts from the perturbed
    projection of the first sine mode and can stall at a local maximum.
    """
    if init not in ("sine", "epsilon"):
        raise ParameterError(f"unknown init {init!r}")
    if step_rule not in ("armijo", "armijo-mass"):
        raise ParameterError(f"unknown step rule {step_rule!r}")
    if step_rule == "armijo-mass":
        factor = cho_factor(forms.A0)

        def solve(g):
            return cho_solve(factor, g)

    else:
        solve = None

    restarts = 0
    if init == "epsilon":
        c = epsilon_sweep(forms).coefficients
    else:
        c = initial_guess(forms, seed, perturbation)
    while not _feasible(forms, c):
        restarts += 1
        if restarts > max_restarts:
            raise ConvergenceError("no feasible starting point after restarts")
        c = initial_guess(forms, [seed, restarts], perturbation)
    f = forms.log_kappa(c)
    g = forms.gradient(c)
    trace = [f]
    step = 1.0
    it = 0
    converged = False
    while it < max_iter:
        if float(np.linalg.norm(g)) <= grad_tol:
            converged = True
            break
        d = g if solve is None else solve(g)
        slope = float(g @ d)
        step = min(step * 2, 1e12)
        while True:
            trial = c + step * d
            if _feasible(forms, trial):
                ft = forms.log_kappa(trial)
                if ft >= f + armijo * step * slope:
                    break
            step *= backtrack
            if step < 1e-300:
                break
        if step < 1e-300:
            # no ascent possible at machine precision
            break
        # Trial points outside the feasible cone were rejected above, so the
        # rescaled iterate keeps all three forms positive.
        c = trial / math.sqrt(trial @ forms.A0 @ trial)
        f = forms.log_kappa(c)
        g = forms.gradient(c)
        trace.append(f)
        it += 1
    return SearchResult(
        math.exp(f), c, it, converged, float(np.linalg.norm(g)), restarts, tuple(trace)
    )


def gradient_check(forms: QuadraticForms, c, h: float = 1e-6) -> float:
    """Largest relative gap between the analytic gradient of ``log kappa``
    and central differences, relative to the gradient's max-norm."""
    c = np.asarray(c, dtype=float)
    if not _feasible(forms, c):
        raise ParameterError("c must make all three forms positive")
    g = forms.gradient(c)
    fd = np.empty_like(c)
    for i in range(c.size):
        e = np.zeros_like(c)
        e[i] = h
        fd[i] = (forms.log_kappa(c + e) - forms.log_kappa(c - e)) / (2 * h)
    scale = max(float(np.max(np.abs(g))), np.finfo(float).tiny)
    return float(np.max(np.abs(fd - g)) / scale)


def correlation(forms: QuadraticForms, c, d) -> float:
    """``|<c, d>| / (|c| |d|)`` in the ``A0`` inner product."""
    c, d = np.asarray(c, float), np.asarray(d, float)
    A = forms.A0
    return abs(c @ A @ d) / math.sqrt((c @ A @ c) * (d @ A @ d))


class KappaMaximizer(BaseEstimator):
    """Estimator wrapper: ``fit(weight)`` searches for the maximiser.

    Parameters
    ----------
    n_basis : int
        Number of spline basis functions.
    max_iter, grad_tol, step_rule, armijo, backtrack :
        Passed to :func:`maximize_kappa`.
    perturbation : float
        Relative size of the random perturbation of the starting point.
    init : {"sine", "epsilon"}
        Starting point; see :func:`maximize_kappa`.
    random_state : int
        Seed for the starting perturbation.

    Attributes
    ----------
    forms_ : QuadraticForms
    result_ : SearchResult
    best_kappa_ : float
    coef_ : ndarray
    n_iter_ : int
    """

    def __init__(
        self,
        n_basis=24,
        max_iter=5000,
        grad_tol=1e-8,
        step_rule="armijo",
        armijo=1e-4,
        backtrack=0.5,
        perturbation=0.1,
        init="epsilon",
        random_state=0,
    ):
        self.n_basis = n_basis
        self.max_iter = max_iter
        self.grad_tol = grad_tol
        self.step_rule = step_rule
        self.armijo = armijo
        self.backtrack = backtrack
        self.perturbation = perturbation
        self.init = init
        self.random_state = random_state

    def fit(self, weight: Weight, interval: Interval | None = None):
        if not isinstance(weight, Weight):
            raise TypeError(f"expected a Weight, got {type(weight).__name__}")
        self.forms_ = assemble_forms(weight, interval, self.n_basis)
        self.result_ = maximize_kappa(
            self.forms_,
            seed=self.random_state,
            max_iter=self.max_iter,
            grad_tol=self.grad_tol,
            step_rule=self.step_rule,
            armijo=self.armijo,
            backtrack=self.backtrack,
            perturbation=self.perturbation,
            init=self.init,
        )
        self.best_kappa_ = self.result_.best_kappa
        self.coef_ = self.result_.best_coefficients
        self.n_iter_ = self.result_.iterations
        return self

    def predict(self, x):
        """The maximising function (normalised in the weighted L^2 norm) at ``x``."""
        check_is_fitted(self, "coef_")
        return self.forms_.basis.evaluate(self.coef_, x)

    def score(self, weight=None, interval=None):
        check_is_fitted(self, "best_kappa_")
        return self.best_kappa_
