"""JSON encoding of intervals, weights and test functions.

Problem documents look like::

    {"interval": ["0", "1"],
     "weight": {"kind": "polynomial", "coefficients": ["1", "-1"]},
     "function": {"kind": "half_sine", "terms": [[1, 1]], "bc": "DirichletNeumann"}}

Exact rationals are written as ``"p/q"`` strings; floats stay JSON numbers.
Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .errors import ConfigError
from .funcspace import (
    BoundaryCondition,
    HalfSineCombination,
    Interval,
    PiecewisePolynomial,
    SineCombination,
    TestFunction,
    Weight,
)


def encode_number(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return float(x)


def decode_number(x):
    if isinstance(x, bool):
        raise ConfigError(f"expected a number, got {x!r}")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ConfigError(f"not a rational: {x!r}") from None
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise ConfigError(f"expected a number, got {x!r}")


def _keys(doc: dict, required: set, optional: set = frozenset(), where: str = ""):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where or 'document'} must be an object")
    missing = required - doc.keys()
    extra = doc.keys() - required - optional
    if missing:
        raise ConfigError(f"{where}: missing field(s) {sorted(missing)}")
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")


def _numbers(xs, where):
    if not isinstance(xs, list):
        raise ConfigError(f"{where} must be a list")
    return [decode_number(x) for x in xs]


def interval_to_json(iv: Interval):
    return [encode_number(iv.a), encode_number(iv.b)]


def interval_from_json(doc) -> Interval:
    if not isinstance(doc, list) or len(doc) != 2:
        raise ConfigError("interval must be a two-element list [a, b]")
    a, b = (decode_number(x) for x in doc)
    if not a < b:
        raise ConfigError(f"interval needs a < b, got {doc}")
    return Interval(a, b)


def _pp_to_json(pp: PiecewisePolynomial):
    return {
        "breakpoints": [encode_number(x) for x in pp.breakpoints],
        "pieces": [[encode_number(c) for c in p] or ["0"] for p in pp.pieces],
    }


def _pp_from_json(doc, where):
    bp = _numbers(doc["breakpoints"], f"{where}.breakpoints")
    if not isinstance(doc["pieces"], list):
        raise ConfigError(f"{where}.pieces must be a list")
    pieces = [_numbers(p, f"{where}.pieces") for p in doc["pieces"]]
    try:
        return PiecewisePolynomial(bp, pieces)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def weight_to_json(w: Weight) -> dict:
    pp = w.poly
    if w.kind == "constant":
        return {"kind": "constant", "value": encode_number(pp.pieces[0][0] if pp.pieces[0] else 0)}
    if w.kind == "polynomial":
        return {"kind": "polynomial", "coefficients": [encode_number(c) for c in pp.pieces[0]] or ["0"]}
    if w.kind in ("piecewise_linear", "sampled"):
        return {
            "kind": w.kind,
            "breakpoints": [encode_number(x) for x in pp.breakpoints],
            "values": [encode_number(pp.value(x)) for x in pp.breakpoints],
        }
    return {"kind": "piecewise_polynomial", **_pp_to_json(pp)}


def weight_from_json(doc, iv: Interval) -> Weight:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("weight must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "constant":
        _keys(doc, {"kind", "value"}, where="weight")
        return Weight.constant(decode_number(doc["value"]), iv)
    if kind == "polynomial":
        _keys(doc, {"kind", "coefficients"}, where="weight")
        return Weight.polynomial(_numbers(doc["coefficients"], "weight.coefficients"), iv)
    if kind in ("piecewise_linear", "sampled"):
        _keys(doc, {"kind", "breakpoints", "values"}, where="weight")
        xs = _numbers(doc["breakpoints"], "weight.breakpoints")
        ys = _numbers(doc["values"], "weight.values")
        if len(xs) != len(ys) or len(xs) < 2:
            raise ConfigError("weight.breakpoints and weight.values need equal length >= 2")
        if xs[0] != iv.a or xs[-1] != iv.b:
            raise ConfigError("weight breakpoints must span the interval")
        try:
            if kind == "sampled":
                return Weight.sampled(xs, ys)
            return Weight.piecewise_linear(xs, ys)
        except ValueError as exc:
            raise ConfigError(f"weight: {exc}") from None
    if kind == "piecewise_polynomial":
        _keys(doc, {"kind", "breakpoints", "pieces"}, where="weight")
        pp = _pp_from_json(doc, "weight")
        if pp.breakpoints[0] != iv.a or pp.breakpoints[-1] != iv.b:
            raise ConfigError("weight breakpoints must span the interval")
        return Weight.piecewise_polynomial(pp)
    raise ConfigError(f"unknown weight kind {kind!r}")


_TRIG = {"sine": SineCombination, "half_sine": HalfSineCombination}


def function_to_json(f: TestFunction) -> dict:
    body = f.body
    if isinstance(body, PiecewisePolynomial):
        out = {"kind": "piecewise_polynomial", **_pp_to_json(body)}
    else:
        kind = "sine" if isinstance(body, SineCombination) else "half_sine"
        out = {"kind": kind, "terms": [[encode_number(c), n] for c, n in body.terms]}
    out["bc"] = f.bc.value
    return out


def function_from_json(doc, iv: Interval) -> TestFunction:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("function must be an object with a 'kind'")
    kind = doc["kind"]
    default_bc = "DirichletNeumann" if kind == "half_sine" else "DirichletDirichlet"
    try:
        bc = BoundaryCondition(doc.get("bc", default_bc))
    except ValueError:
        raise ConfigError(f"unknown boundary condition {doc.get('bc')!r}") from None
    if kind in _TRIG:
        _keys(doc, {"kind", "terms"}, {"bc"}, where="function")
        terms = doc["terms"]
        if not isinstance(terms, list) or not all(isinstance(t, list) and len(t) == 2 for t in terms):
            raise ConfigError("function.terms must be a list of [coefficient, mode] pairs")
        parsed = []
        for c, n in terms:
            if not isinstance(n, int) or isinstance(n, bool):
                raise ConfigError(f"mode must be an integer, got {n!r}")
            parsed.append((decode_number(c), n))
        try:
            return TestFunction(_TRIG[kind](iv, tuple(parsed)), bc)
        except ValueError as exc:
            raise ConfigError(f"function: {exc}") from None
    if kind == "piecewise_polynomial":
        _keys(doc, {"kind", "breakpoints", "pieces"}, {"bc"}, where="function")
        pp = _pp_from_json(doc, "function")
        if pp.breakpoints[0] != iv.a or pp.breakpoints[-1] != iv.b:
            raise ConfigError("function breakpoints must span the interval")
        return TestFunction(pp, bc)
    raise ConfigError(f"unknown function kind {kind!r}")


def problem_to_json(iv: Interval, w: Weight | None = None, f: TestFunction | None = None) -> dict:
    out = {"interval": interval_to_json(iv)}
    if w is not None:
        out["weight"] = weight_to_json(w)
    if f is not None:
        out["function"] = function_to_json(f)
    return out


def problem_from_json(doc: dict):
    """``(interval, weight or None, function or None)`` from a problem document."""
    _keys(doc, {"interval"}, {"weight", "function"}, where="problem")
    iv = interval_from_json(doc["interval"])
    w = weight_from_json(doc["weight"], iv) if "weight" in doc else None
    f = function_from_json(doc["function"], iv) if "function" in doc else None
    return iv, w, f


def digest(doc) -> str:
    """Short stable hash of a JSON-able document."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
