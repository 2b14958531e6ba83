"""Command-line front end.

Every subcommand reads an optional JSON config (``--config``), lets flags
override it, and writes a JSON (or CSV) report that embeds the tool
version and the fully resolved config.  Exit codes: 0 success, 1 a check
failed, 2 bad usage or config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import ConfigError, HypothesisError, KappaError
from .funcspace import UNIT, Interval, check_concave, check_nonnegative
from .kappa import (
    SweepParams,
    compute_kappa,
    epsilon_equivalence_check,
    lemma4_residual,
    make_equality_case,
    parts_identity_residual,
    proof_chain,
    sweep,
    verify_corollary,
    verify_theorem,
)
from .quadrature import DEFAULT_TOL
from .schema import (
    decode_number,
    encode_number,
    function_from_json,
    function_to_json,
    interval_from_json,
    weight_from_json,
    weight_to_json,
)
from .search import assemble_forms, epsilon_sweep, maximize_kappa
from .smoothing import SmoothingSchedule, grid_error_bound, smooth_concave, smoothing_convergence
from .witness import DEFAULT_DELTAS, monotonicity_closed_form, monotonicity_example, witness_study


class Failure(Exception):
    """A check ran to completion and did not hold."""


# Option defaults per subcommand; config keys outside these (plus the
# problem keys listed in PROBLEM_KEYS) are rejected.
DEFAULTS = {
    "kappa": {"tol": DEFAULT_TOL, "exact": False},
    "verify": {
        "seed": 0,
        "count": 100,
        "family": "random",
        "max_pieces": 5,
        "max_mode": 6,
        "max_equality_mode": 3,
    },
    "equality": {"n": 2, "lambda": "1", "node_values": ["0", "1", "0"], "tol": 1e-9, "exact": False},
    "reflect": {"tol": 1e-9},
    "witness": {"deltas": [str(d) for d in DEFAULT_DELTAS]},
    "monotonicity": {},
    "smooth": {"levels": 6},
    "search": {
        "basis_size": 24,
        "seed": 0,
        "max_iter": 5000,
        "grad_tol": 1e-8,
        "step_rule": "armijo",
        "init": "epsilon",
    },
    "identities": {"tol": 1e-9, "eps_grid": None},
}
PROBLEM_KEYS = {
    "kappa": {"interval", "weight", "function"},
    "verify": {"interval"},
    "equality": {"interval"},
    "reflect": {"interval", "weight", "function"},
    "witness": set(),
    "monotonicity": set(),
    "smooth": {"interval", "weight"},
    "search": {"interval", "weight"},
    "identities": {"interval", "weight", "function"},
}
HELP = {
    "kappa": "compute kappa(w, f) for the weight and function in the config",
    "verify": "randomised check of kappa <= 1 over concave weights",
    "equality": "build an equality case and confirm kappa = 1",
    "reflect": "Dirichlet-Neumann check, directly and via even reflection",
    "witness": "exact kappa of the x^4 witness family against the closed form",
    "monotonicity": "kappa for w = 1 - x, f = sin(pi x / 2)",
    "smooth": "C^2 concave smoothing levels and their sup distances",
    "search": "spline search for the largest kappa at a fixed weight",
    "identities": "integration-by-parts residuals and the epsilon form of the bound",
}
# flag name -> config key
FLAG_KEYS = {
    "seed": "seed",
    "count": "count",
    "deltas": "deltas",
    "basis_size": "basis_size",
    "tol": "tol",
}


def _parse_deltas(text: str):
    try:
        return [str(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardykappa",
        description="Weighted kappa inequality toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs.required = True
    for name, defaults in DEFAULTS.items():
        shown = ", ".join(f"{k}={v}" for k, v in defaults.items()) or "none"
        p = subs.add_parser(
            name,
            help=HELP[name],
            description=f"{HELP[name]}. Config option defaults: {shown}.",
        )

        def flag_help(text, key, name=name, defaults=defaults):
            if key not in defaults:
                return f"{text} (not used by {name})"
            return f"{text} (default: {defaults[key]})"

        p.add_argument("--config", metavar="PATH", help="JSON config file (default: none, built-in defaults)")
        p.add_argument("--out", metavar="PATH", help="write the report here (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default: json)")
        p.add_argument("--seed", type=int, metavar="N", help=flag_help("random seed", "seed"))
        p.add_argument("--count", type=int, metavar="N", help=flag_help("number of sweep instances", "count"))
        p.add_argument(
            "--deltas", type=_parse_deltas, metavar="LIST", help=flag_help("comma-separated rationals", "deltas")
        )
        p.add_argument(
            "--basis-size", dest="basis_size", type=int, metavar="M", help=flag_help("spline basis size", "basis_size")
        )
        p.add_argument("--tol", type=float, metavar="X", help=flag_help("tolerance", "tol"))
        p.add_argument("--exact", action="store_true", help=flag_help("force rational mode", "exact"))
    return parser


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def resolve_config(command: str, args) -> dict:
    doc = _load_config(args.config)
    allowed = set(DEFAULTS[command]) | PROBLEM_KEYS[command]
    extra = set(doc) - allowed
    if extra:
        raise ConfigError(f"unknown config field(s) for {command}: {sorted(extra)}")
    cfg = dict(DEFAULTS[command])
    cfg.update(doc)
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        if key not in DEFAULTS[command]:
            raise ConfigError(f"--{flag.replace('_', '-')} does not apply to {command}")
        cfg[key] = value
    if args.exact:
        if "exact" not in DEFAULTS[command]:
            raise ConfigError(f"--exact does not apply to {command}")
        cfg["exact"] = True
    return cfg


def _interval(cfg) -> Interval:
    return interval_from_json(cfg["interval"]) if "interval" in cfg else UNIT


def _require(cfg, key, command):
    if key not in cfg:
        raise ConfigError(f"{command} needs a '{key}' in its config")
    return cfg[key]


def _int(cfg, key, minimum=None):
    v = cfg[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{key} must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{key} must be >= {minimum}")
    return v


def _float(cfg, key):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number")
    return float(v)


def _problem(cfg, command):
    iv = _interval(cfg)
    w = weight_from_json(_require(cfg, "weight", command), iv) if "weight" in PROBLEM_KEYS[command] else None
    f = function_from_json(_require(cfg, "function", command), iv) if "function" in PROBLEM_KEYS[command] else None
    return iv, w, f


def cmd_kappa(cfg):
    iv, w, f = _problem(cfg, "kappa")
    exact = True if cfg["exact"] else None
    report = compute_kappa(w, f, iv, tol=_float(cfg, "tol"), exact=exact)
    summary = f"kappa = {float(report.kappa):.10g} ({report.mode.value})"
    return {"kappa": report.to_json()}, summary, None


def cmd_verify(cfg):
    iv = _interval(cfg)
    params = SweepParams(
        family=cfg["family"],
        max_pieces=_int(cfg, "max_pieces", 1),
        max_mode=_int(cfg, "max_mode", 1),
        max_equality_mode=_int(cfg, "max_equality_mode", 1),
    )
    report = sweep(_int(cfg, "seed"), _int(cfg, "count", 1), iv, params)
    summary = (
        f"{report.count} instances, max kappa = {report.max_kappa:.12g}, "
        f"failures = {len(report.failures)}"
    )
    if report.failures:
        return {"sweep": report.to_json()}, summary, report.to_csv(), Failure(summary)
    return {"sweep": report.to_json()}, summary, report.to_csv()


def cmd_equality(cfg):
    iv = _interval(cfg)
    node_values = cfg["node_values"]
    if not isinstance(node_values, list):
        raise ConfigError("node_values must be a list")
    case = make_equality_case(
        iv, _int(cfg, "n", 1), decode_number(cfg["lambda"]), [decode_number(v) for v in node_values]
    )
    check = verify_theorem(case.weight, case.function, iv, exact=True if cfg["exact"] else None)
    tol = _float(cfg, "tol")
    kappa = check.report.kappa
    ok = kappa == 1 if isinstance(kappa, Fraction) else abs(float(kappa) - 1) <= tol
    out = {
        "weight": weight_to_json(case.weight),
        "function": function_to_json(case.function),
        "kappa": check.report.to_json(),
        "equality_holds": bool(ok),
    }
    summary = f"n = {case.n}, kappa = {kappa}, equality {'holds' if ok else 'FAILS'}"
    return out, summary, None, (None if ok else Failure(summary))


def cmd_reflect(cfg):
    iv, w, f = _problem(cfg, "reflect")
    result = verify_corollary(w, f, iv)
    tol = _float(cfg, "tol")
    ok = result.passed and result.agreement <= tol
    out = {
        "direct": result.direct.report.to_json(),
        "reflected": result.reflected.report.to_json(),
        "agreement": result.agreement,
        "passed": bool(ok),
    }
    summary = (
        f"direct kappa = {float(result.direct.report.kappa):.12g}, "
        f"reflected kappa = {float(result.reflected.report.kappa):.12g}"
    )
    return out, summary, None, (None if ok else Failure(summary))


def cmd_witness(cfg):
    deltas = cfg["deltas"]
    if not isinstance(deltas, list):
        raise ConfigError("deltas must be a list")
    rows = witness_study([decode_number(d) for d in deltas])
    table = [r.to_json() for r in rows]
    buf = io.StringIO()
    if table:
        writer = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
    mismatches = [r.delta for r in rows if not r.match]
    summary = f"{len(rows)} deltas, {len(rows) - len(mismatches)} exact matches"
    return {"witness": table}, summary, buf.getvalue(), (Failure(summary) if mismatches else None)


def cmd_monotonicity(cfg):
    report = monotonicity_example()
    out = {"kappa": report.to_json(), "closed_form": monotonicity_closed_form()}
    return out, f"kappa = {float(report.kappa):.10g}", None


def cmd_smooth(cfg):
    iv, w, _ = _problem(cfg, "smooth")
    schedule = SmoothingSchedule(w, _int(cfg, "levels", 1))
    rows = smoothing_convergence(schedule)
    levels = []
    ok = True
    for n, dist in rows:
        wn = smooth_concave(schedule, n)
        concave, nonneg = check_concave(wn), check_nonnegative(wn)
        ok &= bool(concave) and bool(nonneg) and wn.poly.smoothness() >= 2
        levels.append(
            {
                "n": n,
                "halfwidth": encode_number(schedule.halfwidth(n)),
                "sup_distance": dist,
                "concavity": concave.verdict.value,
                "nonnegativity": nonneg.verdict.value,
                "weight": weight_to_json(wn),
            }
        )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "sup_distance"])
    writer.writerows([n, repr(d)] for n, d in rows)
    out = {"levels": levels, "grid_error_bound": grid_error_bound(schedule)}
    summary = "sup distances: " + ", ".join(f"{d:.3g}" for _, d in rows)
    return out, summary, buf.getvalue(), (None if ok else Failure(summary))


def cmd_search(cfg):
    iv, w, _ = _problem(cfg, "search")
    forms = assemble_forms(w, iv, _int(cfg, "basis_size", 4))
    result = maximize_kappa(
        forms,
        seed=_int(cfg, "seed"),
        max_iter=_int(cfg, "max_iter", 0),
        grad_tol=_float(cfg, "grad_tol"),
        step_rule=cfg["step_rule"],
        init=cfg["init"],
    )
    out = {"search": result.to_json(forms.basis), "epsilon_sweep_kappa": epsilon_sweep(forms).kappa}
    grid = out["search"]["grid"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "f"])
    writer.writerows([repr(x), repr(y)] for x, y in zip(grid["x"], grid["f"]))
    summary = f"best kappa = {result.best_kappa:.10g} after {result.iterations} iterations"
    return out, summary, buf.getvalue()


def cmd_identities(cfg):
    iv, w, f = _problem(cfg, "identities")
    tol = _float(cfg, "tol")
    out = {}
    ok = True
    try:
        r = parts_identity_residual(w, f, iv)
        out["parts_identity_residual"] = r
        ok &= r <= tol
    except KappaError as exc:
        out["parts_identity_residual"] = f"not applicable: {exc}"
    try:
        r = lemma4_residual(w, f, iv)
        out["lemma4_residual"] = r
        ok &= r <= tol
    except KappaError as exc:
        out["lemma4_residual"] = f"not applicable: {exc}"
    report = compute_kappa(w, f, iv)
    A, B, C = float(report.I0), float(report.I1), float(report.I2)
    grid = cfg["eps_grid"]
    grid = [B / (2 * A)] if grid is None else [float(decode_number(e)) for e in grid]
    eps = epsilon_equivalence_check(A, B, C, grid, rtol=1e-12)
    out["epsilon_check"] = {
        "product_holds": eps.product_holds,
        "eps_holds": eps.eps_holds,
        "minimizer": float(eps.minimizer),
        "agree": eps.agree,
    }
    ok &= eps.agree
    if w.is_concave and f.bc.value == "DirichletDirichlet":
        chain = proof_chain(w, f, iv, tol)
        out["chain"] = {
            "I1": chain.I1,
            "middle": chain.middle,
            "sqrt_I0_I2": chain.geometric_mean,
            "holds": chain.holds,
        }
        ok &= chain.holds
    summary = ", ".join(f"{k}={v}" for k, v in out.items() if not isinstance(v, dict))
    return out, summary or "identities checked", None, (None if ok else Failure(summary))


COMMANDS = {
    "kappa": cmd_kappa,
    "verify": cmd_verify,
    "equality": cmd_equality,
    "reflect": cmd_reflect,
    "witness": cmd_witness,
    "monotonicity": cmd_monotonicity,
    "smooth": cmd_smooth,
    "search": cmd_search,
    "identities": cmd_identities,
}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _flat_csv(result: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        else:
            writer.writerow([prefix, json.dumps(obj, default=_jsonable) if isinstance(obj, list) else obj])

    walk("", result)
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.command
    try:
        cfg = resolve_config(command, args)
        outcome = COMMANDS[command](cfg)
    except (ConfigError, KappaError, ValueError) as exc:
        code = 1 if isinstance(exc, HypothesisError) else 2
        print(f"hardykappa {command}: error: {exc}", file=sys.stderr)
        return code
    result, summary, table = outcome[:3]
    failure = outcome[3] if len(outcome) > 3 else None
    if args.format == "csv":
        text = table if table is not None else _flat_csv(result)
    else:
        doc = {
            "tool": {"name": "hardykappa", "version": __version__},
            "command": command,
            "config": cfg,
            "result": result,
        }
        text = json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"hardykappa {command}: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
        print(summary)
    else:
        sys.stdout.write(text)
    if failure is not None:
        print(f"hardykappa {command}: check failed: {failure}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
