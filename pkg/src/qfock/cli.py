"""Command-line entry point: ``qfock <command> --spec FILE``.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 domain or convergence error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import factorization, fock_core, gram, stepfn, suite
from .errors import (
    DomainViolation,
    InputError,
    NoConvergenceWithinBudget,
    OracleBudgetExceeded,
    ParseError,
    QFockError,
)
from .jobspec import COMMANDS, JobSpec, csv_text, dumps, load_spec, parse_spec
from .numbers import parse_real

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3


def _opt(args, spec: JobSpec, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return spec.options.get(name, default)


def _pair(spec: JobSpec):
    names = sorted(spec.functions)
    if not names:
        raise ParseError("spec defines no functions")
    f_name = spec.options.get("f", "f" if "f" in spec.functions else names[0])
    g_name = spec.options.get("g", "g" if "g" in spec.functions else f_name)
    return f_name, g_name, spec.function(f_name), spec.function(g_name)


def _targets(spec: JobSpec) -> list[str]:
    return list(spec.options.get("targets", sorted(spec.functions)))


def cmd_inner(args, spec: JobSpec):
    f_name, g_name, f, g = _pair(spec)
    n = int(_opt(args, spec, "n", 5))
    table = fock_core.inner_table(f, g, n, spec.c)
    if args.format == "csv":
        return csv_text(["n", "value"], [[k, v] for k, v in enumerate(table.values)]), EXIT_OK
    doc = {
        "command": "inner", "c": spec.c, "f": f_name, "g": g_name,
        "exact": table.exact, "values": list(table.values),
    }
    return dumps(doc), EXIT_OK


def cmd_exp_inner(args, spec: JobSpec):
    f_name, g_name, f, g = _pair(spec)
    tol = float(_opt(args, spec, "tol", fock_core.DEFAULT_TOL))
    n_max = int(_opt(args, spec, "n_max", fock_core.DEFAULT_N_MAX))
    series, diag = fock_core.exp_inner_series(f, g, spec.c, tol=tol, n_max=n_max)
    closed = fock_core.exp_inner_closed(f, g, spec.c)
    discrepancy = abs(series - closed) / abs(closed)
    if args.format == "csv":
        rows = [
            [n, s, t, b]
            for n, (s, t, b) in enumerate(zip(diag.partial_sums, diag.terms, diag.tail_bounds))
        ]
        return csv_text(["n", "partial_sum", "term", "tail_bound"], rows), EXIT_OK
    doc = {
        "command": "exp-inner", "c": spec.c, "f": f_name, "g": g_name,
        "series": series,
        "closed": closed,
        "discrepancy": discrepancy,
        "diagnostics": {
            "truncation_order": diag.truncation_order,
            "partial_sum": diag.partial_sum,
            "tail_bound": diag.tail_bound,
            "ratio_estimate": diag.ratio_estimate,
            "converged": diag.converged,
            "tol": tol,
        },
    }
    return dumps(doc), EXIT_OK


def cmd_exists(args, spec: JobSpec):
    results = {}
    for name in _targets(spec):
        v = fock_core.exists_exponential(spec.function(name))
        results[name] = {"exists": v.exists, "sup_norm": v.sup_norm, "margin": v.margin}
    if args.format == "csv":
        rows = [[n, r["exists"], r["sup_norm"], r["margin"]] for n, r in results.items()]
        return csv_text(["name", "exists", "sup_norm", "margin"], rows), EXIT_OK
    if len(results) == 1:
        (only,) = results.values()
        return dumps({"command": "exists", **only, "name": next(iter(results))}), EXIT_OK
    return dumps({"command": "exists", "results": results}), EXIT_OK


def _matrix_csv(names, matrix) -> str:
    return csv_text(["name", *names], [[n, *row] for n, row in zip(names, matrix)])


def cmd_gram(args, spec: JobSpec):
    names = _targets(spec)
    tol = float(_opt(args, spec, "tol", gram.DEFAULT_TOL))
    fs = [spec.function(n) for n in names]
    report = gram.gram_matrix(fs, spec.c, tol=tol, jobs=args.jobs)
    off = [report.pairwise_distinct[i, j] for i in range(len(fs)) for j in range(len(fs)) if i != j]
    matrix_csv = _matrix_csv(names, report.matrix)
    if args.format == "csv":
        return matrix_csv, EXIT_OK
    doc = {
        "command": "gram", "c": spec.c, "names": names,
        "matrix": report.matrix,
        "kernel_matrix": report.kernel_matrix,
        "min_eigenvalue": report.min_eigenvalue,
        "spectral_norm": report.spectral_norm,
        "relative_margin": report.margin,
        "psd": report.psd,
        "independent": report.independent,
        "pairwise_distinct": report.pairwise_distinct,
        "hypothesis_holds": all(off),
        "tol": tol,
    }
    if args.out:
        Path(args.out).with_suffix(".csv").write_text(matrix_csv)
    return dumps(doc), EXIT_OK


def _user_factorization(spec: JobSpec, tol: float) -> dict | None:
    if "split" not in spec.options:
        return None
    f_name, g_name, f, g = _pair(spec)
    split = factorization.RegionSplit(spec.options["split"])
    report = factorization.check_exponential_factorization(f, g, split, spec.c, tol=tol)
    out = {
        "f": f_name, "g": g_name,
        "closed_discrepancy": report.closed_discrepancy,
        "series_discrepancy": report.series_discrepancy,
        "log_additivity_exact": report.log_additivity_exact,
        "passed": report.passed,
    }
    if len(split.parts) == 2:
        n = int(spec.options.get("n", 6))
        gaps = [factorization.check_order_n_factorization(f, g, split, k, spec.c) for k in range(n + 1)]
        out["order_n_max_gap"] = max(abs(complex(gap)) for gap in gaps)
        if f.exact and g.exact and isinstance(spec.c, Fraction):
            out["order_n_exact"] = all(not gap for gap in gaps)
            out["passed"] = out["passed"] and out["order_n_exact"]
    return out


def _bundled_verify_spec() -> JobSpec:
    text = resources.files("qfock").joinpath("data/verify_default.json").read_text()
    return parse_spec(json.loads(text))


def cmd_verify(args, spec: JobSpec):
    seed = int(_opt(args, spec, "seed", 0))
    only = ["factorization"] if args.factorization else spec.options.get("properties")
    results = suite.run_suite(spec.options.get("suite", {}), seed=seed, jobs=args.jobs, only=only)
    props = {name: r.as_dict() for name, r in results.items()}
    user = _user_factorization(spec, float(_opt(args, spec, "tol", 1e-10)))
    passed = all(r.passed for r in results.values()) and (user is None or user["passed"])
    doc = {"command": "verify", "seed": seed, "passed": passed, "properties": props}
    if user is not None:
        doc["user_factorization"] = user
    if args.format == "csv":
        rows = [[name, r.passed, r.cases] for name, r in results.items()]
        if user is not None:
            rows.append(["user_factorization", user["passed"], 1])
        text = csv_text(["property", "passed", "cases"], rows)
    else:
        text = dumps(doc)
    return text, EXIT_OK if passed else EXIT_VERIFY


def _rho_grid(lo, hi, steps: int):
    if steps < 1:
        raise ParseError("scan steps must be positive")
    if steps == 1:
        return [lo]
    if isinstance(lo, Fraction) and isinstance(hi, Fraction):
        return [lo + (hi - lo) * Fraction(k, steps - 1) for k in range(steps)]
    lo, hi = float(lo), float(hi)
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def cmd_scan_boundary(args, spec: JobSpec):
    scan = spec.options.get("scan", {})
    if not isinstance(scan, dict):
        raise ParseError("'scan' must be an object")
    lo = parse_real(scan.get("rho_min", "2/5"))
    hi = parse_real(scan.get("rho_max", "1/2"))
    a, b = parse_real(scan.get("a", 0)), parse_real(scan.get("b", 1))
    steps = int(scan.get("steps", 11))
    n_max = int(args.n_max if args.n_max is not None else scan.get("n_max", 50))
    rows, traj = [], []
    for rho in _rho_grid(lo, hi, steps):
        f = stepfn.from_intervals([(a, b, rho)])
        terms, sums, bounds, _ = fock_core.series_trajectory(f, f, spec.c, n_max)
        for n in range(n_max + 1):
            rows.append([rho, n, sums[n].real, terms[n].real, bounds[n]])
        traj.append({
            "rho": rho,
            "exists": fock_core.exists_exponential(f).exists,
            "partial_sums": sums.real,
            "tail_bounds": bounds,
        })
    if args.format == "json":
        return dumps({"command": "scan-boundary", "c": spec.c, "n_max": n_max, "trajectories": traj}), EXIT_OK
    return csv_text(["rho", "n", "partial_sum", "term", "tail_bound"], rows), EXIT_OK


HANDLERS = {
    "inner": cmd_inner,
    "exp-inner": cmd_exp_inner,
    "exists": cmd_exists,
    "gram": cmd_gram,
    "verify": cmd_verify,
    "scan-boundary": cmd_scan_boundary,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfock", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", help="JSON job spec (verify falls back to the bundled suite)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--tol", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--factorization", action="store_true", help="verify: factorization checks only")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "scan-boundary" else "json"
    try:
        if args.spec is None:
            if args.command != "verify":
                raise ParseError(f"{args.command} needs --spec FILE")
            spec = _bundled_verify_spec()
        else:
            spec = load_spec(args.spec)
        if spec.command is not None and spec.command != args.command:
            raise ParseError(f"spec is for {spec.command!r}, not {args.command!r}")
        text, code = HANDLERS[args.command](args, spec)
    except InputError as exc:
        return _fail(exc, EXIT_INPUT, args.out)
    except (DomainViolation, NoConvergenceWithinBudget, OracleBudgetExceeded) as exc:
        return _fail(exc, EXIT_DOMAIN, args.out)
    except QFockError as exc:  # pragma: no cover - every subclass is handled above
        return _fail(exc, EXIT_DOMAIN, args.out)
    _emit(text, args.out)
    return code


def _fail(exc: Exception, code: int, out: str | None) -> int:
    _emit(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}, "exit_code": code}), out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
