"""Randomized property suite behind ``qfock verify``.

Each property takes a seeded ``random.Random`` and a config mapping and
returns a ``PropertyResult``.  Results only depend on the seed and config,
so reports are reproducible byte for byte.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import factorization, fock_core, gram, normal_order, stepfn
from .numbers import QQi
from .sampling import (
    random_c,
    random_exact_function,
    random_float_function,
    random_measures,
)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    cases: int
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "cases": self.cases, **self.detail}


def _rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def oracle_equivalence(rng, cfg) -> PropertyResult:
    pairs, n_top = cfg.get("pairs", 10), cfg.get("n_max", 4)
    cases = 0
    mismatches = []
    for i in range(pairs):
        measures = random_measures(rng, rng.randint(1, 3))
        f = random_exact_function(rng, measures)
        g = random_exact_function(rng, measures)
        c = random_c(rng)
        table = fock_core.inner_table(f, g, n_top, c)
        for n in range(n_top + 1):
            cases += 1
            if normal_order.oracle_nth_inner(f, g, n, c) != table[n]:
                mismatches.append([i, n])
    return PropertyResult("oracle_equivalence", not mismatches, cases, {"mismatches": mismatches})


def series_vs_closed(rng, cfg) -> PropertyResult:
    pairs, tol = cfg.get("pairs", 20), cfg.get("tol", 1e-10)
    worst = 0.0
    for _ in range(pairs):
        measures = [rng.uniform(0.1, 3.0) for _ in range(rng.randint(1, 4))]
        f = random_float_function(rng, measures, 0.4)
        g = random_float_function(rng, measures, 0.4)
        c = rng.uniform(0.2, 3.0)
        series, _ = fock_core.exp_inner_series(f, g, c, tol=tol)
        closed = fock_core.exp_inner_closed(f, g, c)
        worst = max(worst, abs(series - closed) / abs(closed))
    return PropertyResult("series_vs_closed", worst <= 1e-8, pairs, {"max_rel_error": worst})


def existence_boundary(rng, cfg) -> PropertyResult:
    n_top = cfg.get("witness_n", 50)
    checks = {}
    for rho in ("0.49", "0.499"):
        f = stepfn.from_intervals([(0, 1, float(rho))])
        value, diag = fock_core.exp_inner_series(f, f, 1, n_max=cfg.get("n_max", 20000))
        closed = fock_core.exp_inner_closed(f, f, 1)
        checks[rho] = bool(
            fock_core.exists_exponential(f).exists
            and diag.converged
            and abs(value - closed) <= 1e-8 * abs(closed)
        )
    half = stepfn.from_intervals([(0, 1, Fraction(1, 2))])
    _, sums = fock_core.partial_sums(half, half, 1, n_top)
    harmonic = np.cumsum([0.0] + [1.0 / n for n in range(1, n_top + 1)])
    checks["0.5_diverges"] = bool(
        not fock_core.exists_exponential(half).exists
        and np.all(sums.real[1:] > 0.25 * harmonic[1:])
    )
    return PropertyResult("existence_boundary", all(checks.values()), len(checks), {"checks": checks})


def ratio_law(rng, cfg) -> PropertyResult:
    cases, n_top = cfg.get("cases", 5), cfg.get("n_max", 20)
    bad = 0
    for _ in range(cases):
        rho = QQi(Fraction(rng.randint(-5, 5), 11), Fraction(rng.randint(-5, 5), 11))
        sigma = QQi(Fraction(rng.randint(-5, 5), 11), Fraction(rng.randint(-5, 5), 11))
        length, c = Fraction(rng.randint(1, 9), rng.randint(1, 4)), random_c(rng)
        f = stepfn.from_cells([("I", length, rho)])
        g = stepfn.from_cells([("I", length, sigma)])
        table = fock_core.inner_table(f, g, n_top, c)
        z = 4 * rho.conjugate() * sigma
        for n in range(1, n_top + 1):
            lhs = table[n] * (math.factorial(n - 1) ** 2)
            rhs = table[n - 1] * math.factorial(n) ** 2 * z * (c * length / (2 * n) + Fraction(n - 1, n))
            bad += lhs != rhs
    return PropertyResult("ratio_law", bad == 0, cases * n_top, {"failures": bad})


def operator_identities(rng, cfg) -> PropertyResult:
    cases, n_top = cfg.get("cases", 3), cfg.get("n_max", 4)
    failures = []
    total = 0
    for i in range(cases):
        measures = random_measures(rng, rng.randint(1, 2))
        f = random_exact_function(rng, measures)
        g = random_exact_function(rng, measures)
        c = random_c(rng)
        for n in range(1, n_top + 1):
            for label, sides in (
                ("number", normal_order.number_commutator_identity(f, g, n, c)),
                ("annihilator", normal_order.annihilator_commutator_identity(f, g, n, c)),
            ):
                total += 1
                if not normal_order.verify_operator_identity(*sides):
                    failures.append([i, n, label])
        for k in range(1, 4):
            for h in range(k):
                fs = [random_exact_function(rng, measures) for _ in range(k)]
                gs = [random_exact_function(rng, measures) for _ in range(h)]
                word = tuple(map(normal_order.annihilator, fs)) + tuple(map(normal_order.creator, gs))
                total += 1
                if len(normal_order.apply_to_vacuum(word, c)):
                    failures.append([i, k, h, "vanishing"])
        for m in range(5):
            for n in range(5):
                if m != n:
                    total += 1
                    if normal_order.oracle_inner(f, g, m, n, c):
                        failures.append([i, m, n, "mixed_order"])
    return PropertyResult("operator_identities", not failures, total, {"failures": failures})


def factorization_checks(rng, cfg) -> PropertyResult:
    cases, n_top = cfg.get("cases", 3), cfg.get("n_max", 6)
    failures, worst = [], 0.0
    for i in range(cases):
        measures = random_measures(rng, 4)
        f = random_exact_function(rng, measures)
        g = random_exact_function(rng, measures)
        c = random_c(rng)
        ids = [f"c{j}" for j in range(4)]
        rng.shuffle(ids)
        cut = rng.randint(1, 3)
        split = factorization.RegionSplit([ids[:cut], ids[cut:]])
        for n in range(n_top + 1):
            if factorization.check_order_n_factorization(f, g, split, n, c) != 0:
                failures.append([i, n])
        report = factorization.check_exponential_factorization(f, g, split, c, tol=1e-10)
        worst = max(worst, report.closed_discrepancy, report.series_discrepancy)
        if not report.passed:
            failures.append([i, "exponential"])
    return PropertyResult(
        "factorization", not failures, cases * (n_top + 2),
        {"failures": failures, "max_rel_error": worst},
    )


def schur_and_gram(rng, cfg) -> PropertyResult:
    cases = cfg.get("cases", 5)
    nprng = np.random.default_rng(rng.randrange(2**32))
    schur_ok = True
    for _ in range(cases):
        x = nprng.standard_normal((5, 5)) + 1j * nprng.standard_normal((5, 5))
        m = x @ x.conj().T / 5
        schur_ok &= all(gram.verify_schur_powers(m, 6, tol=1e-12).values())
    fs = [stepfn.from_intervals([(0, 1, v)]) for v in (0.1, 0.2, 0.3)]
    three = gram.linear_independence(fs, 1)
    dup = gram.gram_matrix(fs + [fs[0]], 1)
    checks = {
        "schur_powers": bool(schur_ok),
        "three_independent": bool(three.independent and three.min_eigenvalue > 0),
        "duplicate_dependent": bool(dup.min_eigenvalue < 1e-10 * dup.spectral_norm),
    }
    return PropertyResult(
        "gram", all(checks.values()), cases + 2,
        {"checks": checks, "three_min_eigenvalue": three.min_eigenvalue},
    )


_UNIT_PHASES = (QQi(1), QQi(0, 1), QQi(Fraction(3, 5), Fraction(4, 5)), QQi(Fraction(-5, 13), Fraction(12, 13)))


def monotonicity(rng, cfg) -> PropertyResult:
    pairs, n_top = cfg.get("pairs", 10), cfg.get("n_max", 10)
    bad = 0
    for _ in range(pairs):
        measures = random_measures(rng, rng.randint(1, 3))
        g = random_exact_function(rng, measures)
        h = stepfn.MeasuredCellFunction(
            (cell, v * Fraction(rng.randint(10, 14), 10) * rng.choice(_UNIT_PHASES))
            for cell, v in g.items
        )
        c = random_c(rng)
        th = fock_core.inner_table(h, h, n_top, c)
        tg = fock_core.inner_table(g, g, n_top, c)
        bad += sum(not th[n].re >= tg[n].re for n in range(n_top + 1))
    return PropertyResult("monotonicity", bad == 0, pairs * (n_top + 1), {"failures": bad})


def derivative_check(rng, cfg) -> PropertyResult:
    cases, n_top = cfg.get("cases", 5), cfg.get("n_max", 6)
    worst = 0.0
    for _ in range(cases):
        measures = random_measures(rng, 1)
        f = random_exact_function(rng, measures)
        g = random_exact_function(rng, measures)
        c = random_c(rng)
        for n in range(n_top + 1):
            worst = max(worst, fock_core.derivative_coefficient_check(f, g, n, c))
    return PropertyResult("derivative", worst <= 1e-10, cases * (n_top + 1), {"max_rel_error": worst})


def confluence(rng, cfg) -> PropertyResult:
    cases = cfg.get("cases", 5)
    failures = 0
    kinds = (normal_order.creator, normal_order.number, normal_order.annihilator)
    for _ in range(cases):
        measures = random_measures(rng, 2)
        word = tuple(
            rng.choice(kinds)(random_exact_function(rng, measures))
            for _ in range(rng.randint(2, 6))
        )
        c = random_c(rng)
        ref = normal_order.normal_order(word, c)
        for s in range(3):
            if normal_order.normal_order(word, c, rng=random.Random(s)) != ref:
                failures += 1
    return PropertyResult("confluence", failures == 0, cases * 3, {"failures": failures})


PROPERTIES: dict[str, Callable] = {
    "oracle_equivalence": oracle_equivalence,
    "series_vs_closed": series_vs_closed,
    "existence_boundary": existence_boundary,
    "ratio_law": ratio_law,
    "operator_identities": operator_identities,
    "factorization": factorization_checks,
    "gram": schur_and_gram,
    "monotonicity": monotonicity,
    "derivative": derivative_check,
    "confluence": confluence,
}


def run_suite(config: dict, seed: int = 0, jobs: int = 1, only: list[str] | None = None) -> dict:
    """Run the selected properties; returns ``{name: PropertyResult}`` in order."""
    names = [n for n in PROPERTIES if only is None or n in only]
    unknown = set(only or ()) - set(PROPERTIES)
    if unknown:
        raise KeyError(f"unknown properties: {sorted(unknown)}")

    def run(name):
        return PROPERTIES[name](_rng(seed, name), config.get(name, {}))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(n) for n in names]
    return dict(zip(names, results))
