"""Scalar-product checks of the tensor factorization over disjoint regions."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from . import fock_core, stepfn
from .errors import InputError
from .numbers import QQi
from .stepfn import MeasuredCellFunction

__all__ = [
    "ExponentialFactorizationReport",
    "RegionSplit",
    "check_exponential_factorization",
    "check_order_n_factorization",
    "restrict",
]


@dataclass(frozen=True)
class RegionSplit:
    """Pairwise-disjoint sets of cell ids."""

    parts: tuple[frozenset, ...]

    def __init__(self, parts: Iterable[Iterable[str]]):
        parts = tuple(frozenset(p) for p in parts)
        seen: set = set()
        for p in parts:
            if seen & p:
                raise InputError(f"split parts overlap on {sorted(seen & p)}")
            seen |= p
        object.__setattr__(self, "parts", parts)

    @property
    def ids(self) -> frozenset:
        return frozenset().union(*self.parts)

    def check_covers(self, cells: Sequence[stepfn.Cell]) -> None:
        missing = {c.id for c in cells} - self.ids
        if missing:
            raise InputError(f"split does not cover cells {sorted(missing)}")


def restrict(f: MeasuredCellFunction, part: Iterable[str], known: Iterable[str] | None = None):
    """``f`` on the cells in ``part``, zero elsewhere."""
    part = set(part)
    stepfn.check_ids(part, {c.id for c in f.cells} if known is None else known)
    return stepfn.restrict_ids(f, part)


def _split_functions(f, g, split: RegionSplit):
    f, g = stepfn.common_refinement(f, g)
    cells = stepfn.shared_cells(f, g)
    known = {c.id for c in cells}
    split.check_covers(cells)
    pieces = [
        (restrict(f, p & known, known), restrict(g, p & known, known)) for p in split.parts
    ]
    unknown = split.ids - known
    if unknown:
        stepfn.check_ids(unknown, known)
    return f, g, pieces


@dataclass(frozen=True)
class ExponentialFactorizationReport:
    closed_whole: complex
    closed_product: complex
    series_whole: complex
    series_product: complex
    closed_discrepancy: float
    series_discrepancy: float
    log_additivity_exact: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.log_additivity_exact
            and self.closed_discrepancy <= self.tol
            and self.series_discrepancy <= self.tol
        )


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def check_exponential_factorization(
    f, g, split: RegionSplit, c, tol: float = fock_core.DEFAULT_TOL
) -> ExponentialFactorizationReport:
    """Compare ``<Psi(f), Psi(g)>`` with the product over the split parts.

    Both the closed form and the truncated series are tested.  The closed
    form additionally checks that the log-integral is additive over parts.
    """
    f, g, pieces = _split_functions(f, g, split)
    closed_whole = fock_core.exp_inner_closed(f, g, c)
    series_whole, _ = fock_core.exp_inner_series(f, g, c, tol=tol * 1e-2)
    closed_prod, series_prod = 1 + 0j, 1 + 0j
    log_parts = 0j
    for fp, gp in pieces:
        closed_prod *= fock_core.exp_inner_closed(fp, gp, c)
        series_prod *= fock_core.exp_inner_series(fp, gp, c, tol=tol * 1e-2)[0]
        log_parts += stepfn.log_integral(fp, gp)
    log_whole = stepfn.log_integral(f, g)
    additive = abs(log_whole - log_parts) <= 1e-12 * max(1.0, abs(log_whole))
    return ExponentialFactorizationReport(
        closed_whole,
        closed_prod,
        complex(series_whole),
        complex(series_prod),
        _rel(closed_whole, closed_prod),
        _rel(series_whole, series_prod),
        bool(additive),
        tol,
    )


def check_order_n_factorization(f, g, split: RegionSplit, n: int, c):
    """``I_n(f,g) - sum_k C(n,k)^2 I_k(f1,g1) I_(n-k)(f2,g2)`` for a two-part split.

    Exactly zero for rational inputs; a float discrepancy otherwise.
    """
    if len(split.parts) != 2:
        raise InputError("order-n factorization needs exactly two parts")
    f, g, ((f1, g1), (f2, g2)) = _split_functions(f, g, split)
    whole = fock_core.nth_inner(f, g, n, c)
    t1 = fock_core.inner_table(f1, g1, n, c)
    t2 = fock_core.inner_table(f2, g2, n, c)
    total = QQi(0) if t1.exact and t2.exact else 0j
    for k in range(n + 1):
        total = total + comb(n, k) ** 2 * t1[k] * t2[n - k]
    return whole - total
