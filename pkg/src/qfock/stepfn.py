"""Complex step functions on finitely many disjoint measured cells.

A function is stored as the cells where it is nonzero together with its
value on each of them.  Cells are either abstract (an id and a measure) or
half-open real intervals ``[a, b)`` whose id is derived from the span.
Two functions can be combined cell-by-cell only when their cells are
*compatible*: a shared id always means the same region, and interval cells
with distinct ids never overlap.  ``common_refinement`` produces compatible
copies of interval-based functions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    DomainViolation,
    EmptyInterval,
    IncompatiblePartitions,
    NonpositivePower,
    OverlappingIntervals,
    UnknownCellId,
)
from .numbers import QQi, format_exact, is_exact

__all__ = [
    "Cell",
    "IntervalSpec",
    "MeasuredCellFunction",
    "common_refinement",
    "conj",
    "from_cells",
    "from_intervals",
    "integrate",
    "l2_norm",
    "l2_norm_sq",
    "log_integral",
    "moment",
    "pointwise_add",
    "pointwise_mul",
    "power",
    "refine_at",
    "scale",
    "shared_cells",
    "sup_norm",
    "sup_norm_sq",
    "zero",
]


def _fmt_point(x) -> str:
    return format_exact(x) if isinstance(x, (int, Fraction)) else repr(float(x))


@dataclass(frozen=True)
class Cell:
    """A region of positive finite measure.  ``span`` is set for intervals."""

    id: str
    measure: Fraction | float
    span: tuple | None = None

    def __post_init__(self):
        if not self.measure > 0:
            raise EmptyInterval(f"cell {self.id!r} has nonpositive measure {self.measure}")

    @classmethod
    def interval(cls, a, b) -> "Cell":
        if not a < b:
            raise EmptyInterval(f"empty interval [{a}, {b})")
        return cls(f"[{_fmt_point(a)},{_fmt_point(b)})", b - a, (a, b))

    @property
    def sort_key(self):
        if self.span is not None:
            return (0, self.span[0], self.span[1], "")
        return (1, 0, 0, self.id)


@dataclass(frozen=True)
class IntervalSpec:
    """Values on half-open intervals: a sequence of ``(a, b, value)``."""

    intervals: tuple


def _normalize_value(v, exact: bool):
    if exact:
        return v if isinstance(v, QQi) else QQi(v)
    return complex(v)


def _is_zero(v) -> bool:
    return not v


class MeasuredCellFunction:
    """Immutable step function; zero-valued cells are never stored."""

    __slots__ = ("_items", "_exact", "_by_id", "_key", "_hash")

    def __init__(self, items: Iterable[tuple[Cell, object]]):
        items = list(items)
        exact = all(is_exact(v) or isinstance(v, QQi) for _, v in items) and all(
            isinstance(c.measure, (int, Fraction)) for c, _ in items
        )
        by_id: dict[str, tuple[Cell, object]] = {}
        for cell, v in items:
            if not exact and isinstance(cell.measure, (int, Fraction)):
                cell = Cell(cell.id, float(cell.measure), cell.span)
            v = _normalize_value(v, exact)
            if _is_zero(v):
                continue
            if cell.id in by_id:
                raise IncompatiblePartitions(f"duplicate cell id {cell.id!r}")
            by_id[cell.id] = (cell, v)
        ordered = tuple(sorted(by_id.values(), key=lambda cv: cv[0].sort_key))
        self._items = ordered
        self._exact = exact or not ordered
        self._by_id = by_id
        self._key = None
        self._hash = None
        _check_compatible([c for c, _ in ordered])

    # -- accessors ----------------------------------------------------------
    @property
    def items(self) -> tuple[tuple[Cell, object], ...]:
        return self._items

    @property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(c for c, _ in self._items)

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def is_zero(self) -> bool:
        return not self._items

    def value(self, cell_id: str):
        cv = self._by_id.get(cell_id)
        if cv is None:
            return QQi(0) if self._exact else 0j
        return cv[1]

    def __len__(self):
        return len(self._items)

    def to_float(self) -> "MeasuredCellFunction":
        if not self._exact or not self._items:
            return self
        return MeasuredCellFunction(
            (Cell(c.id, float(c.measure), c.span), complex(v)) for c, v in self._items
        )

    # -- canonical order, equality -------------------------------------------
    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(
                (c.sort_key, c.measure, _value_key(v)) for c, v in self._items
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, MeasuredCellFunction):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __lt__(self, other: "MeasuredCellFunction") -> bool:
        return self.key < other.key

    def __repr__(self):
        body = ", ".join(f"{c.id}:{v}" for c, v in self._items)
        return f"MeasuredCellFunction({body})"


def _value_key(v):
    if isinstance(v, QQi):
        return (v.re, v.im)
    return (v.real, v.imag)


def _check_compatible(cells: Sequence[Cell]) -> None:
    spans = [c for c in cells if c.span is not None]
    if spans and len(spans) != len(cells):
        raise IncompatiblePartitions("cannot mix interval cells with abstract cells")
    spans.sort(key=lambda c: c.span)
    for left, right in zip(spans, spans[1:]):
        if right.span[0] < left.span[1]:
            raise IncompatiblePartitions(
                f"cells {left.id} and {right.id} overlap; call common_refinement first"
            )


def shared_cells(*fs: MeasuredCellFunction) -> list[Cell]:
    """Union of the cells of ``fs``; raises unless they are compatible."""
    seen: dict[str, Cell] = {}
    for f in fs:
        for cell, _ in f.items:
            prev = seen.get(cell.id)
            if prev is None:
                seen[cell.id] = cell
            elif prev.measure != cell.measure or prev.span != cell.span:
                raise IncompatiblePartitions(
                    f"cell {cell.id!r} carries different measures: {prev.measure} vs {cell.measure}"
                )
    cells = sorted(seen.values(), key=lambda c: c.sort_key)
    _check_compatible(cells)
    return cells


def zero() -> MeasuredCellFunction:
    return MeasuredCellFunction(())


def from_cells(cells: Iterable[tuple[str, object, object]]) -> MeasuredCellFunction:
    """Build from ``(id, measure, value)`` triples on abstract cells."""
    return MeasuredCellFunction((Cell(cid, m), v) for cid, m, v in cells)


def from_intervals(spec: IntervalSpec | Sequence) -> MeasuredCellFunction:
    intervals = spec.intervals if isinstance(spec, IntervalSpec) else spec
    cells = []
    for a, b, v in intervals:
        if not a < b:
            raise EmptyInterval(f"empty interval [{a}, {b})")
        cells.append((a, b, v))
    cells.sort(key=lambda t: (t[0], t[1]))
    for (a0, b0, _), (a1, b1, _) in zip(cells, cells[1:]):
        if a1 < b0:
            raise OverlappingIntervals(f"[{a0},{b0}) overlaps [{a1},{b1})")
    return MeasuredCellFunction((Cell.interval(a, b), v) for a, b, v in cells)


def _split_cell(cell: Cell, points: Sequence) -> list[Cell]:
    a, b = cell.span
    cuts = [p for p in points if a < p < b]
    edges = [a, *cuts, b]
    return [Cell.interval(lo, hi) for lo, hi in zip(edges, edges[1:])]


def refine_at(f: MeasuredCellFunction, points: Iterable) -> MeasuredCellFunction:
    """Split the interval cells of ``f`` at the given points."""
    points = sorted(set(points))
    out = []
    for cell, v in f.items:
        if cell.span is None:
            raise IncompatiblePartitions("refine_at needs interval cells")
        out.extend((piece, v) for piece in _split_cell(cell, points))
    return MeasuredCellFunction(out)


def common_refinement(*fs: MeasuredCellFunction) -> tuple[MeasuredCellFunction, ...]:
    """Copies of ``fs`` on one shared set of cells.

    Interval cells are cut at every endpoint of every function.  Abstract
    cells are left alone and only checked for consistency.
    """
    all_cells = [c for f in fs for c, _ in f.items]
    if not all_cells:
        return tuple(fs)
    if any(c.span is None for c in all_cells):
        shared_cells(*fs)
        return tuple(fs)
    points = sorted({p for c in all_cells for p in c.span})
    refined = tuple(refine_at(f, points) for f in fs)
    shared_cells(*refined)
    return refined


def _unify(*fs: MeasuredCellFunction):
    """Exactness of the combination and a float fallback when mixed."""
    if all(f.exact for f in fs):
        return True, fs
    return False, tuple(f.to_float() for f in fs)


def conj(f: MeasuredCellFunction) -> MeasuredCellFunction:
    return MeasuredCellFunction((c, v.conjugate()) for c, v in f.items)


def scale(lam, f: MeasuredCellFunction) -> MeasuredCellFunction:
    if not (is_exact(lam) and f.exact):
        lam = complex(lam)
        f = f.to_float()
    return MeasuredCellFunction((c, lam * v) for c, v in f.items)


def pointwise_mul(f: MeasuredCellFunction, g: MeasuredCellFunction) -> MeasuredCellFunction:
    shared_cells(f, g)
    _, (f, g) = _unify(f, g)
    out = []
    for cell, v in f.items:
        w = g._by_id.get(cell.id)
        if w is not None:
            out.append((cell, v * w[1]))
    return MeasuredCellFunction(out)


def pointwise_add(f: MeasuredCellFunction, g: MeasuredCellFunction) -> MeasuredCellFunction:
    cells = shared_cells(f, g)
    _, (f, g) = _unify(f, g)
    return MeasuredCellFunction((c, f.value(c.id) + g.value(c.id)) for c in cells)


def power(f: MeasuredCellFunction, k: int) -> MeasuredCellFunction:
    if k <= 0:
        raise NonpositivePower(f"power must be positive, got {k}")
    return MeasuredCellFunction((c, v**k) for c, v in f.items)


def integrate(f: MeasuredCellFunction):
    """Sum of measure times value over the cells."""
    total = QQi(0) if f.exact else 0j
    for cell, v in f.items:
        total = total + cell.measure * v
    return total


def sup_norm_sq(f: MeasuredCellFunction):
    """Square of the sup norm; exact ``Fraction`` for rational values."""
    if f.exact:
        return max((v.abs2() for _, v in f.items), default=Fraction(0))
    return max((abs(v) ** 2 for _, v in f.items), default=0.0)


def sup_norm(f: MeasuredCellFunction):
    """Sup norm; a ``Fraction`` whenever the exact square root is rational."""
    s2 = sup_norm_sq(f)
    if isinstance(s2, Fraction):
        return _exact_sqrt(s2)
    return max((abs(v) for _, v in f.items), default=0.0)


def _exact_sqrt(q: Fraction):
    p, r = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if p * p == q.numerator and r * r == q.denominator:
        return Fraction(p, r)
    return math.sqrt(q)


def l2_norm_sq(f: MeasuredCellFunction):
    if f.exact:
        return sum((c.measure * v.abs2() for c, v in f.items), Fraction(0))
    return math.fsum(c.measure * abs(v) ** 2 for c, v in f.items)


def l2_norm(f: MeasuredCellFunction) -> float:
    return math.sqrt(l2_norm_sq(f))


def moment(f: MeasuredCellFunction, g: MeasuredCellFunction, k: int):
    """Integral of ``conj(f)**k * g**k`` over the shared cells."""
    if k <= 0:
        raise NonpositivePower(f"moment order must be positive, got {k}")
    shared_cells(f, g)
    exact, (f, g) = _unify(f, g)
    total = QQi(0) if exact else 0j
    for cell, v in f.items:
        w = g._by_id.get(cell.id)
        if w is not None:
            total = total + cell.measure * (v.conjugate() * w[1]) ** k
    return total


def log_integral(f: MeasuredCellFunction, g: MeasuredCellFunction) -> complex:
    """Principal-branch integral of ``ln(1 - 4 conj(f) g)``.

    Requires ``4 * sup|f| * sup|g| < 1`` so that the argument stays in the
    open disc of radius 1 around 1.
    """
    bound = 16 * sup_norm_sq(f) * sup_norm_sq(g)
    if not bound < 1:
        raise DomainViolation(
            f"4*|f|_inf*|g|_inf = {math.sqrt(bound):.6g} is not below 1"
        )
    shared_cells(f, g)
    f, g = f.to_float(), g.to_float()
    total = 0j
    for cell, v in f.items:
        w = g._by_id.get(cell.id)
        if w is not None:
            total += cell.measure * cmath.log(1 - 4 * v.conjugate() * w[1])
    return total


def restrict_ids(f: MeasuredCellFunction, ids: Iterable[str]) -> MeasuredCellFunction:
    ids = set(ids)
    return MeasuredCellFunction((c, v) for c, v in f.items if c.id in ids)


def measure_where_different(f: MeasuredCellFunction, g: MeasuredCellFunction):
    """Total measure of the cells on which ``f`` and ``g`` take different values."""
    cells = shared_cells(f, g)
    total = 0
    for c in cells:
        if f.value(c.id) != g.value(c.id):
            total += c.measure
    return total


def values_by_id(f: MeasuredCellFunction) -> Mapping[str, object]:
    return {c.id: v for c, v in f.items}


def check_ids(ids: Iterable[str], known: Iterable[str]) -> None:
    unknown = set(ids) - set(known)
    if unknown:
        raise UnknownCellId(f"unknown cell ids: {sorted(unknown)}")
