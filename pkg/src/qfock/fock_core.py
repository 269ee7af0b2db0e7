"""n-particle inner products and quadratic exponential vectors.

``I_n(f, g) = <B+^n_f Phi, B+^n_g Phi>`` obeys

    I_n = c * sum_{k=0}^{n-1} 2^(2k+1) n!(n-1)!/((n-k-1)!)^2 <f^(k+1), g^(k+1)> I_(n-k-1)

with ``I_0 = 1``.  Exact inputs are evaluated in exact rational arithmetic with
big-integer weights.  The exponential vector ``Psi(f) = sum_n B+^n_f Phi / n!``
has ``<Psi(f), Psi(g)> = sum_n I_n / (n!)^2``, which is summed here with a
rigorous tail bound, and compared against the closed form
``exp(-(c/2) * int ln(1 - 4 conj(f) g))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from . import stepfn
from .errors import DomainViolation, NoConvergenceWithinBudget
from .numbers import QQi, is_exact
from .stepfn import MeasuredCellFunction

__all__ = [
    "ExistenceVerdict",
    "InnerProductTable",
    "SeriesDiagnostics",
    "annihilator_matrix_element",
    "derivative_coefficient_check",
    "exists_exponential",
    "exp_inner_closed",
    "exp_inner_series",
    "inner_table",
    "norm_growth_bound",
    "nth_inner",
    "partial_sums",
    "recursion_weight",
    "series_trajectory",
]

DEFAULT_TOL = 1e-10
DEFAULT_N_MAX = 400


def recursion_weight(n: int, k: int) -> int:
    """``2^(2k+1) n!(n-1)! / ((n-k-1)!)^2`` as an exact integer."""
    m = n - k - 1
    return (1 << (2 * k + 1)) * (factorial(n) // factorial(m)) * (factorial(n - 1) // factorial(m))


def _prepare(f, g, c):
    f, g = stepfn.common_refinement(f, g)
    exact = f.exact and g.exact and is_exact(c)
    if not exact:
        f, g, c = f.to_float(), g.to_float(), float(c)
    elif not isinstance(c, Fraction):
        c = Fraction(c)
    if not c > 0:
        raise DomainViolation(f"the constant c must be positive, got {c}")
    return f, g, c, exact


@dataclass(frozen=True)
class InnerProductTable:
    f: MeasuredCellFunction
    g: MeasuredCellFunction
    c: Fraction | float
    values: tuple

    def __getitem__(self, n: int):
        return self.values[n]

    def __len__(self):
        return len(self.values)

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], QQi)


def inner_table(f, g, n_max: int, c) -> InnerProductTable:
    """``I_0 .. I_{n_max}`` by dynamic programming over the recursion."""
    f, g, c, exact = _prepare(f, g, c)
    one = QQi(1) if exact else 1 + 0j
    moments = [stepfn.moment(f, g, j) for j in range(1, n_max + 1)]
    values = [one]
    for n in range(1, n_max + 1):
        acc = QQi(0) if exact else 0j
        for k in range(n):
            acc = acc + recursion_weight(n, k) * moments[k] * values[n - k - 1]
        values.append(c * acc)
    return InnerProductTable(f, g, c, tuple(values))


def nth_inner(f, g, n: int, c):
    """``<B+^n_f Phi, B+^n_g Phi>``; exact when f, g and c are exact."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return inner_table(f, g, n, c)[n]


def annihilator_matrix_element(f, h, g, n: int, c):
    """``<B+^(n-1)_f Phi, B_h B+^n_g Phi>`` for n >= 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    f, h, g = stepfn.common_refinement(f, h, g)
    table = inner_table(f, g, n - 1, c)
    c = table.c
    exact = table.exact and h.exact
    if not exact:
        f, h, g = f.to_float(), h.to_float(), g.to_float()
        table = inner_table(f, g, n - 1, float(c))
        c = table.c
    acc = QQi(0) if exact else 0j
    for k in range(n):
        hfk = h if k == 0 else stepfn.pointwise_mul(h, stepfn.power(f, k))
        integral = stepfn.integrate(
            stepfn.pointwise_mul(stepfn.conj(hfk), stepfn.power(g, k + 1))
        )
        acc = acc + recursion_weight(n, k) * integral * table[n - k - 1]
    return c * acc


@dataclass(frozen=True)
class ExistenceVerdict:
    exists: bool
    sup_norm: Fraction | float
    margin: Fraction | float


def exists_exponential(f: MeasuredCellFunction) -> ExistenceVerdict:
    """Psi(f) exists exactly when the sup norm of f is below 1/2."""
    s2 = stepfn.sup_norm_sq(f)
    s = stepfn.sup_norm(f)
    exists = s2 < Fraction(1, 4) if isinstance(s2, Fraction) else s2 < 0.25
    if isinstance(s, Fraction):
        margin = Fraction(1, 2) - s
    else:
        margin = 0.5 - float(s)
    return ExistenceVerdict(bool(exists), s, margin)


def norm_growth_bound(f: MeasuredCellFunction, n: int, c):
    """Upper bound on ``I_n(f,f) / I_(n-1)(f,f)``.

    Equal to ``4n(n-1)|f|_inf^2 + 2nc|f|_2^2``.  The ``c`` on the second
    term comes from the k=0 summand ``2nc<f,f> I_(n-1)`` of the recursion.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return 4 * n * (n - 1) * stepfn.sup_norm_sq(f) + 2 * n * c * stepfn.l2_norm_sq(f)


@dataclass(frozen=True)
class SeriesDiagnostics:
    truncation_order: int
    partial_sum: complex
    tail_bound: float
    ratio_estimate: float
    converged: bool
    partial_sums: tuple = field(default=(), repr=False)
    terms: tuple = field(default=(), repr=False)
    tail_bounds: tuple = field(default=(), repr=False)


def _scaled_kernel(f: MeasuredCellFunction, g: MeasuredCellFunction, n_max: int) -> np.ndarray:
    """``w_k = 4^k <f^(k+1), g^(k+1)>`` for k < n_max, without overflow."""
    f, g = f.to_float(), g.to_float()
    meas, z = [], []
    for cell, v in f.items:
        w = g.value(cell.id)
        if w:
            meas.append(cell.measure)
            z.append(v.conjugate() * w)
    if not z:
        return np.zeros(n_max, dtype=complex)
    meas = np.asarray(meas, dtype=float)
    z = np.asarray(z, dtype=complex)
    powers = np.power.outer(4 * z, np.arange(n_max))  # (cells, n_max)
    return (meas * z) @ powers


def _scaled_terms(f, g, c: float, n_max: int) -> np.ndarray:
    """``T_n = I_n / (n!)^2`` for n <= n_max.

    Dividing the recursion by ``(n!)^2`` leaves
    ``T_n = (2c/n) * sum_k 4^k <f^(k+1), g^(k+1)> T_(n-1-k)``.
    """
    w = _scaled_kernel(f, g, n_max)
    t = np.zeros(n_max + 1, dtype=complex)
    t[0] = 1.0
    for n in range(1, n_max + 1):
        t[n] = (2.0 * c / n) * np.dot(w[:n], t[n - 1 :: -1][:n])
    return t


def partial_sums(f, g, c, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Terms ``I_n/(n!)^2`` and their running sums for n = 0..n_max.

    No existence check, so this also traces divergent series.
    """
    f, g = stepfn.common_refinement(f, g)
    terms = _scaled_terms(f, g, float(c), n_max)
    return terms, np.cumsum(terms)


def _ratio_sup(s2: float, l2: float, c: float, n: int) -> float:
    """sup over m > n of ``norm_growth_bound(m) / m^2``."""
    m = n + 1
    return max(4.0 * s2 * (m - 1) / m + 2.0 * c * l2 / m, 4.0 * s2)


def series_trajectory(f, g, c, n_max: int):
    """Terms, partial sums and tail bounds of ``sum_n I_n/(n!)^2`` for n <= n_max.

    With ``a_n = I_n(f,f)/(n!)^2`` (same for g) the remainder after order n
    is at most ``sqrt(a_n b_n) * q/(1-q)``, where ``q`` bounds the growth
    ratio of all later terms via ``norm_growth_bound``.  The bound is
    ``inf`` where ``q >= 1``.  Returns ``(terms, sums, bounds, ratios)``.
    """
    c = float(c)
    f, g = stepfn.common_refinement(f, g)
    t_fg = _scaled_terms(f, g, c, n_max)
    t_ff = t_fg.real if f == g else _scaled_terms(f, f, c, n_max).real
    t_gg = t_fg.real if f == g else _scaled_terms(g, g, c, n_max).real
    sf2, sg2 = float(stepfn.sup_norm_sq(f)), float(stepfn.sup_norm_sq(g))
    lf2, lg2 = float(stepfn.l2_norm_sq(f)), float(stepfn.l2_norm_sq(g))
    bounds = np.empty(n_max + 1)
    ratios = np.empty(n_max + 1)
    for n in range(n_max + 1):
        q = math.sqrt(_ratio_sup(sf2, lf2, c, n) * _ratio_sup(sg2, lg2, c, n))
        head = math.sqrt(max(t_ff[n], 0.0) * max(t_gg[n], 0.0))
        if head == 0.0:
            bound = 0.0
        elif q < 1.0:
            bound = head * q / (1.0 - q)
        else:
            bound = math.inf
        bounds[n], ratios[n] = bound, q
    return t_fg, np.cumsum(t_fg), bounds, ratios


def exp_inner_series(
    f, g, c, tol: float = DEFAULT_TOL, n_max: int = DEFAULT_N_MAX
) -> tuple[complex, SeriesDiagnostics]:
    """Sum ``<Psi(f), Psi(g)>`` until the rigorous tail bound drops below ``tol``."""
    for h in (f, g):
        if not exists_exponential(h).exists:
            raise DomainViolation("exponential vector does not exist (sup norm >= 1/2)")
    terms, sums, bounds, ratios = series_trajectory(f, g, c, n_max)
    hits = np.nonzero((ratios < 1.0) & (bounds < tol))[0]
    if not len(hits):
        raise NoConvergenceWithinBudget(
            f"tail bound {bounds[-1]:.3g} above tol {tol:g} after {n_max} orders"
        )
    n = int(hits[0])
    value = complex(sums[n])
    diag = SeriesDiagnostics(
        n, value, float(bounds[n]), float(ratios[n]), True,
        tuple(complex(x) for x in sums[: n + 1]),
        tuple(complex(x) for x in terms[: n + 1]),
        tuple(float(x) for x in bounds[: n + 1]),
    )
    return value, diag


def exp_inner_closed(f, g, c) -> complex:
    """``exp(-(c/2) * int ln(1 - 4 conj(f) g))``.

    Only needs ``4 |f|_inf |g|_inf < 1``, which is weaker than both
    exponential vectors existing.
    """
    f, g = stepfn.common_refinement(f, g)
    return cmath.exp(-(float(c) / 2.0) * stepfn.log_integral(f, g))


def _exp_series(log_coeffs: list, order: int, zero, one) -> list:
    """Coefficients of ``exp(L(t))`` given those of L with ``L_0 = 0``.

    Uses ``n E_n = sum_{k=1}^n k L_k E_(n-k)``.
    """
    e = [one]
    for n in range(1, order + 1):
        acc = zero
        for k in range(1, n + 1):
            acc = acc + k * log_coeffs[k] * e[n - k]
        e.append(acc / n)
    return e


def derivative_coefficient_check(f, g, n: int, c) -> float:
    """Relative gap between ``d^n/dt^n <Psi(g), Psi(t f)>`` at 0 and ``I_n(g,f)/n!``.

    The t-expansion is built from ``-(c/2) sum_cells m ln(1 - 4 t conj(g) f)``
    as a power series and exponentiated; exact when all inputs are rational.
    """
    for h in (f, g):
        if not exists_exponential(h).exists:
            raise DomainViolation("exponential vector does not exist (sup norm >= 1/2)")
    f, g = stepfn.common_refinement(f, g)
    exact = f.exact and g.exact and is_exact(c)
    if not exact:
        f, g, c = f.to_float(), g.to_float(), float(c)
    else:
        c = Fraction(c)
    zero, one = (QQi(0), QQi(1)) if exact else (0j, 1 + 0j)

    # -(c/2) m ln(1 - 4 t z) = (c/2) m sum_k (4z)^k t^k / k
    log_coeffs = [zero]
    for k in range(1, n + 1):
        acc = zero
        for cell, v in g.items:
            w = f.value(cell.id)
            if w:
                acc = acc + cell.measure * (4 * v.conjugate() * w) ** k
        log_coeffs.append(acc * c / (2 * k) if exact else acc * (c / (2 * k)))
    coeff = _exp_series(log_coeffs, n, zero, one)[n]
    lhs = factorial(n) * coeff
    rhs = nth_inner(g, f, n, c)
    rhs = rhs / factorial(n) if exact else rhs / float(factorial(n))
    diff = abs(complex(lhs - rhs))
    scale = abs(complex(rhs))
    return diff / scale if scale else diff
