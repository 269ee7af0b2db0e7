"""Seeded random test functions for property suites."""

from __future__ import annotations

import random
from fractions import Fraction

from . import stepfn
from .numbers import QQi


def random_fraction(rng: random.Random, bound: Fraction, denom: int = 12) -> Fraction:
    """Uniform-ish rational in ``[-bound, bound]`` with denominator ``denom``."""
    top = int(bound * denom)
    return Fraction(rng.randint(-top, top), denom)


def random_qqi(rng: random.Random, radius: Fraction, complex_values: bool = True) -> QQi:
    """Exact complex rational of modulus at most ``radius``."""
    while True:
        re = random_fraction(rng, radius)
        im = random_fraction(rng, radius) if complex_values else Fraction(0)
        z = QQi(re, im)
        if z.abs2() <= radius * radius:
            return z


def random_measures(rng: random.Random, n_cells: int) -> list[Fraction]:
    return [Fraction(rng.randint(1, 8), rng.randint(1, 4)) for _ in range(n_cells)]


def random_exact_function(
    rng: random.Random,
    measures: list[Fraction],
    radius: Fraction = Fraction(2, 5),
    complex_values: bool = True,
    zero_prob: float = 0.0,
) -> stepfn.MeasuredCellFunction:
    """Step function on abstract cells ``c0, c1, ...`` with the given measures."""
    cells = []
    for i, m in enumerate(measures):
        if zero_prob and rng.random() < zero_prob:
            continue
        cells.append((f"c{i}", m, random_qqi(rng, radius, complex_values)))
    return stepfn.from_cells(cells)


def random_float_function(
    rng: random.Random, measures: list[float], radius: float = 0.4
) -> stepfn.MeasuredCellFunction:
    cells = []
    for i, m in enumerate(measures):
        while True:
            z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
            if 0 < abs(z) <= radius:
                break
        cells.append((f"c{i}", float(m), z))
    return stepfn.from_cells(cells)


def random_c(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 6), rng.randint(1, 3))
