"""Symbolic normal ordering for the creator / number / annihilator algebra.

Words are tuples of ``Generator`` read as operator products, so the last
factor acts on the vacuum first.  The rewrite rules use nothing but the
commutation relations

    B_f B+_g = B+_g B_f + 2c<f,g> + 4 N_{conj(f) g}
    N_a B+_f = B+_f N_a + 2 B+_{a f}
    B_f N_a  = N_a B_f + 2 B_{conj(a) f}

(the third is the adjoint of the second) plus commutativity inside each
family.  A word is normal when creators precede numbers precede
annihilators and each family is sorted by argument.  All arithmetic is
exact, which makes this module an independent oracle for ``fock_core``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from . import stepfn
from .errors import NonRationalInput, OracleBudgetExceeded
from .numbers import QQi, is_exact
from .stepfn import MeasuredCellFunction

__all__ = [
    "ANNIHILATOR",
    "CREATOR",
    "Generator",
    "NUMBER",
    "Term",
    "TermSum",
    "annihilator",
    "annihilator_commutator_identity",
    "apply_to_vacuum",
    "creator",
    "normal_order",
    "number",
    "number_commutator_identity",
    "oracle_inner",
    "oracle_nth_inner",
    "vacuum_expectation",
    "verify_operator_identity",
]

CREATOR, NUMBER, ANNIHILATOR = 0, 1, 2
_KIND_NAMES = {CREATOR: "B+", NUMBER: "N", ANNIHILATOR: "B"}

DEFAULT_ORDER_CAP = 6
DEFAULT_TERM_CAP = 10**6


@dataclass(frozen=True)
class Generator:
    kind: int
    arg: MeasuredCellFunction

    @property
    def sort_key(self):
        return (self.kind, self.arg.key)

    def __lt__(self, other: "Generator") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self):
        return f"{_KIND_NAMES[self.kind]}[{self.arg!r}]"


def _gen(kind: int, f: MeasuredCellFunction) -> Generator:
    if not f.exact:
        raise NonRationalInput("oracle generators need exact rational test functions")
    return Generator(kind, f)


def creator(f: MeasuredCellFunction) -> Generator:
    return _gen(CREATOR, f)


def annihilator(f: MeasuredCellFunction) -> Generator:
    return _gen(ANNIHILATOR, f)


def number(f: MeasuredCellFunction) -> Generator:
    return _gen(NUMBER, f)


Word = tuple  # tuple[Generator, ...]


@dataclass(frozen=True)
class Term:
    coeff: QQi
    word: Word


class TermSum:
    """Canonical finite sum of normal-ordered words with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, QQi] | Iterable[tuple[Word, QQi]] = ()):
        acc: dict[Word, QQi] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, coeff in items:
            _accumulate(acc, tuple(word), coeff)
        self._terms = acc

    @classmethod
    def scalar(cls, value) -> "TermSum":
        return cls({(): QQi(value) if not isinstance(value, QQi) else value})

    @property
    def terms(self) -> dict[Word, QQi]:
        return dict(self._terms)

    def coefficient(self, word: Word = ()) -> QQi:
        return self._terms.get(tuple(word), QQi(0))

    def sorted_terms(self) -> list[Term]:
        return [Term(c, w) for w, c in sorted(self._terms.items(), key=_word_sort)]

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def __add__(self, other: "TermSum") -> "TermSum":
        acc = dict(self._terms)
        for w, c in other._terms.items():
            _accumulate(acc, w, c)
        return _wrap(acc)

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + other.scale(-1)

    def scale(self, lam) -> "TermSum":
        return TermSum({w: c * lam for w, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, TermSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        parts = [f"({t.coeff})*{' '.join(map(repr, t.word)) or '1'}" for t in self]
        return " + ".join(parts) or "0"


def _wrap(acc: dict) -> TermSum:
    out = TermSum()
    out._terms = acc
    return out


def _word_sort(item):
    word, _ = item
    return (len(word), tuple(g.sort_key for g in word))


def _accumulate(acc: dict, word: Word, coeff) -> None:
    if not coeff:
        return
    total = acc.get(word)
    total = coeff if total is None else total + coeff
    if total:
        acc[word] = total
    else:
        acc.pop(word, None)


# -- rewrite rules ----------------------------------------------------------


def _reducible(left: Generator, right: Generator) -> bool:
    if left.kind != right.kind:
        return left.kind > right.kind
    return right.sort_key < left.sort_key


def _rewrite(left: Generator, right: Generator, c: Fraction) -> list[tuple[QQi, Word]]:
    """Replacement for the adjacent pair ``left right`` (must be reducible)."""
    lk, rk = left.kind, right.kind
    if lk == rk:
        return [(QQi(1), (right, left))]
    out = [(QQi(1), (right, left))]
    f, g = left.arg, right.arg
    if lk == ANNIHILATOR and rk == CREATOR:
        inner = stepfn.moment(f, g, 1)
        if inner:
            out.append((2 * c * inner, ()))
        prod = stepfn.pointwise_mul(stepfn.conj(f), g)
        if not prod.is_zero:
            out.append((QQi(4), (Generator(NUMBER, prod),)))
    elif lk == NUMBER and rk == CREATOR:
        prod = stepfn.pointwise_mul(f, g)
        if not prod.is_zero:
            out.append((QQi(2), (Generator(CREATOR, prod),)))
    elif lk == ANNIHILATOR and rk == NUMBER:
        # left = B_f, right = N_a
        prod = stepfn.pointwise_mul(stepfn.conj(g), f)
        if not prod.is_zero:
            out.append((QQi(2), (Generator(ANNIHILATOR, prod),)))
    else:  # pragma: no cover - guarded by _reducible
        raise AssertionError("pair is already ordered")
    return out


def _is_normal(word: Word) -> bool:
    return all(not _reducible(a, b) for a, b in zip(word, word[1:]))


@lru_cache(maxsize=None)
def _lmul(gen: Generator, word: Word, c: Fraction) -> tuple[tuple[Word, QQi], ...]:
    """Normal form of ``gen * word`` for an already normal ``word``.

    Always rewrites the leftmost reducible pair, which here is ``(gen, word[0])``.
    """
    if not word or not _reducible(gen, word[0]):
        return (((gen,) + word, QQi(1)),)
    acc: dict[Word, QQi] = {}
    rest = word[1:]
    for coeff, replacement in _rewrite(gen, word[0], c):
        partial: dict[Word, QQi] = {rest: coeff}
        for g in reversed(replacement):
            nxt: dict[Word, QQi] = {}
            for w, k in partial.items():
                for w2, k2 in _lmul(g, w, c):
                    _accumulate(nxt, w2, k * k2)
            partial = nxt
        for w, k in partial.items():
            _accumulate(acc, w, k)
    return tuple(acc.items())


def _check_inputs(word: Word, c) -> Fraction:
    if not is_exact(c) or isinstance(c, QQi):
        raise NonRationalInput(f"c must be an exact positive rational, got {c!r}")
    c = Fraction(c)
    if c <= 0:
        raise NonRationalInput(f"c must be positive, got {c}")
    for g in word:
        if not isinstance(g, Generator) or not g.arg.exact:
            raise NonRationalInput("word factors must be generators with exact arguments")
    return c


def _normal_order_leftmost(word: Word, c: Fraction, term_cap: int) -> dict:
    state: dict[Word, QQi] = {(): QQi(1)}
    for gen in reversed(word):
        if gen.arg.is_zero:
            return {}
        nxt: dict[Word, QQi] = {}
        for w, k in state.items():
            for w2, k2 in _lmul(gen, w, c):
                _accumulate(nxt, w2, k * k2)
        if len(nxt) > term_cap:
            raise OracleBudgetExceeded(f"more than {term_cap} terms")
        state = nxt
    return state


def _normal_order_random(word: Word, c: Fraction, rng: random.Random, term_cap: int) -> dict:
    """Rewrite a randomly chosen reducible pair at every step."""
    if any(g.arg.is_zero for g in word):
        return {}
    pending: dict[Word, QQi] = {tuple(word): QQi(1)}
    done: dict[Word, QQi] = {}
    while pending:
        w, k = pending.popitem()
        spots = [i for i in range(len(w) - 1) if _reducible(w[i], w[i + 1])]
        if not spots:
            _accumulate(done, w, k)
            continue
        i = rng.choice(spots)
        for coeff, replacement in _rewrite(w[i], w[i + 1], c):
            _accumulate(pending, w[:i] + replacement + w[i + 2 :], k * coeff)
        if len(pending) + len(done) > term_cap:
            raise OracleBudgetExceeded(f"more than {term_cap} terms")
    return done


def normal_order(
    word: Iterable[Generator],
    c,
    rng: random.Random | None = None,
    term_cap: int = DEFAULT_TERM_CAP,
) -> TermSum:
    """Normal form of ``word``.

    Without ``rng`` the leftmost reducible pair is rewritten first (memoized);
    with ``rng`` a random reducible pair is picked at each step, which is how
    confluence gets spot-checked.
    """
    word = tuple(word)
    c = _check_inputs(word, c)
    if rng is None:
        return _wrap(_normal_order_leftmost(word, c, term_cap))
    return _wrap(_normal_order_random(word, c, rng, term_cap))


def normal_order_sum(ts: Iterable[tuple[object, Iterable[Generator]]], c) -> TermSum:
    """Normal form of a linear combination ``sum coeff * word``."""
    out = TermSum()
    for coeff, word in ts:
        out = out + normal_order(word, c).scale(coeff if isinstance(coeff, QQi) else QQi(coeff))
    return out


def vacuum_expectation(word: Iterable[Generator], c) -> QQi:
    """``<Phi, word Phi>``: the scalar term of the normal form."""
    return normal_order(word, c).coefficient(())


def apply_to_vacuum(word: Iterable[Generator], c) -> TermSum:
    """``word Phi`` as a sum of creator-only words acting on the vacuum."""
    nf = normal_order(word, c)
    return TermSum(
        {w: k for w, k in nf.terms.items() if all(g.kind == CREATOR for g in w)}
    )


def oracle_inner(f, g, m: int, n: int, c, cap: int = DEFAULT_ORDER_CAP) -> QQi:
    """``<B+^m_f Phi, B+^n_g Phi> = <Phi, B_f^m B+^n_g Phi>``."""
    if max(m, n) > cap:
        raise OracleBudgetExceeded(f"order {max(m, n)} exceeds the oracle cap {cap}")
    f, g = stepfn.common_refinement(f, g)
    if m == 0 and n == 0:
        return QQi(1)
    if f.is_zero and m or g.is_zero and n:
        return QQi(0)
    word = (annihilator(f),) * m + (creator(g),) * n
    return vacuum_expectation(word, c)


def oracle_nth_inner(f, g, n: int, c, cap: int = DEFAULT_ORDER_CAP) -> QQi:
    return oracle_inner(f, g, n, n, c, cap)


def verify_operator_identity(lhs: TermSum, rhs: TermSum) -> bool:
    return lhs == rhs


def clear_cache() -> None:
    _lmul.cache_clear()


# -- identities for commutators with B+^n --------------------------------------


def _commutator(x: Generator, n: int, g: MeasuredCellFunction, c) -> TermSum:
    power = (creator(g),) * n
    return normal_order((x,) + power, c) - normal_order(power + (x,), c)


def number_commutator_identity(f, g, n: int, c, coefficient: int | None = None):
    """Both sides of ``[N_f, B+^n_g] = 2n B+^(n-1)_g B+_{fg}``.

    ``coefficient`` overrides the ``2n`` factor (used for mutation tests).
    """
    f, g = stepfn.common_refinement(f, g)
    lhs = _commutator(number(f), n, g, c)
    k = 2 * n if coefficient is None else coefficient
    fg = stepfn.pointwise_mul(f, g)
    if n == 0 or fg.is_zero:
        return lhs, TermSum()
    rhs = normal_order((creator(g),) * (n - 1) + (creator(fg),), c).scale(QQi(k))
    return lhs, rhs


def annihilator_commutator_identity(f, g, n: int, c):
    """Both sides of
    ``[B_f, B+^n_g] = 2nc<f,g> B+^(n-1)_g + 4n B+^(n-1)_g N_{conj(f)g}
    + 4n(n-1) B+^(n-2)_g B+_{conj(f)g^2}``.
    """
    f, g = stepfn.common_refinement(f, g)
    c_exact = _check_inputs((), c)
    lhs = _commutator(annihilator(f), n, g, c)
    rhs = TermSum()
    if n == 0:
        return lhs, rhs
    fbar_g = stepfn.pointwise_mul(stepfn.conj(f), g)
    inner = stepfn.moment(f, g, 1)
    rhs = rhs + normal_order((creator(g),) * (n - 1), c).scale(2 * n * c_exact * inner)
    if not fbar_g.is_zero:
        rhs = rhs + normal_order((creator(g),) * (n - 1) + (number(fbar_g),), c).scale(QQi(4 * n))
        fbar_g2 = stepfn.pointwise_mul(fbar_g, g)
        if n >= 2 and not fbar_g2.is_zero:
            rhs = rhs + normal_order(
                (creator(g),) * (n - 2) + (creator(fbar_g2),), c
            ).scale(QQi(4 * n * (n - 1)))
    return lhs, rhs
