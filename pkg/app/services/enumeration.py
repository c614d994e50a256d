"""
Exhaustive enumeration of m-open terms of one size, the oracle for the counting tables

Terms come out leaves first (ascending index), then abstractions, then applications
by ascending size of the left operand.
"""
import logging
from collections import OrderedDict
from itertools import chain, islice
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from app.config import settings
from app.exceptions import DomainError, ResourceLimit
from app.models import Abs, App, Term, Var
from app.schemas import SizeSpec

logger = logging.getLogger(__name__)

FILTERS = ("all", "normal-form", "beta-normal", "q-abstractions", "bounded-h")
# terms kept in memory across all cached sizes, and the largest size class that is cached
MEMO_BUDGET = 500_000
MEMO_ENTRY_LIMIT = 100_000

# Kinds of the internal grammar; "pair" is the unconstrained App(B, B) of the normal-form
# grammar and "neutral" the variable-headed applications of the beta-normal one.
ALL, BOUNDED, SUPER, QABS, NF, NF_PAIR, BETA, BETA_NEUTRAL = (
    "all", "bounded", "superclass", "q", "nf", "nf-pair", "beta", "beta-neutral",
)


def _leaves(spec: SizeSpec, limit: Optional[int], n: int) -> List[Term]:
    """Variables of size n with at most limit-1 successors (None: no bound)"""
    if n < spec.a or (n - spec.a) % spec.b:
        return []
    s = (n - spec.a) // spec.b
    if limit is not None and s > limit - 1:
        return []
    return [Var(s)]


def _splits(spec: SizeSpec, n: int) -> Iterator[Tuple[int, int]]:
    """(left size, right size) of an application of size n, left ascending"""
    for left in range(0, n - spec.d + 1):
        right = n - spec.d - left
        if left == n or right == n:
            continue
        yield left, right


def _key(spec: SizeSpec, kind: str, level: int, param: int, n: int) -> int:
    """Canonical level: past the stabilization cap every level enumerates the same set"""
    if kind in (BOUNDED, SUPER):
        level = min(level, param)
    return min(level, spec.stabilization_level(n))


def _neutral_applications(spec: SizeSpec, level: int, param: int, n: int) -> Iterator[Term]:
    for left_size, right_size in _splits(spec, n):
        rights = _terms(spec, BETA, level, param, right_size)
        for left in _terms(spec, BETA_NEUTRAL, level, param, left_size):
            for right in rights:
                yield App(left, right)


def _generate(spec: SizeSpec, kind: str, level: int, param: int, n: int) -> Iterator[Term]:
    c = spec.c
    if kind == QABS:
        if param == 0:
            yield from _leaves(spec, level, n)
        elif n >= c:
            for body in _terms(spec, QABS, level + 1, param - 1, n - c):
                yield Abs(body)
        for left_size, right_size in _splits(spec, n):
            for q_left in range(param + 1):
                rights = _terms(spec, QABS, level, param - q_left, right_size)
                if not rights:
                    continue
                for left in _terms(spec, QABS, level, q_left, left_size):
                    for right in rights:
                        yield App(left, right)
        return

    if kind == NF_PAIR:
        for left_size, right_size in _splits(spec, n):
            rights = _terms(spec, NF, level, param, right_size)
            for left in _terms(spec, NF, level, param, left_size):
                for right in rights:
                    yield App(left, right)
        return

    if kind == BETA_NEUTRAL:
        yield from _leaves(spec, level, n)
        yield from _neutral_applications(spec, level, param, n)
        return

    if kind == BETA:
        yield from _leaves(spec, level, n)
        if n >= c:
            for body in _terms(spec, BETA, level + 1, param, n - c):
                yield Abs(body)
        yield from _neutral_applications(spec, level, param, n)
        return

    if kind == BOUNDED:
        limit: Optional[int] = min(level, param)
    elif kind == SUPER:
        limit = None if level >= param else level
    else:
        limit = level
    yield from _leaves(spec, limit, n)
    if n >= c:
        for body in _terms(spec, kind, level + 1, param, n - c):
            yield Abs(body)
    for left_size, right_size in _splits(spec, n):
        rights = _terms(spec, kind, level, param, right_size)
        if not rights:
            continue
        if kind == NF:
            lefts: Iterable[Term] = chain(
                _leaves(spec, level, left_size), _terms(spec, NF_PAIR, level, param, left_size)
            )
        else:
            lefts = _terms(spec, kind, level, param, left_size)
        for left in lefts:
            for right in rights:
                yield App(left, right)


Key = Tuple[SizeSpec, str, int, int, int]


class _Regenerated:
    """Terms of one key, generated afresh on every pass"""

    __slots__ = ("key",)

    def __init__(self, key: Key):
        self.key = key

    def __iter__(self) -> Iterator[Term]:
        return _generate(*self.key)

    def __bool__(self) -> bool:
        return next(iter(self), None) is not None


class TermMemo:
    """
    Least recently used memo of term tuples, holding at most budget terms in total

    A key with more than entry_limit terms is never stored; it is regenerated whenever it
    is needed, so enumeration memory stays bounded whatever the size.
    """

    def __init__(self, budget: int, entry_limit: int):
        self.budget = budget
        self.entry_limit = entry_limit
        self.entries: "OrderedDict[Key, Tuple[Term, ...]]" = OrderedDict()
        self.oversized: Set[Key] = set()
        self.total = 0

    def get(self, key: Key) -> Union[Tuple[Term, ...], _Regenerated]:
        cached = self.entries.get(key)
        if cached is not None:
            self.entries.move_to_end(key)
            return cached
        if key in self.oversized:
            return _Regenerated(key)
        terms = tuple(islice(_generate(*key), self.entry_limit + 1))
        if len(terms) > self.entry_limit:
            logger.debug("regenerating %s terms of size %d on every pass", key[1], key[4])
            self.oversized.add(key)
            return _Regenerated(key)
        while self.entries and self.total + len(terms) > self.budget:
            _, evicted = self.entries.popitem(last=False)
            self.total -= len(evicted)
        self.entries[key] = terms
        self.total += len(terms)
        return terms

    def clear(self) -> None:
        self.entries.clear()
        self.oversized.clear()
        self.total = 0


_memo = TermMemo(MEMO_BUDGET, MEMO_ENTRY_LIMIT)


def _terms(spec: SizeSpec, kind: str, level: int, param: int, n: int) -> Union[Tuple[Term, ...], _Regenerated]:
    if n < 0:
        return ()
    return _memo.get((spec, kind, _key(spec, kind, level, param, n), param, n))


def _check_cap(n: int, cap: Optional[int]) -> None:
    limit = settings.enumerate_max_n if cap is None else cap
    if n > limit:
        raise ResourceLimit(f"enumeration size n={n} exceeds the cap {limit}", n=n, cap=limit)


def enumerate_terms(
    spec: SizeSpec,
    m: int,
    n: int,
    filter: str = "all",
    q: Optional[int] = None,
    h: Optional[int] = None,
    cap: Optional[int] = None,
) -> Iterator[Term]:
    """
    Yield every m-open term of size n matching the filter, each exactly once

    Filters: all, normal-form (the class of count_normal_form), beta-normal,
    q-abstractions (needs q), bounded-h (needs h).
    """
    if m < 0 or n < 0:
        raise DomainError(f"m and n must be nonnegative, got m={m}, n={n}")
    _check_cap(n, cap)
    if filter == "all":
        kind, param = ALL, 0
    elif filter == "normal-form":
        kind, param = NF, 0
    elif filter == "beta-normal":
        kind, param = BETA, 0
    elif filter == "q-abstractions":
        if q is None or q < 0:
            raise DomainError("filter q-abstractions needs a nonnegative q")
        kind, param = QABS, q
    elif filter == "bounded-h":
        if h is None or h < 1:
            raise DomainError("filter bounded-h needs h >= 1")
        kind, param = BOUNDED, h
    else:
        raise DomainError(f"unknown filter '{filter}', expected one of {', '.join(FILTERS)}")
    logger.debug("enumerating %s terms of size %d, m=%d, spec %s", filter, n, m, spec.label)
    level = m if kind == QABS else _key(spec, kind, m, param, n)
    return _generate(spec, kind, level, param, n)


def enumerate_superclass(spec: SizeSpec, N: int, m: int, n: int, cap: Optional[int] = None) -> Iterator[Term]:
    """Terms of L_{m,N}: below level N a variable must be bound, from level N on anything goes"""
    if not 0 <= m <= N:
        raise DomainError(f"expected 0 <= m <= N, got m={m}, N={N}")
    _check_cap(n, cap)
    return _generate(spec, SUPER, _key(spec, SUPER, m, N, n), N, n)


def clear_cache() -> None:
    _memo.clear()
