"""
Exact counting of De Bruijn terms under a size model

Most families are "ladders": row m at size k refers to row m+1 at size k-c (an
abstraction moves one level up) and to its own row through a convolution (an
application). Rows are extended lazily and only as far as a query needs; levels high
enough that their constraint is void alias a top row (the unrestricted row, or the
bounded row for L^(h)).
"""
import logging
from enum import Enum
from functools import lru_cache
from operator import mul
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import DomainError, ResourceLimit
from app.schemas import SizeSpec

logger = logging.getLogger(__name__)


class Family(str, Enum):
    M_OPEN = "m-open"
    UNRESTRICTED = "unrestricted"
    BOUNDED_H = "bounded-h"
    Q_ABSTRACTIONS = "q-abstractions"
    NORMAL_FORM = "normal-form"
    BETA_NORMAL = "beta-normal"
    SUPERCLASS = "superclass"


def _self_convolution(row: List[int], k: int, lo: int = 0) -> int:
    """Sum of row[i] * row[k - i] over lo <= i <= k - lo"""
    half = (k + 1) // 2
    total = 2 * sum(map(mul, row[lo:half], row[k - lo:k - half:-1])) if half > lo else 0
    if k % 2 == 0 and k // 2 >= lo:
        total += row[k // 2] * row[k // 2]
    return total


def _cross_convolution(left: List[int], right: List[int], k: int, lo: int = 0) -> int:
    """Sum of left[i] * right[k - i] over lo <= i <= k - lo"""
    if k - lo < lo:
        return 0
    return sum(map(mul, left[lo:k - lo + 1], reversed(right[lo:k - lo + 1])))


class CountTable:
    """Memoized ladder of exact counts for one (spec, family, parameters)"""

    family: Family = Family.M_OPEN

    def __init__(self, spec: SizeSpec):
        self.spec = spec
        self.rows: Dict[int, List[int]] = {}
        self.top: List[int] = []

    # Family hooks
    @property
    def params(self) -> Dict[str, int]:
        return {}

    def level_key(self, m: int) -> int:
        return m

    def next_level(self, level: int) -> int:
        return level + 1

    def is_top(self, level: int, k: int) -> bool:
        return self.spec.a + self.spec.b * level > k

    def leaf(self, level: Optional[int], k: int) -> int:
        """1 iff k is the size of a variable with at most level-1 successors (None: unbounded)"""
        a, b = self.spec.a, self.spec.b
        if k < a or (k - a) % b:
            return 0
        return 1 if level is None or (k - a) // b <= level - 1 else 0

    def top_entry(self, k: int) -> int:
        c, d = self.spec.c, self.spec.d
        row = self.top
        value = self.leaf(None, k)
        if k >= c:
            value += row[k - c]
        if k >= d:
            value += _self_convolution(row, k - d, 1 if d == 0 else 0)
        return value

    def entry(self, level: int, row: List[int], k: int) -> int:
        c, d = self.spec.c, self.spec.d
        value = self.leaf(level, k)
        if k >= c:
            value += self.lookup(self.next_level(level), k - c)
        if k >= d:
            value += _self_convolution(row, k - d, 1 if d == 0 else 0)
        return value

    # Ladder machinery
    @property
    def max_n(self) -> int:
        return len(self.top) - 1

    def lookup(self, level: int, k: int) -> int:
        if self.is_top(level, k):
            return self.top[k]
        return self.rows[level][k]

    def extend_top(self, n: int) -> None:
        for k in range(len(self.top), n + 1):
            self.top.append(self.top_entry(k))

    def extend_row(self, level: int, limit: int) -> None:
        row = self.rows.setdefault(level, [])
        for k in range(len(row), limit + 1):
            row.append(self.top[k] if self.is_top(level, k) else self.entry(level, row, k))

    def value(self, m: int, n: int) -> int:
        if m < 0 or n < 0:
            raise DomainError(f"m and n must be nonnegative, got m={m}, n={n}")
        level = self.level_key(m)
        if n > self.max_n:
            logger.debug("extending %s table for %s to n=%d", self.family.value, self.spec.label, n)
            self.extend_top(n)
        plan: List[Tuple[int, int]] = []
        limit = n
        while limit >= 0 and not self.is_top(level, limit):
            plan.append((level, limit))
            level = self.next_level(level)
            limit -= self.spec.c
        for row_level, row_limit in reversed(plan):
            self.extend_row(row_level, row_limit)
        return self.lookup(self.level_key(m), n)

    def entries(self) -> Iterator[Tuple[Optional[int], int, int]]:
        """(level, n, value) triples; level None marks the top row"""
        for k, value in enumerate(self.top):
            yield None, k, value
        for level in sorted(self.rows):
            for k, value in enumerate(self.rows[level]):
                yield level, k, value

    def load_entries(self, entries: Dict[Optional[int], List[int]]) -> None:
        self.top = list(entries.get(None, []))
        self.rows = {level: list(row) for level, row in entries.items() if level is not None}


class MOpenTable(CountTable):
    family = Family.M_OPEN


class UnrestrictedTable(CountTable):
    family = Family.UNRESTRICTED

    def is_top(self, level: int, k: int) -> bool:
        return True


class SuperclassTable(CountTable):
    """Coefficients of L_{m,N}: level N carries the unrestricted row"""

    family = Family.SUPERCLASS

    def __init__(self, spec: SizeSpec, N: int):
        if N < 0:
            raise DomainError(f"superclass level N must be nonnegative, got {N}")
        super().__init__(spec)
        self.N = N

    @property
    def params(self) -> Dict[str, int]:
        return {"N": self.N}

    def level_key(self, m: int) -> int:
        if m > self.N:
            raise DomainError(f"superclass level m={m} exceeds N={self.N}")
        return m

    def is_top(self, level: int, k: int) -> bool:
        return level >= self.N


class BoundedSuccessorTable(CountTable):
    """Coefficients of L^(h)_m: every index is at most h, so levels >= h share row h"""

    family = Family.BOUNDED_H

    def __init__(self, spec: SizeSpec, h: int):
        if h < 1:
            raise DomainError(f"successor bound h must be at least 1, got {h}")
        super().__init__(spec)
        self.h = h

    @property
    def params(self) -> Dict[str, int]:
        return {"h": self.h}

    def level_key(self, m: int) -> int:
        return min(m, self.h)

    def next_level(self, level: int) -> int:
        return min(level + 1, self.h)

    def is_top(self, level: int, k: int) -> bool:
        return level >= self.h

    def top_entry(self, k: int) -> int:
        c, d = self.spec.c, self.spec.d
        value = self.leaf(self.h, k)
        if k >= c:
            value += self.top[k - c]
        if k >= d:
            value += _self_convolution(self.top, k - d, 1 if d == 0 else 0)
        return value


class NormalFormTable(CountTable):
    """
    Coefficients of B_m: terms without a subterm App(Abs(_), _)

    An application's left part is either a variable or another application, which gives
    B_m = leaves + z^c B_{m+1} + z^{a+d} leaves(z) B_m + z^{2d} B_m^3.
    """

    family = Family.NORMAL_FORM

    def __init__(self, spec: SizeSpec):
        super().__init__(spec)
        self.pairs: Dict[Optional[int], List[int]] = {None: []}

    def _prefix_sum(self, level: Optional[int], row: List[int], k: int) -> int:
        a, b, d = self.spec.a, self.spec.b, self.spec.d
        total = 0
        j = 0
        while (level is None or j < level) and k - (a + d) - b * j >= 0:
            total += row[k - (a + d) - b * j]
            j += 1
        return total

    def _triple(self, row: List[int], pairs: List[int], k: int) -> int:
        lo = 1 if self.spec.d == 0 else 0
        return sum(map(mul, row[lo:k + 1], reversed(pairs[:k - lo + 1])))

    def _value(self, level: Optional[int], row: List[int], pairs: List[int], k: int) -> int:
        c, d = self.spec.c, self.spec.d
        value = self.leaf(level, k)
        if k >= c:
            value += row[k - c] if level is None else self.lookup(level + 1, k - c)
        value += self._prefix_sum(level, row, k)
        if k >= 2 * d:
            value += self._triple(row, pairs, k - 2 * d)
        return value

    def extend_top(self, n: int) -> None:
        pairs = self.pairs[None]
        for k in range(len(self.top), n + 1):
            self.top.append(self._value(None, self.top, pairs, k))
            pairs.append(_self_convolution(self.top, k))

    def extend_row(self, level: int, limit: int) -> None:
        row = self.rows.setdefault(level, [])
        pairs = self.pairs.setdefault(level, [])
        for k in range(len(row), limit + 1):
            if self.is_top(level, k):
                row.append(self.top[k])
                pairs.append(self.pairs[None][k])
            else:
                row.append(self._value(level, row, pairs, k))
                pairs.append(_self_convolution(row, k))

    def load_entries(self, entries: Dict[Optional[int], List[int]]) -> None:
        super().load_entries(entries)
        self.pairs = {}
        for level, row in [(None, self.top)] + list(self.rows.items()):
            self.pairs[level] = [_self_convolution(row, k) for k in range(len(row))]


class BetaNormalTable(CountTable):
    """
    Coefficients of the beta-normal m-open terms

    A normal form is an abstraction of a normal form or a neutral term; a neutral term is
    a variable or a neutral term applied to a normal form. The cubic system behind
    NormalFormTable also admits App(App(Abs, _), _), so it counts a superset of these.
    """

    family = Family.BETA_NORMAL

    def __init__(self, spec: SizeSpec):
        super().__init__(spec)
        self.neutral: Dict[Optional[int], List[int]] = {None: []}

    def _neutral(self, level: Optional[int], row: List[int], neutral: List[int], k: int) -> int:
        d = self.spec.d
        value = self.leaf(level, k)
        if k >= d:
            value += _cross_convolution(neutral, row, k - d, 1 if d == 0 else 0)
        return value

    def extend_top(self, n: int) -> None:
        neutral = self.neutral[None]
        c = self.spec.c
        for k in range(len(self.top), n + 1):
            neutral.append(self._neutral(None, self.top, neutral, k))
            self.top.append(neutral[k] + (self.top[k - c] if k >= c else 0))

    def extend_row(self, level: int, limit: int) -> None:
        row = self.rows.setdefault(level, [])
        neutral = self.neutral.setdefault(level, [])
        c = self.spec.c
        for k in range(len(row), limit + 1):
            if self.is_top(level, k):
                neutral.append(self.neutral[None][k])
                row.append(self.top[k])
            else:
                neutral.append(self._neutral(level, row, neutral, k))
                row.append(neutral[k] + (self.lookup(level + 1, k - c) if k >= c else 0))

    def load_entries(self, entries: Dict[Optional[int], List[int]]) -> None:
        # neutral rows are not persisted, so rebuild from the stored extents
        self.top, self.rows, self.neutral = [], {}, {None: []}
        top = entries.get(None, [])
        if top:
            self.extend_top(len(top) - 1)
        for level in sorted((level for level in entries if level is not None), reverse=True):
            self.extend_row(level, len(entries[level]) - 1)


class QAbstractionTable:
    """Coefficients L_{m,q,n} of m-open terms with exactly q abstractions"""

    family = Family.Q_ABSTRACTIONS

    def __init__(self, spec: SizeSpec):
        self.spec = spec
        self.rows: Dict[Tuple[int, int], List[int]] = {}

    @property
    def params(self) -> Dict[str, int]:
        return {}

    def _leaf(self, m: int, k: int) -> int:
        a, b = self.spec.a, self.spec.b
        if k < a or (k - a) % b:
            return 0
        return 1 if (k - a) // b <= m - 1 else 0

    def _entry(self, m: int, q: int, row: List[int], k: int) -> int:
        c, d = self.spec.c, self.spec.d
        lo = 1 if d == 0 else 0
        if q == 0:
            value = self._leaf(m, k)
            if k >= d:
                value += _self_convolution(row, k - d, lo)
            return value
        value = self.rows[(m + 1, q - 1)][k - c] if k >= c else 0
        if k >= d:
            rows = [self.rows[(m, l)] if l != q else row for l in range(q + 1)]
            for l in range((q + 1) // 2):
                value += 2 * _cross_convolution(rows[l], rows[q - l], k - d, lo)
            if q % 2 == 0:
                value += _self_convolution(rows[q // 2], k - d, lo)
        return value

    def _extend(self, m: int, q: int, limit: int) -> None:
        row = self.rows.setdefault((m, q), [])
        for k in range(len(row), limit + 1):
            row.append(0 if m == 0 and q == 0 else self._entry(m, q, row, k))

    def value(self, m: int, q: int, n: int) -> int:
        if m < 0 or q < 0 or n < 0:
            raise DomainError(f"m, q and n must be nonnegative, got m={m}, q={q}, n={n}")
        for l in range(q + 1):
            for i in range(q - l + 1):
                limit = n - i * self.spec.c
                if limit >= 0:
                    self._extend(m + i, l, limit)
        return self.rows[(m, q)][n]

    def entries(self) -> Iterator[Tuple[int, int, int, int]]:
        for (m, q) in sorted(self.rows):
            for k, value in enumerate(self.rows[(m, q)]):
                yield m, k, value, q

    def load_entries(self, rows: Dict[Tuple[int, int], List[int]]) -> None:
        self.rows = {key: list(row) for key, row in rows.items()}


@lru_cache(maxsize=64)
def get_table(spec: SizeSpec, family: Family, param: Optional[int] = None):
    """Process-wide table for (spec, family, parameter)"""
    if family is Family.M_OPEN:
        return MOpenTable(spec)
    if family is Family.UNRESTRICTED:
        return UnrestrictedTable(spec)
    if family is Family.SUPERCLASS:
        return SuperclassTable(spec, param)  # type: ignore[arg-type]
    if family is Family.BOUNDED_H:
        return BoundedSuccessorTable(spec, param)  # type: ignore[arg-type]
    if family is Family.NORMAL_FORM:
        return NormalFormTable(spec)
    if family is Family.BETA_NORMAL:
        return BetaNormalTable(spec)
    return QAbstractionTable(spec)


def _check_cap(n: int, cap: Optional[int]) -> None:
    limit = settings.max_n if cap is None else cap
    if n > limit:
        raise ResourceLimit(f"size n={n} exceeds the counting cap {limit}", n=n, cap=limit)


def count_m_open(spec: SizeSpec, m: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.M_OPEN).value(m, n)


def count_unrestricted(spec: SizeSpec, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.UNRESTRICTED).value(0, n)


def count_bounded_successors(spec: SizeSpec, m: int, h: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.BOUNDED_H, h).value(m, n)


def count_q_abstractions(spec: SizeSpec, m: int, q: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.Q_ABSTRACTIONS).value(m, q, n)


def count_at_most_q(spec: SizeSpec, m: int, q: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    table = get_table(spec, Family.Q_ABSTRACTIONS)
    # a size-n term holds at most n // c abstractions
    return sum(table.value(m, l, n) for l in range(min(q, n // spec.c) + 1))


def count_normal_form(spec: SizeSpec, m: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.NORMAL_FORM).value(m, n)


def count_beta_normal_form(spec: SizeSpec, m: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.BETA_NORMAL).value(m, n)


def count_superclass(spec: SizeSpec, N: int, m: int, n: int, cap: Optional[int] = None) -> int:
    _check_cap(n, cap)
    return get_table(spec, Family.SUPERCLASS, N).value(m, n)


def count_not_m_open(spec: SizeSpec, m: int, n: int, cap: Optional[int] = None) -> int:
    """Size-n terms that stay open under m leading abstractions (K_{m,n})"""
    return count_unrestricted(spec, n, cap) - count_m_open(spec, m, n, cap)


def inexpressible_size(spec: SizeSpec, m: int, q: int, n: int) -> bool:
    """
    True when no m-open term with exactly q abstractions can have size n

    Sizes are (y+1)a + xb + qc + yd for y applications and x <= (m-1+q)(y+1) successors.
    """
    a, b, c, d = spec.weights
    if m == 0 and q == 0:
        return True
    rest = n - q * c - a
    y = 0
    while rest - y * (a + d) >= 0:
        x_total = rest - y * (a + d)
        if x_total % b == 0 and x_total // b <= (m - 1 + q) * (y + 1):
            return False
        if a + d == 0:
            break
        y += 1
    return True


class ScaledCountTable:
    """
    Floating counts u_{m,n} = L_{m,n} * rho^n

    Same ladder as the exact m-open table with weights rho^a, rho^c, rho^d; used for
    sizes where exact integers get slow.
    """

    def __init__(self, spec: SizeSpec, rho: float):
        self.spec = spec
        self.rho = rho
        self.top = np.zeros(0)
        self.rows: Dict[int, np.ndarray] = {}

    def _leaf(self, level: Optional[int], k: int) -> float:
        a, b = self.spec.a, self.spec.b
        if k < a or (k - a) % b:
            return 0.0
        if level is not None and (k - a) // b > level - 1:
            return 0.0
        return self.rho ** k

    def _conv(self, row: np.ndarray, k: int) -> float:
        if self.spec.d == 0:
            return float(np.dot(row[1:k], row[k - 1:0:-1])) if k >= 2 else 0.0
        return float(np.dot(row[:k + 1], row[k::-1]))

    def _fill(self, row: np.ndarray, start: int, level: Optional[int]) -> None:
        c, d = self.spec.c, self.spec.d
        wc, wd = self.rho ** c, self.rho ** d
        for k in range(start, len(row)):
            if level is not None and self.spec.a + self.spec.b * level > k:
                row[k] = self.top[k]
                continue
            value = self._leaf(level, k)
            if k >= c:
                value += wc * (row[k - c] if level is None else self.lookup(level + 1, k - c))
            if k >= d:
                value += wd * self._conv(row, k - d)
            row[k] = value

    def lookup(self, level: int, k: int) -> float:
        if self.spec.a + self.spec.b * level > k:
            return float(self.top[k])
        return float(self.rows[level][k])

    def _extend_top(self, n: int) -> None:
        start = len(self.top)
        if n < start:
            return
        self.top = np.concatenate([self.top, np.zeros(n + 1 - start)])
        self._fill(self.top, start, None)

    def value(self, m: int, n: int) -> float:
        self._extend_top(n)
        plan: List[Tuple[int, int]] = []
        level, limit = m, n
        while limit >= 0 and not self.spec.a + self.spec.b * level > limit:
            plan.append((level, limit))
            level += 1
            limit -= self.spec.c
        for row_level, row_limit in reversed(plan):
            row = self.rows.get(row_level, np.zeros(0))
            start = len(row)
            if row_limit + 1 > start:
                row = np.concatenate([row, np.zeros(row_limit + 1 - start)])
                self._fill(row, start, row_level)
                self.rows[row_level] = row
        return self.lookup(m, n)

    def unrestricted(self, n: int) -> float:
        self._extend_top(n)
        return float(self.top[n])
