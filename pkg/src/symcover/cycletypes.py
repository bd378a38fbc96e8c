"""Cycle types: integer partitions with all parts at least 2.

A 2-regular multigraph on v vertices is a disjoint union of cycles
(counting a doubled edge as a 2-cycle), so its isomorphism class is a
partition of v into parts >= 2, stored non-decreasing.  This module
enumerates, counts, ranks and uniformly samples such partitions, and
parses the compact text form ``2^4,3``.

The stream order lists the largest part first and descends: for v = 4
it is [4] then [2,2].  Ranking and unranking against the count table
N(w, m) = #{partitions of w into parts in [2, m]} follow the same order,
which is what makes uniform sampling by rank possible.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "CycleType",
    "PartitionTable",
    "count_feasible",
    "enumerate_feasible",
    "rank",
    "unrank",
    "sample_feasible",
    "parse_cycle_type",
    "format_cycle_type",
]


@dataclass(frozen=True)
class CycleType:
    """Multiset of excess cycle lengths, kept as a non-decreasing tuple."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a cycle type needs at least one cycle")
        if any(c < 2 for c in self.parts):
            raise ValueError("cycle lengths must be at least 2")
        if any(a > b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be non-decreasing")

    @classmethod
    def of(cls, parts: Iterable[int]) -> "CycleType":
        return cls(tuple(sorted(parts)))

    @property
    def v(self) -> int:
        return sum(self.parts)

    @property
    def t(self) -> int:
        return len(self.parts)

    @property
    def num_even(self) -> int:
        return sum(1 for c in self.parts if c % 2 == 0)

    def __str__(self) -> str:
        return format_cycle_type(self)


class PartitionTable:
    """Counts N(w, m) of partitions of w into parts in [2, m], grown lazily."""

    def __init__(self, v_max: int = 0) -> None:
        self._rows: list[list[int]] = [[1]]
        if v_max:
            self.grow(v_max)

    @property
    def v_max(self) -> int:
        return len(self._rows) - 1

    def grow(self, v_max: int) -> None:
        for w in range(len(self._rows), v_max + 1):
            row = [0] * (w + 1)
            for m in range(2, w + 1):
                rest = w - m
                row[m] = row[m - 1] + self.count(rest, min(m, rest))
            self._rows.append(row)

    def count(self, w: int, m: int) -> int:
        """N(w, m); bounds above w and below 2 are clamped."""
        if w == 0:
            return 1
        if w > self.v_max:
            self.grow(w)
        m = min(m, w)
        if m < 2:
            return 0
        return self._rows[w][m]


_table = PartitionTable()


def count_feasible(v: int) -> int:
    """Number of partitions of v with every part at least 2."""
    if v < 2:
        raise ValueError("need v >= 2")
    return _table.count(v, v)


def _iter_part_tuples(v: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing part tuples, largest first part descending."""
    stack: list[int] = []

    def gen(remaining: int, bound: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield tuple(reversed(stack))
            return
        for part in range(min(bound, remaining), 1, -1):
            if remaining - part == 1:
                continue
            stack.append(part)
            yield from gen(remaining - part, part)
            stack.pop()

    return gen(v, v)


def enumerate_feasible(v: int) -> Iterator[CycleType]:
    """Every partition of v into parts >= 2 exactly once, in stream order."""
    if v < 2:
        raise ValueError("need v >= 2")
    for parts in _iter_part_tuples(v):
        yield CycleType(parts)


def rank(ct: CycleType) -> int:
    """Position of ct inside enumerate_feasible(sum(ct.parts))."""
    w = ct.v
    bound = w
    r = 0
    for part in sorted(ct.parts, reverse=True):
        r += _table.count(w, bound) - _table.count(w, part)
        w -= part
        bound = part
    return r


def unrank(v: int, r: int) -> CycleType:
    """Inverse of rank: the r-th partition of v in stream order."""
    total = count_feasible(v)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} out of range for v={v}")
    parts: list[int] = []
    w, bound = v, v
    while w:
        # The r-th entry has largest part m where m is minimal with
        # N(w, m) >= N(w, bound) - r; binary search, N is monotone in m.
        target = _table.count(w, bound) - r
        lo, hi = 2, min(bound, w)
        while lo < hi:
            mid = (lo + hi) // 2
            if _table.count(w, mid) >= target:
                hi = mid
            else:
                lo = mid + 1
        m = lo
        r -= _table.count(w, bound) - _table.count(w, m)
        parts.append(m)
        w -= m
        bound = m
    return CycleType(tuple(reversed(parts)))


def sample_feasible(v: int, count: int, seed: int) -> list[CycleType]:
    """Uniform sample of ``count`` distinct cycle types of v, by rank.

    Deterministic for a fixed seed; asking for every type returns the
    whole population.
    """
    total = count_feasible(v)
    if count > total:
        raise ValueError(f"requested {count} of only {total} cycle types")
    rng = random.Random(seed)
    if total.bit_length() < 63:
        ranks = sorted(rng.sample(range(total), count))
    else:
        # random.sample cannot take a range longer than ssize_t; draw
        # ranks directly and reject duplicates (vanishingly rare here)
        chosen: set[int] = set()
        while len(chosen) < count:
            chosen.add(rng.randrange(total))
        ranks = sorted(chosen)
    return [unrank(v, r) for r in ranks]


_ITEM_RE = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_cycle_type(text: str) -> CycleType:
    """Parse '2^4,3' or '[2, 2, 7]' style cycle type text."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    if not body:
        raise ValueError("empty cycle type")
    parts: list[int] = []
    for item in body.split(","):
        m = _ITEM_RE.match(item.strip())
        if not m:
            raise ValueError(f"bad cycle type item {item.strip()!r}")
        c = int(m.group(1))
        mult = int(m.group(2)) if m.group(2) else 1
        if mult < 1:
            raise ValueError("multiplicities must be positive")
        parts.extend([c] * mult)
    return CycleType.of(parts)


def format_cycle_type(ct: CycleType) -> str:
    """Canonical text form, exponents for repeated parts: '2^4,3'."""
    out: list[str] = []
    i = 0
    parts = ct.parts
    while i < len(parts):
        j = i
        while j < len(parts) and parts[j] == parts[i]:
            j += 1
        out.append(str(parts[i]) if j - i == 1 else f"{parts[i]}^{j - i}")
        i = j
    return ",".join(out)
