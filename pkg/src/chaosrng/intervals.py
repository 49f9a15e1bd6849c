"""Disjoint unions of subintervals of the unit interval.

An :class:`IntervalSet` is the workhorse representation for bit-generation
partitions and their refinements: a sorted list of pairwise-disjoint open
intervals ``(lo, hi)`` inside ``[0, 1]``.  Touching intervals are merged on
construction, so the representation is canonical and two sets describing the
same region compare equal.
"""
from __future__ import annotations

import bisect
from typing import Iterable, Iterator, Sequence


class IntervalSet:
    """Sorted disjoint union of subintervals of [0, 1].

    Immutable after construction.  Intervals are normalized: clipped to
    [0, 1], sorted ascending, degenerate pieces dropped, and overlapping or
    touching pieces merged.
    """

    __slots__ = ("_intervals", "_los", "_his")

    def __init__(self, intervals: Iterable[tuple[float, float]] = ()):
        self._intervals = _normalize(intervals)
        self._los = [a for a, _ in self._intervals]
        self._his = [b for _, b in self._intervals]

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return self._intervals

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self._intervals)

    @property
    def is_empty(self) -> bool:
        return not self._intervals

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        body = " ∪ ".join(f"({a:.6g}, {b:.6g})" for a, b in self._intervals)
        return f"IntervalSet[{body or '∅'}]"

    def contains(self, x: float) -> bool:
        """Membership with the left-cell tie convention: (lo, hi]."""
        i = bisect.bisect_left(self._his, x)
        return i < len(self._intervals) and self._los[i] < x <= self._his[i]

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self._intervals, other._intervals
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._intervals + other._intervals)

    def complement(self, lo: float = 0.0, hi: float = 1.0) -> "IntervalSet":
        """Complement within (lo, hi)."""
        out = []
        cursor = lo
        for a, b in self._intervals:
            if cursor < a:
                out.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < hi:
            out.append((cursor, hi))
        return IntervalSet(out)

    def min_width(self) -> float:
        """Width of the narrowest component (inf when empty)."""
        if not self._intervals:
            return float("inf")
        return min(b - a for a, b in self._intervals)


def _normalize(
    intervals: Iterable[tuple[float, float]],
) -> tuple[tuple[float, float], ...]:
    clipped = []
    for a, b in intervals:
        a = max(0.0, min(1.0, float(a)))
        b = max(0.0, min(1.0, float(b)))
        if a < b:
            clipped.append((a, b))
    clipped.sort()
    merged: list[tuple[float, float]] = []
    for a, b in clipped:
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return tuple(merged)


def disjoint(sets: Sequence[IntervalSet], tol: float = 0.0) -> bool:
    """True when no two sets overlap by more than `tol` per overlap."""
    pieces = sorted((a, b) for s in sets for a, b in s)
    for (a1, b1), (a2, _) in zip(pieces, pieces[1:]):
        if a2 < b1 - tol:
            return False
    return True
