"""Bit-generation partitions and their depth-N refinements.

The unit interval is split into S(0) and S(1); the emitted bit is the index
of the set containing the current state.  The depth-N refinement maps every
N-bit word to the set of initial states that generate exactly that word,
computed exactly (up to root tolerance) with interval algebra:

    cell(i_1 .. i_{N+1}) = S(i_1)  intersect  M^{-1}( cell(i_2 .. i_{N+1}) )
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .intervals import IntervalSet, disjoint
from .maps import MapModel, preimage_of_set

DEFAULT_MAX_DEPTH = 20


class RefinementError(ValueError):
    """Refinement refused (depth beyond the configured cap or resolution)."""


class PartitionInvariantError(AssertionError):
    """A structural invariant of a partition failed."""


@dataclass(frozen=True)
class SymbolPartition:
    """The two bit-generation sets S(0) and S(1)."""

    s0: IntervalSet
    s1: IntervalSet

    @classmethod
    def from_s0(cls, s0: IntervalSet) -> "SymbolPartition":
        return cls(s0=s0, s1=s0.complement())

    @classmethod
    def from_pairs(cls, pairs, s1_pairs=None) -> "SymbolPartition":
        s0 = IntervalSet(pairs)
        if s1_pairs is None:
            return cls.from_s0(s0)
        return cls(s0=s0, s1=IntervalSet(s1_pairs))

    def __getitem__(self, bit: int | str) -> IntervalSet:
        return self.s0 if int(bit) == 0 else self.s1

    def validate(self) -> None:
        if not self.s0.intersect(self.s1).measure < 1e-12:
            raise PartitionInvariantError("S(0) and S(1) overlap")
        total = self.s0.measure + self.s1.measure
        if abs(total - 1.0) > 1e-9:
            raise PartitionInvariantError(f"partition measures sum to {total!r}, not 1")

    def symbol_of(self, x: float) -> int:
        """0 or 1 with the left-cell tie convention for boundary points."""
        return 0 if self.s0.contains(x) else 1


def symmetric_partition() -> SymbolPartition:
    return SymbolPartition.from_s0(IntervalSet([(0.0, 0.5)]))


@dataclass(frozen=True)
class RefinedPartition:
    """Mapping from every N-bit word to its initial-state interval set.

    Empty words stay in the table (with empty sets) so entropy sums can run
    over the full 2^N index space.
    """

    depth: int
    cells: dict  # word string "010..." -> IntervalSet

    def words(self) -> list[str]:
        return sorted(self.cells)

    def nonempty_count(self) -> int:
        return sum(1 for c in self.cells.values() if not c.is_empty)

    def min_cell_width(self) -> float:
        return min(c.min_width() for c in self.cells.values())

    def word_of(self, x: float) -> str | None:
        for w, c in self.cells.items():
            if c.contains(x):
                return w
        return None

    def validate(self, parent: "RefinedPartition | None" = None) -> None:
        if len(self.cells) != 2**self.depth:
            raise PartitionInvariantError("cell table must cover the full 2^N index space")
        if not disjoint(list(self.cells.values()), tol=1e-12):
            raise PartitionInvariantError("refined cells overlap")
        total = sum(c.measure for c in self.cells.values())
        if abs(total - 1.0) > 1e-8:
            raise PartitionInvariantError(f"cell measures sum to {total!r}, not 1")
        if parent is not None:
            if parent.depth != self.depth - 1:
                raise PartitionInvariantError("parent must be one level shallower")
            for w, cell in parent.cells.items():
                merged = self.cells[w + "0"].union(self.cells[w + "1"])
                if abs(merged.measure - cell.measure) > 1e-9 or merged.intersect(cell).measure < cell.measure - 1e-9:
                    raise PartitionInvariantError(f"children of {w!r} do not reassemble their parent cell")

    def to_json(self, path: str | Path) -> None:
        payload = {w: [list(iv) for iv in c] for w, c in sorted(self.cells.items())}
        Path(path).write_text(json.dumps(payload))


def depth_one(s: SymbolPartition) -> RefinedPartition:
    return RefinedPartition(depth=1, cells={"0": s.s0, "1": s.s1})


def refine_once(m: MapModel, s: SymbolPartition, p: RefinedPartition) -> RefinedPartition:
    """Depth N -> N+1: prepend each possible first bit to every word."""
    pre = {w: preimage_of_set(m, cell) for w, cell in p.cells.items()}
    cells = {}
    for first in "01":
        base = s[first]
        for w, pw in pre.items():
            cells[first + w] = base.intersect(pw)
    return RefinedPartition(depth=p.depth + 1, cells=cells)


def refine(
    m: MapModel,
    s: SymbolPartition,
    N: int,
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
    min_cell_width: float | None = None,
) -> RefinedPartition:
    """Depth-N refinement of the bit-generation partition.

    `min_cell_width`, when given, aborts once the narrowest nonempty cell
    component falls below it (cells finer than the density grid make the
    later integration meaningless).
    """
    if N < 1:
        raise RefinementError("depth must be at least 1")
    if N > max_depth:
        raise RefinementError(
            f"depth {N} exceeds the cap {max_depth}: cell widths shrink geometrically and "
            "drop below any usable grid resolution"
        )
    s.validate()
    p = depth_one(s)
    for _ in range(N - 1):
        p = refine_once(m, s, p)
        if min_cell_width is not None and p.min_cell_width() < min_cell_width:
            raise RefinementError(
                f"narrowest cell at depth {p.depth} is {p.min_cell_width():.3e}, "
                f"below the resolution floor {min_cell_width:.3e}"
            )
    return p


def refinement_ladder(m: MapModel, s: SymbolPartition, N: int, **kw) -> list[RefinedPartition]:
    """All refinements up to depth N (reusing each level to build the next)."""
    ladder = [depth_one(s)]
    refine(m, s, 1, **kw)  # argument validation only
    for _ in range(N - 1):
        ladder.append(refine_once(m, s, ladder[-1]))
    return ladder


def partition_from_config(cfg: dict) -> SymbolPartition:
    """Config: {"s0": [[lo,hi],...], optional "s1": [[lo,hi],...]}."""
    if "s0" not in cfg:
        raise ValueError("partition config needs 's0' as a list of [lo, hi] pairs")
    s1 = cfg.get("s1")
    return SymbolPartition.from_pairs([tuple(p) for p in cfg["s0"]], None if s1 is None else [tuple(p) for p in s1])
