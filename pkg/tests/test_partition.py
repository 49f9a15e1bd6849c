"""Symbol partitions and depth-N refinements with exact interval oracles."""
import math

import numpy as np
import pytest

import chaosrng as cr
from chaosrng.intervals import IntervalSet
from chaosrng.partition import (
    PartitionInvariantError,
    RefinementError,
    SymbolPartition,
    depth_one,
    partition_from_config,
    refine,
    refinement_ladder,
)

XB = 1.0 / math.sqrt(3.0)


def test_from_s0_complements():
    s = SymbolPartition.from_s0(IntervalSet([(0.0, 0.3), (0.6, 0.8)]))
    s.validate()
    assert s.s1 == IntervalSet([(0.3, 0.6), (0.8, 1.0)])
    assert s[0].measure + s[1].measure == pytest.approx(1.0)


def test_symbol_of_ties():
    s = SymbolPartition.from_s0(IntervalSet([(0.0, 0.5)]))
    assert s.symbol_of(0.5) == 0  # boundary belongs to the left cell
    assert s.symbol_of(0.50000001) == 1
    assert s.symbol_of(0.1) == 0


def test_validate_rejects_overlap_and_gap():
    s = SymbolPartition(s0=IntervalSet([(0.0, 0.6)]), s1=IntervalSet([(0.4, 1.0)]))
    with pytest.raises(PartitionInvariantError):
        s.validate()
    s = SymbolPartition(s0=IntervalSet([(0.0, 0.4)]), s1=IntervalSet([(0.5, 1.0)]))
    with pytest.raises(PartitionInvariantError):
        s.validate()


def test_partition_from_config():
    s = partition_from_config({"s0": [[0.0, 0.25], [0.5, 0.75]]})
    assert s.s0.measure == pytest.approx(0.5)
    with pytest.raises(ValueError):
        partition_from_config({"s1": [[0.0, 0.5]]})


def test_depth_limits(cubic, branch_part):
    with pytest.raises(RefinementError):
        refine(cubic, branch_part, 0)
    with pytest.raises(RefinementError):
        refine(cubic, branch_part, 25)
    with pytest.raises(RefinementError):
        refine(cubic, branch_part, 10, min_cell_width=0.1)


def test_bernoulli_cells_are_binary_expansions(bernoulli, sym_part):
    # for 2x mod 1, the word w is the binary expansion: cell(w) = [0.w, 0.w + 2^-N]
    for N in (1, 3, 6):
        p = refine(bernoulli, sym_part, N)
        for w, cell in p.cells.items():
            lo = int(w, 2) / 2**N
            assert len(cell) == 1
            a, b = cell.intervals[0]
            assert a == pytest.approx(lo, abs=1e-9)
            assert b == pytest.approx(lo + 2.0**-N, abs=1e-9)


def test_tent_cells_are_dyadic(tent, sym_part):
    p = refine(tent, sym_part, 5)
    assert p.nonempty_count() == 32
    for cell in p.cells.values():
        assert len(cell) == 1
        a, b = cell.intervals[0]
        assert (b - a) == pytest.approx(2.0**-5, abs=1e-9)
        assert a * 32 == pytest.approx(round(a * 32), abs=1e-6)


def test_cubic_depth2_cut_points(cubic, branch_part):
    # the two new depth-2 boundaries are the preimages of the branch split
    p = refine(cubic, branch_part, 2)
    cuts = sorted(
        {round(e, 9) for c in p.cells.values() for a, b in c for e in (a, b)}
        - {0.0, 1.0, round(XB, 9)}
    )
    assert len(cuts) == 2
    x1, x2 = cuts
    assert abs(cubic(x1) - XB) < 1e-9
    assert abs(cubic(x2) - XB) < 1e-9
    assert x1 < XB < x2


def test_refinement_ladder_consistency(cubic, branch_part):
    ladder = refinement_ladder(cubic, branch_part, 6)
    assert [p.depth for p in ladder] == [1, 2, 3, 4, 5, 6]
    for parent, child in zip(ladder, ladder[1:]):
        child.validate(parent=parent)


def test_word_of_matches_iteration(cubic, branch_part):
    # the depth-N cell of x0 spells out the first N bits of the orbit
    N = 6
    p = refine(cubic, branch_part, N)
    rng = np.random.default_rng(7)
    for x0 in rng.uniform(0.01, 0.99, size=25):
        w = p.word_of(float(x0))
        x = float(x0)
        spelled = ""
        for _ in range(N):
            spelled += str(branch_part.symbol_of(x))
            x = cubic(x)
        # boundary-adjacent starts may legitimately disagree by tie rules
        if w is not None and min(abs(x0 - e) for c in p.cells.values() for a, b in c for e in (a, b)) > 1e-9:
            assert w == spelled


def test_validate_catches_corruption(cubic, branch_part):
    p = refine(cubic, branch_part, 3)
    broken = dict(p.cells)
    broken["000"] = IntervalSet()
    with pytest.raises(PartitionInvariantError):
        cr.RefinedPartition(depth=3, cells=broken).validate()
    with pytest.raises(PartitionInvariantError):
        cr.RefinedPartition(depth=2, cells=p.cells).validate()


def test_to_json(tmp_path, tent, sym_part):
    p = refine(tent, sym_part, 2)
    p.to_json(tmp_path / "cells.json")
    text = (tmp_path / "cells.json").read_text()
    assert '"00"' in text and '"11"' in text


def test_depth_one(sym_part):
    p = depth_one(sym_part)
    assert p.depth == 1
    assert p.cells["0"] == sym_part.s0
    assert p.cells["1"] == sym_part.s1
