"""Bit generation by map iteration, pattern counting, and Von Neumann extraction.

The generator is the empirical side of the analysis: it actually runs the
map and emits one bit per step from the partition membership of the state.
Sliding-window pattern frequencies over a long stream are the brute-force
oracle for the block probabilities computed from the density.

Dithered (grid) iteration is the default; raw floating-point iteration is
kept as a negative control because finite precision collapses it onto
periodic orbits.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .density import RNG_ALGORITHM, scaled_map_table
from .entropy import ProbabilityTable
from .maps import MapModel, eval_map
from .partition import SymbolPartition

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

DEFAULT_STREAM_L = 1 << 20

STREAM_MAGIC = b"CRBS"
STREAM_VERSION = 1


class InsufficientDataError(ValueError):
    """Stream too short for the requested pattern depth."""


@dataclass(frozen=True)
class BitstreamConfig:
    """How to run the generator: seeding, length, dither grid, start point."""

    seed: int
    length: int
    dither: bool = True
    L: int = DEFAULT_STREAM_L
    start: float | None = None  # explicit x_0; None = seeded-random

    def validate(self) -> None:
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if self.dither and self.L < 64:
            raise ValueError(f"dither grid L={self.L} too small; need at least 64")
        if self.start is not None and not 0.0 < self.start < 1.0:
            raise ValueError(f"start must lie in (0,1), got {self.start}")


if _HAVE_NUMBA:

    @njit(cache=True)
    def _digitized_bits(table, bit_of, noise, j0, L, out):  # pragma: no cover - jitted
        j = j0
        for n in range(out.shape[0]):
            out[n] = bit_of[j]
            v = int(np.floor(table[j] + noise[n]))
            if v < 1:
                v = 1
            elif v > L:
                v = L
            j = v


def _digitized_bits_py(table, bit_of, noise, j0, L, out):
    j = j0
    floor = np.floor
    for n in range(out.shape[0]):
        out[n] = bit_of[j]
        v = int(floor(table[j] + noise[n]))
        j = 1 if v < 1 else (L if v > L else v)


def _grid_bit_table(s: SymbolPartition, L: int) -> np.ndarray:
    """bit_of[j] for grid states j/L, j = 0..L (left-cell ties)."""
    grid = np.arange(L + 1) / L
    bits = np.ones(L + 1, dtype=np.uint8)
    for a, b in s.s0:
        bits[(grid > a) & (grid <= b)] = 0
    bits[0] = 0  # j = 0 only ever occurs as a start state
    return bits


def generate_bits(m: MapModel, s: SymbolPartition, cfg: BitstreamConfig) -> np.ndarray:
    """Binary sequence from iterating the map; uint8 array of 0/1.

    Dither on: the digitized grid recurrence (state stays on j/L).
    Dither off: raw float iteration - deterministic, and demonstrably
    degenerate over long runs.
    """
    cfg.validate()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    out = np.empty(cfg.length, dtype=np.uint8)
    if cfg.dither:
        L = cfg.L
        table = scaled_map_table(m, L)
        bit_of = _grid_bit_table(s, L)
        if cfg.start is not None:
            j0 = max(1, min(L, round(cfg.start * L)))
        else:
            j0 = int(rng.integers(1, L + 1))
        noise = rng.uniform(-1.0, 1.0, size=cfg.length)
        kernel = _digitized_bits if _HAVE_NUMBA else _digitized_bits_py
        kernel(table, bit_of, noise, j0, L, out)
        return out
    x = cfg.start if cfg.start is not None else float(rng.uniform(1e-6, 1.0 - 1e-6))
    for n in range(cfg.length):
        out[n] = s.symbol_of(x)
        x = eval_map(m, x)
    return out


def iterate_raw(m: MapModel, x0: float, steps: int) -> np.ndarray:
    """Raw float trajectory (the periodicity-hazard demonstration)."""
    xs = np.empty(steps + 1)
    xs[0] = x0
    x = x0
    for n in range(steps):
        x = eval_map(m, x)
        xs[n + 1] = x
    return xs


def empirical_pattern_probs(bits: np.ndarray, N: int) -> ProbabilityTable:
    """Sliding-window N-bit word frequencies; the brute-force P_N oracle."""
    bits = np.asarray(bits, dtype=np.int64)
    if len(bits) < 100 * 2**N:
        raise InsufficientDataError(
            f"need at least {100 * 2 ** N} bits for depth {N}, got {len(bits)}"
        )
    n_windows = len(bits) - N + 1
    acc = np.zeros(n_windows, dtype=np.int64)
    for k in range(N):
        acc = (acc << 1) | bits[k : k + n_windows]
    counts = np.bincount(acc, minlength=2**N)
    probs = {format(w, f"0{N}b"): counts[w] / n_windows for w in range(2**N)}
    table = ProbabilityTable(depth=N, probs=probs, meta={"n_bits": len(bits), "windows": n_windows})
    table.validate()
    return table


def total_variation(a: ProbabilityTable, b: ProbabilityTable) -> float:
    if a.depth != b.depth:
        raise ValueError("tables have different depths")
    return 0.5 * sum(abs(a.probs[w] - b.probs[w]) for w in a.probs)


def monobit_frequency(bits: np.ndarray) -> float:
    """Fraction of ones."""
    return float(np.mean(bits))


def von_neumann_extract(bits: np.ndarray) -> np.ndarray:
    """Pairwise debiasing: 01 -> 0, 10 -> 1, 00/11 discarded."""
    bits = np.asarray(bits, dtype=np.uint8)
    pairs = bits[: 2 * (len(bits) // 2)].reshape(-1, 2)
    keep = pairs[:, 0] != pairs[:, 1]
    return pairs[keep, 0].copy()


# ---------------------------------------------------------------------------
# Stream files: 16-byte binary header (magic, version, bit count) or ASCII.


def write_stream(path: str | Path, bits: np.ndarray) -> None:
    bits = np.asarray(bits, dtype=np.uint8)
    header = STREAM_MAGIC + struct.pack("<HHQ", STREAM_VERSION, 0, len(bits))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.packbits(bits, bitorder="little").tobytes())


def read_stream(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != STREAM_MAGIC:
        raise ValueError("not a bit-stream file (bad magic)")
    version, _, n_bits = struct.unpack("<HHQ", raw[4:16])
    if version != STREAM_VERSION:
        raise ValueError(f"unsupported stream version {version}")
    return np.unpackbits(np.frombuffer(raw[16:], dtype=np.uint8), bitorder="little")[:n_bits]


def write_stream_ascii(path: str | Path, bits: np.ndarray) -> None:
    body = "".join("1" if b else "0" for b in np.asarray(bits))
    Path(path).write_text(f"# bitstream v{STREAM_VERSION} n={len(body)} rng={RNG_ALGORITHM}\n{body}\n")


def read_stream_ascii(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    body = lines[1] if lines and lines[0].startswith("#") else lines[0]
    return np.frombuffer(body.encode(), dtype=np.uint8) - ord("0")
