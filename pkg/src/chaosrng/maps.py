"""One-dimensional chaotic maps on the open unit interval.

A map model bundles the transformation function x -> M(x) with its
decomposition into strictly monotone branches.  Each branch knows its own
inverse, which is what makes exact interval preimages (and hence symbolic
partition refinement) possible.

Built-ins:

* ``cubic_sample`` : M(x) = (3*sqrt(3)/2) * x * (1 - x^2), maximum at 1/sqrt(3)
* ``tent``         : M(x) = 1 - |1 - 2x|
* ``bernoulli``    : M(x) = 2x mod 1
* ``logistic``     : M(x) = 4x(1 - x)

Custom maps come from a JSON config (polynomial coefficients with declared
critical points, or piecewise-linear breakpoint/value lists).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .intervals import IntervalSet

#: Map outputs are clamped to [EPS, 1-EPS] so the domain stays the open
#: unit interval even at the maximum point where M(x) = 1.
EPS = 1e-15

_BISECT_ITER = 90


class DomainError(ValueError):
    """Argument outside the open unit interval."""


@dataclass(frozen=True)
class Branch:
    """A maximal strictly monotone piece of a map.

    ``inverse`` maps any point of the branch image back to its unique
    preimage inside (lo, hi); it accepts scalars or numpy arrays.
    """

    lo: float
    hi: float
    increasing: bool
    inverse: Callable[[np.ndarray | float], np.ndarray | float]
    image: tuple[float, float]

    @property
    def direction(self) -> str:
        return "increasing" if self.increasing else "decreasing"

    def image_contains(self, y: float) -> bool:
        return self.image[0] <= y <= self.image[1]


@dataclass(frozen=True, eq=False)
class MapModel:
    """Immutable map on (0,1) with its monotone-branch decomposition."""

    name: str
    raw_eval: Callable[[np.ndarray | float], np.ndarray | float]
    branches: tuple[Branch, ...]
    config: dict = field(default_factory=dict)

    def __call__(self, x):
        return eval_map(self, x)


def eval_map(m: MapModel, x):
    """Evaluate M(x), clamping the result into [EPS, 1-EPS].

    Accepts scalars or arrays; raises :class:`DomainError` outside (0,1).
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise DomainError(f"map argument outside (0,1): {x!r}")
    y = np.clip(m.raw_eval(arr), EPS, 1.0 - EPS)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(y)
    return y


def preimages(m: MapModel, y: float) -> list[float]:
    """All x in (0,1) with M(x) = y, sorted ascending.

    One candidate per branch whose image contains y; near-duplicate roots
    from branches meeting at a shared extremum are merged.
    """
    if not 0.0 < y < 1.0:
        raise DomainError(f"target outside (0,1): {y!r}")
    roots: list[float] = []
    for br in m.branches:
        if br.image_contains(y):
            roots.append(float(br.inverse(y)))
    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > 1e-9:
            out.append(r)
    return out


def preimage_of_set(m: MapModel, s: IntervalSet) -> IntervalSet:
    """{x : M(x) in s} as a normalized interval set.

    Computed branch by branch: clip each target interval to the branch
    image, pull the endpoints back through the branch inverse.
    """
    pieces: list[tuple[float, float]] = []
    for br in m.branches:
        ylo, yhi = br.image
        clipped = [
            (max(a, ylo), min(b, yhi)) for a, b in s if max(a, ylo) < min(b, yhi)
        ]
        if not clipped:
            continue
        ys = np.array(clipped, dtype=float)
        xs = np.asarray(br.inverse(ys))
        for x0, x1 in xs:
            lo, hi = (x0, x1) if br.increasing else (x1, x0)
            # near a critical value the map is flat to float precision, so
            # the inverse can stop ~1e-8 short of the branch edge; snap
            if lo - br.lo < 2e-8:
                lo = br.lo
            if br.hi - hi < 2e-8:
                hi = br.hi
            pieces.append((max(lo, br.lo), min(hi, br.hi)))
    return IntervalSet(pieces)


def slope(m: MapModel, x, h: float, lo_bound: float = 0.0, hi_bound: float = 1.0) -> np.ndarray:
    """Centered finite-difference derivative with the stencil clipped to
    [lo_bound, hi_bound] (one-sided at the edges)."""
    x = np.asarray(x, dtype=float)
    lo = np.maximum(x - h, max(lo_bound, EPS))
    hi = np.minimum(x + h, min(hi_bound, 1.0 - EPS))
    return (np.asarray(m.raw_eval(hi)) - np.asarray(m.raw_eval(lo))) / (hi - lo)


# ---------------------------------------------------------------------------
# Branch construction


def _bisect_inverse(f, lo: float, hi: float, increasing: bool):
    """Derivative-free inverse of a strictly monotone f on [lo, hi]."""

    def inverse(y):
        y_arr = np.asarray(y, dtype=float)
        a = np.full(y_arr.shape, lo)
        b = np.full(y_arr.shape, hi)
        for _ in range(_BISECT_ITER):
            mid = 0.5 * (a + b)
            go_right = np.asarray(f(mid)) < y_arr if increasing else np.asarray(f(mid)) > y_arr
            a = np.where(go_right, mid, a)
            b = np.where(go_right, b, mid)
        x = 0.5 * (a + b)
        if np.ndim(y) == 0:
            return float(x)
        return x

    return inverse


def _smooth_branches(f, cut_points: Sequence[float]) -> tuple[Branch, ...]:
    """Split (0,1) at the declared critical points into monotone branches."""
    edges = [0.0, *sorted(cut_points), 1.0]
    branches = []
    for lo, hi in zip(edges, edges[1:]):
        probe_lo = lo + 1e-9 * (hi - lo)
        probe_hi = hi - 1e-9 * (hi - lo)
        increasing = f(probe_hi) > f(probe_lo)
        vals = sorted((float(np.clip(f(lo), 0.0, 1.0)), float(np.clip(f(hi), 0.0, 1.0))))
        # float evaluation at a critical point can miss an exact extremum of
        # 0 or 1 by a few ulp, which bisection would turn into an O(1e-9)
        # endpoint gap; snap to the exact bound
        vals = [0.0 if v < 1e-12 else 1.0 if v > 1.0 - 1e-12 else v for v in vals]
        branches.append(
            Branch(
                lo=lo,
                hi=hi,
                increasing=bool(increasing),
                inverse=_bisect_inverse(f, lo, hi, bool(increasing)),
                image=(vals[0], vals[1]),
            )
        )
    return tuple(branches)


def _linear_branch(x0: float, x1: float, y0: float, y1: float) -> Branch:
    if y0 == y1:
        raise ValueError(f"flat segment on ({x0}, {x1}): map must be strictly monotone per branch")
    slope_ = (y1 - y0) / (x1 - x0)

    def inverse(y):
        x = x0 + (np.asarray(y, dtype=float) - y0) / slope_
        if np.ndim(y) == 0:
            return float(x)
        return x

    lo_img, hi_img = sorted((y0, y1))
    return Branch(
        lo=x0,
        hi=x1,
        increasing=slope_ > 0,
        inverse=inverse,
        image=(max(0.0, lo_img), min(1.0, hi_img)),
    )


# ---------------------------------------------------------------------------
# Built-in maps

_XB = 1.0 / math.sqrt(3.0)


def cubic_sample_map() -> MapModel:
    """The cubic map M(x) = (3*sqrt(3)/2) x (1 - x^2): two branches split at 1/sqrt(3)."""
    c = 1.5 * math.sqrt(3.0)

    def f(x):
        return c * x * (1.0 - x * x)

    return MapModel(
        name="cubic_sample",
        raw_eval=f,
        branches=_smooth_branches(f, [_XB]),
        config={"type": "builtin", "name": "cubic_sample"},
    )


def tent_map() -> MapModel:
    def f(x):
        return 1.0 - np.abs(1.0 - 2.0 * np.asarray(x, dtype=float))

    return MapModel(
        name="tent",
        raw_eval=f,
        branches=(_linear_branch(0.0, 0.5, 0.0, 1.0), _linear_branch(0.5, 1.0, 1.0, 0.0)),
        config={"type": "builtin", "name": "tent"},
    )


def bernoulli_map() -> MapModel:
    """Bernoulli shift 2x mod 1; discontinuous at 1/2, both branches slope 2."""

    def f(x):
        return np.mod(2.0 * np.asarray(x, dtype=float), 1.0)

    return MapModel(
        name="bernoulli",
        raw_eval=f,
        branches=(_linear_branch(0.0, 0.5, 0.0, 1.0), _linear_branch(0.5, 1.0, 0.0, 1.0)),
        config={"type": "builtin", "name": "bernoulli"},
    )


def logistic_map() -> MapModel:
    def f(x):
        x = np.asarray(x, dtype=float)
        return 4.0 * x * (1.0 - x)

    return MapModel(
        name="logistic",
        raw_eval=f,
        branches=_smooth_branches(f, [0.5]),
        config={"type": "builtin", "name": "logistic"},
    )


BUILTIN_MAPS: dict[str, Callable[[], MapModel]] = {
    "cubic_sample": cubic_sample_map,
    "tent": tent_map,
    "bernoulli": bernoulli_map,
    "logistic": logistic_map,
}


# ---------------------------------------------------------------------------
# Config-driven construction


class MapConfigError(ValueError):
    """Malformed or unsupported map configuration."""


def polynomial_map(coefficients: Sequence[float], critical_points: Sequence[float], name: str = "polynomial") -> MapModel:
    coeffs = [float(c) for c in coefficients]
    for cp in critical_points:
        if not 0.0 < cp < 1.0:
            raise MapConfigError(f"critical point outside (0,1): {cp}")

    def f(x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)

    return MapModel(
        name=name,
        raw_eval=f,
        branches=_smooth_branches(f, critical_points),
        config={"type": "polynomial", "coefficients": coeffs, "critical_points": list(critical_points)},
    )


def piecewise_linear_map(breakpoints: Sequence[float], values: Sequence[float], name: str = "piecewise_linear") -> MapModel:
    """Continuous piecewise-linear map through (breakpoints[i], values[i])."""
    xs = [float(x) for x in breakpoints]
    ys = [float(y) for y in values]
    if len(xs) != len(ys) or len(xs) < 2:
        raise MapConfigError("breakpoints and values must be equal-length lists (>= 2 entries)")
    if xs[0] != 0.0 or xs[-1] != 1.0 or any(a >= b for a, b in zip(xs, xs[1:])):
        raise MapConfigError("breakpoints must increase strictly from 0 to 1")
    if any(not 0.0 <= y <= 1.0 for y in ys):
        raise MapConfigError("values must lie in [0,1]")

    xs_arr = np.array(xs)
    ys_arr = np.array(ys)

    def f(x):
        return np.interp(np.asarray(x, dtype=float), xs_arr, ys_arr)

    branches = tuple(
        _linear_branch(xs[i], xs[i + 1], ys[i], ys[i + 1]) for i in range(len(xs) - 1)
    )
    return MapModel(
        name=name,
        raw_eval=f,
        branches=branches,
        config={"type": "piecewise_linear", "breakpoints": xs, "values": ys},
    )


def map_from_config(cfg: dict) -> MapModel:
    """Build a map from its JSON config dict.

    Schema: {"type": "builtin"|"polynomial"|"piecewise_linear",
             "name"/"coefficients"/"breakpoints", "critical_points": [...]}
    """
    kind = cfg.get("type")
    if kind == "builtin":
        name = cfg.get("name")
        if name not in BUILTIN_MAPS:
            raise MapConfigError(f"unknown builtin map {name!r}; choose from {sorted(BUILTIN_MAPS)}")
        return BUILTIN_MAPS[name]()
    if kind == "polynomial":
        if "coefficients" not in cfg:
            raise MapConfigError("polynomial map needs 'coefficients'")
        if "critical_points" not in cfg:
            raise MapConfigError("polynomial map needs 'critical_points' (declared, not inferred)")
        return polynomial_map(cfg["coefficients"], cfg["critical_points"], cfg.get("name", "polynomial"))
    if kind == "piecewise_linear":
        if "breakpoints" not in cfg or "values" not in cfg:
            raise MapConfigError("piecewise_linear map needs 'breakpoints' and 'values'")
        return piecewise_linear_map(cfg["breakpoints"], cfg["values"], cfg.get("name", "piecewise_linear"))
    raise MapConfigError(f"unknown map type {kind!r}")


def load_map(path: str) -> MapModel:
    with open(path) as fh:
        return map_from_config(json.load(fh))


def branch_boundary(name: str = "cubic_sample") -> float:
    """Abscissa of the cubic sample map's maximum, 1/sqrt(3)."""
    return _XB
