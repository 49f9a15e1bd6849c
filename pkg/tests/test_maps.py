"""Map models: evaluation, branch decomposition, preimages, config loading."""
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import chaosrng as cr
from chaosrng.intervals import IntervalSet
from chaosrng.maps import DomainError, MapConfigError, branch_boundary, slope

XB = 1.0 / math.sqrt(3.0)

interior = st.floats(min_value=1e-6, max_value=1.0 - 1e-6, allow_nan=False)


def test_cubic_known_values(cubic):
    assert abs(cubic(XB) - 1.0) < 1e-12
    # peak location and a fixed interior value of (3*sqrt(3)/2) x (1 - x^2)
    assert abs(cubic(0.5) - 0.9742785792574935) < 1e-12
    assert abs(branch_boundary() - XB) < 1e-15


def test_eval_domain_and_clamp(cubic):
    with pytest.raises(DomainError):
        cubic(0.0)
    with pytest.raises(DomainError):
        cubic(1.0)
    with pytest.raises(DomainError):
        cr.eval_map(cubic, np.array([0.5, 1.5]))
    # at the maximum the output clamps strictly inside (0,1)
    assert 0.0 < cubic(XB) < 1.0


def test_branch_structure(cubic, tent, bernoulli, logistic):
    for m, cuts in ((cubic, [XB]), (tent, [0.5]), (logistic, [0.5]), (bernoulli, [0.5])):
        assert len(m.branches) == 2
        assert m.branches[0].hi == pytest.approx(cuts[0])
        assert m.branches[1].lo == pytest.approx(cuts[0])
    assert cubic.branches[0].increasing and not cubic.branches[1].increasing
    assert bernoulli.branches[0].increasing and bernoulli.branches[1].increasing


@given(interior)
def test_tent_preimages_closed_form(y):
    m = cr.tent_map()
    roots = cr.preimages(m, y)
    expect = sorted({y / 2.0, 1.0 - y / 2.0})
    assert len(roots) == len(expect)
    for r, e in zip(roots, expect):
        assert abs(r - e) < 1e-12


@given(interior)
def test_logistic_preimages_closed_form(y):
    m = cr.logistic_map()
    roots = cr.preimages(m, y)
    s = math.sqrt(1.0 - y)
    expect = sorted({(1.0 - s) / 2.0, (1.0 + s) / 2.0})
    assert len(roots) == len(expect)
    for r, e in zip(roots, expect):
        assert abs(r - e) < 1e-9


@given(interior)
def test_preimages_invert_the_map(y):
    m = cr.cubic_sample_map()
    roots = cr.preimages(m, y)
    assert 1 <= len(roots) <= 2
    for r in roots:
        assert abs(m(r) - y) < 1e-9


def test_preimage_of_set_vs_pointwise(cubic):
    target = IntervalSet([(0.2, 0.4), (0.7, 0.8)])
    pre = cr.preimage_of_set(cubic, target)
    xs = np.linspace(1e-4, 1.0 - 1e-4, 4001)
    for x in xs:
        in_pre = pre.contains(x)
        in_target = target.contains(cubic(float(x)))
        # agreement away from cell boundaries (ties resolve by convention)
        near_edge = any(abs(x - e) < 1e-6 for a, b in pre for e in (a, b))
        if not near_edge:
            assert in_pre == in_target


def test_preimage_measure_for_linear_maps(tent, bernoulli):
    target = IntervalSet([(0.1, 0.6)])
    # both slope-2 maps halve measure per branch, two branches: preserved
    for m in (tent, bernoulli):
        assert cr.preimage_of_set(m, target).measure == pytest.approx(0.5, abs=1e-12)


def test_full_interval_preimage_is_full(cubic, logistic):
    full = IntervalSet([(0.0, 1.0)])
    for m in (cubic, logistic):
        assert cr.preimage_of_set(m, full).measure == pytest.approx(1.0, abs=1e-7)


def test_slope_stencil_clipping(tent):
    # centered stencil across the kink would average the two slopes away
    s = slope(tent, np.array([0.5]), 1e-3, lo_bound=0.0, hi_bound=0.5)
    assert s[0] == pytest.approx(2.0, abs=1e-9)
    s = slope(tent, np.array([0.5]), 1e-3, lo_bound=0.5, hi_bound=1.0)
    assert s[0] == pytest.approx(-2.0, abs=1e-9)


def test_polynomial_map_matches_builtin():
    m = cr.polynomial_map([0.0, 4.0, -4.0], critical_points=[0.5], name="logi2")
    ref = cr.logistic_map()
    xs = np.linspace(0.01, 0.99, 101)
    assert np.allclose(cr.eval_map(m, xs), cr.eval_map(ref, xs), atol=1e-12)


def test_polynomial_requires_declared_critical_points():
    with pytest.raises(MapConfigError):
        cr.map_from_config({"type": "polynomial", "coefficients": [0, 4, -4]})


def test_piecewise_linear_map_and_errors():
    m = cr.piecewise_linear_map([0.0, 0.25, 1.0], [0.0, 1.0, 0.0])
    assert m(0.125) == pytest.approx(0.5)
    assert len(m.branches) == 2
    with pytest.raises(MapConfigError):
        cr.piecewise_linear_map([0.0, 0.5], [0.2, 0.2, 0.2])
    with pytest.raises(MapConfigError):
        cr.piecewise_linear_map([0.1, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        cr.piecewise_linear_map([0.0, 0.5, 1.0], [0.0, 0.0, 1.0])  # flat segment


def test_map_config_roundtrip(tmp_path):
    cfg = {"type": "builtin", "name": "tent"}
    p = tmp_path / "map.json"
    p.write_text(json.dumps(cfg))
    m = cr.load_map(str(p))
    assert m.name == "tent"
    assert m.config == cfg
    with pytest.raises(MapConfigError):
        cr.map_from_config({"type": "builtin", "name": "nope"})
    with pytest.raises(MapConfigError):
        cr.map_from_config({"type": "spline"})


def test_branch_inverse_consistency(cubic):
    for br in cubic.branches:
        ys = np.linspace(br.image[0] + 1e-9, br.image[1] - 1e-9, 100)
        xs = np.asarray(br.inverse(ys))
        assert np.all((xs >= br.lo - 1e-12) & (xs <= br.hi + 1e-12))
        assert np.allclose(np.clip(cubic.raw_eval(xs), 0, 1), ys, atol=1e-9)
