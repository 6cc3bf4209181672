"""Free nilpotent group: increments, homogeneous norm, dilations."""

import numpy as np
import pytest

from jumprough import nilpotent as nil
from jumprough import tensor as ta


def random_group(dim, level, seed, scale=0.7):
    rng = np.random.default_rng(seed)
    x = ta.zero(dim, level)
    x.set_level(1, rng.normal(0, scale, dim))
    if level >= 2:
        A = rng.normal(0, scale, (dim, dim))
        x.set_level(2, A - A.T)
    return nil.exp(x)


def test_increment_identities():
    g = random_group(2, 2, 0)
    h = random_group(2, 2, 1)
    one = nil.unit(2, 2)
    np.testing.assert_allclose(nil.increment(g, g).value.data,
                               one.value.data, atol=1e-12)
    np.testing.assert_allclose(nil.increment(one, h).value.data,
                               h.value.data, atol=1e-14)


def test_chen_composition():
    for seed in range(5):
        g = random_group(3, 2, seed)
        h = random_group(3, 2, seed + 10)
        k = random_group(3, 2, seed + 20)
        lhs = nil.increment(g, h) @ nil.increment(h, k)
        rhs = nil.increment(g, k)
        np.testing.assert_allclose(lhs.value.data, rhs.value.data, atol=1e-12)


def test_group_axioms():
    g = random_group(2, 3, 3)
    inv = nil.inverse(g)
    np.testing.assert_allclose((g @ inv).value.data, nil.unit(2, 3).value.data,
                               atol=1e-12)
    np.testing.assert_allclose((inv @ g).value.data, nil.unit(2, 3).value.data,
                               atol=1e-12)


def test_cc_norm_examples():
    assert nil.cc_norm(nil.unit(2, 2)) == 0.0
    e1 = ta.zero(2, 2)
    e1.set_level(1, [1.0, 0.0])
    assert nil.cc_norm(nil.exp(nil.LieElement(e1))) == pytest.approx(1.0)
    comm = ta.zero(2, 2)
    comm.set_level(2, [[0.0, 1.0], [-1.0, 0.0]])  # [e1, e2]
    assert nil.cc_norm(nil.exp(nil.LieElement(comm))) == pytest.approx(
        2.0 ** 0.25)


def test_cc_dist_properties():
    g = random_group(2, 2, 4)
    h = random_group(2, 2, 5)
    k = random_group(2, 2, 6)
    # level-2 rounding enters through a square root, hence the 1e-7 slack
    assert nil.cc_dist(g, g) == pytest.approx(0.0, abs=1e-7)
    # left-invariance
    assert nil.cc_dist(k @ g, k @ h) == pytest.approx(nil.cc_dist(g, h),
                                                      abs=1e-7)
    # symmetry of the surrogate (log of the inverse is the negated log)
    assert nil.cc_dist(g, h) == pytest.approx(nil.cc_dist(h, g), abs=1e-7)


def test_dilate():
    g = random_group(2, 2, 7)
    np.testing.assert_allclose(nil.dilate(g, 1.0).value.data, g.value.data)
    np.testing.assert_allclose(nil.dilate(g, 0.0).value.data,
                               nil.unit(2, 2).value.data, atol=1e-15)
    for lam in (0.3, 2.0, -1.5):
        assert nil.cc_norm(nil.dilate(g, lam)) == pytest.approx(
            abs(lam) * nil.cc_norm(g), rel=1e-10)


def test_log_linear_point():
    x = random_group(2, 2, 8)
    y = random_group(2, 2, 9)
    np.testing.assert_allclose(nil.log_linear_point(x, y, 0.0).value.data,
                               x.value.data, atol=1e-12)
    np.testing.assert_allclose(nil.log_linear_point(x, y, 1.0).value.data,
                               y.value.data, atol=1e-12)
    with pytest.raises(ValueError):
        nil.log_linear_point(x, y, 1.5)


def test_log_linear_segment_subdivision():
    # traversal from the unit: gamma(s)^{-1} gamma(t) = exp((t-s) log y)
    y = random_group(2, 2, 10)
    one = nil.unit(2, 2)
    ly = ta.log_trunc(y.value)
    for s, t in [(0.0, 0.5), (0.25, 0.75), (0.1, 1.0)]:
        gs = nil.log_linear_point(one, y, s)
        gt = nil.log_linear_point(one, y, t)
        inc = nil.increment(gs, gt)
        expected = ta.exp_trunc((t - s) * ly)
        np.testing.assert_allclose(inc.value.data, expected.data, atol=1e-12)


def test_log_linear_midpoint_example():
    e1 = ta.zero(2, 2)
    e1.set_level(1, [1.0, 0.0])
    e2 = ta.zero(2, 2)
    e2.set_level(1, [0.0, 1.0])
    mid = nil.log_linear_point(nil.exp(nil.LieElement(e1)),
                               nil.exp(nil.LieElement(e2)), 0.5)
    expected = ta.exp_trunc(0.5 * e1 + 0.5 * e2)
    np.testing.assert_allclose(mid.value.data, expected.data, atol=1e-15)


def test_level2_log_antisymmetry():
    g = random_group(2, 2, 11)
    h = random_group(2, 2, 12)
    A = nil.log(g @ h).value.level_part(2)
    np.testing.assert_allclose(A, -A.T, atol=1e-12)


def test_group_element_validation():
    bad = ta.unit(2, 2)
    bad.data[bad.offsets[2] + 1] = 1.0
    with pytest.raises(ValueError):
        nil.GroupElement(bad)
    # unchecked fast path accepts anything with scalar part 1
    nil.GroupElement.unchecked(bad)


def test_lie_element_validation():
    sym = ta.zero(2, 2)
    sym.set_level(2, [[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        nil.LieElement(sym)
    with pytest.raises(ValueError):
        nil.LieElement(ta.unit(2, 2))
