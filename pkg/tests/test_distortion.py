import numpy as np
import pytest
from hypothesis import given, strategies as st

from conic_mfbm import DistortionSpec, apply, distorted_expectation_sorted, dual
from conic_mfbm.distortion import apply_many, check_monotone

PHI_05 = 0.6914624612740131036  # mpmath
GRID = np.linspace(0.0, 1.0, 1000)
wangs = st.floats(-3, 3, allow_nan=False)


def test_identity():
    assert apply(DistortionSpec.identity(), 0.37) == 0.37


def test_wang_center():
    assert apply(DistortionSpec.wang(0.5), 0.5) == pytest.approx(PHI_05, abs=1e-15)


def test_wang_boundaries():
    d = DistortionSpec.wang(0.3)
    assert apply(d, 0.0) == 0.0
    assert apply(d, 1.0) == 1.0


def test_apply_domain():
    with pytest.raises(ValueError):
        apply(DistortionSpec.wang(0.1), 1.2)
    with pytest.raises(ValueError):
        apply_many(DistortionSpec.wang(0.1), [-0.1, 0.5])


def test_identity_is_wang_zero():
    a = apply_many(DistortionSpec.identity(), GRID)
    b = apply_many(DistortionSpec.wang(0.0), GRID)
    assert np.max(np.abs(a - b)) <= 1e-15


def test_dual_identity():
    assert dual(DistortionSpec.identity()) == DistortionSpec.identity()


def test_dual_wang_pointwise():
    d = DistortionSpec.wang(0.4)
    u = np.linspace(0.01, 0.99, 99)
    direct = 1.0 - apply_many(d, 1.0 - u)
    via_dual = apply_many(dual(d), u)
    assert np.max(np.abs(direct - via_dual)) <= 1e-12
    assert np.max(np.abs(via_dual - apply_many(DistortionSpec.wang(-0.4), u))) == 0.0


@given(wangs)
def test_dual_involution(g):
    d = DistortionSpec.wang(g)
    assert dual(dual(d)) == d


@given(wangs)
def test_monotone_on_grid(g):
    vals = apply_many(DistortionSpec.wang(g), GRID)
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] == 0.0 and vals[-1] == 1.0
    check_monotone(DistortionSpec.wang(g))


@given(st.floats(0, 3))
def test_wang_ordering(g):
    up = apply_many(DistortionSpec.wang(g), GRID)
    down = apply_many(DistortionSpec.wang(-g), GRID)
    assert np.all(up >= GRID) and np.all(down <= GRID)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_group_property(g1, g2):
    u = np.linspace(0.001, 0.999, 999)
    lhs = apply_many(DistortionSpec.wang(g1), apply_many(DistortionSpec.wang(g2), u))
    rhs = apply_many(DistortionSpec.wang(g1 + g2), u)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_lstat_single_atom():
    for d in (DistortionSpec.identity(), DistortionSpec.wang(0.7), DistortionSpec.wang(-2)):
        assert distorted_expectation_sorted([5.0], d) == pytest.approx(5.0, abs=1e-15)


def test_lstat_identity_mean():
    assert distorted_expectation_sorted([1, 2, 3], DistortionSpec.identity()) == pytest.approx(2.0)


def test_lstat_two_atoms():
    assert distorted_expectation_sorted([0, 10], DistortionSpec.wang(0.5)) == pytest.approx(
        10 * (1 - PHI_05), abs=1e-12)


def test_lstat_empty():
    with pytest.raises(ValueError):
        distorted_expectation_sorted([], DistortionSpec.identity())


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=200))
def test_lstat_identity_equals_sample_mean(xs):
    xs = sorted(xs)
    assert distorted_expectation_sorted(xs, DistortionSpec.identity()) == pytest.approx(
        np.mean(xs), abs=1e-12 * max(1.0, max(abs(x) for x in xs)))


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=200), st.floats(-50, 50), wangs)
def test_lstat_translation(xs, c, g):
    xs = np.sort(np.array(xs))
    d = DistortionSpec.wang(g)
    shifted = distorted_expectation_sorted(xs + c, d)
    assert shifted == pytest.approx(distorted_expectation_sorted(xs, d) + c, abs=1e-10)
