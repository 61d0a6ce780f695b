import math

import numpy as np
import pytest

from levykit.errors import DomainError
from levykit.profiles import RadialProfile


def test_power_evaluation_and_exponent():
    w = RadialProfile.power(0.5, scale=2.0)
    assert w(4.0) == pytest.approx(4.0)
    assert w.exponent == 0.5
    r = np.array([1.0, 9.0])
    np.testing.assert_allclose(w(r), [2.0, 6.0])


def test_power_needs_positive_scale():
    with pytest.raises(DomainError):
        RadialProfile.power(1.0, scale=0.0)


def test_rejects_nonpositive_argument():
    w = RadialProfile.power(1.0)
    with pytest.raises(DomainError):
        w(0.0)
    with pytest.raises(DomainError):
        w(np.array([1.0, -2.0]))


def test_power_inverse_roundtrip():
    w = RadialProfile.power(0.75, scale=3.0)
    for t in (0.1, 1.0, 57.0):
        assert w(w.inverse(t)) == pytest.approx(t, rel=1e-12)


def test_scaled_profile():
    w = RadialProfile.power(2.0)
    v = w.scaled(5.0)
    assert v(3.0) == pytest.approx(45.0)
    assert v.exponent == 2.0
    assert v(v.inverse(7.0)) == pytest.approx(7.0, rel=1e-12)


def test_from_callable_and_generic_inverse():
    w = RadialProfile.from_callable(lambda r: r + np.sqrt(r), name="mix")
    # no closed-form inverse: bisection in log r
    for t in (0.5, 2.0, 40.0):
        assert w(w.inverse(t)) == pytest.approx(t, rel=1e-8)


def test_from_table_interpolates_loglog():
    r = np.array([1.0, 2.0, 4.0, 8.0])
    w = RadialProfile.from_table(r, r ** 1.5)
    # log-log linear interpolation is exact for a pure power
    assert w(3.0) == pytest.approx(3.0 ** 1.5, rel=1e-12)
    # end-slope extrapolation keeps the power law going
    assert w(16.0) == pytest.approx(16.0 ** 1.5, rel=1e-12)
    assert w(0.5) == pytest.approx(0.5 ** 1.5, rel=1e-12)


def test_from_table_validation():
    with pytest.raises(DomainError):
        RadialProfile.from_table(np.array([1.0]), np.array([1.0]))
    with pytest.raises(DomainError):
        RadialProfile.from_table(np.array([1.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        RadialProfile.from_table(np.array([1.0, 2.0]), np.array([1.0, -1.0]))


def test_is_nondecreasing():
    assert RadialProfile.power(0.5).is_nondecreasing()
    assert not RadialProfile.power(-0.5).is_nondecreasing()


def test_left_inverse_of_flat_stretch():
    # piecewise profile flat on [1, 2]: left inverse picks the lower end
    def fn(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < 1.0, r, np.where(r < 2.0, 1.0, r - 1.0))

    w = RadialProfile.from_callable(fn, name="flat-step")
    assert w.inverse(1.0, side="left") == pytest.approx(1.0, abs=1e-6)
    assert w.inverse(1.0, side="right") == pytest.approx(2.0, abs=1e-6)
