import math

import numpy as np
import pytest

from levykit import symbols
from levykit.coeffs import CoefficientSpec
from levykit.errors import DomainError
from levykit.measures import (Anisotropic, IsotropicUnimodal, RadialAngular,
                              RadialStable, rescale)
from levykit.profiles import RadialProfile

CAUCHY = RadialStable(1, 1.0)
XI = 2.0 ** np.arange(-6, 7).astype(float)


def asymmetric_spec():
    return RadialAngular(1, RadialProfile.power(-1.5),
                         atoms=[(np.array([1.0]), 1.5),
                                (np.array([-1.0]), 0.5)], sigma=0.5)


def test_stable_constant_alpha_one():
    # Gamma(-1/2) = -2 sqrt(pi) makes K(1, 1) collapse to pi
    assert symbols.stable_constant(1, 1.0) == pytest.approx(math.pi,
                                                            rel=1e-14)


def test_chi_mode_thresholds():
    assert symbols.chi_mode(0.5) == "none"
    assert symbols.chi_mode(1.0) == "ball"
    assert symbols.chi_mode(1.5) == "all"


def test_cauchy_closed_form():
    got = symbols.psi(CAUCHY, XI)
    np.testing.assert_allclose(got.real, -2 * math.pi ** 2 * XI, rtol=1e-14)
    assert np.max(np.abs(got.imag)) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_quadrature_matches_closed_form(alpha):
    spec = RadialStable(1, alpha)
    want = symbols.closed_form(spec, XI)
    got = symbols.psi(spec, XI, method="quadrature")
    np.testing.assert_allclose(got.real, want.real, rtol=1e-6)


def test_anisotropic_splits_by_axis():
    spec = Anisotropic(2, 1.5, (1.0, 2.0))
    K = symbols.stable_constant(1, 1.5)
    xi = np.array([[0.3, 0.0], [0.0, 0.3], [0.3, 0.3]])
    got = symbols.psi(spec, xi)
    w = (2 * math.pi * 0.3) ** 1.5
    want = -K * np.array([1.0 * w, 2.0 * w, 3.0 * w])
    np.testing.assert_allclose(got.real, want, rtol=1e-12)


def test_symbol_basic_identities():
    for spec in (CAUCHY, asymmetric_spec(),
                 IsotropicUnimodal(1, RadialProfile.power(0.75), 1.0)):
        v0 = symbols.psi(spec, np.array([0.0]))
        assert abs(complex(v0[0])) < 1e-12
        v = symbols.psi(spec, XI)
        vneg = symbols.psi(spec, -XI)
        np.testing.assert_allclose(vneg, np.conj(v), rtol=1e-9, atol=1e-12)
        assert np.all(v.real <= 1e-12)


def test_asymmetric_symbol_has_imaginary_part():
    v = symbols.psi(asymmetric_spec(), np.array([1.0]))
    assert abs(v[0].imag) > 1e-3


def test_grid_method_matches_scalar_quadrature():
    g = np.fft.fftfreq(512, d=0.125)
    for spec in (RadialStable(1, 0.75), asymmetric_spec()):
        a = symbols.psi(spec, g, method="grid")
        b = symbols.psi(spec, g, method="quadrature")
        scale = np.max(np.abs(b))
        # two independent quadrature ladders; agreement is limited by the
        # coarser of the two, not machine precision
        assert np.max(np.abs(a - b)) / scale < 1e-5


def test_rescaled_symbol_scaling_identity():
    # psi_R(xi) = w(R) psi(xi / R) with unit tail normalization
    R = 4.0
    spec_R = rescale(CAUCHY, R)
    wR = 1.0 / float(CAUCHY.tail(R))
    got = symbols.psi(spec_R, XI)
    want = wR * symbols.psi(CAUCHY, XI / R)
    np.testing.assert_allclose(got, want, rtol=1e-10)


def test_psi_weighted_reduces_to_psi():
    got = symbols.psi_weighted(CAUCHY, XI, lambda r: np.ones_like(r))
    want = symbols.psi(CAUCHY, XI)
    np.testing.assert_allclose(got, want, rtol=1e-8)


def test_psi_weighted_scales_mass():
    got = symbols.psi_weighted(CAUCHY, XI, lambda r: 3.0 * np.ones_like(r))
    want = 3.0 * symbols.psi(CAUCHY, XI)
    np.testing.assert_allclose(got, want, rtol=1e-8)


def test_time_avg_separates():
    coeff = CoefficientSpec.time_separable(lambda t: 1.0 + t,
                                           bounds=(1.0, 2.0))
    got = symbols.psi_time_avg(CAUCHY, coeff, 0.0, 1.0, XI)
    # int_0^1 (1 + t) dt = 3/2
    want = 1.5 * symbols.psi(CAUCHY, XI)
    np.testing.assert_allclose(got, want, rtol=1e-9)


def test_time_avg_unit_coeff():
    got = symbols.psi_time_avg(CAUCHY, None, 0.25, 0.75, XI)
    np.testing.assert_allclose(got, 0.5 * symbols.psi(CAUCHY, XI),
                               rtol=1e-12)


def test_fractional_interpolates():
    v1 = symbols.psi_fractional(CAUCHY, 1.0, XI)
    np.testing.assert_allclose(v1, symbols.psi(CAUCHY, XI), rtol=1e-12)
    vh = symbols.psi_fractional(CAUCHY, 0.5, XI)
    np.testing.assert_allclose(vh.real,
                               -np.sqrt(2 * math.pi ** 2 * XI), rtol=1e-12)
    with pytest.raises(DomainError):
        symbols.psi_fractional(CAUCHY, 1.5, XI)
    with pytest.raises(DomainError):
        symbols.psi_fractional(CAUCHY, 0.0, XI)


def test_symbol_bounds_certify_ellipticity():
    rep = symbols.verify_symbol_bounds(CAUCHY)
    assert rep.lower_constant > 0
    assert math.isfinite(rep.upper_constant)
    assert rep.upper_constant >= rep.lower_constant
    # scale-free measure: the constants repeat at every R, witnesses exist
    assert rep.upper_witness is not None


def test_symbol_bounds_with_coefficient():
    coeff = CoefficientSpec.constant(0.5)
    rep = symbols.verify_symbol_bounds(CAUCHY, coeff=coeff)
    # lower constant is normalized by k, so halving the mass keeps it
    base = symbols.verify_symbol_bounds(CAUCHY)
    assert rep.lower_constant == pytest.approx(base.lower_constant, rel=1e-6)
