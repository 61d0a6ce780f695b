import math

import numpy as np
import pytest

from levykit import density, measures, symbols
from levykit.errors import (DomainError, ExponentChoiceError,
                            GridTooSmallError)
from levykit.grid import SpectralGrid
from levykit.measures import (Anisotropic, IsotropicUnimodal, RadialAngular,
                              RadialStable)
from levykit.profiles import RadialProfile

CAUCHY = RadialStable(1, 1.0)
G1024 = SpectralGrid(1, 1024, 64.0)


def asymmetric_spec():
    return RadialAngular(1, RadialProfile.power(-1.5),
                         atoms=[(np.array([1.0]), 1.5),
                                (np.array([-1.0]), 0.5)], sigma=0.5)


def test_cauchy_density_closed_form():
    fld = density.transition_density(CAUCHY, t=1.0, grid=G1024)
    x = G1024.x_mesh()
    oracle = 1.0 / (np.pi ** 2 + x ** 2)
    assert float(np.max(np.abs(fld.values - oracle))) < 1e-3


def test_density_field_diagnostics():
    fld = density.transition_density(CAUCHY, t=1.0, grid=G1024)
    assert abs(fld.mass() - 1.0) < 1e-2
    assert fld.mass_defect < 1e-2
    assert fld.min_value > -1e-8
    assert fld.imag_residue < 1e-12
    assert 0.0 < fld.est_tail < 1.0


def test_scale_radius_cauchy():
    # tail 2/r gives w(r) = r/2, so a(1) = 2
    assert density.scale_radius(CAUCHY, 1.0) == pytest.approx(2.0)


def test_time_endpoint_guard():
    with pytest.raises(DomainError):
        density.transition_density(CAUCHY, s=1.0, t=1.0)
    with pytest.raises(DomainError):
        density.transition_density(CAUCHY, s=2.0, t=1.0)


def test_box_too_small_suggests_fix():
    with pytest.raises(GridTooSmallError) as ei:
        density.transition_density(CAUCHY, t=1.0,
                                   grid=SpectralGrid(1, 128, 8.0))
    assert ei.value.suggested_L >= 16.0


def test_nyquist_gate():
    # wide box, 16 nodes: the unit-time kernel is narrower than h
    with pytest.raises(GridTooSmallError):
        density.transition_density(CAUCHY, t=1.0,
                                   grid=SpectralGrid(1, 16, 64.0))


def test_generator_cosine_eigenfunction():
    xi0 = 0.125  # 16 / (2 L), an exact grid frequency
    x = G1024.x_mesh()
    u = np.cos(2 * np.pi * xi0 * x)
    got = density.apply_generator(CAUCHY, u, grid=G1024)
    np.testing.assert_allclose(got, -2 * np.pi ** 2 * xi0 * u, atol=1e-10)


def test_generator_requires_grid_for_arrays():
    with pytest.raises(DomainError):
        density.apply_generator(CAUCHY, np.zeros(8))


def test_chapman_kolmogorov():
    g = SpectralGrid(1, 1024, 64.0)
    p01 = density.transition_density(CAUCHY, s=0.0, t=1.0, grid=g)
    p12 = density.transition_density(CAUCHY, s=1.0, t=2.0, grid=g)
    p02 = density.transition_density(CAUCHY, s=0.0, t=2.0, grid=g)
    conv = density.convolve_fields(g, p01.values, p12.values)
    assert float(np.max(np.abs(conv - p02.values))) < 1e-6


def test_reflection_mirrors_density():
    spec = asymmetric_spec()
    g = SpectralGrid(1, 1024, 128.0)
    fld = density.transition_density(spec, t=1.0, grid=g, check=False,
                                     method="grid")
    rfl = density.transition_density(measures.reflect(spec), t=1.0, grid=g,
                                     check=False, method="grid")
    # node x_k maps to -x_k = x_{n-k} on the periodic axis
    mirrored = np.roll(fld.values[::-1], 1)
    assert float(np.max(np.abs(rfl.values - mirrored))) < 1e-10


def test_scaling_identity_stable():
    rep = density.check_scaling_identity(CAUCHY, t=1.0, grid=G1024)
    assert rep.R == pytest.approx(2.0)
    assert rep.discrepancy < 1e-12


def test_scaling_identity_anisotropic_2d():
    rep = density.check_scaling_identity(Anisotropic(2, 1.5, (1.0, 2.0)),
                                         t=1.0,
                                         grid=SpectralGrid(2, 256, 64.0))
    assert rep.discrepancy < 1e-3


def test_difference_kernel_value_and_uniformity():
    reps = [density.difference_kernel(CAUCHY, 0.4, np.array([z]))
            for z in (0.25, 1.0, 4.0)]
    for rep in reps:
        # frozen spectral value; the exact integral is 3.9103
        assert rep.J == pytest.approx(3.8793, abs=2e-3)
        assert rep.imag_residue < 1e-10
        zn = abs(float(rep.z[0]))
        wz = 1.0 / float(CAUCHY.tail(zn))
        assert rep.l1_value == pytest.approx(rep.J * wz ** 0.4, rel=1e-12)
    spread = max(r.J for r in reps) / min(r.J for r in reps) - 1.0
    assert spread < 1e-4


def test_difference_kernel_guards():
    with pytest.raises(DomainError):
        density.difference_kernel(CAUCHY, 0.4, np.array([0.0]))
    # sigma = 1 caps the exponent window at 1
    with pytest.raises(ExponentChoiceError):
        density.difference_kernel(CAUCHY, 1.2, np.array([1.0]))
    with pytest.raises(ExponentChoiceError):
        density.difference_kernel(CAUCHY, 0.0, np.array([1.0]))


def test_reconstruct_difference_constant():
    c, err = density.reconstruct_difference(CAUCHY, 0.4, np.array([1.0]))
    assert c * math.gamma(0.4) == pytest.approx(-1.0, abs=1e-3)
    assert err < 1e-3


def test_hormander_suite_finite():
    rep = density.hormander_suite(CAUCHY, s=0.5, t=1.0, b=0.25,
                                  shift=np.array([0.5]), bar_n=2048,
                                  bar_L=64.0)
    assert set(rep.part1) == {0.5, 1.0, 2.0, 4.0}
    assert all(math.isfinite(v) and v > 0 for v in rep.part1.values())
    assert math.isfinite(rep.part2) and rep.part2 > 0
    assert math.isfinite(rep.part3) and rep.part3 > 0
    assert rep.sup1 == max(rep.part1.values())


def test_hormander_time_guards():
    with pytest.raises(DomainError):
        density.hormander_suite(CAUCHY, s=0.0, t=1.0, parts=(1,))
    with pytest.raises(DomainError):
        density.hormander_suite(CAUCHY, s=0.5, t=1.0, b=0.75, parts=(3,))
    with pytest.raises(DomainError):
        density.hormander_suite(CAUCHY, s=0.5, t=1.0, n_time=8, parts=())


def test_weighted_generator_l1_finite():
    v = density.weighted_generator_l1(CAUCHY, CAUCHY, s=0.0, t=1.0,
                                      grid=SpectralGrid(1, 2048, 64.0))
    assert math.isfinite(v) and v > 0
    with pytest.raises(DomainError):
        density.weighted_generator_l1(CAUCHY, CAUCHY, eta=2)


def unimodal_1d():
    return IsotropicUnimodal(1, RadialProfile.power(0.75), 1.0)


def test_tail_envelope_branches():
    spec = unimodal_1d()
    r = 2.0
    gam = float(spec.gamma(r))
    # deep in the jump branch the bound is linear in t
    lo = float(density.tail_envelope(spec, 1e-4 * gam, r))
    assert lo == pytest.approx(1e-4 * gam * math.exp(-1e-4) /
                               (r * gam), rel=1e-6)
    # bulk branch at large t grows with the spatial scale
    hi = float(density.tail_envelope(spec, 100.0 * gam, r))
    assert hi > 0
    with pytest.raises(DomainError):
        density.tail_envelope(CAUCHY, 1.0, 1.0)


def test_fit_envelope_bounds_density():
    fit = density.fit_envelope(unimodal_1d(), t_values=(0.5, 1.0, 2.0))
    assert math.isfinite(fit.c1) and fit.c1 > 0
    assert all(row[4] <= fit.c1 + 1e-12 for row in fit.table)


def test_time_potential_ratio_order_one():
    rows = density.time_potential(unimodal_1d(), [1.0, 2.0])
    for _, pot, ratio in rows:
        assert pot > 0
        assert 0.05 < ratio < 20.0
    with pytest.raises(DomainError):
        density.time_potential(CAUCHY, [1.0])
