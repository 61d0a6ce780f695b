import math

import numpy as np
import pytest

from levykit import measures
from levykit.errors import ConfigError, DomainError, MomentDivergenceError
from levykit.measures import (Anisotropic, IsotropicUnimodal, RadialAngular,
                              RadialStable, comparison_rescale, load_measure,
                              nondegeneracy, parse_config, rescale, reflect,
                              symmetrize, tail_mass, to_config,
                              truncated_moments, w_profile)
from levykit.profiles import RadialProfile

CAUCHY = RadialStable(1, 1.0)


def atom_pair(weight=1.0):
    return [(np.array([1.0]), weight), (np.array([-1.0]), weight)]


def four_families():
    return [CAUCHY,
            Anisotropic(2, 0.75, (1.0, 2.0)),
            RadialAngular(1, RadialProfile.power(-1.5), atoms=atom_pair(),
                          sigma=0.5),
            IsotropicUnimodal(2, RadialProfile.power(1.25), 0.5, 2.0)]


# -- tails and scale profiles -------------------------------------------------


def test_cauchy_tail_closed_form():
    # density |y|^-2 in d = 1: mass outside r is 2/r
    for r in (0.25, 1.0, 8.0):
        assert tail_mass(CAUCHY, r) == pytest.approx(2.0 / r, rel=1e-12)


def test_w_profile_example_value():
    spec = Anisotropic(2, 1.0, (1.0, 1.0))
    w = w_profile(spec)
    assert float(w(8.0)) == pytest.approx(2.0, abs=1e-9)


def test_w_is_reciprocal_tail():
    for spec in four_families():
        w = w_profile(spec)
        for r in (0.5, 1.0, 4.0):
            assert float(w(r)) == pytest.approx(1.0 / tail_mass(spec, r),
                                                rel=1e-9)


def test_scale_inverse_consistency():
    w = w_profile(CAUCHY)
    for tau in (0.25, 1.0, 16.0):
        a = float(w.inverse(tau))
        assert float(w(a)) == pytest.approx(tau, rel=1e-9)


# -- rescaling ---------------------------------------------------------------


@pytest.mark.parametrize("j", range(-10, 11))
def test_rescale_unit_tail(j):
    R = 2.0 ** j
    for spec in four_families():
        assert tail_mass(rescale(spec, R), 1.0) == pytest.approx(1.0,
                                                                 abs=1e-10)


def test_rescale_composes():
    z = rescale(rescale(CAUCHY, 4.0), 2.0)
    direct = rescale(CAUCHY, 8.0)
    for r in (0.5, 1.0, 3.0):
        assert tail_mass(z, r) == pytest.approx(tail_mass(direct, r),
                                                rel=1e-12)


def test_rescale_rejects_bad_radius():
    with pytest.raises(DomainError):
        rescale(CAUCHY, 0.0)
    with pytest.raises(DomainError):
        rescale(CAUCHY, -1.0)


def test_comparison_rescale_is_linear_in_mass():
    pi = RadialStable(1, 0.5, 3.0)
    base = comparison_rescale(pi, CAUCHY, 2.0)
    doubled = comparison_rescale(pi.scaled_mass(2.0), CAUCHY, 2.0)
    for r in (0.5, 1.0, 4.0):
        assert tail_mass(doubled, r) == pytest.approx(2.0 * tail_mass(base, r),
                                                      rel=1e-12)


# -- moments -----------------------------------------------------------------


@pytest.mark.parametrize("j", range(-6, 7))
def test_truncated_moments_scale_free(j):
    rep = truncated_moments(RadialStable(1, 0.5), 1.0, 0.25, R=2.0 ** j)
    assert rep.small == pytest.approx(1.0, abs=1e-6)
    assert rep.large == pytest.approx(2.0, abs=1e-6)


def test_moments_diverge_below_order():
    # alpha1 below the order: the small-jump moment is infinite
    with pytest.raises(MomentDivergenceError):
        truncated_moments(CAUCHY, 0.5, 0.25)


def test_moments_diverge_on_heavy_tail():
    # alpha2 at the tail index: the large-jump moment is infinite
    with pytest.raises(MomentDivergenceError):
        truncated_moments(CAUCHY, 1.5, 1.0)


# -- symmetry operations -----------------------------------------------------


def test_reflect_and_symmetrize_tails():
    spec = RadialAngular(1, RadialProfile.power(-1.5),
                         atoms=[(np.array([1.0]), 1.5),
                                (np.array([-1.0]), 0.5)], sigma=0.5)
    for r in (0.5, 2.0):
        assert tail_mass(reflect(spec), r) == pytest.approx(
            tail_mass(spec, r), rel=1e-12)
        assert tail_mass(symmetrize(spec), r) == pytest.approx(
            tail_mass(spec, r), rel=1e-12)
    sym = symmetrize(spec)
    u = np.array([1.0])
    assert sym.second_moment_dir(u, 1.0) == pytest.approx(
        sym.reflected().second_moment_dir(u, 1.0), rel=1e-12)


def test_symmetrize_is_idempotent_on_symmetric():
    assert symmetrize(CAUCHY) is CAUCHY


def test_sigma_one_atoms_need_mean_cancellation():
    with pytest.raises(DomainError):
        RadialAngular(1, RadialProfile.power(-2.0),
                      atoms=[(np.array([1.0]), 0.6),
                             (np.array([-1.0]), 1.4)], sigma=1.0)


# -- nondegeneracy -----------------------------------------------------------


def test_nondegeneracy_example_value():
    rep = nondegeneracy(Anisotropic(2, 1.0, (1.0, 1.0)))
    assert rep.value == pytest.approx(0.5, abs=1e-3)
    assert rep.witness_R > 0


def test_nondegeneracy_positive_for_families():
    for spec in four_families():
        assert nondegeneracy(spec).value > 0


# -- config round trips ------------------------------------------------------


def test_config_roundtrip():
    for spec in (CAUCHY, Anisotropic(2, 1.5, (1.0, 2.0)),
                 IsotropicUnimodal(2, RadialProfile.power(1.25), 1.0)):
        back = parse_config(to_config(spec))
        assert back.family == spec.family
        assert back.dim == spec.dim
        assert back.sigma == pytest.approx(spec.sigma)
        for r in (0.5, 1.0, 4.0):
            assert tail_mass(back, r) == pytest.approx(tail_mass(spec, r),
                                                       rel=1e-12)


def test_config_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_config("family = radial_stable\ndim = 1\nalpha = one\n")
    with pytest.raises(ConfigError):
        parse_config("family = nosuch\ndim = 1\n")
    with pytest.raises(ConfigError):
        parse_config("family = radial_stable\ndim = 1\nalpha = 1\nalpha = 2\n")
    with pytest.raises(ConfigError):
        parse_config("family = radial_stable\ndim = 1\nalpha = 1\nbogus = 3\n")
    with pytest.raises(ConfigError):
        # alpha outside (0, 2)
        parse_config("family = radial_stable\ndim = 1\nalpha = 2.5\n")


def test_load_measure_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_measure(str(tmp_path / "nope.cfg"))


def test_load_measure_roundtrip(tmp_path):
    p = tmp_path / "m.cfg"
    p.write_text(to_config(CAUCHY))
    spec = load_measure(str(p))
    assert spec.family == "radial_stable"
    assert tail_mass(spec, 1.0) == pytest.approx(2.0)
