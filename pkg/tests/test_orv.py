import math

import numpy as np
import pytest

from levykit import orv
from levykit.errors import (ConeError, DomainError, ExponentChoiceError,
                            InsufficientRangeError)
from levykit.profiles import RadialProfile

SQRT = RadialProfile.power(0.5)


def mixed_profile():
    return RadialProfile.from_callable(
        lambda r: np.sqrt(r) * np.log1p(r) ** 0.25, name="sqrt-log")


# -- index estimation --------------------------------------------------------


@pytest.mark.parametrize("p", [0.25, 0.75, 1.0, 1.5])
def test_power_law_indices_exact(p):
    rep = orv.estimate_indices(RadialProfile.power(p))
    for v in rep.indices():
        assert v == pytest.approx(p, abs=1e-9)


def test_mixed_profile_indices():
    # sqrt(r) log(1+r)^(1/4): slope 3/4 at zero, 1/2 at infinity;
    # the log factor biases the fit by under 0.05
    rep = orv.estimate_indices(mixed_profile())
    assert rep.p1 == pytest.approx(0.75, abs=0.05)
    assert rep.q1 == pytest.approx(0.75, abs=0.05)
    assert rep.p2 == pytest.approx(0.5, abs=0.05)
    assert rep.q2 == pytest.approx(0.5, abs=0.05)


def test_indices_need_range():
    with pytest.raises(InsufficientRangeError):
        orv.estimate_indices(SQRT, x_octaves=4)
    with pytest.raises(InsufficientRangeError):
        orv.estimate_indices(SQRT, eps_octaves=(8, 12))


def test_indices_reject_vanishing_profile():
    bad = RadialProfile.from_callable(
        lambda r: np.maximum(np.asarray(r) - 0.5, 0.0), name="clipped")
    with pytest.raises(DomainError):
        orv.estimate_indices(bad)


def test_index_ordering_and_ladder():
    rep = orv.estimate_indices(mixed_profile())
    assert rep.p1 <= rep.q1 + 1e-9
    assert rep.p2 <= rep.q2 + 1e-9
    assert len(rep.ladder) > 0
    side, eps, x, ratio = rep.ladder[0]
    assert side in ("zero", "inf") and ratio > 0


def test_csv_has_four_indices():
    txt = orv.estimate_indices(SQRT).to_csv()
    for key in ("p1,", "q1,", "p2,", "q2,"):
        assert key in txt


# -- admissibility -----------------------------------------------------------


def test_assumption_bracket_cases():
    low = orv.estimate_indices(RadialProfile.power(0.5))
    assert orv.check_assumption_A(low, 0.5).ok
    assert not orv.check_assumption_A(low, 1.5).ok
    boundary = orv.estimate_indices(RadialProfile.power(1.0))
    assert orv.check_assumption_A(boundary, 1.0).ok
    with pytest.raises(DomainError):
        orv.check_assumption_A(low, 2.0)


# -- inverse profiles --------------------------------------------------------


def test_inverse_profile_reciprocal_indices():
    inv = orv.inverse_profile(RadialProfile.power(0.5, scale=2.0))
    assert inv.exponent == pytest.approx(2.0)
    for t in (0.5, 1.0, 8.0):
        w = RadialProfile.power(0.5, scale=2.0)
        assert float(w(inv(t))) == pytest.approx(t, rel=1e-10)


def test_inverse_profile_needs_monotone():
    with pytest.raises(DomainError):
        orv.inverse_profile(RadialProfile.power(-1.0))


# -- karamata ratio bounds ---------------------------------------------------

# (regime, tau, beta) combinations inside the cone for w = sqrt(r), the
# exact sup of the integral/weight ratio, and how closely the x-grid
# endpoint can approach it (the b/d regimes integrate away from the
# limit point and approach their sup like 1 - x^(1/4))
CASES = [
    ("zero-a", 0.5, 1.0, 1.0, 1e-6),   # constant ratio 1/(tau + beta/2)
    ("zero-b", -1.0, 1.0, 2.0, 1e-6),  # ratio 2 - 2 sqrt(x), sup at x -> 0
    ("zero-c", 0.75, -1.0, 4.0, 1e-6),
    ("zero-d", 0.25, -1.0, 4.0, 2e-3),
    ("inf-a", -1.0, 1.0, 2.0, 1e-6),
    ("inf-b", 0.5, 1.0, 1.0, 1e-6),
    ("inf-c", -0.25, -1.0, 4.0 / 3.0, 1e-6),
    ("inf-d", 0.75, -1.0, 4.0, 2e-3),
]


@pytest.mark.parametrize("regime,tau,beta,sup,tol", CASES)
def test_karamata_closed_forms(regime, tau, beta, sup, tol):
    xe = 1e-14 if regime.startswith("zero") else 1e14
    rep = orv.karamata_check(SQRT, tau, beta, regime, x_extreme=xe)
    assert not rep.diverged
    assert rep.sup == pytest.approx(sup, abs=tol)


@pytest.mark.parametrize("regime,tau,beta,sup,tol", CASES)
def test_karamata_stable_under_quadrature_doubling(regime, tau, beta, sup,
                                                   tol):
    xe = 1e-14 if regime.startswith("zero") else 1e14
    a = orv.karamata_check(SQRT, tau, beta, regime, x_extreme=xe)
    b = orv.karamata_check(SQRT, tau, beta, regime, x_extreme=xe,
                           per_decade=8, n_sub=64)
    assert math.isfinite(a.sup) and math.isfinite(b.sup)
    assert abs(a.sup - b.sup) <= 0.05 * b.sup


def test_karamata_cone_rejections():
    # tau on the wrong side of the index for each side of the cone
    with pytest.raises(ConeError):
        orv.karamata_check(SQRT, -1.0, 1.0, "zero-a")
    with pytest.raises(ConeError):
        orv.karamata_check(SQRT, 0.5, 1.0, "zero-b")
    # beta sign must match the regime
    with pytest.raises(ConeError):
        orv.karamata_check(SQRT, 0.5, -1.0, "zero-a")
    with pytest.raises(DomainError):
        orv.karamata_check(SQRT, 0.5, 1.0, "sideways-q")


def test_karamata_x_extreme_side():
    with pytest.raises(DomainError):
        orv.karamata_check(SQRT, 0.5, 1.0, "zero-a", x_extreme=10.0)
    with pytest.raises(DomainError):
        orv.karamata_check(SQRT, -1.0, 1.0, "inf-a", x_extreme=0.1)


def test_karamata_sup_location():
    # the zero-b ratio 2 - 2 sqrt(x) is extremal at the inner endpoint
    rep = orv.karamata_check(SQRT, -1.0, 1.0, "zero-b")
    assert rep.argmax == pytest.approx(1e-14, rel=1e-6)


# -- sandwich bounds ---------------------------------------------------------


def test_profile_sandwich_power():
    c1, c2 = orv.profile_sandwich(SQRT, 1.0, 0.25)
    assert 0 < c1 <= 1.0 + 1e-12
    assert c2 >= 1.0 - 1e-12
    assert math.isfinite(c2)


def test_profile_sandwich_detects_bad_exponents():
    with pytest.raises(ExponentChoiceError):
        # lower exponent above the true index 0.5: c1 collapses
        orv.profile_sandwich(SQRT, 1.0, 0.75)
    with pytest.raises(ExponentChoiceError):
        # upper exponent below the true index: c2 explodes
        orv.profile_sandwich(SQRT, 0.25, 0.1)
    with pytest.raises(DomainError):
        orv.profile_sandwich(SQRT, 0.25, 0.5)
