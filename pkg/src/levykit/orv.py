"""O-regular-variation calculus for scale profiles.

Index estimation from dyadic ratio ladders, the generalized inverse
a(t) of a scale profile, and numeric certificates for the Karamata-type
integral bounds the kernel estimates lean on.  True limsup indices are
unobservable; everything here is a finite surrogate whose defaults are
wide enough that every power-law or log-perturbed profile of interest
resolves to the exact exponent within a few percent.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConeError, DomainError, ExponentChoiceError,
                     InsufficientRangeError)
from .profiles import RadialProfile

__all__ = [
    "ORVReport", "estimate_indices", "check_assumption_A",
    "inverse_profile", "KaramataReport", "karamata_check",
    "profile_sandwich",
]

_FIT_OCTAVES = 4  # outer octaves used for each slope fit


@dataclass
class AssumptionCheck:
    sigma: float
    ok: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


@dataclass
class ORVReport:
    """Estimated O-RV indices of a profile.

    ``p1 <= q1`` are the lower/upper indices of the ratio function at
    zero, ``p2 <= q2`` the pair at infinity.  ``ladder`` keeps the raw
    ``(side, eps, x, ratio)`` samples the estimates came from.
    """

    p1: float
    q1: float
    p2: float
    q2: float
    ladder: list = field(default_factory=list, repr=False)
    assumption_A: AssumptionCheck | None = None

    def __post_init__(self):
        for v in (self.p1, self.q1, self.p2, self.q2):
            if not math.isfinite(v):
                raise DomainError("non-finite index estimate")

    def indices(self):
        return self.p1, self.q1, self.p2, self.q2

    def to_csv(self) -> str:
        rows = ["quantity,value",
                f"p1,{self.p1:.12g}", f"q1,{self.q1:.12g}",
                f"p2,{self.p2:.12g}", f"q2,{self.q2:.12g}"]
        if self.assumption_A is not None:
            rows.append(f"assumption_A,{'pass' if self.assumption_A.ok else 'fail'}")
            for r in self.assumption_A.reasons:
                rows.append(f"assumption_A_reason,{r}")
        return "\n".join(rows) + "\n"

    def __str__(self):
        s = (f"indices at zero:     p1 = {self.p1:.4f}  q1 = {self.q1:.4f}\n"
             f"indices at infinity: p2 = {self.p2:.4f}  q2 = {self.q2:.4f}")
        if self.assumption_A is not None:
            a = self.assumption_A
            s += f"\nassumption A (sigma = {a.sigma:g}): " + ("pass" if a.ok else
                                                             "fail: " + "; ".join(a.reasons))
        return s


def _ratio_ladder(profile, eps, xs):
    # r(x) = max over the eps ladder of w(eps x) / w(eps)
    E = eps[:, None]
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        vals = np.asarray(profile(E * xs[None, :])) / np.asarray(profile(eps))[:, None]
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise DomainError("profile not positive and finite over the dyadic ladder")
    return vals.max(axis=0), vals


def _outer_slope(ks, log_r, side):
    # least-squares slope of log r over the outer _FIT_OCTAVES octaves
    if side == "low":
        sel = slice(0, _FIT_OCTAVES + 1)
    else:
        sel = slice(len(ks) - _FIT_OCTAVES - 1, len(ks))
    x = ks[sel] * math.log(2.0)
    y = log_r[sel]
    return float(np.polyfit(x, y, 1)[0])


def estimate_indices(profile: RadialProfile, x_octaves: int = 6,
                     eps_octaves: tuple = (8, 20)) -> ORVReport:
    """Estimate the four O-RV indices of a positive profile.

    Parameters
    ----------
    profile : RadialProfile
        Positive on the dyadic working range the ladders touch,
        roughly ``[2**-(eps_octaves[1] + x_octaves), 2**(...)]``.
    x_octaves : int
        Ratio arguments run over x = 2**k, |k| <= x_octaves.  Slopes
        are fit on the outer 4 octaves of each side, so at least 6
        octaves are required.
    eps_octaves : tuple
        The limsup surrogate maximizes over eps = 2**-j (at zero) and
        eps = 2**j (at infinity) for j in this range.

    Returns
    -------
    ORVReport

    Notes
    -----
    For a pure power r**p all four estimates equal p to rounding.
    Slowly varying factors bias the fit by O(1/log eps); the default
    ladder keeps that under 0.03 for logarithmic perturbations.
    """
    if x_octaves < 6:
        raise InsufficientRangeError(
            "slope fit needs at least 6 octaves of ratio arguments")
    j_lo, j_hi = eps_octaves
    if j_hi - j_lo < 6:
        raise InsufficientRangeError(
            "eps ladder shorter than 6 octaves cannot approach the limit")
    ks = np.arange(-x_octaves, x_octaves + 1)
    xs = 2.0 ** ks
    eps_zero = 2.0 ** (-np.arange(j_lo, j_hi + 1, dtype=float))
    eps_inf = 2.0 ** (np.arange(j_lo, j_hi + 1, dtype=float))

    r1, grid1 = _ratio_ladder(profile, eps_zero, xs)
    r2, grid2 = _ratio_ladder(profile, eps_inf, xs)

    ladder = []
    for side, eps, grid in (("zero", eps_zero, grid1), ("inf", eps_inf, grid2)):
        for i, e in enumerate(eps):
            for k, x in enumerate(xs):
                ladder.append((side, float(e), float(x), float(grid[i, k])))

    lr1, lr2 = np.log(r1), np.log(r2)
    return ORVReport(p1=_outer_slope(ks, lr1, "low"),
                     q1=_outer_slope(ks, lr1, "high"),
                     p2=_outer_slope(ks, lr2, "low"),
                     q2=_outer_slope(ks, lr2, "high"),
                     ladder=ladder)


def check_assumption_A(report: ORVReport, sigma: float,
                       tol: float = 0.05) -> AssumptionCheck:
    """Scale-index admissibility for order sigma, with estimation slack.

    The three sigma cases:  0 < p_i <= q_i < 1 on (0,1),
    0 < p_i <= 1 <= q_i < 2 at sigma = 1, and 1 < p_i <= q_i < 2 on
    (1,2).  Estimated indices carry a few-percent error, so each strict
    comparison is relaxed by ``tol``; a boundary profile (all indices
    1.0 at sigma = 1) passes.
    """
    if not 0 < sigma < 2:
        raise DomainError("sigma must lie in (0, 2)")
    reasons = []
    pairs = (("1", report.p1, report.q1), ("2", report.p2, report.q2))
    for tag, p, q in pairs:
        if p <= tol:
            reasons.append(f"p{tag} <= 0")
        if sigma < 1:
            if q >= 1 + tol:
                reasons.append(f"q{tag} >= 1")
        elif sigma == 1:
            if p > 1 + tol:
                reasons.append(f"p{tag} > 1")
            if q < 1 - tol:
                reasons.append(f"q{tag} < 1")
            if q >= 2 + tol:
                reasons.append(f"q{tag} >= 2")
        else:
            if p <= 1 - tol:
                reasons.append(f"p{tag} <= 1")
            if q >= 2 + tol:
                reasons.append(f"q{tag} >= 2")
    check = AssumptionCheck(sigma=sigma, ok=not reasons, reasons=reasons)
    report.assumption_A = check
    return check


def inverse_profile(profile: RadialProfile) -> RadialProfile:
    """The scale function a(t) = inf{s > 0 : w(s) >= t}.

    Closed-form inverses are used when the profile carries one;
    otherwise monotone bisection in log r.  For continuous profiles
    w(a(t)) = t to high accuracy, and a is itself a profile whose
    indices are the reciprocals of w's.
    """
    if not profile.is_nondecreasing():
        raise DomainError(f"{profile.name} is not non-decreasing; no scale inverse")
    expo = None
    if profile.exponent not in (None, 0):
        expo = 1.0 / profile.exponent
    return RadialProfile(lambda t: profile.inverse(t, side="left"),
                         name=f"inv({profile.name})", exponent=expo)


@dataclass
class KaramataReport:
    regime: str
    tau: float
    beta: float
    xs: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    sup: float
    argmax: float
    diverged: bool = False
    divergent_endpoint: float | None = None

    def __str__(self):
        if self.diverged:
            return (f"karamata {self.regime} (tau={self.tau:g}, beta={self.beta:g}): "
                    f"divergent at x -> {self.divergent_endpoint:g}")
        return (f"karamata {self.regime} (tau={self.tau:g}, beta={self.beta:g}): "
                f"sup ratio {self.sup:.6g} at x = {self.argmax:.3g}")


# regime -> (side, sign of beta, cone predicate, cumulative direction)
# cones quote the admissibility conditions in terms of the indices
_REGIMES = {
    "zero-a": ("zero", +1, lambda t, b, p, q: t > -b * p, "up"),
    "zero-b": ("zero", +1, lambda t, b, p, q: t < -b * q, "down"),
    "zero-c": ("zero", -1, lambda t, b, p, q: t > -b * q, "up"),
    "zero-d": ("zero", -1, lambda t, b, p, q: t < -b * p, "down"),
    "inf-a": ("inf", +1, lambda t, b, p, q: -t > b * q, "down"),
    "inf-b": ("inf", +1, lambda t, b, p, q: -t < b * p, "up"),
    "inf-c": ("inf", -1, lambda t, b, p, q: t < -b * p, "down"),
    "inf-d": ("inf", -1, lambda t, b, p, q: t > -b * q, "up"),
}


def _simpson_segments(profile, tau, beta, u_edges, n_sub):
    # per-segment integral of t^tau w(t)^beta dt/t, t = e^u
    s = np.linspace(0.0, 1.0, n_sub + 1)
    du = np.diff(u_edges)
    U = u_edges[:-1, None] + du[:, None] * s[None, :]
    with np.errstate(over="ignore", under="ignore"):
        F = np.exp(tau * U) * np.asarray(profile(np.exp(U))) ** beta
    if not np.all(np.isfinite(F)):
        raise DomainError("karamata integrand overflowed; (tau, beta) too extreme")
    wts = np.ones(n_sub + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    return (du / (3.0 * n_sub)) * (F @ wts)


def _local_slope(profile, x, factor=16.0):
    return float(np.log(profile(x) / profile(x / factor)) / np.log(factor))


def karamata_check(profile: RadialProfile, tau: float, beta: float,
                   regime: str, x_extreme: float = 1e-14,
                   per_decade: int = 4, n_sub: int = 32,
                   report: ORVReport | None = None) -> KaramataReport:
    """Sup of (integral of t^tau w(t)^beta dt/t) over x^tau w(x)^beta.

    Certifies one instance of the Karamata-type bounds: each regime
    names a side (zero or infinity), a sign of beta and an integration
    range; the admissible (tau, beta) cone is checked against the
    profile's estimated indices before any quadrature runs.

    Parameters
    ----------
    profile : RadialProfile
    tau, beta : float
        Weight exponents; beta's sign must match the regime.
    regime : str
        One of zero-a/b/c/d (x in (0, 1]) or inf-a/b/c/d (x in
        [1, oo)); the a/c regimes integrate toward the limit point,
        b/d away from it.
    x_extreme : float
        Innermost (or outermost) sup grid point; the sup of a ratio
        approaching its limit like 2 - 2 sqrt(x) needs x down to 1e-14
        to resolve the limit to 1e-6.
    per_decade, n_sub : int
        Sup grid density and Simpson subintervals per segment;
        doubling either should move the sup by well under 5 percent.

    Returns
    -------
    KaramataReport
        ``sup`` is +inf with ``divergent_endpoint`` set when the
        integral fails to be bounded by the comparison weight.
    """
    if regime not in _REGIMES:
        raise DomainError(f"unknown regime {regime!r}")
    side, bsign, cone, direction = _REGIMES[regime]
    if beta * bsign <= 0:
        raise ConeError(f"regime {regime} needs beta {'>' if bsign > 0 else '<'} 0")
    if report is None:
        report = estimate_indices(profile)
    p, q = (report.p1, report.q1) if side == "zero" else (report.p2, report.q2)
    if not cone(tau, beta, p, q):
        raise ConeError(
            f"(tau, beta) = ({tau:g}, {beta:g}) outside the {regime} cone "
            f"for indices ({p:.3f}, {q:.3f})")

    if x_extreme <= 0 or (side == "zero") != (x_extreme < 1):
        raise DomainError("x_extreme must sit on the regime's side of 1")
    decades = abs(math.log10(x_extreme))
    m = max(8, int(round(decades * per_decade)))
    if side == "zero":
        u = np.linspace(math.log(x_extreme), 0.0, m + 1)
    else:
        u = np.linspace(0.0, math.log(x_extreme), m + 1)
    xs = np.exp(u)
    seg = _simpson_segments(profile, tau, beta, u, n_sub)
    weight = xs ** tau * np.asarray(profile(xs)) ** beta

    diverged = False
    endpoint = None
    if direction == "up":
        # integral from the limit point up to x: analytic head under the
        # local power approximation, then accumulate
        x0 = xs[0] if side == "zero" else xs[-1]
        slope = _local_slope(profile, x0)
        kappa = tau + beta * slope
        if side == "zero":
            if kappa <= 0:
                diverged, endpoint = True, 0.0
                head = math.inf
            else:
                head = weight[0] / kappa
            cum = head + np.concatenate(([0.0], np.cumsum(seg)))
        else:
            cum = np.concatenate(([0.0], np.cumsum(seg)))
    else:
        # integral from x toward the far end of the range
        if side == "zero":
            cum = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))
        else:
            xN = xs[-1]
            slope = _local_slope(profile, xN)
            kappa = tau + beta * slope
            if kappa >= 0:
                diverged, endpoint = True, math.inf
                tail = math.inf
            else:
                tail = -weight[-1] / kappa
            cum = tail + np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))

    with np.errstate(invalid="ignore"):
        ratios = cum / weight
    if not diverged:
        # growth toward the limit point flags divergence missed by the cone
        k = 4 * per_decade
        outer = ratios[:k + 1] if side == "zero" else ratios[-k - 1:][::-1]
        if outer[0] > 2.0 * outer[-1] and np.all(np.diff(outer) < 0):
            diverged = True
            endpoint = 0.0 if side == "zero" else math.inf
    if diverged:
        sup, arg = math.inf, endpoint
    else:
        i = int(np.argmax(ratios))
        sup, arg = float(ratios[i]), float(xs[i])
    return KaramataReport(regime=regime, tau=tau, beta=beta, xs=xs,
                          ratios=ratios, sup=sup, argmax=arg,
                          diverged=diverged, divergent_endpoint=endpoint)


def profile_sandwich(profile: RadialProfile, alpha1: float, alpha2: float,
                     octaves: int = 10, per_octave: int = 2) -> tuple:
    """Empirical constants for c1 (y/x)^a2 <= w(y)/w(x) <= c2 (y/x)^a1.

    Scans dyadic pairs x <= y, returns the extremal (c1, c2), and
    doubles the range once to detect a sandwich that only fails in the
    limit: a lower constant collapsing (or upper exploding) by more
    than the exponent gap allows raises ExponentChoiceError.
    """
    if alpha2 >= alpha1:
        raise DomainError("need alpha2 < alpha1")

    def extremes(J):
        g = 2.0 ** (np.arange(-J * per_octave, J * per_octave + 1) / per_octave)
        v = np.asarray(profile(g))
        lr = np.log(g)
        lv = np.log(v)
        # all ordered pairs via upper-triangular differences
        dmat = lv[None, :] - lv[:, None]
        smat = lr[None, :] - lr[:, None]
        iu = np.triu_indices(len(g), k=0)
        d, s = dmat[iu], smat[iu]
        c1 = float(np.exp(np.min(d - alpha2 * s)))
        c2 = float(np.exp(np.max(d - alpha1 * s)))
        return c1, c2

    c1_a, c2_a = extremes(octaves)
    c1_b, c2_b = extremes(2 * octaves)
    if c1_b < 0.5 * c1_a or not np.isfinite(c1_b) or c1_b <= 0:
        raise ExponentChoiceError(
            f"lower sandwich fails: c1 collapses {c1_a:.3g} -> {c1_b:.3g}; "
            f"alpha2 = {alpha2:g} exceeds the profile's lower index")
    if c2_b > 2.0 * c2_a or not np.isfinite(c2_b):
        raise ExponentChoiceError(
            f"upper sandwich fails: c2 grows {c2_a:.3g} -> {c2_b:.3g}; "
            f"alpha1 = {alpha1:g} undercuts the profile's upper index")
    return c1_b, c2_b
