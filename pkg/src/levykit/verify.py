"""Verification suite: named checks with pinned tolerances.

Each check computes a scalar against a bound and reports one line; the
CLI verify subcommand and the acceptance tests both run these, so the
numbers in test output and in shipped runs cannot drift apart.

The difference-kernel L1 check (kernel-l1-ratio) measures a ratio
whose true value for the d = 1 Cauchy measure is about 3.91, far above
the nominal 1.05; it is excluded from the "all" suite and kept under
its own name so the measurement stays visible without permanently
failing every run.  The measured constant is printed either way.
"""

import math
import time

import numpy as np

from . import density, measures, orv, simulate, solver, spaces, symbols
from .coeffs import CoefficientSpec
from .grid import SpectralGrid
from .profiles import RadialProfile


class CheckResult:
    def __init__(self, name, value, bound, passed, elapsed, detail=""):
        self.name = name
        self.value = value
        self.bound = bound
        self.passed = passed
        self.elapsed = elapsed
        self.detail = detail

    def line(self) -> str:
        s = "PASS" if self.passed else "FAIL"
        out = (f"{s} {self.name}: value {self.value:.6g} vs bound "
               f"{self.bound:.6g} [{self.elapsed:.2f}s]")
        if self.detail:
            out += f" ({self.detail})"
        return out

    def row(self) -> str:
        # no timing column: rerun output must be byte-identical
        return (f"{self.name},{self.value:.12g},{self.bound:.12g},"
                f"{'pass' if self.passed else 'fail'}")


def _result(name, value, bound, t0, detail="", tol_scale=1.0):
    bound = bound * tol_scale
    return CheckResult(name, value, bound, value <= bound,
                       time.time() - t0, detail)


# ---------------------------------------------------------------------------
# the fourteen acceptance checks


def check_cauchy_density(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    g = SpectralGrid(1, 1024, 64.0)
    fld = density.transition_density(spec, t=1.0, grid=g)
    x = g.x_mesh()
    oracle = 1.0 / (np.pi ** 2 + x ** 2)
    err = float(np.max(np.abs(fld.values - oracle)))
    return _result("cauchy-density", err, 1e-3, t0,
                   "max abs vs 1/(pi^2+x^2)", tol_scale)


def check_symbol_closed_form(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    xi = 2.0 ** np.arange(-6, 7).astype(float)
    got = symbols.psi(spec, xi, method="quadrature")
    want = -2.0 * np.pi ** 2 * np.abs(xi)
    rel = float(np.max(np.abs(got - want) / np.abs(want)))
    return _result("symbol-closed-form", rel, 1e-6, t0,
                   "alpha=1 quadrature vs -2 pi^2 |xi|", tol_scale)


def _four_families():
    return [measures.RadialStable(1, 1.0),
            measures.Anisotropic(2, 0.75, (1.0, 2.0)),
            measures.RadialAngular(1, RadialProfile.power(-1.5),
                                   atoms=[(np.array([1.0]), 1.0),
                                          (np.array([-1.0]), 1.0)],
                                   sigma=0.5),
            measures.IsotropicUnimodal(2, RadialProfile.power(1.25),
                                       0.5, 2.0)]


def check_rescale_normalization(tol_scale=1.0):
    t0 = time.time()
    worst = 0.0
    for spec in _four_families():
        for j in range(-10, 11):
            got = measures.tail_mass(measures.rescale(spec, 2.0 ** j), 1.0)
            worst = max(worst, abs(got - 1.0))
    return _result("rescale-normalization", worst, 1e-10, t0,
                   "four families, R = 2^j, |j| <= 10", tol_scale)


def check_truncated_moments(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 0.5)
    worst = 0.0
    for j in range(-6, 7):
        rep = measures.truncated_moments(spec, 1.0, 0.25, R=2.0 ** j)
        worst = max(worst, abs(rep.small - 1.0), abs(rep.large - 2.0))
    return _result("truncated-moments", worst, 1e-6, t0,
                   "target (1.0, 2.0) over the R sweep", tol_scale)


def check_example_values(tol_scale=1.0):
    t0 = time.time()
    spec = measures.Anisotropic(2, 1.0, (1.0, 1.0))
    w = measures.w_profile(spec)
    err_w = abs(float(w(8.0)) - 2.0) / 1e-9
    nd = measures.nondegeneracy(spec)
    err_nd = abs(nd.value - 0.5) / 1e-3
    worst = max(err_w, err_nd)
    return _result("example-values", worst, 1.0, t0,
                   f"w(8) off by {err_w * 1e-9:.2e}, "
                   f"nondegeneracy off by {err_nd * 1e-3:.2e} "
                   "(normalized to their own tolerances)", tol_scale)


def check_scaling_identity(tol_scale=1.0):
    t0 = time.time()
    r1 = density.check_scaling_identity(measures.RadialStable(1, 1.0),
                                        t=1.0,
                                        grid=SpectralGrid(1, 1024, 64.0))
    r2 = density.check_scaling_identity(
        measures.Anisotropic(2, 1.5, (1.0, 2.0)), t=1.0,
        grid=SpectralGrid(2, 256, 64.0))
    worst = max(r1.discrepancy / 1e-6, r2.discrepancy / 1e-3)
    return _result("scaling-identity", worst, 1.0, t0,
                   f"stable d1 {r1.discrepancy:.2e} (tol 1e-6), "
                   f"aniso d2 {r2.discrepancy:.2e} (tol 1e-3)", tol_scale)


def check_difference_kernel_bound(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    vals = []
    for znorm in (0.25, 1.0, 4.0):
        rep = density.difference_kernel(spec, 0.4, np.array([znorm]))
        vals.append(rep.J)
    worst = max(vals)
    return _result("kernel-l1-ratio", worst, 1.05, t0,
                   "ratios " + " ".join(f"{v:.4f}" for v in vals)
                   + "; exact value 3.9103, so the 1.05 target "
                   "is not attainable", tol_scale)


def check_difference_kernel_invariants(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    reps = [density.difference_kernel(spec, 0.4, np.array([z]))
            for z in (0.25, 1.0, 4.0)]
    ratios = [r.J for r in reps]
    spread = max(ratios) / min(ratios) - 1.0
    c, err = density.reconstruct_difference(spec, 0.4, np.array([1.0]))
    c_off = abs(c * math.gamma(0.4) + 1.0)
    worst = max(spread / 1e-4, c_off / 1e-3, err / 1e-3)
    return _result("difference-kernel-invariants", worst, 1.0, t0,
                   f"|z|-uniformity {spread:.2e}, reconstruction "
                   f"constant off by {c_off:.2e}, misfit {err:.2e} "
                   "(normalized)", tol_scale)


def check_hormander(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    reps = []
    for n in (2048, 4096):
        reps.append(density.hormander_suite(spec, s=0.5, t=1.0, b=0.25,
                                            shift=np.array([0.5]),
                                            bar_n=n, bar_L=64.0))
    sups = [(r.sup1, r.part2, r.part3) for r in reps]
    drift = 0.0
    for a, b in zip(sups[0], sups[1]):
        if not (math.isfinite(a) and math.isfinite(b)):
            return _result("hormander-suite", math.inf, 0.10, t0,
                           "non-finite sup", tol_scale)
        drift = max(drift, abs(a - b) / abs(b))
    return _result("hormander-suite", drift, 0.10, t0,
                   "sups " + " ".join(f"{v:.3g}" for v in sups[1])
                   + f", refinement drift {drift:.2%}", tol_scale)


def check_monte_carlo_cf(tol_scale=1.0, seed=20240817):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    n = 100_000
    plan = simulate.SamplePlan(spec, t=1.0, n=n, eps=2e-3, seed=seed)
    xs = simulate.sample_increments(plan)
    xi = np.array([0.05, 0.1, 0.2])
    emp = simulate.empirical_cf(xs, xi)
    want = np.exp(symbols.psi(spec, xi))
    bias = simulate.truncation_bias(plan, xi)
    err = np.abs(emp - want)
    budget = 5.0 / math.sqrt(n) + bias
    worst = float(np.max(err / budget))
    return _result("monte-carlo-cf", worst, 1.0, t0,
                   "err/budget per frequency "
                   + " ".join(f"{v:.3f}" for v in err / budget), tol_scale)


def _manufactured(grid, lam, coeff_mult=None):
    x = grid.x_mesh()
    gfun = np.cos(2 * np.pi * 0.5 * x) + 0.3 * np.sin(2 * np.pi * 1.25 * x)
    psi = spaces.generator_multiplier(measures.RadialStable(1, 1.0), grid)
    Lg = np.fft.ifftn(psi * np.fft.fftn(gfun)).real
    if coeff_mult is not None:
        Lg = coeff_mult * Lg
    ts = np.linspace(0.0, 1.0, 65)
    f = [(float(t), gfun - t * Lg + lam * t * gfun) for t in ts]
    return gfun, f


def check_duhamel_rho_bound(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    g = SpectralGrid(1, 256, 16.0)
    x = g.x_mesh()
    worst = 0.0
    details = []
    for lam in (0.0, 1.0, 10.0, 100.0):
        for tag, f in (("flat", np.ones(g.shape)),
                       ("gauss", np.exp(-x ** 2 / 2)),
                       ("manu", _manufactured(g, lam)[1])):
            r = solver.solve_duhamel(spec, None, lam, f, g, 64)
            d = r.diagnostics
            ratio = d["lp_u"] / (d["rho_lambda"] * d["lp_f"])
            worst = max(worst, ratio)
        details.append(f"lam={lam:g}:{ratio:.4f}")
    return _result("duhamel-rho-bound", worst, 1.0 + 1e-6, t0,
                   " ".join(details), tol_scale)


def check_apriori_ratios(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    ratios = {}
    for n in (256, 512):
        g = SpectralGrid(1, n, 16.0)
        corpus = spaces.test_fields(g, seed=7)[:4]
        worst_gen, worst_dt = 0.0, 0.0
        for _, f in corpus:
            r = solver.solve_duhamel(spec, None, 2.0, f, g, 64)
            d = r.diagnostics
            worst_gen = max(worst_gen, d["lp_generator"] / d["lp_f"])
            worst_dt = max(worst_dt, d["lp_dt"] / d["lp_f"])
        ratios[n] = (worst_gen, worst_dt)
    drift = max(abs(ratios[256][i] - ratios[512][i]) / ratios[512][i]
                for i in (0, 1))
    # |u|/|f| should fall like 1/lambda once lambda > 1/T
    g = SpectralGrid(1, 256, 16.0)
    f = np.exp(-g.x_mesh() ** 2 / 2)
    us = []
    lams = (10.0, 100.0)
    for lam in lams:
        d = solver.solve_duhamel(spec, None, lam, f, g, 64).diagnostics
        us.append(d["lp_u"] / d["lp_f"])
    slope = (math.log(us[1]) - math.log(us[0])) / (math.log(lams[1])
                                                   - math.log(lams[0]))
    worst = max(drift / 0.15, abs(slope + 1.0) / 0.1)
    return _result("apriori-ratios", worst, 1.0, t0,
                   f"refinement drift {drift:.2%}, lambda slope "
                   f"{slope:.3f}", tol_scale)


def check_frozen_manufactured(tol_scale=1.0):
    t0 = time.time()
    spec = measures.RadialStable(1, 1.0)
    g = SpectralGrid(1, 256, 16.0)
    x = g.x_mesh()
    mx = lambda t, xx: 1.0 + 0.1 * np.cos(2 * np.pi * np.asarray(xx) / 32.0)
    coeff = CoefficientSpec(0.9, 1.1, terms=[(mx, None)])
    gfun, f = _manufactured(g, 10.0, coeff_mult=mx(0.0, x))
    res = solver.solve_frozen_iteration(spec, coeff, 10.0, f, g, 64,
                                        homotopy_steps=1, tol=1e-10)
    err = g.lp_norm(res.final - gfun, 2.0) / g.lp_norm(gfun, 2.0)
    iters = sum(res.iterations)
    worst = max(err / 1e-3, iters / 20.0)
    return _result("frozen-manufactured", worst, 1.0, t0,
                   f"L2 err {err:.2e}, {iters} Picard iterations", tol_scale)


def check_orv_indices(tol_scale=1.0):
    t0 = time.time()
    worst = 0.0
    rep = orv.estimate_indices(RadialProfile.power(0.75))
    for v in rep.indices():
        worst = max(worst, abs(v - 0.75))
    mixed = RadialProfile.from_callable(
        lambda r: np.sqrt(r) * np.log1p(r) ** 0.25, name="sqrt-log")
    rep2 = orv.estimate_indices(mixed)
    worst = max(worst, abs(rep2.p1 - 0.75), abs(rep2.q1 - 0.75),
                abs(rep2.p2 - 0.5), abs(rep2.q2 - 0.5))
    return _result("orv-indices", worst, 0.05, t0,
                   f"power law and mixed profile; mixed indices "
                   f"({rep2.p1:.3f}, {rep2.q1:.3f}, {rep2.p2:.3f}, "
                   f"{rep2.q2:.3f})", tol_scale)


def check_karamata(tol_scale=1.0):
    t0 = time.time()
    prof = RadialProfile.power(0.5)
    rep = orv.estimate_indices(prof)
    r1 = orv.karamata_check(prof, 0.5, 1.0, "zero-a", report=rep)
    r2 = orv.karamata_check(prof, -1.0, 1.0, "zero-b", report=rep)
    closed = max(abs(r1.sup - 1.0), abs(r2.sup - 2.0))
    drift = 0.0
    for regime, tau, beta in (("zero-a", 0.5, 1.0), ("zero-b", -1.0, 1.0),
                              ("zero-c", 0.75, -1.0), ("zero-d", 0.25, -1.0),
                              ("inf-a", -1.0, 1.0), ("inf-b", 0.5, 1.0),
                              ("inf-c", -0.25, -1.0), ("inf-d", 0.75, -1.0)):
        xe = 1e-14 if regime.startswith("zero") else 1e14
        a = orv.karamata_check(prof, tau, beta, regime, x_extreme=xe,
                               report=rep)
        b = orv.karamata_check(prof, tau, beta, regime, x_extreme=xe,
                               per_decade=8, n_sub=64, report=rep)
        if not (math.isfinite(a.sup) and math.isfinite(b.sup)):
            return _result("karamata", math.inf, 1.0, t0,
                           f"non-finite sup in {regime}", tol_scale)
        drift = max(drift, abs(a.sup - b.sup) / b.sup)
    worst = max(closed / 1e-6, drift / 0.05)
    return _result("karamata", worst, 1.0, t0,
                   f"closed-form off by {closed:.2e}, doubling drift "
                   f"{drift:.2%}", tol_scale)


# ---------------------------------------------------------------------------
# registry

CHECKS = {
    "cauchy-density": check_cauchy_density,
    "symbol-closed-form": check_symbol_closed_form,
    "rescale-normalization": check_rescale_normalization,
    "truncated-moments": check_truncated_moments,
    "example-values": check_example_values,
    "scaling-identity": check_scaling_identity,
    "kernel-l1-ratio": check_difference_kernel_bound,
    "difference-kernel-invariants": check_difference_kernel_invariants,
    "hormander-suite": check_hormander,
    "monte-carlo-cf": check_monte_carlo_cf,
    "duhamel-rho-bound": check_duhamel_rho_bound,
    "apriori-ratios": check_apriori_ratios,
    "frozen-manufactured": check_frozen_manufactured,
    "orv-indices": check_orv_indices,
    "karamata": check_karamata,
}

SUITES = {
    "measures": ["rescale-normalization", "truncated-moments",
                 "example-values"],
    "symbol": ["symbol-closed-form"],
    "density": ["cauchy-density", "scaling-identity",
                "difference-kernel-invariants", "hormander-suite"],
    "simulate": ["monte-carlo-cf"],
    "solver": ["duhamel-rho-bound", "apriori-ratios",
               "frozen-manufactured"],
    "orv": ["orv-indices", "karamata"],
    "kernel-l1-ratio": ["kernel-l1-ratio"],
}
SUITES["all"] = (SUITES["measures"] + SUITES["symbol"] + SUITES["density"]
                 + SUITES["simulate"] + SUITES["solver"] + SUITES["orv"])
SUITES["acceptance"] = SUITES["all"] + ["kernel-l1-ratio"]


def run_suite(name: str, tol_scale: float = 1.0):
    if name in CHECKS:
        picked = [name]
    elif name in SUITES:
        picked = SUITES[name]
    else:
        raise KeyError(f"unknown suite or check {name!r}")
    return [CHECKS[c](tol_scale) for c in picked]
