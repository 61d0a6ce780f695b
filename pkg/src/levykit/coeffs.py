"""Coefficient specifications m(t, x, y) paired with a jump measure.

Bounded measurable coefficients 0 < k <= m <= K. Structure matters for
speed: separable forms (sums of time factor x spatial field x radial
y-profile) admit multiplier evaluation everywhere; a bare callable
falls back to direct quadrature in the few places that support it.
"""

import math
from collections.abc import Callable

import numpy as np
from scipy import integrate

from . import _quad
from .errors import CoefficientBoundsError, DomainError
from .profiles import RadialProfile


class CoefficientSpec:
    """One of: constant, sum of separable terms, or a bare callable.

    Separable terms are (a(t, x), b(|y|)) pairs with m = sum_k a_k b_k;
    a_k may ignore x (then the coefficient is a Fourier multiplier).
    """

    def __init__(self, k: float, K: float, terms=None, fn: Callable = None,
                 holder=None):
        if not 0 < k <= K:
            raise DomainError("need coefficient bounds 0 < k <= K")
        if (terms is None) == (fn is None):
            raise DomainError("give either separable terms or a callable")
        self.k = float(k)
        self.K = float(K)
        self.terms = terms
        self.fn = fn
        self.holder = holder  # (beta, kappa callable) or None

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value: float = 1.0) -> "CoefficientSpec":
        v = float(value)
        return cls(v, v, terms=[(lambda t, x: v, None)])

    @classmethod
    def time_separable(cls, time_fn: Callable, y_profile: RadialProfile = None,
                       bounds: tuple[float, float] = None) -> "CoefficientSpec":
        if bounds is None:
            ts = np.linspace(0.0, 1.0, 201)
            vals = np.array([float(time_fn(t)) for t in ts])
            ys = 1.0
            if y_profile is not None:
                rr = np.exp(np.linspace(math.log(1e-6), math.log(1e6), 201))
                yv = y_profile(rr)
                ys = (float(np.min(yv)), float(np.max(yv)))
                bounds = (vals.min() * ys[0], vals.max() * ys[1])
            else:
                bounds = (float(vals.min()), float(vals.max()))
        term_a = lambda t, x: float(time_fn(t))
        return cls(bounds[0], bounds[1], terms=[(term_a, y_profile)])

    @classmethod
    def separable_sum(cls, terms, k: float, K: float) -> "CoefficientSpec":
        return cls(k, K, terms=list(terms))

    @classmethod
    def sampled(cls, fn: Callable, k: float, K: float, separable_terms=None,
                holder=None) -> "CoefficientSpec":
        if separable_terms is not None:
            return cls(k, K, terms=list(separable_terms), holder=holder)
        return cls(k, K, fn=fn, holder=holder)

    # -- evaluation -------------------------------------------------------

    @property
    def is_x_dependent(self) -> bool:
        if self.fn is not None:
            return True
        probe = np.array([[0.1], [0.7]])
        for a, _ in self.terms:
            v = np.asarray(a(0.3, probe), dtype=float)
            if v.shape and not np.allclose(v, v.flat[0]):
                return True
        return False

    def value(self, t: float, x, y):
        """m(t, x, y); x broadcasts (grid field), y is one jump vector."""
        r = float(np.linalg.norm(np.atleast_1d(y)))
        if self.fn is not None:
            return self.fn(t, x, y)
        acc = None
        for a, b in self.terms:
            va = np.asarray(a(t, x), dtype=float)
            if b is not None:
                va = va * float(b(r))
            acc = va if acc is None else acc + va
        return acc

    def time_avg_terms(self, s: float, t: float):
        """[(integral of a_k over (s,t) at x=None, b_k)] for x-free terms."""
        if self.fn is not None or self.is_x_dependent:
            raise DomainError("coefficient depends on x; no multiplier form")
        out = []
        for a, b in self.terms:
            val, _ = integrate.quad(lambda r_: float(np.asarray(a(r_, None))),
                                    s, t, epsabs=1e-14, epsrel=1e-12, limit=200)
            out.append((val, b))
        return out

    def rescale_y(self, R: float) -> "CoefficientSpec":
        """m_R(t, x, y) = m(t, x, R y); bounds are unchanged."""
        R = float(R)
        if self.fn is not None:
            f = self.fn
            return CoefficientSpec(self.k, self.K, holder=self.holder,
                                   fn=lambda t, x, y: f(t, x, R * np.asarray(y)))
        terms = []
        for a, b in self.terms:
            if b is not None:
                b = RadialProfile.from_callable(
                    lambda r, _b=b: _b(R * np.asarray(r)),
                    name=f"{b.name}@{R:g}")
            terms.append((a, b))
        return CoefficientSpec(self.k, self.K, terms=terms, holder=self.holder)

    def x_average(self, grid) -> "CoefficientSpec":
        """Freeze x by averaging each spatial factor over the grid box."""
        if self.fn is not None:
            raise DomainError("cannot average a bare callable; give separable terms")
        terms = []
        for a, b in self.terms:
            def make(afn):
                def avg(t, x):
                    v = np.asarray(afn(t, grid.x_mesh()), dtype=float)
                    return float(np.mean(v))
                return avg
            terms.append((make(a), b))
        return CoefficientSpec(self.k, self.K, terms=terms, holder=self.holder)

    # -- validation -------------------------------------------------------

    def check_bounds(self, t_range=(0.0, 1.0), x_probe=None, slack: float = 1e-9):
        xs = x_probe if x_probe is not None else np.linspace(-4.0, 4.0, 17)
        rr = np.exp(np.linspace(math.log(1e-6), math.log(1e3), 25))
        for t in np.linspace(t_range[0], t_range[1], 9):
            for r in rr:
                v = np.asarray(self.value(float(t), xs, np.array([r])), dtype=float)
                if np.any(v < self.k - slack) or np.any(v > self.K + slack):
                    raise CoefficientBoundsError(
                        f"m(t={t:g}, ., |y|={r:g}) leaves [{self.k:g}, {self.K:g}]")

    def check_holder(self, dim: int):
        if self.holder is None:
            return
        beta, kappa = self.holder
        g = lambda r: float(kappa(r)) * r ** (dim - 1) * r ** (-dim - beta)
        _quad.check_integrable(g, "origin")
        _quad.integrate_log(g, 0.0, 1.0)

    def check_odd_cancellation(self, sigma: float, dim: int, t: float = 0.5):
        """sigma = 1 requires m(t,x,y)nu(dy) to kill odd first moments;
        for symmetric nu it is enough that m is even in y."""
        if sigma != 1.0 or self.fn is None:
            return
        xs = np.linspace(-2.0, 2.0, 5)
        for r in (0.01, 0.1, 0.5, 0.9):
            for z in np.eye(dim):
                a = np.asarray(self.fn(t, xs, r * z), dtype=float)
                b = np.asarray(self.fn(t, xs, -r * z), dtype=float)
                if np.max(np.abs(a - b)) > 1e-9 * self.K:
                    raise DomainError(
                        "sigma = 1 needs odd-moment cancellation; coefficient "
                        f"is uneven in y at |y|={r:g}")
