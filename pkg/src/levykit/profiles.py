"""Radial profiles: positive functions of r > 0 with generalized inverses.

A profile is the basic scalar object the tail/scale calculus works with:
scale profiles w(r), radial kernels j(r), growth functions gamma(r).
Closed forms carry their exact power-law exponent when they have one;
tabulated profiles interpolate log-log and extrapolate with the end
slopes, with ``domain`` recording the trusted range.
"""

import math
from collections.abc import Callable

import numpy as np

from .errors import DomainError

_LOG_LO, _LOG_HI = math.log(1e-18), math.log(1e18)


class RadialProfile:
    def __init__(self, fn: Callable, name: str = "profile",
                 domain: tuple[float, float] = (0.0, math.inf),
                 exponent: float | None = None,
                 inverse_fn: Callable | None = None):
        self._fn = fn
        self.name = name
        self.domain = domain
        self.exponent = exponent
        self._inverse_fn = inverse_fn

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError(f"{self.name} evaluated at r <= 0")
        with np.errstate(over="ignore", under="ignore"):
            out = np.asarray(self._fn(r), dtype=float)
        return out if out.shape else float(out)

    def __repr__(self):
        return f"RadialProfile({self.name})"

    @classmethod
    def power(cls, exponent: float, scale: float = 1.0,
              name: str | None = None) -> "RadialProfile":
        if scale <= 0:
            raise DomainError("power profile needs scale > 0")
        name = name or f"{scale:g}*r^{exponent:g}"
        inv = None
        if exponent != 0:
            inv = lambda t: (t / scale) ** (1.0 / exponent)
        return cls(lambda r: scale * r ** exponent, name=name,
                   exponent=exponent, inverse_fn=inv)

    @classmethod
    def from_callable(cls, fn: Callable, name: str = "profile",
                      inverse_fn: Callable | None = None) -> "RadialProfile":
        return cls(fn, name=name, inverse_fn=inverse_fn)

    @classmethod
    def from_table(cls, r: np.ndarray, values: np.ndarray,
                   name: str = "table") -> "RadialProfile":
        r = np.asarray(r, dtype=float)
        values = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != values.shape or len(r) < 2:
            raise DomainError("table needs matching 1-d arrays, length >= 2")
        if np.any(r <= 0) or np.any(values <= 0):
            raise DomainError("table entries must be positive")
        if np.any(np.diff(r) <= 0):
            raise DomainError("table radii must be strictly increasing")
        lr, lv = np.log(r), np.log(values)

        def fn(x):
            lx = np.log(x)
            out = np.interp(lx, lr, lv)
            # end-slope extrapolation outside the tabulated range
            lo = lx < lr[0]
            hi = lx > lr[-1]
            if np.any(lo):
                s = (lv[1] - lv[0]) / (lr[1] - lr[0])
                out = np.where(lo, lv[0] + s * (lx - lr[0]), out)
            if np.any(hi):
                s = (lv[-1] - lv[-2]) / (lr[-1] - lr[-2])
                out = np.where(hi, lv[-1] + s * (lx - lr[-1]), out)
            return np.exp(out)

        return cls(fn, name=name, domain=(float(r[0]), float(r[-1])))

    def scaled(self, prefactor: float, name: str | None = None) -> "RadialProfile":
        if prefactor <= 0:
            raise DomainError("prefactor must be positive")
        inv = None
        if self._inverse_fn is not None:
            inv = lambda t: self._inverse_fn(t / prefactor)
        return RadialProfile(lambda r: prefactor * self._fn(r),
                             name=name or f"{prefactor:g}*{self.name}",
                             domain=self.domain,
                             exponent=self.exponent, inverse_fn=inv)

    def is_nondecreasing(self, n: int = 257) -> bool:
        lo, hi = self.sample_range()
        r = np.exp(np.linspace(math.log(lo), math.log(hi), n))
        v = self(r)
        return bool(np.all(np.diff(v) >= -1e-12 * np.abs(v[:-1])))

    def sample_range(self) -> tuple[float, float]:
        lo = self.domain[0] if self.domain[0] > 0 else 1e-12
        hi = self.domain[1] if math.isfinite(self.domain[1]) else 1e12
        return lo, hi

    def inverse(self, t, side: str = "left"):
        """Generalized inverse of a non-decreasing profile.

        side="left" gives inf{s : w(s) >= t}, side="right" gives
        inf{s : w(s) > t}; they agree wherever the profile is strictly
        increasing and continuous.
        """
        if self._inverse_fn is not None:
            t_arr = np.asarray(t, dtype=float)
            out = np.asarray(self._inverse_fn(t_arr), dtype=float)
            return out if out.shape else float(out)
        return self._inverse_bisect(t, side)

    def _inverse_bisect(self, t, side: str):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr <= 0):
            raise DomainError("inverse defined for t > 0 only")
        lo = np.full_like(t_arr, _LOG_LO)
        hi = np.full_like(t_arr, _LOG_HI)
        w_lo = self(np.exp(lo))
        w_hi = self(np.exp(hi))
        if np.any(w_lo >= t_arr) or np.any(w_hi < t_arr):
            raise DomainError("inverse target outside the profile's range")
        # monotone bisection in log r; strict vs non-strict crossing picks
        # the left- or right-continuous branch on flats
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            v = self(np.exp(mid))
            if side == "left":
                take_hi = v >= t_arr
            else:
                take_hi = v > t_arr
            hi = np.where(take_hi, mid, hi)
            lo = np.where(take_hi, lo, mid)
        out = np.exp(0.5 * (lo + hi))
        return out if np.asarray(t).shape else float(out[0])
