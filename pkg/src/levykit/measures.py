"""Levy measure families and the tail/scale calculus on them.

Each family fixes a jump measure nu on R^d \\ {0} through closed-form or
profile data. The quantities everything downstream consumes are the
radial tail delta(r) = nu({|y| > r}), the scale profile w = 1/delta, the
normalized rescaling nu_R(dy) = w(R) nu(R dy), truncated moments of
nu_R, and the small-ball nondegeneracy infimum.

Families:

* RadialStable(dim, alpha, c): density c |y|^(-d-alpha).
* Anisotropic(dim, alpha, c_1..c_d): independent axis jumps with
  density c_i |y_i|^(-1-alpha) along each coordinate axis.
* RadialAngular(dim, radial, atoms or uniform_weight): separated radial
  kernel j(r) and a finite (or uniform) angular part.
* IsotropicUnimodal(dim, gamma, c_low, c_high): radial density
  c r^(-d) / gamma(r) for a non-decreasing growth profile gamma.

sigma is the small-jump divergence exponent; it selects the gradient
truncation chi_sigma (absent for sigma < 1, cut at |y| <= 1 for
sigma = 1, global for sigma > 1).
"""

import io
import math
import os
import warnings

import numpy as np

from . import _quad
from .errors import ConfigError, DomainError, MomentDivergenceError
from .profiles import RadialProfile


def surface_area(dim: int) -> float:
    if dim == 1:
        return 2.0
    if dim == 2:
        return 2.0 * math.pi
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _power_moment(pref: float, expo: float, lo: float, hi: float) -> float:
    # pref * integral of r^(expo - 1) dr over (lo, hi]
    if expo == 0.0:
        if lo == 0.0:
            raise MomentDivergenceError("origin", "log divergence")
        if math.isinf(hi):
            raise MomentDivergenceError("tail", "log divergence")
        return pref * math.log(hi / lo)
    if lo == 0.0 and expo < 0:
        raise MomentDivergenceError("origin", f"exponent {expo:.3g}")
    if math.isinf(hi) and expo > 0:
        raise MomentDivergenceError("tail", f"exponent {expo:.3g}")
    hi_t = 0.0 if math.isinf(hi) else hi ** expo
    lo_t = 0.0 if lo == 0.0 else lo ** expo
    return pref * (hi_t - lo_t) / expo


class MeasureSpec:
    """Base for the four families; holds dim, sigma and symmetry."""

    family = "base"

    def __init__(self, dim: int, sigma: float, symmetric: bool):
        if dim < 1:
            raise DomainError("dim must be a positive integer")
        if not 0.0 < sigma < 2.0:
            raise DomainError("sigma must lie in (0, 2)")
        self.dim = int(dim)
        self.sigma = float(sigma)
        self.symmetric = bool(symmetric)

    # family hooks
    def tail(self, r):
        raise NotImplementedError

    def radial_moment(self, q: float, lo: float, hi: float) -> float:
        """Integral of |y|^q nu(dy) over lo < |y| <= hi."""
        raise NotImplementedError

    def second_moment_dir(self, u: np.ndarray, cap: float) -> float:
        """Integral of (u . y)^2 nu(dy) over |y| <= cap."""
        raise NotImplementedError

    def rescaled(self, R: float, wR: float) -> "MeasureSpec":
        raise NotImplementedError

    def scaled_mass(self, factor: float) -> "MeasureSpec":
        raise NotImplementedError

    def reflected(self) -> "MeasureSpec":
        return self

    def symmetrized(self) -> "MeasureSpec":
        return self

    def ray_decomposition(self):
        """[(unit direction, radial density rho(r))] or None if continuum."""
        return None

    def radial_mass(self):
        """m(r) with nu isotropic-equivalent to m(r) dr x uniform angle."""
        return None

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, sigma={self.sigma:g})"


class RadialStable(MeasureSpec):
    """nu(dy) = c dy / |y|^(d + alpha)."""

    family = "radial_stable"

    def __init__(self, dim: int, alpha: float, c: float = 1.0):
        if not 0.0 < alpha < 2.0:
            raise DomainError("alpha must lie in (0, 2)")
        if c <= 0:
            raise DomainError("c must be positive")
        super().__init__(dim, sigma=alpha, symmetric=True)
        self.alpha = float(alpha)
        self.c = float(c)
        self._pref = surface_area(dim) * self.c

    def tail(self, r):
        return (self._pref / self.alpha) * np.asarray(r, dtype=float) ** (-self.alpha)

    def radial_moment(self, q, lo, hi):
        return _power_moment(self._pref, q - self.alpha, lo, hi)

    def second_moment_dir(self, u, cap):
        return self._pref / self.dim * cap ** (2 - self.alpha) / (2 - self.alpha)

    def rescaled(self, R, wR):
        return RadialStable(self.dim, self.alpha,
                            c=self.alpha / surface_area(self.dim))

    def scaled_mass(self, factor):
        return RadialStable(self.dim, self.alpha, c=self.c * factor)

    def ray_decomposition(self):
        if self.dim != 1:
            return None
        rho = lambda r: self.c * r ** (-1.0 - self.alpha)
        return [(np.array([1.0]), rho), (np.array([-1.0]), rho)]

    def radial_mass(self):
        return lambda r: self._pref * r ** (-1.0 - self.alpha)


class Anisotropic(MeasureSpec):
    """Axis measure: jumps along coordinate axes, density c_i |y_i|^(-1-alpha)."""

    family = "anisotropic"

    def __init__(self, dim: int, alpha: float, c):
        if not 0.0 < alpha < 2.0:
            raise DomainError("alpha must lie in (0, 2)")
        c = tuple(float(v) for v in np.atleast_1d(c))
        if len(c) != dim:
            raise DomainError(f"need {dim} axis weights, got {len(c)}")
        if any(v <= 0 for v in c):
            raise DomainError("axis weights must be positive")
        super().__init__(dim, sigma=alpha, symmetric=True)
        self.alpha = float(alpha)
        self.c = c
        self._pref = 2.0 * sum(c)

    def tail(self, r):
        return (self._pref / self.alpha) * np.asarray(r, dtype=float) ** (-self.alpha)

    def radial_moment(self, q, lo, hi):
        return _power_moment(self._pref, q - self.alpha, lo, hi)

    def second_moment_dir(self, u, cap):
        u = np.asarray(u, dtype=float)
        per_axis = 2.0 * cap ** (2 - self.alpha) / (2 - self.alpha)
        return per_axis * float(np.dot(np.asarray(self.c), u ** 2))

    def rescaled(self, R, wR):
        s = self.alpha / self._pref
        return Anisotropic(self.dim, self.alpha,
                           tuple(ci * s for ci in self.c))

    def scaled_mass(self, factor):
        return Anisotropic(self.dim, self.alpha,
                           tuple(ci * factor for ci in self.c))

    def ray_decomposition(self):
        rays = []
        for i, ci in enumerate(self.c):
            z = np.zeros(self.dim)
            z[i] = 1.0
            rho = (lambda cc: lambda r: cc * r ** (-1.0 - self.alpha))(ci)
            rays.append((z.copy(), rho))
            rays.append((-z, rho))
        return rays


class RadialAngular(MeasureSpec):
    """Separated radial kernel j and angular part.

    The angular part is either a finite list of (direction, weight)
    atoms or, in d = 2, the uniform density with total mass
    uniform_weight. nu(B) = sum_k s_k int 1_B(r z_k) j(r) r^(d-1) dr.
    """

    family = "radial_angular"

    def __init__(self, dim: int, radial: RadialProfile, atoms=None,
                 uniform_weight: float | None = None, sigma: float = 1.0):
        if dim not in (1, 2):
            raise DomainError("RadialAngular supports dim 1 and 2")
        if (atoms is None) == (uniform_weight is None):
            raise DomainError("give either atoms or uniform_weight")
        if uniform_weight is not None:
            if dim != 2:
                raise DomainError("uniform angular part needs dim 2")
            if uniform_weight <= 0:
                raise DomainError("uniform_weight must be positive")
            symmetric = True
            self.atoms = None
            self.uniform_weight = float(uniform_weight)
        else:
            parsed = []
            for z, s in atoms:
                z = np.atleast_1d(np.asarray(z, dtype=float))
                if z.shape != (dim,):
                    raise DomainError("atom direction has the wrong dimension")
                nz = float(np.linalg.norm(z))
                if nz == 0 or s <= 0:
                    raise DomainError("atoms need nonzero directions, positive weights")
                parsed.append((z / nz, float(s)))
            self.atoms = parsed
            self.uniform_weight = None
            symmetric = self._atoms_symmetric(parsed)
        super().__init__(dim, sigma=sigma, symmetric=symmetric)
        self.radial = radial
        if sigma == 1.0 and not symmetric:
            # first-moment cancellation over annuli reduces to the mean atom
            drift = sum(s * z for z, s in self.atoms)
            tot = sum(s for _, s in self.atoms)
            if np.linalg.norm(drift) > 1e-12 * tot:
                raise DomainError(
                    "sigma = 1 requires odd-moment cancellation; "
                    f"atom mean {drift} does not vanish")
        self._check_sigma_estimate()

    @staticmethod
    def _atoms_symmetric(atoms) -> bool:
        for z, s in atoms:
            if not any(np.allclose(z, -z2) and abs(s - s2) < 1e-12 * (s + s2)
                       for z2, s2 in atoms):
                return False
        return True

    def _check_sigma_estimate(self):
        lo = max(self.radial.domain[0], 1e-9)
        try:
            q = [self._radial_integral(0.0, r, math.inf) for r in (lo, 4 * lo)]
        except (MomentDivergenceError, DomainError):
            return
        if min(q) <= 0:
            return
        est = -(math.log(q[1] / q[0]) / math.log(4.0))
        if est > 0.05 and abs(est - self.sigma) > 0.1:
            warnings.warn(
                f"declared sigma {self.sigma:g} vs estimated divergence "
                f"exponent {est:.3f}", stacklevel=3)

    @property
    def total_weight(self) -> float:
        if self.uniform_weight is not None:
            return self.uniform_weight
        return sum(s for _, s in self.atoms)

    def _radial_integral(self, q, lo, hi):
        # integral of r^q j(r) r^(d-1) dr over (lo, hi]
        if self.radial.exponent is not None:
            scale = self.radial(1.0)
            return _power_moment(scale, q + self.dim + self.radial.exponent, lo, hi)
        g = lambda r: r ** (q + self.dim - 1) * self.radial(r)
        if lo == 0.0:
            _quad.check_integrable(g, "origin")
        if math.isinf(hi):
            _quad.check_integrable(g, "tail")
        return _quad.integrate_log(g, lo, hi)

    def tail(self, r):
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([self.total_weight * self._radial_integral(0.0, v, math.inf)
                        for v in rs])
        return out if np.asarray(r).shape else float(out[0])

    def radial_moment(self, q, lo, hi):
        return self.total_weight * self._radial_integral(q, lo, hi)

    def second_moment_dir(self, u, cap):
        base = self._radial_integral(2.0, 0.0, cap)
        if self.uniform_weight is not None:
            ang = self.uniform_weight / self.dim
        else:
            u = np.asarray(u, dtype=float)
            ang = sum(s * float(np.dot(u, z)) ** 2 for z, s in self.atoms)
        return ang * base

    def rescaled(self, R, wR):
        base = self.radial
        scale = wR * R ** self.dim
        fn = (lambda b, Rv, sv: lambda r: sv * b(Rv * r))(base, R, scale)
        dom = base.domain
        new_dom = (dom[0] / R if dom[0] > 0 else 0.0,
                   dom[1] / R if math.isfinite(dom[1]) else math.inf)
        radial = RadialProfile(fn, name=f"rescaled[{base.name}]", domain=new_dom,
                               exponent=base.exponent)
        return RadialAngular(self.dim, radial, atoms=self.atoms,
                             uniform_weight=self.uniform_weight, sigma=self.sigma)

    def scaled_mass(self, factor):
        if self.uniform_weight is not None:
            return RadialAngular(self.dim, self.radial,
                                 uniform_weight=self.uniform_weight * factor,
                                 sigma=self.sigma)
        return RadialAngular(self.dim, self.radial,
                             atoms=[(z, s * factor) for z, s in self.atoms],
                             sigma=self.sigma)

    def reflected(self):
        if self.uniform_weight is not None or self.symmetric:
            return self
        return RadialAngular(self.dim, self.radial,
                             atoms=[(-z, s) for z, s in self.atoms],
                             sigma=self.sigma)

    def symmetrized(self):
        if self.uniform_weight is not None or self.symmetric:
            return self
        atoms = [(z, 0.5 * s) for z, s in self.atoms]
        atoms += [(-z, 0.5 * s) for z, s in self.atoms]
        return RadialAngular(self.dim, self.radial, atoms=atoms, sigma=self.sigma)

    def ray_decomposition(self):
        if self.uniform_weight is not None:
            return None
        d = self.dim
        out = []
        for z, s in self.atoms:
            rho = (lambda sv: lambda r: sv * self.radial(r) * r ** (d - 1))(s)
            out.append((z, rho))
        return out

    def radial_mass(self):
        if self.uniform_weight is None:
            return None
        d = self.dim
        return lambda r: self.uniform_weight * self.radial(r) * r ** (d - 1)


class IsotropicUnimodal(MeasureSpec):
    """Radial density c r^(-d) / gamma(r), gamma non-decreasing.

    c_low is the constant actually used in evaluation; c_high is carried
    for envelope comparisons (set both equal for an exact density).
    """

    family = "isotropic_unimodal"

    def __init__(self, dim: int, gamma: RadialProfile, c_low: float = 1.0,
                 c_high: float | None = None, sigma: float | None = None):
        c_high = c_low if c_high is None else c_high
        if not 0 < c_low <= c_high:
            raise DomainError("need 0 < c_low <= c_high")
        est = self._estimate_sigma(gamma)
        if sigma is None:
            if est is None:
                raise DomainError("cannot estimate sigma; pass it explicitly")
            sigma = est
        elif est is not None and abs(est - sigma) > 0.1:
            warnings.warn(f"declared sigma {sigma:g} vs gamma slope {est:.3f} "
                          "near the origin", stacklevel=2)
        super().__init__(dim, sigma=sigma, symmetric=True)
        self.gamma = gamma
        self.c_low = float(c_low)
        self.c_high = float(c_high)
        self._pref = surface_area(dim) * self.c_low

    @staticmethod
    def _estimate_sigma(gamma: RadialProfile):
        if gamma.exponent is not None:
            return float(gamma.exponent)
        lo = max(gamma.domain[0], 1e-9)
        try:
            v0, v1 = gamma(lo), gamma(4 * lo)
        except DomainError:
            return None
        if v0 <= 0 or v1 <= 0:
            return None
        s = math.log(v1 / v0) / math.log(4.0)
        return s if 0.0 < s < 2.0 else None

    def tail(self, r):
        if self.gamma.exponent is not None:
            p = self.gamma.exponent
            scale = self.gamma(1.0)
            rs = np.asarray(r, dtype=float)
            return self._pref / (p * scale) * rs ** (-p)
        rs = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([self._pref *
                        _quad.integrate_log(lambda s: 1.0 / (s * self.gamma(s)),
                                            v, math.inf) for v in rs])
        return out if np.asarray(r).shape else float(out[0])

    def radial_moment(self, q, lo, hi):
        if self.gamma.exponent is not None:
            p = self.gamma.exponent
            return _power_moment(self._pref / self.gamma(1.0), q - p, lo, hi)
        g = lambda r: r ** (q - 1) / self.gamma(r)
        if lo == 0.0:
            _quad.check_integrable(g, "origin")
        if math.isinf(hi):
            _quad.check_integrable(g, "tail")
        return self._pref * _quad.integrate_log(g, lo, hi)

    def second_moment_dir(self, u, cap):
        if self.gamma.exponent is not None:
            p = self.gamma.exponent
            return _power_moment(self._pref / self.gamma(1.0), 2.0 - p,
                                 0.0, cap) / self.dim
        return self._pref / self.dim * _quad.integrate_log(
            lambda r: r / self.gamma(r), 0.0, cap)

    def rescaled(self, R, wR):
        base = self.gamma
        fn = (lambda b, Rv, wv: lambda r: b(Rv * r) / wv)(base, R, wR)
        inv = None
        if base._inverse_fn is not None:
            inv = (lambda b, Rv, wv: lambda t: b.inverse(wv * t) / Rv)(base, R, wR)
        dom = base.domain
        new_dom = (dom[0] / R if dom[0] > 0 else 0.0,
                   dom[1] / R if math.isfinite(dom[1]) else math.inf)
        gamma = RadialProfile(fn, name=f"rescaled[{base.name}]", domain=new_dom,
                              exponent=base.exponent, inverse_fn=inv)
        return IsotropicUnimodal(self.dim, gamma, c_low=self.c_low,
                                 c_high=self.c_high, sigma=self.sigma)

    def scaled_mass(self, factor):
        return IsotropicUnimodal(self.dim, self.gamma,
                                 c_low=self.c_low * factor,
                                 c_high=self.c_high * factor,
                                 sigma=self.sigma)

    def radial_mass(self):
        return lambda r: self._pref / (r * self.gamma(r))


# ---------------------------------------------------------------------------
# calculus on specs


def tail_mass(spec: MeasureSpec, r) -> float:
    """nu({|y| > r})."""
    if np.any(np.asarray(r) <= 0):
        raise DomainError("tail_mass needs r > 0")
    return spec.tail(r)


def w_profile(spec: MeasureSpec) -> RadialProfile:
    """Scale profile w = 1/delta with an exact inverse when closed-form."""
    if isinstance(spec, (RadialStable, Anisotropic)):
        pref = spec._pref / spec.alpha
        return RadialProfile.power(spec.alpha, 1.0 / pref,
                                   name=f"w[{spec.family}]")
    if isinstance(spec, IsotropicUnimodal) and spec.gamma.exponent is not None:
        p = spec.gamma.exponent
        pref = spec._pref / (p * spec.gamma(1.0))
        return RadialProfile.power(p, 1.0 / pref, name=f"w[{spec.family}]")
    return RadialProfile.from_callable(lambda r: 1.0 / spec.tail(r),
                                       name=f"w[{spec.family}]")


def rescale(spec: MeasureSpec, R: float) -> MeasureSpec:
    """Zoomed measure nu_R(dy) = w(R) nu(R dy); unit tail mass at r = 1."""
    if R <= 0:
        raise DomainError("rescale needs R > 0")
    wR = 1.0 / float(spec.tail(R))
    return spec.rescaled(R, wR)


def comparison_rescale(pi_spec: MeasureSpec, nu_spec: MeasureSpec,
                       R: float) -> MeasureSpec:
    """Zoom of pi normalized by nu's profile: w_nu(R) pi(R dy).

    Linear in pi, unlike rescale which self-normalizes; scaling pi by a
    constant scales the result by the same constant.
    """
    if R <= 0:
        raise DomainError("comparison_rescale needs R > 0")
    factor = float(pi_spec.tail(R)) / float(nu_spec.tail(R))
    return rescale(pi_spec, R).scaled_mass(factor)


def reflect(spec: MeasureSpec) -> MeasureSpec:
    return spec.reflected()


def symmetrize(spec: MeasureSpec) -> MeasureSpec:
    return spec.symmetrized()


class MomentReport:
    """Lemma-style truncated moment pair for the rescaled measure."""

    def __init__(self, small: float, large: float, alpha1: float,
                 alpha2: float, R: float):
        self.small = small
        self.large = large
        self.alpha1 = alpha1
        self.alpha2 = alpha2
        self.R = R

    def __repr__(self):
        return (f"MomentReport(small={self.small:.6g}, large={self.large:.6g}, "
                f"R={self.R:g})")


def truncated_moments(spec: MeasureSpec, alpha1: float, alpha2: float,
                      R: float = 1.0) -> MomentReport:
    """Moments of nu_R: |y|^alpha1 inside the unit ball, |y|^alpha2 outside."""
    if alpha1 <= 0 or alpha2 <= 0:
        raise DomainError("moment exponents must be positive")
    if R <= 0:
        raise DomainError("R must be positive")
    wR = 1.0 / float(spec.tail(R))
    small = wR * R ** (-alpha1) * spec.radial_moment(alpha1, 0.0, R)
    large = wR * R ** (-alpha2) * spec.radial_moment(alpha2, R, math.inf)
    return MomentReport(small, large, alpha1, alpha2, R)


class NondegeneracyReport:
    def __init__(self, value: float, witness_R: float, witness_dir: np.ndarray,
                 samples: int):
        self.value = value
        self.witness_R = witness_R
        self.witness_dir = witness_dir
        self.samples = samples

    def __repr__(self):
        return (f"NondegeneracyReport(value={self.value:.6g}, "
                f"R={self.witness_R:g}, dir={self.witness_dir})")


def unit_directions(dim: int, n: int = 16) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    th = 2.0 * math.pi * np.arange(n) / n
    return np.stack([np.cos(th), np.sin(th)], axis=1)


def nondegeneracy(spec: MeasureSpec, R_values=None, n_dirs: int = 16
                  ) -> NondegeneracyReport:
    """Sampled infimum over scales and directions of the small-ball
    second moment of the rescaled measure.

    Returns value ~0 with the failing (R, direction) witness when the
    measure is degenerate in some direction.
    """
    if R_values is None:
        R_values = 2.0 ** np.arange(-10, 11)
    dirs = unit_directions(spec.dim, n_dirs)
    best = math.inf
    wit_R, wit_dir = None, None
    for R in np.asarray(R_values, dtype=float):
        wR = 1.0 / float(spec.tail(R))
        scale = wR * R ** -2.0
        for u in dirs:
            q = scale * spec.second_moment_dir(u, R)
            if q < best:
                best, wit_R, wit_dir = q, float(R), u
    if best < 1e-12:
        best = 0.0
    return NondegeneracyReport(best, wit_R, wit_dir,
                               samples=len(R_values) * len(dirs))


# ---------------------------------------------------------------------------
# config serialization (line oriented "key = value")

_FAMILIES = ("radial_stable", "anisotropic", "isotropic_unimodal")
_KEYS = ("family", "dim", "alpha", "c", "sigma", "gamma_table")


def to_config(spec: MeasureSpec) -> str:
    lines = [f"family = {spec.family}", f"dim = {spec.dim}"]
    if isinstance(spec, RadialStable):
        lines += [f"alpha = {spec.alpha!r}", f"c = {spec.c!r}"]
    elif isinstance(spec, Anisotropic):
        lines += [f"alpha = {spec.alpha!r}",
                  "c = " + ", ".join(repr(v) for v in spec.c)]
    elif isinstance(spec, IsotropicUnimodal):
        path = getattr(spec, "gamma_table_path", None)
        if path is not None:
            lines += [f"gamma_table = {path}"]
        elif spec.gamma.exponent is not None and spec.gamma(1.0) == 1.0:
            lines += [f"alpha = {spec.gamma.exponent!r}"]
        else:
            raise ConfigError("cannot serialize a non-power gamma without "
                              "a gamma_table path")
        lines += ["c = " + ", ".join(repr(v) for v in (spec.c_low, spec.c_high))]
    else:
        raise ConfigError(f"family {spec.family} has no config form")
    lines += [f"sigma = {spec.sigma!r}"]
    return "\n".join(lines) + "\n"


def parse_config(text: str, base_dir: str = ".") -> MeasureSpec:
    kv: dict[str, str] = {}
    for ln, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {ln}: unknown key '{key}'")
        if key in kv:
            raise ConfigError(f"line {ln}: duplicate key '{key}'")
        kv[key] = val

    def _num(key):
        try:
            return float(kv[key])
        except ValueError:
            raise ConfigError(f"key '{key}': not a number: {kv[key]!r}") from None

    family = kv.get("family")
    if family not in _FAMILIES:
        raise ConfigError(f"family must be one of {_FAMILIES}, got {family!r}")
    if "dim" not in kv:
        raise ConfigError("missing key 'dim'")
    try:
        dim = int(kv["dim"])
    except ValueError:
        raise ConfigError(f"key 'dim': not an integer: {kv['dim']!r}") from None

    try:
        if family == "radial_stable":
            if "alpha" not in kv:
                raise ConfigError("radial_stable needs 'alpha'")
            c = _num("c") if "c" in kv else 1.0
            spec = RadialStable(dim, _num("alpha"), c)
        elif family == "anisotropic":
            if "alpha" not in kv or "c" not in kv:
                raise ConfigError("anisotropic needs 'alpha' and 'c'")
            try:
                c = [float(v) for v in kv["c"].split(",")]
            except ValueError:
                raise ConfigError(f"key 'c': bad list: {kv['c']!r}") from None
            spec = Anisotropic(dim, _num("alpha"), c)
        else:
            cs = [1.0]
            if "c" in kv:
                try:
                    cs = [float(v) for v in kv["c"].split(",")]
                except ValueError:
                    raise ConfigError(f"key 'c': bad list: {kv['c']!r}") from None
                if len(cs) not in (1, 2):
                    raise ConfigError("isotropic_unimodal 'c' takes one or two values")
            if "gamma_table" in kv:
                path = kv["gamma_table"]
                if not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                try:
                    tab = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
                except OSError as exc:
                    raise ConfigError(f"gamma_table: {exc}") from None
                if tab.shape[1] != 2:
                    raise ConfigError("gamma_table must have two columns r,value")
                gamma = RadialProfile.from_table(tab[:, 0], tab[:, 1],
                                                name=os.path.basename(path))
            elif "alpha" in kv:
                gamma = RadialProfile.power(_num("alpha"))
            else:
                raise ConfigError("isotropic_unimodal needs 'gamma_table' or 'alpha'")
            sigma = _num("sigma") if "sigma" in kv else None
            spec = IsotropicUnimodal(dim, gamma, c_low=cs[0],
                                     c_high=cs[-1], sigma=sigma)
            if "gamma_table" in kv:
                spec.gamma_table_path = kv["gamma_table"]
            return spec
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    if "sigma" in kv and abs(_num("sigma") - spec.sigma) > 1e-12:
        raise ConfigError(f"sigma {kv['sigma']} inconsistent with family "
                          f"(expect {spec.sigma:g})")
    return spec


def load_measure(path: str) -> MeasureSpec:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))
