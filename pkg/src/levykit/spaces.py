"""Bessel-potential and generator norms on grid fields.

Norms are Fourier-multiplier applications followed by discrete L_p
quadrature; space-time norms stack slices with a composite trapezoid
in t.  The test-field corpus is fixed and seeded so sup-ratio reports
reproduce bit for bit.
"""

import math
from dataclasses import dataclass, field as _field

import numpy as np

from . import symbols
from .density import DensityField, apply_generator
from .errors import DomainError
from .grid import SpectralGrid
from .measures import MeasureSpec, symmetrize

__all__ = ["NormReport", "multiplier_norm", "norm_report",
           "spacetime_norm", "ContinuityReport", "continuity_ratio",
           "test_fields", "CORPUS_VERSION"]

CORPUS_VERSION = 1


def _unwrap(field, grid):
    if isinstance(field, DensityField):
        return field.grid, field.values
    if grid is None:
        raise DomainError("grid required for a bare array field")
    return grid, np.asarray(field, dtype=float)


def multiplier_norm(field, spec: MeasureSpec, s: float, p: float,
                    kind: str = "bessel", grid: SpectralGrid = None,
                    method: str = "auto") -> float:
    """L_p norm of a multiplier applied to a field.

    Parameters
    ----------
    field : DensityField or ndarray
    spec : MeasureSpec
    s : float
        Order; ignored for kind "generator".
    p : float
        Grid L_p exponent, p in [1, oo).
    kind : str
        "bessel" applies (1 - psi_sym)^s, "fractional" applies
        -(-psi_sym)^s, "generator" applies psi itself.

    Notes
    -----
    The symmetrized symbol is real and nonpositive, so both power
    multipliers are real; "generator" keeps the full symbol and is the
    one path that sees an asymmetric measure's odd part.
    """
    if isinstance(s, complex) or not math.isfinite(float(s)):
        raise DomainError("order s must be a finite real number")
    s = float(s)
    if p < 1 or not math.isfinite(p):
        raise DomainError("p must lie in [1, oo)")
    grid, values = _unwrap(field, grid)
    if kind == "generator":
        out = apply_generator(spec, values, grid=grid, method=method)
        return grid.lp_norm(out, p)
    psis = np.real(symbols.psi(symmetrize(spec), grid.xi_mesh(),
                               method=method))
    if kind == "bessel":
        mult = (1.0 - psis) ** s
    elif kind == "fractional":
        if s <= 0:
            raise DomainError("fractional kind needs s > 0")
        mult = -((-psis) ** s)
    else:
        raise DomainError(f"unknown norm kind {kind!r}")
    out = grid.apply_multiplier(values, mult)
    return grid.lp_norm(out, p)


@dataclass
class NormReport:
    s: float
    p: float
    lp: float
    generator_lp: float
    bessel: float

    def to_csv(self) -> str:
        rows = ["quantity,value", f"s,{self.s:g}", f"p,{self.p:g}",
                f"lp,{self.lp:.12g}", f"generator_lp,{self.generator_lp:.12g}",
                f"bessel,{self.bessel:.12g}"]
        return "\n".join(rows) + "\n"


def norm_report(field, spec: MeasureSpec, s: float, p: float,
                grid: SpectralGrid = None) -> NormReport:
    grid, values = _unwrap(field, grid)
    return NormReport(s=s, p=p,
                      lp=grid.lp_norm(values, p),
                      generator_lp=multiplier_norm(values, spec, 1.0, p,
                                                   "generator", grid),
                      bessel=multiplier_norm(values, spec, s, p, "bessel",
                                             grid))


def spacetime_norm(trajectory, p: float, grid: SpectralGrid = None) -> float:
    """(integral of |f(t)|_p^p dt)^(1/p) by composite trapezoid.

    ``trajectory`` is a list of (t_i, field_i) with strictly increasing
    times; a single slice has no time extent and gives 0.
    """
    if p < 1 or not math.isfinite(p):
        raise DomainError("p must lie in [1, oo)")
    if len(trajectory) == 0:
        raise DomainError("empty trajectory")
    ts = np.array([float(t) for t, _ in trajectory])
    if np.any(np.diff(ts) <= 0):
        raise DomainError("trajectory times must be strictly increasing")
    if len(ts) == 1:
        return 0.0
    powers = []
    for _, f in trajectory:
        g, v = _unwrap(f, grid)
        powers.append(g.lp_norm(v, p) ** p)
    return float(np.trapezoid(np.array(powers), ts)) ** (1.0 / p)


@dataclass
class ContinuityReport:
    sup: float
    ratios: list = _field(default_factory=list)
    skipped: list = _field(default_factory=list)

    def __str__(self):
        s = f"sup |L^pi f|_p / |L^nu f|_p = {self.sup:.6g} over {len(self.ratios)} fields"
        if self.skipped:
            s += f" ({len(self.skipped)} skipped: |L^nu f|_p below guard)"
        return s


def generator_multiplier(spec: MeasureSpec, grid: SpectralGrid) -> np.ndarray:
    """Field-side symbol mesh, preferring the shared-node lattice engine."""
    xi = grid.xi_mesh()
    cf = symbols.closed_form(spec, xi)
    if cf is not None:
        return cf
    return symbols.psi(spec, xi, method="grid")


def continuity_ratio(pi_spec: MeasureSpec, spec: MeasureSpec, fields,
                     p: float, grid: SpectralGrid = None,
                     guard: float = 1e-12) -> ContinuityReport:
    """Sup over test fields of |L^pi f|_p / |L^nu f|_p.

    Each symbol is evaluated once on the lattice and reused across the
    corpus.  Fields whose denominator norm falls under ``guard`` are
    skipped and listed in the report rather than polluting the sup.
    """
    ratios, skipped = [], []
    mults = {}
    for item in fields:
        name, f = item if isinstance(item, tuple) else (f"field{len(ratios)}", item)
        g, v = _unwrap(f, grid)
        key = id(g)
        if key not in mults:
            mults[key] = (generator_multiplier(pi_spec, g),
                          generator_multiplier(spec, g))
        m_pi, m_nu = mults[key]
        den = g.lp_norm(g.apply_multiplier(v, m_nu), p)
        if den < guard:
            skipped.append(name)
            continue
        num = g.lp_norm(g.apply_multiplier(v, m_pi), p)
        ratios.append((name, num / den))
    if not ratios:
        raise DomainError("every test field fell under the denominator guard")
    sup = max(r for _, r in ratios)
    return ContinuityReport(sup=sup, ratios=ratios, skipped=skipped)


def _bump(z):
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


def test_fields(grid: SpectralGrid, seed: int = 0, n_random: int = 4,
                band: float = None) -> list:
    """The versioned norm-test corpus on a grid.

    Gaussians at three widths, two bump differences, and ``n_random``
    seeded band-limited fields with flat spectrum and random phases up
    to frequency ``band`` (default an eighth of Nyquist).  Deterministic
    in (grid shape, seed); CORPUS_VERSION bumps when the recipe changes.
    """
    if band is None:
        band = 0.125 * grid.n / (4.0 * grid.L)
    x = grid.x_mesh()
    r2 = x ** 2 if grid.dim == 1 else np.sum(x ** 2, axis=-1)
    out = []
    for sig in (0.5, 1.0, 2.0):
        out.append((f"gauss{sig:g}", np.exp(-r2 / (2.0 * sig * sig))))
    x0 = x if grid.dim == 1 else x[..., 0]
    for a, w in ((2.0, 1.5), (1.0, 0.75)):
        out.append((f"bumpdiff{a:g}",
                    _bump((x0 - a) / w) - _bump((x0 + a) / w)))
    rng = np.random.Generator(np.random.Philox(seed))
    xi = grid.xi_mesh()
    xin = np.abs(xi) if grid.dim == 1 else np.sqrt(np.sum(xi ** 2, axis=-1))
    mask = (xin <= band) & (xin > 0)
    for j in range(n_random):
        phase = rng.random(mask.shape)
        spec_hat = np.where(mask, np.exp(2j * np.pi * phase), 0.0)
        f = np.fft.ifftn(spec_hat).real
        nrm = float(np.max(np.abs(f)))
        out.append((f"band{j}", f / (nrm if nrm > 0 else 1.0)))
    return out
