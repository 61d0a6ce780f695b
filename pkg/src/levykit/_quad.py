"""Radial integration helpers.

Everything integrates in log-radius: integrands here are products of
powers and slowly varying factors, so the log axis turns endpoint
singularities into exponential decay that quad handles well.
"""

import math

import numpy as np
from scipy import integrate

from .errors import MomentDivergenceError


def integrate_log(g, lo: float, hi: float, rel_tol: float = 1e-11) -> float:
    """Integral of g(r) dr over (lo, hi) via the substitution r = e^u."""
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= lo < hi")
    a = -np.inf if lo == 0 else math.log(lo)
    b = np.inf if math.isinf(hi) else math.log(hi)
    val, _ = integrate.quad(lambda u: _safe(g, u), a, b,
                            epsabs=0.0, epsrel=rel_tol, limit=400)
    return val


def _safe(g, u):
    if abs(u) > 700.0:
        return 0.0
    r = math.exp(u)
    try:
        v = g(r) * r
    except (OverflowError, ZeroDivisionError):
        # deep-tail probe under- or overflowed; a convergent integrand
        # is negligible there
        return 0.0
    return float(v) if np.isfinite(v) else 0.0


def check_integrable(g, side: str, probe: float = None) -> None:
    """Raise if g's power-law slope at an endpoint makes ∫ g dr diverge.

    side="origin" probes r -> 0 (needs slope > -1), side="tail" probes
    r -> inf (needs slope < -1).
    """
    if side == "origin":
        r0 = probe or 1e-9
        rs = np.array([r0, r0 * 2, r0 * 4])
        need_above = True
    else:
        r0 = probe or 1e9
        rs = np.array([r0, r0 * 2, r0 * 4])
        need_above = False
    vals = np.array([_pos(g, r) for r in rs])
    if np.any(vals == 0.0):
        return
    slope = np.polyfit(np.log(rs), np.log(vals), 1)[0]
    margin = 1e-6
    if need_above and slope <= -1 + margin:
        raise MomentDivergenceError("origin", f"integrand slope {slope:.4f} at r~{r0:g}")
    if not need_above and slope >= -1 - margin:
        raise MomentDivergenceError("tail", f"integrand slope {slope:.4f} at r~{r0:g}")


def _pos(g, r):
    v = float(g(r))
    return v if v > 0 else 0.0
