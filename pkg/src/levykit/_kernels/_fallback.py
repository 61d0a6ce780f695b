"""Pure-numpy backend: blocked broadcasting versions of the hot kernels."""

import numpy as np

NAME = "numpy"

# keep the q x r broadcast under ~64 MB per block
_BLOCK = 1 << 23


def symbol_reduce(q: np.ndarray, r: np.ndarray, w: np.ndarray,
                  chi: np.ndarray) -> np.ndarray:
    """sum_j w_j (e^{i q_i r_j} - 1 - i q_i r_j chi_j) for every q_i.

    cos t - 1 is evaluated as -2 sin^2(t/2); sin t - t switches to its
    Taylor form below |t| = 1e-4. chi is 0/1 per node.
    """
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    chi = np.asarray(chi, dtype=np.uint8)
    out = np.empty(len(q), dtype=complex)
    step = max(1, _BLOCK // max(len(r), 1))
    for i0 in range(0, len(q), step):
        qb = q[i0:i0 + step, None]
        t = qb * r[None, :]
        s = np.sin(0.5 * t)
        re = (-2.0) * (w * s * s).sum(axis=1)
        st = np.sin(t)
        small = np.abs(t) < 1e-4
        t2 = t * t
        sin_m_t = np.where(small, -t * t2 / 6.0 * (1.0 - t2 / 20.0), st - t)
        im_terms = np.where(chi[None, :] == 1, sin_m_t, st)
        im = (w * im_terms).sum(axis=1)
        out[i0:i0 + step] = re + 1j * im
    return out


def cp_accumulate_1d(u: np.ndarray, bounds: np.ndarray, eps: float,
                     alpha: float, out: np.ndarray) -> None:
    """Fold one chunk of uniforms into per-path jump sums.

    Each uniform encodes sign (u < 1/2 vs >= 1/2) and magnitude
    eps * v^(-1/alpha) with v the folded remainder; bounds are the
    chunk-local segment boundaries, out accumulates len(bounds)-1 sums.
    """
    f = np.floor(2.0 * u)
    v = 2.0 * u - f
    np.maximum(v, 1e-300, out=v)
    if alpha == 1.0:
        mag = eps / v
    else:
        mag = eps * v ** (-1.0 / alpha)
    x = (2.0 * f - 1.0) * mag
    cs = np.concatenate(([0.0], np.cumsum(x)))
    out += cs[bounds[1:]] - cs[bounds[:-1]]
