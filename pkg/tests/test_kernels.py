"""Both kernel backends against each other and against direct formulas."""

import numpy as np
import pytest

from levykit._kernels import BACKEND, _fallback, cp_accumulate_1d, \
    symbol_reduce

try:
    from levykit._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None,
                                reason="compiled backend not built")


def reference_reduce(q, r, w, chi):
    out = np.zeros(len(q), dtype=complex)
    for i, qi in enumerate(q):
        t = qi * r
        term = np.exp(1j * t) - 1.0 - 1j * t * chi
        out[i] = np.sum(w * term)
    return out


def sample_inputs(seed=0, nq=40, nr=300):
    rng = np.random.Generator(np.random.Philox(seed))
    q = np.concatenate([[0.0], rng.uniform(-50, 50, nq - 1)])
    r = np.exp(rng.uniform(-8, 4, nr))
    w = rng.uniform(0.1, 2.0, nr)
    chi = (r < 1.0).astype(np.uint8)
    return q, r, w, chi


def test_fallback_matches_direct_formula():
    q, r, w, chi = sample_inputs()
    got = _fallback.symbol_reduce(q, r, w, chi)
    want = reference_reduce(q, r, w, chi)
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_small_argument_branch():
    # below |t| = 1e-4 the imaginary part switches to its series; the
    # naive exp(it) - 1 - it cancels catastrophically there, so compare
    # against the series itself (next omitted term is ~t^7/5040)
    t = np.array([1e-9, 1e-6, 5e-5])
    got = _fallback.symbol_reduce(t, np.ones(1), np.ones(1),
                                  np.ones(1, dtype=np.uint8))
    want_re = -2.0 * np.sin(0.5 * t) ** 2
    want_im = -t ** 3 / 6.0 * (1.0 - t ** 2 / 20.0 * (1.0 - t ** 2 / 42.0))
    np.testing.assert_allclose(got.real, want_re, rtol=1e-13)
    np.testing.assert_allclose(got.imag, want_im, rtol=1e-12)


@needs_core
@pytest.mark.parametrize("seed", range(4))
def test_backends_agree_on_symbol_reduce(seed):
    q, r, w, chi = sample_inputs(seed)
    a = _core.symbol_reduce(q, r, w, chi)
    b = _fallback.symbol_reduce(q, r, w, chi)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-13)


def reference_accumulate(u, bounds, eps, alpha):
    out = np.zeros(len(bounds) - 1)
    for k in range(len(bounds) - 1):
        for v in u[bounds[k]:bounds[k + 1]]:
            f = np.floor(2.0 * v)
            frac = max(2.0 * v - f, 1e-300)
            mag = eps * frac ** (-1.0 / alpha)
            out[k] += (2.0 * f - 1.0) * mag
    return out


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.7])
def test_fallback_accumulate_matches_reference(alpha):
    rng = np.random.Generator(np.random.Philox(11))
    u = rng.random(500)
    bounds = np.array([0, 3, 3, 120, 500], dtype=np.int64)
    out = np.zeros(4)
    _fallback.cp_accumulate_1d(u, bounds, 0.01, alpha, out)
    np.testing.assert_allclose(out, reference_accumulate(u, bounds, 0.01,
                                                         alpha), rtol=1e-10)
    assert out[1] == 0.0  # empty segment


@needs_core
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.7])
def test_backends_agree_on_accumulate(alpha):
    rng = np.random.Generator(np.random.Philox(12))
    u = rng.random(2000)
    bounds = np.array([0, 100, 700, 2000], dtype=np.int64)
    a = np.zeros(3)
    b = np.zeros(3)
    _core.cp_accumulate_1d(u, bounds, 0.05, alpha, a)
    _fallback.cp_accumulate_1d(u, bounds, 0.05, alpha, b)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_backend_name_is_exposed():
    assert BACKEND in ("cython", "numpy")
    assert symbol_reduce is not None and cp_accumulate_1d is not None
