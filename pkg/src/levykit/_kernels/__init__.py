"""Backend selection for the two hot kernels.

The compiled extension is preferred; LEVYKIT_FORCE_FALLBACK=1 (or a
missing build) selects the pure-numpy implementation. Both expose the
same functions and are exercised against each other in the tests.
"""

import os

from . import _fallback

if os.environ.get("LEVYKIT_FORCE_FALLBACK", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

BACKEND = _impl.NAME

symbol_reduce = _impl.symbol_reduce
cp_accumulate_1d = _impl.cp_accumulate_1d

__all__ = ["BACKEND", "symbol_reduce", "cp_accumulate_1d", "_fallback"]
