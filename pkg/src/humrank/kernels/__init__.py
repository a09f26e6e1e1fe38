"""Scoring kernels with a compiled core and a pure-numpy fallback.

The Cython extension is preferred when importable; set HUMRANK_NO_NATIVE=1
to force the fallback (useful for parity testing and benchmarking). Both
implementations produce bit-identical results.
"""

from __future__ import annotations

import os

from humrank.kernels import _fallback

if os.environ.get("HUMRANK_NO_NATIVE"):
    _impl = _fallback
    HAVE_NATIVE = False
else:
    try:
        from humrank.kernels import _native as _impl  # type: ignore[no-redef]

        HAVE_NATIVE = True
    except ImportError:
        _impl = _fallback
        HAVE_NATIVE = False

bm25_accumulate = _impl.bm25_accumulate
topk = _impl.topk

__all__ = ["bm25_accumulate", "topk", "HAVE_NATIVE"]
