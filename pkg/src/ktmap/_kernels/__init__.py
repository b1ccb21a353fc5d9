"""Kernel backend selection.

The compiled C++ extension is preferred when importable; otherwise the
pure-Python fallback is used. Set KTMAP_PURE=1 to force the fallback
(useful for benchmarking and for the backend-parity tests).
"""

import os

if os.environ.get("KTMAP_PURE"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

greedy_merge_seq = _impl.greedy_merge_seq
triangle_counts = _impl.triangle_counts

__all__ = ["BACKEND", "greedy_merge_seq", "triangle_counts"]
