"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
drop-in fallback. Both produce identical integer counts, so the choice
never affects results, only speed. ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

try:
    from moodscreen import _native as _impl
except ImportError:  # extension not built on this install
    from moodscreen import _pure as _impl

BACKEND: str = _impl.BACKEND
count_phrases = _impl.count_phrases
