"""Sequence-alignment kernels with a compiled fast path.

The Cython extension is used when it was built; setting EVALKIT_PURE_PYTHON=1
(or a failed extension build) selects the pure-Python fallback. Both expose the
same three functions and are exercised against each other in the test suite.
"""

from __future__ import annotations

import os
from collections.abc import Sequence

from . import _pykernels

_FORCE_PURE = os.environ.get("EVALKIT_PURE_PYTHON", "").lower() in ("1", "true", "yes")

if not _FORCE_PURE:
    try:
        from . import _ckernels as _impl
        _BACKEND = "c"
    except ImportError:
        _impl = _pykernels
        _BACKEND = "python"
else:
    _impl = _pykernels
    _BACKEND = "python"

levenshtein = _impl.levenshtein
lcs_str = _impl.lcs_str
_lcs_ids = _impl.lcs_length


def backend() -> str:
    """Name of the active kernel backend: "c" or "python"."""
    return _BACKEND


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences."""
    ids: dict[str, int] = {}
    ia = [ids.setdefault(t, len(ids)) for t in a]
    ib = [ids.setdefault(t, len(ids)) for t in b]
    return _lcs_ids(ia, ib)
