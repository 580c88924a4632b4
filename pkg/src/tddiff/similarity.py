"""Token-sequence similarity used for rename detection.

The LCS kernel is compiled with Cython when available. Set
``TDDIFF_PURE_PYTHON=1`` to force the interpreted fallback.
"""

from __future__ import annotations

import os
from array import array
from collections.abc import Sequence
from fractions import Fraction

from . import _lcs_py

BACKEND = "python"
_kernel = _lcs_py.lcs_length

if not os.environ.get("TDDIFF_PURE_PYTHON"):
    try:
        from . import _lcs_ext
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        BACKEND = "cython"
        _kernel = _lcs_ext.lcs_length


def intern_pair(a: Sequence[str], b: Sequence[str]) -> tuple[array, array]:
    """Map two token sequences onto shared integer ids."""
    ids: dict[str, int] = {}
    ia = array("i", (ids.setdefault(t, len(ids)) for t in a))
    ib = array("i", (ids.setdefault(t, len(ids)) for t in b))
    return ia, ib


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    ia, ib = intern_pair(a, b)
    return _kernel(ia, ib)


def similarity(a: Sequence[str], b: Sequence[str]) -> Fraction:
    """Return ``2 * LCS / (len(a) + len(b))`` as an exact fraction.

    Two empty sequences are identical, so their similarity is 1.
    """
    total = len(a) + len(b)
    if total == 0:
        return Fraction(1)
    return Fraction(2 * lcs_length(a, b), total)


def similarity_upper_bound(len_a: int, len_b: int) -> Fraction:
    """Best similarity two sequences of these lengths could reach."""
    total = len_a + len_b
    if total == 0:
        return Fraction(1)
    return Fraction(2 * min(len_a, len_b), total)
