"""Pure-Python longest-common-subsequence kernel (fallback for ``_lcs_ext``)."""

from __future__ import annotations

from collections.abc import Sequence


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    if len(b) > len(a):
        a, b = b, a
    if not b:
        return 0
    m = len(b)
    row = [0] * (m + 1)
    for ai in a:
        prev_diag = 0
        for j in range(1, m + 1):
            tmp = row[j]
            if ai == b[j - 1]:
                row[j] = prev_diag + 1
            elif row[j - 1] > tmp:
                row[j] = row[j - 1]
            prev_diag = tmp
    return row[m]
