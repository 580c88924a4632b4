"""Descriptive and inferential statistics over revision deltas."""

from __future__ import annotations

import math
import statistics
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from scipy import stats as sps

from .decomposition import Direction

SYSTEM_ROWS = (Direction.DECREASE, Direction.INCREASE)
CONTRIBUTION_COLS = (Direction.DECREASE, Direction.INCREASE, Direction.STABLE)


@dataclass(frozen=True)
class TransitionFacts:
    """What the statistics need from one analyzed, non-degenerate transition."""

    revision: str
    prev_density: Fraction
    system_delta: Fraction
    contributions: dict[str, Fraction]
    present: tuple[str, ...]
    new_td: int = 0
    new_loc: int = 0

    @property
    def new_density(self) -> Fraction | None:
        return Fraction(self.new_td, self.new_loc) if self.new_loc > 0 else None


def percent_cleaner_new(facts: Iterable[TransitionFacts]) -> Fraction | None:
    """Share (in percent) of method-adding transitions whose new code is less
    dense than the system before it. ``None`` when no transition adds methods.
    """
    total = cleaner = 0
    for f in facts:
        density = f.new_density
        if "new" not in f.present or density is None:
            continue
        total += 1
        cleaner += density < f.prev_density
    if total == 0:
        return None
    return Fraction(100 * cleaner, total)


@dataclass(frozen=True)
class DistributionSummary:
    n: int
    q1: Fraction | None = None
    median: Fraction | None = None
    q3: Fraction | None = None
    whisker_low: Fraction | None = None
    whisker_high: Fraction | None = None
    outliers: int = 0


def quantile(sorted_values: Sequence[Fraction], q: Fraction) -> Fraction:
    """Linear interpolation between order statistics (numpy's default)."""
    pos = Fraction(q) * (len(sorted_values) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_values) - 1)
    frac = pos - lo
    return sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * frac


def summarize(values: Iterable[Fraction]) -> DistributionSummary:
    """Quartiles and Tukey whiskers (most extreme points within 1.5 IQR)."""
    xs = sorted(Fraction(v) for v in values)
    if not xs:
        return DistributionSummary(0)
    q1, med, q3 = (quantile(xs, Fraction(k, 4)) for k in (1, 2, 3))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - Fraction(3, 2) * iqr, q3 + Fraction(3, 2) * iqr
    inside = [x for x in xs if lo_fence <= x <= hi_fence]
    return DistributionSummary(
        len(xs), q1, med, q3, inside[0], inside[-1], len(xs) - len(inside)
    )


@dataclass(frozen=True)
class DensitySample:
    """One group of new methods added to one class in one transition."""

    revision: str
    enclosing_class: str
    new_td: int
    new_loc: int
    baseline: Fraction
    mode: str  # "new_class" or "existing_class"

    @property
    def difference(self) -> Fraction:
        return Fraction(self.new_td, self.new_loc) - self.baseline


def density_samples(
    revision: str,
    new_methods: Iterable[tuple[str, int, int]],
    prev_class_totals: dict[str, tuple[int, int]],
    prev_system_density: Fraction,
) -> list[DensitySample]:
    """Group new methods by class and pick each group's baseline.

    ``new_methods`` yields ``(class, td, ncloc)``. A class present at t-1
    with code is compared against its own density there; otherwise the
    class is new and the group is compared against the system.
    """
    groups: dict[str, list[int]] = {}
    for cls, td, loc in new_methods:
        g = groups.setdefault(cls, [0, 0])
        g[0] += td
        g[1] += loc
    out = []
    for cls in sorted(groups):
        td, loc = groups[cls]
        if loc <= 0:
            continue
        host = prev_class_totals.get(cls)
        if host is not None and host[1] > 0:
            out.append(DensitySample(revision, cls, td, loc, Fraction(*host), "existing_class"))
        else:
            out.append(DensitySample(revision, cls, td, loc, prev_system_density, "new_class"))
    return out


def density_diff_distribution(samples: Iterable[DensitySample], mode: str) -> DistributionSummary:
    if mode not in ("new_class", "existing_class"):
        raise ValueError(f"unknown mode {mode!r}")
    return summarize(s.difference for s in samples if s.mode == mode)


@dataclass(frozen=True)
class ContingencyTable:
    change_type: str
    cells: tuple[tuple[int, int, int], tuple[int, int, int]] = ((0, 0, 0), (0, 0, 0))

    @property
    def n(self) -> int:
        return sum(map(sum, self.cells))

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.cells]


def contingency_table(facts: Iterable[TransitionFacts], change_type: str) -> ContingencyTable:
    """Cross-tabulate system direction against one contribution's direction.

    Only transitions where this change type co-occurs with at least one
    other type are counted, and transitions with a stable system density
    are left out.
    """
    cells = [[0, 0, 0], [0, 0, 0]]
    for f in facts:
        if change_type not in f.present or len(f.present) < 2:
            continue
        system = Direction.of(f.system_delta)
        if system is Direction.STABLE:
            continue
        row = SYSTEM_ROWS.index(system)
        col = CONTRIBUTION_COLS.index(Direction.of(f.contributions[change_type]))
        cells[row][col] += 1
    return ContingencyTable(change_type, tuple(tuple(r) for r in cells))


@dataclass(frozen=True)
class StatResult:
    applicable: bool
    chi2: float = math.nan
    dof: int = 0
    p_value: float = math.nan
    phi: float = math.nan
    cramers_v: float = math.nan
    n: int = 0
    note: str = ""


def pearson_chi2(cells: Sequence[Sequence[int]]) -> tuple[Fraction, int, int, int]:
    """Exact Pearson statistic after dropping all-zero rows and columns.

    Returns ``(chi2, rows_kept, cols_kept, n)``.
    """
    rows = [list(r) for r in cells if any(r)]
    if not rows:
        return Fraction(0), 0, 0, 0
    keep = [j for j in range(len(rows[0])) if any(r[j] for r in rows)]
    rows = [[r[j] for j in keep] for r in rows]
    n = sum(map(sum, rows))
    row_sums = [sum(r) for r in rows]
    col_sums = [sum(r[j] for r in rows) for j in range(len(keep))]
    chi2 = Fraction(0)
    for i, r in enumerate(rows):
        for j, obs in enumerate(r):
            expected = Fraction(row_sums[i] * col_sums[j], n)
            chi2 += (obs - expected) ** 2 / expected
    return chi2, len(rows), len(keep), n


def phi_coefficient(chi2: float, n: int) -> float:
    return math.sqrt(chi2 / n)


def chi_square(table: ContingencyTable | Sequence[Sequence[int]]) -> StatResult:
    """Pearson chi-squared test of independence (no continuity correction)."""
    cells = table.cells if isinstance(table, ContingencyTable) else table
    chi2, r, c, n = pearson_chi2(cells)
    if n == 0 or r < 2 or c < 2:
        return StatResult(False, n=n, note="test inapplicable: fewer than 2 usable rows/columns")
    dof = (r - 1) * (c - 1)
    value = float(chi2)
    return StatResult(
        True,
        chi2=value,
        dof=dof,
        p_value=float(sps.chi2.sf(value, dof)),
        phi=phi_coefficient(value, n),
        cramers_v=math.sqrt(value / (n * (min(r, c) - 1))),
        n=n,
    )


@dataclass(frozen=True)
class TTestResult:
    applicable: bool
    t: float = math.nan
    dof: float = math.nan
    p_value: float = math.nan
    mean_diff: float = math.nan
    note: str = ""


def t_test_independent(
    a: Sequence[float], b: Sequence[float], welch: bool = False
) -> TTestResult:
    """Two-tailed independent-samples t-test (pooled variance unless ``welch``)."""
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        return TTestResult(False, note="test inapplicable: each sample needs at least 2 values")
    ma, mb = statistics.fmean(a), statistics.fmean(b)
    va, vb = statistics.variance(a), statistics.variance(b)
    diff = ma - mb
    if va == 0 and vb == 0:
        if diff == 0:
            return TTestResult(True, 0.0, float(na + nb - 2), 1.0, 0.0)
        return TTestResult(False, mean_diff=diff, note="test inapplicable: zero variance")
    if welch:
        se2a, se2b = va / na, vb / nb
        se = math.sqrt(se2a + se2b)
        dof = (se2a + se2b) ** 2 / (se2a**2 / (na - 1) + se2b**2 / (nb - 1))
    else:
        dof = na + nb - 2
        pooled = ((na - 1) * va + (nb - 1) * vb) / dof
        se = math.sqrt(pooled * (1 / na + 1 / nb))
    t = diff / se
    p = float(2 * sps.t.sf(abs(t), dof))
    return TTestResult(True, t, float(dof), min(p, 1.0), diff)


def round_half_away(x: Fraction) -> int:
    x = Fraction(x)
    magnitude = math.floor(abs(x) + Fraction(1, 2))
    return magnitude if x >= 0 else -magnitude


def median_split(counts: dict[str, int]) -> dict[str, str]:
    """HIGH for values above the rounded median, LOW otherwise."""
    if not counts:
        return {}
    cut = round_half_away(statistics.median(Fraction(v) for v in counts.values()))
    return {k: "HIGH" if v > cut else "LOW" for k, v in counts.items()}
