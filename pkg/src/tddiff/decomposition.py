"""Split a transition's TD-density change into new, deleted and modified parts.

Each contribution perturbs the previous revision's totals by one change type
and subtracts the previous density. The three contributions only add up to
the system change to first order, so the remainder is reported as a residual.
All arithmetic uses :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .change_tracker import ChangeKind, KindAggregate


class AggregateMismatchError(RuntimeError):
    """Aggregates disagree with the change set they claim to summarize."""


class DegenerateTransition(ValueError):
    """A density is undefined because a line-count denominator is not positive."""


class Direction(str, enum.Enum):
    DECREASE = "decrease"
    INCREASE = "increase"
    STABLE = "stable"

    @classmethod
    def of(cls, value: Fraction) -> Direction:
        if value < 0:
            return cls.DECREASE
        if value > 0:
            return cls.INCREASE
        return cls.STABLE


CHANGE_TYPES = ("new", "deleted", "modified")


@dataclass(frozen=True)
class RevisionMeasurement:
    revision: str
    td_minutes_total: int
    ncloc_total: int

    @property
    def td_density(self) -> Fraction:
        if self.ncloc_total <= 0:
            raise DegenerateTransition(f"revision {self.revision} has no code")
        return Fraction(self.td_minutes_total, self.ncloc_total)


@dataclass(frozen=True)
class ChangeAggregates:
    new_td: int = 0
    new_loc: int = 0
    deleted_td: int = 0
    deleted_loc: int = 0
    modified_td: int = 0
    modified_loc: int = 0
    new_count: int = 0
    deleted_count: int = 0
    modified_count: int = 0

    def __post_init__(self):
        if min(self.new_td, self.new_loc, self.deleted_td, self.deleted_loc) < 0:
            raise AggregateMismatchError("new/deleted aggregates must be non-negative")
        if min(self.new_count, self.deleted_count, self.modified_count) < 0:
            raise AggregateMismatchError("change counts must be non-negative")

    @classmethod
    def from_kinds(cls, agg: dict[ChangeKind, KindAggregate]) -> ChangeAggregates:
        new, dele, mod = agg[ChangeKind.NEW], agg[ChangeKind.DELETED], agg[ChangeKind.MODIFIED]
        return cls(new.td, new.loc, dele.td, dele.loc, mod.td, mod.loc,
                   new.count, dele.count, mod.count)

    def present(self, change_type: str) -> bool:
        """Whether at least one method underwent this change type."""
        return getattr(self, f"{change_type}_count") > 0

    @property
    def present_types(self) -> tuple[str, ...]:
        return tuple(t for t in CHANGE_TYPES if self.present(t))


def _perturbed(prev: RevisionMeasurement, d_td: int, d_loc: int) -> Fraction:
    denominator = prev.ncloc_total + d_loc
    if denominator <= 0:
        raise DegenerateTransition(
            f"denominator {denominator} after applying change to {prev.revision}"
        )
    return Fraction(prev.td_minutes_total + d_td, denominator) - prev.td_density


def contribution_new(prev: RevisionMeasurement, td: int, loc: int) -> Fraction:
    return _perturbed(prev, td, loc)


def contribution_deleted(prev: RevisionMeasurement, td: int, loc: int) -> Fraction:
    return _perturbed(prev, -td, -loc)


def contribution_modified(prev: RevisionMeasurement, d_td: int, d_loc: int) -> Fraction:
    """Signed deltas are added to the previous totals as given."""
    return _perturbed(prev, d_td, d_loc)


@dataclass(frozen=True)
class RevisionDelta:
    prev_revision: str
    revision: str
    degenerate: bool = False
    reason: str = ""
    new: Fraction | None = None
    deleted: Fraction | None = None
    modified: Fraction | None = None
    system_delta: Fraction | None = None

    @property
    def contributions(self) -> dict[str, Fraction]:
        return {"new": self.new, "deleted": self.deleted, "modified": self.modified}

    @property
    def residual(self) -> Fraction | None:
        if self.degenerate:
            return None
        return self.system_delta - (self.new + self.deleted + self.modified)

    def direction(self, which: str) -> Direction | None:
        value = self.system_delta if which == "system" else self.contributions[which]
        return None if value is None else Direction.of(value)


def check_aggregates(agg: ChangeAggregates, expected: ChangeAggregates, revision: str) -> None:
    if agg != expected:
        raise AggregateMismatchError(
            f"revision {revision}: aggregates {agg} do not match change set {expected}"
        )


def revision_delta(
    prev: RevisionMeasurement,
    cur: RevisionMeasurement,
    agg: ChangeAggregates,
    expected: ChangeAggregates | None = None,
) -> RevisionDelta:
    """Contributions, system delta and directions for one transition.

    ``expected`` is the recomputation of ``agg`` from the change set; a
    mismatch is data corruption and raises :class:`AggregateMismatchError`.
    Transitions with an empty system, or a change that empties it, come
    back marked degenerate with no values.
    """
    if expected is not None:
        check_aggregates(agg, expected, cur.revision)
    if agg.deleted_loc > prev.ncloc_total:
        raise AggregateMismatchError(
            f"revision {cur.revision}: deleted NCLOC {agg.deleted_loc} exceeds "
            f"previous total {prev.ncloc_total}"
        )
    try:
        new = contribution_new(prev, agg.new_td, agg.new_loc)
        deleted = contribution_deleted(prev, agg.deleted_td, agg.deleted_loc)
        modified = contribution_modified(prev, agg.modified_td, agg.modified_loc)
        system = cur.td_density - prev.td_density
    except DegenerateTransition as exc:
        return RevisionDelta(prev.revision, cur.revision, degenerate=True, reason=str(exc))
    return RevisionDelta(prev.revision, cur.revision, False, "", new, deleted, modified, system)
