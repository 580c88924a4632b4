"""Classify methods as new, deleted, modified or unchanged across a transition."""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .history import FileStatus
from .similarity import similarity, similarity_upper_bound
from .source_model import MethodRecord, Snapshot

log = logging.getLogger(__name__)

DEFAULT_RENAME_THRESHOLD = Fraction(7, 10)


class ChangeKind(str, enum.Enum):
    NEW = "new"
    DELETED = "deleted"
    MODIFIED = "modified"
    UNCHANGED = "unchanged"


@dataclass(frozen=True)
class MethodChange:
    kind: ChangeKind
    before: MethodRecord | None = None
    after: MethodRecord | None = None

    def __post_init__(self):
        has = (self.before is not None, self.after is not None)
        expected = {
            ChangeKind.NEW: (False, True),
            ChangeKind.DELETED: (True, False),
            ChangeKind.MODIFIED: (True, True),
            ChangeKind.UNCHANGED: (True, True),
        }[self.kind]
        if has != expected:
            raise ValueError(f"{self.kind.value} change with before/after presence {has}")
        if self.kind is ChangeKind.UNCHANGED and self.before.fingerprint != self.after.fingerprint:
            raise ValueError("unchanged methods must have equal fingerprints")


@dataclass(frozen=True)
class KindAggregate:
    count: int = 0
    td: int = 0
    loc: int = 0


@dataclass
class ChangeSet:
    transition: tuple[str | None, str]
    changes: list[MethodChange] = field(default_factory=list)
    excluded_files: list[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.excluded_files)

    def of_kind(self, kind: ChangeKind) -> list[MethodChange]:
        return [c for c in self.changes if c.kind is kind]

    def counts(self) -> dict[ChangeKind, int]:
        out = {k: 0 for k in ChangeKind}
        for c in self.changes:
            out[c.kind] += 1
        return out

    def aggregates(
        self, td_before: dict[tuple, int], td_after: dict[tuple, int]
    ) -> dict[ChangeKind, KindAggregate]:
        """Per-kind (count, TD minutes, NCLOC) sums.

        New and deleted sums are absolute; modified sums are signed
        after-minus-before deltas. ``td_*`` map :attr:`MethodRecord.key`
        to attributed minutes; absent keys carry no debt.
        """
        out: dict[ChangeKind, KindAggregate] = {}
        for kind in ChangeKind:
            count = td = loc = 0
            for c in self.of_kind(kind):
                count += 1
                if kind is ChangeKind.NEW:
                    td += td_after.get(c.after.key, 0)
                    loc += c.after.ncloc
                elif kind is ChangeKind.DELETED:
                    td += td_before.get(c.before.key, 0)
                    loc += c.before.ncloc
                else:
                    td += td_after.get(c.after.key, 0) - td_before.get(c.before.key, 0)
                    loc += c.after.ncloc - c.before.ncloc
            out[kind] = KindAggregate(count, td, loc)
        return out


def _pair_tiebreak(a: MethodRecord, b: MethodRecord) -> tuple:
    # Ordering symmetric in (a, b) keeps prev/cur swaps consistent.
    ia = (a.enclosing_class, a.signature, a.start_line, a.fingerprint)
    ib = (b.enclosing_class, b.signature, b.start_line, b.fingerprint)
    return tuple(sorted((ia, ib)))


def match_methods(
    prev_methods: Iterable[MethodRecord],
    cur_methods: Iterable[MethodRecord],
    threshold: Fraction = DEFAULT_RENAME_THRESHOLD,
) -> list[MethodChange]:
    """Pair the methods of one file across two revisions.

    Same (class, signature) pairs first; leftovers are paired greedily by
    descending token similarity when it reaches ``threshold``.
    """
    prev = list(prev_methods)
    cur = list(cur_methods)
    changes: list[MethodChange] = []
    by_identity: dict[tuple[str, str], list[int]] = {}
    for j, m in enumerate(cur):
        by_identity.setdefault(m.identity, []).append(j)
    used_cur: set[int] = set()
    left_prev: list[MethodRecord] = []
    for m in prev:
        slots = by_identity.get(m.identity)
        if slots:
            j = slots.pop(0)
            used_cur.add(j)
            after = cur[j]
            kind = ChangeKind.UNCHANGED if m.fingerprint == after.fingerprint else ChangeKind.MODIFIED
            changes.append(MethodChange(kind, m, after))
        else:
            left_prev.append(m)
    left_cur = [m for j, m in enumerate(cur) if j not in used_cur]

    threshold = Fraction(threshold)
    candidates = []
    for a in left_prev:
        for b in left_cur:
            if similarity_upper_bound(len(a.body_tokens), len(b.body_tokens)) < threshold:
                continue
            sim = similarity(a.body_tokens, b.body_tokens)
            if sim >= threshold:
                candidates.append((-sim, _pair_tiebreak(a, b), id(a), id(b), a, b))
    candidates.sort(key=lambda c: c[:2])
    taken_prev: set[int] = set()
    taken_cur: set[int] = set()
    for _, _, ida, idb, a, b in candidates:
        if ida in taken_prev or idb in taken_cur:
            continue
        taken_prev.add(ida)
        taken_cur.add(idb)
        changes.append(MethodChange(ChangeKind.MODIFIED, a, b))
    changes.extend(
        MethodChange(ChangeKind.DELETED, before=a) for a in left_prev if id(a) not in taken_prev
    )
    changes.extend(
        MethodChange(ChangeKind.NEW, after=b) for b in left_cur if id(b) not in taken_cur
    )
    return changes


def classify_file_level(
    prev: Snapshot | None,
    cur: Snapshot,
    touched: Iterable[FileStatus],
    threshold: Fraction = DEFAULT_RENAME_THRESHOLD,
) -> ChangeSet:
    """Build the full change set for one transition.

    Added files contribute only new methods and deleted files only deleted
    ones; modified files go through :func:`match_methods`; untouched files
    are unchanged. A file that fails to parse on either side is excluded and
    the transition is flagged.
    """
    prev_files = prev.files if prev is not None else {}
    status = {fs.path: fs.status for fs in touched}
    cs = ChangeSet((prev.revision if prev is not None else None, cur.revision))
    for path in sorted(set(prev_files) | set(cur.files)):
        before = prev_files.get(path)
        after = cur.files.get(path)
        if (before is not None and not before.parsed) or (after is not None and not after.parsed):
            cs.excluded_files.append(path)
            log.warning("transition %s: excluding unparsed file %s", cs.transition, path)
            continue
        if before is None:
            cs.changes.extend(MethodChange(ChangeKind.NEW, after=m) for m in after.methods)
        elif after is None:
            cs.changes.extend(MethodChange(ChangeKind.DELETED, before=m) for m in before.methods)
        elif path not in status:
            if [m.fingerprint for m in before.methods] == [m.fingerprint for m in after.methods]:
                cs.changes.extend(
                    MethodChange(ChangeKind.UNCHANGED, b, a)
                    for b, a in zip(before.methods, after.methods)
                )
            else:
                log.warning("untouched file %s differs between revisions; matching", path)
                cs.changes.extend(match_methods(before.methods, after.methods, threshold))
        else:
            cs.changes.extend(match_methods(before.methods, after.methods, threshold))
    return cs
