"""Per-revision cache records, stored one JSON object per line.

Rationals are written as ``"num/den"`` strings so nothing is lost on disk.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from filelock import FileLock

from .decomposition import ChangeAggregates, RevisionDelta, RevisionMeasurement
from .stats import DensitySample, TransitionFacts

CACHE_ENV = "TDDIFF_CACHE_DIR"
FORMAT_VERSION = 1


def frac_to_str(x: Fraction | None) -> str | None:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


def frac_from_str(s: str | None) -> Fraction | None:
    if s is None:
        return None
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


@dataclass(frozen=True)
class CacheRecord:
    revision: str
    prev_revision: str | None
    td_minutes_total: int
    ncloc_total: int
    aggregates: ChangeAggregates = field(default_factory=ChangeAggregates)
    unchanged_count: int = 0
    degenerate: bool = False
    degenerate_reason: str = ""
    new: Fraction | None = None
    deleted: Fraction | None = None
    modified: Fraction | None = None
    system_delta: Fraction | None = None
    parse_failures: tuple[str, ...] = ()
    excluded_files: tuple[str, ...] = ()
    samples: tuple[DensitySample, ...] = ()
    ignored_issues: int = 0

    def __post_init__(self):
        values = (self.new, self.deleted, self.modified, self.system_delta)
        if not self.is_baseline and not self.degenerate and None in values:
            raise ValueError(f"record {self.revision}: analyzed transition lacks values")

    @property
    def is_baseline(self) -> bool:
        return self.prev_revision is None

    @property
    def td_density(self) -> Fraction | None:
        if self.ncloc_total <= 0:
            return None
        return Fraction(self.td_minutes_total, self.ncloc_total)

    @property
    def measurement(self) -> RevisionMeasurement:
        return RevisionMeasurement(self.revision, self.td_minutes_total, self.ncloc_total)

    @property
    def delta(self) -> RevisionDelta | None:
        if self.is_baseline:
            return None
        return RevisionDelta(
            self.prev_revision, self.revision, self.degenerate, self.degenerate_reason,
            self.new, self.deleted, self.modified, self.system_delta,
        )

    @property
    def residual(self) -> Fraction | None:
        d = self.delta
        return None if d is None else d.residual

    def facts(self, prev_density: Fraction) -> TransitionFacts | None:
        if self.is_baseline or self.degenerate:
            return None
        return TransitionFacts(
            self.revision,
            prev_density,
            self.system_delta,
            {"new": self.new, "deleted": self.deleted, "modified": self.modified},
            self.aggregates.present_types,
            self.aggregates.new_td,
            self.aggregates.new_loc,
        )

    def to_dict(self) -> dict:
        d = self.delta
        directions = None
        if d is not None and not d.degenerate:
            directions = {k: d.direction(k).value for k in ("new", "deleted", "modified", "system")}
        return {
            "v": FORMAT_VERSION,
            "revision": self.revision,
            "prev_revision": self.prev_revision,
            "td_minutes_total": self.td_minutes_total,
            "ncloc_total": self.ncloc_total,
            "td_density": frac_to_str(self.td_density),
            "aggregates": asdict(self.aggregates),
            "unchanged_count": self.unchanged_count,
            "degenerate": self.degenerate,
            "degenerate_reason": self.degenerate_reason,
            "contributions": {
                "new": frac_to_str(self.new),
                "deleted": frac_to_str(self.deleted),
                "modified": frac_to_str(self.modified),
            },
            "system_delta": frac_to_str(self.system_delta),
            "residual": frac_to_str(self.residual),
            "directions": directions,
            "parse_failures": list(self.parse_failures),
            "excluded_files": list(self.excluded_files),
            "ignored_issues": self.ignored_issues,
            "samples": [
                {
                    "class": s.enclosing_class,
                    "mode": s.mode,
                    "new_td": s.new_td,
                    "new_loc": s.new_loc,
                    "baseline": frac_to_str(s.baseline),
                }
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> CacheRecord:
        contrib = d.get("contributions") or {}
        return cls(
            revision=d["revision"],
            prev_revision=d["prev_revision"],
            td_minutes_total=d["td_minutes_total"],
            ncloc_total=d["ncloc_total"],
            aggregates=ChangeAggregates(**d["aggregates"]),
            unchanged_count=d.get("unchanged_count", 0),
            degenerate=d["degenerate"],
            degenerate_reason=d.get("degenerate_reason", ""),
            new=frac_from_str(contrib.get("new")),
            deleted=frac_from_str(contrib.get("deleted")),
            modified=frac_from_str(contrib.get("modified")),
            system_delta=frac_from_str(d.get("system_delta")),
            parse_failures=tuple(d.get("parse_failures", ())),
            excluded_files=tuple(d.get("excluded_files", ())),
            ignored_issues=d.get("ignored_issues", 0),
            samples=tuple(
                DensitySample(
                    d["revision"], s["class"], s["new_td"], s["new_loc"],
                    frac_from_str(s["baseline"]), s["mode"],
                )
                for s in d.get("samples", ())
            ),
        )

    @classmethod
    def from_json(cls, line: str) -> CacheRecord:
        return cls.from_dict(json.loads(line))


class Cache:
    """Append-only JSONL store keyed by revision id, one writer at a time."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.lock = FileLock(str(self.path) + ".lock")

    def load(self) -> list[CacheRecord]:
        if not self.path.exists():
            return []
        records: dict[str, CacheRecord] = {}
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = CacheRecord.from_json(line)
                    records[rec.revision] = rec
        return list(records.values())

    def append(self, records: list[CacheRecord]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.lock, open(self.path, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")


def series_facts(records: list[CacheRecord]) -> list[TransitionFacts]:
    """Transition facts in cache order, skipping baselines and degenerate rows."""
    by_rev = {r.revision: r for r in records}
    out = []
    for rec in records:
        if rec.is_baseline or rec.degenerate:
            continue
        prev = by_rev.get(rec.prev_revision)
        if prev is None or prev.td_density is None:
            continue
        facts = rec.facts(prev.td_density)
        if facts is not None:
            out.append(facts)
    return out


def default_cache_path(repo: str | os.PathLike, branch: str) -> Path:
    base = os.environ.get(CACHE_ENV)
    name = f"{Path(repo).resolve().name}-{branch.replace('/', '_')}.jsonl"
    return Path(base or Path.home() / ".cache" / "tddiff") / name
