"""Board-meeting keyword mining and the practices-vs-clean-code comparison."""

from __future__ import annotations

import logging
import os
from collections.abc import Iterable
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .stats import DistributionSummary, TTestResult, median_split, summarize, t_test_independent

log = logging.getLogger(__name__)

QC_KEYWORDS = (
    "software quality",
    "code quality",
    "code improvement",
    "code review",
    "guideline",
    "sonar",
)
REF_KEYWORDS = ("refactoring", "clean up")


@dataclass(frozen=True)
class GovernanceRecord:
    project: str
    commit_guidelines: str  # "YES" or "NO"
    qc_meeting_count: int = 0
    ref_meeting_count: int = 0
    board_meetings: str = ""  # "LOW" or "HIGH" once classified
    clean_code_freq: float | None = None


def _mentions(text: str, keywords: Iterable[str]) -> bool:
    low = text.lower()
    return any(k in low for k in keywords)


def scan_minutes(documents: Iterable[tuple[str, str | bytes]]) -> tuple[int, int]:
    """Count meetings mentioning any QC keyword and any REF keyword.

    Matching is case-insensitive substring search; a meeting counts at most
    once per variable however many hits or documents it has.
    """
    meetings: dict[str, list[str]] = {}
    for meeting_id, text in documents:
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError:
                log.warning("meeting %s: undecodable document skipped", meeting_id)
                continue
        meetings.setdefault(meeting_id, []).append(text)
    qc = sum(1 for texts in meetings.values() if any(_mentions(t, QC_KEYWORDS) for t in texts))
    ref = sum(1 for texts in meetings.values() if any(_mentions(t, REF_KEYWORDS) for t in texts))
    return qc, ref


def read_meetings(project_dir: str | os.PathLike) -> list[tuple[str, bytes]]:
    """One document per regular file; the meeting id is the file stem."""
    return [
        (p.stem, p.read_bytes())
        for p in sorted(Path(project_dir).iterdir())
        if p.is_file()
    ]


def classify_projects(records: Iterable[GovernanceRecord]) -> list[GovernanceRecord]:
    """Board meetings are HIGH only when both QC and REF counts split HIGH."""
    records = list(records)
    qc = median_split({r.project: r.qc_meeting_count for r in records})
    ref = median_split({r.project: r.ref_meeting_count for r in records})
    return [
        replace(
            r,
            board_meetings="HIGH" if qc[r.project] == ref[r.project] == "HIGH" else "LOW",
        )
        for r in records
    ]


def _yes_no(value) -> str:
    if isinstance(value, bool):
        return "YES" if value else "NO"
    text = str(value).strip().lower()
    if text in ("yes", "true", "y"):
        return "YES"
    if text in ("no", "false", "n"):
        return "NO"
    raise ValueError(f"commit_guidelines must be yes or no, got {value!r}")


def load_project_config(path: str | os.PathLike) -> dict[str, dict]:
    """Read ``{project: {commit_guidelines: yes|no, clean_code_freq?: x, cache?: path}}``.

    A top-level ``projects:`` key is also accepted.
    """
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if "projects" in raw and isinstance(raw["projects"], dict):
        raw = raw["projects"]
    config = {}
    for name, opts in raw.items():
        opts = dict(opts or {})
        opts["commit_guidelines"] = _yes_no(opts.get("commit_guidelines", "no"))
        config[str(name)] = opts
    return config


@dataclass(frozen=True)
class GroupComparison:
    variable: str
    high_label: str
    low_label: str
    high: DistributionSummary
    low: DistributionSummary
    high_mean: float
    low_mean: float
    median_gap: float | None
    test: TTestResult


def _compare(records, variable, attr, high_label, low_label, welch):
    hi = [r.clean_code_freq for r in records if getattr(r, attr) == high_label]
    lo = [r.clean_code_freq for r in records if getattr(r, attr) == low_label]
    shi, slo = summarize(hi), summarize(lo)
    gap = float(shi.median - slo.median) if hi and lo else None
    mean = lambda xs: sum(xs) / len(xs) if xs else float("nan")  # noqa: E731
    return GroupComparison(
        variable, high_label, low_label, shi, slo, mean(hi), mean(lo), gap,
        t_test_independent(hi, lo, welch=welch),
    )


def rq2_compare(records: Iterable[GovernanceRecord], welch: bool = False) -> list[GroupComparison]:
    """Compare clean-code frequency between groups of each practice variable."""
    records = list(records)
    missing = [r.project for r in records if r.clean_code_freq is None]
    if missing:
        raise ValueError(f"clean_code_freq missing for {missing}")
    return [
        _compare(records, "COMMIT_GUIDELINES", "commit_guidelines", "YES", "NO", welch),
        _compare(records, "PROJECT_BOARD_MEETINGS", "board_meetings", "HIGH", "LOW", welch),
    ]
