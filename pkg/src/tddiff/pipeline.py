"""End-to-end analysis of a branch and the new-code quality gate."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cache import Cache, CacheRecord
from .change_tracker import DEFAULT_RENAME_THRESHOLD, ChangeKind, ChangeSet, classify_file_level
from .decomposition import (
    ChangeAggregates,
    DegenerateTransition,
    RevisionMeasurement,
    contribution_new,
    revision_delta,
)
from .history import (
    GitRepository,
    HistoryError,
    extension_predicate,
    filter_source_transitions,
    linearize_longest_path,
)
from .source_model import DEFAULT_SOURCE_EXTENSIONS, Snapshot, SourceFile, parse_file
from .stats import density_samples
from .td_engine import (
    Attribution,
    RuleSet,
    Severity,
    TdIssue,
    analyze_snapshot,
    class_totals,
    map_issues_to_methods,
    read_issue_dump,
)

log = logging.getLogger(__name__)


class AnalysisError(RuntimeError):
    def __init__(self, revision: str | None, message: str):
        super().__init__(f"{revision or '?'}: {message}")
        self.revision = revision


@dataclass
class AnalysisConfig:
    branch: str = "master"
    source_ext: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS
    rules: RuleSet = field(default_factory=RuleSet)
    import_dir: Path | None = None
    rename_threshold: Fraction = DEFAULT_RENAME_THRESHOLD
    workers: int = 1


@dataclass
class Measured:
    snapshot: Snapshot
    issues: list[TdIssue]
    attribution: Attribution
    measurement: RevisionMeasurement

    @property
    def revision(self) -> str:
        return self.snapshot.revision


class Analyzer:
    """Measures revisions of one repository, reusing parses of unchanged blobs."""

    def __init__(self, repo: GitRepository, config: AnalysisConfig):
        self.repo = repo
        self.config = config
        self.is_source = extension_predicate(config.source_ext)
        self._parsed: dict[tuple[str, str], SourceFile] = {}

    def snapshot(self, revision: str) -> Snapshot:
        files = {p: b for p, b in self.repo.list_files(revision).items() if self.is_source(p)}
        missing = [b for p, b in files.items() if (p, b) not in self._parsed]
        blobs = self.repo.read_blobs(missing)
        snap = Snapshot(revision)
        for path in sorted(files):
            key = (path, files[path])
            if key not in self._parsed:
                raw = blobs[files[path]]
                try:
                    text = raw.decode("utf-8")
                except UnicodeDecodeError:
                    text = raw.decode("latin-1")
                self._parsed[key] = parse_file(text, path)
            snap.files[path] = self._parsed[key]
        return snap

    def issues(self, snapshot: Snapshot) -> list[TdIssue]:
        issues = analyze_snapshot(snapshot, self.config.rules)
        if self.config.import_dir is not None:
            dump = Path(self.config.import_dir) / f"{snapshot.revision}.jsonl"
            if dump.exists():
                imported = read_issue_dump(dump)
                if imported.warnings:
                    log.warning("%s: %d issue records skipped", dump, imported.warnings)
                in_scope = [i for i in imported.issues if i.file_path in snapshot.files]
                if len(in_scope) != len(imported.issues):
                    log.info("%s: %d issues on non-source files dropped", dump,
                             len(imported.issues) - len(in_scope))
                issues.extend(in_scope)
            else:
                log.warning("no issue dump for %s", snapshot.revision)
        return issues

    def measure(self, revision: str) -> Measured:
        snap = self.snapshot(revision)
        issues = self.issues(snap)
        attribution = map_issues_to_methods(issues, snap)
        td = sum(i.effort_minutes for i in issues)
        return Measured(snap, issues, attribution, RevisionMeasurement(revision, td, snap.ncloc))

    def change_set(self, prev: Measured | None, cur: Measured) -> ChangeSet:
        statuses = self.repo.diff(prev.revision if prev else None, cur.revision)
        statuses = [s for s in statuses if self.is_source(s.path)]
        return classify_file_level(
            prev.snapshot if prev else None, cur.snapshot, statuses, self.config.rename_threshold
        )

    def record(self, prev: Measured | None, cur: Measured) -> CacheRecord:
        common = dict(
            revision=cur.revision,
            td_minutes_total=cur.measurement.td_minutes_total,
            ncloc_total=cur.measurement.ncloc_total,
            parse_failures=tuple(cur.snapshot.unparsed),
            ignored_issues=cur.attribution.ignored_count,
        )
        if prev is None:
            return CacheRecord(prev_revision=None, **common)
        cs = self.change_set(prev, cur)
        before, after = prev.attribution.minutes_by_key(), cur.attribution.minutes_by_key()
        agg = ChangeAggregates.from_kinds(cs.aggregates(before, after))
        expected = _recount(cs, before, after)
        delta = revision_delta(prev.measurement, cur.measurement, agg, expected)
        samples = ()
        if not delta.degenerate:
            samples = tuple(
                density_samples(
                    cur.revision,
                    (
                        (c.after.enclosing_class, after.get(c.after.key, 0), c.after.ncloc)
                        for c in cs.of_kind(ChangeKind.NEW)
                    ),
                    class_totals(prev.attribution),
                    prev.measurement.td_density,
                )
            )
        return CacheRecord(
            prev_revision=prev.revision,
            aggregates=agg,
            unchanged_count=len(cs.of_kind(ChangeKind.UNCHANGED)),
            degenerate=delta.degenerate,
            degenerate_reason=delta.reason,
            new=delta.new,
            deleted=delta.deleted,
            modified=delta.modified,
            system_delta=delta.system_delta,
            excluded_files=tuple(cs.excluded_files),
            samples=samples,
            **common,
        )


def _recount(cs: ChangeSet, before: dict, after: dict) -> ChangeAggregates:
    """Independent single pass over the change list, cross-checking ``aggregates``."""
    sums = {k: [0, 0, 0] for k in ChangeKind}
    for c in cs.changes:
        s = sums[c.kind]
        s[0] += 1
        if c.after is not None:
            s[1] += after.get(c.after.key, 0)
            s[2] += c.after.ncloc
        if c.before is not None and c.kind is not ChangeKind.UNCHANGED:
            sign = 1 if c.kind is ChangeKind.DELETED else -1
            s[1] += sign * before.get(c.before.key, 0)
            s[2] += sign * c.before.ncloc
    n, d, m = sums[ChangeKind.NEW], sums[ChangeKind.DELETED], sums[ChangeKind.MODIFIED]
    return ChangeAggregates(n[1], n[2], d[1], d[2], m[1], m[2], n[0], d[0], m[0])


@dataclass
class AnalysisSummary:
    revisions: int
    analyzed: int
    cached: int
    filtered_out: int
    degenerate: int
    flagged: int

    def lines(self) -> list[str]:
        return [
            f"revisions in series: {self.revisions}",
            f"analyzed: {self.analyzed}",
            f"reused from cache: {self.cached}",
            f"skipped by source filter: {self.filtered_out}",
            f"degenerate transitions: {self.degenerate}",
            f"transitions with unparsed files: {self.flagged}",
        ]


def select_series(repo: GitRepository, config: AnalysisConfig):
    dag = repo.commit_dag(config.branch)
    head = repo.resolve(config.branch)
    full = linearize_longest_path(dag, head)
    return full, filter_source_transitions(full, dag, extension_predicate(config.source_ext))


def run_analyze(
    repo_path: str | os.PathLike, config: AnalysisConfig, cache_path: str | os.PathLike
) -> AnalysisSummary:
    repo = GitRepository(repo_path)
    full, series = select_series(repo, config)
    cache = Cache(cache_path)
    known = {r.revision: r for r in cache.load()}
    commits = list(series.commits)
    prevs = [None] + commits[:-1]
    todo = [
        i for i, (p, c) in enumerate(zip(prevs, commits))
        if c not in known or known[c].prev_revision != p
    ]
    analyzer = Analyzer(repo, config)
    measured: dict[int, Measured] = {}
    new_records: list[CacheRecord] = []

    def measure(i: int) -> Measured:
        try:
            return analyzer.measure(commits[i])
        except (HistoryError, OSError) as exc:
            raise AnalysisError(commits[i], str(exc)) from exc

    def build(i: int) -> CacheRecord:
        try:
            return analyzer.record(measured[i - 1] if i > 0 else None, measured[i])
        except (HistoryError, DegenerateTransition, RuntimeError) as exc:
            raise AnalysisError(commits[i], str(exc)) from exc

    workers = max(1, config.workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, len(todo), 4 * workers):
            batch = todo[start:start + 4 * workers]
            need = sorted({j for i in batch for j in (i - 1, i) if j >= 0} - set(measured))
            measured.update(zip(need, pool.map(measure, need)))
            new_records.extend(pool.map(build, batch))
            # the next batch may still need this batch's last revision as predecessor
            measured = {k: v for k, v in measured.items() if k >= batch[-1]}
    cache.append(new_records)
    allrecs = {**known, **{r.revision: r for r in new_records}}
    in_series = [allrecs[c] for c in commits]
    return AnalysisSummary(
        revisions=len(commits),
        analyzed=len(new_records),
        cached=len(commits) - len(new_records),
        filtered_out=len(full) - len(commits),
        degenerate=sum(r.degenerate for r in in_series),
        flagged=sum(bool(r.excluded_files) for r in in_series),
    )


# Gate ------------------------------------------------------------------------


@dataclass
class GateResult:
    passed: bool
    policy: str
    revision: str
    baseline: str | None
    contribution_new: Fraction | None = None
    new_methods: int = 0
    new_td: int = 0
    new_loc: int = 0
    new_issues: list[TdIssue] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def report(self) -> str:
        out = [
            f"{self.verdict} ({self.policy}) {self.revision}",
            f"baseline: {self.baseline or '(none)'}",
            f"new methods: {self.new_methods}, new TD: {self.new_td} min over {self.new_loc} NCLOC",
        ]
        if self.contribution_new is not None:
            c = self.contribution_new
            out.append(f"contribution of new code: {c.numerator}/{c.denominator} ({float(c):+.6f})")
        for issue in self.new_issues:
            out.append(
                f"  {issue.file_path}:{issue.line} {issue.rule_id} "
                f"{issue.severity.name} {issue.effort_minutes}min"
            )
        out.extend(f"note: {n}" for n in self.notes)
        return "\n".join(out)


POLICIES = ("cleaner", "zero-defect")


def evaluate_gate(
    prev: Measured | None,
    cur: Measured,
    cs: ChangeSet,
    policy: str = "cleaner",
    severity_floor: Severity = Severity.CRITICAL,
) -> GateResult:
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    new = cs.of_kind(ChangeKind.NEW)
    result = GateResult(True, policy, cur.revision, prev.revision if prev else None)
    if not new:
        result.notes.append("no methods added; nothing to gate")
        return result
    keys = {c.after.key for c in new}
    result.new_methods = len(new)
    result.new_td = sum(cur.attribution.method_td[k].td_minutes for k in keys)
    result.new_loc = sum(c.after.ncloc for c in new)
    result.new_issues = sorted(
        (i for k in keys for i in cur.attribution.attributed.get(k, [])),
        key=lambda i: (i.file_path, i.line or 0, i.rule_id),
    )
    base = prev.measurement if prev else RevisionMeasurement("(empty)", 0, 0)
    try:
        result.contribution_new = contribution_new(base, result.new_td, result.new_loc)
    except DegenerateTransition:
        result.notes.append("baseline has no code; judged as zero-defect")
        policy = "zero-defect"
    if policy == "zero-defect":
        result.passed = result.new_td == 0
    else:
        blocking = [i for i in result.new_issues if i.severity >= severity_floor]
        result.passed = result.contribution_new <= 0 and not blocking
        if blocking:
            result.notes.append(
                f"{len(blocking)} new issue(s) at or above {severity_floor.name}"
            )
    return result


def run_gate(
    repo_path: str | os.PathLike,
    revision: str,
    config: AnalysisConfig,
    policy: str = "cleaner",
    severity_floor: Severity = Severity.CRITICAL,
) -> GateResult:
    repo = GitRepository(repo_path)
    rev = repo.resolve(revision)
    parents = repo.commit_parents(rev)
    analyzer = Analyzer(repo, config)
    prev = analyzer.measure(parents[0]) if parents else None
    cur = analyzer.measure(rev)
    return evaluate_gate(prev, cur, analyzer.change_set(prev, cur), policy, severity_floor)
