"""Technical-debt issues: built-in code-smell rules, imported dumps, attribution."""

from __future__ import annotations

import enum
import json
import logging
import os
import re
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .source_model import MethodRecord, Snapshot, Token

log = logging.getLogger(__name__)


class Severity(enum.IntEnum):
    INFO = 0
    MINOR = 1
    MAJOR = 2
    CRITICAL = 3
    BLOCKER = 4

    @classmethod
    def parse(cls, text: str) -> Severity:
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown severity {text!r}") from None


class RuleConfigError(ValueError):
    pass


class IssueImportError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    id: str
    description: str
    remediation_minutes: int
    severity: Severity
    threshold: int | None = None
    enabled: bool = True

    def __post_init__(self):
        if self.remediation_minutes <= 0:
            raise RuleConfigError(f"rule {self.id}: remediation minutes must be positive")


DEFAULT_RULES: dict[str, Rule] = {
    r.id: r
    for r in (
        Rule("R1", "CatchGeneric: Throwable and Error should not be caught", 20, Severity.CRITICAL),
        Rule("R2", "EmptyCatch: catch block is empty", 5, Severity.MINOR),
        Rule("R3", "LongMethod: method exceeds the NCLOC threshold", 20, Severity.MAJOR, 50),
        Rule("R4", "TooManyParams: method has too many parameters", 20, Severity.MAJOR, 7),
        Rule("R5", "DeepNesting: blocks nested too deeply", 15, Severity.CRITICAL, 4),
        Rule("R6", "HighComplexity: too many decision points (minutes per excess point)",
             5, Severity.CRITICAL, 10),
    )
}


@dataclass(frozen=True)
class RuleSet:
    rules: dict[str, Rule] = field(default_factory=lambda: dict(DEFAULT_RULES))

    def active(self, rule_id: str) -> Rule | None:
        rule = self.rules.get(rule_id)
        return rule if rule is not None and rule.enabled else None

    @classmethod
    def disabled(cls) -> RuleSet:
        return cls({k: replace(r, enabled=False) for k, r in DEFAULT_RULES.items()})


def load_rules(path: str | os.PathLike | None) -> RuleSet:
    """Read a JSON rule config: ``{"R3": {"threshold": 60, "minutes": 30, "enabled": true}}``."""
    if path is None:
        return RuleSet()
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise RuleConfigError("rule config must be an object keyed by rule id")
    rules = dict(DEFAULT_RULES)
    for rule_id, opts in raw.items():
        if rule_id not in rules:
            raise RuleConfigError(f"unknown rule id {rule_id!r} in {path}")
        if not isinstance(opts, dict):
            raise RuleConfigError(f"rule {rule_id}: settings must be an object")
        unknown = set(opts) - {"threshold", "minutes", "enabled", "severity"}
        if unknown:
            raise RuleConfigError(f"rule {rule_id}: unknown settings {sorted(unknown)}")
        rule = rules[rule_id]
        rules[rule_id] = replace(
            rule,
            threshold=int(opts.get("threshold", rule.threshold)) if rule.threshold is not None
            else None,
            remediation_minutes=int(opts.get("minutes", rule.remediation_minutes)),
            enabled=bool(opts.get("enabled", rule.enabled)),
            severity=Severity.parse(opts["severity"]) if "severity" in opts else rule.severity,
        )
    return RuleSet(rules)


@dataclass(frozen=True)
class TdIssue:
    rule_id: str
    file_path: str
    line: int | None
    effort_minutes: int
    origin: str = "builtin"
    severity: Severity = Severity.MAJOR

    def __post_init__(self):
        if self.line is not None and self.line < 1:
            raise ValueError("issue line must be >= 1")
        if self.effort_minutes <= 0:
            raise ValueError("issue effort must be positive")

    @property
    def file_level(self) -> bool:
        return self.line is None


# Detectors -----------------------------------------------------------------

GENERIC_CATCH_TYPES = frozenset({"Throwable", "Error", "java.lang.Throwable", "java.lang.Error"})
DECISION_TOKENS = frozenset({"if", "for", "while", "case", "catch", "&&", "||", "?"})


def _body_start(tokens: tuple[Token, ...], name_index: int) -> int:
    for i in range(name_index, len(tokens)):
        if tokens[i].text == "{":
            return i
    return len(tokens)


def _name_index(method: MethodRecord) -> int:
    for i, tok in enumerate(method.tokens):
        if tok.line == method.name_line and tok.text == method.name:
            nxt = method.tokens[i + 1] if i + 1 < len(method.tokens) else None
            if nxt is not None and nxt.text == "(":
                return i
    return 0


def _catch_clauses(body: tuple[Token, ...]):
    """Yield (catch token, types in the clause, index of the block's ``{``)."""
    for i, tok in enumerate(body):
        if tok.text != "catch" or i + 1 >= len(body) or body[i + 1].text != "(":
            continue
        depth = 0
        j = i + 1
        while j < len(body):
            if body[j].text == "(":
                depth += 1
            elif body[j].text == ")":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        inner = [t for t in body[i + 2:j] if t.text != "final"]
        if inner and inner[-1].kind == "id":
            inner = inner[:-1]  # the exception variable
        types = "".join(t.text if t.text != "|" else " " for t in inner).split()
        yield tok, types, j + 1


def _decision_points(body: tuple[Token, ...]) -> int:
    count = 0
    for i, tok in enumerate(body):
        if tok.text not in DECISION_TOKENS:
            continue
        if tok.text == "?":
            nxt = body[i + 1].text if i + 1 < len(body) else ""
            prev = body[i - 1].text if i > 0 else ""
            if nxt in ("extends", "super", ">", ",") or prev == "<":
                continue  # generic wildcard
        count += 1
    return count


def check_method(method: MethodRecord, rules: RuleSet) -> list[TdIssue]:
    """Run every enabled built-in rule on one method."""
    issues: list[TdIssue] = []
    tokens = method.tokens
    name_idx = _name_index(method)
    start = _body_start(tokens, name_idx)
    body = tokens[start:]
    path = method.file_path

    def emit(rule: Rule, line: int, minutes: int | None = None) -> None:
        issues.append(
            TdIssue(rule.id, path, line, minutes or rule.remediation_minutes,
                    "builtin", rule.severity)
        )

    r1, r2 = rules.active("R1"), rules.active("R2")
    if r1 or r2:
        for tok, types, brace in _catch_clauses(body):
            if r1 and any(t in GENERIC_CATCH_TYPES for t in types):
                emit(r1, tok.line)
            if (
                r2
                and brace + 1 < len(body)
                and body[brace].text == "{"
                and body[brace + 1].text == "}"
            ):
                emit(r2, tok.line)
    rule = rules.active("R3")
    if rule and method.ncloc > rule.threshold:
        emit(rule, method.name_line)
    rule = rules.active("R4")
    if rule and len(method.param_types) > rule.threshold:
        emit(rule, method.name_line)
    rule = rules.active("R5")
    if rule:
        depth = -1  # the body's own brace brings this to 0
        for tok in body:
            if tok.text == "{":
                depth += 1
                if depth == rule.threshold + 1:
                    emit(rule, tok.line)
            elif tok.text == "}":
                depth -= 1
    rule = rules.active("R6")
    if rule:
        points = _decision_points(body)
        if points > rule.threshold:
            emit(rule, method.name_line, rule.remediation_minutes * (points - rule.threshold))
    return issues


def analyze_snapshot(snapshot: Snapshot, rules: RuleSet) -> list[TdIssue]:
    """Built-in issues for every method, ordered by file, line and rule."""
    issues = [i for m in snapshot.methods for i in check_method(m, rules)]
    return sorted(issues, key=lambda i: (i.file_path, i.line or 0, i.rule_id))


# Import --------------------------------------------------------------------

EFFORT_RE = re.compile(r"^(?:(\d+)h)?(?:(\d+)min)?$")


def parse_effort(text: str) -> int:
    """``"5min"`` -> 5, ``"1h30min"`` -> 90."""
    m = EFFORT_RE.match(text) if isinstance(text, str) and text else None
    if m is None or not any(m.groups()):
        raise IssueImportError(f"malformed effort {text!r}")
    return int(m.group(1) or 0) * 60 + int(m.group(2) or 0)


def _component_path(component: str) -> str:
    # SonarQube components look like "project:src/Foo.java".
    return component.split(":", 1)[1] if ":" in component else component


@dataclass
class ImportResult:
    issues: list[TdIssue] = field(default_factory=list)
    malformed: int = 0
    skipped_types: int = 0

    @property
    def warnings(self) -> int:
        return self.malformed + self.skipped_types


def import_issues(lines: Iterable[str], source: str = "<dump>") -> ImportResult:
    """Parse a line-delimited issue dump.

    Records that are not objects or lack required fields are skipped and
    counted; non ``CODE_SMELL`` records are skipped and counted separately.
    A bad effort string raises :class:`IssueImportError`.
    """
    result = ImportResult()
    for lineno, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError:
            log.warning("%s: not valid JSON, skipped", where)
            result.malformed += 1
            continue
        if not (
            isinstance(rec, dict)
            and isinstance(rec.get("rule"), str)
            and isinstance(rec.get("component"), str)
            and isinstance(rec.get("effort"), str)
            and isinstance(rec.get("type"), str)
            and (
                rec.get("line") is None
                or (type(rec["line"]) is int and rec["line"] >= 1)
            )
        ):
            log.warning("%s: malformed record, skipped", where)
            result.malformed += 1
            continue
        if rec["type"] != "CODE_SMELL":
            log.warning("%s: type %s is not a code smell, skipped", where, rec["type"])
            result.skipped_types += 1
            continue
        try:
            minutes = parse_effort(rec["effort"])
        except IssueImportError as exc:
            raise IssueImportError(f"{where} (rule {rec['rule']}): {exc}") from None
        if minutes <= 0:
            raise IssueImportError(f"{where} (rule {rec['rule']}): effort must be positive")
        severity = rec.get("severity")
        result.issues.append(
            TdIssue(
                rec["rule"],
                _component_path(rec["component"]),
                rec.get("line"),
                minutes,
                "imported",
                Severity.parse(severity) if isinstance(severity, str) else Severity.MAJOR,
            )
        )
    return result


def read_issue_dump(path: str | os.PathLike) -> ImportResult:
    with open(path, encoding="utf-8") as fh:
        return import_issues(fh, source=os.fspath(path))


# Attribution ---------------------------------------------------------------


@dataclass(frozen=True)
class MethodTd:
    method: MethodRecord
    td_minutes: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.td_minutes, self.method.ncloc)


@dataclass
class Attribution:
    method_td: dict[tuple, MethodTd]
    ignored: list[TdIssue]
    attributed: dict[tuple, list[TdIssue]] = field(default_factory=dict)

    @property
    def ignored_count(self) -> int:
        return len(self.ignored)

    @property
    def ignored_minutes(self) -> int:
        return sum(i.effort_minutes for i in self.ignored)

    @property
    def attributed_minutes(self) -> int:
        return sum(m.td_minutes for m in self.method_td.values())

    def minutes_by_key(self) -> dict[tuple, int]:
        return {k: m.td_minutes for k, m in self.method_td.items()}


def innermost_method(methods: Iterable[MethodRecord], line: int) -> MethodRecord | None:
    best = None
    for m in methods:
        if m.contains(line) and (best is None or m.end_line - m.start_line < best.end_line - best.start_line):
            best = m
    return best


def map_issues_to_methods(issues: Iterable[TdIssue], snapshot: Snapshot) -> Attribution:
    """Attribute each issue to the innermost method whose span holds its line.

    Every method gets an entry (zero minutes if clean). Issues with no line,
    outside every method, or in files without a method inventory are ignored.
    """
    method_td = {m.key: 0 for m in snapshot.methods}
    records = {m.key: m for m in snapshot.methods}
    attributed: dict[tuple, list[TdIssue]] = {}
    ignored: list[TdIssue] = []
    for issue in issues:
        f = snapshot.files.get(issue.file_path)
        target = None
        if f is not None and issue.line is not None:
            target = innermost_method(f.methods, issue.line)
        if target is None:
            ignored.append(issue)
            continue
        method_td[target.key] += issue.effort_minutes
        attributed.setdefault(target.key, []).append(issue)
    return Attribution(
        {k: MethodTd(records[k], v) for k, v in method_td.items()}, ignored, attributed
    )


def class_totals(attribution: Attribution) -> dict[str, tuple[int, int]]:
    """``{qualified class: (td minutes, ncloc)}`` summed over member methods."""
    totals: dict[str, tuple[int, int]] = {}
    for mtd in attribution.method_td.values():
        td, loc = totals.get(mtd.method.enclosing_class, (0, 0))
        totals[mtd.method.enclosing_class] = (td + mtd.td_minutes, loc + mtd.method.ncloc)
    return totals
