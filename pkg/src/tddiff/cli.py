"""Command-line entry point: ``tddiff {analyze,stats,gate,mine-governance,report}``.

Exit codes: 0 success or gate PASS, 1 gate FAIL, 2 usage error, 3 analysis error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .cache import Cache, default_cache_path, series_facts
from .governance import (
    GovernanceRecord,
    classify_projects,
    load_project_config,
    read_meetings,
    rq2_compare,
    scan_minutes,
)
from .history import HistoryError
from .pipeline import POLICIES, AnalysisConfig, AnalysisError, run_analyze, run_gate
from .reports import FORMATS, export_reports, render_stats
from .source_model import DEFAULT_SOURCE_EXTENSIONS
from .stats import percent_cleaner_new
from .td_engine import IssueImportError, RuleConfigError, RuleSet, Severity, load_rules

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

log = logging.getLogger("tddiff")


class UsageError(Exception):
    pass


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--repo", required=True, help="path to the git repository")
    p.add_argument("--rules", help="JSON rule configuration")
    p.add_argument(
        "--import-issues", metavar="DIR",
        help="directory of <commit>.jsonl issue dumps (built-in rules are then "
        "off unless --rules is given)",
    )
    p.add_argument(
        "--source-ext", default=",".join(DEFAULT_SOURCE_EXTENSIONS),
        help="comma-separated source extensions (default: %(default)s)",
    )
    p.add_argument("--rename-threshold", default="0.7",
                   help="minimum token similarity to pair renamed methods (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tddiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="measure every revision of a branch into a cache")
    _add_source_args(p)
    p.add_argument("--branch", default="master")
    p.add_argument("--cache", help="cache file (default: $TDDIFF_CACHE_DIR or ~/.cache/tddiff)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("stats", help="print statistics from a cache")
    p.add_argument("--cache", required=True)

    p = sub.add_parser("gate", help="judge one commit's new code against its parent")
    _add_source_args(p)
    p.add_argument("--revision", default="HEAD")
    p.add_argument("--policy", choices=POLICIES, default="cleaner")
    p.add_argument("--severity-floor", default="critical",
                   help="fail on new issues at or above this severity (default: %(default)s)")

    p = sub.add_parser("mine-governance", help="count quality topics in board minutes")
    p.add_argument("--corpus", required=True, help="directory with one folder per project")
    p.add_argument("--projects", required=True, help="YAML project configuration")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--welch", action="store_true", help="use Welch's t-test")

    p = sub.add_parser("report", help="export report tables from a cache")
    p.add_argument("--cache", required=True)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _config(args) -> AnalysisConfig:
    try:
        threshold = Fraction(args.rename_threshold)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --rename-threshold {args.rename_threshold!r}") from None
    if args.rules:
        rules = load_rules(args.rules)
    elif args.import_issues:
        rules = RuleSet.disabled()
    else:
        rules = RuleSet()
    exts = tuple(e.strip() for e in args.source_ext.split(",") if e.strip())
    if not exts:
        raise UsageError("--source-ext needs at least one extension")
    return AnalysisConfig(
        branch=getattr(args, "branch", "master"),
        source_ext=exts,
        rules=rules,
        import_dir=Path(args.import_issues) if args.import_issues else None,
        rename_threshold=threshold,
        workers=max(1, getattr(args, "workers", 1)),
    )


def _load_cache(path: str):
    if not Path(path).exists():
        raise UsageError(f"cache {path} does not exist")
    return Cache(path).load()


def cmd_analyze(args) -> int:
    config = _config(args)
    cache = args.cache or default_cache_path(args.repo, config.branch)
    summary = run_analyze(args.repo, config, cache)
    print(f"cache: {cache}")
    print("\n".join(summary.lines()))
    return EXIT_OK


def cmd_stats(args) -> int:
    print(render_stats(_load_cache(args.cache)))
    return EXIT_OK


def cmd_gate(args) -> int:
    config = _config(args)
    try:
        floor = Severity.parse(args.severity_floor)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_gate(args.repo, args.revision, config, args.policy, floor)
    print(result.report())
    return EXIT_OK if result.passed else EXIT_FAIL


GOVERNANCE_COLUMNS = (
    "project", "commit_guidelines", "qc_meeting_count", "ref_meeting_count",
    "board_meetings", "clean_code_freq",
)
COMPARISON_COLUMNS = (
    "variable", "group_high", "group_low", "n_high", "n_low", "mean_high", "mean_low",
    "median_high", "median_low", "median_gap", "t", "dof", "p_value", "applicable",
)


def cmd_mine_governance(args) -> int:
    config = load_project_config(args.projects)
    corpus = Path(args.corpus)
    base = Path(args.projects).parent
    records = []
    for name in sorted(config):
        opts = config[name]
        project_dir = corpus / name
        docs = read_meetings(project_dir) if project_dir.is_dir() else []
        if not docs:
            log.warning("no meeting minutes for %s", name)
        qc, ref = scan_minutes(docs)
        freq = opts.get("clean_code_freq")
        if freq is None and opts.get("cache"):
            pct = percent_cleaner_new(series_facts(Cache(base / opts["cache"]).load()))
            freq = None if pct is None else float(pct)
        records.append(
            GovernanceRecord(name, opts["commit_guidelines"], qc, ref,
                             clean_code_freq=None if freq is None else float(freq))
        )
    records = classify_projects(records)
    rows = [{c: getattr(r, c) for c in GOVERNANCE_COLUMNS} for r in records]
    comparisons = []
    if all(r.clean_code_freq is not None for r in records):
        for cmp in rq2_compare(records, welch=args.welch):
            comparisons.append(dict(zip(COMPARISON_COLUMNS, (
                cmp.variable, cmp.high_label, cmp.low_label, cmp.high.n, cmp.low.n,
                cmp.high_mean, cmp.low_mean,
                None if cmp.high.median is None else float(cmp.high.median),
                None if cmp.low.median is None else float(cmp.low.median),
                cmp.median_gap, cmp.test.t, cmp.test.dof, cmp.test.p_value,
                cmp.test.applicable,
            ))))
    else:
        log.warning("clean_code_freq missing for some projects; comparison skipped")
    out = sys.stdout
    if args.format == "csv":
        for columns, table in ((GOVERNANCE_COLUMNS, rows), (COMPARISON_COLUMNS, comparisons)):
            w = csv.DictWriter(out, fieldnames=list(columns), lineterminator="\n")
            w.writeheader()
            w.writerows(table)
            out.write("\n")
    else:
        for row in rows:
            out.write(json.dumps({"kind": "project", **row}, sort_keys=True) + "\n")
        for row in comparisons:
            out.write(json.dumps({"kind": "comparison", **row}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    for path in export_reports(_load_cache(args.cache), args.format, args.out):
        print(path)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "stats": cmd_stats,
    "gate": cmd_gate,
    "mine-governance": cmd_mine_governance,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tddiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuleConfigError, IssueImportError, OSError, ValueError) as exc:
        print(f"tddiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, RuleConfigError) else EXIT_ERROR
    except (AnalysisError, HistoryError, RuntimeError) as exc:
        print(f"tddiff: analysis error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
