"""Report tables derived from cache records (no repository access needed)."""

from __future__ import annotations

import csv
import io
import json
import os
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

from .cache import CacheRecord, frac_to_str, series_facts
from .decomposition import CHANGE_TYPES
from .stats import (
    CONTRIBUTION_COLS,
    SYSTEM_ROWS,
    chi_square,
    contingency_table,
    density_diff_distribution,
    percent_cleaner_new,
)

FORMATS = ("csv", "jsonl")

# Column order is part of the output contract.
CLEANER_COLUMNS = ("transitions_with_new", "cleaner_transitions", "percent", "percent_float")
CONTINGENCY_COLUMNS = ("change_type", "system_direction", "decrease", "increase", "stable")
CHI_COLUMNS = ("change_type", "applicable", "n", "chi2", "dof", "p_value", "phi", "cramers_v")
DISTRIBUTION_COLUMNS = (
    "mode", "n", "q1", "median", "q3", "whisker_low", "whisker_high", "outliers",
)
TRANSITION_COLUMNS = (
    "revision", "prev_revision", "td_minutes_total", "ncloc_total", "td_density",
    "new_count", "new_td", "new_loc", "deleted_count", "deleted_td", "deleted_loc",
    "modified_count", "modified_td", "modified_loc", "unchanged_count",
    "contribution_new", "contribution_deleted", "contribution_modified",
    "system_delta", "residual", "dir_new", "dir_deleted", "dir_modified", "dir_system",
    "degenerate", "excluded_files", "parse_failures",
)


def _num(x) -> str | float | int | None:
    if isinstance(x, Fraction):
        return float(x)
    return x


def cleaner_rows(records: Sequence[CacheRecord]) -> list[dict]:
    facts = series_facts(records)
    with_new = [f for f in facts if "new" in f.present and f.new_loc > 0]
    pct = percent_cleaner_new(facts)
    if pct is None:
        return [dict(zip(CLEANER_COLUMNS, (0, 0, "n/a", None)))]
    cleaner = sum(1 for f in with_new if f.new_density < f.prev_density)
    return [dict(zip(CLEANER_COLUMNS, (len(with_new), cleaner, frac_to_str(pct), float(pct))))]


def contingency_rows(records: Sequence[CacheRecord]) -> tuple[list[dict], list[dict]]:
    facts = series_facts(records)
    tables, tests = [], []
    for change_type in CHANGE_TYPES:
        table = contingency_table(facts, change_type)
        for direction, row in zip(SYSTEM_ROWS, table.cells):
            tables.append(
                dict(zip(CONTINGENCY_COLUMNS, (change_type, direction.value, *row)))
            )
        res = chi_square(table)
        tests.append(
            dict(
                zip(
                    CHI_COLUMNS,
                    (change_type, res.applicable, res.n,
                     *(None if not res.applicable else v
                       for v in (res.chi2, res.dof, res.p_value, res.phi, res.cramers_v))),
                )
            )
        )
    return tables, tests


def distribution_rows(records: Sequence[CacheRecord]) -> list[dict]:
    samples = [s for r in records if not r.degenerate for s in r.samples]
    rows = []
    for mode in ("new_class", "existing_class"):
        d = density_diff_distribution(samples, mode)
        rows.append(
            dict(zip(DISTRIBUTION_COLUMNS, (
                mode, d.n, *(_num(v) for v in (d.q1, d.median, d.q3, d.whisker_low,
                                                d.whisker_high)), d.outliers,
            )))
        )
    return rows


def transition_rows(records: Sequence[CacheRecord]) -> list[dict]:
    rows = []
    for r in records:
        d = r.to_dict()
        a = d["aggregates"]
        dirs = d["directions"] or {}
        c = d["contributions"]
        rows.append(dict(zip(TRANSITION_COLUMNS, (
            r.revision, r.prev_revision or "", r.td_minutes_total, r.ncloc_total,
            d["td_density"],
            a["new_count"], a["new_td"], a["new_loc"],
            a["deleted_count"], a["deleted_td"], a["deleted_loc"],
            a["modified_count"], a["modified_td"], a["modified_loc"], r.unchanged_count,
            c["new"], c["deleted"], c["modified"], d["system_delta"], d["residual"],
            dirs.get("new"), dirs.get("deleted"), dirs.get("modified"), dirs.get("system"),
            r.degenerate, ";".join(r.excluded_files), ";".join(r.parse_failures),
        ))))
    return rows


def _write_csv(path: Path, columns: Sequence[str], rows: list[dict]) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: "" if v is None else v for k, v in row.items()})
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    path.write_text(
        "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in rows),
        encoding="utf-8",
    )


def export_reports(
    records: Sequence[CacheRecord], fmt: str, outdir: str | os.PathLike
) -> list[Path]:
    """Write the cleaner-code share, contingency tables, chi-squared tests,
    density distributions and raw transitions into ``outdir``.

    In ``jsonl`` format the transitions file holds full cache records, so it
    can be fed back to ``stats``/``report`` as a cache.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    tables, tests = contingency_rows(records) if records else ([], [])
    outputs = {
        "cleaner_new": (CLEANER_COLUMNS, cleaner_rows(records) if records else []),
        "contingency": (CONTINGENCY_COLUMNS, tables),
        "chi_square": (CHI_COLUMNS, tests),
        "distributions": (DISTRIBUTION_COLUMNS, distribution_rows(records) if records else []),
        "transitions": (TRANSITION_COLUMNS, transition_rows(records)),
    }
    paths = []
    for name, (columns, rows) in outputs.items():
        path = out / f"{name}.{fmt}"
        if fmt == "csv":
            _write_csv(path, columns, rows)
        elif name == "transitions":
            _write_jsonl(path, [r.to_dict() for r in records])
        else:
            _write_jsonl(path, rows)
        paths.append(path)
    return paths


def render_stats(records: Sequence[CacheRecord]) -> str:
    """Human-readable summary printed by ``tddiff stats``."""
    lines = []
    facts = series_facts(records)
    degenerate = [r.revision for r in records if r.degenerate]
    lines.append(f"transitions: {len(facts)} analyzed, {len(degenerate)} degenerate")
    for rev in degenerate:
        lines.append(f"  degenerate: {rev}")
    row = cleaner_rows(records)[0]
    if row["percent"] == "n/a":
        lines.append("cleaner new code: not applicable (no transition adds methods)")
    else:
        lines.append(
            f"cleaner new code: {row['percent_float']:.2f}% "
            f"({row['cleaner_transitions']}/{row['transitions_with_new']})"
        )
    tables, tests = contingency_rows(records)
    header = "system \\ contribution".ljust(24) + "".join(c.value.rjust(10) for c in CONTRIBUTION_COLS)
    for change_type, test in zip(CHANGE_TYPES, tests):
        lines.append("")
        lines.append(f"[{change_type}]")
        lines.append(header)
        for t in tables:
            if t["change_type"] == change_type:
                lines.append(
                    t["system_direction"].ljust(24)
                    + "".join(str(t[c.value]).rjust(10) for c in CONTRIBUTION_COLS)
                )
        if test["applicable"]:
            lines.append(
                f"chi2={test['chi2']:.4f} dof={test['dof']} p={test['p_value']:.4g} "
                f"phi={test['phi']:.3f}"
            )
        else:
            lines.append(f"chi2: inapplicable (n={test['n']})")
    lines.append("")
    for d in distribution_rows(records):
        if d["n"]:
            lines.append(
                f"{d['mode']}: n={d['n']} q1={d['q1']:.6f} median={d['median']:.6f} "
                f"q3={d['q3']:.6f} outliers={d['outliers']}"
            )
        else:
            lines.append(f"{d['mode']}: n=0")
    return "\n".join(lines)
