"""Six projects with five board-minutes files each, keywords planted by hand.

Hand tally (one count per meeting per variable):

    project  QC  REF  guidelines  clean_code_freq
    P1        2    2  yes         80
    P2        3    2  yes         75
    P3        0    0  no          60
    P4        2    0  no          65
    P5        5    3  yes         90
    P6        0    1  no          55

QC sorted 0 0 2 2 3 5, median 2 -> HIGH: P2, P5.
REF sorted 0 0 1 2 2 3, median 1.5 rounds to 2 -> HIGH: P5.
Board meetings HIGH in both perspectives: P5 only.
"""

from pathlib import Path

import yaml

MINUTES = {
    "P1": {
        "m1": "We discussed code quality. Code quality matters.",
        "m2": "A large Refactoring landed.",
        "m3": "Budget and travel.",
        "m4": "Sonar dashboards were shown; time to clean up the build.",
        "m5": "Nothing notable.",
    },
    "P2": {
        "m1": "More Code Review volunteers wanted.",
        "m2": "The contribution guideline was updated.",
        "m3": "Software Quality report accepted.",
        "m4": "refactoring of the parser",
        "m5": "Clean up old branches.",
    },
    "P3": {
        "m1": "Release 2.0 vote.",
        "m2": "A cleanup of the website happened.",  # "cleanup" is not "clean up"
        "m3": "Mentors report.",
        "m4": "Trademark questions.",
        "m5": "No issues.",
    },
    "P4": {
        "m1": "Some code improvement work.",
        "m2": "Board report late.",
        "m3": "New GUIDELINES for committers.",
        "m4": "Community growth.",
        "m5": "Quiet quarter.",
    },
    "P5": {
        "m1": "sonar findings reviewed; refactoring planned",
        "m2": "sonar again; refactoring continues",
        "m3": "SONAR gates; Refactoring done",
        "m4": "sonar trend is good",
        "m5": "sonar, sonar, sonar",
    },
    "P6": {
        "m1": "Time to clean up the issue tracker.",
        "m2": "Elections.",
        "m3": "Budget.",
        "m4": "Security contact updated.",
        "m5": b"\xff\xfe sonar code quality \xff",  # undecodable: skipped
    },
}

EXPECTED = {
    "P1": (2, 2, "LOW"),
    "P2": (3, 2, "LOW"),
    "P3": (0, 0, "LOW"),
    "P4": (2, 0, "LOW"),
    "P5": (5, 3, "HIGH"),
    "P6": (0, 1, "LOW"),
}
QC_SPLIT = {"P1": "LOW", "P2": "HIGH", "P3": "LOW", "P4": "LOW", "P5": "HIGH", "P6": "LOW"}
REF_SPLIT = {"P1": "LOW", "P2": "LOW", "P3": "LOW", "P4": "LOW", "P5": "HIGH", "P6": "LOW"}
GUIDELINES = {"P1": True, "P2": True, "P3": False, "P4": "no", "P5": "yes", "P6": False}
FREQ = {"P1": 80.0, "P2": 75.0, "P3": 60.0, "P4": 65.0, "P5": 90.0, "P6": 55.0}


def write_corpus(root: Path) -> tuple[Path, Path]:
    corpus = root / "minutes"
    for project, meetings in MINUTES.items():
        d = corpus / project
        d.mkdir(parents=True)
        for name, text in meetings.items():
            data = text if isinstance(text, bytes) else text.encode()
            (d / f"{name}.txt").write_bytes(data)
    config = root / "projects.yaml"
    config.write_text(yaml.safe_dump({
        "projects": {
            p: {"commit_guidelines": GUIDELINES[p], "clean_code_freq": FREQ[p]} for p in MINUTES
        }
    }))
    return corpus, config
