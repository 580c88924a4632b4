"""Independent reference implementations used to cross-check the package.

None of these import from ``tddiff``; they are deliberately naive.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache

from tddiff.history import CommitDag, CommitNode


# -- history -----------------------------------------------------------------

def random_dag(rng: random.Random, max_nodes: int = 12) -> tuple[CommitDag, str]:
    """Single-rooted DAG; every node descends from the first generated node.

    Timestamps are drawn from a small range so ties are common.
    """
    n = rng.randint(1, max_nodes)
    # random names, so id order and topological order disagree
    ids = rng.sample([f"n{i:02d}" for i in range(n)], n)
    nodes = [CommitNode(ids[0], (), rng.randint(0, 3))]
    for i in range(1, n):
        k = rng.randint(1, min(3, i))
        parents = tuple(rng.sample(ids[:i], k))
        nodes.append(CommitNode(ids[i], parents, rng.randint(0, 3)))
    return CommitDag(nodes), ids[-1]


def all_paths(dag: CommitDag, head: str) -> list[list[str]]:
    """Every root-to-head path, by exhaustive recursion."""
    node = dag[head]
    if not node.parent_ids:
        return [[head]]
    return [p + [head] for pid in node.parent_ids for p in all_paths(dag, pid)]


def tiebroken_path(dag: CommitDag, head: str) -> list[str]:
    """Longest path where, walking back from head, each step picks the parent
    with the longest path, then the earliest timestamp, then the smallest id."""

    @lru_cache(maxsize=None)
    def longest(cid: str) -> int:
        return max((p for p in all_paths(dag, cid)), key=len).__len__()

    path = [head]
    cur = head
    while dag[cur].parent_ids:
        cur = sorted(dag[cur].parent_ids, key=lambda p: (-longest(p), dag[p].timestamp, p))[0]
        path.append(cur)
    return path[::-1]


# -- decomposition -----------------------------------------------------------

def density_change(td: int, loc: int, td_part: int, loc_part: int, sign: int) -> Fraction:
    """``(td + sign*td_part)/(loc + sign*loc_part) - td/loc`` evaluated directly."""
    return Fraction(td + sign * td_part, loc + sign * loc_part) - Fraction(td, loc)


# -- source model ------------------------------------------------------------

def naive_ncloc(text: str) -> int:
    """Character-by-character scan; a line counts once it holds any
    character outside comments and whitespace."""
    counted = set()
    line = 1
    i = 0
    state = "code"  # code, block, line, str, chr, text
    while i < len(text):
        ch = text[i]
        nxt = text[i + 1] if i + 1 < len(text) else ""
        if ch == "\n":
            line += 1
            if state == "line":
                state = "code"
            i += 1
            continue
        if state == "code":
            if ch == "/" and nxt == "*":
                state = "block"
                i += 2
                continue
            if ch == "/" and nxt == "/":
                state = "line"
                i += 2
                continue
            if text.startswith('"""', i):
                state = "text"
                counted.add(line)
                i += 3
                continue
            if ch == '"':
                state = "str"
            elif ch == "'":
                state = "chr"
            if not ch.isspace():
                counted.add(line)
            i += 1
            continue
        if state == "block":
            if ch == "*" and nxt == "/":
                state = "code"
                i += 2
                continue
            i += 1
            continue
        if state == "line":
            i += 1
            continue
        # inside a literal: every line it touches is code
        counted.add(line)
        if ch == "\\":
            i += 2
            continue
        if state == "text" and text.startswith('"""', i):
            state = "code"
            i += 3
            continue
        if (state == "str" and ch == '"') or (state == "chr" and ch == "'"):
            state = "code"
        i += 1
    return len(counted)


_WORDS = ["int", "x", "y", "foo", "return", "if", "a", "b", "0", "1", "+", "=", ";", "(", ")"]


def random_java_file(rng: random.Random) -> str:
    """Java-ish text mixing code, comments, literals and blank lines."""
    out = []
    for _ in range(rng.randint(0, 25)):
        kind = rng.random()
        indent = " " * rng.randint(0, 8)
        if kind < 0.15:
            out.append("")
        elif kind < 0.3:
            out.append(indent + "// " + " ".join(rng.choices(_WORDS, k=3)))
        elif kind < 0.4:
            body = "\n".join(indent + " * " + rng.choice(_WORDS) for _ in range(rng.randint(0, 3)))
            out.append(indent + "/*" + ("\n" + body if body else "") + "\n" + indent + " */")
        elif kind < 0.5:
            out.append(indent + "int s = \"a // not /* a comment\"; /* tail */")
        elif kind < 0.55:
            out.append(indent + "/* lead */ x = '\\'';")
        elif kind < 0.6:
            out.append(indent + 'String t = """\n' + indent + "  block // text\n" + indent + '  """;')
        else:
            out.append(indent + " ".join(rng.choices(_WORDS, k=rng.randint(1, 6))))
    return "\n".join(out) + ("\n" if rng.random() < 0.5 else "")


# -- stats ---------------------------------------------------------------------

def pooled_t(a: list[float], b: list[float]) -> tuple[float, int]:
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
    return (ma - mb) / math.sqrt(sp2 * (1 / na + 1 / nb)), na + nb - 2


def t_two_sided_p(t: float, dof: int, steps: int = 200_000) -> float:
    """Two-sided p-value by Simpson integration of the Student t density."""
    c = math.gamma((dof + 1) / 2) / (math.sqrt(dof * math.pi) * math.gamma(dof / 2))
    f = lambda x: c * (1 + x * x / dof) ** (-(dof + 1) / 2)  # noqa: E731
    x = abs(t)
    h = x / steps
    s = f(0) + f(x) + sum((4 if k % 2 else 2) * f(k * h) for k in range(1, steps))
    central = s * h / 3
    return 1 - 2 * central


def chi2_by_hand(cells: list[list[int]]) -> float:
    rows = [r for r in cells if sum(r)]
    cols = [j for j in range(len(rows[0])) if any(r[j] for r in rows)]
    rows = [[r[j] for j in cols] for r in rows]
    n = sum(map(sum, rows))
    rs = [sum(r) for r in rows]
    cs = [sum(r[j] for r in rows) for j in range(len(cols))]
    return sum(
        (rows[i][j] - rs[i] * cs[j] / n) ** 2 / (rs[i] * cs[j] / n)
        for i in range(len(rows))
        for j in range(len(cols))
    )


def hand_quartiles(values: list) -> tuple:
    """Type-7 quartiles by explicit sorted-list indexing."""
    s = sorted(values)
    n = len(s)

    def q(p):
        h = (n - 1) * p
        lo = math.floor(h)
        frac = Fraction(h) - lo
        hi = min(lo + 1, n - 1)
        return s[lo] + (s[hi] - s[lo]) * frac

    return q(Fraction(1, 4)), q(Fraction(1, 2)), q(Fraction(3, 4))

