"""Commit DAG construction, longest-path linearization and source filtering."""

from __future__ import annotations

import logging
import os
import subprocess
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

ROOT_PARENT = ""  # parent key for a root commit's diff against the empty tree


class HistoryError(RuntimeError):
    """Repository or DAG cannot be analyzed."""


class ShallowCloneError(HistoryError):
    pass


class CycleError(HistoryError):
    pass


@dataclass(frozen=True)
class CommitNode:
    id: str
    parent_ids: tuple[str, ...]
    timestamp: int
    # parent id -> paths changed against that parent ("" for a root commit)
    touched_paths: Mapping[str, frozenset[str]] = field(default_factory=dict, compare=False)

    def touched_since(self, parent_id: str | None) -> frozenset[str]:
        return self.touched_paths.get(parent_id or ROOT_PARENT, frozenset())


class CommitDag:
    """Immutable set of commits with parent edges."""

    def __init__(self, nodes: Iterable[CommitNode]):
        self.nodes: dict[str, CommitNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise HistoryError(f"duplicate commit {node.id}")
            self.nodes[node.id] = node
        for node in self.nodes.values():
            for pid in node.parent_ids:
                if pid not in self.nodes:
                    raise HistoryError(f"commit {node.id} has unknown parent {pid}")

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, commit_id: str) -> bool:
        return commit_id in self.nodes

    def __getitem__(self, commit_id: str) -> CommitNode:
        return self.nodes[commit_id]

    @property
    def edge_count(self) -> int:
        return sum(len(n.parent_ids) for n in self.nodes.values())

    @property
    def roots(self) -> list[str]:
        return sorted(cid for cid, n in self.nodes.items() if not n.parent_ids)

    def ancestors(self, head: str) -> set[str]:
        """``head`` and every commit reachable from it through parent edges."""
        seen = {head}
        todo = [head]
        while todo:
            for pid in self.nodes[todo.pop()].parent_ids:
                if pid not in seen:
                    seen.add(pid)
                    todo.append(pid)
        return seen


@dataclass(frozen=True)
class RevisionSeries:
    commits: tuple[str, ...]
    source_filter: str = "none"

    def __len__(self) -> int:
        return len(self.commits)

    def __iter__(self):
        return iter(self.commits)

    def transitions(self) -> list[tuple[str, str]]:
        return list(zip(self.commits, self.commits[1:]))


def _topological_order(dag: CommitDag, members: set[str]) -> list[str]:
    """Parents before children; raises :class:`CycleError` if impossible."""
    pending = {cid: sum(1 for p in dag[cid].parent_ids if p in members) for cid in members}
    children: dict[str, list[str]] = {cid: [] for cid in members}
    for cid in members:
        for pid in dag[cid].parent_ids:
            if pid in members:
                children[pid].append(cid)
    ready = sorted(cid for cid, k in pending.items() if k == 0)
    order: list[str] = []
    while ready:
        cid = ready.pop()
        order.append(cid)
        for child in children[cid]:
            pending[child] -= 1
            if pending[child] == 0:
                ready.append(child)
    if len(order) != len(members):
        stuck = sorted(cid for cid, k in pending.items() if k > 0)
        raise CycleError(f"cycle among commits {stuck[:5]}")
    return order


def linearize_longest_path(dag: CommitDag, head: str) -> RevisionSeries:
    """Longest root-to-``head`` path by dynamic programming over a topological order.

    Among parents giving equally long paths, the one with the smaller
    timestamp wins, then the lexicographically smaller id.
    """
    if head not in dag:
        raise HistoryError(f"head {head} not in DAG")
    members = dag.ancestors(head)
    order = _topological_order(dag, members)
    roots = sorted(cid for cid in members if not dag[cid].parent_ids)
    if len(roots) != 1:
        raise HistoryError(
            f"head {head} is not reachable from a unique root (roots: {roots})"
        )
    length: dict[str, int] = {}
    best_parent: dict[str, str | None] = {}
    for cid in order:
        parents = dag[cid].parent_ids
        if not parents:
            length[cid] = 1
            best_parent[cid] = None
            continue
        chosen = min(
            parents,
            key=lambda p: (-length[p], dag[p].timestamp, p),
        )
        length[cid] = length[chosen] + 1
        best_parent[cid] = chosen
    path = []
    cur: str | None = head
    while cur is not None:
        path.append(cur)
        cur = best_parent[cur]
    path.reverse()
    return RevisionSeries(tuple(path))


def extension_predicate(extensions: Iterable[str]) -> Callable[[str], bool]:
    exts = tuple(e if e.startswith(".") else "." + e for e in extensions)

    def is_source(path: str) -> bool:
        return path.endswith(exts)

    is_source.description = "ext:" + ",".join(exts)  # type: ignore[attr-defined]
    return is_source


def filter_source_transitions(
    series: RevisionSeries, dag: CommitDag, predicate: Callable[[str], bool]
) -> RevisionSeries:
    """Drop commits whose incoming transition touches no source path.

    A root commit's incoming transition is its diff against the empty tree.
    The surviving commits keep their order; each is later compared with the
    previous survivor.
    """
    kept = []
    prev: str | None = None
    for cid in series.commits:
        if any(predicate(p) for p in dag[cid].touched_since(prev)):
            kept.append(cid)
        prev = cid
    desc = getattr(predicate, "description", getattr(predicate, "__name__", "predicate"))
    return RevisionSeries(tuple(kept), source_filter=desc)


@dataclass(frozen=True)
class FileStatus:
    status: str  # "A", "D" or "M"
    path: str


class GitRepository:
    """History provider backed by the ``git`` command line."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        if not self.path.exists():
            raise HistoryError(f"repository {self.path} does not exist")
        try:
            inside = self._git("rev-parse", "--is-inside-work-tree", "--git-dir")
        except HistoryError as exc:
            raise HistoryError(f"{self.path} is not a git repository") from exc
        log.debug("git dir: %s", inside.split()[-1])

    def _git(self, *args: str, input: bytes | None = None) -> str:
        return self._git_bytes(*args, input=input).decode("utf-8", "replace")

    def _git_bytes(self, *args: str, input: bytes | None = None) -> bytes:
        cmd = ["git", "-c", "core.quotepath=off", "-C", str(self.path), *args]
        proc = subprocess.run(cmd, input=input, capture_output=True)
        if proc.returncode != 0:
            err = proc.stderr.decode("utf-8", "replace").strip()
            raise HistoryError(f"git {' '.join(args[:2])} failed: {err}")
        return proc.stdout

    def resolve(self, rev: str) -> str:
        try:
            return self._git("rev-parse", "--verify", "--quiet", f"{rev}^{{commit}}").strip()
        except HistoryError as exc:
            raise HistoryError(f"unknown branch or revision {rev!r}") from exc

    def commit_parents(self, rev: str) -> tuple[str, ...]:
        return tuple(self._git("rev-list", "--parents", "-n", "1", rev).split()[1:])

    def is_shallow(self) -> bool:
        return self._git("rev-parse", "--is-shallow-repository").strip() == "true"

    def commit_dag(self, branch: str) -> CommitDag:
        head = self.resolve(branch)
        if self.is_shallow():
            boundary = (Path(self._git("rev-parse", "--git-dir").strip()))
            if not boundary.is_absolute():
                boundary = self.path / boundary
            missing = (boundary / "shallow").read_text().split()
            raise ShallowCloneError(
                f"shallow clone: history before {', '.join(missing)} is missing; "
                "run `git fetch --unshallow`"
            )
        parents: dict[str, tuple[str, ...]] = {}
        stamps: dict[str, int] = {}
        trees: dict[str, str] = {}
        for line in self._git("log", "--format=%H %ct %T %P", head).splitlines():
            fields = line.split()
            parents[fields[0]] = tuple(fields[3:])
            stamps[fields[0]] = int(fields[1])
            trees[fields[0]] = fields[2]
        empty_tree = self._git("hash-object", "-t", "tree", "/dev/null").strip()
        pairs = [
            (cid, pid, pid, cid, pid)
            if pid
            else (cid, pid, empty_tree, trees[cid], f"{empty_tree} {trees[cid]}")
            for cid, pids in parents.items()
            for pid in (pids or (ROOT_PARENT,))
        ]
        # With --always every "old new" input line yields a header (the old
        # commit, or "old new" for trees) and then the changed paths, in order.
        out = self._git(
            "diff-tree", "--stdin", "--always", "-r", "--no-renames", "--name-only",
            input="".join(f"{old} {new}\n" for _, _, old, new, _ in pairs).encode(),
        )
        touched: dict[str, dict[str, frozenset[str]]] = {cid: {} for cid in parents}
        k = -1
        paths: list[str] = []
        for line in out.splitlines() + [None]:
            if line is None or (k + 1 < len(pairs) and line == pairs[k + 1][4]):
                if k >= 0:
                    cid, pid = pairs[k][:2]
                    touched[cid][pid] = frozenset(paths)
                k += 1
                paths = []
            elif line:
                paths.append(line)
        if k != len(pairs):
            raise HistoryError("could not parse git diff-tree output")
        return CommitDag(
            CommitNode(cid, pids, stamps[cid], touched[cid]) for cid, pids in parents.items()
        )

    def diff(self, old: str | None, new: str) -> list[FileStatus]:
        if old is None:
            return [FileStatus("A", p) for p in sorted(self.list_files(new))]
        out = self._git("diff-tree", "-r", "--no-renames", "--name-status", old, new)
        statuses = []
        for line in out.splitlines():
            status, _, path = line.partition("\t")
            code = status[:1]
            if code in ("A", "D"):
                statuses.append(FileStatus(code, path))
            elif code:
                statuses.append(FileStatus("M", path))
        return sorted(statuses, key=lambda s: s.path)

    def list_files(self, rev: str) -> dict[str, str]:
        """``{path: blob id}`` for every file in the revision's tree."""
        out = self._git("ls-tree", "-r", "--full-tree", rev)
        files = {}
        for line in out.splitlines():
            meta, _, path = line.partition("\t")
            mode, kind, blob = meta.split()
            if kind == "blob":
                files[path] = blob
        return files

    def read_blobs(self, blob_ids: Iterable[str]) -> dict[str, bytes]:
        ids = sorted(set(blob_ids))
        if not ids:
            return {}
        raw = self._git_bytes("cat-file", "--batch", input="\n".join(ids).encode() + b"\n")
        blobs = {}
        pos = 0
        for blob in ids:
            nl = raw.index(b"\n", pos)
            header = raw[pos:nl].split()
            size = int(header[2])
            blobs[blob] = raw[nl + 1:nl + 1 + size]
            pos = nl + 1 + size + 1
        return blobs


def build_commit_dag(repo_path: str | os.PathLike, branch: str) -> CommitDag:
    return GitRepository(repo_path).commit_dag(branch)
