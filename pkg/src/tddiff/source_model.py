"""Method inventory for brace-delimited, C-family source files.

A tolerant tokenizer plus brace matcher recovers class and method
boundaries without building a full syntax tree. Grammar assumptions:

* bodies are delimited by ``{`` and ``}``;
* comments are ``// ...`` and ``/* ... */``;
* string literals use ``"``, text blocks ``\"\"\"``, char literals ``'``.

Braces inside comments and literals never count toward nesting.
Anything nested inside a method (lambdas, anonymous and local classes)
folds into that method.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from typing import NamedTuple

log = logging.getLogger(__name__)

DEFAULT_SOURCE_EXTENSIONS = (".java",)

CLASS_KEYWORDS = frozenset({"class", "interface", "enum", "record"})
CONTROL_KEYWORDS = frozenset(
    {
        "if", "else", "for", "while", "do", "switch", "case", "default",
        "try", "catch", "finally", "synchronized", "return", "throw", "new",
        "assert", "break", "continue", "yield", "static", "sizeof",
    }
)
METHOD_NAME_PLACEHOLDER = "<m>"


class ParseError(ValueError):
    """Raised when a file cannot be tokenized or its braces do not balance."""


class Token(NamedTuple):
    kind: str  # "id", "num", "str", "chr", "op"
    text: str
    line: int
    end_line: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<bopen>/\*)
  | (?P<tblock>\"\"\".*?\"\"\")
  | (?P<str>"(?:\\.|[^"\\\n])*")
  | (?P<chr>'(?:\\.|[^'\\\n])*')
  | (?P<badquote>["'])
  | (?P<id>[^\W\d]\w*|\$[\w$]*)
  | (?P<num>(?:\d[\w.]*|\.\d[\w.]*)(?:(?<=[eEpP])[+-][\w.]+)?)
  | (?P<op>\.\.\.|->|::|\+\+|--|&&|\|\||<<=|<<|[+\-*/%&|^!=<>]=|.)
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(text: str, strict: bool = True) -> list[Token]:
    """Split ``text`` into code tokens, dropping whitespace and comments.

    With ``strict=False`` an unterminated block comment runs to the end of
    the file and a stray quote becomes a one-character token, instead of
    raising :class:`ParseError`.
    """
    tokens: list[Token] = []
    line = 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        value = m.group()
        newlines = value.count("\n")
        if kind == "bopen":
            if strict:
                raise ParseError(f"unterminated block comment at line {line}")
            break
        if kind == "badquote":
            if strict:
                raise ParseError(f"unterminated literal at line {line}")
            kind = "op"
        elif kind == "tblock":
            kind = "str"
        if kind not in ("ws", "lcomment", "bcomment"):
            tokens.append(Token(kind, value, line, line + newlines))
        line += newlines
        pos = m.end()
    return tokens


def code_lines(tokens: list[Token]) -> set[int]:
    lines: set[int] = set()
    for tok in tokens:
        lines.update(range(tok.line, tok.end_line + 1))
    return lines


def count_ncloc(text: str) -> int:
    """Count lines holding at least one token that is not comment or whitespace."""
    return len(code_lines(tokenize(text, strict=False)))


def fingerprint(body_tokens: tuple[str, ...] | list[str]) -> str:
    """Stable 128-bit digest of a normalized token sequence.

    Tokens are joined with a separator that cannot occur inside a token,
    so distinct sequences only collide on a BLAKE2b collision (about
    ``k**2 / 2**129`` for ``k`` fingerprints).
    """
    h = hashlib.blake2b(digest_size=16)
    h.update("\x00".join(body_tokens).encode("utf-8", "surrogatepass"))
    return h.hexdigest()


@dataclass(frozen=True)
class MethodRecord:
    file_path: str
    enclosing_class: str
    name: str
    param_types: tuple[str, ...]
    start_line: int
    end_line: int
    ncloc: int
    body_tokens: tuple[str, ...] = field(repr=False, compare=False)
    fingerprint: str = ""
    name_line: int = 0
    # Token-level data used by the rule engine; not part of identity.
    tokens: tuple[Token, ...] = field(default=(), repr=False, compare=False)

    @property
    def signature(self) -> str:
        return f"{self.name}({', '.join(self.param_types)})"

    @property
    def span(self) -> tuple[int, int]:
        return self.start_line, self.end_line

    @property
    def key(self) -> tuple[str, str, str, int]:
        """Unique within a snapshot: identity plus start line for duplicates."""
        return self.file_path, self.enclosing_class, self.signature, self.start_line

    @property
    def identity(self) -> tuple[str, str]:
        """What matches a method across revisions within one file."""
        return self.enclosing_class, self.signature

    def contains(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line


@dataclass(frozen=True)
class SourceFile:
    path: str
    ncloc: int
    line_count: int
    methods: tuple[MethodRecord, ...] = ()
    parsed: bool = True
    error: str = ""


@dataclass
class Snapshot:
    """Parsed source files of one revision."""

    revision: str
    files: dict[str, SourceFile] = field(default_factory=dict)

    @property
    def methods(self) -> list[MethodRecord]:
        return [m for path in sorted(self.files) for m in self.files[path].methods]

    @property
    def ncloc(self) -> int:
        return sum(f.ncloc for f in self.files.values())

    @property
    def unparsed(self) -> list[str]:
        return sorted(p for p, f in self.files.items() if not f.parsed)


@dataclass
class _Scope:
    kind: str  # "class", "enum", "method", "block"
    name: str = ""
    header_start: int = 0
    name_index: int = -1
    params: tuple[str, ...] = ()
    constants_done: bool = True


def _join_type(tokens: list[Token]) -> str:
    out = ""
    prev_kind = ""
    for tok in tokens:
        if out and tok.kind in ("id", "num") and (prev_kind in ("id", "num") or out[-1] == "?"):
            out += " "
        out += tok.text
        prev_kind = tok.kind
    return out


def _split_params(tokens: list[Token]) -> list[list[Token]]:
    params: list[list[Token]] = []
    current: list[Token] = []
    depth = 0
    for tok in tokens:
        if tok.text in ("<", "(", "["):
            depth += 1
        elif tok.text in (">", ")", "]"):
            depth -= 1
        elif tok.text == "," and depth == 0:
            params.append(current)
            current = []
            continue
        current.append(tok)
    if current:
        params.append(current)
    return params


def _strip_annotations(tokens: list[Token]) -> list[Token]:
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.text == "@" and i + 1 < len(tokens) and tokens[i + 1].text != "interface":
            i += 2
            while i + 1 < len(tokens) and tokens[i].text == "." and tokens[i + 1].kind == "id":
                i += 2
            if i < len(tokens) and tokens[i].text == "(":
                depth = 0
                while i < len(tokens):
                    if tokens[i].text == "(":
                        depth += 1
                    elif tokens[i].text == ")":
                        depth -= 1
                        if depth == 0:
                            i += 1
                            break
                    i += 1
            continue
        out.append(tok)
        i += 1
    return out


def param_types(tokens: list[Token]) -> tuple[str, ...]:
    """Type texts of a parameter list (the tokens between the parentheses)."""
    types = []
    for param in _split_params(tokens):
        param = [t for t in _strip_annotations(param) if t.text != "final"]
        if len(param) > 1 and param[-1].kind == "id":
            param = param[:-1]
        elif len(param) > 3 and param[-1].text == "]" and param[-3].kind == "id":
            # C-style "int a[]"
            param = param[:-3] + param[-2:]
        types.append(_join_type(param))
    return tuple(t for t in types if t)


def _matching_open_paren(header: list[Token], close: int) -> int:
    depth = 0
    for i in range(close, -1, -1):
        if header[i].text == ")":
            depth += 1
        elif header[i].text == "(":
            depth -= 1
            if depth == 0:
                return i
    return -1


def _classify(header: list[Token], stack: list[_Scope]) -> _Scope:
    if any(s.kind == "method" for s in stack):
        return _Scope("block")
    top = stack[-1] if stack else None
    bare = _strip_annotations(header)
    if any(t.text in ("=", "new", "->") for t in bare):
        return _Scope("block")
    for i, tok in enumerate(bare):
        if (
            tok.text in CLASS_KEYWORDS
            and i + 1 < len(bare)
            and bare[i + 1].kind == "id"
            and (i == 0 or bare[i - 1].text != ".")
        ):
            kind = "enum" if tok.text == "enum" else "class"
            return _Scope(kind, name=bare[i + 1].text, constants_done=kind != "enum")
    texts = [t.text for t in header]
    if top is not None and (top.kind == "block" or not top.constants_done):
        return _Scope("block")
    close = len(header) - 1
    if "throws" in texts:
        close = texts.index("throws") - 1
    if close < 1 or header[close].text != ")":
        return _Scope("block")
    open_ = _matching_open_paren(header, close)
    if open_ < 1:
        return _Scope("block")
    name_tok = header[open_ - 1]
    if name_tok.kind != "id" or name_tok.text in CONTROL_KEYWORDS:
        return _Scope("block")
    return _Scope(
        "method",
        name=name_tok.text,
        name_index=open_ - 1,
        params=param_types(header[open_ + 1:close]),
    )


def parse_methods(text: str, file_path: str) -> list[MethodRecord]:
    """Extract every method and constructor with its span and fingerprint.

    Raises :class:`ParseError` for unterminated comments or literals and for
    unbalanced braces; callers flag such files as unparsed.
    """
    tokens = tokenize(text, strict=True)
    lines = code_lines(tokens)
    methods: list[MethodRecord] = []
    stack: list[_Scope] = []
    package = ""
    header_start = 0
    for i, tok in enumerate(tokens):
        t = tok.text
        if t == ";":
            if not stack and i > header_start and tokens[header_start].text == "package":
                package = "".join(x.text for x in tokens[header_start + 1:i])
            if stack and stack[-1].kind == "enum":
                stack[-1].constants_done = True
            header_start = i + 1
        elif t == "{":
            scope = _classify(tokens[header_start:i], stack)
            scope.header_start = header_start
            if scope.kind == "method":
                scope.name_index += header_start
            stack.append(scope)
            header_start = i + 1
        elif t == "}":
            if not stack:
                raise ParseError(f"unbalanced '}}' at line {tok.line}")
            scope = stack.pop()
            if scope.kind == "method":
                methods.append(
                    _make_record(tokens, lines, scope, i, stack, package, file_path)
                )
            header_start = i + 1
    if stack:
        raise ParseError(f"{len(stack)} unclosed '{{' at end of file")
    methods.sort(key=lambda m: (m.start_line, m.end_line))
    return methods


def _make_record(tokens, lines, scope, close_index, stack, package, file_path):
    classes = [s.name for s in stack if s.kind in ("class", "enum")]
    enclosing = ".".join(([package] if package else []) + classes)
    own = tokens[scope.header_start:close_index + 1]
    body = tuple(
        METHOD_NAME_PLACEHOLDER if k == scope.name_index - scope.header_start else tok.text
        for k, tok in enumerate(own)
    )
    start, end = own[0].line, tokens[close_index].end_line
    ncloc = sum(1 for ln in range(start, end + 1) if ln in lines)
    return MethodRecord(
        file_path=file_path,
        enclosing_class=enclosing,
        name=scope.name,
        param_types=scope.params,
        start_line=start,
        end_line=end,
        ncloc=ncloc,
        body_tokens=body,
        fingerprint=fingerprint(body),
        name_line=tokens[scope.name_index].line,
        tokens=tuple(own),
    )


def parse_file(text: str, file_path: str) -> SourceFile:
    """Parse one file, flagging it instead of raising when it is malformed."""
    line_count = text.count("\n") + (0 if text.endswith("\n") or not text else 1)
    ncloc = count_ncloc(text)
    try:
        methods = parse_methods(text, file_path)
    except ParseError as exc:
        log.warning("unparsed %s: %s", file_path, exc)
        return SourceFile(file_path, ncloc, line_count, (), parsed=False, error=str(exc))
    return SourceFile(file_path, ncloc, line_count, tuple(methods))


def build_snapshot(revision: str, files: dict[str, str]) -> Snapshot:
    """Parse ``{path: text}`` into a snapshot, in deterministic path order."""
    snap = Snapshot(revision)
    for path in sorted(files):
        snap.files[path] = parse_file(files[path], path)
    return snap
