import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_ncloc, random_java_file
from tddiff.source_model import (
    ParseError,
    build_snapshot,
    count_ncloc,
    fingerprint,
    parse_file,
    parse_methods,
    tokenize,
)

SHAPES = '''package org.demo;

import java.util.List;

/** Doc. */
public class Shapes {
    private int count = 0;

    public Shapes(int count) {
        this.count = count;
    }

    @Override
    public String toString() {
        return "Shapes(" + count + ")";
    }

    static <T extends Comparable<T>> T max(final List<? extends T> items,
                                           int @Nullable [] unused) throws Exception {
        Runnable r = new Runnable() {
            public void run() { }
        };
        return items.get(0);
    }
}
'''


def test_three_method_fixture_spans_and_signatures():
    methods = parse_methods(SHAPES, "src/Shapes.java")
    got = [(m.enclosing_class, m.signature, m.span, m.ncloc) for m in methods]
    assert got == [
        ("org.demo.Shapes", "Shapes(int)", (9, 11), 3),
        ("org.demo.Shapes", "toString()", (13, 16), 4),
        ("org.demo.Shapes", "max(List<? extends T>, int[])", (18, 24), 7),
    ]
    # the anonymous class body folds into max()
    assert methods[2].name_line == 18


def test_class_without_methods():
    assert parse_methods("class Empty { int x = 1; }", "E.java") == []


def test_comment_only_file():
    text = "// one\n/* two\n   three */\n"
    assert parse_methods(text, "C.java") == []
    assert parse_file(text, "C.java").ncloc == 0


def test_ncloc_counts_code_lines_only():
    assert count_ncloc("") == 0
    text = (
        "class A {\n"         # code
        "  // note\n"          # comment
        "\n"                   # blank
        "  int x;  /* a */\n"  # code
        "  /*\n"               # comment
        "   */\n"              # comment
        "  int y;\n"           # code
        "\n"                   # blank
        "  void f() {}\n"      # code
        "}\n"                  # code
    )
    assert count_ncloc(text) == 5


@pytest.mark.parametrize("seed", range(50))
def test_ncloc_matches_naive_classifier(seed):
    text = random_java_file(random.Random(seed))
    assert count_ncloc(text) == naive_ncloc(text)


def test_nested_and_local_classes():
    src = (
        "class Outer {\n"
        "  static class Inner {\n"
        "    void a() { class Local { void b() {} } }\n"
        "  }\n"
        "  enum Color { RED { void c() {} }, GREEN; void d() {} }\n"
        "  interface I { void abstractOnly(); default int e() { return 0; } }\n"
        "}\n"
    )
    got = [(m.enclosing_class, m.name) for m in parse_methods(src, "O.java")]
    assert got == [("Outer.Inner", "a"), ("Outer.Color", "d"), ("Outer.I", "e")]


def test_annotations_with_arguments_do_not_hide_methods():
    src = (
        "class T {\n"
        '  @Test(expected = IllegalStateException.class)\n'
        "  public void throwsOnEmpty() { run(); }\n"
        "  @interface Marker { }\n"
        "}\n"
    )
    (m,) = parse_methods(src, "T.java")
    assert m.signature == "throwsOnEmpty()"
    assert m.span == (2, 3)


def test_lambdas_and_control_blocks_are_not_methods():
    src = (
        "class L {\n"
        "  void f() {\n"
        "    if (x) { y(); }\n"
        "    Runnable r = () -> { z(); };\n"
        "    synchronized (this) { w(); }\n"
        "  }\n"
        "  static { init(); }\n"
        "}\n"
    )
    assert [m.name for m in parse_methods(src, "L.java")] == ["f"]


def test_method_spans_never_cross():
    for m1 in parse_methods(SHAPES, "S.java"):
        for m2 in parse_methods(SHAPES, "S.java"):
            if m1 is m2:
                continue
            a, b = m1.span, m2.span
            crossing = a[0] < b[0] <= a[1] < b[1]
            assert not crossing
            assert m1.start_line <= m1.end_line and m1.ncloc >= 1


def test_fingerprint_ignores_formatting():
    a = "class A {\n  int f(int x) { return x+1; }\n}\n"
    b = "class A {\n\n  int f( int x )\n  {\n    // comment\n    return x + 1;\n  }\n}\n"
    (ma,), (mb,) = parse_methods(a, "A.java"), parse_methods(b, "A.java")
    assert ma.fingerprint == mb.fingerprint


def test_renamed_local_changes_fingerprint():
    a = "class A { int f() { int v = 1; return v; } }"
    b = "class A { int f() { int w = 1; return w; } }"
    assert parse_methods(a, "A.java")[0].fingerprint != parse_methods(b, "A.java")[0].fingerprint


def test_method_name_is_abstracted_in_body_tokens():
    a = parse_methods("class A { int f() { return 1; } }", "A.java")[0]
    b = parse_methods("class A { int g() { return 1; } }", "A.java")[0]
    assert a.body_tokens == b.body_tokens
    assert a.fingerprint == fingerprint(a.body_tokens)


def test_fingerprint_collision_sweep():
    rng = random.Random(7)
    vocab = ["a", "b", "(", ")", "{", "}", ";", "=", "1", "x", "return", "+"]
    seqs = set()
    while len(seqs) < 1000:
        seqs.add(tuple(rng.choices(vocab, k=rng.randint(1, 12))))
    assert len({fingerprint(s) for s in seqs}) == 1000


@settings(max_examples=100)
@given(st.lists(st.text(min_size=1, max_size=4), min_size=1, max_size=8))
def test_fingerprint_is_pure(tokens):
    assert fingerprint(tokens) == fingerprint(list(tokens))


def test_strict_tokenizer_rejects_unterminated_input():
    with pytest.raises(ParseError):
        tokenize("/* open")
    with pytest.raises(ParseError):
        tokenize('String s = "open;\n')
    assert tokenize("/* open", strict=False) == []


def test_malformed_file_is_flagged_not_raised():
    sf = parse_file("class A { void f() { ", "A.java")
    assert not sf.parsed and sf.methods == () and sf.error


def test_snapshot_totals_and_unparsed():
    snap = build_snapshot("r1", {
        "b/B.java": "class B {\n  void g() {\n  }\n}\n",
        "a/A.java": "class A { int f() { return 1; } }\n",
        "bad/X.java": "class X { /* never closed",
    })
    # unparsed files still count toward system size, leniently tokenized
    assert snap.ncloc == 1 + 4 + 1
    assert snap.unparsed == ["bad/X.java"]
    assert [m.file_path for m in snap.methods] == ["a/A.java", "b/B.java"]
