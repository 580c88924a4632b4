import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import chi2_by_hand, hand_quartiles, pooled_t, t_two_sided_p
from tddiff.decomposition import Direction
from tddiff.stats import (
    TransitionFacts,
    chi_square,
    contingency_table,
    density_diff_distribution,
    density_samples,
    median_split,
    pearson_chi2,
    percent_cleaner_new,
    phi_coefficient,
    round_half_away,
    summarize,
    t_test_independent,
)

F = Fraction


def test_chi_square_independence_is_zero():
    res = chi_square([[10, 10], [10, 10]])
    assert res.applicable and res.chi2 == 0 and res.phi == 0 and res.p_value == 1


def test_chi_square_two_by_two():
    res = chi_square([[10, 20], [30, 40]])
    assert res.chi2 == pytest.approx(0.7936507936507936, abs=1e-9)
    assert pearson_chi2([[10, 20], [30, 40]])[0] == F(50, 63)
    assert res.dof == 1
    assert res.chi2 == pytest.approx(chi2_by_hand([[10, 20], [30, 40]]), abs=1e-12)


def test_phi_formula_consistency():
    assert phi_coefficient(61.55, 452) == pytest.approx(0.3690, abs=5e-4)


def test_zero_columns_dropped_before_dof():
    res = chi_square([[195, 47, 0], [97, 113, 0]])
    assert res.dof == 1
    assert res.chi2 == pytest.approx(chi2_by_hand([[195, 47, 0], [97, 113, 0]]), rel=1e-12)


def test_inapplicable_tables():
    for cells in ([[0, 0, 0], [0, 0, 0]], [[3, 0, 0], [5, 0, 0]], [[3, 4, 1], [0, 0, 0]]):
        res = chi_square(cells)
        assert not res.applicable and "inapplicable" in res.note


cells_st = st.lists(st.lists(st.integers(0, 40), min_size=3, max_size=3), min_size=2, max_size=2)


@settings(max_examples=200, deadline=None)
@given(cells_st, st.integers(1, 9))
def test_chi_square_permutation_and_scaling(cells, k):
    base = pearson_chi2(cells)[0]
    assert pearson_chi2(cells[::-1])[0] == base
    assert pearson_chi2([r[::-1] for r in cells])[0] == base
    scaled = [[k * x for x in r] for r in cells]
    assert pearson_chi2(scaled)[0] == k * base
    res, res_k = chi_square(cells), chi_square(scaled)
    if res.applicable:
        assert res_k.phi == pytest.approx(res.phi, rel=1e-12)


def test_t_test_reference_example():
    res = t_test_independent([1, 2, 3], [2, 3, 4])
    assert res.t == pytest.approx(-1.2247, abs=1e-4)
    assert res.dof == 4
    assert res.p_value == pytest.approx(0.288, abs=5e-3)
    assert res.p_value == pytest.approx(t_two_sided_p(res.t, 4), abs=1e-8)


def test_t_test_identical_and_degenerate_samples():
    res = t_test_independent([5, 5, 5], [5, 5, 5])
    assert (res.t, res.p_value) == (0, 1)
    assert not t_test_independent([1, 1], [2, 2]).applicable
    assert not t_test_independent([1], [2, 3]).applicable


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 100), min_size=2, max_size=8),
       st.lists(st.integers(0, 100), min_size=2, max_size=8))
def test_t_test_matches_hand_formula(a, b):
    res = t_test_independent(a, b)
    if len(set(a)) == 1 and len(set(b)) == 1:
        return
    t, dof = pooled_t(a, b)
    assert res.t == pytest.approx(t, rel=1e-9, abs=1e-12)
    assert res.dof == dof


def test_welch_option():
    res = t_test_independent([1, 2, 3, 4], [10, 30, 50], welch=True)
    va, vb = F(5, 3) / 4, F(400) / 3
    expected_dof = float((va + vb) ** 2 / (va**2 / 3 + vb**2 / 2))
    assert res.dof == pytest.approx(expected_dof)


def test_round_half_away_from_zero():
    assert [round_half_away(F(x, 2)) for x in (5, 3, 1, -1, -3)] == [3, 2, 1, -1, -2]


def test_median_split_examples():
    assert set(median_split({"a": 0, "b": 0, "c": 0}).values()) == {"LOW"}
    assert median_split({"a": 1, "b": 2, "c": 3, "d": 10}) == {
        "a": "LOW", "b": "LOW", "c": "LOW", "d": "HIGH"}
    assert median_split({"solo": 7}) == {"solo": "LOW"}


def test_quartiles_of_twelve_samples():
    values = [F(v, 7) for v in (-9, 4, 0, 13, -2, 6, 6, 1, -15, 8, 22, -3)]
    s = summarize(values)
    assert (s.q1, s.median, s.q3) == hand_quartiles(values)
    # sorted: -15 -9 -3 -2 0 1 4 6 6 8 13 22 (over 7)
    assert s.median == F(5, 14)
    assert s.q1 == F(-9, 28)  # (-3 + 0.75 * 1) / 7
    assert s.q3 == F(13, 14)  # (6 + 0.25 * 2) / 7
    # fences at q1 - 1.5 IQR ~ -2.20 and q3 + 1.5 IQR ~ 2.80: only 22/7 lies outside
    assert s.whisker_low == F(-15, 7) and s.whisker_high == F(13, 7)
    assert s.outliers == 1


@settings(max_examples=200)
@given(st.lists(st.fractions(min_value=-50, max_value=50), min_size=1, max_size=40))
def test_quartiles_are_ordered(values):
    s = summarize(values)
    assert s.q1 <= s.median <= s.q3
    assert s.whisker_low >= min(values) and s.whisker_high <= max(values)


def test_tukey_outliers():
    s = summarize([1, 2, 3, 4, 100])
    assert s.outliers == 1 and s.whisker_high == 4


def facts(rev, system, new=F(0), deleted=F(0), modified=F(0), present=(), prev=F(1),
          new_td=0, new_loc=0):
    return TransitionFacts(rev, prev, F(system),
                           {"new": F(new), "deleted": F(deleted), "modified": F(modified)},
                           tuple(present), new_td, new_loc)


def test_percent_cleaner_new():
    fs = [
        facts("a", -1, new=-1, present=("new",), prev=F(2), new_td=1, new_loc=1),
        facts("b", -1, new=-1, present=("new",), prev=F(2), new_td=0, new_loc=5),
        facts("c", 1, new=1, present=("new", "modified"), prev=F(2), new_td=9, new_loc=3),
        facts("d", -1, new=-1, present=("new",), prev=F(1, 2), new_td=1, new_loc=3),
        facts("e", 1, modified=1, present=("modified",)),
    ]
    assert percent_cleaner_new(fs) == 75
    assert percent_cleaner_new(fs[4:]) is None
    dirty = [facts(str(i), -1, present=("new",), prev=F(3), new_td=0, new_loc=4)
             for i in range(3)]
    assert percent_cleaner_new(dirty) == 100


# 20 synthetic deltas, each hand-labelled (system, new, deleted, modified, present)
DELTAS = [
    (-1, -1, 0, 0, "n"),        # single type: skipped everywhere
    (-1, -1, 1, 0, "nd"),       # sys dec: new dec, del inc
    (-1, -2, 0, 1, "nm"),       # sys dec: new dec, mod inc
    (1, 1, 0, 0, "nd"),         # sys inc: new inc, del stable
    (1, 2, -1, 0, "nd"),        # sys inc: new inc, del dec
    (0, 1, -1, 0, "nd"),        # stable system: skipped
    (2, 0, 1, 1, "dm"),         # sys inc: del inc, mod inc
    (-3, 0, -1, -2, "dm"),      # sys dec: del dec, mod dec
    (1, -1, 1, 1, "ndm"),       # sys inc: new dec, del inc, mod inc
    (-1, -1, -1, 1, "ndm"),     # sys dec: new dec, del dec, mod inc
    (1, 0, 0, 1, "m"),          # single type
    (-2, 0, 0, 0, "nm"),        # sys dec: new stable, mod stable
    (1, 1, 0, -1, "nm"),        # sys inc: new inc, mod dec
    (-1, 0, -1, 0, "d"),        # single type
    (1, 0, 1, 0, "dm"),         # sys inc: del inc, mod stable
    (-1, -1, 0, -1, "nm"),      # sys dec: new dec, mod dec
    (1, 1, 1, -1, "ndm"),       # sys inc: new inc, del inc, mod dec
    (-1, 1, -1, -1, "ndm"),     # sys dec: new inc, del dec, mod dec
    (0, 0, 0, 0, "nm"),         # stable system: skipped
    (-1, -1, 0, 0, "nd"),       # sys dec: new dec, del stable
]


def test_contingency_from_twenty_deltas():
    names = {"n": "new", "d": "deleted", "m": "modified"}
    fs = [
        facts(str(i), s, n, d, m, tuple(names[c] for c in p))
        for i, (s, n, d, m, p) in enumerate(DELTAS)
    ]
    # rows: system decrease, increase; cols: contribution decrease, increase, stable
    assert contingency_table(fs, "new").cells == ((5, 1, 1), (1, 4, 0))
    assert contingency_table(fs, "deleted").cells == ((3, 1, 1), (1, 4, 1))
    assert contingency_table(fs, "modified").cells == ((3, 2, 1), (2, 2, 1))
    for change_type in ("new", "deleted", "modified"):
        table = contingency_table(fs, change_type)
        counted = sum(
            1 for f in fs
            if change_type in f.present and len(f.present) > 1 and f.system_delta != 0
        )
        assert table.n == counted


def test_empty_contingency_table():
    table = contingency_table([], "new")
    assert table.n == 0 and table.cells == ((0, 0, 0), (0, 0, 0))
    assert not chi_square(table).applicable


def test_density_samples_routing():
    samples = density_samples(
        "r",
        [("Host", 0, 4), ("Host", 6, 2), ("Fresh", 3, 3), ("Empty", 1, 1)],
        {"Host": (10, 5), "Empty": (0, 0)},
        F(1, 4),
    )
    got = [(s.enclosing_class, s.mode, s.difference) for s in samples]
    assert got == [
        ("Empty", "new_class", F(1) - F(1, 4)),
        ("Fresh", "new_class", F(1) - F(1, 4)),
        ("Host", "existing_class", F(6, 6) - F(2)),
    ]
    clean = density_samples("r", [("Host", 0, 3)], {"Host": (10, 5)}, F(1))
    assert clean[0].difference == -2
    same = density_samples("r", [("Host", 4, 2)], {"Host": (10, 5)}, F(1))
    assert same[0].difference == 0
    dist = density_diff_distribution(samples, "new_class")
    assert dist.n == 2 and dist.median == F(3, 4)
    with pytest.raises(ValueError):
        density_diff_distribution(samples, "other")


@settings(max_examples=100)
@given(st.permutations(range(6)))
def test_percent_invariant_under_relabelling(order):
    base = [facts(f"r{i}", -1, present=("new",), prev=F(i + 1), new_td=i % 3, new_loc=2)
            for i in range(6)]
    relabelled = [facts(f"x{order[i]}", -1, present=("new",), prev=F(i + 1),
                        new_td=i % 3, new_loc=2) for i in range(6)]
    assert percent_cleaner_new(base) == percent_cleaner_new(relabelled)
    assert 0 <= percent_cleaner_new(base) <= 100


def test_direction_rows_order():
    assert [d.value for d in (Direction.DECREASE, Direction.INCREASE)] == ["decrease", "increase"]
    assert math.isnan(chi_square([[0, 0], [0, 0]]).chi2)
