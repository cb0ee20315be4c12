import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_alignment
from reinflect.data import MSD, Dataset, FormatError, Triple
from reinflect.evaluate import levenshtein
from reinflect.rules import (
    PREFIX,
    SUFFIX,
    Rule,
    RuleTable,
    align,
    alignment_cost,
    apply,
    explain,
    extract_rules,
    train,
)

KOTI_RULES = {("", "sta"), ("i", "ista"), ("ti", "dista"), ("oti", "odista"), ("koti", "kodista")}


def test_align_koti():
    pairs = align("koti", "kodista")
    assert pairs == [("k", "k"), ("o", "o"), ("t", "d"), ("i", "i"), ("", "s"), ("", "t"), ("", "a")]
    assert (alignment_cost(pairs), pairs) == brute_alignment("koti", "kodista")


def test_align_identity():
    assert align("abc", "abc") == [("a", "a"), ("b", "b"), ("c", "c")]


def test_align_aufbauen_is_minimal():
    pairs = align("aufbauen", "baust auf")
    cost, preferred = brute_alignment("aufbauen", "baust auf")
    assert alignment_cost(pairs) == cost == levenshtein("aufbauen", "baust auf")
    assert pairs == preferred
    assert "".join(a for a, _ in pairs) == "aufbauen"
    assert "".join(b for _, b in pairs).endswith(" auf")


@pytest.mark.parametrize(
    "a,b",
    [("koti", "kodista"), ("sing", "sang"), ("machen", "gemacht"), ("ab", "ba"), ("", "xy"), ("xy", "")],
)
def test_align_matches_brute_force(a, b):
    pairs = align(a, b)
    assert (alignment_cost(pairs), pairs) == brute_alignment(a, b)


@settings(max_examples=300)
@given(st.text(max_size=6), st.text(max_size=6))
def test_alignment_conservation(a, b):
    pairs = align(a, b)
    assert "".join(x for x, _ in pairs) == a
    assert "".join(y for _, y in pairs) == b
    assert all(len(x) <= 1 and len(y) <= 1 and (x or y) for x, y in pairs)


@settings(max_examples=300)
@given(st.text(alphabet="abcd", max_size=8), st.text(alphabet="abcd", max_size=8))
def test_alignment_cost_is_levenshtein(a, b):
    assert alignment_cost(align(a, b)) == levenshtein(a, b)


def test_extract_koti(elative):
    rules = extract_rules(Triple("koti", elative, "kodista"))
    assert all(r.kind == SUFFIX for r in rules)
    assert {(r.lhs, r.rhs) for r in rules} == KOTI_RULES
    assert str(Rule(SUFFIX, "oti", "odista")) == "oti$ -> odista$"


def test_extract_identity():
    rules = extract_rules(Triple("walk", MSD.parse("V;PRS"), "walk"))
    assert all(r.lhs == r.rhs for r in rules)
    assert len(rules) == 5


def test_extract_aufbauen_prefix_and_fidelity():
    t = Triple("aufbauen", MSD.parse("V;IND;PRS;2;SG"), "baust auf")
    rules = extract_rules(t)
    prefix = [r for r in rules if r.kind == PREFIX]
    assert prefix
    assert Rule(PREFIX, "a", "ba") in prefix
    assert any(r.kind == SUFFIX and r.rhs.endswith(" auf") for r in rules)
    assert apply(train(Dataset("deu", [t])), t.lemma, t.msd) == t.form


def test_prefix_rules_generalize():
    msd = MSD.parse("V;PST;PTCP")
    table = train(Dataset("deu", [Triple("machen", msd, "gemacht")]))
    assert apply(table, "machen", msd) == "gemacht"
    assert any(kind == PREFIX for _, kind, _, _, _ in table.items())


def test_train_koti(koti, elative):
    table = train(koti)
    rows = list(table.items())
    assert {(lhs, rhs) for _, _, lhs, rhs, _ in rows} == KOTI_RULES
    assert all(count == 1 and kind == SUFFIX and msd == elative for msd, kind, _, _, count in rows)


def test_train_counts(elative):
    t = Triple("koti", elative, "kodista")
    table = train(Dataset("fin", [t, t]))
    assert {(lhs, rhs, c) for _, _, lhs, rhs, c in table.items()} == {(l, r, 2) for l, r in KOTI_RULES}


def test_train_keeps_competing_rhs(elative):
    table = train(Dataset("fin", [Triple("koti", elative, "kodista"), Triple("lasi", elative, "lasin")]))
    counts = table.rules[(elative, SUFFIX, "i")]
    assert counts == {"ista": 1, "in": 1}


def test_train_empty():
    with pytest.raises(ValueError):
        train(Dataset("fin", []))


def test_apply_luoti(koti, elative):
    table = train(koti)
    assert apply(table, "luoti", elative) == "luodista"
    suffix, prefix = explain(table, "luoti", elative)
    assert suffix == Rule(SUFFIX, "oti", "odista")
    assert prefix is None


def test_unseen_msd_copies(koti):
    assert apply(train(koti), "luoti", MSD.parse("V;PST")) == "luoti"


def test_frequency_tie_break(elative):
    table = RuleTable("fin")
    table.add(elative, Rule(SUFFIX, "", "sta"))
    table.add(elative, Rule(SUFFIX, "i", "ista"), 3)
    table.add(elative, Rule(SUFFIX, "i", "in"), 1)
    assert apply(table, "pappi", elative) == "pappista"
    table.add(elative, Rule(SUFFIX, "i", "in"), 5)
    assert apply(table, "pappi", elative) == "pappin"


def test_lexicographic_tie_break(elative):
    table = RuleTable()
    table.add(elative, Rule(SUFFIX, "", "x"))
    table.add(elative, Rule(SUFFIX, "", "b"))
    table.add(elative, Rule(SUFFIX, "", "a"))
    assert apply(table, "q", elative) == "qa"


def test_prefix_must_fit_untouched_stem():
    msd = MSD.parse("V")
    table = RuleTable()
    table.add(msd, Rule(SUFFIX, "ab", "X"))
    table.add(msd, Rule(SUFFIX, "", ""))
    table.add(msd, Rule(PREFIX, "ab", "Y"))
    table.add(msd, Rule(PREFIX, "a", "Z"))
    # the suffix rule consumes "ab", so no prefix rule fits in "c"
    assert apply(table, "cab", msd) == "cX"
    assert apply(table, "abab", msd) == "YX"


def test_serialization_round_trip(elative):
    table = train(
        Dataset(
            "x",
            [
                Triple("koti", elative, "kodista"),
                Triple("machen", MSD.parse("V;PST;PTCP"), "gemacht"),
                Triple("aufbauen", MSD.parse("V;IND;PRS;2;SG"), "baust auf"),
            ],
        )
    )
    text = table.dumps()
    lines = text.splitlines()
    assert lines == sorted(lines)
    assert "N;IN+ABL;SG\tsuffix\toti\todista\t1" in lines
    again = RuleTable.loads(text.encode())
    assert again == table
    assert again.dumps() == text


def test_loads_rejects_bad_rows():
    with pytest.raises(FormatError, match="line 1"):
        RuleTable.loads(b"N\tsuffix\ta\n")
    with pytest.raises(FormatError):
        RuleTable.loads(b"N\tinfix\ta\tb\t1\n")
    with pytest.raises(FormatError):
        RuleTable.loads(b"N\tsuffix\ta\tb\t0\n")


triple_st = st.builds(
    Triple,
    st.text(alphabet="abcdefg ", min_size=1, max_size=12),
    st.sampled_from([MSD.parse("N;SG"), MSD.parse("V;PST"), MSD.parse("ADJ")]),
    st.text(alphabet="abcdefgh ", min_size=1, max_size=12),
)


@settings(max_examples=300)
@given(triple_st)
def test_training_fidelity(t):
    assert apply(train(Dataset("x", [t])), t.lemma, t.msd) == t.form


@settings(max_examples=200)
@given(st.lists(triple_st, min_size=1, max_size=5), st.text(alphabet="abcdefg", min_size=1, max_size=8), st.data())
def test_longest_match_dominance(triples, lemma, data):
    msd = triples[0].msd
    table = train(Dataset("x", triples))
    before, _ = explain(table, lemma, msd)
    k = data.draw(st.integers(min_value=0, max_value=len(lemma)))
    lhs = lemma[len(lemma) - k:]
    table.add(msd, Rule(SUFFIX, lhs, data.draw(st.text(alphabet="xyz", max_size=4))))
    after, _ = explain(table, lemma, msd)
    assert len(after.lhs) >= len(before.lhs)
    assert len(after.lhs) >= k


def test_determinism():
    rng = random.Random(7)
    triples = [
        Triple(
            "".join(rng.choices("abc", k=rng.randint(1, 6))),
            MSD.parse(rng.choice(["N;SG", "N;PL"])),
            "".join(rng.choices("abcd", k=rng.randint(1, 7))),
        )
        for _ in range(50)
    ]
    a, b = train(Dataset("x", triples)), train(Dataset("x", list(triples)))
    assert a.dumps() == b.dumps()
    assert [apply(a, t.lemma, t.msd) for t in triples] == [apply(b, t.lemma, t.msd) for t in triples]
