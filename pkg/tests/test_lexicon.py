import itertools

import pytest
from hypothesis import given, settings, strategies as st

from c3parse.categories import desuppress, parse_category
from c3parse.lexicon import (
    ANY, BOUNDARY, LexiconError, assign_categories, build_trie, bundled_text, connectable, load_lexicon,
    suppression_violations, trie_lookup,
)
from generators import random_lexicon

P = parse_category

SAMPLE_LEXICON = """\
phonemes p h a i l t u s y
class prenoun
class noun
class noun-suffix
class noun-ending
connect prenoun noun
connect noun noun-suffix
connect noun noun-ending
connect noun-suffix noun-ending
boundary start prenoun noun
boundary end noun noun-suffix noun-ending
morpheme say prenoun /s,a,y/
  variant left=ANY right=ANY cat=np/np
morpheme pha-il noun /p,h,a,i,l/
  variant left=ANY right=noun-suffix,noun-ending cat=np|
  variant left=ANY right=BOUNDARY cat=np
morpheme tul noun-suffix /t,u,l/
  variant left=ANY right=noun-ending cat=np|\\(np|)
  variant left=ANY right=BOUNDARY cat=np\\(np|)
morpheme ul noun-ending /u,l/
  variant left=ANY right=ANY cat=np[obj]\\(np|)
"""


def test_load_sample_lexicon():
    lex = load_lexicon(SAMPLE_LEXICON)
    assert sorted(lex.entries) == ["pha-il", "say", "tul", "ul"]
    assert lex.entry("pha-il").surface == ("p", "h", "a", "i", "l")
    assert lex.entry("tul").categories() == [P("np|\\(np|)"), P("np\\(np|)")]


HEAD = "phonemes a b\nclass n\nboundary start n\nboundary end n\n"


@pytest.mark.parametrize("text, fragment", [
    (HEAD, "no entries"),
    (HEAD + "morpheme x n /a,z/\n  variant left=ANY right=ANY cat=np\n", "'z'"),
    (HEAD + "morpheme x n /a/\n  variant left=ANY right=ANY cat=np\n"
            "morpheme x n /b/\n  variant left=ANY right=ANY cat=np\n", "duplicate"),
    (HEAD + "morpheme x n /a/\n  variant left=ANY right=ANY cat=np/\n", "category"),
    (HEAD + "morpheme x n /a/\n  variant left=ANY right=verb cat=np\n", "undeclared class"),
    (HEAD + "morpheme x verb /a/\n  variant left=ANY right=ANY cat=np\n", "undeclared class"),
    (HEAD + "morpheme x n /a/\n", "no variants"),
    (HEAD + "frobnicate\n", "unknown directive"),
])
def test_load_errors(text, fragment):
    with pytest.raises(LexiconError) as info:
        load_lexicon(text)
    assert fragment in str(info.value)


def test_load_error_has_line_number():
    with pytest.raises(LexiconError) as info:
        load_lexicon(HEAD + "morpheme x n /a,z/\n  variant left=ANY right=ANY cat=np\n")
    assert info.value.line == 5


def test_trie_depths():
    lex = load_lexicon(HEAD.replace("a b", "p h a i l") + "morpheme pha-il n /p,h,a,i,l/\n"
                       "  variant left=ANY right=ANY cat=np\nmorpheme pha n /p,h,a/\n"
                       "  variant left=ANY right=ANY cat=np\n")
    trie = build_trie(lex)
    assert trie.node_at(("p", "h", "a")).ids == {"pha"}
    assert trie.node_at(("p", "h", "a", "i", "l")).ids == {"pha-il"}
    assert trie.depth_ids() == {3: {"pha"}, 5: {"pha-il"}}


def test_trie_shared_surface_and_chain():
    lex = load_lexicon(HEAD + "morpheme x n /a,b/\n  variant left=ANY right=ANY cat=np\n"
                       "morpheme y n /a,b/\n  variant left=ANY right=ANY cat=np\n")
    assert trie_lookup(lex.trie, ["a", "b"]) == {"x", "y"}
    assert trie_lookup(lex.trie, ["a"]) == set()
    single = load_lexicon(HEAD + "morpheme x n /a,b,a/\n  variant left=ANY right=ANY cat=np\n")
    assert single.trie.depth_ids() == {3: {"x"}}


@pytest.mark.parametrize("seq, expected", [
    (("p", "h", "a", "i", "l"), {"pha-il"}),
    (("z",), set()),
    ((), set()),
    (("k", "a"), {"ka"}),
    (("u", "l"), {"ul"}),
])
def test_trie_lookup_bundled(lex_uasc, seq, expected):
    assert trie_lookup(lex_uasc.trie, seq) == expected


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_trie_matches_linear_scan(rng):
    inventory = ("a", "b", "c", "d", "e")
    lex = random_lexicon(rng, inventory=inventory, n_entries=rng.randint(1, 8), max_len=4)
    trie = lex.trie
    for n in range(0, 5):
        for seq in itertools.product(inventory, repeat=n):
            want = {m.id for m in lex.entries.values() if m.surface == seq}
            assert trie_lookup(trie, seq) == want


def test_trie_scan_exhaustive_to_length_8():
    lex = load_lexicon("phonemes a b c d e\nclass n\nboundary start n\nboundary end n\n"
                       + "".join(f"morpheme m{i} n /{s}/\n  variant left=ANY right=ANY cat=np\n"
                                 for i, s in enumerate(["a,b", "a,b,c,d,e,a,b,c", "e", "a,b,c"])))
    for seq in itertools.product("abce", repeat=8):
        want = {m.id for m in lex.entries.values() if m.surface == seq}
        assert trie_lookup(lex.trie, seq) == want


@pytest.mark.parametrize("left, right, expected", [
    ("noun", "noun-suffix", True),
    ("noun-ending", "noun-suffix", False),
    ("noun", "noun", False),
    ("verb-stem", "verb-ending", True),
    (BOUNDARY, "noun", True),
    (BOUNDARY, "noun-ending", False),
    ("verb-ending", BOUNDARY, True),
    ("verb-stem", BOUNDARY, False),
])
def test_connectable(lex_uasc, left, right, expected):
    assert connectable(lex_uasc.connectivity, left, right) is expected


def test_connectable_undeclared(lex_uasc):
    with pytest.raises(LexiconError):
        connectable(lex_uasc.connectivity, "adverb", "noun")


@pytest.mark.parametrize("entry, left, right, expected", [
    ("pha-il", "prenoun", "noun-suffix", ["np|"]),
    ("pha-il", BOUNDARY, BOUNDARY, ["np"]),
    ("pha-il", BOUNDARY, "noun-ending", ["np|"]),
    ("tul", "noun", "noun-ending", ["np|\\(np|)"]),
    ("tul", "noun", BOUNDARY, ["np\\(np|)"]),
    ("mek", "noun-ending", "verb-ending", ["(s\\{np[obj],np[subj]})|"]),
    ("mek", "noun-ending", BOUNDARY, []),
])
def test_assign_categories(lex_uasc, entry, left, right, expected):
    assert assign_categories(lex_uasc.entry(entry), left, right) == [P(c) for c in expected]


def test_assign_first_match_wins():
    lex = load_lexicon(HEAD + "morpheme x n /a/\n  variant left=ANY right=ANY cat=np\n"
                       "  variant left=ANY right=BOUNDARY cat=s\n")
    assert assign_categories(lex.entry("x"), BOUNDARY, BOUNDARY) == [P("np")]


def test_bundled_suppression_monotonicity(lex_uasc):
    bound = {"noun-suffix", "noun-ending", "verb-ending"}
    assert suppression_violations(lex_uasc, bound) == []


def test_suppression_violation_detected():
    lex = load_lexicon(SAMPLE_LEXICON.replace("right=BOUNDARY cat=np\n", "right=BOUNDARY cat=np|\n"))
    assert suppression_violations(lex, {"noun-suffix", "noun-ending"})


def test_ua_is_desuppressed_uasc(lex_ua, lex_uasc):
    assert set(lex_ua.entries) == set(lex_uasc.entries)
    assert lex_ua.connectivity == lex_uasc.connectivity
    for eid, e in lex_uasc.entries.items():
        ua = lex_ua.entry(eid)
        assert ua.surface == e.surface
        assert {desuppress(c) for c in e.categories()} == set(ua.categories())
        assert all(v.left == ANY and v.right == ANY for v in ua.variants)


def test_variant_totality_on_corpus(corpus, lex_uasc, lex_ua):
    for lex in (lex_uasc, lex_ua):
        m = lex.connectivity
        for item in corpus:
            classes = [lex.entry(x).morph_class for x in item.morphemes]
            ctx = [BOUNDARY] + classes + [BOUNDARY]
            for k, x in enumerate(item.morphemes):
                assert assign_categories(lex.entry(x), ctx[k], ctx[k + 2]), (item.id, x)
            for a, b in zip(ctx, ctx[1:]):
                assert m.connectable(a, b), (item.id, a, b)


def test_bundled_files_present():
    for name in ("lexicon_ua.lex", "lexicon_uasc.lex", "confusion.txt", "corpus.txt"):
        assert bundled_text(name).strip()
