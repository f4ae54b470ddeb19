import pytest

from c3parse.categories import default_grammar
from c3parse.experiment import load_corpus
from c3parse.lattice import chain_lattice, decode_lattice, filter_lattice
from c3parse.lexicon import bundled_lexicon, bundled_text
from c3parse.sim import load_confusion


@pytest.fixture(scope="session")
def lex_ua():
    return bundled_lexicon("UA")


@pytest.fixture(scope="session")
def lex_uasc():
    return bundled_lexicon("UA+SC")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(bundled_text("corpus.txt"))


@pytest.fixture(scope="session")
def confusion(lex_ua):
    return load_confusion(bundled_text("confusion.txt"), lex_ua.phonemes)


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


def morpheme_lattice(lex, ids):
    """Filtered morpheme lattice for the single-candidate spelling of ``ids``."""
    pl = chain_lattice(lex.surface_of(ids))
    return filter_lattice(decode_lattice(pl, lex.trie), lex.connectivity, lex)


OBJ_NP = ["pha-il", "tul", "ul"]
SOV = ["ku", "ka", "sa-kwa", "lul", "mek", "nun-ta"]
OSV = ["sa-kwa", "lul", "ku", "ka", "mek", "nun-ta"]
MOD_NP = ["say", "pha-il", "tul"]
