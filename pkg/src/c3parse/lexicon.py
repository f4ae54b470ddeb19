"""Morpheme lexicon, connectivity matrix and phoneme trie.

Lexicon files are line oriented::

    phonemes p h a i l t u
    class noun
    class noun-suffix
    connect noun noun-suffix
    boundary start noun
    boundary end noun noun-suffix
    morpheme pha-il noun /p,h,a,i,l/
      variant left=ANY right=noun-suffix cat=np|
      variant left=ANY right=ANY cat=np

Variants are tried in order; the first whose context matches wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Union

from .categories import CategorySyntaxError, Kind, classify, parse_category

ANY = "ANY"
BOUNDARY = "BOUNDARY"


class LexiconError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


Condition = Union[str, frozenset]


def condition_matches(cond: Condition, cls: str) -> bool:
    if cond == ANY:
        return True
    if cond == BOUNDARY:
        return cls == BOUNDARY
    return cls in cond


@dataclass(frozen=True)
class Variant:
    left: Condition
    right: Condition
    category: object

    def matches(self, left_class: str, right_class: str) -> bool:
        return condition_matches(self.left, left_class) and condition_matches(self.right, right_class)


@dataclass(frozen=True)
class MorphemeEntry:
    id: str
    surface: tuple
    morph_class: str
    variants: tuple

    def categories(self) -> list:
        return [v.category for v in self.variants]


@dataclass
class ConnectivityMatrix:
    classes: frozenset
    pairs: frozenset = frozenset()
    start_classes: frozenset = frozenset()
    end_classes: frozenset = frozenset()

    def connectable(self, left: str, right: str) -> bool:
        for c in (left, right):
            if c != BOUNDARY and c not in self.classes:
                raise LexiconError(f"undeclared class {c!r}")
        if left == BOUNDARY:
            return right in self.start_classes
        if right == BOUNDARY:
            return left in self.end_classes
        return (left, right) in self.pairs


def connectable(m: ConnectivityMatrix, left: str, right: str) -> bool:
    return m.connectable(left, right)


@dataclass
class Lexicon:
    phonemes: frozenset
    classes: tuple
    entries: dict
    connectivity: ConnectivityMatrix
    name: str = ""
    _trie: Optional["PhonemeTrie"] = field(default=None, repr=False, compare=False)

    @property
    def trie(self) -> "PhonemeTrie":
        if self._trie is None:
            self._trie = build_trie(self)
        return self._trie

    def entry(self, entry_id: str) -> MorphemeEntry:
        try:
            return self.entries[entry_id]
        except KeyError:
            raise LexiconError(f"unknown morpheme {entry_id!r}") from None

    def surface_of(self, ids) -> list:
        out = []
        for i in ids:
            out.extend(self.entry(i).surface)
        return out


def assign_categories(entry: MorphemeEntry, left_class: str, right_class: str) -> list:
    for v in entry.variants:
        if v.matches(left_class, right_class):
            return [v.category]
    return []


# ------------------------------------------------------------------ loading

def _parse_condition(text: str, classes: set, lineno: int) -> Condition:
    if text in (ANY, BOUNDARY):
        return text
    names = frozenset(text.split(","))
    for n in names:
        if n not in classes:
            raise LexiconError(f"variant references undeclared class {n!r}", lineno)
    return names


def load_lexicon(text: str, name: str = "") -> Lexicon:
    phonemes: set = set()
    classes: list = []
    pairs, starts, ends = set(), set(), set()
    entries: dict = {}
    current = None  # (id, surface, class, variants, lineno)

    def flush():
        if current is None:
            return
        eid, surface, cls, variants, ln = current
        if not variants:
            raise LexiconError(f"morpheme {eid!r} has no variants", ln)
        entries[eid] = MorphemeEntry(eid, surface, cls, tuple(variants))

    def need_class(c, ln):
        if c not in classes:
            raise LexiconError(f"undeclared class {c!r}", ln)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0].isspace()
        fields = line.split()
        head = fields[0]
        if indented and head == "variant":
            if current is None:
                raise LexiconError("variant outside a morpheme", lineno)
            kv = {}
            for f in fields[1:]:
                if "=" not in f:
                    raise LexiconError(f"bad variant field {f!r}", lineno)
                k, v = f.split("=", 1)
                kv[k] = v
            if set(kv) != {"left", "right", "cat"}:
                raise LexiconError("variant needs left=, right= and cat=", lineno)
            try:
                cat = parse_category(kv["cat"])
            except (CategorySyntaxError, ValueError) as e:
                raise LexiconError(f"category syntax error: {e}", lineno) from None
            current[3].append(Variant(
                _parse_condition(kv["left"], set(classes), lineno),
                _parse_condition(kv["right"], set(classes), lineno),
                cat,
            ))
            continue
        if indented:
            raise LexiconError(f"unexpected indented line {head!r}", lineno)
        if head == "phonemes":
            phonemes.update(fields[1:])
        elif head == "class":
            if len(fields) != 2:
                raise LexiconError("class takes one name", lineno)
            if fields[1] in classes:
                raise LexiconError(f"duplicate class {fields[1]!r}", lineno)
            classes.append(fields[1])
        elif head == "connect":
            if len(fields) != 3:
                raise LexiconError("connect takes two classes", lineno)
            need_class(fields[1], lineno)
            need_class(fields[2], lineno)
            pairs.add((fields[1], fields[2]))
        elif head == "boundary":
            if len(fields) < 3 or fields[1] not in ("start", "end"):
                raise LexiconError("boundary start|end <class> ...", lineno)
            for c in fields[2:]:
                need_class(c, lineno)
            (starts if fields[1] == "start" else ends).update(fields[2:])
        elif head == "morpheme":
            flush()
            if len(fields) != 4:
                raise LexiconError("morpheme <id> <class> /<sym>,.../", lineno)
            eid, cls, spelled = fields[1:]
            if eid in entries or (current is not None and current[0] == eid):
                raise LexiconError(f"duplicate morpheme id {eid!r}", lineno)
            need_class(cls, lineno)
            if not (spelled.startswith("/") and spelled.endswith("/") and len(spelled) > 2):
                raise LexiconError(f"bad surface {spelled!r}", lineno)
            surface = tuple(spelled[1:-1].split(","))
            for sym in surface:
                if sym not in phonemes:
                    raise LexiconError(f"unknown phoneme symbol {sym!r} in {eid!r}", lineno)
            current = (eid, surface, cls, [], lineno)
        else:
            raise LexiconError(f"unknown directive {head!r}", lineno)
    flush()
    if not entries:
        raise LexiconError("no entries")
    matrix = ConnectivityMatrix(frozenset(classes), frozenset(pairs), frozenset(starts), frozenset(ends))
    return Lexicon(frozenset(phonemes), tuple(classes), entries, matrix, name)


def load_lexicon_file(path) -> Lexicon:
    with open(path, encoding="utf-8") as f:
        return load_lexicon(f.read(), name=str(path))


def bundled_text(filename: str) -> str:
    return resources.files("c3parse").joinpath("data", filename).read_text(encoding="utf-8")


def bundled_lexicon(variant: str) -> Lexicon:
    """``variant`` is ``UA`` or ``UA+SC``."""
    filename = {"UA": "lexicon_ua.lex", "UA+SC": "lexicon_uasc.lex"}[variant]
    return load_lexicon(bundled_text(filename), name=variant)


def suppression_violations(lex: Lexicon, bound_classes) -> list:
    """Variants breaking the suppression convention for bound morphemes.

    A variant whose right context names a bound class must carry a
    suppressed (or suppressed-result) category; a variant used before the
    utterance end must be ordinary or an activator.
    """
    bad = []
    bound_classes = set(bound_classes)
    for e in lex.entries.values():
        for v in e.variants:
            kind = classify(v.category)
            suppressed = kind is Kind.SUPPRESSED or (
                hasattr(v.category, "result") and classify(v.category.result) is Kind.SUPPRESSED)
            if isinstance(v.right, frozenset) and v.right & bound_classes and not suppressed:
                bad.append((e.id, v))
            if v.right == BOUNDARY and kind not in (Kind.ORDINARY, Kind.ACTIVATOR):
                bad.append((e.id, v))
    return bad


# --------------------------------------------------------------------- trie

class TrieNode:
    __slots__ = ("children", "ids")

    def __init__(self):
        self.children = {}
        self.ids = set()


class PhonemeTrie:
    def __init__(self):
        self.root = TrieNode()

    def insert(self, surface, entry_id):
        node = self.root
        for sym in surface:
            node = node.children.setdefault(sym, TrieNode())
        node.ids.add(entry_id)

    def node_at(self, seq) -> Optional[TrieNode]:
        node = self.root
        for sym in seq:
            node = node.children.get(sym)
            if node is None:
                return None
        return node

    def depth_ids(self) -> dict:
        """Map depth -> union of entry ids ending at that depth."""
        out, stack = {}, [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if node.ids:
                out.setdefault(d, set()).update(node.ids)
            stack.extend((child, d + 1) for child in node.children.values())
        return out


def build_trie(lex: Lexicon) -> PhonemeTrie:
    trie = PhonemeTrie()
    for e in lex.entries.values():
        trie.insert(e.surface, e.id)
    return trie


def trie_lookup(trie: PhonemeTrie, seq) -> set:
    if not seq:
        return set()
    node = trie.node_at(seq)
    return set(node.ids) if node is not None else set()
