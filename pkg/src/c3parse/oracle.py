"""Exhaustive CKY-style parser over morpheme lattices.

Serves as ground truth for the relaxation parser: every category derivable
over every span is kept, and full derivation trees are materialized up to
an ambiguity cap.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .categories import combine, parse_category, unify
from .chart import lexical_items
from .lattice import Lattice
from .lexicon import Lexicon
from .trees import ParseTree

DEFAULT_CAP = 10_000


class AmbiguityCapExceeded(RuntimeError):
    pass


@dataclass
class OracleForest:
    trees: list = field(default_factory=list)
    ambiguity_cap: int = DEFAULT_CAP
    cells: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.trees)

    def texts(self) -> set:
        return {t.text() for t in self.trees}


def fill_cells(ml: Lattice, lex: Lexicon) -> dict:
    """span -> {category: [derivation]} where a derivation is
    ``("lex", entry_id)`` or ``("app", split, left_cat, right_cat)``."""
    cells = defaultdict(lambda: defaultdict(list))
    items, _ = lexical_items(ml, lex)
    for e, cat in items:
        d = ("lex", e.label)
        if d not in cells[(e.src, e.dst)][cat]:
            cells[(e.src, e.dst)][cat].append(d)
    T = ml.final
    for width in range(2, T + 1):
        for i in range(0, T - width + 1):
            j = i + width
            for k in range(i + 1, j):
                left, right = cells.get((i, k)), cells.get((k, j))
                if not left or not right:
                    continue
                for lc in list(left):
                    for rc in list(right):
                        for result, _rule in combine(lc, rc):
                            d = ("app", k, lc, rc)
                            if d not in cells[(i, j)][result]:
                                cells[(i, j)][result].append(d)
    return {span: dict(cats) for span, cats in cells.items() if cats}


def exhaustive_parse(ml: Lattice, lex: Lexicon, g=None, cap: int = DEFAULT_CAP, target=None) -> OracleForest:
    if target is not None:
        targets = [parse_category(target) if isinstance(target, str) else target]
    elif g is not None:
        targets = list(g.sentence_categories)
    else:
        raise ValueError("need a grammar or a target category")
    cells = fill_cells(ml, lex)
    memo: dict = {}

    def trees(span, cat):
        key = (span, cat)
        if key in memo:
            return memo[key]
        out = []
        for d in cells[span][cat]:
            if d[0] == "lex":
                out.append(ParseTree(cat, span, d[1]))
            else:
                _, k, lc, rc = d
                for lt in trees((span[0], k), lc):
                    for rt in trees((k, span[1]), rc):
                        out.append(ParseTree(cat, span, None, (lt, rt)))
                        if len(out) > cap:
                            raise AmbiguityCapExceeded(f"more than {cap} derivations over span {span}")
        seen, unique = set(), []
        for t in out:
            if t not in seen:
                seen.add(t)
                unique.append(t)
        memo[key] = unique
        return unique

    full = (0, ml.final)
    roots = []
    for cat in sorted(cells.get(full, {}), key=str):
        if any(unify(t, cat) is not None for t in targets):
            roots.extend(trees(full, cat))
            if len(roots) > cap:
                raise AmbiguityCapExceeded(f"more than {cap} derivations over span {full}")
    roots.sort(key=ParseTree.text)
    return OracleForest(roots, cap, cells)


def forest_contains(f: OracleForest, t: ParseTree) -> bool:
    return t.text() in f.texts()
