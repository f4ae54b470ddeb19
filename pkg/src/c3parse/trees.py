"""Parse trees and their canonical text form.

Leaves print as ``(CAT[from,to] entry_id)``; internal nodes as
``(CAT[from,to] left right)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .categories import desuppress, parse_category, render_category


@dataclass(frozen=True)
class ParseTree:
    category: object
    span: tuple
    entry_id: Optional[str] = None
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return self.entry_id is not None

    def leaves(self) -> list:
        if self.is_leaf:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def leaf_ids(self) -> list:
        return [leaf.entry_id for leaf in self.leaves()]

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def text(self, strip_suppression: bool = False) -> str:
        cat = desuppress(self.category) if strip_suppression else self.category
        head = f"{render_category(cat)}[{self.span[0]},{self.span[1]}]"
        if self.is_leaf:
            return f"({head} {self.entry_id})"
        return f"({head} {' '.join(c.text(strip_suppression) for c in self.children)})"

    def __str__(self):
        return self.text()


_SPAN = re.compile(r"^(.*)\[(\d+),(\d+)\]$")


def parse_tree(text: str) -> ParseTree:
    tokens = _tokenize(text)
    pos = 0

    def node():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' in tree text at token {pos}")
        pos += 1
        m = _SPAN.match(tokens[pos])
        if not m:
            raise ValueError(f"bad node label {tokens[pos]!r}")
        pos += 1
        cat, span = parse_category(m.group(1)), (int(m.group(2)), int(m.group(3)))
        if tokens[pos] != "(":
            leaf = ParseTree(cat, span, tokens[pos])
            pos += 1
            if tokens[pos] != ")":
                raise ValueError("leaf takes one entry id")
            pos += 1
            return leaf
        kids = []
        while tokens[pos] == "(":
            kids.append(node())
        if tokens[pos] != ")":
            raise ValueError("unbalanced tree text")
        pos += 1
        return ParseTree(cat, span, None, tuple(kids))

    try:
        tree = node()
    except IndexError:
        raise ValueError("truncated tree text") from None
    if pos != len(tokens):
        raise ValueError("trailing input after tree")
    return tree


def _tokenize(text: str) -> list:
    # the token after a structural "(" is a node label, which may itself
    # contain balanced parentheses; anywhere else "(" and ")" are structural
    out, i, n = [], 0, len(text)
    label_next = False
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif label_next:
            j, depth = i, 0
            while j < n and not (text[j].isspace() and depth == 0):
                if text[j] == "(":
                    depth += 1
                elif text[j] == ")":
                    depth -= 1
                j += 1
            out.append(text[i:j])
            i, label_next = j, False
        elif ch in "()":
            out.append(ch)
            i += 1
            label_next = ch == "("
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out
