"""Category algebra for the extended categorial grammar.

Categories are immutable values.  A functor carries an unordered multiset
of arguments (or a single argument-set variable such as ``$X``) and a
direction: ``X/Y`` takes ``Y`` from the right, ``X\\Y`` takes ``Y`` from
the left.  A trailing ``|`` marks a suppressed category, which only an
activator slot (a slot that is itself suppressed) may consume.

>>> c = parse_category(r"s\\{np[subj],np[obj]}")
>>> [render_category(r) for r, _ in combine(parse_category("np[obj]"), c)]
['s\\\\np[subj]']
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class CategorySyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", position: int = -1):
        if position >= 0:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)
        self.position = position


class UnboundVariableError(ValueError):
    pass


class Direction(enum.Enum):
    RIGHTWARD = "/"
    LEFTWARD = "\\"


class Rule(enum.Enum):
    LEFT_CANCEL = "<"
    RIGHT_CANCEL = ">"


class Kind(enum.Enum):
    ORDINARY = "ordinary"
    SUPPRESSED = "suppressed"
    ACTIVATOR = "activator"


@dataclass(frozen=True)
class Basic:
    name: str
    features: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.features, frozenset):
            object.__setattr__(self, "features", frozenset(self.features))

    def __str__(self):
        return render_category(self)


@dataclass(frozen=True)
class Var:
    """An argument-set variable, bound to a whole concrete multiset."""

    name: str

    def __str__(self):
        return "$" + self.name


@dataclass(frozen=True)
class Functor:
    result: "Category"
    direction: Direction
    args: Union[tuple, Var]

    def __post_init__(self):
        if not isinstance(self.args, Var):
            # canonical multiset order keeps equality structural
            object.__setattr__(self, "args", tuple(sorted(self.args, key=render_category)))

    def __str__(self):
        return render_category(self)


@dataclass(frozen=True)
class Suppressed:
    inner: "Category"

    def __post_init__(self):
        if isinstance(self.inner, Suppressed):
            raise ValueError("double suppression is not allowed")

    def __str__(self):
        return render_category(self)


Category = Union[Basic, Functor, Suppressed]
Bindings = dict


def functor(result, direction, args) -> Functor:
    """Build a functor; a bare category argument becomes a singleton multiset."""
    if isinstance(args, (Basic, Functor, Suppressed)):
        args = (args,)
    elif not isinstance(args, Var):
        args = tuple(args)
    return Functor(result, direction, args)


# ---------------------------------------------------------------- rendering

@functools.lru_cache(maxsize=65536)
def render_category(c: Category) -> str:
    if isinstance(c, Basic):
        if c.features:
            return f"{c.name}[{','.join(sorted(c.features))}]"
        return c.name
    if isinstance(c, Suppressed):
        inner = render_category(c.inner)
        if isinstance(c.inner, Basic):
            return inner + "|"
        return f"({inner})|"
    if isinstance(c, Functor):
        res = render_category(c.result)
        if isinstance(c.result, Functor):
            res = f"({res})"
        return res + c.direction.value + _render_args(c.args)
    raise TypeError(f"not a category: {c!r}")


def _render_args(args) -> str:
    if isinstance(args, Var):
        return "$" + args.name
    if len(args) == 1:
        (a,) = args
        if isinstance(a, Basic):
            return render_category(a)
        return f"({render_category(a)})"
    return "{" + ",".join(render_category(a) for a in args) + "}"


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:([A-Za-z][A-Za-z0-9_-]*)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(1):
                self.tokens.append(("NAME", m.group(1), m.start(1)))
            elif m.group(2):
                self.tokens.append((m.group(2), m.group(2), m.start(2)))
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][0]
        return None

    def pos(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][2]
        return len(self.text)

    def fail(self, message):
        raise CategorySyntaxError(message, self.text, self.pos())

    def expect(self, kind):
        if self.peek() != kind:
            self.fail(f"expected {kind!r}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok[1]

    def category(self):
        c = self.primary()
        while self.peek() in ("/", "\\"):
            direction = Direction(self.expect(self.peek()))
            c = Functor(c, direction, self.argspec())
        return c

    def primary(self):
        if self.peek() == "(":
            self.i += 1
            c = self.category()
            self.expect(")")
        elif self.peek() == "NAME":
            c = self.atom()
        else:
            self.fail("expected category")
        if self.peek() == "|":
            if isinstance(c, Suppressed):
                self.fail("double suppression")
            self.i += 1
            c = Suppressed(c)
            if self.peek() == "|":
                self.fail("double suppression")
        return c

    def atom(self):
        name = self.expect("NAME")
        feats = []
        if self.peek() == "[":
            self.i += 1
            feats.append(self.expect("NAME"))
            while self.peek() == ",":
                self.i += 1
                feats.append(self.expect("NAME"))
            self.expect("]")
        return Basic(name, frozenset(feats))

    def argspec(self):
        if self.peek() == "$":
            self.i += 1
            return Var(self.expect("NAME"))
        if self.peek() == "{":
            self.i += 1
            members = [self.category()]
            while self.peek() == ",":
                self.i += 1
                members.append(self.category())
            self.expect("}")
            return tuple(members)
        return (self.primary(),)


def parse_category(text: str) -> Category:
    p = _Parser(text)
    if not p.tokens:
        p.fail("empty category")
    c = p.category()
    if p.peek() is not None:
        p.fail("unexpected trailing input")
    return normalize(c)


# -------------------------------------------------------------- unification

def has_variables(c) -> bool:
    return next(iter(variables(c)), None) is not None


def variables(c) -> Iterator[str]:
    if isinstance(c, Suppressed):
        yield from variables(c.inner)
    elif isinstance(c, Functor):
        yield from variables(c.result)
        if isinstance(c.args, Var):
            yield c.args.name
        else:
            for a in c.args:
                yield from variables(a)


def unify(pattern: Category, concrete: Category, bindings: Optional[Bindings] = None) -> Optional[Bindings]:
    """Bindings that make ``pattern`` equal ``concrete``, or None."""
    for b in _unify(pattern, concrete, dict(bindings or {})):
        return b
    return None


def _unify(p, c, b) -> Iterator[dict]:
    if isinstance(p, Basic):
        if p == c:
            yield b
    elif isinstance(p, Suppressed):
        if isinstance(c, Suppressed):
            yield from _unify(p.inner, c.inner, b)
    elif isinstance(p, Functor):
        if not isinstance(c, Functor) or p.direction != c.direction:
            return
        if isinstance(c.args, Var):
            return
        for b2 in _unify(p.result, c.result, b):
            yield from _unify_args(p.args, c.args, b2)


def _unify_args(pargs, cargs, b) -> Iterator[dict]:
    if isinstance(pargs, Var):
        bound = b.get(pargs.name)
        if bound is None:
            yield {**b, pargs.name: tuple(cargs)}
        elif bound == tuple(cargs):
            yield b
        return
    if len(pargs) != len(cargs):
        return
    yield from _match_multiset(list(pargs), list(cargs), b)


def _match_multiset(pargs, cargs, b):
    if not pargs:
        yield b
        return
    head, rest = pargs[0], pargs[1:]
    tried = set()
    for k, c in enumerate(cargs):
        if c in tried:
            continue
        tried.add(c)
        for b2 in _unify(head, c, b):
            yield from _match_multiset(rest, cargs[:k] + cargs[k + 1:], b2)


def normalize(c: Category, bindings: Optional[Bindings] = None, strict: bool = False) -> Category:
    """Substitute bindings and collapse empty-argument functors.

    With ``strict`` an unbound variable left in the result raises
    UnboundVariableError.
    """
    out = _subst(c, bindings or {})
    if strict and has_variables(out):
        raise UnboundVariableError(f"unbound variable in {render_category(out)}")
    return out


def _subst(c, b):
    if isinstance(c, Basic):
        return c
    if isinstance(c, Suppressed):
        return Suppressed(_subst(c.inner, b))
    args = c.args
    if isinstance(args, Var):
        if args.name not in b:
            return Functor(_subst(c.result, b), c.direction, args)
        args = b[args.name]
    args = tuple(_subst(a, b) for a in args)
    result = _subst(c.result, b)
    if not args:
        return result
    return Functor(result, c.direction, args)


# -------------------------------------------------------------- application

def combine(left: Category, right: Category) -> list:
    """Every (result, rule) obtainable by one cancellation step."""
    return list(_combine(left, right))


@functools.lru_cache(maxsize=65536)
def _combine(left, right) -> tuple:
    out = []
    if isinstance(left, Functor) and left.direction is Direction.RIGHTWARD:
        out.extend((r, Rule.RIGHT_CANCEL) for r in _cancel(left, right))
    if isinstance(right, Functor) and right.direction is Direction.LEFTWARD:
        out.extend((r, Rule.LEFT_CANCEL) for r in _cancel(right, left))
    seen, unique = set(), []
    for item in out:
        if item not in seen:
            seen.add(item)
            unique.append(item)
    return tuple(unique)


def _cancel(f: Functor, arg: Category) -> list:
    if isinstance(f.args, Var) or has_variables(arg):
        return []
    results = []
    for k, slot in enumerate(f.args):
        if k and slot == f.args[k - 1]:
            continue
        # an ordinary slot never consumes a suppressed category, and
        # an activator slot consumes only a suppressed one
        if isinstance(slot, Suppressed) != isinstance(arg, Suppressed):
            continue
        b = unify(slot, arg)
        if b is None:
            continue
        rest = f.args[:k] + f.args[k + 1:]
        try:
            r = normalize(Functor(f.result, f.direction, rest), b, strict=True)
        except UnboundVariableError:
            continue
        if r not in results:
            results.append(r)
    return results


def classify(c: Category) -> Kind:
    if isinstance(c, Suppressed):
        return Kind.SUPPRESSED
    if (isinstance(c, Functor) and not isinstance(c.args, Var)
            and any(isinstance(a, Suppressed) for a in c.args)
            and not isinstance(c.result, Suppressed)):
        return Kind.ACTIVATOR
    return Kind.ORDINARY


def desuppress(c: Category) -> Category:
    """Erase every suppression mark."""
    if isinstance(c, Basic):
        return c
    if isinstance(c, Suppressed):
        return desuppress(c.inner)
    args = c.args if isinstance(c.args, Var) else tuple(desuppress(a) for a in c.args)
    return Functor(desuppress(c.result), c.direction, args)


def basic_names(c: Category) -> set:
    if isinstance(c, Basic):
        return {c.name}
    if isinstance(c, Suppressed):
        return basic_names(c.inner)
    names = basic_names(c.result)
    if not isinstance(c.args, Var):
        for a in c.args:
            names |= basic_names(a)
    return names


def arity(c: Category) -> int:
    if isinstance(c, Functor) and not isinstance(c.args, Var):
        return len(c.args)
    return 0


@dataclass(frozen=True)
class Grammar:
    """Basic category names, accepted root categories, and the lexicon they serve."""

    basic_category_names: frozenset
    sentence_categories: tuple
    lexicon_ref: str = ""

    def __post_init__(self):
        if not self.sentence_categories:
            raise ValueError("grammar needs at least one sentence category")

    def check_lexicon(self, lexicon) -> list:
        """Names of basic categories the lexicon uses but the grammar lacks."""
        used = set()
        for entry in lexicon.entries.values():
            for v in entry.variants:
                used |= basic_names(v.category)
        return sorted(used - set(self.basic_category_names))


def default_grammar(lexicon_ref: str = "") -> Grammar:
    return Grammar(frozenset({"np", "s"}), (parse_category("s[DEC]"),), lexicon_ref)
