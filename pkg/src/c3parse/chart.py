"""Chart-driven interactive relaxation parsing.

Grammar nodes live in a triangular table indexed by lattice-vertex spans.
Each cycle runs three steps over the chart:

* add nodes: every complete node above the generation threshold combines
  with complete nodes in abutting cells, and functors also post
  expectation nodes that still miss their argument;
* spread: bottom-up flow favours already-strong parents, top-down flow is
  split evenly among constituents;
* decay: phrasal nodes shrink, incomplete ones faster, and nodes below the
  removal threshold leave the chart together with their dangling links.

Lexical nodes are clamped sources: they keep their initial activation.
"""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field, fields
from typing import Optional

from .categories import (
    Direction, Functor, Rule, UnboundVariableError, Var, combine, has_variables,
    normalize, parse_category, render_category, unify,
)
from .lattice import Lattice
from .lexicon import BOUNDARY, Lexicon, assign_categories
from .trees import ParseTree

log = logging.getLogger(__name__)


class ChartError(ValueError):
    pass


class DecayMode(enum.Enum):
    RETENTION = "Retention"
    LITERAL = "Literal"


@dataclass
class RelaxationParams:
    rho: float = 0.05
    rho_prime: float = 0.03
    d: float = 0.87
    theta: float = 0.51
    phi: float = 0.066
    init_gamma: float = 1.0
    epsilon: float = 1e-4
    max_cycles: int = 200
    decay_mode: DecayMode = DecayMode.RETENTION

    def __post_init__(self):
        if isinstance(self.decay_mode, str):
            self.decay_mode = parse_decay_mode(self.decay_mode)
        problems = []
        if not (0 <= self.rho < 1 and 0 <= self.rho_prime < 1):
            problems.append("rho and rho_prime must lie in [0,1)")
        if not 0 < self.d < 1:
            problems.append("d must lie in (0,1)")
        if not 0 <= self.phi < self.theta <= 1:
            problems.append("need 0 <= phi < theta <= 1")
        if self.max_cycles < 1:
            problems.append("max_cycles must be >= 1")
        if problems:
            raise ValueError("; ".join(problems))

    def echo(self) -> str:
        return " ".join(f"{f.name}={_fmt(getattr(self, f.name))}" for f in fields(self))


def _fmt(v):
    return v.value if isinstance(v, DecayMode) else repr(v)


def parse_decay_mode(text: str) -> DecayMode:
    for m in DecayMode:
        if m.value.lower() == text.lower():
            return m
    raise ValueError(f"unknown decay mode {text!r}")


def load_params(text: str, base: Optional[RelaxationParams] = None) -> RelaxationParams:
    """Read ``key value`` lines over ``base`` (defaults if omitted)."""
    values = {f.name: getattr(base or RelaxationParams(), f.name) for f in fields(RelaxationParams)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in values:
            raise ValueError(f"line {lineno}: expected '<param> <value>', got {line!r}")
        key, val = parts
        if key == "max_cycles":
            values[key] = int(val)
        elif key == "decay_mode":
            values[key] = parse_decay_mode(val)
        else:
            values[key] = float(val)
    return RelaxationParams(**values)


# ------------------------------------------------------------------- chart

@dataclass(eq=False)
class ChartNode:
    id: int
    category: object
    span: tuple
    activation: float
    entry_id: Optional[str] = None        # set for lexical nodes
    source_score: float = 0.0
    rule: Optional[Rule] = None            # set for phrasal nodes
    # alternative support pairs (functor id or None, argument id or None)
    pairs: list = field(default_factory=list)
    alive: bool = True

    @property
    def lexical(self) -> bool:
        return self.entry_id is not None

    @property
    def kind_key(self) -> str:
        return f"lex:{self.entry_id}" if self.lexical else f"phr:{self.rule.name}"

    @property
    def required(self) -> int:
        return 0 if self.lexical else 2

    @property
    def actual(self) -> int:
        if self.lexical:
            return 0
        return max((sum(x is not None for x in p) for p in self.pairs), default=0)

    @property
    def complete(self) -> bool:
        return self.actual == self.required

    def constituents(self) -> list:
        seen = []
        for p in self.pairs:
            for x in p:
                if x is not None and x not in seen:
                    seen.append(x)
        return seen

    def sort_key(self):
        key = self.__dict__.get("_key")
        if key is None:
            key = self.__dict__["_key"] = (self.span, render_category(self.category), self.kind_key)
        return key

    def __repr__(self):
        return (f"ChartNode({self.id}, {render_category(self.category)}{list(self.span)}, "
                f"{self.kind_key}, a={self.activation:.4f}, Ca={self.actual})")


class Chart:
    def __init__(self, final: int):
        self.final = final
        self.nodes: dict = {}
        self.index: dict = {}
        self.tried: set = set()
        self.examined: set = set()
        self.cycle = 0
        self.problems: list = []
        self.last_spread = (0.0, 0.0)
        self._next_id = 0

    def live(self) -> list:
        return sorted((n for n in self.nodes.values() if n.alive), key=ChartNode.sort_key)

    def cells(self) -> dict:
        out = defaultdict(list)
        for n in self.live():
            out[n.span].append(n)
        return out

    def cell(self, span) -> list:
        return [n for n in self.live() if n.span == span]

    def add(self, node_kwargs) -> ChartNode:
        node = ChartNode(self._next_id, **node_kwargs)
        self._next_id += 1
        self.nodes[node.id] = node
        self.index[(node.category, node.span, node.kind_key)] = node
        return node

    def find(self, category, span, kind_key) -> Optional[ChartNode]:
        n = self.index.get((category, span, kind_key))
        return n if n is not None and n.alive else None

    def remove(self, node: ChartNode):
        node.alive = False
        if self.index.get((node.category, node.span, node.kind_key)) is node:
            del self.index[(node.category, node.span, node.kind_key)]

    def parents(self) -> dict:
        out = defaultdict(list)
        for p in self.live():
            for c in p.constituents():
                out[c].append(p.id)
        return out

    def activations(self) -> dict:
        return {n.id: n.activation for n in self.live()}


def lexical_items(ml: Lattice, lex: Lexicon):
    """(edge, category) pairs for every context-applicable variant, plus problems.

    Neighbour classes are those of abutting edges connectable to the edge;
    the utterance edges count as BOUNDARY.
    """
    m = lex.connectivity
    ending, starting = defaultdict(set), defaultdict(set)
    for e in ml.edges:
        c = lex.entry(e.label).morph_class
        ending[e.dst].add(c)
        starting[e.src].add(c)
    items, problems = [], []
    for e in sorted(ml.edges, key=lambda x: (x.src, x.dst, x.label)):
        entry = lex.entry(e.label)
        c = entry.morph_class
        lefts = [BOUNDARY] if e.src == 0 else sorted(x for x in ending[e.src] if m.connectable(x, c))
        rights = [BOUNDARY] if e.dst == ml.final else sorted(x for x in starting[e.dst] if m.connectable(c, x))
        cats = []
        for lc in lefts:
            for rc in rights:
                for cat in assign_categories(entry, lc, rc):
                    if cat not in cats:
                        cats.append(cat)
        if not cats:
            problems.append(f"edge {e.src}-{e.dst} {e.label}: no applicable variant")
        for cat in cats:
            items.append((e, cat))
    return items, problems


def init_chart(ml: Lattice, lex: Lexicon, g=None) -> Chart:
    if not ml.edges:
        raise ChartError("morpheme lattice has no edges")
    items, problems = lexical_items(ml, lex)
    chart = Chart(ml.final)
    chart.problems = problems
    for p in problems:
        log.warning(p)
    if not items:
        return chart
    top = max(e.score for e, _ in items)
    for e, cat in items:
        if chart.find(cat, (e.src, e.dst), f"lex:{e.label}"):
            continue
        a = e.score / top
        chart.add(dict(category=cat, span=(e.src, e.dst), activation=a,
                       entry_id=e.label, source_score=a))
    return chart


def allowed_parent_spans(chart: Chart, n: ChartNode, cells: Optional[dict] = None) -> list:
    """(parent span, partner cell) options for a node; partners must abut it."""
    cells = chart.cells() if cells is None else cells
    i, j = n.span
    out = []
    for k in range(0, i):
        if cells.get((k, i)):
            out.append(((k, j), (k, i)))
    for k in range(j + 1, chart.final + 1):
        if cells.get((j, k)):
            out.append(((i, k), (j, k)))
    return out


def _link(chart: Chart, p: RelaxationParams, category, span, rule, functor, argument) -> int:
    key = (category, span, rule, functor.id, None if argument is None else argument.id)
    if key in chart.tried:
        return 0
    chart.tried.add(key)
    node = chart.find(category, span, f"phr:{rule.name}")
    if node is None:
        node = chart.add(dict(category=category, span=span, activation=0.0, rule=rule))
    if argument is None:
        if any(f == functor.id and a is not None for f, a in node.pairs):
            return 0
        node.pairs.append((functor.id, None))
        linked = [functor]
    else:
        node.pairs = [pr for pr in node.pairs if pr != (functor.id, None)]
        node.pairs.append((functor.id, argument.id))
        linked = [functor, argument]
    birth = p.init_gamma * sum(x.activation for x in linked) / len(linked)
    node.activation = min(1.0, max(node.activation, birth))
    return 1


def _expectations(n: ChartNode, toward_right: bool) -> list:
    c = n.category
    want = Direction.RIGHTWARD if toward_right else Direction.LEFTWARD
    if not isinstance(c, Functor) or c.direction is not want or isinstance(c.args, Var):
        return []
    out = []
    for k, slot in enumerate(c.args):
        if has_variables(slot):
            continue
        try:
            r = normalize(Functor(c.result, c.direction, c.args[:k] + c.args[k + 1:]), strict=True)
        except UnboundVariableError:
            continue
        if r not in out:
            out.append(r)
    return out


def add_nodes_step(chart: Chart, p: RelaxationParams) -> int:
    cells = chart.cells()
    active = [n for n in chart.live() if n.activation > p.theta and n.complete]
    count = 0
    for n in active:
        for parent_span, partner_span in allowed_parent_spans(chart, n, cells):
            n_is_left = parent_span[0] == n.span[0]
            for q in cells[partner_span]:
                if not q.complete or not q.alive or (n.id, q.id) in chart.examined:
                    continue
                # combine is pure, so one pass per pair links everything it can
                chart.examined.add((n.id, q.id))
                left, right = (n, q) if n_is_left else (q, n)
                for result, rule in combine(left.category, right.category):
                    f, a = (left, right) if rule is Rule.RIGHT_CANCEL else (right, left)
                    count += _link(chart, p, result, parent_span, rule, f, a)
            if (n.id, parent_span) in chart.examined:
                continue
            chart.examined.add((n.id, parent_span))
            rule = Rule.RIGHT_CANCEL if n_is_left else Rule.LEFT_CANCEL
            for result in _expectations(n, n_is_left):
                count += _link(chart, p, result, parent_span, rule, n, None)
    return count


def spread_step(chart: Chart, p: RelaxationParams) -> None:
    nodes = chart.live()
    snap = {n.id: n.activation for n in nodes}
    parents = chart.parents()
    delta = defaultdict(float)
    bound = 0.0
    for c in nodes:
        ps = parents.get(c.id, [])
        if not ps:
            continue
        a, n = snap[c.id], len(ps)
        denom = sum(snap[q] ** 2 for q in ps)
        for q in ps:
            share = snap[q] ** 2 / denom if denom > 0 else 1.0 / n
            delta[q] += n * p.rho * a * share
        bound += n * p.rho * a
    for par in nodes:
        kids = par.constituents()
        if not kids:
            continue
        portion = p.rho_prime * snap[par.id] / len(kids)
        for k in kids:
            delta[k] += portion
        bound += p.rho_prime * snap[par.id]
    applied = 0.0
    for n in nodes:
        new = min(1.0, max(0.0, snap[n.id] + delta[n.id]))
        if n.lexical:
            new = n.source_score
        applied += new - snap[n.id]
        n.activation = new
    chart.last_spread = (applied, bound)


def decay_step(chart: Chart, p: RelaxationParams) -> int:
    factor = p.d if p.decay_mode is DecayMode.RETENTION else 1.0 - p.d
    for n in chart.live():
        if not n.lexical:
            n.activation = n.activation * factor * n.actual / n.required
    removed = 0
    while True:
        doomed = [n for n in chart.live() if not n.lexical and (n.activation < p.phi or n.actual == 0)]
        if not doomed:
            break
        gone = {n.id for n in doomed}
        for n in doomed:
            chart.remove(n)
        removed += len(doomed)
        for n in chart.live():
            if n.lexical:
                continue
            pairs = []
            for f, a in n.pairs:
                f = None if f in gone else f
                a = None if a in gone else a
                if (f, a) != (None, None) and (f, a) not in pairs:
                    pairs.append((f, a))
            n.pairs = pairs
    return removed


# ---------------------------------------------------------------- running

def derivable(chart: Chart, node: ChartNode, memo: Optional[dict] = None) -> bool:
    memo = {} if memo is None else memo
    if node.id in memo:
        return memo[node.id]
    memo[node.id] = False  # provisional, so a link cycle cannot recurse forever
    if node.lexical:
        ok = True
    else:
        ok = any(f is not None and a is not None
                 and derivable(chart, chart.nodes[f], memo) and derivable(chart, chart.nodes[a], memo)
                 for f, a in node.pairs)
    memo[node.id] = ok
    return ok


def forest_roots(chart: Chart, targets) -> list:
    memo: dict = {}
    out = []
    for n in chart.live():
        if n.span != (0, chart.final) or not derivable(chart, n, memo):
            continue
        if any(unify(t, n.category) is not None for t in targets):
            out.append(n)
    return out


def run_relaxation(chart: Chart, g=None, p: Optional[RelaxationParams] = None, target=None, trace=None) -> list:
    """Relax until quiet for three cycles (or max_cycles); return the forest roots."""
    p = p or RelaxationParams()
    if target is not None:
        targets = [parse_category(target) if isinstance(target, str) else target]
    elif g is not None:
        targets = list(g.sentence_categories)
    else:
        raise ChartError("need a grammar or a target category")
    quiet = 0
    for _ in range(p.max_cycles):
        chart.cycle += 1
        before = chart.activations()
        made = add_nodes_step(chart, p)
        spread_step(chart, p)
        removed = decay_step(chart, p)
        after = chart.activations()
        change = max((abs(a - before.get(i, 0.0)) for i, a in after.items()), default=0.0)
        if trace is not None:
            trace(f"cycle {chart.cycle}: nodes={len(after)} linked={made} removed={removed} "
                  f"max_delta={change:.6f}")
        quiet = quiet + 1 if (change < p.epsilon and not made and not removed) else 0
        if quiet >= 3:
            break
    return forest_roots(chart, targets)


def _pair_choice(chart: Chart, node: ChartNode, memo: dict):
    best = None
    for f, a in node.pairs:
        if f is None or a is None:
            continue
        fn, an = chart.nodes[f], chart.nodes[a]
        if not (derivable(chart, fn, memo) and derivable(chart, an, memo)):
            continue
        left, right = sorted((fn, an), key=lambda x: x.span)
        key = (-(fn.activation + an.activation),
               (render_category(left.category), render_category(right.category)), left.span)
        if best is None or key < best[0]:
            best = (key, left, right)
    return best


def extract_tree(chart: Chart, root: ChartNode) -> ParseTree:
    memo: dict = {}

    def walk(node, bound):
        if node.lexical:
            return ParseTree(node.category, node.span, node.entry_id)
        width = node.span[1] - node.span[0]
        if width >= bound:
            raise ChartError(f"link cycle detected at node {node.id}")
        choice = _pair_choice(chart, node, memo)
        if choice is None:
            raise ChartError(f"node {node.id} has no complete derivation")
        _, left, right = choice
        if left.span[1] != right.span[0]:
            raise ChartError(f"constituents of node {node.id} do not abut")
        return ParseTree(node.category, node.span, None, (walk(left, width), walk(right, width)))

    return walk(root, root.span[1] - root.span[0] + 1)


def best_parse(forest, chart: Chart) -> Optional[ParseTree]:
    best = None
    for root in forest:
        tree = extract_tree(chart, root)
        key = (-root.activation, tree.size(), tree.text())
        if best is None or key < best[0]:
            best = (key, tree)
    return None if best is None else best[1]


def parse_lattice_c3(ml: Lattice, lex: Lexicon, target, p: Optional[RelaxationParams] = None, trace=None):
    """Init, relax and pick the best tree; returns (tree or None, chart, forest)."""
    chart = init_chart(ml, lex)
    forest = run_relaxation(chart, p=p, target=target, trace=trace)
    return best_parse(forest, chart), chart, forest
