"""Phoneme and morpheme lattices, lexical decoding and connectivity filtering."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .lexicon import BOUNDARY, ConnectivityMatrix, Lexicon, PhonemeTrie


class LatticeFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: str
    score: float = 1.0


@dataclass(frozen=True)
class Lattice:
    """Edge-labelled DAG over vertices ``0..vertex_count-1``.

    ``kind`` is ``phoneme`` (labels are phoneme symbols) or ``morpheme``
    (labels are entry ids).
    """

    vertex_count: int
    edges: tuple = ()
    kind: str = "phoneme"

    @property
    def final(self) -> int:
        return self.vertex_count - 1

    def edge_keys(self) -> set:
        return {(e.src, e.dst, e.label) for e in self.edges}

    def outgoing(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.src].append(e)
        return out


def PhonemeLattice(vertex_count, edges=()) -> Lattice:
    return Lattice(vertex_count, tuple(edges), "phoneme")


def MorphemeLattice(vertex_count, edges=()) -> Lattice:
    return Lattice(vertex_count, tuple(edges), "morpheme")


def chain_lattice(symbols, score=1.0) -> Lattice:
    """Single-candidate phoneme lattice spelling ``symbols``."""
    return PhonemeLattice(len(symbols) + 1, [Edge(t, t + 1, s, score) for t, s in enumerate(symbols)])


@dataclass(frozen=True)
class GoldPath:
    steps: tuple = field(default_factory=tuple)  # (entry_id, src, dst)

    @classmethod
    def from_entries(cls, lex: Lexicon, ids) -> "GoldPath":
        steps, t = [], 0
        for i in ids:
            n = len(lex.entry(i).surface)
            steps.append((i, t, t + n))
            t += n
        return cls(tuple(steps))


# ------------------------------------------------------------------- file io

def format_lattice(lat: Lattice) -> str:
    lines = [f"lattice {lat.vertex_count} kind={lat.kind}"]
    for e in lat.edges:
        lines.append(f"edge {e.src} {e.dst} {e.label} {e.score!r}")
    return "\n".join(lines) + "\n"


def parse_lattice(text: str) -> Lattice:
    header, edges = None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        try:
            if f[0] == "lattice":
                if header is not None:
                    raise LatticeFormatError("duplicate header")
                kind = "phoneme"
                for extra in f[2:]:
                    if not extra.startswith("kind="):
                        raise LatticeFormatError(f"unknown header field {extra!r}")
                    kind = extra[5:]
                if kind not in ("phoneme", "morpheme"):
                    raise LatticeFormatError(f"unknown lattice kind {kind!r}")
                header = (int(f[1]), kind)
            elif f[0] == "edge":
                if len(f) != 5:
                    raise LatticeFormatError("edge <from> <to> <label> <score>")
                edges.append(Edge(int(f[1]), int(f[2]), f[3], float(f[4])))
            else:
                raise LatticeFormatError(f"unknown directive {f[0]!r}")
        except (IndexError, ValueError) as e:
            raise LatticeFormatError(f"line {lineno}: {e}") from None
    if header is None:
        raise LatticeFormatError("missing 'lattice' header")
    return Lattice(header[0], tuple(edges), header[1])


# ---------------------------------------------------------------- validation

def _reach(lat: Lattice, start: int, forward: bool) -> set:
    adj = defaultdict(list)
    for e in lat.edges:
        if 0 <= e.src < e.dst < lat.vertex_count:
            if forward:
                adj[e.src].append(e.dst)
            else:
                adj[e.dst].append(e.src)
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def validate_lattice(lat: Lattice) -> list:
    """Human-readable invariant violations; empty when the lattice is sound.

    Morpheme lattices may leave vertices untouched (the interior of a
    morpheme); only vertices with incident edges must lie on a full path.
    """
    problems = []
    if lat.vertex_count < 2:
        problems.append(f"vertex_count {lat.vertex_count} < 2")
        return problems
    for k, e in enumerate(lat.edges):
        if not (0 <= e.src < lat.vertex_count and 0 <= e.dst < lat.vertex_count):
            problems.append(f"edge {k} ({e.src}->{e.dst}): vertex out of range")
        elif e.src >= e.dst:
            problems.append(f"edge {k} ({e.src}->{e.dst}): non-forward edge")
        if not (0.0 < e.score <= 1.0):
            problems.append(f"edge {k} ({e.src}->{e.dst}): score {e.score} outside (0,1]")
    live = _reach(lat, 0, True) & _reach(lat, lat.final, False)
    if lat.kind == "phoneme":
        touched = set(range(lat.vertex_count))
    else:
        touched = {v for e in lat.edges for v in (e.src, e.dst)} | {0, lat.final}
    for v in sorted(touched - live):
        problems.append(f"vertex {v}: dead vertex")
    return problems


def trim(lat: Lattice) -> Lattice:
    """Drop edges that lie on no complete 0 -> T path."""
    live = _reach(lat, 0, True) & _reach(lat, lat.final, False)
    kept = tuple(e for e in lat.edges if e.src in live and e.dst in live)
    return Lattice(lat.vertex_count, kept, lat.kind)


# ------------------------------------------------------------------ decoding

def decode_lattice(pl: Lattice, trie: PhonemeTrie) -> Lattice:
    """Viterbi lexical decoding of a phoneme lattice into a morpheme lattice.

    An edge (i, j, m) exists when some phoneme path from i to j spells the
    surface of m; its score is the best path product.  Edges off every
    complete path are dropped.
    """
    out = pl.outgoing()
    best: dict = {}
    for start in range(pl.vertex_count):
        # frontier of (vertex, trie node) -> best product so far
        frontier = {(start, id(trie.root)): (trie.root, 1.0)}
        while frontier:
            nxt = {}
            for (v, _), (node, score) in frontier.items():
                for e in out.get(v, ()):
                    child = node.children.get(e.label)
                    if child is None:
                        continue
                    s = score * e.score
                    key = (e.dst, id(child))
                    if key not in nxt or s > nxt[key][1]:
                        nxt[key] = (child, s)
            for (v, _), (node, s) in nxt.items():
                for eid in node.ids:
                    k = (start, v, eid)
                    if s > best.get(k, 0.0):
                        best[k] = s
            frontier = nxt
    edges = tuple(Edge(i, j, m, s) for (i, j, m), s in sorted(best.items()))
    return trim(MorphemeLattice(pl.vertex_count, edges))


def length_normalized(ml: Lattice, lex: Lexicon) -> Lattice:
    """Replace each morpheme score by its per-phoneme geometric mean."""
    edges = tuple(Edge(e.src, e.dst, e.label, e.score ** (1.0 / len(lex.entry(e.label).surface)))
                  for e in ml.edges)
    return Lattice(ml.vertex_count, edges, ml.kind)


# ----------------------------------------------------------------- filtering

def filter_lattice(ml: Lattice, m: ConnectivityMatrix, lex: Lexicon) -> Lattice:
    """Greatest sub-lattice in which every edge has connectable support on both sides."""
    T = ml.final
    cls = {e: lex.entry(e.label).morph_class for e in ml.edges}
    alive = set(ml.edges)
    changed = True
    while changed:
        changed = False
        ending, starting = defaultdict(list), defaultdict(list)
        for e in alive:
            ending[e.dst].append(e)
            starting[e.src].append(e)
        for e in sorted(alive, key=lambda x: (x.src, x.dst, x.label)):
            c = cls[e]
            if e.src == 0:
                ok = m.connectable(BOUNDARY, c)
            else:
                ok = any(m.connectable(cls[p], c) for p in ending[e.src])
            if ok:
                if e.dst == T:
                    ok = m.connectable(c, BOUNDARY)
                else:
                    ok = any(m.connectable(c, cls[s]) for s in starting[e.dst])
            if not ok:
                alive.discard(e)
                changed = True
    edges = tuple(e for e in ml.edges if e in alive)
    return Lattice(ml.vertex_count, edges, ml.kind)


def contains_path(ml: Lattice, gold: GoldPath) -> bool:
    keys = ml.edge_keys()
    return all((src, dst, eid) in keys for eid, src, dst in gold.steps)
