"""Phoneme-lattice simulation from a confusion matrix.

Each position always carries the correct phoneme.  Every other candidate c
of the true phoneme g joins independently with probability
``min(1, lam * cm[g][c])``, where one scale ``lam`` per matrix fixes the
expected number of candidates per position.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .lattice import Edge, PhonemeLattice

ROW_TOLERANCE = 1e-9


class ConfusionError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    rows: dict  # phoneme -> tuple of (candidate, probability), diagonal first

    def prob(self, true, cand) -> float:
        return dict(self.rows[true]).get(cand, 0.0)

    def off_diagonal(self, true) -> list:
        return [(c, p) for c, p in self.rows[true] if c != true and p > 0]


@dataclass(frozen=True)
class SimParams:
    avg_candidates: float = 2.2
    lattices_per_sentence: int = 10
    seed: int = 1

    def __post_init__(self):
        if self.avg_candidates < 1:
            raise ValueError("avg_candidates must be >= 1")
        if self.lattices_per_sentence < 1:
            raise ValueError("lattices_per_sentence must be >= 1")


def load_confusion(text: str, inventory=None) -> ConfusionMatrix:
    rows, declared = {}, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        if f[0] == "confusion":
            declared = int(f[1])
        elif f[0] == "row":
            if len(f) < 3:
                raise ConfusionError(f"line {lineno}: empty row")
            true = f[1]
            if true in rows:
                raise ConfusionError(f"line {lineno}: duplicate row {true!r}")
            cands = []
            for item in f[2:]:
                sym, _, p = item.partition(":")
                try:
                    prob = float(p)
                except ValueError:
                    raise ConfusionError(f"line {lineno}: bad probability {item!r}") from None
                if prob < 0:
                    raise ConfusionError(f"row {true!r}: negative probability for {sym!r}")
                cands.append((sym, prob))
            total = sum(p for _, p in cands)
            if abs(total - 1.0) > ROW_TOLERANCE:
                raise ConfusionError(f"row {true!r} sums to {total:.12g}, not 1")
            if true not in dict(cands):
                raise ConfusionError(f"row {true!r} lacks its diagonal entry")
            cands.sort(key=lambda cp: (cp[0] != true, cp[0]))
            rows[true] = tuple(cands)
        else:
            raise ConfusionError(f"line {lineno}: unknown directive {f[0]!r}")
    if declared is not None and declared != len(rows):
        raise ConfusionError(f"header declares {declared} rows, found {len(rows)}")
    if inventory is not None:
        inventory = set(inventory)
        for true, cands in rows.items():
            for sym in [true] + [c for c, _ in cands]:
                if sym not in inventory:
                    raise ConfusionError(f"unknown phoneme {sym!r} in row {true!r}")
    return ConfusionMatrix(rows)


def identity_confusion(phonemes) -> ConfusionMatrix:
    return ConfusionMatrix({p: ((p, 1.0),) for p in sorted(phonemes)})


def expected_candidates(cm: ConfusionMatrix, lam: float) -> float:
    """Mean over matrix rows of the expected candidate count at scale ``lam``."""
    total = 0.0
    for true in cm.rows:
        total += 1.0 + sum(min(1.0, lam * p) for _, p in cm.off_diagonal(true))
    return total / len(cm.rows)


def solve_scale(cm: ConfusionMatrix, avg_candidates: float) -> float:
    target = avg_candidates
    if abs(target - 1.0) < 1e-12:
        return 0.0
    ceiling = sum(1 + len(cm.off_diagonal(t)) for t in cm.rows) / len(cm.rows)
    if target > ceiling + 1e-12:
        raise ConfusionError(
            f"avg_candidates {avg_candidates} unachievable; at most {ceiling:.4g} with this matrix")
    lo, hi = 0.0, 1.0
    while expected_candidates(cm, hi) < target:
        hi *= 2
        if hi > 1e12:
            break
    for _ in range(200):
        mid = (lo + hi) / 2
        if expected_candidates(cm, mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def draw_rng(seed: int, sentence_id: str, draw_index: int) -> random.Random:
    # string seeds hash through sha512, so streams are stable across runs
    return random.Random(f"{seed}:{sentence_id}:{draw_index}")


def generate_phoneme_lattice(gold, cm: ConfusionMatrix, sp: SimParams, draw_index: int,
                             sentence_id: str = "", scale=None):
    lam = solve_scale(cm, sp.avg_candidates) if scale is None else scale
    rng = draw_rng(sp.seed, sentence_id, draw_index)
    edges = []
    for t, g in enumerate(gold):
        if g not in cm.rows:
            raise ConfusionError(f"no confusion row for phoneme {g!r}")
        edges.append(Edge(t, t + 1, g, cm.prob(g, g)))
        for c, p in cm.off_diagonal(g):
            if rng.random() < min(1.0, lam * p):
                edges.append(Edge(t, t + 1, c, p))
    return PhonemeLattice(len(gold) + 1, edges)


def candidates_per_position(lattice) -> list:
    counts = [0] * (lattice.vertex_count - 1)
    for e in lattice.edges:
        counts[e.src] += 1
    return counts
