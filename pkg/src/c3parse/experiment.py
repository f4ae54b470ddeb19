"""Four-configuration experiment runner and report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .categories import desuppress, parse_category
from .chart import ChartError, RelaxationParams, best_parse, init_chart, run_relaxation
from .lattice import GoldPath, chain_lattice, contains_path, decode_lattice, filter_lattice
from .lexicon import Lexicon
from .oracle import AmbiguityCapExceeded, exhaustive_parse, forest_contains
from .sim import ConfusionMatrix, SimParams, generate_phoneme_lattice, solve_scale
from .trees import ParseTree, parse_tree


CONFIGS = {
    "UAB": ("UA", "Baseline"),
    "UAP": ("UA", "Lattice"),
    "UA+SCB": ("UA+SC", "Baseline"),
    "UA+SCP": ("UA+SC", "Lattice"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str

    def __post_init__(self):
        if self.name not in CONFIGS:
            raise ValueError(f"unknown config {self.name!r}; expected one of {', '.join(CONFIGS)}")

    @property
    def grammar_variant(self) -> str:
        return CONFIGS[self.name][0]

    @property
    def input_mode(self) -> str:
        return CONFIGS[self.name][1]


@dataclass(frozen=True)
class CorpusSentence:
    id: str
    morphemes: tuple
    target: object
    tree: Optional[ParseTree] = None

    def phonemes(self, lex: Lexicon) -> list:
        return lex.surface_of(self.morphemes)

    def gold_path(self, lex: Lexicon) -> GoldPath:
        return GoldPath.from_entries(lex, self.morphemes)


def load_corpus(text: str) -> list:
    """Lines: ``sentence <id> target=<cat> morphemes=<id,...> [tree=<tree text>]``."""
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 4)
        if parts[0] != "sentence" or len(parts) < 4:
            raise ValueError(f"line {lineno}: expected 'sentence <id> target=... morphemes=...'")
        sid, fields_ = parts[1], {}
        for chunk in parts[2:4]:
            k, _, v = chunk.partition("=")
            fields_[k] = v
        if len(parts) == 5:
            if not parts[4].startswith("tree="):
                raise ValueError(f"line {lineno}: trailing field must be tree=")
            fields_["tree"] = parts[4][5:]
        if "target" not in fields_ or "morphemes" not in fields_:
            raise ValueError(f"line {lineno}: target= and morphemes= are required")
        tree = parse_tree(fields_["tree"]) if "tree" in fields_ else None
        items.append(CorpusSentence(sid, tuple(fields_["morphemes"].split(",")),
                                    parse_category(fields_["target"]), tree))
    return items


def check_corpus(corpus, lex: Lexicon) -> list:
    problems = []
    for item in corpus:
        for m in item.morphemes:
            if m not in lex.entries:
                problems.append(f"{item.id}: unknown morpheme {m!r}")
        if item.tree is not None and item.tree.leaf_ids() != list(item.morphemes):
            problems.append(f"{item.id}: gold tree leaves differ from morphemes")
    return problems


def score_parse(predicted: Optional[ParseTree], item: CorpusSentence) -> bool:
    if predicted is None:
        return False
    if predicted.leaf_ids() != list(item.morphemes):
        return False
    if desuppress(predicted.category) != desuppress(item.target):
        return False
    if item.tree is not None:
        # trees compare with suppression marks erased, so one gold tree
        # serves both lexicon variants
        return predicted.text(strip_suppression=True) == item.tree.text(strip_suppression=True)
    return True


@dataclass
class ItemResult:
    item_id: str
    draw: int
    morph_hit: bool
    syn_hit: bool
    tree: Optional[str] = None
    oracle_size: Optional[int] = None
    oracle_member: Optional[bool] = None
    error: Optional[str] = None


@dataclass
class ConfigReport:
    config: str
    results: list = field(default_factory=list)
    seed: int = 0
    wall_time: float = 0.0

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def morph_hits(self) -> int:
        return sum(r.morph_hit for r in self.results)

    @property
    def syn_hits(self) -> int:
        return sum(r.syn_hit for r in self.results)

    @property
    def morph_acc(self) -> float:
        return self.morph_hits / self.total if self.total else 0.0

    @property
    def syn_acc(self) -> float:
        return self.syn_hits / self.total if self.total else 0.0


@dataclass
class Report:
    configs: list
    params: RelaxationParams
    sim: SimParams

    def get(self, name) -> ConfigReport:
        for c in self.configs:
            if c.config == name:
                return c
        raise KeyError(name)


def run_item(item: CorpusSentence, lex: Lexicon, phoneme_lattice, p: RelaxationParams,
             draw: int = 0, oracle: bool = False) -> ItemResult:
    ml = filter_lattice(decode_lattice(phoneme_lattice, lex.trie), lex.connectivity, lex)
    res = ItemResult(item.id, draw, contains_path(ml, item.gold_path(lex)), False)
    try:
        chart = init_chart(ml, lex)
        forest = run_relaxation(chart, p=p, target=item.target)
        tree = best_parse(forest, chart)
    except ChartError as e:
        res.error = str(e)
        tree = None
    res.syn_hit = score_parse(tree, item)
    res.tree = None if tree is None else tree.text()
    if oracle and ml.edges:
        try:
            f = exhaustive_parse(ml, lex, target=item.target)
            res.oracle_size = len(f)
            res.oracle_member = tree is None or forest_contains(f, tree)
        except AmbiguityCapExceeded as e:
            res.error = str(e)
    return res


def run_experiment(corpus, lex_ua: Lexicon, lex_uasc: Lexicon, g, cfg: ExperimentConfig,
                   p: Optional[RelaxationParams] = None, sp: Optional[SimParams] = None,
                   cm: Optional[ConfusionMatrix] = None, oracle: bool = False) -> ConfigReport:
    p = p or RelaxationParams()
    sp = sp or SimParams()
    lex = lex_ua if cfg.grammar_variant == "UA" else lex_uasc
    started = time.perf_counter()
    rep = ConfigReport(cfg.name, seed=sp.seed)
    scale = None
    if cfg.input_mode == "Lattice":
        if cm is None:
            raise ValueError("lattice mode needs a confusion matrix")
        scale = solve_scale(cm, sp.avg_candidates)
    for item in corpus:
        gold = item.phonemes(lex)
        if cfg.input_mode == "Baseline":
            rep.results.append(run_item(item, lex, chain_lattice(gold), p, 0, oracle))
            continue
        for draw in range(sp.lattices_per_sentence):
            pl = generate_phoneme_lattice(gold, cm, sp, draw, item.id, scale=scale)
            rep.results.append(run_item(item, lex, pl, p, draw, oracle))
    rep.wall_time = time.perf_counter() - started
    return rep


def run_all(corpus, lex_ua, lex_uasc, g, names, p=None, sp=None, cm=None, oracle=False) -> Report:
    p = p or RelaxationParams()
    sp = sp or SimParams()
    reps = [run_experiment(corpus, lex_ua, lex_uasc, g, ExperimentConfig(n), p, sp, cm, oracle)
            for n in names]
    return Report(reps, p, sp)


def format_report(report: Report) -> str:
    """Tab-separated table laid out like the morphological/syntactic result tables."""
    lines = [
        f"# params {report.params.echo()}",
        f"# sim avg_candidates={report.sim.avg_candidates!r} "
        f"lattices_per_sentence={report.sim.lattices_per_sentence} seed={report.sim.seed}",
        "config\tmorph_acc\tmorph_frac\tsyn_acc\tsyn_frac\titems\tseed",
    ]
    for c in report.configs:
        lines.append("\t".join([
            c.config,
            f"{c.morph_acc:.4f}", f"{c.morph_hits}/{c.total}",
            f"{c.syn_acc:.4f}", f"{c.syn_hits}/{c.total}",
            str(c.total), str(c.seed),
        ]))
    return "\n".join(lines) + "\n"


__all__ = [
    "CONFIGS", "ExperimentConfig", "CorpusSentence", "load_corpus", "check_corpus",
    "score_parse", "run_item", "run_experiment", "run_all", "format_report", "Report",
    "ConfigReport", "ItemResult"
]
