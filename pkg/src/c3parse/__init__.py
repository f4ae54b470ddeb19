"""Lattice parsing with an extended categorial grammar and chart-driven
interactive relaxation."""

from .categories import (
    Basic, Direction, Functor, Grammar, Kind, Rule, Suppressed, Var,
    classify, combine, default_grammar, normalize, parse_category, render_category, unify,
)
from .chart import (
    Chart, ChartNode, DecayMode, RelaxationParams, add_nodes_step, allowed_parent_spans,
    best_parse, decay_step, extract_tree, init_chart, run_relaxation, spread_step,
)
from .lattice import (
    Edge, GoldPath, Lattice, MorphemeLattice, PhonemeLattice, contains_path,
    decode_lattice, filter_lattice, validate_lattice,
)
from .lexicon import (
    Lexicon, assign_categories, build_trie, bundled_lexicon, connectable, load_lexicon, trie_lookup,
)
from .oracle import OracleForest, exhaustive_parse, forest_contains
from .trees import ParseTree, parse_tree

__version__ = "0.1.0"
