"""Command-line interface.

Exit status: 0 on success, 1 when no parse is found, 2 on bad input.
Omitted data files fall back to the bundled lexicons, corpus and
confusion matrix.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import experiment as ex
from .categories import CategorySyntaxError, default_grammar, parse_category
from .chart import RelaxationParams, load_params, parse_decay_mode, parse_lattice_c3
from .lattice import (
    LatticeFormatError, decode_lattice, filter_lattice, format_lattice, parse_lattice, validate_lattice,
)
from .lexicon import LexiconError, bundled_lexicon, bundled_text, load_lexicon_file
from .oracle import AmbiguityCapExceeded, exhaustive_parse
from .sim import ConfusionError, SimParams, candidates_per_position, generate_phoneme_lattice, load_confusion

EXIT_OK, EXIT_NO_PARSE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _lexicon(path, variant="UA+SC"):
    return load_lexicon_file(path) if path else bundled_lexicon(variant)


def _params(args) -> RelaxationParams:
    p = load_params(_read(args.params)) if getattr(args, "params", None) else RelaxationParams()
    overrides = {
        "rho": args.rho, "rho_prime": args.rho_prime, "d": args.decay, "theta": args.theta,
        "phi": args.phi, "max_cycles": args.max_cycles,
        "decay_mode": parse_decay_mode(args.decay_mode) if args.decay_mode else None,
    }
    return replace(p, **{k: v for k, v in overrides.items() if v is not None})


def _morpheme_lattice(path, lex):
    lat = parse_lattice(_read(path))
    problems = validate_lattice(lat)
    if problems:
        raise InputError("invalid lattice: " + "; ".join(problems))
    if lat.kind == "phoneme":
        lat = decode_lattice(lat, lex.trie)
    for e in lat.edges:
        lex.entry(e.label)
    return filter_lattice(lat, lex.connectivity, lex)


def cmd_parse(args):
    lex = _lexicon(args.lexicon, args.grammar_variant)
    ml = _morpheme_lattice(args.input, lex)
    if not ml.edges:
        print("no morpheme path survives decoding and filtering", file=sys.stderr)
        return EXIT_NO_PARSE
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    tree, chart, forest = parse_lattice_c3(ml, lex, parse_category(args.target), _params(args), trace)
    if tree is None:
        print(f"no parse with root {args.target} after {chart.cycle} cycles", file=sys.stderr)
        return EXIT_NO_PARSE
    root = max(forest, key=lambda n: n.activation)
    print(tree.text())
    print(f"# roots={len(forest)} activation={root.activation:.6f} cycles={chart.cycle}")
    return EXIT_OK


def cmd_decode(args):
    lex = _lexicon(args.lexicon)
    pl = parse_lattice(_read(args.input))
    problems = validate_lattice(pl)
    if problems:
        raise InputError("invalid lattice: " + "; ".join(problems))
    ml = decode_lattice(pl, lex.trie)
    if args.filter:
        ml = filter_lattice(ml, lex.connectivity, lex)
    sys.stdout.write(format_lattice(ml))
    return EXIT_OK


def cmd_simulate(args):
    lex = _lexicon(args.lexicon)
    cm = load_confusion(_read(args.confusion) if args.confusion else bundled_text("confusion.txt"), lex.phonemes)
    corpus = ex.load_corpus(_read(args.corpus) if args.corpus else bundled_text("corpus.txt"))
    by_id = {c.id: c for c in corpus}
    if args.sentence in by_id:
        gold = by_id[args.sentence].phonemes(lex)
    else:
        try:
            gold = lex.surface_of(args.sentence.split(","))
        except LexiconError:
            raise InputError(f"unknown sentence id or morpheme sequence {args.sentence!r}") from None
    sp = SimParams(args.avg_candidates, args.draws, args.seed)
    for draw in range(args.draws):
        pl = generate_phoneme_lattice(gold, cm, sp, draw, args.sentence)
        counts = candidates_per_position(pl)
        print(f"# draw {draw} mean_candidates={sum(counts) / len(counts):.4f}")
        sys.stdout.write(format_lattice(pl))
    return EXIT_OK


def cmd_experiment(args):
    corpus = ex.load_corpus(_read(args.corpus) if args.corpus else bundled_text("corpus.txt"))
    ua = _lexicon(args.lexicon_ua, "UA")
    uasc = _lexicon(args.lexicon_uasc, "UA+SC")
    cm = load_confusion(_read(args.confusion) if args.confusion else bundled_text("confusion.txt"), ua.phonemes)
    for lex in (ua, uasc):
        problems = ex.check_corpus(corpus, lex)
        if problems:
            raise InputError("; ".join(problems))
    names = [n.strip() for n in args.configs.split(",") if n.strip()]
    for n in names:
        ex.ExperimentConfig(n)
    sp = SimParams(args.avg_candidates, args.draws, args.seed)
    report = ex.run_all(corpus, ua, uasc, default_grammar(), names, _params(args), sp, cm)
    text = ex.format_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    sys.stdout.write(text)
    for c in report.configs:
        print(f"# {c.config}: {c.wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args):
    lex = _lexicon(args.lexicon, args.grammar_variant)
    ml = _morpheme_lattice(args.input, lex)
    forest = exhaustive_parse(ml, lex, target=parse_category(args.target), cap=args.cap)
    for t in forest.trees:
        print(t.text())
    print(f"# parses={len(forest)}")
    return EXIT_OK if len(forest) else EXIT_NO_PARSE


def _relaxation_flags(p):
    g = p.add_argument_group("relaxation parameters")
    g.add_argument("--params", help="file of 'key value' lines")
    g.add_argument("--rho", type=float)
    g.add_argument("--rho-prime", type=float)
    g.add_argument("--decay", type=float, help="decay ratio d")
    g.add_argument("--theta", type=float)
    g.add_argument("--phi", type=float)
    g.add_argument("--max-cycles", type=int)
    g.add_argument("--decay-mode", choices=["Retention", "Literal"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c3parse", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="relaxation-parse a phoneme or morpheme lattice")
    p.add_argument("--lexicon")
    p.add_argument("--grammar-variant", choices=["UA", "UA+SC"], default="UA+SC")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--trace", action="store_true")
    _relaxation_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("decode", help="decode a phoneme lattice into morphemes")
    p.add_argument("--lexicon")
    p.add_argument("--input", required=True)
    p.add_argument("--filter", action="store_true", help="also apply the connectivity filter")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="generate confusion-matrix phoneme lattices")
    p.add_argument("--lexicon")
    p.add_argument("--confusion")
    p.add_argument("--corpus")
    p.add_argument("--sentence", required=True, help="corpus id or comma-separated morpheme ids")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--avg-candidates", type=float, default=2.2)
    p.add_argument("--draws", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run the four-configuration experiment")
    p.add_argument("--corpus")
    p.add_argument("--lexicon-ua")
    p.add_argument("--lexicon-uasc")
    p.add_argument("--confusion")
    p.add_argument("--configs", default="UAB,UAP,UA+SCB,UA+SCP")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--avg-candidates", type=float, default=2.2)
    p.add_argument("--draws", type=int, default=10, help="lattices per sentence")
    p.add_argument("--out")
    _relaxation_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("oracle", help="print every derivation of a lattice")
    p.add_argument("--lexicon")
    p.add_argument("--grammar-variant", choices=["UA", "UA+SC"], default="UA+SC")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--cap", type=int, default=10_000)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, LexiconError, LatticeFormatError, CategorySyntaxError,
            ConfusionError, AmbiguityCapExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
