"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import time

import pytest

from c3parse.categories import Rule, parse_category
from c3parse.chart import Chart, DecayMode, RelaxationParams, decay_step, parse_lattice_c3, spread_step
from c3parse.cli import main
from c3parse.experiment import CONFIGS, run_all
from c3parse.oracle import exhaustive_parse, forest_contains
from c3parse.sim import SimParams, candidates_per_position, generate_phoneme_lattice, solve_scale
from conftest import OBJ_NP, SOV, OSV, MOD_NP, morpheme_lattice
from generators import PROPERTY_SUITES, run_suite

P = parse_category
CASES = 250


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="session")
def sweep(corpus, lex_ua, lex_uasc, confusion, grammar):
    started = time.perf_counter()
    report = run_all(corpus, lex_ua, lex_uasc, grammar, list(CONFIGS), RelaxationParams(),
                     SimParams(2.2, 10, 1), confusion, oracle=True)
    return report, time.perf_counter() - started


def test_criterion_1_object_np(lex_uasc, verdict):
    started = time.perf_counter()
    ml = morpheme_lattice(lex_uasc, OBJ_NP)
    tree, _, _ = parse_lattice_c3(ml, lex_uasc, P("np[obj]"))
    forest = exhaustive_parse(ml, lex_uasc, target="np[obj]")
    elapsed = time.perf_counter() - started
    shape = tree is not None and [c.leaf_ids() for c in tree.children] == [["pha-il", "tul"], ["ul"]]
    ok = shape and tree.category == P("np[obj]") and len(forest) == 1 and elapsed < 1.0
    verdict(1, ok, f"root={tree and tree.category} bracketing ok={shape} oracle={len(forest)} "
                   f"time={elapsed:.3f}s")


def test_criterion_2_word_orders(lex_uasc, verdict):
    started = time.perf_counter()
    details, ok = [], True
    for ids in (SOV, OSV):
        ml = morpheme_lattice(lex_uasc, ids)
        tree, _, _ = parse_lattice_c3(ml, lex_uasc, P("s[DEC]"))
        forest = exhaustive_parse(ml, lex_uasc, target="s[DEC]")
        good = (tree is not None and tree.category == P("s[DEC]") and len(forest) == 1
                and forest_contains(forest, tree))
        ok &= good
        details.append(f"{ids[0]}-first oracle={len(forest)} match={good}")
    elapsed = time.perf_counter() - started
    ok &= elapsed < 1.0
    verdict(2, ok, "; ".join(details) + f" time={elapsed:.3f}s")


def test_criterion_3_ambiguity_contrast(lex_ua, lex_uasc, verdict):
    started = time.perf_counter()
    ua = exhaustive_parse(morpheme_lattice(lex_ua, MOD_NP), lex_ua, target="np")
    ml = morpheme_lattice(lex_uasc, MOD_NP)
    sc = exhaustive_parse(ml, lex_uasc, target="np")
    tree, _, _ = parse_lattice_c3(ml, lex_uasc, P("np"))
    elapsed = time.perf_counter() - started
    right_branching = len(sc) == 1 and [c.leaf_ids() for c in sc.trees[0].children] == [["say"], ["pha-il", "tul"]]
    ok = len(ua) == 2 and right_branching and tree is not None and forest_contains(sc, tree) and elapsed < 1.0
    verdict(3, ok, f"UA={len(ua)} UA+SC={len(sc)} (say (pha-il tul))={right_branching} "
                   f"time={elapsed:.3f}s")


def _node(chart, cat, span, a, pairs=None, lexical=False):
    if lexical:
        return chart.add(dict(category=P(cat), span=span, activation=a, entry_id=cat, source_score=a))
    n = chart.add(dict(category=P(cat), span=span, activation=a, rule=Rule.LEFT_CANCEL))
    n.pairs = pairs or []
    return n


def test_criterion_4_activation_equations(verdict):
    # bottom-up: child 1.0 under parents at 0.6 and 0.3
    chart = Chart(3)
    c = _node(chart, "np", (0, 1), 1.0, lexical=True)
    p1 = _node(chart, "a", (0, 2), 0.6, [(c.id, None)])
    p2 = _node(chart, "b", (0, 3), 0.3, [(c.id, None)])
    spread_step(chart, RelaxationParams(rho=0.05, rho_prime=0.03))
    up = (p1.activation - 0.6, p2.activation - 0.3)
    # top-down: parent 0.9 over three constituents
    chart = Chart(4)
    kids = [_node(chart, "np", (k, k + 1), 0.5) for k in range(3)]
    _node(chart, "s", (0, 3), 0.9, [(kids[0].id, kids[1].id), (kids[0].id, kids[2].id)])
    spread_step(chart, RelaxationParams(rho=0.0, rho_prime=0.03))
    down = [k.activation - 0.5 for k in kids]
    # decay: a=0.5, Ca=1, Cr=2, Retention
    chart = Chart(3)
    lx = _node(chart, "np", (0, 1), 1.0, lexical=True)
    n = _node(chart, "s", (0, 2), 0.5, [(lx.id, None)])
    decay_step(chart, RelaxationParams(d=0.87, decay_mode=DecayMode.RETENTION))
    ok = (abs(up[0] - 0.08) <= 1e-9 and abs(up[1] - 0.02) <= 1e-9
          and all(abs(x - 0.009) <= 1e-9 for x in down) and abs(n.activation - 0.2175) <= 1e-9)
    verdict(4, ok, f"bottom-up={up[0]:.12f}/{up[1]:.12f} top-down={down[0]:.12f} "
                   f"decay={n.activation:.12f}")


def test_criterion_5_oracle_soundness(sweep, verdict):
    report, elapsed = sweep
    trees = [r for c in report.configs for r in c.results if r.tree is not None]
    members = sum(bool(r.oracle_member) for r in trees)
    errors = [r.error for c in report.configs for r in c.results if r.error]
    ok = trees and members == len(trees) and not errors and elapsed < 60
    verdict(5, ok, f"{members}/{len(trees)} C3 trees in oracle forest over "
                   f"{sum(c.total for c in report.configs)} items, errors={len(errors)}, "
                   f"sweep={elapsed:.1f}s")


def test_criterion_6_morphological_accuracy(sweep, verdict):
    report, _ = sweep
    fracs = {c.config: f"{c.morph_hits}/{c.total}" for c in report.configs}
    ok = all(c.morph_acc == 1.0 for c in report.configs)
    verdict(6, ok, " ".join(f"{k}={v}" for k, v in fracs.items()))


def test_criterion_7_trends(sweep, verdict):
    report, elapsed = sweep
    acc = {c.config: c.syn_acc for c in report.configs}
    ok = (acc["UA+SCB"] > acc["UAB"] and acc["UA+SCP"] > acc["UAP"]
          and acc["UAB"] >= acc["UAP"] and acc["UA+SCB"] >= acc["UA+SCP"] and elapsed < 60)
    verdict(7, ok, " ".join(f"{k}={v:.4f}" for k, v in acc.items()) + f" sweep={elapsed:.1f}s")


def test_criterion_8_simulator_calibration(corpus, lex_ua, lex_uasc, confusion, verdict):
    sp = SimParams(2.2, 10, 1)
    lam = solve_scale(confusion, sp.avg_candidates)
    counts, missing, lattices, draw = [], 0, 0, 0
    while len(counts) < 10_000:
        for lex in (lex_ua, lex_uasc):
            for item in corpus:
                gold = item.phonemes(lex)
                pl = generate_phoneme_lattice(gold, confusion, sp, draw, item.id, scale=lam)
                have = {(e.src, e.label) for e in pl.edges}
                missing += any((t, g) not in have for t, g in enumerate(gold))
                counts.extend(candidates_per_position(pl))
                lattices += 1
        draw += 1
    mean = sum(counts) / len(counts)
    ok = abs(mean - 2.2) <= 0.15 and missing == 0
    verdict(8, ok, f"mean={mean:.4f} over {len(counts)} positions, "
                   f"gold path missing in {missing}/{lattices} lattices")


def test_criterion_9_property_suites(verdict):
    lines, ok = [], True
    for name, check in PROPERTY_SUITES.items():
        try:
            n = run_suite(check, CASES, seed=name)
            lines.append(f"{name}={n}/{CASES}")
        except AssertionError as e:
            ok = False
            lines.append(f"{name}=FAILED ({e})")
    verdict(9, ok, "; ".join(lines))


def test_criterion_10_reproducibility(tmp_path, verdict, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"report{k}.tsv"
        code = main(["experiment", "--seed", "1", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    capsys.readouterr()
    ok = outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1]
    verdict(10, ok, f"two experiment runs byte-identical={outs[0][1] == outs[1][1]} "
                    f"({len(outs[0][1])} bytes)")
