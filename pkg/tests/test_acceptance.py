"""Acceptance criteria, one test per criterion.

Every tolerance is exact: a single failing game, violation or count mismatch
fails the criterion.  Each test records a PASS/FAIL line that is echoed in the
terminal summary.
"""
import random
from functools import lru_cache

import pytest

from conftest import VERDICTS
from domgame.boxes import Phase, find_decomposition, is_good
from domgame.densify import densify, densify_kinds
from domgame.game_engine import Color, Variant, check_state, legal_moves, t_max
from domgame.graph_core import no_leaves_at_distance_4
from domgame.harness import instances, run_game, verify
from domgame.oracle import gamma
from domgame.strategy import Ladder, StrategyConfig
from domgame.tree_enum import forests, prufer_class_count, trees

pytestmark = pytest.mark.slow

D, S = Variant.DOMINATOR_START, Variant.STALLER_START
TREE_MAX_N = 14
FOREST_MAX_N = 10
ORACLE_MAX_N = 12
GOODNESS_MAX_N = 12
DENSIFY_MAX_N = 12
SIMPLIFIED_MAX_N = 14
PRUFER_COUNTS = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106]


def verdict(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    VERDICTS.append(line)
    assert ok, line


def failure_lines(rep, k=5):
    return [r.line() for r in rep.failures[:k]]


@lru_cache(maxsize=None)
def tree_report(max_n):
    return verify(max_n, "both")


def test_c1_trees_exhaustive():
    rep = tree_report(TREE_MAX_N)
    bad = failure_lines(rep)
    verdict("c1 trees n<=14 both variants exhaustive", not rep.failures,
            f"games={rep.total_games} failures={len(rep.failures)} {bad or ''}".strip())


def test_c1_trees_exhaustive_all_dense_ladder():
    rep = verify(TREE_MAX_N, "both", cfg=StrategyConfig(ladder=Ladder.ALL_DENSE))
    verdict("c1 trees n<=14 both variants exhaustive (all-dense ladder)", not rep.failures,
            f"games={rep.total_games} failures={len(rep.failures)} {failure_lines(rep) or ''}".strip())


def test_c2_forests_exhaustive():
    rep = verify(FOREST_MAX_N, "both", use_forests=True)
    verdict("c2 forests n<=10 both variants exhaustive", not rep.failures,
            f"games={rep.total_games} failures={len(rep.failures)} {failure_lines(rep) or ''}".strip())


def test_c3_oracle_consistency():
    rep = tree_report(TREE_MAX_N)
    worst = {(r.forest_id, r.variant): r.T for r in rep.records}
    bad = []
    checked = 0
    for n, fid, g in instances(ORACLE_MAX_N, False):
        for var in (D, S):
            val = gamma(g, var)
            checked += 1
            if val > t_max(n, var) or val > worst[(fid, var)]:
                bad.append(f"{fid}/{var.value}: gamma={val} bound={t_max(n, var)} strategy_T={worst[(fid, var)]}")
    verdict("c3 oracle gamma <= bound and <= strategy worst T (trees n<=12)", not bad,
            f"instances={checked} violations={len(bad)} {bad[:5] or ''}".strip())


def test_c4_per_move_invariants():
    # route 1: every line of the exhaustive search, checked on the canonical game DAG
    rep = tree_report(TREE_MAX_N)
    dag_bad = [r.line() for r in rep.records if r.violations]
    # route 2: labelled games with a full state check after every move
    rng = random.Random(2024)
    labelled_bad = []
    played = 0

    def choose(s):
        return rng.choice(sorted(legal_moves(s)))

    def on_step(s):
        check_state(s)

    for n in range(2, 11):
        for g in forests(n):
            for var in (D, S):
                for _ in range(2):
                    rec, _ = run_game(g, var, choose, on_step=on_step)
                    played += 1
                    if rec.failed:
                        labelled_bad.append(rec.line())
    ok = not dag_bad and not labelled_bad
    verdict("c4 per-move invariants", ok,
            f"dag_records={len(rep.records)} dag_violations={len(dag_bad)} "
            f"labelled_games={played} labelled_violations={len(labelled_bad)} "
            f"{(dag_bad + labelled_bad)[:5] or ''}".strip())


def test_c5_goodness_self_check():
    rep = verify(GOODNESS_MAX_N, "both", cfg=StrategyConfig(self_check=True))
    bad = [r.line() for r in rep.records if r.violations]
    verdict("c5 goodness with independent decomposition and semi checks (trees n<=12)", not bad,
            f"games={rep.total_games} violations={len(bad)} {bad[:5] or ''}".strip())


def test_c6_densify_properties():
    identity_bad, good_bad, identity_checked, total = [], [], 0, 0
    for n in range(2, DENSIFY_MAX_N + 1):
        for t in trees(n):
            g = t.forest()
            total += 1
            if no_leaves_at_distance_4(g):
                identity_checked += 1
                d = densify(g, {v: Color.W for v in g.vertices}, {v: 3 for v in g.vertices})
                if d.graph != g or d.virtual:
                    identity_bad.append(str(t.level_sequence))
            d = densify_kinds(g, {v: "W" for v in g.vertices})
            if find_decomposition(d, 0) is None or not is_good(d, Phase.DOMINATOR_NEXT):
                good_bad.append(str(t.level_sequence))
    ok = not identity_bad and not good_bad
    verdict("c6 densify identity and initial goodness (trees n<=12)", ok,
            f"trees={total} identity_checked={identity_checked} identity_bad={len(identity_bad)} "
            f"not_good={len(good_bad)} {(identity_bad + good_bad)[:5] or ''}".strip())


def test_c7_enumeration_counts():
    enumerated = [sum(1 for _ in trees(n)) for n in range(1, 11)]
    bucketed = [prufer_class_count(n) for n in range(1, 11)]
    ok = enumerated == PRUFER_COUNTS and bucketed == PRUFER_COUNTS
    verdict("c7 tree counts n=1..10", ok, f"enumerated={enumerated} pruefer={bucketed}")


def test_c8_simplified():
    rep = verify(SIMPLIFIED_MAX_N, "both", cfg=StrategyConfig(simplified_ok=True))
    forests_checked = sum(s.forests for s in rep.per_n.values())
    verdict("c8 simplified play, trees n<=14 without leaves at distance 4", not rep.failures,
            f"instances={forests_checked} games={rep.total_games} failures={len(rep.failures)} "
            f"{failure_lines(rep) or ''}".strip())
