import random

import pytest

from domgame.adversaries import Adversary, AdversaryKind, staller_moves
from domgame.game_engine import Variant, apply, candidate_moves, initial_state, legal_moves
from domgame.harness import run_game
from domgame.strategy import play, update
from domgame.tree_enum import trees
from helpers import path


def _p3_after_leaf():
    s = initial_state(path(3), Variant.DOMINATOR_START)
    return apply(s, max(candidate_moves(s, 0), key=lambda c: c.gain))


def test_exhaustive_p3():
    assert staller_moves(_p3_after_leaf(), AdversaryKind.EXHAUSTIVE) == [2, 4]


def test_exhaustive_equals_legal():
    for t in trees(8):
        _, s = play(initial_state(t.forest(), Variant.DOMINATOR_START))
        if s.underlying:
            assert staller_moves(s, AdversaryKind.EXHAUSTIVE) == sorted(legal_moves(s))


def test_wrong_turn_and_terminal():
    with pytest.raises(ValueError):
        staller_moves(initial_state(path(3), Variant.DOMINATOR_START), AdversaryKind.EXHAUSTIVE)
    _, done = play(initial_state(path(2), Variant.DOMINATOR_START))
    with pytest.raises(ValueError):
        staller_moves(done, AdversaryKind.EXHAUSTIVE)


def test_random_reproducible():
    g = list(trees(12))[200].forest()

    def line(seed):
        adv = Adversary(AdversaryKind.RANDOM, seed)
        rec, _ = run_game(g, Variant.DOMINATOR_START, lambda s: adv.moves(s)[0])
        return [m.vertex for m in rec.moves]

    assert line(5) == line(5)
    assert any(line(5) != line(s) for s in range(6, 12))


def test_random_is_legal():
    s = _p3_after_leaf()
    for seed in range(20):
        (u,) = staller_moves(s, AdversaryKind.RANDOM, random.Random(seed))
        assert u in legal_moves(s)


def test_greedy_minimizes_next_gain():
    from domgame.strategy import View, engine_for
    eng = engine_for()
    for t in list(trees(9))[:20]:
        _, s = play(initial_state(t.forest(), Variant.DOMINATOR_START))
        if not s.underlying:
            continue
        (u,) = staller_moves(s, AdversaryKind.GREEDY)

        def score(x):
            nxt = update(s, x)
            return 0 if not nxt.underlying else eng.next_dom_gain(View(eng, nxt).state)

        scores = {x: score(x) for x in sorted(legal_moves(s))}
        assert scores[u] == min(scores.values())
        assert u == min(x for x, v in scores.items() if v == scores[u])
