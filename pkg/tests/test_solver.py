import pytest

from domgame.game_engine import Player, Variant, initial_state, is_terminal, legal_moves
from domgame.solver import Solver
from domgame.strategy import View, engine_for, play, update
from domgame.tree_enum import trees
from reference import best_gain

D, S = Variant.DOMINATOR_START, Variant.STALLER_START


def _walk(s, eng, out):
    if is_terminal(s):
        return
    view = View(eng, s)
    if s.turn is Player.DOMINATOR:
        if s.t > 0 or s.variant is D:
            bad = [i for i, k in enumerate(view.state) if not eng.solver.info(k).clean]
            for i, order in enumerate(view.orders):
                if bad and i not in bad:
                    continue
                for cv, v in enumerate(order):
                    o = eng.solver.dom_option(view.state[i], cv)
                    out.append(("D", s.moves, v, o and o.gain, best_gain(s, v, False)))
        _walk(play(s)[1], eng, out)
        return
    for u in sorted(legal_moves(s)):
        if not (s.variant is S and s.t == 0):
            i, cv = view.locate(u)
            o = eng.solver.stl_option(view.state[i], cv)
            out.append(("S", s.moves, u, o and o.gain, best_gain(s, u, True)))
        _walk(update(s, u), eng, out)


@pytest.mark.parametrize("n", range(2, 9))
def test_options_match_brute_force(n):
    """Memoized per-component options equal a labelled brute force over
    candidate_moves with goodness decided by the box search."""
    eng = engine_for()
    rows = []
    for t in trees(n):
        for var in (D, S):
            _walk(initial_state(t.forest(), var), eng, rows)
    bad = [r for r in rows if r[3] != r[4]]
    assert not bad, bad[:5]


def test_info_initial_clean():
    sv = Solver()
    for t in trees(9):
        g = t.forest()
        k, _ = sv.register({v: "W" for v in g.vertices}, g.adj)
        assert sv.info(k).clean


def test_semi_detection():
    sv = Solver()
    # W W B2 W B3 path is semi-corrupted; W W B2 W W is not
    from helpers import path_kinds
    g, k = path_kinds(["W", "W", "B2", "W", "B3"])
    key, _ = sv.register(k, g.adj)
    assert not sv.info(key).clean and sv.is_semi(key)
    g, k = path_kinds(["W", "W", "B2", "W", "W"])
    key, _ = sv.register(k, g.adj)
    assert not sv.info(key).clean and not sv.is_semi(key)
