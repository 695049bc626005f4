import pytest
from hypothesis import given, settings, strategies as st

from domgame.game_engine import (B2, B3, W, Color, GameState, IllegalMove, InvariantViolation, Player, Variant,
                                 apply, candidate_moves, check_state, initial_state, is_terminal, kind_of,
                                 legal_moves, play_vertex, recolor, staller_start_shift, t_max)
from domgame.graph_core import Forest, GraphError
from domgame.tree_enum import trees
from helpers import path

D, S = Variant.DOMINATOR_START, Variant.STALLER_START


def test_t_max():
    assert t_max(5, D) == 3 and t_max(5, S) == 3
    assert t_max(2, D) == 1 and t_max(2, S) == 1
    assert t_max(10, D) == 6 and t_max(10, S) == 6
    assert t_max(4, S) == 2
    with pytest.raises(ValueError):
        t_max(1, D)


def test_initial_state():
    s = initial_state(path(3), D)
    assert s.potential == 9
    assert s.turn is Player.DOMINATOR
    assert initial_state(path(3), S).turn is Player.STALLER
    assert legal_moves(s) == {0, 2, 4}
    with pytest.raises(GraphError):
        initial_state(Forest({0: []}), D)


def test_recolor_p3_leaf():
    s = initial_state(path(3), D)
    c = recolor(s, 0)
    assert c == {0: Color.R, 2: Color.B, 4: Color.W}


def test_candidates_p3_leaf():
    s = initial_state(path(3), D)
    cands = candidate_moves(s, 0)
    # one blue vertex worth 2 or 3, no blue-blue edges
    assert sorted(c.gain for c in cands) == [3, 4]
    best = max(cands, key=lambda c: c.gain)
    assert best.new_values == {2: 2, 4: 3}
    assert best.new_underlying.edges() == [(2, 4)]


def test_apply_records_psi():
    s = initial_state(path(3), D)
    c = max(candidate_moves(s, 2), key=lambda c: c.gain)
    s2 = apply(s, c)
    assert is_terminal(s2)
    assert s2.history[-1].gain == 9 and s2.history[-1].psi == 2


def test_stale_candidate():
    s = initial_state(path(4), D)
    c = candidate_moves(s, 0)[0]
    other = initial_state(path(4), D)
    with pytest.raises(IllegalMove):
        apply(other, c)


def test_illegal_move():
    s = initial_state(path(3), D)
    s2 = apply(s, max(candidate_moves(s, 0), key=lambda c: c.gain))
    with pytest.raises(IllegalMove):
        recolor(s2, 0)  # red


def test_blue_blue_edges_need_a_high_endpoint():
    # centre of P5 leaves two blue-blue edges to decide
    s = initial_state(path(5), D)
    for c in candidate_moves(s, 4):
        for a, b in c.new_underlying.edges():
            if 3 not in (c.new_values[a], c.new_values[b]):
                colors = recolor(s, 4)
                assert not (colors[a] is Color.B and colors[b] is Color.B)


def test_staller_start_shift():
    s = initial_state(path(4), S)
    c = min(candidate_moves(s, 2), key=lambda c: c.gain)
    s1 = staller_start_shift(apply(s, c))
    assert s1.psi_start == 1
    assert all(s1.value[v] == 3 for v in s1.underlying.vertices)
    assert s1.psi_cumulative == 0
    with pytest.raises(ValueError):
        staller_start_shift(s1 if False else initial_state(path(4), D))


def test_kind_of():
    assert kind_of(Color.W, 3) == W
    assert kind_of(Color.B, 2) == B2
    assert kind_of(Color.B, 3) == B3


def test_play_vertex_matches_candidate():
    s = initial_state(path(4), D)
    c = max(candidate_moves(s, 2), key=lambda c: c.gain)
    s2 = play_vertex(s, 2, c.new_underlying, c.new_values)
    assert s2.history[-1].gain == c.gain


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.data())
def test_random_play_keeps_state_valid(n, data):
    ts = list(trees(n))
    g = ts[data.draw(st.integers(0, len(ts) - 1))].forest()
    s = initial_state(g, data.draw(st.sampled_from([D, S])))
    while not is_terminal(s):
        v = data.draw(st.sampled_from(sorted(legal_moves(s))))
        cands = candidate_moves(s, v)
        s = apply(s, cands[data.draw(st.integers(0, len(cands) - 1))])
        check_state(s)
        assert all(m.gain > 0 for m in s.history)
    assert all(c is Color.R for c in s.color.values())


def test_check_state_catches_bad_values():
    s = initial_state(path(3), D)
    bad = GameState(s.original, s.underlying, s.color, {0: 2, 2: 3, 4: 3}, D)
    with pytest.raises(InvariantViolation):
        check_state(bad)
