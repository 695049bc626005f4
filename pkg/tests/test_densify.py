import pytest

from domgame.densify import compute_triplets, densify, densify_kinds, lift_move, white_tail2_leads
from domgame.game_engine import B3, W, Color
from domgame.graph_core import no_leaves_at_distance_4
from domgame.tree_enum import trees
from helpers import path, spider


def white(g):
    return {v: Color.W for v in g.vertices}


def three(g):
    return {v: 3 for v in g.vertices}


def test_white_tail2():
    g = spider(2, 2, 2)
    assert white_tail2_leads(g, white(g)) == {2, 6, 10}
    assert white_tail2_leads(path(5), white(path(5))) == set()  # no vertex of degree 3


def test_spider_center_is_head():
    g = spider(2, 2, 2)
    ta = compute_triplets(g, white(g))
    assert ta.tt == {0: 2} and ta.heads == {0}
    d = densify(g, white(g), three(g))
    assert sorted(d.graph.vertices) == [0, 1]
    assert d.virtual == {1}
    assert d.removed[0] == {2, 4, 6, 8, 10, 12}
    assert lift_move(d, 0) == 0
    with pytest.raises(ValueError):
        lift_move(d, 1)


def test_four_tails_keeps_one():
    g = spider(2, 2, 2, 2)
    d = densify(g, white(g), three(g))
    # the lowest-labelled tail survives next to the virtual leaf
    assert sorted(d.graph.vertices) == [0, 1, 2, 4]


def test_nested_triplets():
    # three spider(2,2,2) copies hung off a new centre through their centres
    edges = []
    base = 2
    for _ in range(3):
        c = base
        edges.append((0, c))
        for k in range(3):
            edges += [(c, base + 2 + 4 * k), (base + 2 + 4 * k, base + 4 + 4 * k)]
        base += 14
    from domgame.graph_core import Forest
    g = Forest.from_edges(edges)
    ta = compute_triplets(g, white(g))
    # the three inner centres are white with degree 4, so they feed a depth-3 triplet at 0
    assert ta.tt[0] == 3 and sorted(ta.tt.values()) == [2, 2, 2, 3]
    assert ta.heads == {0}
    d = densify(g, white(g), three(g))
    assert sorted(d.graph.vertices) == [0, 1]


def test_blue_tail_not_white():
    g = spider(2, 2, 2)
    kinds = {v: W for v in g.vertices}
    kinds[4] = B3
    d = densify_kinds(g, kinds)
    assert not d.triplets.tt
    assert d.graph == g


@pytest.mark.parametrize("n", range(2, 13))
def test_identity_without_leaves_at_distance_4(n):
    for t in trees(n):
        g = t.forest()
        if no_leaves_at_distance_4(g):
            d = densify(g, white(g), three(g))
            assert d.graph == g and not d.virtual
