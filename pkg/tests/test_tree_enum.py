import math

import pytest

from domgame.graph_core import canonical_form, components
from domgame.tree_enum import (_BLANK, automorphism_count, cayley_sum, forest_parts, forests, otter_counts,
                               prufer_class_count, trees)

COUNTS = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551, 1301, 3159]


def test_counts_match_otter():
    assert otter_counts(len(COUNTS)) == COUNTS
    assert [sum(1 for _ in trees(n)) for n in range(1, 15)] == COUNTS


@pytest.mark.parametrize("n", range(1, 9))
def test_counts_match_prufer_bucketing(n):
    assert prufer_class_count(n) == COUNTS[n - 1]


@pytest.mark.parametrize("n", range(3, 8))
def test_restricted_prufer_agrees_with_full(n):
    assert prufer_class_count(n, leaves_last=False) == prufer_class_count(n)


@pytest.mark.parametrize("n", range(1, 13))
def test_orbit_sum_equals_cayley(n):
    # sum of n!/|Aut| over the classes counts labelled trees exactly when
    # the list has every class once
    assert cayley_sum(n) == max(1, n ** (n - 2))


@pytest.mark.parametrize("n", range(1, 12))
def test_trees_pairwise_non_isomorphic_and_valid(n):
    keys = set()
    for t in trees(n):
        g = t.forest()
        assert len(g) == n
        assert len(components(g)) == 1
        keys.add(canonical_form(g.adj, _BLANK)[0])
    assert len(keys) == COUNTS[n - 1]


def test_small_cases():
    assert [t.edges() for t in trees(2)] == [[(0, 1)]]
    shapes = sorted(sorted(t.forest().degree(v) for v in t.forest().vertices) for t in trees(4))
    assert shapes == [[1, 1, 1, 3], [1, 1, 2, 2]]


def test_automorphisms():
    (star,) = [t for t in trees(4) if max(t.forest().degree(v) for v in t.forest().vertices) == 3]
    assert automorphism_count(star) == math.factorial(3)


def test_forests_small():
    assert sum(1 for _ in forests(2)) == 1
    assert sum(1 for _ in forests(4)) == 3
    assert sum(1 for _ in forests(5)) == 4  # three trees plus P2 + P3


@pytest.mark.parametrize("n", range(2, 11))
def test_forests_distinct_and_isolate_free(n):
    seen = set()
    for parts in forest_parts(n):
        assert sum(t.n for t in parts) == n
        assert all(t.n >= 2 for t in parts)
        key = tuple(sorted(canonical_form(t.forest().adj, _BLANK)[0] for t in parts))
        assert key not in seen
        seen.add(key)
    for g in forests(n):
        assert not g.isolated() and len(g) == n


def test_forest_counts_from_partitions():
    # independent count: multisets of trees per integer partition with parts >= 2
    def count(n, largest):
        if n == 0:
            return 1
        total = 0
        for part in range(min(n, largest), 1, -1):
            for k in range(1, n // part + 1):
                if k * part > n:
                    break
                # choose k trees of size `part` with repetition, rest uses smaller parts
                total += math.comb(COUNTS[part - 1] + k - 1, k) * count(n - k * part, part - 1)
        return total

    for n in range(2, 13):
        assert sum(1 for _ in forest_parts(n)) == count(n, n)
