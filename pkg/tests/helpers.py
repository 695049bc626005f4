"""Small graph builders for the tests."""
from __future__ import annotations

from domgame.game_engine import B2, W, Color, GameState, Variant
from domgame.graph_core import Forest


def path(n: int) -> Forest:
    return Forest.from_edges([(2 * i, 2 * i + 2) for i in range(n - 1)], vertices=[0])


def star(leaves: int) -> Forest:
    return Forest.from_edges([(0, 2 * i) for i in range(1, leaves + 1)])


def spider(*legs: int) -> Forest:
    edges, nxt = [], 2
    for k in legs:
        prev = 0
        for _ in range(k):
            edges.append((prev, nxt))
            prev, nxt = nxt, nxt + 2
    return Forest.from_edges(edges)


def valued_state(g: Forest, kinds: dict, variant: Variant = Variant.DOMINATOR_START) -> GameState:
    """A game state whose underlying graph is ``g`` itself with the given kinds."""
    color = {v: Color.W if k == W else Color.B for v, k in kinds.items()}
    value = {v: 2 if k == B2 else 3 for v, k in kinds.items()}
    return GameState(g, g, color, value, variant)


def path_kinds(kinds: list[str]) -> tuple[Forest, dict]:
    g = path(len(kinds))
    return g, {2 * i: k for i, k in enumerate(kinds)}
