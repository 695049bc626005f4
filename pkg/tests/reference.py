"""Slow reference implementations shared by the tests."""
from __future__ import annotations

from domgame.boxes import _restrict_dense, find_decomposition, is_semi_corrupted
from domgame.densify import densify
from domgame.game_engine import (GameState, Player, candidate_moves, is_terminal, legal_moves,
                                 recolor)
from domgame.graph_core import components


def state_status(s: GameState) -> str:
    """'clean', 'semi' (exactly one semi-corrupted component) or 'bad'."""
    d = densify(s.underlying, s.color, s.value)
    if find_decomposition(d, 0) is not None:
        return "clean"
    bad = []
    for comp in components(d.graph):
        sub = _restrict_dense(d, comp)
        if find_decomposition(sub, 0) is None:
            bad.append(comp)
    if len(bad) != 1 or find_decomposition(_restrict_dense(d, bad[0]), 1) is None:
        return "bad"
    real = {v for v in bad[0] if v not in d.virtual}
    return "semi" if is_semi_corrupted(s, real) else "bad"


def best_gain(s: GameState, v: int, allow_semi: bool) -> int | None:
    """Largest gain of a move ``v`` whose successor is good, by brute force."""
    best = None
    for c in candidate_moves(s, v):
        if best is not None and c.gain <= best:
            continue
        nxt = GameState(s.original, c.new_underlying, recolor(s, v), {**{u: 0 for u in s.original.vertices},
                        **c.new_values}, s.variant, s.history)
        st = state_status(nxt)
        if st == "clean" or (allow_semi and st == "semi"):
            best = c.gain
    return best


def count_lines(s: GameState, dominator_move, staller_update) -> int:
    """Number of complete games when Staller tries every legal move."""
    if is_terminal(s):
        return 1
    if s.turn is Player.DOMINATOR:
        return count_lines(dominator_move(s), dominator_move, staller_update)
    return sum(count_lines(staller_update(s, u), dominator_move, staller_update)
               for u in sorted(legal_moves(s)))
