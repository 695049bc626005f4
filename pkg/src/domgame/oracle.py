"""Exact game domination numbers by minimax over dominated-vertex bitmasks."""
from __future__ import annotations

from .game_engine import Variant, t_max
from .graph_core import Forest

DEFAULT_CAP = 16


class CapacityError(ValueError):
    pass


def _masks(g: Forest, cap: int) -> tuple[list[int], int]:
    verts = sorted(g.vertices)
    if len(verts) > cap:
        raise CapacityError(f"n={len(verts)} exceeds oracle cap {cap}")
    if g.isolated():
        raise ValueError("oracle needs an isolate-free forest")
    idx = {v: i for i, v in enumerate(verts)}
    nbs = []
    for v in verts:
        m = 1 << idx[v]
        for w in g.neighbors(v):
            m |= 1 << idx[w]
        nbs.append(m)
    return nbs, (1 << len(verts)) - 1


def gamma(g: Forest, variant: Variant, cap: int = DEFAULT_CAP) -> int:
    """Length of the game under optimal play (Dominator minimizes, Staller maximizes)."""
    nbs, full = _masks(g, cap)
    memo: dict[tuple[int, bool], int] = {}

    def value(dom: int, dominator: bool) -> int:
        key = (dom, dominator)
        hit = memo.get(key)
        if hit is not None:
            return hit
        succ = {dom | m for m in nbs if m & ~dom}
        best = None
        for nxt in succ:
            r = 1 if nxt == full else 1 + value(nxt, not dominator)
            if best is None or (r < best if dominator else r > best):
                best = r
        memo[key] = best
        return best

    return value(0, variant is Variant.DOMINATOR_START)


def gamma_plain(g: Forest, variant: Variant, cap: int = 10) -> int:
    """Same value without a transposition table; exponential, for cross-checks only."""
    nbs, full = _masks(g, cap)

    def value(dom: int, dominator: bool) -> int:
        results = []
        for m in nbs:
            if m & ~dom:
                nxt = dom | m
                results.append(1 if nxt == full else 1 + value(nxt, not dominator))
        return min(results) if dominator else max(results)

    return value(0, variant is Variant.DOMINATOR_START)


def verify_bound(g: Forest, variant: Variant, cap: int = DEFAULT_CAP) -> bool:
    return gamma(g, variant, cap) <= t_max(len(g), variant)
