"""Triplet analysis and the dense graph (witness subtrees collapsed to virtual leaves)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .game_engine import W, Color, kind_of
from .graph_core import Forest


@dataclass(frozen=True)
class TripletAnalysis:
    wt2: frozenset
    tt: Mapping[int, int]  # triplet vertex -> depth
    pw: frozenset
    heads: frozenset
    witnesses: Mapping[int, tuple]

    @property
    def td_max(self) -> int:
        return max(self.tt.values(), default=0)


@dataclass(frozen=True)
class DenseGraph:
    graph: Forest
    kinds: Mapping[int, str]
    virtual_of: Mapping[int, int]
    removed: Mapping[int, frozenset]
    triplets: TripletAnalysis
    source: Forest = field(repr=False)

    @property
    def virtual(self) -> frozenset:
        return frozenset(self.virtual_of.values())

    def real_vertices(self) -> list[int]:
        virt = self.virtual
        return sorted(v for v in self.graph.vertices if v not in virt)


def _white_tail2(adj: Mapping, kinds: Mapping) -> set:
    out = set()
    for x, ns in adj.items():
        if len(ns) != 2 or kinds[x] != W:
            continue
        a, b = ns
        for leaf, anchor in ((a, b), (b, a)):
            if len(adj[leaf]) == 1 and kinds[leaf] == W and len(adj[anchor]) > 2:
                out.add(x)
    return out


def triplets_of(adj: Mapping, kinds: Mapping) -> TripletAnalysis:
    wt2 = _white_tail2(adj, kinds)
    tt: dict = {}
    witnesses: dict = {}
    pw = set(wt2)
    depth = 1
    while True:
        depth += 1
        new = [v for v in adj if v not in tt and sum(1 for w in adj[v] if w in pw) >= 3]
        if not new:
            break
        for v in new:
            tt[v] = depth
        for v in sorted(new):
            pool = [w for w in adj[v] if w in pw]
            # tail leads first, then shallower triplet vertices, then higher label
            pool.sort(key=lambda w: (w not in wt2, tt.get(w, 0), -w))
            witnesses[v] = tuple(pool[:3])
        pw = {v for v in tt if kinds[v] == W and len(adj[v]) == 4} | wt2
    chosen = {w for ws in witnesses.values() for w in ws}
    heads = frozenset(v for v in tt if v not in chosen)
    return TripletAnalysis(frozenset(wt2), tt, frozenset(pw), heads, witnesses)


def densify_adj(adj: Mapping, kinds: Mapping, virtual_label=lambda h: h + 1):
    """Dense adjacency, kinds, virtual map, removed map and the triplet analysis."""
    ta = triplets_of(adj, kinds)
    if not ta.heads:
        return adj, kinds, {}, {}, ta
    new_adj = {v: set(ns) for v, ns in adj.items()}
    new_kinds = dict(kinds)
    virtual_of, removed = {}, {}
    for h in sorted(ta.heads):
        gone: set = set()
        for w in ta.witnesses[h]:
            stack = [w]
            seen = {h, w}
            while stack:
                x = stack.pop()
                gone.add(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        for x in gone:
            for y in new_adj.pop(x):
                if y in new_adj:
                    new_adj[y].discard(x)
            del new_kinds[x]
        z = virtual_label(h)
        new_adj[h].add(z)
        new_adj[z] = {h}
        new_kinds[z] = W
        virtual_of[h] = z
        removed[h] = frozenset(gone)
    return new_adj, new_kinds, virtual_of, removed, ta


def white_tail2_leads(g: Forest, colors: Mapping[int, Color]) -> frozenset:
    white = {v: (W if colors[v] is Color.W else "B") for v in g.vertices}
    return frozenset(_white_tail2(g.adj, white))


def compute_triplets(g: Forest, colors: Mapping[int, Color]) -> TripletAnalysis:
    white = {v: (W if colors[v] is Color.W else "B") for v in g.vertices}
    return triplets_of(g.adj, white)


def densify_kinds(g: Forest, kinds: Mapping[int, str]) -> DenseGraph:
    adj, dk, virtual_of, removed, ta = densify_adj(g.adj, kinds)
    return DenseGraph(Forest(adj) if virtual_of else g, dict(dk), virtual_of, removed, ta, g)


def densify(g: Forest, colors: Mapping[int, Color], values: Mapping[int, int]) -> DenseGraph:
    return densify_kinds(g, {v: kind_of(colors[v], values[v]) for v in g.vertices})


def lift_move(d: DenseGraph, v: int) -> int:
    """Underlying-graph vertex to play for a dense-graph move (the same label)."""
    if v in d.virtual or v not in d.graph:
        raise ValueError(f"{v} is not a real dense-graph vertex")
    return v
