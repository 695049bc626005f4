"""Labeled forests and the structural predicates the game analysis is built on.

Real vertices carry even labels; odd labels are reserved for the virtual
leaves that only ever appear in dense graphs.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Malformed graph input (unknown vertex, cycle, isolate, ...)."""


class Forest:
    """Immutable undirected forest.  ``adj`` maps every vertex to its neighbors."""

    __slots__ = ("_adj",)

    def __init__(self, adj: Mapping[int, Iterable[int]]):
        table = {v: frozenset(ns) for v, ns in adj.items()}
        n_edges = 0
        for v, ns in table.items():
            if v in ns:
                raise GraphError(f"self-loop at {v}")
            for w in ns:
                if w not in table or v not in table[w]:
                    raise GraphError(f"asymmetric or dangling edge {v}-{w}")
            n_edges += len(ns)
        n_edges //= 2
        if table and n_edges != len(table) - len(_components(table)):
            raise GraphError("graph contains a cycle")
        self._adj = table

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertices: Iterable[int] = ()) -> "Forest":
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if v in adj.setdefault(u, set()):
                raise GraphError(f"parallel edge {u}-{v}")
            adj[u].add(v)
            adj.setdefault(v, set()).add(u)
        return cls(adj)

    @property
    def adj(self) -> Mapping[int, frozenset[int]]:
        return self._adj

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self._adj)

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, w) for u, ns in self._adj.items() for w in ns if u < w)

    def subgraph(self, vs: Iterable[int]) -> "Forest":
        keep = set(vs)
        return Forest({v: self._adj[v] & keep for v in keep})

    def without_edges(self, edges: Iterable[tuple[int, int]]) -> "Forest":
        adj = {v: set(ns) for v, ns in self._adj.items()}
        for u, w in edges:
            adj[u].discard(w)
            adj[w].discard(u)
        return Forest(adj)

    def isolated(self) -> list[int]:
        return sorted(v for v, ns in self._adj.items() if not ns)

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Forest) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def __repr__(self) -> str:
        return f"Forest(n={len(self)}, edges={self.edges()})"


class ComponentKind(Enum):
    PATH = "path"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Tail:
    anchor: int
    path: tuple[int, ...]
    kind: str = "tail"  # or "subtail"

    def __len__(self) -> int:
        return len(self.path)

    @property
    def lead(self) -> int:
        return self.path[0]

    @property
    def leaf(self) -> int:
        return self.path[-1]


def _components(adj: Mapping) -> list[frozenset]:
    seen: set = set()
    out = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def closed_neighborhood(g: Forest, s: Iterable[int]) -> frozenset[int]:
    out: set[int] = set()
    for v in s:
        out.add(v)
        out |= g.neighbors(v)
    return frozenset(out)


def components(g: Forest) -> list[frozenset[int]]:
    """Maximal connected components, ordered by their minimum label."""
    return _components(g.adj)


def subtail_from(adj: Mapping, u, w) -> list | None:
    """Walk away from ``u`` through its neighbor ``w`` along degree-2 vertices.

    Returns the walked path if it ends in a leaf, else None.
    """
    path = [w]
    prev, cur = u, w
    while len(adj[cur]) == 2:
        a, b = adj[cur]
        nxt = b if a == prev else a
        path.append(nxt)
        prev, cur = cur, nxt
    return path if len(adj[cur]) == 1 else None


def subtails_of(g: Forest, v: int) -> list[Tail]:
    adj = g.adj
    out = []
    for w in sorted(g.neighbors(v)):
        p = subtail_from(adj, v, w)
        if p is not None:
            out.append(Tail(v, tuple(p), "subtail"))
    return out


def tails_of(g: Forest, v: int) -> list[Tail]:
    if g.degree(v) <= 2:
        return []
    return [Tail(t.anchor, t.path, "tail") for t in subtails_of(g, v)]


def split_vertices(g: Forest) -> frozenset[int]:
    return frozenset(v for v in g.vertices if len(tails_of(g, v)) >= 2)


def classify_component(g: Forest, c: Iterable[int]) -> ComponentKind:
    c = frozenset(c)
    if not c or not c <= g.vertices:
        raise GraphError("not a component of the graph")
    if closed_neighborhood(g, c) != c or len(_components(g.subgraph(c).adj)) != 1:
        raise GraphError("vertex set is not a maximal connected component")
    if max(g.degree(v) for v in c) <= 2:
        return ComponentKind.PATH
    return ComponentKind.COMPLEX


def leaf_distances(g: Forest) -> set[int]:
    """All pairwise distances between distinct leaves."""
    leaves = [v for v in g.vertices if g.degree(v) == 1]
    out: set[int] = set()
    for s in leaves:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in g.adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        out.update(d for v, d in dist.items() if v != s and len(g.adj[v]) == 1)
    return out


def no_leaves_at_distance_4(g: Forest) -> bool:
    return 4 not in leaf_distances(g)


# --- canonical forms of vertex-labelled trees --------------------------------

def tree_centers(adj: Mapping, verts: Sequence | None = None) -> list:
    verts = list(adj) if verts is None else list(verts)
    if len(verts) <= 2:
        return sorted(verts)
    deg = {v: len(adj[v]) for v in verts}
    layer = [v for v in verts if deg[v] <= 1]
    left = len(verts)
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def _rooted_codes(adj: Mapping, attr: Mapping, root) -> dict:
    parent = {root: None}
    order = [root]
    for v in order:
        for w in adj[v]:
            if w != parent[v]:
                parent[w] = v
                order.append(w)
    code: dict = {}
    for v in reversed(order):
        kids = sorted(code[w] for w in adj[v] if w != parent[v])
        code[v] = attr[v] + "(" + "".join(kids) + ")"
    return code


def canonical_form(adj: Mapping, attr: Mapping[Hashable, str]) -> tuple[str, list]:
    """Canonical string of a vertex-attributed tree plus a canonical vertex order.

    Two trees get the same string iff they are isomorphic respecting ``attr``.
    ``order[i]`` is the vertex placed at canonical position ``i`` (a preorder
    from the chosen center, children visited by ascending code), so relabelling
    by ``order`` yields the same adjacency for every isomorphic input.
    """
    best = None
    for c in tree_centers(adj):
        code = _rooted_codes(adj, attr, c)
        if best is None or code[c] < best[0]:
            best = (code[c], c, code)
    key, root, code = best
    order = []
    stack = [(root, None)]
    while stack:
        v, p = stack.pop()
        order.append(v)
        kids = sorted((w for w in adj[v] if w != p), key=code.__getitem__, reverse=True)
        stack.extend((w, v) for w in kids)
    return key, order
