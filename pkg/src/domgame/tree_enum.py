"""Enumeration of free trees (one per isomorphism class) and isolate-free forests.

Trees come from the constant-amortized-time successor rule of Wright,
Richmond, Odlyzko and McKay on level sequences.  The independent checks used
by the tests (Pruefer bucketing, Otter's counting formula, Cayley orbit sums) also live here.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .graph_core import Forest, _rooted_codes, canonical_form, tree_centers


@dataclass(frozen=True)
class CanonicalTree:
    level_sequence: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.level_sequence)

    def edges(self) -> list[tuple[int, int]]:
        """Edges over positions 0..n-1 of the level sequence."""
        last_at: dict[int, int] = {}
        out = []
        for i, lvl in enumerate(self.level_sequence):
            if lvl > 0:
                out.append((last_at[lvl - 1], i))
            last_at[lvl] = i
        return out

    def forest(self, offset: int = 0) -> Forest:
        """Decode with real labels 2*(offset+i)."""
        lab = lambda i: 2 * (offset + i)
        return Forest.from_edges(((lab(a), lab(b)) for a, b in self.edges()),
                                 vertices=(lab(i) for i in range(self.n)))


def _next_rooted(seq: list[int], p: int | None = None) -> list[int] | None:
    if p is None:
        p = len(seq) - 1
        while seq[p] == 1:
            p -= 1
    if p == 0:
        return None
    q = p - 1
    while seq[q] != seq[p] - 1:
        q -= 1
    out = list(seq)
    for i in range(p, len(out)):
        out[i] = out[i - p + q]
    return out


def _split(seq: list[int]) -> tuple[list[int], list[int]]:
    # left: the first principal subtree (re-rooted), rest: root plus the others
    m = len(seq)
    ones = 0
    for i, lvl in enumerate(seq):
        if lvl == 1:
            ones += 1
            if ones == 2:
                m = i
                break
    left = [lvl - 1 for lvl in seq[1:m]]
    rest = [0] + seq[m:]
    return left, rest


def _next_free(seq: list[int]) -> list[int]:
    left, rest = _split(seq)
    lh, rh = max(left), max(rest)
    ok = rh >= lh
    if ok and rh == lh:
        if len(left) > len(rest) or (len(left) == len(rest) and left > rest):
            ok = False
    if ok:
        return seq
    p = len(left)
    nxt = _next_rooted(seq, p)
    if seq[p] > 2:
        new_left, _ = _split(nxt)
        tail = list(range(1, max(new_left) + 2))
        nxt[-len(tail):] = tail
    return nxt


def trees(n: int) -> Iterator[CanonicalTree]:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= 3:
        yield CanonicalTree(tuple(range(n)) if n < 3 else (0, 1, 1))
        return
    seq: list[int] | None = list(range(n // 2 + 1)) + list(range(1, (n + 1) // 2))
    while seq is not None:
        seq = _next_free(seq)
        if seq is None:
            break
        yield CanonicalTree(tuple(seq))
        seq = _next_rooted(seq)


def _partitions(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    """Partitions of n into parts in [2, largest], non-increasing."""
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 1, -1):
        for rest in _partitions(n - part, part):
            yield (part,) + rest


@lru_cache(maxsize=None)
def _tree_list(n: int) -> tuple[CanonicalTree, ...]:
    return tuple(trees(n))


def forest_parts(n: int) -> Iterator[tuple[CanonicalTree, ...]]:
    """Isolate-free forests as non-increasing tuples of tree components."""
    if n < 2:
        raise ValueError("n must be >= 2")
    for part in _partitions(n, n):
        groups = [(size, len(list(g))) for size, g in itertools.groupby(part)]
        choices = [itertools.combinations_with_replacement(range(len(_tree_list(size))), k)
                   for size, k in groups]
        for pick in itertools.product(*choices):
            comps: list[CanonicalTree] = []
            for (size, _), idxs in zip(groups, pick):
                comps.extend(_tree_list(size)[i] for i in idxs)
            yield tuple(comps)


def assemble(parts: tuple[CanonicalTree, ...]) -> Forest:
    adj: dict[int, frozenset[int]] = {}
    offset = 0
    for t in parts:
        adj.update(t.forest(offset).adj)
        offset += t.n
    return Forest(adj)


def forests(n: int) -> Iterator[Forest]:
    for parts in forest_parts(n):
        yield assemble(parts)


def forest_id(parts: tuple[CanonicalTree, ...]) -> str:
    return "+".join("".join(str(x) for x in t.level_sequence) if t.n < 10
                    else ".".join(str(x) for x in t.level_sequence) for t in parts)


# --- independent counting oracles --------------------------------------------

def prufer_class_count(n: int, leaves_last: bool = True) -> int:
    """Number of isomorphism classes among labelled trees on n vertices.

    With ``leaves_last`` only labellings whose leaves carry the largest labels
    are decoded: every class has such a labelling, and their Pruefer sequences
    are exactly the sequences using every internal label at least once.
    """
    if n <= 2:
        return 1
    seen = set()
    if not leaves_last:
        seqs = itertools.product(range(n), repeat=n - 2)
    else:
        seqs = (seq for internal in range(1, n - 1) for seq in _onto(n - 2, internal))
    for seq in seqs:
        seen.add(canonical_form(_prufer_adj(seq, n), _BLANK)[0])
    return len(seen)


def _onto(length: int, m: int) -> Iterator[tuple[int, ...]]:
    """Sequences over range(m) of the given length that use every symbol."""
    seq = [0] * length
    used = [0] * m

    def rec(i, missing):
        if length - i < missing:
            return
        if i == length:
            yield tuple(seq)
            return
        for x in range(m):
            seq[i] = x
            used[x] += 1
            yield from rec(i + 1, missing - (used[x] == 1))
            used[x] -= 1

    yield from rec(0, m)


class _Blank(dict):
    def __missing__(self, key):
        return ""


_BLANK = _Blank()


def _prufer_adj(seq: tuple[int, ...], n: int) -> dict[int, list[int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        adj[leaf].append(x)
        adj[x].append(leaf)
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = (i for i in range(n) if degree[i] == 1)
    adj[u].append(w)
    adj[w].append(u)
    return adj


def otter_counts(max_n: int) -> list[int]:
    """Free-tree counts for n = 1..max_n via Otter's formula."""
    r = [0, 1]  # rooted trees
    for m in range(1, max_n):
        s = 0
        for k in range(1, m + 1):
            s += sum(d * r[d] for d in range(1, k + 1) if k % d == 0) * r[m - k + 1]
        r.append(s // m)
    out = []
    for n in range(1, max_n + 1):
        pairs = sum(r[i] * r[n - i] for i in range(1, n))
        if n % 2 == 0:
            pairs -= r[n // 2]
        out.append(r[n] - pairs // 2)
    return out


def automorphism_count(t: CanonicalTree) -> int:
    """|Aut(T)| from rooted codes at the center(s)."""
    adj = t.forest().adj
    blank = _BLANK
    centers = tree_centers(adj)

    def rooted(root, banned=None) -> tuple[int, str]:
        code = _rooted_codes({v: [w for w in ns if w != banned] for v, ns in adj.items()}
                             if banned is not None else adj, blank, root)
        parent = {root: None}
        order = [root]
        for v in order:
            for w in adj[v]:
                if w != parent[v] and w != banned:
                    parent[w] = v
                    order.append(w)
        total = 1
        for v in order:
            kids = Counter(code[w] for w in adj[v] if w != parent[v] and w != banned)
            for k in kids.values():
                total *= math.factorial(k)
        return total, code[root]

    if len(centers) == 1:
        return rooted(centers[0])[0]
    a, b = centers
    na, ca = rooted(a, b)
    nb, cb = rooted(b, a)
    return na * nb * (2 if ca == cb else 1)


def cayley_sum(n: int) -> int:
    """Sum of n!/|Aut(T)| over the enumerated classes; equals n**(n-2) iff complete."""
    return sum(math.factorial(n) // automorphism_count(t) for t in trees(n))
