"""Box classification, decomposition search, goodness and special subtrees."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .densify import DenseGraph, triplets_of
from .game_engine import B2, B3, W
from .graph_core import Forest, subtail_from


class BoxType(Enum):
    R1 = "R1"
    R2 = "R2"
    R3_C12 = "C12"
    R4 = "R4"
    D1 = "D1"
    D2 = "D2"
    HIGH_LEFTOVER = "HL"
    CORRUPTED = "X"

    @property
    def regular(self) -> bool:
        return self in REGULAR


REGULAR = frozenset({BoxType.R1, BoxType.R2, BoxType.R3_C12, BoxType.R4})
DISPENSIBLE = frozenset({BoxType.D1, BoxType.D2})


class Phase(Enum):
    """Who moves next.  Before Dominator moves one semi-corrupted box is tolerated."""
    DOMINATOR_NEXT = "dominator-next"
    STALLER_NEXT = "staller-next"


class NotABox(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    vertices: frozenset
    root: int | None
    btype: BoxType


@dataclass(frozen=True)
class BoxDecomposition:
    boxes: tuple[Box, ...]
    # box index -> (parent box index, parent vertex), absent for root boxes
    parent: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def corrupted(self) -> int:
        return sum(1 for b in self.boxes if b.btype is BoxType.CORRUPTED)

    def root_boxes(self) -> list[Box]:
        return [b for i, b in enumerate(self.boxes) if i not in self.parent]

    def box_of(self, v: int) -> Box:
        for b in self.boxes:
            if v in b.vertices:
                return b
        raise KeyError(v)


@dataclass(frozen=True)
class SpecialSubtree:
    kind: str  # "fix", "strong-fix", "semi-triplet", "strong-semi-triplet"
    root: int
    tails: tuple[tuple[int, ...], ...]
    b3_leaf: bool = False


def _high(k: str) -> bool:
    return k != B2


# --- shape predicates on a box (internal adjacency ``ia``) --------------------

def _internal(adj: Mapping, vs: Iterable) -> dict:
    vs = frozenset(vs)
    return {v: tuple(w for w in adj[v] if w in vs) for v in vs}


def _subtails(ia: Mapping, u) -> list[list]:
    out = []
    for w in ia[u]:
        p = subtail_from(ia, u, w)
        if p is not None:
            out.append(p)
    return out


def _all(kinds, path, pred) -> bool:
    return all(pred(kinds[x]) for x in path)


def _is_d1(ia, kinds, root) -> bool:
    if len(ia) != 3 or kinds[root] != B2 or len(ia[root]) != 1:
        return False
    return len(ia[ia[root][0]]) == 2 and all(_high(kinds[x]) for x in ia if x != root)


def _form(kinds, path, pattern) -> bool:
    """``pattern`` letters: H high, W white, 2 worth-2 blue."""
    if len(path) != len(pattern):
        return False
    for x, c in zip(path, pattern):
        k = kinds[x]
        if (c == "H" and k == B2) or (c == "W" and k != W) or (c == "2" and k != B2):
            return False
    return True


def _is_d2(ia, kinds, root) -> bool:
    if len(ia) != 8 or kinds[root] != B2 or len(ia[root]) != 2:
        return False
    for a, u in (ia[root], ia[root][::-1]):
        st = subtail_from(ia, root, a)
        if st is None or not _form(kinds, st, "HH"):
            continue
        if len(ia[u]) == 3:
            x, y = (w for w in ia[u] if w != root)
            for lam, u2 in ((x, y), (y, x)):
                if len(ia[lam]) == 1 and _high(kinds[lam]) and len(ia[u2]) == 2:
                    t = subtail_from(ia, u, u2)
                    if t is not None and _form(kinds, t, "2HH"):
                        return True
        elif len(ia[u]) == 2:
            t = subtail_from(ia, root, u)
            if t is not None and _form(kinds, t, "HH2HH"):
                return True
    return False


def _white_subtail_short(kinds, st) -> bool:
    return len(st) <= 2 and _all(kinds, st, lambda k: k == W)


def _p1(ia, kinds, b2s) -> bool:
    if len(b2s) != 1:
        return False
    (v,) = b2s
    if len(ia[v]) == 1:
        if len(ia) == 3:  # (c)
            return True
        # (a): walk inward; every vertex on the way can serve as u
        prev, u = v, ia[v][0]
        while True:
            sts = _subtails(ia, u)
            if v in (st[-1] for st in sts):
                if not any(_white_subtail_short(kinds, st) for st in sts) and any(
                        len(st) >= 3 and v not in st and _all(kinds, st, _high) for st in sts):
                    return True
            if len(ia[u]) != 2:
                break
            a, b = ia[u]
            prev, u = u, (b if a == prev else a)
    # (b)
    if all(len(ia[w]) != 1 for w in ia[v]):
        if any(len(st) >= 3 and _all(kinds, st, _high) for st in _subtails(ia, v)):
            return True
    return False


def _p2(ia, kinds, b2s) -> bool:
    if len(b2s) != 2:
        return False
    x, y = b2s
    pairs = [(a, b) for a, b in ((x, y), (y, x)) if len(ia[a]) <= len(ia[b])]
    if len(ia[x]) == 1 and len(ia[y]) == 1:  # (a)
        for u in ia:
            if u in b2s:
                continue
            ends = {st[-1] for st in _subtails(ia, u)}
            if x in ends and y in ends and not any(
                    len(ia[w]) == 1 and kinds[w] == W for w in ia[u]):
                return True
    for v1, v2 in pairs:  # (b)
        if len(ia[v1]) == 1 and not any(len(ia[w]) == 1 for w in ia[v2]):
            if any(st[-1] == v1 for st in _subtails(ia, v2)):
                return True
    return False


def _tails(ia, u) -> list[list]:
    return _subtails(ia, u) if len(ia[u]) > 2 else []


def _is_c12(ia, kinds) -> bool:
    if len(ia) != 12:
        return False
    for s in ia:
        if not _high(kinds[s]) or len(ia[s]) < 3:
            continue
        ts = _tails(ia, s)
        # F2: exactly four tails covering the box
        if len(ts) == 4 and len(ia[s]) == 4:
            if (sum(1 for t in ts if _form(kinds, t, "HH")) == 2
                    and sum(1 for t in ts if _form(kinds, t, "2W")) == 1
                    and sum(1 for t in ts if _form(kinds, t, "HH2HH")) == 1):
                return True
        # F1: s plays v1, its non-tail neighbor plays v2
        if len(ia[s]) == 4 and len(ts) == 3:
            tail_leads = {t[0] for t in ts}
            (v2,) = [w for w in ia[s] if w not in tail_leads]
            if not (sum(1 for t in ts if _form(kinds, t, "2W")) == 1
                    and sum(1 for t in ts if _form(kinds, t, "HH")) == 2):
                continue
            if not _high(kinds[v2]) or len(ia[v2]) != 3:
                continue
            t2 = _tails(ia, v2)
            if (len(t2) == 2 and sum(1 for t in t2 if len(t) == 1 and _high(kinds[t[0]])) == 1
                    and sum(1 for t in t2 if _form(kinds, t, "2HH")) == 1):
                return True
    return False


def _p0(ia, kinds, pw, low_parents) -> bool:
    ta = triplets_of(ia, kinds)
    for v, depth in ta.tt.items():
        if depth != 2:
            continue
        bad = []
        for x in ia[v]:
            if x not in ta.wt2:
                continue
            (y,) = (w for w in ia[x] if w != v)
            if x not in low_parents and y not in low_parents:
                bad.append(x)
        if len(bad) >= 3 and any(x not in pw for x in bad):
            return False
    return True


def _no_triplets(ia, kinds) -> bool:
    return not triplets_of(ia, kinds).tt


def _rootless_types(ia, kinds, pw, low_parents) -> set:
    n = len(ia)
    b2s = [v for v in ia if kinds[v] == B2]
    if len(b2s) > 2:
        return set()
    if n == 2:
        return {BoxType.R1}
    if n < 2:
        return set()
    out = set()
    if not b2s:
        if _p0(ia, kinds, pw, low_parents):
            out.add(BoxType.R2)
        return out
    if _is_c12(ia, kinds):
        out.add(BoxType.R3_C12)
    if (_p1(ia, kinds, b2s) or _p2(ia, kinds, b2s)) and _p0(ia, kinds, pw, low_parents):
        out.add(BoxType.R4)
    return out


def _rooted_types(ia, kinds, root) -> set | None:
    """Non-regular types for a box with the given root; None if not a box at all."""
    if kinds[root] == W or sum(1 for v in ia if kinds[v] == B2) > 2:
        return None
    if any(len(ia[w]) == 1 and kinds[w] == W for w in ia[root]):
        return None
    out = {BoxType.CORRUPTED}
    if _is_d1(ia, kinds, root):
        out.add(BoxType.D1)
    elif _is_d2(ia, kinds, root):
        out.add(BoxType.D2)
    if all(_high(kinds[v]) for v in ia) and _no_triplets(ia, kinds):
        out.add(BoxType.HIGH_LEFTOVER)
    return out


def classify_box(d: DenseGraph, vs: Iterable[int], root: int | None = None,
                 low_parents: Iterable[int] = ()) -> set[BoxType]:
    """Every type the vertex set satisfies (with ``root`` if given).

    A non-corrupted type always wins over CORRUPTED, which is only reported
    when nothing else applies.  ``low_parents`` are the box vertices that
    parent a box whose root has internal degree at most one.
    """
    vs = frozenset(vs)
    ia = _internal(d.graph.adj, vs)
    kinds = d.kinds
    if sum(1 for v in vs if kinds[v] == B2) > 2:
        raise NotABox("more than two vertices worth 2")
    out = _rootless_types(ia, kinds, d.triplets.pw, frozenset(low_parents))
    if root is not None:
        if root not in vs:
            raise NotABox("root outside the box")
        rooted = _rooted_types(ia, kinds, root)
        if rooted is None:
            raise NotABox("root is white or next to a white leaf")
        out |= rooted
        if len(out) > 1:
            out.discard(BoxType.CORRUPTED)
    elif not out:
        raise NotABox("rootless box that is not regular")
    return out


def check_P0(d: DenseGraph, box: Box, decomposition: BoxDecomposition | None = None) -> bool:
    ia = _internal(d.graph.adj, box.vertices)
    low = _low_parents(d.graph.adj, decomposition, box) if decomposition else frozenset()
    return _p0(ia, d.kinds, d.triplets.pw, low)


def _low_parents(adj, dec: BoxDecomposition, box: Box) -> frozenset:
    idx = dec.boxes.index(box)
    out = set()
    for ci, (pi, pv) in dec.parent.items():
        if pi == idx:
            child = dec.boxes[ci]
            if sum(1 for w in adj[child.root] if w in child.vertices) <= 1:
                out.add(pv)
    return frozenset(out)


# --- decomposition search ------------------------------------------------------

class _Search:
    """Exhaustive search over one connected dense component."""

    def __init__(self, adj: Mapping, kinds: Mapping, pw: frozenset,
                 forbidden_roots: frozenset = frozenset()):
        self.adj = adj
        self.kinds = kinds
        self.pw = pw
        self.forbidden = forbidden_roots
        self.verts = sorted(adj)
        self.blue = {v for v in self.verts if kinds[v] != W}
        self.edges = sorted((u, w) for u in self.verts for w in adj[u] if u < w)
        self.cuttable = [e for e in self.edges
                         if (e[0] in self.blue and e[0] not in self.forbidden)
                         or (e[1] in self.blue and e[1] not in self.forbidden)]
        self.n_b2 = sum(1 for v in self.verts if kinds[v] == B2)
        self._rooted: dict = {}
        self._rootless: dict = {}
        self._ia: dict = {}

    def ia(self, piece: frozenset) -> dict:
        r = self._ia.get(piece)
        if r is None:
            r = self._ia[piece] = _internal(self.adj, piece)
        return r

    def rooted(self, piece, root):
        key = (piece, root)
        if key not in self._rooted:
            self._rooted[key] = _rooted_types(self.ia(piece), self.kinds, root)
        return self._rooted[key]

    def rootless(self, piece, low):
        key = (piece, low)
        if key not in self._rootless:
            self._rootless[key] = _rootless_types(self.ia(piece), self.kinds, self.pw, low)
        return self._rootless[key]

    def run(self, max_corrupted: int):
        lo = max(0, (self.n_b2 + 1) // 2 - 1)
        for k in range(lo, len(self.cuttable) + 1):
            for cut in itertools.combinations(self.cuttable, k):
                dec = self.try_cut(cut, max_corrupted)
                if dec is not None:
                    return dec
        return None

    def try_cut(self, cut, max_corrupted):
        kinds, blue, forbidden = self.kinds, self.blue, self.forbidden
        cutdeg: dict = {}
        for a, b in cut:
            cutdeg[a] = cutdeg.get(a, 0) + 1
            cutdeg[b] = cutdeg.get(b, 0) + 1

        def can_root(x):
            return x in blue and cutdeg.get(x, 0) == 1 and x not in forbidden

        for a, b in cut:
            if not (can_root(a) or can_root(b)):
                return None
        cutset = set(cut) | {(b, a) for a, b in cut}
        piece_of: dict = {}
        pieces: list[frozenset] = []
        for s in self.verts:
            if s in piece_of:
                continue
            comp = [s]
            piece_of[s] = len(pieces)
            for v in comp:
                for w in self.adj[v]:
                    if w not in piece_of and (v, w) not in cutset:
                        piece_of[w] = len(pieces)
                        comp.append(w)
            pieces.append(frozenset(comp))
        for p in pieces:
            if sum(1 for v in p if kinds[v] == B2) > 2:
                return None
        links: dict = {i: [] for i in range(len(pieces))}
        for a, b in cut:
            links[piece_of[a]].append((a, b))
            links[piece_of[b]].append((b, a))
        for ri in range(len(pieces)):
            dec = self.orient(pieces, piece_of, links, ri, cutdeg, can_root, max_corrupted)
            if dec is not None:
                return dec
        return None

    def orient(self, pieces, piece_of, links, ri, cutdeg, can_root, max_corrupted):
        kinds = self.kinds
        # parent[i] = (parent piece, own root, parent vertex)
        parent: dict = {}
        order = [ri]
        for pi in order:
            for mine, other in links[pi]:
                oi = piece_of[other]
                if oi in parent or oi == ri:
                    continue
                if not can_root(other):
                    return None
                parent[oi] = (pi, other, mine)
                order.append(oi)
        has_child = {pi for pi, _, _ in parent.values()}
        if any(len(pieces[i]) < 3 for i in has_child):
            return None
        is_high = [all(kinds[v] != B2 for v in p) for p in pieces]
        types: dict = {}
        corrupted = 0
        for ci, (pi, r, _) in parent.items():
            ts = self.rooted(pieces[ci], r)
            if ts is None:
                return None
            if BoxType.D1 in ts:
                t = BoxType.D1
            elif BoxType.D2 in ts:
                t = BoxType.D2
            elif BoxType.HIGH_LEFTOVER in ts and not is_high[pi]:
                t = BoxType.HIGH_LEFTOVER
            else:
                t = BoxType.CORRUPTED
                corrupted += 1
                if corrupted > max_corrupted:
                    return None
            types[ci] = t
        root_piece = pieces[ri]
        low = frozenset(pv for ci, (pi, r, pv) in parent.items()
                        if pi == ri and sum(1 for w in self.adj[r] if w in pieces[ci]) <= 1)
        root_choice = None
        reg = self.rootless(root_piece, low)
        if reg:
            root_choice = (None, min(reg, key=lambda t: t.value))
        else:
            fallback = None
            for r in sorted(root_piece):
                if r not in self.blue or cutdeg.get(r, 0) or r in self.forbidden:
                    continue
                ts = self.rooted(root_piece, r)
                if ts is None:
                    continue
                for t in (BoxType.D1, BoxType.D2, BoxType.HIGH_LEFTOVER):
                    if t in ts:
                        root_choice = (r, t)
                        break
                if root_choice:
                    break
                if fallback is None:
                    fallback = (r, BoxType.CORRUPTED)
            if root_choice is None:
                if fallback is None or corrupted + 1 > max_corrupted:
                    return None
                root_choice = fallback
        boxes = []
        index = {}
        for i in order:
            index[i] = len(boxes)
            if i == ri:
                boxes.append(Box(root_piece, root_choice[0], root_choice[1]))
            else:
                boxes.append(Box(pieces[i], parent[i][1], types[i]))
        par = {index[ci]: (index[pi], pv) for ci, (pi, _, pv) in parent.items()}
        return BoxDecomposition(tuple(boxes), par)


def decompose_component(adj: Mapping, kinds: Mapping, pw: frozenset, max_corrupted: int,
                        forbidden_roots: Iterable = ()) -> BoxDecomposition | None:
    return _Search(adj, kinds, pw, frozenset(forbidden_roots)).run(max_corrupted)


def _dense_components(d: DenseGraph) -> list[frozenset]:
    from .graph_core import components
    return components(d.graph)


def find_decomposition(d: DenseGraph, allow_corrupted: int = 0,
                       forbidden_roots: Iterable = ()) -> BoxDecomposition | None:
    """First valid decomposition of the whole dense graph with at most
    ``allow_corrupted`` corrupted boxes, or None."""
    forbidden = frozenset(forbidden_roots)
    adj = d.graph.adj
    found = []
    budget = allow_corrupted
    comps = _dense_components(d)
    # components without any clean decomposition must absorb the corruption budget
    per = []
    for c in comps:
        sub = {v: adj[v] for v in c}
        dec = decompose_component(sub, d.kinds, d.triplets.pw, 0, forbidden)
        per.append((c, sub, dec))
    for c, sub, dec in per:
        if dec is None:
            if budget == 0:
                return None
            dec = decompose_component(sub, d.kinds, d.triplets.pw, budget, forbidden)
            if dec is None:
                return None
            budget -= dec.corrupted
        found.append(dec)
    return merge_decompositions(found)


def merge_decompositions(parts: list[BoxDecomposition]) -> BoxDecomposition:
    boxes: list[Box] = []
    parent: dict = {}
    for dec in parts:
        off = len(boxes)
        boxes.extend(dec.boxes)
        for ci, (pi, pv) in dec.parent.items():
            parent[ci + off] = (pi + off, pv)
    return BoxDecomposition(tuple(boxes), parent)


# --- independent validity checker ---------------------------------------------

def check_decomposition(d: DenseGraph, dec: BoxDecomposition, max_corrupted: int = 1) -> list[str]:
    """Re-derive every decomposition property from scratch; returns the violations."""
    adj, kinds = d.graph.adj, d.kinds
    errs = []
    seen: dict = {}
    for i, b in enumerate(dec.boxes):
        for v in b.vertices:
            if v in seen:
                errs.append(f"vertex {v} in two boxes")
            seen[v] = i
    if set(seen) != set(d.graph.vertices):
        errs.append("boxes do not cover the dense graph")
        return errs
    comp_of = {}
    for ci, c in enumerate(_dense_components(d)):
        for v in c:
            comp_of[v] = ci
    regular_per_comp: dict = {}
    for i, b in enumerate(dec.boxes):
        ia = _internal(adj, b.vertices)
        start = next(iter(b.vertices))
        reach = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in ia[x]:
                if y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != set(b.vertices):
            errs.append(f"box {i} not connected")
        if sum(1 for v in b.vertices if kinds[v] == B2) > 2:
            errs.append(f"box {i} has more than two vertices worth 2")
        if b.btype.regular:
            if b.root is not None:
                errs.append(f"regular box {i} has a root")
            c = comp_of[start]
            regular_per_comp[c] = regular_per_comp.get(c, 0) + 1
        else:
            r = b.root
            if r is None or r not in b.vertices or kinds[r] == W:
                errs.append(f"box {i} lacks a blue root")
                continue
            if any(len(ia[w]) == 1 and kinds[w] == W for w in ia[r]):
                errs.append(f"root of box {i} has a white leaf neighbor")
            outside = [w for w in adj[r] if w not in b.vertices]
            if len(outside) > 1:
                errs.append(f"root of box {i} has several outside neighbors")  # A3
            if outside:
                p = outside[0]
                pb = dec.boxes[seen[p]]
                if pb.root == p:
                    errs.append(f"parent of box {i} is itself a root")
                if dec.parent.get(i) != (seen[p], p):
                    errs.append(f"parent map wrong for box {i}")
            elif i in dec.parent:
                errs.append(f"box {i} has a parent entry without an external edge")
    if any(k > 1 for k in regular_per_comp.values()):
        errs.append("component with two regular boxes")  # A1
    if dec.corrupted > max_corrupted:
        errs.append("too many corrupted boxes")  # A2
    for ci, (pi, pv) in dec.parent.items():
        pb = dec.boxes[pi]
        if len(pb.vertices) < 3:
            errs.append(f"parent box {pi} smaller than 3")  # A4
        if dec.boxes[ci].btype is BoxType.HIGH_LEFTOVER and all(kinds[v] != B2 for v in pb.vertices):
            errs.append(f"high leftover box {ci} has a high parent")  # A5
    for u, w in d.graph.edges():
        bu, bw = seen[u], seen[w]
        if bu == bw:
            continue
        ok = (dec.parent.get(bu) == (bw, w) and dec.boxes[bu].root == u) or \
             (dec.parent.get(bw) == (bu, u) and dec.boxes[bw].root == w)
        if not ok:
            errs.append(f"external edge {u}-{w} is not root-to-parent")  # A6
    # the recorded types must hold
    for i, b in enumerate(dec.boxes):
        if b.btype is BoxType.CORRUPTED:
            continue
        low = _low_parents(adj, dec, b)
        try:
            ts = classify_box(d, b.vertices, b.root, low)
        except NotABox as e:
            errs.append(f"box {i}: {e}")
            continue
        if b.btype not in ts:
            errs.append(f"box {i} is not of type {b.btype.value}")
        if b.btype is BoxType.HIGH_LEFTOVER and b.root is None:
            errs.append(f"high leftover box {i} without root")
    return errs


# --- goodness --------------------------------------------------------------

def is_clean(d: DenseGraph) -> bool:
    return find_decomposition(d, 0) is not None


def is_good(d: DenseGraph, phase: Phase, state=None) -> bool:
    """Goodness of a dense graph.

    With Staller to move a corruption-free decomposition is required.  With
    Dominator to move one corrupted box is tolerated when its component is
    semi-corrupted; that check needs the game ``state`` the graph came from.
    """
    if find_decomposition(d, 0) is not None:
        return True
    if phase is Phase.STALLER_NEXT:
        return False
    dec = find_decomposition(d, 1)
    if dec is None or state is None:
        return False
    bad = next(b for b in dec.boxes if b.btype is BoxType.CORRUPTED)
    from .graph_core import components
    comp = next(c for c in components(d.graph) if bad.vertices & c)
    return is_semi_corrupted(state, comp)


def is_semi_corrupted(s, component: Iterable[int]) -> bool:
    """Reference check: enumerate every option of every real move in the component."""
    from .densify import densify
    from .game_engine import candidate_moves, recolor
    from .graph_core import components

    component = frozenset(component)
    d = densify(s.underlying, s.color, s.value)
    if find_decomposition(_restrict_dense(d, component), 0) is not None:
        return False
    real = sorted(v for v in component if v not in d.virtual)
    under = next(c for c in components(s.underlying) if real[0] in c)
    for v in real:
        colors = recolor(s, v)
        for c in candidate_moves(s, v):
            if c.gain < 8:
                continue
            nd = densify(c.new_underlying, colors, c.new_values)
            keep = {x for x in nd.graph.vertices if x in under}
            keep |= {z for h, z in nd.virtual_of.items() if h in under}
            if find_decomposition(_restrict_dense(nd, keep), 0) is not None:
                return True
    return False


def _restrict_dense(d: DenseGraph, vs: Iterable[int]) -> DenseGraph:
    vs = frozenset(vs)
    g = d.graph.subgraph(vs)
    return DenseGraph(g, {v: d.kinds[v] for v in vs}, {h: z for h, z in d.virtual_of.items() if h in vs},
                      {h: r for h, r in d.removed.items() if h in vs}, d.triplets, d.source)


# --- special subtrees --------------------------------------------------------

def _high_tails2(adj, kinds, u) -> list[tuple]:
    out = []
    if len(adj[u]) <= 2:
        return out
    for w in sorted(adj[u]):
        st = subtail_from(adj, u, w)
        if st is not None and len(st) == 2 and _all(kinds, st, _high):
            out.append(tuple(st))
    return out


def _strong(adj, kinds, u, used: set) -> bool:
    extra = [w for w in adj[u] if w not in used and kinds[w] == W]
    if len(extra) > 1:
        return False
    for w in extra:
        st = subtail_from(adj, u, w)
        if st is not None and len(st) <= 2 and _all(kinds, st, lambda k: k == W):
            return False
    return True


def special_subtrees(adj: Mapping, kinds: Mapping, pw: frozenset,
                     need_decomposition: bool = True, max_corrupted: int = 1) -> list[SpecialSubtree]:
    """Fix and semi-triplet roots.  The tails must avoid box roots in some
    decomposition with at most ``max_corrupted`` corrupted boxes."""
    out = []
    comp_cache: dict = {}

    def rootless_ok(forbidden):
        if not need_decomposition:
            return True
        key = frozenset(forbidden)
        if key not in comp_cache:
            comp_cache[key] = decompose_component(adj, kinds, pw, max_corrupted, key) is not None
        return comp_cache[key]

    for u in sorted(adj):
        tails = _high_tails2(adj, kinds, u)
        b3_leaves = [w for w in adj[u] if len(adj[w]) == 1 and kinds[w] == B3]
        if kinds[u] == W and b3_leaves and len(tails) >= 2:
            for pair in itertools.combinations(tails, 2):
                verts = {x for t in pair for x in t}
                if rootless_ok(verts):
                    used = {t[0] for t in pair} | {b3_leaves[0]}
                    kind = "strong-fix" if _strong(adj, kinds, u, used) else "fix"
                    out.append(SpecialSubtree(kind, u, pair, True))
                    break
        if _high(kinds[u]) and len(tails) >= 3 and len(_tails(adj, u)) >= 2:
            for triple in itertools.combinations(tails, 3):
                verts = {x for t in triple for x in t}
                if all(kinds[x] == W for x in verts):
                    continue  # that is a triplet vertex
                if rootless_ok(verts):
                    used = {t[0] for t in triple}
                    kind = "strong-semi-triplet" if _strong(adj, kinds, u, used) else "semi-triplet"
                    b3 = any(kinds[t[1]] == B3 for t in triple)
                    out.append(SpecialSubtree(kind, u, triple, b3))
                    break
    return out


def find_special_subtrees(d: DenseGraph) -> list[SpecialSubtree]:
    out = []
    adj = d.graph.adj
    for c in _dense_components(d):
        sub = {v: adj[v] for v in c}
        out.extend(special_subtrees(sub, d.kinds, d.triplets.pw))
    return out


# --- decomposition normalizers -------------------------------------------------

def disconnect_ext_blue(g: Forest, kinds: Mapping, dec: BoxDecomposition) -> tuple[Forest, BoxDecomposition]:
    """Drop external edges whose endpoints are both blue; the child becomes a root box."""
    drop = []
    parent = dict(dec.parent)
    for ci, (pi, pv) in dec.parent.items():
        r = dec.boxes[ci].root
        if kinds[r] != W and kinds[pv] != W:
            drop.append((r, pv))
            del parent[ci]
    return g.without_edges(drop), BoxDecomposition(dec.boxes, parent)


def _merge(dec: BoxDecomposition, keep: int, gone: int, new_box: Box) -> BoxDecomposition:
    boxes = list(dec.boxes)
    boxes[keep] = new_box
    parent = {}
    for ci, (pi, pv) in dec.parent.items():
        if ci == gone:
            continue
        pi = keep if pi == gone else pi
        parent[ci] = (pi, pv)
    mapping = {}
    out = []
    for i, b in enumerate(boxes):
        if i == gone:
            continue
        mapping[i] = len(out)
        out.append(b)
    return BoxDecomposition(tuple(out), {mapping[c]: (mapping[p], v) for c, (p, v) in parent.items()})


def join_high(kinds: Mapping, dec: BoxDecomposition) -> BoxDecomposition:
    """Merge every high child box into its high parent box."""
    def high(b):
        return all(kinds[v] != B2 for v in b.vertices)

    changed = True
    while changed:
        changed = False
        for ci, (pi, pv) in sorted(dec.parent.items()):
            child, par = dec.boxes[ci], dec.boxes[pi]
            if high(child) and high(par):
                merged = Box(par.vertices | child.vertices, par.root, par.btype)
                dec = _merge(dec, pi, ci, merged)
                changed = True
                break
    return dec


def fix_bw_parent(adj: Mapping, kinds: Mapping, dec: BoxDecomposition) -> tuple[dict, BoxDecomposition]:
    """Absorb each blue-white parent box into one child box, converting the two
    blues involved to value 2.  A D2 child is split again into a regular box
    and a D1 box.  Returns updated kinds and decomposition."""
    kinds = dict(kinds)
    while True:
        target = None
        for ci, (pi, pv) in sorted(dec.parent.items()):
            p = dec.boxes[pi]
            if len(p.vertices) == 2 and sorted(kinds[v] == W for v in p.vertices) == [False, True]:
                target = (ci, pi)
                break
        if target is None:
            return kinds, dec
        ci, pi = target
        child, par = dec.boxes[ci], dec.boxes[pi]
        (u1,) = [v for v in par.vertices if kinds[v] != W]
        r1 = child.root
        kinds[u1] = B2
        kinds[r1] = B2
        merged = Box(par.vertices | child.vertices, None, BoxType.R4)
        if child.btype is BoxType.D2:
            ia = _internal(adj, child.vertices)
            (r2,) = [v for v in child.vertices if kinds[v] == B2 and v != r1]
            # the D1 part is r2 with its two-vertex subtail pointing away from r1
            r2_tail = next(st for st in (subtail_from(ia, r2, w) for w in ia[r2])
                           if st is not None and len(st) == 2)
            q4 = frozenset([r2, *r2_tail])
            merged = Box(merged.vertices - q4, None, BoxType.R4)
            dec = _merge(dec, pi, ci, merged)
            boxes = list(dec.boxes) + [Box(q4, r2, BoxType.D1)]
            parent = dict(dec.parent)
            p_of_r2 = next(w for w in adj[r2] if w in merged.vertices)
            parent[len(boxes) - 1] = (dec.boxes.index(merged), p_of_r2)
            dec = BoxDecomposition(tuple(boxes), parent)
        else:
            dec = _merge(dec, pi, ci, merged)
