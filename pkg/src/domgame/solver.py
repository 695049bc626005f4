"""Memoized per-component analysis used by the strategy and the verifier.

Every component of the underlying graph is reduced to a canonical form (a
string key plus a canonical vertex numbering), so all analysis below is done
once per isomorphism class of valued trees.

After a move only the touched component changes.  Its surviving vertices
split into *pieces* (connected by the remaining edges).  Inside a piece each
blue vertex may be worth 2 or 3 and each blue-blue edge may be dropped unless
kept with an endpoint worth 3.  The best option minimizes the total value of
the piece subject to the resulting components being good, which is what the
memo tables compute.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .boxes import (DISPENSIBLE, BoxDecomposition, BoxType, _internal, _rooted_types,
                    _rootless_types, decompose_component, special_subtrees)
from .densify import densify_adj, triplets_of
from .game_engine import B2, B3, KIND_VALUE, W
from .graph_core import canonical_form

BLUE = "B"  # unvalued blue, used for pieces before values are chosen


@dataclass(frozen=True)
class Comp:
    key: str
    kinds: tuple[str, ...]
    adj: tuple[tuple[int, ...], ...]

    @property
    def potential(self) -> int:
        return sum(KIND_VALUE[k] for k in self.kinds)

    def __len__(self) -> int:
        return len(self.kinds)

    def labeled(self) -> tuple[dict, dict]:
        """Adjacency and kinds over even labels 2*i (virtual leaves get odd labels)."""
        adj = {2 * i: tuple(2 * j for j in ns) for i, ns in enumerate(self.adj)}
        kinds = {2 * i: k for i, k in enumerate(self.kinds)}
        return adj, kinds


@dataclass(frozen=True)
class Option:
    """Best outcome of playing one vertex of a component.

    ``parts`` lists the resulting components as (key, index map) where the
    map sends each canonical index of the part to an index of the played
    component.
    """
    gain: int
    parts: tuple[tuple[str, tuple[int, ...]], ...]
    semi: bool = False


@dataclass
class CompInfo:
    clean: bool
    decomposition: BoxDecomposition | None
    dense_real: tuple[int, ...]
    ladder: tuple[int, ...]  # root-box real vertices that are not leaves
    root_box: frozenset = frozenset()
    semi: bool | None = None
    features: dict | None = field(default=None, repr=False)
    dense_size: int = 0


def make_comp(kinds: Mapping, adj: Mapping) -> tuple[Comp, list]:
    """Canonical component for a connected piece given on arbitrary vertex ids."""
    key, order = canonical_form(adj, kinds)
    pos = {v: i for i, v in enumerate(order)}
    comp = Comp(key, tuple(kinds[v] for v in order),
                tuple(tuple(sorted(pos[w] for w in adj[v])) for v in order))
    return comp, order


class Solver:
    """Memo tables for one strategy configuration."""

    def __init__(self, simplified: bool = False, ladder_root_only: bool = True,
                 self_check: bool = False):
        self.simplified = simplified
        self.ladder_root_only = ladder_root_only
        self.self_check = self_check
        self.comps: dict[str, Comp] = {}
        self._info: dict[str, CompInfo] = {}
        self._dom: dict[tuple[str, int], Option | None] = {}
        self._stl: dict[tuple[str, int], Option | None] = {}
        self._split: dict[tuple[str, int], tuple] = {}
        self._pieces: dict[str, Comp] = {}
        self._piece_clean: dict[str, tuple | None] = {}
        self._piece_semi: dict[str, tuple | None] = {}
        self._sub_clean: dict[str, tuple | None] = {}
        self._sub_semi: dict[str, tuple | None] = {}
        self._best_dom: dict[tuple[str, bool], int | None] = {}

    # --- registration ---------------------------------------------------------

    def register(self, kinds: Mapping, adj: Mapping) -> tuple[str, list]:
        comp, order = make_comp(kinds, adj)
        self.comps.setdefault(comp.key, comp)
        return comp.key, order

    # --- component status -----------------------------------------------------

    def info(self, key: str) -> CompInfo:
        got = self._info.get(key)
        if got is None:
            got = self._info[key] = self._compute_info(self.comps[key])
        return got

    def _compute_info(self, comp: Comp) -> CompInfo:
        adj, kinds = comp.labeled()
        if self.simplified:
            pw = triplets_of(adj, kinds).pw
            types = _rootless_types(_internal(adj, adj), kinds, pw, frozenset())
            types.discard(BoxType.R3_C12)
            everyone = tuple(range(len(comp)))
            return CompInfo(bool(types), None, everyone, everyone, frozenset(adj), dense_size=len(comp))
        dadj, dkinds, virtual_of, _, ta = densify_adj(adj, kinds)
        dec = decompose_component(dadj, dkinds, ta.pw, 0)
        real = tuple(sorted(v // 2 for v in dadj if v % 2 == 0))
        if dec is None:
            return CompInfo(False, None, real, real, dense_size=len(dadj))
        if self.self_check:
            self._check(dadj, dkinds, virtual_of, ta, dec)
        (root,) = dec.root_boxes()
        ladder = tuple(sorted(v // 2 for v in root.vertices if v % 2 == 0 and len(dadj[v]) > 1))
        return CompInfo(True, dec, real, ladder if self.ladder_root_only else real, root.vertices,
                        dense_size=len(dadj))

    def _check(self, dadj, dkinds, virtual_of, ta, dec) -> None:
        from .boxes import check_decomposition
        from .densify import DenseGraph
        from .graph_core import Forest
        g = Forest(dadj)
        errs = check_decomposition(DenseGraph(g, dkinds, virtual_of, {}, ta, g), dec, 0)
        if errs:
            raise AssertionError(f"decomposition failed independent check: {errs}")

    def is_semi(self, key: str) -> bool:
        inf = self.info(key)
        if inf.clean or self.simplified:
            return False
        if inf.semi is None:
            inf.semi = False
            comp = self.comps[key]
            adj, kinds = comp.labeled()
            dadj, dkinds, _, _, ta = densify_adj(adj, kinds)
            if decompose_component(dadj, dkinds, ta.pw, 1) is not None:
                inf.semi = any((o := self.dom_option(key, v)) is not None and o.gain >= 8
                               for v in inf.dense_real)
        return inf.semi

    # --- moves ------------------------------------------------------------------

    def split(self, key: str, v: int) -> tuple:
        """Pieces left after playing canonical vertex ``v``: (piece key, order) pairs."""
        got = self._split.get((key, v))
        if got is not None:
            return got
        comp = self.comps[key]
        kinds, adj = comp.kinds, comp.adj
        dom = [k != W for k in kinds]
        dom[v] = True
        for w in adj[v]:
            dom[w] = True
        state = {}
        for u in range(len(kinds)):
            if not dom[u]:
                state[u] = W
            elif any(not dom[w] for w in adj[u]):
                state[u] = BLUE
        pieces = []
        seen: set = set()
        for s in sorted(state):
            if s in seen:
                continue
            members = [s]
            seen.add(s)
            for x in members:
                for y in adj[x]:
                    if y in state and y not in seen:
                        seen.add(y)
                        members.append(y)
            padj = {x: tuple(y for y in adj[x] if y in state) for x in members}
            pkinds = {x: state[x] for x in members}
            pc, order = make_comp(pkinds, padj)
            self._pieces.setdefault(pc.key, pc)
            pieces.append((pc.key, tuple(order)))
        got = self._split[(key, v)] = tuple(pieces)
        return got

    def dom_option(self, key: str, v: int) -> Option | None:
        k = (key, v)
        if k in self._dom:
            return self._dom[k]
        total = 0
        parts = []
        for pkey, order in self.split(key, v):
            res = self.piece_clean(pkey)
            if res is None:
                self._dom[k] = None
                return None
            s, pparts = res
            total += s
            parts.extend((ck, tuple(order[i] for i in m)) for ck, m in pparts)
        opt = Option(self.comps[key].potential - total, tuple(parts))
        self._dom[k] = opt
        return opt

    def stl_option(self, key: str, v: int) -> Option | None:
        k = (key, v)
        if k in self._stl:
            return self._stl[k]
        pieces = self.split(key, v)
        clean = [self.piece_clean(p) for p, _ in pieces]
        best = None
        if all(c is not None for c in clean):
            best = (sum(c[0] for c in clean), None)
        missing = [i for i, c in enumerate(clean) if c is None]
        if len(missing) <= 1 and not self.simplified:
            cands = missing if missing else range(len(pieces))
            for i in cands:
                semi = self.piece_semi(pieces[i][0])
                if semi is None:
                    continue
                base = sum(c[0] for j, c in enumerate(clean) if j != i)
                tot = base + semi[0]
                if best is None or tot < best[0]:
                    best = (tot, i)
        if best is None:
            self._stl[k] = None
            return None
        total, semi_i = best
        parts = []
        for i, (pkey, order) in enumerate(pieces):
            res = self.piece_semi(pkey) if i == semi_i else clean[i]
            parts.extend((ck, tuple(order[j] for j in m)) for ck, m in res[1])
        opt = Option(self.comps[key].potential - total, tuple(parts), semi_i is not None)
        self._stl[k] = opt
        return opt

    # --- piece valuation ------------------------------------------------------------

    def _subpieces(self, piece: Comp, removed: Sequence[tuple[int, int]]):
        cut = set(removed) | {(b, a) for a, b in removed}
        seen: set = set()
        out = []
        for s in range(len(piece)):
            if s in seen:
                continue
            members = [s]
            seen.add(s)
            for x in members:
                for y in piece.adj[x]:
                    if y not in seen and (x, y) not in cut:
                        seen.add(y)
                        members.append(y)
            sadj = {x: tuple(y for y in piece.adj[x] if (x, y) not in cut) for x in members}
            skinds = {x: piece.kinds[x] for x in members}
            sc, order = make_comp(skinds, sadj)
            self._pieces.setdefault(sc.key, sc)
            out.append((sc.key, order))
        return out

    def _edge_choices(self, pkey: str):
        piece = self._pieces[pkey]
        bb = [(a, b) for a in range(len(piece)) for b in piece.adj[a]
              if a < b and piece.kinds[a] == BLUE and piece.kinds[b] == BLUE]
        # keep as many blue-blue edges as possible first
        for r in range(len(bb) + 1):
            for removed in itertools.combinations(bb, r):
                yield self._subpieces(piece, removed)

    def piece_clean(self, pkey: str):
        """(minimum total value, parts) over all clean options of a piece."""
        if pkey in self._piece_clean:
            return self._piece_clean[pkey]
        best = None
        for subs in self._edge_choices(pkey):
            total = 0
            parts = []
            for skey, order in subs:
                r = self.sub_clean(skey)
                if r is None:
                    break
                total += r[0]
                parts.append((r[1], tuple(order[i] for i in r[2])))
            else:
                if best is None or total < best[0]:
                    best = (total, tuple(parts))
        self._piece_clean[pkey] = best
        return best

    def piece_semi(self, pkey: str):
        """Best option of a piece in which exactly one part is semi-corrupted,
        kept only when it beats every clean option."""
        if pkey in self._piece_semi:
            return self._piece_semi[pkey]
        clean = self.piece_clean(pkey)
        limit = clean[0] if clean is not None else None
        best = None
        for subs in self._edge_choices(pkey):
            cleans = [self.sub_clean(skey) for skey, _ in subs]
            if sum(1 for c in cleans if c is None) > 1:
                continue
            for i, (skey, order) in enumerate(subs):
                if any(c is None for j, c in enumerate(cleans) if j != i):
                    continue
                base = sum(c[0] for j, c in enumerate(cleans) if j != i)
                cap = None if limit is None else limit - base
                if best is not None:
                    cap = best[0] - base if cap is None else min(cap, best[0] - base)
                s = self.sub_semi(skey, cap)
                if s is None:
                    continue
                parts = []
                for j, (sk, so) in enumerate(subs):
                    r = s if j == i else cleans[j]
                    parts.append((r[1], tuple(so[t] for t in r[2])))
                best = (base + s[0], tuple(parts))
        self._piece_semi[pkey] = best
        return best

    def _valuations(self, skey: str):
        """Valued kinds for a subpiece in order of increasing total value."""
        sub = self._pieces[skey]
        blues = [i for i, k in enumerate(sub.kinds) if k == BLUE]
        bb = [(a, b) for a in blues for b in sub.adj[a] if a < b and sub.kinds[b] == BLUE]
        whites = 3 * (len(sub) - len(blues))
        for r in range(len(blues) + 1):
            for high in itertools.combinations(blues, r):
                hs = set(high)
                if any(a not in hs and b not in hs for a, b in bb):
                    continue
                kinds = {i: (W if k == W else (B3 if i in hs else B2)) for i, k in enumerate(sub.kinds)}
                yield whites + 2 * len(blues) + r, kinds, sub

    def sub_clean(self, skey: str):
        """(total, component key, index map) of the cheapest clean valuation."""
        if skey in self._sub_clean:
            return self._sub_clean[skey]
        res = None
        for total, kinds, sub in self._valuations(skey):
            adj = {i: ns for i, ns in enumerate(sub.adj)}
            ckey, order = self.register(kinds, adj)
            if self.info(ckey).clean:
                res = (total, ckey, tuple(order))
                break
        self._sub_clean[skey] = res
        return res

    def sub_semi(self, skey: str, cap: int | None):
        """Cheapest semi-corrupted valuation with total below ``cap``."""
        key = (skey, cap)
        if key in self._sub_semi:
            return self._sub_semi[key]
        res = None
        for total, kinds, sub in self._valuations(skey):
            if cap is not None and total >= cap:
                break
            adj = {i: ns for i, ns in enumerate(sub.adj)}
            ckey, order = self.register(kinds, adj)
            if not self.info(ckey).clean and self.is_semi(ckey):
                res = (total, ckey, tuple(order))
                break
        self._sub_semi[key] = res
        return res

    # --- Dominator's view -------------------------------------------------------

    def dominator_candidates(self, key: str, everything: bool = False) -> tuple[int, ...]:
        """Vertices Dominator may play in a component.  ``everything`` is set when
        every dense component has two vertices, where leaves are allowed too."""
        inf = self.info(key)
        if everything or not inf.clean:
            return inf.dense_real
        return inf.ladder

    def best_dom_gain(self, key: str, everything: bool = False) -> int | None:
        k = (key, everything)
        if k in self._best_dom:
            return self._best_dom[k]
        best = None
        for v in self.dominator_candidates(key, everything):
            o = self.dom_option(key, v)
            if o is not None and (best is None or o.gain > best):
                best = o.gain
        self._best_dom[k] = best
        return best

    def features(self, key: str) -> dict:
        """Shape facts used by the gain-6 tie-break cascade."""
        inf = self.info(key)
        if inf.features is not None:
            return inf.features
        comp = self.comps[key]
        adj, kinds = comp.labeled()
        feats = {"dispensible": None, "bwbhh": False, "semi_triplet": False}
        if inf.clean and not self.simplified:
            dadj, dkinds, _, _, ta = densify_adj(adj, kinds)
            root = inf.root_box
            ia = _internal(dadj, root)
            for r in sorted(root):
                if dkinds[r] == W or any(w not in root for w in dadj[r]):
                    continue
                ts = _rooted_types(ia, dkinds, r) or set()
                hit = ts & DISPENSIBLE
                if hit:
                    feats["dispensible"] = min(hit, key=lambda t: t.value)
                    break
            feats["bwbhh"] = _is_bwbhh(ia, dkinds)
            for st in special_subtrees(dadj, dkinds, ta.pw):
                if st.kind == "strong-semi-triplet" or (st.kind.endswith("semi-triplet") and st.b3_leaf):
                    feats["semi_triplet"] = True
                    break
        inf.features = feats
        return feats


def _is_bwbhh(ia: Mapping, kinds: Mapping) -> bool:
    if len(ia) != 5 or any(len(ns) > 2 for ns in ia.values()):
        return False
    ends = [v for v, ns in ia.items() if len(ns) == 1]
    if len(ends) != 2:
        return False
    for start in ends:
        path = [start]
        prev = None
        while len(path) < 5:
            nxt = next(w for w in ia[path[-1]] if w != prev)
            prev = path[-1]
            path.append(nxt)
        ks = [kinds[x] for x in path]
        if ks[0] != W and ks[1] == W and ks[2] != W and ks[3] != B2 and ks[4] != B2:
            return True
    return False


def state_key(keys: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(keys))
