"""Dominator's move selection and the post-processing of Staller's moves.

Two layers: ``Engine`` works on canonical states (sorted tuples of component
keys) and is what the verifier drives; the module-level functions wrap it for
labelled ``GameState`` values.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .boxes import BoxType
from .game_engine import (B3, Color, GameState, InvariantViolation, MoveCandidate, Player,
                          Variant, W, apply, play_vertex, recolor, staller_start_shift)
from .graph_core import Forest, components
from .solver import Option, Solver, state_key


class TieBreak(Enum):
    LOOKAHEAD3 = "lookahead"
    HEURISTIC5 = "heuristic"
    AUTO = "auto"  # cascade at gain 6 when it decides, otherwise lookahead


class Ladder(Enum):
    ROOT_BOXES_ONLY = "root-boxes"
    ALL_DENSE = "all-dense"


@dataclass(frozen=True)
class StrategyConfig:
    tiebreak: TieBreak = TieBreak.AUTO
    simplified_ok: bool = False
    ladder: Ladder = Ladder.ROOT_BOXES_ONLY
    self_check: bool = False


@dataclass(frozen=True)
class Decision:
    index: int  # component position in the state
    vertex: int  # canonical vertex of that component
    option: Option
    state: tuple[str, ...]  # successor


@dataclass(frozen=True)
class ScoredMove:
    candidate: MoveCandidate
    gain: int
    tiebreak_score: int | None = None


def replace_component(state: Sequence[str], i: int, option: Option) -> tuple[str, ...]:
    return state_key(list(state[:i]) + list(state[i + 1:]) + [k for k, _ in option.parts])


class Engine:
    def __init__(self, cfg: StrategyConfig | None = None):
        self.cfg = cfg or StrategyConfig()
        self.solver = Solver(simplified=self.cfg.simplified_ok,
                             ladder_root_only=self.cfg.ladder is Ladder.ROOT_BOXES_ONLY,
                             self_check=self.cfg.self_check)
        self._choice: dict[tuple[str, ...], Decision] = {}

    # --- state helpers ---------------------------------------------------------

    def initial(self, g: Forest) -> tuple[tuple[str, ...], list]:
        keys, orders = [], []
        for c in components(g):
            k, order = self.solver.register({v: W for v in c}, {v: g.neighbors(v) for v in c})
            keys.append(k)
            orders.append(order)
        return keys, orders

    def _everything(self, state: Sequence[str]) -> bool:
        return all(self.solver.info(k).dense_size == 2 for k in state)

    def check_phase(self, state: Sequence[str], dominator_next: bool) -> None:
        """Raise unless the state satisfies the decomposition invariant."""
        bad = [k for k in state if not self.solver.info(k).clean]
        if not bad:
            return
        if not dominator_next:
            raise InvariantViolation("invariant", "corrupted component before a Staller move")
        if len(bad) > 1:
            raise InvariantViolation("invariant", "two corrupted components")
        if not self.solver.is_semi(bad[0]):
            raise InvariantViolation("invariant", "corrupted component is not semi-corrupted")

    # --- Dominator ------------------------------------------------------------------

    def candidates(self, state: Sequence[str]) -> list[tuple[int, int, Option]]:
        sv = self.solver
        bad = [i for i, k in enumerate(state) if not sv.info(k).clean]
        idxs = bad if bad else range(len(state))
        every = self._everything(state)
        out = []
        seen = set()
        for i in idxs:
            k = state[i]
            if k in seen:
                continue
            seen.add(k)
            for v in sv.dominator_candidates(k, every):
                o = sv.dom_option(k, v)
                if o is not None:
                    out.append((i, v, o))
        return out

    def dominator_move(self, state: tuple[str, ...]) -> Decision:
        got = self._choice.get(state)
        if got is not None:
            return got
        cands = self.candidates(state)
        if not cands:
            raise InvariantViolation("no-dominator-move", "no move keeps the graph good")
        best = max(o.gain for _, _, o in cands)
        tied = []
        seen = set()
        for i, v, o in cands:
            if o.gain != best:
                continue
            nxt = replace_component(state, i, o)
            if nxt in seen:
                continue
            seen.add(nxt)
            tied.append(Decision(i, v, o, nxt))
        pick = tied[0] if len(tied) == 1 else self.tiebreak(state, tied)
        self._choice[state] = pick
        return pick

    def tiebreak(self, state, tied: list[Decision]) -> Decision:
        mode = self.cfg.tiebreak
        if mode is not TieBreak.LOOKAHEAD3 and tied[0].option.gain == 6 and not self.cfg.simplified_ok:
            hit = self.cascade(state, tied)
            if hit is not None:
                return hit
            if mode is TieBreak.HEURISTIC5:
                return tied[0]
        return max(tied, key=lambda d: self.lookahead_score(d.state, d.option.gain))  # first max wins

    def cascade(self, state, tied: list[Decision]) -> Decision | None:
        sv = self.solver
        for d in tied:
            k = state[d.index]
            if sv.comps[k].kinds[d.vertex] == W and sv.features(k)["dispensible"] is not None:
                return d
        tests = (
            lambda f: f["bwbhh"],
            lambda f: f["semi_triplet"],
            lambda f: f["dispensible"] is BoxType.D1,
        )
        for test in tests:
            for d in tied:
                if any(sv.info(k).clean and test(sv.features(k)) for k in d.state):
                    return d
        return None

    def lookahead_score(self, nxt: tuple[str, ...], gain: int) -> int:
        """Worst case over Staller replies of this gain + Staller's + Dominator's next best."""
        if not nxt:
            return gain
        sv = self.solver
        worst = None
        seen = set()
        for j, k in enumerate(nxt):
            for u in range(len(sv.comps[k])):
                if (k, u) in seen:
                    continue
                seen.add((k, u))
                o = sv.stl_option(k, u)
                if o is None:
                    score = gain
                else:
                    after = replace_component(nxt, j, o)
                    score = gain + o.gain + self.next_dom_gain(after)
                if worst is None or score < worst:
                    worst = score
        return worst

    def next_dom_gain(self, state: tuple[str, ...]) -> int:
        if not state:
            return 0
        sv = self.solver
        bad = [k for k in state if not sv.info(k).clean]
        every = self._everything(state)
        pool = bad if bad else state
        vals = [sv.best_dom_gain(k, every) for k in pool]
        vals = [v for v in vals if v is not None]
        return max(vals) if vals else 0

    # --- Staller -------------------------------------------------------------------

    def staller_move(self, state: tuple[str, ...], i: int, v: int) -> tuple[Option, tuple[str, ...]]:
        o = self.solver.stl_option(state[i], v)
        if o is None:
            raise InvariantViolation("no-staller-update", "no good successor for the Staller move")
        return o, replace_component(state, i, o)

    def staller_opening(self, state: tuple[str, ...], i: int, v: int) -> tuple[int, tuple[str, ...]]:
        """Opening Staller move of a Staller-start game, with every blue revalued to 3."""
        sv = self.solver
        k = state[i]
        parts = []
        total = 0
        for pkey, _ in sv.split(k, v):
            piece = sv._pieces[pkey]
            kinds = {x: (W if kd == W else B3) for x, kd in enumerate(piece.kinds)}
            ck, _ = sv.register(kinds, {x: ns for x, ns in enumerate(piece.adj)})
            parts.append(ck)
            total += 3 * len(piece)
        gain = sv.comps[k].potential - total
        return gain, state_key(list(state[:i]) + list(state[i + 1:]) + parts)


# --- labelled games -------------------------------------------------------------

class View:
    """Canonical view of a labelled state: component keys and label maps."""

    def __init__(self, engine: Engine, s: GameState):
        self.engine = engine
        sv = engine.solver
        entries = []
        kinds = s.kinds()
        g = s.underlying
        for c in components(g):
            k, order = sv.register({v: kinds[v] for v in c}, {v: g.neighbors(v) for v in c})
            entries.append((k, order))
        entries.sort(key=lambda e: (e[0], e[1][0]))
        self.state = tuple(k for k, _ in entries)
        self.orders = [o for _, o in entries]

    def locate(self, label: int) -> tuple[int, int]:
        for i, order in enumerate(self.orders):
            if label in order:
                return i, order.index(label)
        raise KeyError(label)

    def successor(self, s: GameState, i: int, option: Option) -> tuple[Forest, dict]:
        sv = self.engine.solver
        order = self.orders[i]
        adj = {v: set(ns) for v, ns in s.underlying.adj.items() if v not in order}
        values = {v: s.value[v] for v in adj}
        for key, m in option.parts:
            comp = sv.comps[key]
            labels = [order[j] for j in m]
            for a, ns in enumerate(comp.adj):
                adj[labels[a]] = {labels[b] for b in ns}
                values[labels[a]] = 2 if comp.kinds[a] == "B2" else 3
        return Forest(adj), values


def _candidate(s: GameState, view: View, i: int, v: int, option: Option) -> MoveCandidate:
    g, values = view.successor(s, i, option)
    label = view.orders[i][v]
    return MoveCandidate(label, g, values, option.gain, s)


_ENGINES: dict[StrategyConfig, Engine] = {}


def engine_for(cfg: StrategyConfig | None = None) -> Engine:
    cfg = cfg or StrategyConfig()
    if cfg not in _ENGINES:
        _ENGINES[cfg] = Engine(cfg)
    return _ENGINES[cfg]


def scored_moves(s: GameState, cfg: StrategyConfig | None = None) -> list[ScoredMove]:
    """All Dominator candidates with a good successor, best gain first."""
    eng = engine_for(cfg)
    view = View(eng, s)
    out = [ScoredMove(_candidate(s, view, i, v, o), o.gain) for i, v, o in eng.candidates(view.state)]
    out.sort(key=lambda m: (-m.gain, m.candidate.move))
    return out


def play(s: GameState, cfg: StrategyConfig | None = None) -> tuple[int, GameState]:
    if s.turn is not Player.DOMINATOR:
        raise ValueError("not Dominator's turn")
    eng = engine_for(cfg)
    view = View(eng, s)
    d = eng.dominator_move(view.state)
    c = _candidate(s, view, d.index, d.vertex, d.option)
    return c.move, apply(s, c)


def simplified_play(s: GameState) -> tuple[int, GameState]:
    from .graph_core import no_leaves_at_distance_4
    if not no_leaves_at_distance_4(s.original):
        raise ValueError("the simplified strategy needs a forest with no two leaves at distance 4")
    return play(s, StrategyConfig(simplified_ok=True))


def update(s: GameState, staller_move: int, cfg: StrategyConfig | None = None) -> GameState:
    if s.turn is not Player.STALLER:
        raise ValueError("not Staller's turn")
    eng = engine_for(cfg)
    view = View(eng, s)
    i, v = view.locate(staller_move)
    if s.variant is Variant.STALLER_START and s.t == 0:
        return staller_opening(s, staller_move)
    o, _ = eng.staller_move(view.state, i, v)
    return apply(s, _candidate(s, view, i, v, o))


def staller_opening(s: GameState, v: int) -> GameState:
    """Opening Staller move: red vertices go, every edge between survivors stays."""
    colors = recolor(s, v)
    keep = {u for u, c in colors.items() if c is not Color.R}
    g = s.underlying.subgraph(keep)
    s1 = play_vertex(s, v, g, {u: 3 for u in keep})
    return staller_start_shift(s1)


def lookahead_tiebreak(s: GameState, tied: list[ScoredMove], cfg: StrategyConfig | None = None) -> ScoredMove:
    if len(tied) == 1:
        return tied[0]
    eng = engine_for(cfg)
    scored = []
    for m in tied:
        nxt = apply(s, m.candidate)
        state = View(eng, nxt).state
        scored.append(ScoredMove(m.candidate, m.gain, eng.lookahead_score(state, m.gain)))
    return max(sorted(scored, key=lambda m: m.candidate.move), key=lambda m: m.tiebreak_score)


def heuristic_tiebreak(s: GameState, tied: list[ScoredMove], cfg: StrategyConfig | None = None) -> ScoredMove:
    eng = engine_for(cfg)
    view = View(eng, s)
    tied = sorted(tied, key=lambda m: m.candidate.move)
    decisions = []
    for m in tied:
        i, v = view.locate(m.candidate.move)
        o = eng.solver.dom_option(view.state[i], v)
        decisions.append(Decision(i, v, o, View(eng, apply(s, m.candidate)).state))
    hit = eng.cascade(view.state, decisions)
    return tied[decisions.index(hit)] if hit is not None else tied[0]
