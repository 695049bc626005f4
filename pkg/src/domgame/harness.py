"""Verification of the strategy against every Staller line (or one adversary line).

Exhaustive verification walks the DAG of canonical states: a state is the
sorted tuple of component keys, Dominator's reply depends on the state alone,
so each state is analysed once and its results are shared by every line that
reaches it.  Witness lines for failures are recovered by replaying labelled
games along the memoized results.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from . import __version__
from .adversaries import PRNG_NAME, Adversary, AdversaryKind
from .game_engine import (Color, GameState, InvariantViolation, MoveRecord, Player, Variant,
                          check_state, initial_state, is_terminal, legal_moves, t_max)
from .graph_core import Forest, components, no_leaves_at_distance_4
from .solver import state_key
from .strategy import Engine, StrategyConfig, View, engine_for, play, replace_component, update
from .tree_enum import assemble, forest_id, forest_parts, trees

VIOLATIONS = ("bound", "psi-cumulative", "psi-pattern", "staller-gain", "last-move",
              "goodness-dominator", "goodness-staller", "no-dominator-move",
              "no-staller-update", "legal-set", "semi-check")


@dataclass(frozen=True)
class Node:
    """Aggregate over all Staller lines from a state where Dominator moves next."""
    games: int
    max_moves: int
    min_prefix: int  # least running psi sum along any line, counting the empty prefix
    violations: frozenset = frozenset()
    first_psi: int | None = None


EMPTY = Node(1, 0, 0)


def pattern_ok(p0: int, p1: int | None, p2: int | None) -> bool:
    """Per-Dominator-move excess pattern; missing later terms count as 0."""
    if p0 >= 0:
        return True
    if p0 < -2:
        return False
    return p0 + (p1 or 0) >= 0 or p0 + (p1 or 0) + (p2 or 0) >= 0


class Verifier:
    def __init__(self, cfg: StrategyConfig | None = None):
        self.engine = Engine(cfg or StrategyConfig())
        self.nodes: dict[tuple[str, ...], Node] = {}
        self._semi_checked: dict[str, bool] = {}

    # --- local checks -------------------------------------------------------------

    def _goodness(self, state, dominator_next: bool) -> str | None:
        try:
            self.engine.check_phase(state, dominator_next)
        except InvariantViolation:
            return "goodness-dominator" if dominator_next else "goodness-staller"
        if self.engine.cfg.self_check:
            return self._semi_crosscheck(state)
        return None

    def _semi_crosscheck(self, state) -> str | None:
        sv = self.engine.solver
        for k in state:
            if sv.info(k).clean:
                continue
            if k not in self._semi_checked:
                self._semi_checked[k] = reference_semi(sv.comps[k])
            if not self._semi_checked[k]:
                return "semi-check"
        return None

    def _legal_set(self, state) -> bool:
        """Every blue vertex keeps a white neighbour, so it is still legal."""
        sv = self.engine.solver
        for k in set(state):
            c = sv.comps[k]
            for v, kind in enumerate(c.kinds):
                if kind != "W" and not any(c.kinds[w] == "W" for w in c.adj[v]):
                    return False
        return True

    # --- DAG -------------------------------------------------------------------

    def node(self, state: tuple[str, ...]) -> Node:
        if not state:
            return EMPTY
        got = self.nodes.get(state)
        if got is None:
            got = self.nodes[state] = self._node(state)
        return got

    def _node(self, state) -> Node:
        eng = self.engine
        viol = set()
        bad = self._goodness(state, True)
        if bad:
            viol.add(bad)
        if not self._legal_set(state):
            viol.add("legal-set")
        try:
            d = eng.dominator_move(state)
        except InvariantViolation:
            return Node(1, 0, 0, frozenset(viol | {"no-dominator-move"}))
        p0 = d.option.gain - 7
        if not d.option.parts and d.option.gain < 5:
            viol.add("last-move")
        after = d.state
        if after:
            bad = self._goodness(after, False)
            if bad:
                viol.add(bad)
        if not after:
            return Node(1, 1, min(0, p0), frozenset(viol), p0)
        games, max_moves, min_prefix = 0, 1, min(0, p0)
        for (nxt, gs, erased), mult in self.staller_replies(after).items():
            if nxt is None:
                viol.add("no-staller-update")
                games += mult
                continue
            if gs < 3:
                viol.add("staller-gain")
            if erased and gs < 5:
                viol.add("last-move")
            p1 = gs - 3
            child = self.node(nxt)
            if nxt and not pattern_ok(p0, p1, child.first_psi):
                viol.add("psi-pattern")
            games += mult * child.games
            max_moves = max(max_moves, 2 + child.max_moves)
            min_prefix = min(min_prefix, p0 + p1, p0 + p1 + child.min_prefix)
            viol |= child.violations
        return Node(games, max_moves, min_prefix, frozenset(viol), p0)

    def staller_replies(self, state) -> Counter:
        """Canonical successors of every labelled Staller move, with multiplicities."""
        sv = self.engine.solver
        out: Counter = Counter()
        for k, mult in Counter(state).items():
            i = state.index(k)
            for u in range(len(sv.comps[k])):
                o = sv.stl_option(k, u)
                if o is None:
                    out[(None, 0, False)] += mult
                else:
                    out[(replace_component(state, i, o), o.gain, not o.parts)] += mult
        return out

    def root(self, g: Forest, variant: Variant) -> Node:
        eng = self.engine
        keys, _ = eng.initial(g)
        start = state_key(keys)
        if variant is Variant.DOMINATOR_START:
            return self.node(start)
        games, max_moves, min_prefix = 0, 0, 0
        viol = set()
        seen: Counter = Counter()
        for k, mult in Counter(start).items():
            i = start.index(k)
            for u in range(len(eng.solver.comps[k])):
                gain, nxt = eng.staller_opening(start, i, u)
                seen[(nxt, gain, not eng.solver.split(k, u))] += mult
        for (nxt, gain, erased), mult in seen.items():
            if gain < 3:
                viol.add("staller-gain")
            if erased and gain < 5:
                viol.add("last-move")
            bad = self._goodness(nxt, True)
            if bad:
                viol.add(bad)
            child = self.node(nxt)
            games += mult * child.games
            max_moves = max(max_moves, 1 + child.max_moves)
            min_prefix = min(min_prefix, child.min_prefix)  # opening move is outside the ledger
            viol |= child.violations
        return Node(games, max_moves, min_prefix, frozenset(viol))


def reference_semi(comp) -> bool:
    """Semi-corruption of a canonical component by the direct definition."""
    from .boxes import find_decomposition, is_semi_corrupted
    from .densify import densify

    adj, kinds = comp.labeled()
    g = Forest(adj)
    color = {v: Color.W if k == "W" else Color.B for v, k in kinds.items()}
    value = {v: 2 if k == "B2" else 3 for v, k in kinds.items()}
    s = GameState(g, g, color, value, Variant.DOMINATOR_START)
    if find_decomposition(densify(g, color, value), 1) is None:
        return False
    return is_semi_corrupted(s, g.vertices)


# --- labelled games ---------------------------------------------------------------

@dataclass
class GameRecord:
    forest_id: str
    variant: Variant
    adversary: str
    n: int
    moves: list[MoveRecord] = field(default_factory=list)  # a witness line; may be empty for aggregates
    T: int = 0  # longest line (equals len(moves) for single games)
    t_max: int = 0
    min_psi_cumulative: int = 0
    games: int = 1
    violations: list[str] = field(default_factory=list)

    @property
    def result(self) -> str:
        if self.violations:
            return "InvariantViolation(" + ",".join(self.violations) + ")"
        return "Win" if self.T <= self.t_max else "Loss"

    @property
    def failed(self) -> bool:
        return self.result != "Win"

    def line(self) -> str:
        moves = ";".join(f"{m.player.value}{m.vertex}:{m.gain}:{m.psi}" for m in self.moves)
        return (f"forest={self.forest_id} n={self.n} variant={self.variant.value} adversary={self.adversary} "
                f"games={self.games} T={self.T} T_max={self.t_max} min_psi={self.min_psi_cumulative} "
                f"result={self.result} moves={moves or '-'}")


def check_record(s: GameState, engine: Engine) -> list[str]:
    """Whole-line checks on a finished (or aborted) labelled game."""
    out = []
    hist = s.history
    if s.t > s.t_max():
        out.append("bound")
    run = 0
    for idx, m in enumerate(hist):
        if idx >= s.psi_start:
            run += m.psi
            if run < -2:
                out.append("psi-cumulative")
                break
    for idx, m in enumerate(hist):
        if m.player is Player.STALLER and m.gain < 3:
            out.append("staller-gain")
            break
    for idx, m in enumerate(hist):
        if m.player is Player.DOMINATOR and idx < len(hist) - 1:
            p1 = hist[idx + 1].psi
            p2 = hist[idx + 2].psi if idx + 2 < len(hist) else None
            if not pattern_ok(m.psi, p1, p2):
                out.append("psi-pattern")
                break
    return out


def run_game(g: Forest, variant: Variant, choose: Callable[[GameState], int],
             cfg: StrategyConfig | None = None, fid: str = "", adversary: str = "",
             on_step: Callable[[GameState], None] | None = None) -> tuple[GameRecord, GameState]:
    """Play one labelled game with per-step checks; ``choose`` picks Staller's moves."""
    eng = engine_for(cfg)
    s = initial_state(g, variant)
    viol: list[str] = []
    rec = GameRecord(fid or str(g), variant, adversary, len(g), t_max=s.t_max())

    def note(which):
        if which not in viol:
            viol.append(which)

    while not is_terminal(s):
        dom_turn = s.turn is Player.DOMINATOR
        try:
            if dom_turn:
                v, nxt = play(s, cfg)
            else:
                v = choose(s)
                nxt = update(s, v, cfg)
        except InvariantViolation as e:
            note(e.which)
            break
        touched = next(c for c in components(s.underlying) if v in c)
        s = nxt
        try:
            check_state(s)
        except InvariantViolation as e:
            note(e.which)
        if s.history[-1].gain < 5 and not any(u in s.underlying for u in touched):
            note("last-move")
        if not is_terminal(s):
            try:
                eng.check_phase(View(eng, s).state, not dom_turn)
            except InvariantViolation:
                note("goodness-staller" if dom_turn else "goodness-dominator")
        if on_step is not None:
            on_step(s)
    for v in check_record(s, eng):
        note(v)
    rec.moves = list(s.history)
    rec.T = len(rec.moves)
    rec.violations = viol
    rec.min_psi_cumulative = _min_prefix(s)
    return rec, s


def _min_prefix(s: GameState) -> int:
    run, low = 0, 0
    for m in s.history[s.psi_start:]:
        run += m.psi
        low = min(low, run)
    return low


# --- sweeps -------------------------------------------------------------------

@dataclass
class Summary:
    n: int
    forests: int = 0
    games: int = 0
    failures: int = 0
    worst_T_slack: int | None = None  # min over instances of T_max - T


@dataclass
class VerificationReport:
    adversary: str
    tiebreak: str
    ladder: str
    seed: int
    records: list[GameRecord] = field(default_factory=list)
    per_n: dict[tuple[int, str], Summary] = field(default_factory=dict)

    @property
    def failures(self) -> list[GameRecord]:
        return [r for r in self.records if r.failed]

    @property
    def total_games(self) -> int:
        return sum(s.games for s in self.per_n.values())

    def header(self) -> str:
        return (f"# domgame {__version__} adversary={self.adversary} tiebreak={self.tiebreak} "
                f"ladder={self.ladder} seed={self.seed} prng={PRNG_NAME}")

    def summary_lines(self) -> list[str]:
        out = []
        for (n, var), s in sorted(self.per_n.items()):
            out.append(f"summary n={n} variant={var} forests={s.forests} games={s.games} "
                       f"failures={s.failures} min_slack={s.worst_T_slack}")
        out.append(f"total games={self.total_games} failures={len(self.failures)}")
        return out


def instances(max_n: int, use_forests: bool, min_n: int = 2,
              simplified_only: bool = False) -> Iterator[tuple[int, str, Forest]]:
    for n in range(min_n, max_n + 1):
        if use_forests:
            gen = ((forest_id(parts), assemble(parts)) for parts in forest_parts(n))
        else:
            gen = ((forest_id((t,)), t.forest()) for t in trees(n))
        for fid, g in gen:
            if not simplified_only or no_leaves_at_distance_4(g):
                yield n, fid, g


def variants_of(name: str) -> list[Variant]:
    if name == "both":
        return [Variant.DOMINATOR_START, Variant.STALLER_START]
    return [Variant(name)]


def witness(verifier: Verifier, g: Forest, variant: Variant, root: Node, fid: str) -> GameRecord:
    """A concrete line showing the worst outcome of the exhaustive check."""
    eng = verifier.engine
    want = sorted(root.violations)
    t_lim = t_max(len(g), variant)

    def badness(node: Node, extra_moves: int) -> tuple:
        return (bool(want) and bool(node.violations & set(want)), extra_moves + node.max_moves)

    def choose(s: GameState) -> int:
        best = None
        for u in sorted(legal_moves(s)):
            try:
                nxt = update(s, u, eng.cfg)
            except InvariantViolation:
                return u
            local = nxt.history[-1].gain < 3
            node = EMPTY if is_terminal(nxt) else verifier.node(View(eng, nxt).state)
            score = (local,) + badness(node, 0) + (-node.min_prefix,)
            if best is None or score > best[0]:
                best = (score, u)
        return best[1]

    rec, _ = run_game(g, variant, choose, eng.cfg, fid, "exhaustive")
    rec.games = root.games
    rec.T = max(rec.T, root.max_moves)
    rec.min_psi_cumulative = root.min_prefix
    for v in want:
        if v not in rec.violations:
            rec.violations.append(v)
    if root.max_moves > t_lim and "bound" not in rec.violations:
        rec.violations.append("bound")
    if root.min_prefix < -2 and "psi-cumulative" not in rec.violations:
        rec.violations.append("psi-cumulative")
    return rec


def _record_exhaustive(verifier: Verifier, n, fid, g, variant) -> GameRecord:
    root = verifier.root(g, variant)
    failed = root.violations or root.max_moves > t_max(n, variant) or root.min_prefix < -2
    if failed:
        return witness(verifier, g, variant, root, fid)
    return GameRecord(fid, variant, "exhaustive", n, T=root.max_moves, t_max=t_max(n, variant),
                      min_psi_cumulative=root.min_prefix, games=root.games)


def verify_instances(items: Iterable[tuple[int, str, Forest]], variants: Sequence[Variant],
                     adversary: Adversary, cfg: StrategyConfig, fail_fast: bool = False,
                     verifier: Verifier | None = None) -> list[GameRecord]:
    verifier = verifier or Verifier(cfg)
    out = []
    for n, fid, g in items:
        for var in variants:
            if adversary.kind is AdversaryKind.EXHAUSTIVE:
                rec = _record_exhaustive(verifier, n, fid, g, var)
            else:
                adv = adversary.fresh()
                rec, _ = run_game(g, var, lambda s: adv.moves(s, cfg)[0], cfg, fid, adversary.kind.value)
            out.append(rec)
            if fail_fast and rec.failed:
                return out
    return out


def _worker(args):
    chunk, variants, kind, seed, cfg, fail_fast = args
    return verify_instances(chunk, variants, Adversary(kind, seed), cfg, fail_fast)


def verify(max_n: int, variant: str = "both", adversary: Adversary | None = None,
           cfg: StrategyConfig | None = None, use_forests: bool = False, jobs: int | None = None,
           fail_fast: bool = False, min_n: int = 2, simplified_only: bool | None = None) -> VerificationReport:
    if not 2 <= max_n <= 22:
        raise ValueError("max_n must be between 2 and 22")
    adversary = adversary or Adversary(AdversaryKind.EXHAUSTIVE)
    cfg = cfg or StrategyConfig()
    variants = variants_of(variant)
    jobs = jobs or int(os.environ.get("DOMGAME_JOBS", "1"))
    if simplified_only is None:
        simplified_only = cfg.simplified_ok
    items = list(instances(max_n, use_forests, min_n, simplified_only))
    if jobs > 1 and len(items) > 1:
        # one shard per worker, interleaved so large instances spread out
        shards = [items[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_worker, [(sh, variants, adversary.kind, adversary.seed, cfg, fail_fast)
                                            for sh in shards]))
        order = {fid: i for i, (_, fid, _) in enumerate(items)}
        records = sorted((r for p in parts for r in p),
                         key=lambda r: (order[r.forest_id], variants.index(r.variant)))
    else:
        records = verify_instances(items, variants, adversary, cfg, fail_fast)
    rep = VerificationReport(adversary.kind.value, cfg.tiebreak.value, cfg.ladder.value, adversary.seed, records)
    for r in records:
        s = rep.per_n.setdefault((r.n, r.variant.value), Summary(r.n))
        s.forests += 1
        s.games += r.games
        s.failures += r.failed
        slack = r.t_max - r.T
        s.worst_T_slack = slack if s.worst_T_slack is None else min(s.worst_T_slack, slack)
    return rep
