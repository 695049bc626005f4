"""Game state machine: colors, values, legality, gains and the excess-gain ledger."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

from .graph_core import Forest, GraphError, components

# Per-vertex "kinds" used by the analysis code: white, blue worth 2, blue worth 3.
W, B2, B3 = "W", "B2", "B3"
KIND_VALUE = {W: 3, B2: 2, B3: 3}


class Color(Enum):
    W = "W"
    B = "B"
    R = "R"


class Variant(Enum):
    DOMINATOR_START = "dominator"
    STALLER_START = "staller"


class Player(Enum):
    DOMINATOR = "D"
    STALLER = "S"


class IllegalMove(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """A property the strategy relies on failed to hold."""

    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"{which}: {detail}" if detail else which)
        self.which = which


def t_max(n: int, variant: Variant) -> int:
    if n < 2:
        raise ValueError("need at least two vertices")
    if variant is Variant.DOMINATOR_START:
        return 3 * n // 5
    return (3 * n + 2) // 5


def kind_of(color: Color, value: int) -> str:
    if color is Color.W:
        return W
    return B2 if value == 2 else B3


@dataclass(frozen=True)
class MoveRecord:
    player: Player
    vertex: int
    gain: int
    psi: int


@dataclass(frozen=True)
class MoveCandidate:
    move: int
    new_underlying: Forest
    new_values: Mapping[int, int]
    gain: int
    base: "GameState | None" = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GameState:
    original: Forest
    underlying: Forest
    color: Mapping[int, Color]
    value: Mapping[int, int]
    variant: Variant
    history: tuple[MoveRecord, ...] = ()
    # moves before this index are excluded from the running excess gain
    psi_start: int = 0

    @property
    def t(self) -> int:
        return len(self.history)

    @property
    def turn(self) -> Player:
        dom_first = self.variant is Variant.DOMINATOR_START
        return Player.DOMINATOR if (self.t % 2 == 0) == dom_first else Player.STALLER

    @property
    def potential(self) -> int:
        return sum(self.value[v] for v in self.underlying.vertices)

    @property
    def psi_cumulative(self) -> int:
        return sum(m.psi for m in self.history[self.psi_start:])

    @property
    def moves(self) -> tuple[int, ...]:
        return tuple(m.vertex for m in self.history)

    def kinds(self) -> dict[int, str]:
        return {v: kind_of(self.color[v], self.value[v]) for v in self.underlying.vertices}

    def t_max(self) -> int:
        return t_max(len(self.original), self.variant)


def initial_state(g: Forest, variant: Variant) -> GameState:
    if len(g) < 2 or g.isolated():
        raise GraphError("the game needs an isolate-free forest")
    return GameState(g, g, {v: Color.W for v in g.vertices}, {v: 3 for v in g.vertices}, variant)


def legal_moves(s: GameState) -> frozenset[int]:
    return frozenset(v for v in s.underlying.vertices if s.color[v] is not Color.R)


def is_terminal(s: GameState) -> bool:
    return len(s.underlying) == 0


def recolor(s: GameState, v: int) -> dict[int, Color]:
    """Colors of all original vertices assuming ``v`` is played next."""
    if v not in s.underlying or s.color[v] is Color.R:
        raise IllegalMove(f"vertex {v} is red or absent")
    g0 = s.original
    dominated = {u for u, c in s.color.items() if c is not Color.W}
    dominated.add(v)
    dominated |= g0.neighbors(v)
    out = {}
    for u in g0.vertices:
        if u not in dominated:
            out[u] = Color.W
        elif any(w not in dominated for w in g0.neighbors(u)):
            out[u] = Color.B
        else:
            out[u] = Color.R
    return out


def _touched(s: GameState, v: int) -> frozenset[int]:
    for comp in components(s.underlying):
        if v in comp:
            return comp
    raise IllegalMove(f"vertex {v} not in the underlying graph")


def candidate_moves(s: GameState, v: int) -> list[MoveCandidate]:
    """Every (underlying graph, values) option the move ``v`` can lead to.

    Only the component containing ``v`` is re-examined: its red vertices go,
    each of its blue vertices is worth 2 or 3, and a blue-blue edge inside it
    may stay only if an endpoint is worth 3.
    """
    colors = recolor(s, v)
    comp = _touched(s, v)
    keep = [u for u in sorted(comp) if colors[u] is not Color.R]
    blues = [u for u in keep if colors[u] is Color.B]
    g = s.underlying
    sub_edges = [(a, b) for a, b in g.edges() if a in comp and b in comp
                 and colors[a] is not Color.R and colors[b] is not Color.R]
    bb = [(a, b) for a, b in sub_edges if colors[a] is Color.B and colors[b] is Color.B]
    fixed = [e for e in sub_edges if e not in bb]
    rest_adj = {u: ns for u, ns in g.adj.items() if u not in comp}
    before = s.potential
    out = []
    for vals in itertools.product((2, 3), repeat=len(blues)):
        value = dict(s.value)
        for u in comp:
            value[u] = 0 if colors[u] is Color.R else 3
        value.update(zip(blues, vals))
        optional = [e for e in bb if value[e[0]] == 3 or value[e[1]] == 3]
        for mask in itertools.product((True, False), repeat=len(optional)):
            edges = fixed + [e for e, k in zip(optional, mask) if k]
            adj: dict[int, set[int]] = {u: set() for u in keep}
            for a, b in edges:
                adj[a].add(b)
                adj[b].add(a)
            adj.update(rest_adj)
            new_g = Forest(adj)
            new_values = {u: value[u] for u in new_g.vertices}
            gain = before - sum(new_values.values())
            out.append(MoveCandidate(v, new_g, new_values, gain, s))
    return out


def apply(s: GameState, c: MoveCandidate) -> GameState:
    if c.base is not None and c.base is not s:
        raise IllegalMove("stale candidate")
    colors = recolor(s, c.move)
    value = {u: 0 for u in s.original.vertices}
    value.update(c.new_values)
    if set(c.new_underlying.vertices) != {u for u, col in colors.items() if col is not Color.R}:
        raise IllegalMove("candidate does not match the move")
    player = s.turn
    psi = c.gain - (7 if player is Player.DOMINATOR else 3)
    rec = MoveRecord(player, c.move, c.gain, psi)
    return replace(s, underlying=c.new_underlying, color=colors, value=value,
                   history=s.history + (rec,))


def staller_start_shift(s: GameState) -> GameState:
    """After Staller's opening move every blue vertex is revalued to 3."""
    if s.variant is not Variant.STALLER_START or s.t != 1:
        raise ValueError("shift applies right after the opening Staller move")
    value = dict(s.value)
    for u, c in s.color.items():
        if c is Color.B:
            value[u] = 3
    return replace(s, value=value, psi_start=1)


def play_vertex(s: GameState, v: int, new_underlying: Forest, new_values: Mapping[int, int]) -> GameState:
    """Apply a move whose successor graph and values were chosen elsewhere."""
    gain = s.potential - sum(new_values[u] for u in new_underlying.vertices)
    return apply(s, MoveCandidate(v, new_underlying, dict(new_values), gain, s))


def check_state(s: GameState) -> None:
    """Structural invariants every reachable state must satisfy."""
    g, g0 = s.underlying, s.original
    for u in g0.vertices:
        c = s.color[u]
        if c is Color.R:
            if u in g or s.value[u] != 0:
                raise InvariantViolation("red-vertex", f"{u} still present or valued")
            continue
        if u not in g:
            raise InvariantViolation("legal-set", f"non-red vertex {u} missing from underlying graph")
        if c is Color.W and (s.value[u] != 3 or g.neighbors(u) != g0.neighbors(u)):
            raise InvariantViolation("white-neighborhood", str(u))
        if c is Color.B and s.value[u] not in (2, 3):
            raise InvariantViolation("blue-value", str(u))
    for a, b in g.edges():
        if s.color[a] is Color.B and s.color[b] is Color.B and 3 not in (s.value[a], s.value[b]):
            raise InvariantViolation("blue-edge", f"{a}-{b} has no endpoint worth 3")
        if b not in g0.neighbors(a):
            raise InvariantViolation("edge", f"{a}-{b} not in the original forest")
    # legality from the domination state alone
    dominated = {u for u in g0.vertices if s.color[u] is not Color.W}
    legal = {u for u in g0.vertices if not (g0.neighbors(u) | {u}) <= dominated}
    if legal != set(legal_moves(s)):
        raise InvariantViolation("legal-set", "legal moves differ from white and blue vertices")

