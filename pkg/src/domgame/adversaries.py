"""Staller move generators used by the verifier and the CLI."""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .game_engine import GameState, Player, is_terminal, legal_moves

# Python's Mersenne Twister; ``random()`` output is stable across platforms and versions.
PRNG_NAME = "mt19937"


class AdversaryKind(Enum):
    EXHAUSTIVE = "exhaustive"
    GREEDY = "greedy"
    RANDOM = "random"


@dataclass
class Adversary:
    kind: AdversaryKind
    seed: int = 0

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def fresh(self) -> "Adversary":
        """A copy with its own generator, reset to the seed."""
        return Adversary(self.kind, self.seed)

    def moves(self, s: GameState, cfg=None) -> list[int]:
        return staller_moves(s, self.kind, self._rng, cfg)


def staller_moves(s: GameState, kind: AdversaryKind, rng: random.Random | None = None, cfg=None) -> list[int]:
    if is_terminal(s):
        raise ValueError("the game is over")
    if s.turn is not Player.STALLER:
        raise ValueError("not Staller's turn")
    legal = sorted(legal_moves(s))
    if kind is AdversaryKind.EXHAUSTIVE:
        return legal
    if kind is AdversaryKind.RANDOM:
        rng = rng if rng is not None else random.Random(0)
        return [legal[int(rng.random() * len(legal))]]
    return [greedy_min_gain(s, legal, cfg)]


def greedy_min_gain(s: GameState, legal: list[int], cfg=None) -> int:
    """Legal move after which Dominator's best available gain is smallest."""
    from .strategy import View, engine_for, update

    eng = engine_for(cfg)
    best = None
    for u in legal:
        nxt = update(s, u, cfg)
        if is_terminal(nxt):
            score = 0
        else:
            score = eng.next_dom_gain(View(eng, nxt).state)
        if best is None or score < best[0]:
            best = (score, u)
    return best[1]
