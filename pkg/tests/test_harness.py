import pytest

from domgame.adversaries import Adversary, AdversaryKind
from domgame.game_engine import Variant, initial_state, is_terminal, legal_moves, t_max
from domgame.harness import Verifier, pattern_ok, reference_semi, run_game, verify, witness
from domgame.strategy import StrategyConfig, play, update
from domgame.tree_enum import forests, trees
from reference import count_lines

D, S = Variant.DOMINATOR_START, Variant.STALLER_START


def test_pattern():
    assert pattern_ok(0, None, None)
    assert not pattern_ok(-3, 10, 10)
    assert pattern_ok(-2, 2, None)
    assert pattern_ok(-2, 1, 1)
    assert not pattern_ok(-2, 1, 0)
    assert not pattern_ok(-1, None, None)


@pytest.mark.parametrize("n", range(2, 9))
def test_game_count_matches_independent_counter(n):
    ver = Verifier()
    dom = lambda s: play(s)[1]
    for g in forests(n):
        for var in (D, S):
            expect = count_lines(initial_state(g, var), dom, update)
            assert ver.root(g, var).games == expect


@pytest.mark.parametrize("n", range(2, 9))
def test_worst_length_matches_labelled_search(n):
    def longest(s):
        if is_terminal(s):
            return s.t
        if s.turn.value == "D":
            return longest(play(s)[1])
        return max(longest(update(s, u)) for u in legal_moves(s))

    ver = Verifier()
    for t in trees(n):
        g = t.forest()
        for var in (D, S):
            assert ver.root(g, var).max_moves == longest(initial_state(g, var))


def test_verify_small_clean():
    rep = verify(9, "both")
    assert not rep.failures
    assert rep.total_games > 0
    lines = rep.summary_lines()
    assert lines[-1].endswith("failures=0")


def test_verify_forests_and_adversaries():
    for kind in AdversaryKind:
        rep = verify(8, "both", Adversary(kind, 3), use_forests=True)
        assert not rep.failures, [r.line() for r in rep.failures]


def test_verify_is_deterministic():
    a = verify(8, "staller", Adversary(AdversaryKind.RANDOM, 11))
    b = verify(8, "staller", Adversary(AdversaryKind.RANDOM, 11))
    assert [r.line() for r in a.records] == [r.line() for r in b.records]


def test_verify_range():
    with pytest.raises(ValueError):
        verify(1)
    with pytest.raises(ValueError):
        verify(23)


def test_run_game_record():
    g = list(trees(10))[50].forest()
    rec, s = run_game(g, D, lambda s: min(legal_moves(s)))
    assert rec.T == len(rec.moves) == s.t
    assert rec.result == "Win" and rec.T <= t_max(10, D)
    assert rec.line().startswith("forest=")


def test_witness_replays_worst_line():
    ver = Verifier()
    g = list(trees(10))[30].forest()
    root = ver.root(g, D)
    rec = witness(ver, g, D, root, "x")
    assert rec.T == root.max_moves == len(rec.moves)


def test_reference_semi_agrees_with_solver():
    ver = Verifier(StrategyConfig(self_check=True))
    for t in trees(9):
        ver.root(t.forest(), D)
    sv = ver.engine.solver
    checked = 0
    for k in list(sv.comps):
        inf = sv.info(k)
        if not inf.clean and len(sv.comps[k]) <= 9:
            assert sv.is_semi(k) == reference_semi(sv.comps[k])
            checked += 1
    assert checked > 0


def test_simplified_mode_restricts_instances():
    rep = verify(10, "dominator", cfg=StrategyConfig(simplified_ok=True))
    assert not rep.failures
    assert sum(s.forests for s in rep.per_n.values()) < sum(1 for n in range(2, 11) for _ in trees(n))
