"""Command line: enumerate, verify, gamma, play and trace."""
from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, TextIO

from .adversaries import Adversary, AdversaryKind
from .game_engine import (Color, GameState, IllegalMove, InvariantViolation, Player, Variant,
                          initial_state, is_terminal, legal_moves)
from .graph_core import Forest, GraphError, no_leaves_at_distance_4
from .oracle import CapacityError, gamma
from .strategy import Ladder, StrategyConfig, TieBreak, play, update


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class Script(Exception):
    """Raised when a scripted move list cannot be followed."""


# --- graph files --------------------------------------------------------------

def parse_graph(text: str) -> tuple[Forest, dict[int, int]]:
    """Read the edge-list format; returns the forest and a map internal label -> file id."""
    declared = None
    decl_line = 0
    label: dict[int, int] = {}
    parent: dict[int, int] = {}
    edges = set()

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def vertex(tok: str, ln: int) -> int:
        try:
            ident = int(tok)
        except ValueError:
            raise ParseError(ln, f"bad vertex id {tok!r}") from None
        if ident < 0:
            raise ParseError(ln, f"negative vertex id {ident}")
        if ident not in label:
            if declared is not None and len(label) >= declared:
                raise ParseError(ln, f"more than {declared} vertices")
            label[ident] = 2 * len(label)
            parent[label[ident]] = label[ident]
        return label[ident]

    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "n" and len(tok) == 2:
            if declared is not None:
                raise ParseError(ln, "vertex count given twice")
            try:
                declared = int(tok[1])
            except ValueError:
                raise ParseError(ln, f"bad vertex count {tok[1]!r}") from None
            decl_line = ln
        elif tok[0] == "e" and len(tok) == 3:
            a, b = vertex(tok[1], ln), vertex(tok[2], ln)
            if a == b:
                raise ParseError(ln, "self-loop")
            if (min(a, b), max(a, b)) in edges:
                raise ParseError(ln, "duplicate edge")
            ra, rb = find(a), find(b)
            if ra == rb:
                raise ParseError(ln, "cycle detected")
            parent[ra] = rb
            edges.add((min(a, b), max(a, b)))
        else:
            raise ParseError(ln, f"malformed line {raw.strip()!r}")
    if declared is None:
        raise ParseError(0, "missing 'n <count>' line")
    if len(label) < declared:
        raise ParseError(decl_line, f"{declared - len(label)} isolated vertex(es)")
    if declared < 2:
        raise ParseError(decl_line, "need at least two vertices")
    g = Forest.from_edges(edges, label.values())
    return g, {v: ident for ident, v in label.items()}


def read_graph(path: str) -> tuple[Forest, dict[int, int]]:
    with open(path) as fh:
        return parse_graph(fh.read())


# --- shared -------------------------------------------------------------------

def config_from(args) -> StrategyConfig:
    return StrategyConfig(tiebreak=TieBreak(args.tiebreak), simplified_ok=args.simplified,
                          ladder=Ladder.ALL_DENSE if args.strict_fidelity else Ladder.ROOT_BOXES_ONLY,
                          self_check=getattr(args, "self_check", False))


def show_state(s: GameState, ids: dict[int, int], out: TextIO) -> None:
    from .densify import densify
    name = lambda v: str(ids.get(v, v))
    cells = []
    for v in sorted(s.original.vertices):
        c = s.color[v]
        cells.append(f"{name(v)}:{c.value}{s.value[v] if c is Color.B else ''}")
    out.write("colors " + " ".join(cells) + "\n")
    if not is_terminal(s):
        d = densify(s.underlying, s.color, s.value)
        edges = " ".join(f"{name(a)}-{name(b)}" for a, b in d.graph.edges() if a % 2 == 0 and b % 2 == 0)
        virt = " ".join(f"{name(h)}+v" for h in sorted(d.virtual_of))
        out.write(f"dense {edges}{' virtual ' + virt if virt else ''}\n")
    out.write(f"Psi={s.psi_cumulative} t={s.t}\n")


def dump_boxes(s: GameState, ids: dict[int, int], out: TextIO) -> None:
    from .boxes import find_decomposition
    from .densify import densify
    name = lambda v: str(ids[v]) if v in ids else f"v({ids.get(v - 1, v - 1)})"
    d = densify(s.underlying, s.color, s.value)
    dec = find_decomposition(d, 0) or find_decomposition(d, 1)
    if dec is None:
        out.write("  boxes none\n")
        return
    for i, b in enumerate(dec.boxes):
        root = "-" if b.root is None else name(b.root)
        par = dec.parent.get(i)
        via = "-" if par is None else name(par[1])
        verts = ",".join(name(v) for v in sorted(b.vertices))
        out.write(f"  box type={b.btype.value} root={root} parent={via} vertices={verts}\n")


def _record_line(s: GameState, ids: dict[int, int], status: str = "") -> str:
    moves = ";".join(f"{m.player.value}{ids.get(m.vertex, m.vertex)}:{m.gain}:{m.psi}" for m in s.history)
    verdict = status or ("Win" if s.t <= s.t_max() else "Loss")
    return f"T={s.t} T_max={s.t_max()} Psi={s.psi_cumulative} result={verdict} moves={moves or '-'}"


def _drive(g: Forest, ids: dict[int, int], variant: Variant, cfg: StrategyConfig,
           staller: Callable[[GameState], int], out: TextIO,
           each: Callable[[GameState], None] | None = None) -> GameState:
    s = initial_state(g, variant)
    while not is_terminal(s):
        if s.turn is Player.DOMINATOR:
            v, s = play(s, cfg)
        else:
            v = staller(s)
            s = update(s, v, cfg)
        m = s.history[-1]
        out.write(f"step={s.t} player={m.player.value} vertex={ids.get(v, v)} gain={m.gain} "
                  f"psi={m.psi} Psi={s.psi_cumulative}\n")
        if each is not None:
            each(s)
    return s


# --- commands -----------------------------------------------------------------

def cmd_enumerate(args, out: TextIO) -> int:
    from .tree_enum import forest_id, forest_parts, trees
    total = 0
    for n in range(max(args.min_n, 1), args.max_n + 1):
        count = 0
        if args.forests:
            if n < 2:
                continue
            for parts in forest_parts(n):
                count += 1
                if args.list:
                    out.write(f"{n} {forest_id(parts)}\n")
        else:
            for t in trees(n):
                count += 1
                if args.list:
                    out.write(f"{n} {forest_id((t,))}\n")
        out.write(f"n={n} count={count}\n")
        total += count
    out.write(f"total={total}\n")
    return 0


def cmd_verify(args, out: TextIO) -> int:
    from .harness import verify
    cfg = config_from(args)
    adversary = Adversary(AdversaryKind(args.adversary), args.seed)
    jobs = args.jobs or int(os.environ.get("DOMGAME_JOBS", "1"))
    rep = verify(args.max_n, args.variant, adversary, cfg, args.forests, jobs, args.fail_fast, args.min_n,
                 simplified_only=args.simplified)
    out.write(rep.header() + "\n")
    for r in rep.records:
        if args.all_records or r.failed:
            out.write(r.line() + "\n")
    for line in rep.summary_lines():
        out.write(line + "\n")
    return 1 if rep.failures else 0


def cmd_gamma(args, out: TextIO) -> int:
    from .game_engine import t_max
    g, _ = read_graph(args.file)
    var = Variant(args.variant)
    try:
        val = gamma(g, var, args.cap)
    except CapacityError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    bound = t_max(len(g), var)
    out.write(f"gamma={val} bound={bound} {'ok' if val <= bound else 'violated'}\n")
    return 0 if val <= bound else 1


def _moves_arg(text: str | None, ids: dict[int, int]) -> list[int]:
    if not text:
        return []
    back = {ident: v for v, ident in ids.items()}
    out = []
    for i, tok in enumerate(text.split(","), 1):
        tok = tok.strip()
        try:
            out.append(back[int(tok)])
        except (ValueError, KeyError):
            raise Script(f"scripted move {i}: unknown vertex {tok!r}") from None
    return out


def cmd_play(args, out: TextIO, inp: TextIO) -> int:
    g, ids = read_graph(args.file)
    cfg = config_from(args)
    script = _moves_arg(args.staller_moves, ids)
    back = {ident: v for v, ident in ids.items()}

    def staller(s: GameState) -> int:
        legal = legal_moves(s)
        while True:
            if script:
                v = script.pop(0)
                if v in legal:
                    return v
                out.write(f"illegal move {ids[v]}, try again\n")
                continue
            out.write("staller> ")
            out.flush()
            line = inp.readline()
            if not line:
                raise EOFError
            try:
                v = back[int(line.strip())]
            except (ValueError, KeyError):
                out.write(f"unknown vertex {line.strip()!r}, try again\n")
                continue
            if v in legal:
                return v
            out.write(f"illegal move {line.strip()}, try again\n")

    progress: list[GameState] = [initial_state(g, Variant(args.variant))]
    show_state(progress[0], ids, out)

    def each(s):
        progress.append(s)
        show_state(s, ids, out)

    try:
        s = _drive(g, ids, Variant(args.variant), cfg, staller, out, each)
    except EOFError:
        out.write("\n" + _record_line(progress[-1], ids, "Aborted") + "\n")
        return 1
    out.write(_record_line(s, ids) + "\n")
    return 0 if s.t <= s.t_max() else 1


def cmd_trace(args, out: TextIO) -> int:
    g, ids = read_graph(args.file)
    cfg = config_from(args)
    script = _moves_arg(args.staller_moves, ids)

    def staller(s: GameState) -> int:
        if not script:
            raise Script(f"step {s.t + 1}: the script has no move left for Staller")
        v = script.pop(0)
        if v not in legal_moves(s):
            raise Script(f"step {s.t + 1}: scripted move {ids[v]} is illegal")
        return v

    each = (lambda s: dump_boxes(s, ids, out) if not is_terminal(s) else None) if args.dump_boxes else None
    s0 = initial_state(g, Variant(args.variant))
    if args.dump_boxes:
        dump_boxes(s0, ids, out)
    s = _drive(g, ids, Variant(args.variant), cfg, staller, out, each)
    if script:
        raise Script(f"{len(script)} scripted move(s) left after the game ended")
    out.write(_record_line(s, ids) + "\n")
    return 0 if s.t <= s.t_max() else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="domgame", description="Dominator strategy for the domination game on forests")
    sub = p.add_subparsers(dest="cmd", required=True)

    def strategy_flags(q):
        q.add_argument("--tiebreak", choices=[t.value for t in TieBreak], default=TieBreak.AUTO.value)
        q.add_argument("--simplified", action="store_true",
                       help="skip densify and box decompositions (forests with no two leaves at distance 4)")
        q.add_argument("--strict-fidelity", action="store_true",
                       help="Dominator may play any real dense-graph vertex, not just root-box vertices")

    q = sub.add_parser("enumerate", help="count (or list) trees or forests")
    q.add_argument("--max-n", type=int, required=True)
    q.add_argument("--min-n", type=int, default=1)
    q.add_argument("--forests", action="store_true")
    q.add_argument("--list", action="store_true")

    q = sub.add_parser("verify", help="play the strategy on every instance up to --max-n")
    q.add_argument("--max-n", type=int, required=True)
    q.add_argument("--min-n", type=int, default=2)
    q.add_argument("--variant", choices=["both", "dominator", "staller"], default="both")
    q.add_argument("--adversary", choices=[a.value for a in AdversaryKind], default="exhaustive")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--jobs", type=int, default=0)
    q.add_argument("--forests", action="store_true")
    q.add_argument("--fail-fast", action="store_true")
    q.add_argument("--self-check", action="store_true",
                   help="re-validate every decomposition and semi-corrupted component independently")
    q.add_argument("--all-records", action="store_true", help="print passing records too")
    strategy_flags(q)

    q = sub.add_parser("gamma", help="game domination number by minimax")
    q.add_argument("file")
    q.add_argument("--variant", choices=["dominator", "staller"], default="dominator")
    q.add_argument("--cap", type=int, default=16)

    q = sub.add_parser("play", help="play Staller against the strategy")
    q.add_argument("file")
    q.add_argument("--variant", choices=["dominator", "staller"], default="dominator")
    q.add_argument("--staller-moves", default=None, help="comma separated vertex ids")
    strategy_flags(q)

    q = sub.add_parser("trace", help="replay a scripted game")
    q.add_argument("file")
    q.add_argument("--variant", choices=["dominator", "staller"], default="dominator")
    q.add_argument("--staller-moves", default="")
    q.add_argument("--dump-boxes", action="store_true")
    strategy_flags(q)
    return p


def main(argv: list[str] | None = None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "simplified", False) and args.cmd in ("play", "trace"):
            g, _ = read_graph(args.file)
            if not no_leaves_at_distance_4(g):
                sys.stderr.write("error: --simplified needs a forest with no two leaves at distance 4\n")
                return 2
        if args.cmd == "enumerate":
            return cmd_enumerate(args, out)
        if args.cmd == "verify":
            return cmd_verify(args, out)
        if args.cmd == "gamma":
            return cmd_gamma(args, out)
        if args.cmd == "play":
            return cmd_play(args, out, inp)
        return cmd_trace(args, out)
    except (ParseError, GraphError, Script, IllegalMove, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except InvariantViolation as e:
        sys.stderr.write(f"invariant violation: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
