# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Countdown games and their reduction to population control.

A countdown game is a graph whose edges carry positive weights. From a
pair (v, c) Player 1 picks a weight d <= c that labels some edge leaving v,
Player 2 picks one such edge (v, d, v') and play continues from (v', c - d).
Player 1 wins when the counter reaches 0.

The reduction builds an MDP out of five parts:

- waiting room `wait`/`ready`: `wait` shuffles tokens until one is ready,
  `go` sends the ready token to the start vertex of the game;
- game: one action `play.<v>.<d>` per vertex and weight;
- binary counters `MC` (game counter) and `AC` (current weight) with
  decrement and error actions per bit;
- control `ctl.W`, `ctl.G`, `ctl.A`, `ctl.B`: a sequencer that only admits
  `wait* go (play (AC.dec MC.dec)* next)* win`, all other actions are
  daemonic there;
- `start`, which spreads the tokens over the waiting room, the control and
  every zero bit, and `end`, which is angelic once the waiting room is empty.

The population can be controlled for every size iff Player 1 wins.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from popctl.library.common import InputError, resolve_limit
from popctl.library.gadgets.helper import GadgetBuilder
from popctl.library.model import Mdp, keyed_lines


CONTROL = ("control",)

Edge = Tuple[str, int, str]


@dataclass(frozen=True)
class CountdownGame:
    """
    A countdown game with its initial pair.

    Attributes:
        vertices (Tuple[str]): Vertex names.
        edges (Tuple[Edge]): Weighted edges (v, d, v'), d >= 1.
        start (str): Initial vertex v0.
        counter (int): Initial counter value c0 >= 0.
    """
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    start: str
    counter: int

    def __post_init__(self):
        if self.start not in self.vertices:
            raise ValueError(f"start vertex {self.start} is not a vertex")
        if self.counter < 0:
            raise ValueError("initial counter must be non-negative")
        for source, weight, target in self.edges:
            if source not in self.vertices or target not in self.vertices:
                raise ValueError(f"edge ({source}, {weight}, {target}) uses an unknown vertex")
            if weight < 1:
                raise ValueError("edge weights must be at least 1")

    @property
    def max_weight(self) -> int:
        """Largest edge weight, 0 without edges."""
        return max((weight for _, weight, _ in self.edges), default=0)

    def moves(self) -> Dict[str, Dict[int, Tuple[str, ...]]]:
        """Successors per vertex and weight."""
        result: Dict[str, Dict[int, List[str]]] = {v: {} for v in self.vertices}
        for source, weight, target in self.edges:
            result[source].setdefault(weight, []).append(target)
        return {v: {d: tuple(sorted(set(succ))) for d, succ in sorted(by_weight.items())}
                for v, by_weight in result.items()}


def parse_countdown_game(text: str) -> CountdownGame:
    """
    Parse `edge: <v> <d> <v'>` lines and one `start: <v0> <c0>` line.

    Raises:
        InputError: On malformed or missing lines.
    """
    edges = []
    start = None
    vertices = {}
    for number, key, tokens in keyed_lines(text):
        if key == "edge":
            if len(tokens) != 3 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise InputError("expected 'edge: <vertex> <weight >= 1> <vertex>'", number)
            edges.append((tokens[0], int(tokens[1]), tokens[2]))
            vertices.setdefault(tokens[0])
            vertices.setdefault(tokens[2])
        elif key == "start":
            if start is not None:
                raise InputError("duplicate 'start' line", number)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise InputError("expected 'start: <vertex> <counter>'", number)
            start = (tokens[0], int(tokens[1]))
            vertices.setdefault(tokens[0])
        else:
            raise InputError(f"unknown key '{key}'", number)
    if start is None:
        raise InputError("missing 'start' line")
    return CountdownGame(tuple(vertices), tuple(edges), start[0], start[1])


def render_countdown_game(game: CountdownGame) -> str:
    """Inverse of `parse_countdown_game`."""
    lines = [f"start: {game.start} {game.counter}"]
    lines += [f"edge: {v} {d} {t}" for v, d, t in game.edges]
    return "\n".join(lines) + "\n"


def countdown_winner(game: CountdownGame, vertex: Optional[str] = None,
                     counter: Optional[int] = None) -> bool:
    """
    Decide whether Player 1 wins from (vertex, counter).

    Args:
        game (CountdownGame): The game.
        vertex (str | None): Start vertex, the game's own by default.
        counter (int | None): Counter value, the game's own by default.

    Returns:
        bool: True if Player 1 can force the counter to exactly 0.
    """
    moves = game.moves()

    @lru_cache(maxsize=None)
    def wins(v, c):
        if c == 0:
            return True
        return any(weight <= c and all(wins(t, c - weight) for t in succ)
                   for weight, succ in moves[v].items())

    return wins(game.start if vertex is None else vertex,
                game.counter if counter is None else counter)


def counter_bits(game: CountdownGame) -> Tuple[int, int]:
    """Bits of the main counter (c0) and of the auxiliary counter (largest weight)."""
    return max(1, game.counter.bit_length()), max(1, game.max_weight.bit_length())


def countdown_population(game: CountdownGame) -> int:
    """
    Smallest population that can initialize every part of the reduction with
    two tokens in the waiting room, so that one token has to play the game.
    """
    main, aux = counter_bits(game)
    return 3 + main + aux


class _BinaryCounter:
    """States `<name>.b<i>.<j>` and actions `<name>.dec<i>`, `<name>.error<i>`."""

    def __init__(self, builder: GadgetBuilder, name: str, width: int):
        self.builder = builder
        self.bits = [(builder.state(f"{name}.b{i}.0", (name,)),
                      builder.state(f"{name}.b{i}.1", (name,))) for i in range(width)]
        self.decrements = [builder.action(f"{name}.dec{i}", CONTROL) for i in range(width)]
        self.errors = [builder.action(f"{name}.error{i}", CONTROL) for i in range(width)]

    def zeros(self) -> List[str]:
        """States of the cleared bits."""
        return [zero for zero, _ in self.bits]

    def wire_decrements(self):
        """`dec<i>` flips the zeros below bit i and clears bit i."""
        for i, action in enumerate(self.decrements):
            for j, (zero, one) in enumerate(self.bits[:i + 1]):
                if j < i:
                    self.builder.move(zero, action, one)
                    self.builder.daemonic(one, action)
                else:
                    self.builder.move(one, action, zero)
                    self.builder.daemonic(zero, action)

    def wire_set(self, action: str, value: int):
        """`action` loads `value` into a counter holding 0."""
        for i, (zero, one) in enumerate(self.bits):
            self.builder.move(zero, action, one if value >> i & 1 else zero)
            self.builder.daemonic(one, action)

    def block_nonzero(self, action: str):
        """`action` is only safe while the counter holds 0."""
        for _, one in self.bits:
            self.builder.daemonic(one, action)


# pylint: disable=too-many-locals, too-many-statements, too-many-branches
def countdown(game: CountdownGame, *, cap: Optional[int] = None) -> Mdp:
    """
    Build the population control instance of a countdown game.

    Args:
        game (CountdownGame): The game with its initial pair.
        cap (int | None): Largest admissible constant (c0 and weights).

    Returns:
        Mdp: Initial state `start`, target `heaven`.

    Raises:
        ValueError: If c0 or a weight exceeds `cap`.
    """
    cap = resolve_limit(cap, "countdown_constant")
    if game.counter > cap or game.max_weight > cap:
        raise ValueError(f"countdown constants are limited to {cap}")
    main_bits, aux_bits = counter_bits(game)
    moves = game.moves()
    builder = GadgetBuilder()
    start = builder.state("start", CONTROL)
    waiting, ready = builder.state("wait", ("waiting",)), builder.state("ready", ("waiting",))
    vertex = {v: builder.state(f"v.{v}", ("game",)) for v in game.vertices}
    main = _BinaryCounter(builder, "MC", main_bits)
    aux = _BinaryCounter(builder, "AC", aux_bits)
    ctl = {name: builder.state(f"ctl.{name}", CONTROL) for name in "WGAB"}

    begin, end, shuffle, go, win, step, error = (
        builder.action(name, CONTROL)
        for name in ("start", "end", "wait", "go", "win", "next", "error"))
    plays = {(v, d): builder.action(f"play.{v}.{d}", CONTROL)
             for v in game.vertices for d in moves[v]}

    builder.move(start, begin, waiting, ctl["W"], *main.zeros(), *aux.zeros())
    others = [s for s in builder.states if s != start]
    for state in others:
        builder.daemonic(state, begin)
        if state in (waiting, ready):
            builder.daemonic(state, end)
        else:
            builder.angelic(state, end)
        if state in ctl.values():
            builder.daemonic(state, error)
        else:
            builder.angelic(state, error)
    for counter in (main, aux):
        for i, action in enumerate(counter.errors):
            for state in others:
                if state in counter.bits[i]:
                    builder.daemonic(state, action)
                else:
                    builder.angelic(state, action)
        counter.wire_decrements()

    for state in (waiting, ready):
        builder.move(state, shuffle, waiting, ready)
    builder.move(ready, go, vertex[game.start])
    builder.move(ctl["W"], shuffle, ctl["W"])
    builder.move(ctl["W"], go, ctl["G"])
    main.wire_set(go, game.counter)

    for (v, d), action in plays.items():
        for u, state in vertex.items():
            if u == v:
                builder.move(state, action, *(vertex[t] for t in moves[v][d]))
            else:
                builder.daemonic(state, action)
        builder.move(ctl["G"], action, ctl["A"])
        aux.wire_set(action, d)
    for action in aux.decrements:
        builder.move(ctl["A"], action, ctl["B"])
    for action in main.decrements:
        builder.move(ctl["B"], action, ctl["A"])
    builder.move(ctl["A"], step, ctl["G"])
    aux.block_nonzero(step)

    for state in vertex.values():
        builder.angelic(state, win)
    main.block_nonzero(win)
    builder.move(ctl["G"], win, ctl["W"])
    return builder.build("start")
