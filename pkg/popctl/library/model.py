# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Data model for single-agent MDPs and token populations.

Provides the `Mdp` value type with its line-oriented text format, counted
configurations (token-count vectors), symbolic configurations over
ℕ ∪ {ω} with their ideals, and `IdealSet`, a normalized union of ideals of
symbolic commits.

Transitions are support-only: playing an action moves a token to one of
the listed successors, chosen uniformly at random.
"""
import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from popctl.library.common import InputError


OMEGA = math.inf
DUMMY = "__dummy"

Configuration = Tuple[int, ...]
Entry = Union[int, float]
SymbolicConfig = Tuple[Entry, ...]

_NAME = re.compile(r"^[^\s:#]+$")


@dataclass(frozen=True)
class Mdp:
    """Immutable finite MDP with uniform, support-only transitions.

    Attributes:
        states (Tuple[str]): State names, index order is declaration order.
        actions (Tuple[str]): Action names, index order is declaration order.
        trans (Tuple[Tuple[Tuple[int]]]): `trans[s][a]` is the sorted tuple of
            successor state indices. Must be nonempty for every pair.
        initial (int): Index of the initial state.
        finals (FrozenSet[int]): Indices of the target states.
    """
    states: Tuple[str, ...]
    actions: Tuple[str, ...]
    trans: Tuple[Tuple[Tuple[int, ...], ...], ...]
    initial: int
    finals: FrozenSet[int]

    def __post_init__(self):
        if not self.states:
            raise ValueError("an MDP needs at least one state")
        if not self.actions:
            raise ValueError("an MDP needs at least one action")
        if len(set(self.states)) != len(self.states):
            raise ValueError("state names must be unique")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("action names must be unique")
        if not 0 <= self.initial < len(self.states):
            raise ValueError("initial state out of range")
        if any(not 0 <= s < len(self.states) for s in self.finals):
            raise ValueError("final state out of range")
        if len(self.trans) != len(self.states):
            raise ValueError("transition table must have one row per state")
        for row in self.trans:
            if len(row) != len(self.actions):
                raise ValueError("transition table must have one entry per action")
            for succ in row:
                if not succ:
                    raise ValueError("every (state, action) pair needs a successor")
                if any(not 0 <= t < len(self.states) for t in succ):
                    raise ValueError("successor state out of range")

    @property
    def num_states(self) -> int:
        """Number of states |S|."""
        return len(self.states)

    @property
    def num_actions(self) -> int:
        """Number of actions |Σ|."""
        return len(self.actions)

    def successors(self, state: int, action: int) -> Tuple[int, ...]:
        """Successor states of `state` under `action`."""
        return self.trans[state][action]

    def state_index(self, name: str) -> int:
        """Index of the state called `name`."""
        return self.states.index(name)

    def action_index(self, name: str) -> int:
        """Index of the action called `name`."""
        return self.actions.index(name)

    @property
    def dummy(self) -> Optional[int]:
        """Index of the dummy self-loop action, None if absent."""
        if DUMMY in self.actions:
            return self.actions.index(DUMMY)
        return None

    def with_dummy(self) -> "Mdp":
        """
        Return this MDP extended with the reserved dummy action.

        The dummy action is a self-loop on every state. The MDP is returned
        unchanged when it already has one.
        """
        if DUMMY in self.actions:
            return self
        trans = tuple(row + ((s,),) for s, row in enumerate(self.trans))
        return Mdp(self.states, self.actions + (DUMMY,), trans, self.initial, self.finals)


def build_mdp(states: Iterable[str], actions: Iterable[str],
              transitions: Dict[Tuple[str, str], Iterable[str]],
              initial: str, finals: Iterable[str]) -> Mdp:
    """
    Build an `Mdp` from names.

    Args:
        states (Iterable[str]): State names in index order.
        actions (Iterable[str]): Action names in index order.
        transitions (dict): Map (state, action) to successor names. Must be total.
        initial (str): Initial state name.
        finals (Iterable[str]): Target state names.

    Returns:
        Mdp: Validated MDP.

    Raises:
        ValueError: If the table is not total or names are unknown.
    """
    states = tuple(states)
    actions = tuple(actions)
    index = {name: i for i, name in enumerate(states)}
    trans = []
    for state in states:
        row = []
        for action in actions:
            if (state, action) not in transitions:
                raise ValueError(f"missing transition for {state} {action}")
            row.append(tuple(sorted({index[t] for t in transitions[state, action]})))
        trans.append(tuple(row))
    return Mdp(states, actions, tuple(trans), index[initial],
               frozenset(index[f] for f in finals))


def initial_configuration(mdp: Mdp, tokens: int) -> Configuration:
    """Configuration with all `tokens` on the initial state."""
    counts = [0] * mdp.num_states
    counts[mdp.initial] = tokens
    return tuple(counts)


def is_final_configuration(mdp: Mdp, config: Configuration) -> bool:
    """True if every token sits on a target state."""
    return all(n == 0 or s in mdp.finals for s, n in enumerate(config))


def step_supports(mdp: Mdp, config: Configuration, action: int) -> FrozenSet[Configuration]:
    """
    Configurations reachable with positive probability in one step.

    Every state distributes its tokens among its successors under `action`
    independently; the result is the convolution of these distributions.

    Args:
        mdp (Mdp): Agent MDP.
        config (Configuration): Current token counts.
        action (int): Action index.

    Returns:
        FrozenSet[Configuration]: All successor configurations.
    """
    width = mdp.num_states
    result = {(0,) * width}
    for state, count in enumerate(config):
        if count == 0:
            continue
        spreads = [Counter(combo).items() for combo in
                   itertools.combinations_with_replacement(mdp.successors(state, action), count)]
        merged = set()
        for base in result:
            for spread in spreads:
                vector = list(base)
                for target, moved in spread:
                    vector[target] += moved
                merged.add(tuple(vector))
        result = merged
    return frozenset(result)


def symbolic_leq(left: SymbolicConfig, right: SymbolicConfig) -> bool:
    """
    Product order on (ℕ ∪ {ω})^S.

    Raises:
        ValueError: If the dimensions differ.
    """
    if len(left) != len(right):
        raise ValueError("symbolic configurations have different dimensions")
    return all(x <= y for x, y in zip(left, right))


def omega_count(config: SymbolicConfig) -> int:
    """Number of ω entries."""
    return sum(1 for x in config if x == OMEGA)


def finite_part(config: SymbolicConfig) -> int:
    """Sum of the finite entries."""
    return sum(x for x in config if x != OMEGA)


def largest_constant(config: SymbolicConfig) -> int:
    """Largest finite entry, 0 if there is none."""
    return max((x for x in config if x != OMEGA), default=0)


def antichain(configs: Iterable[SymbolicConfig]) -> List[SymbolicConfig]:
    """
    Maximal elements of a set of symbolic configurations.

    Returns:
        List[SymbolicConfig]: The maximal elements, in sorted order.
    """
    ordered = sorted(set(configs), key=lambda c: (omega_count(c), finite_part(c)), reverse=True)
    kept = []
    for config in ordered:
        if not any(symbolic_leq(config, other) for other in kept):
            kept.append(config)
    return sorted(kept)


@dataclass(frozen=True, order=True)
class SymbolicCommit:
    """A symbolic configuration together with the action played on it.

    Attributes:
        config (SymbolicConfig): Entries over ℕ ∪ {ω}, one per state.
        action (int): Action index.
    """
    config: SymbolicConfig
    action: int

    def __post_init__(self):
        if self.action < 0:
            raise ValueError("action index must be >= 0")
        if any(x != OMEGA and (x < 0 or x != int(x)) for x in self.config):
            raise ValueError("entries must be natural numbers or ω")


@dataclass(frozen=True)
class IdealSet:
    """Finite union of ideals of symbolic commits.

    Build instances with `IdealSet.of`, which normalizes the commits to an
    antichain per action in a deterministic order.

    Attributes:
        commits (Tuple[SymbolicCommit]): Maximal commits, sorted.
    """
    commits: Tuple[SymbolicCommit, ...] = ()

    @classmethod
    def of(cls, commits: Iterable[SymbolicCommit]) -> "IdealSet":
        """Normalize `commits` into an `IdealSet`."""
        by_action: Dict[int, List[SymbolicConfig]] = {}
        for commit in commits:
            by_action.setdefault(commit.action, []).append(commit.config)
        normalized = []
        for action in sorted(by_action):
            normalized.extend(SymbolicCommit(c, action) for c in antichain(by_action[action]))
        return cls(tuple(normalized))

    def __iter__(self):
        return iter(self.commits)

    def __len__(self):
        return len(self.commits)

    def contains(self, config: SymbolicConfig, action: Optional[int] = None) -> bool:
        """True if some commit (with `action`, when given) dominates `config`."""
        return any((action is None or commit.action == action)
                   and symbolic_leq(config, commit.config)
                   for commit in self.commits)

    def configs(self) -> List[SymbolicConfig]:
        """Maximal configurations regardless of action."""
        return antichain(commit.config for commit in self.commits)

    def largest_constant(self) -> int:
        """Largest finite entry over all commits."""
        return max((largest_constant(commit.config) for commit in self.commits), default=0)

    def union(self, other: "IdealSet") -> "IdealSet":
        """Normalized union of two ideal sets."""
        return IdealSet.of(self.commits + other.commits)


def ideal_contains(ideals: IdealSet, config: SymbolicConfig, action: Optional[int] = None) -> bool:
    """
    Membership of a (symbolic) configuration in the union of ideals.

    Args:
        ideals (IdealSet): Union of ideals.
        config (SymbolicConfig): Counted or symbolic configuration.
        action (int | None): Restrict to commits playing this action.

    Returns:
        bool: True if some matching commit dominates `config`.
    """
    return ideals.contains(config, action)


def format_entry(entry: Entry) -> str:
    """Text form of a symbolic entry: decimal or `w`."""
    return "w" if entry == OMEGA else str(int(entry))


def format_config(config: SymbolicConfig) -> str:
    """Space separated text form of a symbolic configuration."""
    return " ".join(format_entry(x) for x in config)


def parse_entry(token: str, line: Optional[int] = None) -> Entry:
    """Parse `w` or a decimal number."""
    if token == "w":
        return OMEGA
    if token.isdigit():
        return int(token)
    raise InputError(f"invalid entry '{token}', expected a number or 'w'", line)


def keyed_lines(text: str):
    """
    Yield (line number, key, tokens) for every non-empty line of `text`.

    Comments start with `#`. Raises InputError on lines without a key.
    """
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise InputError(f"expected '<key>: ...', got '{line}'", number)
        yield number, key.strip(), rest.split()


def _check_names(names, kind, number):
    seen = set()
    for name in names:
        if not _NAME.match(name) or name == "->":
            raise InputError(f"invalid {kind} name '{name}'", number)
        if name.startswith("__"):
            raise InputError(f"{kind} names starting with '__' are reserved", number)
        if name in seen:
            raise InputError(f"duplicate {kind} name '{name}'", number)
        seen.add(name)


def parse_document(text: str, extra_keys=()):
    """
    Parse an MDP file, collecting lines for `extra_keys` unparsed.

    Args:
        text (str): File content.
        extra_keys (Iterable[str]): Additional keys accepted by the caller.

    Returns:
        Tuple[Mdp, Dict[str, List[Tuple[int, List[str]]]]]: The MDP and the
        extra lines as (line number, tokens) per key.

    Raises:
        InputError: On syntax errors, unknown or duplicate names and
            totality violations.
    """
    header: Dict[str, Tuple[int, List[str]]] = {}
    trans_lines: Dict[Tuple[str, str], Tuple[int, List[str]]] = {}
    extra: Dict[str, List[Tuple[int, List[str]]]] = {key: [] for key in extra_keys}
    for number, key, tokens in keyed_lines(text):
        if key in ("states", "actions", "init", "final"):
            if key in header:
                raise InputError(f"duplicate '{key}' line", number)
            header[key] = (number, tokens)
        elif key == "trans":
            if len(tokens) < 4 or tokens[2] != "->":
                raise InputError("expected 'trans: <state> <action> -> <succ> ...'", number)
            if (tokens[0], tokens[1]) in trans_lines:
                raise InputError(f"duplicate transition for {tokens[0]} {tokens[1]}", number)
            trans_lines[tokens[0], tokens[1]] = (number, tokens[3:])
        elif key in extra:
            extra[key].append((number, tokens))
        else:
            raise InputError(f"unknown key '{key}'", number)

    for key in ("states", "actions", "init", "final"):
        if key not in header:
            raise InputError(f"missing '{key}' line")
    number, states = header["states"]
    _check_names(states, "state", number)
    if not states:
        raise InputError("at least one state is required", number)
    number, actions = header["actions"]
    _check_names(actions, "action", number)
    if not actions:
        raise InputError("at least one action is required", number)
    state_set = set(states)

    number, init = header["init"]
    if len(init) != 1 or init[0] not in state_set:
        raise InputError("'init' must name exactly one declared state", number)
    number, finals = header["final"]
    for name in finals:
        if name not in state_set:
            raise InputError(f"unknown state '{name}'", number)

    for (state, action), (number, succ) in trans_lines.items():
        if state not in state_set:
            raise InputError(f"unknown state '{state}'", number)
        if action not in actions:
            raise InputError(f"unknown action '{action}'", number)
        for name in succ:
            if name not in state_set:
                raise InputError(f"unknown state '{name}'", number)
    for state in states:
        for action in actions:
            if (state, action) not in trans_lines:
                raise InputError(f"missing transition 'trans: {state} {action}'")

    mdp = build_mdp(states, actions, {pair: succ for pair, (_, succ) in trans_lines.items()},
                    init[0], finals)
    return mdp, extra


def parse_mdp(text: str) -> Mdp:
    """
    Parse the line-oriented MDP format.

    Example:
        states: s0 s1 f
        actions: a b
        init: s0
        final: f
        trans: s0 a -> s0 s1
        ...

    Returns:
        Mdp: Validated MDP. Successor lists are deduplicated.
    """
    mdp, _ = parse_document(text)
    return mdp


def render_mdp(mdp: Mdp) -> str:
    """
    Print an MDP in normalized text form.

    Reserved actions (such as the dummy self-loop) are omitted.
    """
    visible = [a for a, name in enumerate(mdp.actions) if not name.startswith("__")]
    lines = [
        "states: " + " ".join(mdp.states),
        "actions: " + " ".join(mdp.actions[a] for a in visible),
        f"init: {mdp.states[mdp.initial]}",
        ("final: " + " ".join(mdp.states[s] for s in sorted(mdp.finals))).rstrip(),
    ]
    for s, name in enumerate(mdp.states):
        for a in visible:
            succ = " ".join(mdp.states[t] for t in mdp.successors(s, a))
            lines.append(f"trans: {name} {mdp.actions[a]} -> {succ}")
    return "\n".join(lines) + "\n"


def parse_commit(mdp: Mdp, tokens: List[str], line: Optional[int] = None) -> SymbolicCommit:
    """Parse `<e_0> ... <e_{|S|-1}> <action>` into a commit."""
    if len(tokens) != mdp.num_states + 1:
        raise InputError(f"expected {mdp.num_states} entries and an action", line)
    if tokens[-1] not in mdp.actions:
        raise InputError(f"unknown action '{tokens[-1]}'", line)
    config = tuple(parse_entry(token, line) for token in tokens[:-1])
    return SymbolicCommit(config, mdp.action_index(tokens[-1]))


def parse_ideal_set(text: str, mdp: Mdp) -> IdealSet:
    """Parse `commit:` lines against the states and actions of `mdp`."""
    commits = []
    for number, key, tokens in keyed_lines(text):
        if key != "commit":
            raise InputError(f"unknown key '{key}'", number)
        commits.append(parse_commit(mdp, tokens, number))
    return IdealSet.of(commits)


def render_commit(mdp: Mdp, commit: SymbolicCommit) -> str:
    """Text form `<entries> <action>` of a commit."""
    return f"{format_config(commit.config)} {mdp.actions[commit.action]}"


def render_ideal_set(ideals: IdealSet, mdp: Mdp, key: str = "commit") -> str:
    """Print an ideal set as one `commit:` line per maximal commit."""
    return "".join(f"{key}: {render_commit(mdp, commit)}\n" for commit in ideals)
