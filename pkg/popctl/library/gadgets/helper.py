# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Builder for gadget MDPs.

Gadgets are described by naming a few transitions and leaving the rest to
conventions:

- `heaven` is the target and `hell` the losing sink; both ignore every action.
- An action is *angelic* for a state if it takes it only to `heaven`,
  *daemonic* if it takes it to `hell`, and *ignored* if it takes the state
  only back to itself.
- States and actions live in scopes (tuples of names). A pair that is never
  defined is daemonic when the state lies in the scope of the action or in
  one of its sub-scopes, and ignored otherwise. The start and target of a
  nested gadget belong to the enclosing scope.
"""
from typing import Dict, Iterable, Optional, Tuple

from popctl.library.model import Mdp, build_mdp


HEAVEN = "heaven"
HELL = "hell"

Scope = Tuple[str, ...]


class GadgetBuilder:
    """
    Collects states, actions and transitions of a gadget.

    Attributes:
        states (Dict[str, Scope]): State names in insertion order with their scope.
        actions (Dict[str, Scope]): Action names in insertion order with their scope.
        moves (Dict[Tuple[str, str], Tuple[str]]): Explicitly defined transitions.
    """

    def __init__(self):
        self.states: Dict[str, Scope] = {}
        self.actions: Dict[str, Scope] = {}
        self.moves: Dict[Tuple[str, str], Tuple[str, ...]] = {}

    def state(self, name: str, scope: Scope = ()) -> str:
        """Add a state and return its name."""
        if name in self.states or name in (HEAVEN, HELL):
            raise ValueError(f"duplicate state {name}")
        self.states[name] = tuple(scope)
        return name

    def action(self, name: str, scope: Scope = ()) -> str:
        """Add an action and return its name."""
        if name in self.actions:
            raise ValueError(f"duplicate action {name}")
        self.actions[name] = tuple(scope)
        return name

    def move(self, state: str, action: str, *successors: str):
        """
        Define the successors of `state` under `action`.

        Raises:
            ValueError: If the pair is already defined or a name is unknown.
        """
        if (state, action) in self.moves:
            raise ValueError(f"transition {state} {action} defined twice")
        known = set(self.states) | {HEAVEN, HELL}
        for name in (state,) + successors:
            if name not in known:
                raise ValueError(f"unknown state {name}")
        if action not in self.actions:
            raise ValueError(f"unknown action {action}")
        if not successors:
            raise ValueError(f"transition {state} {action} needs a successor")
        self.moves[state, action] = tuple(successors)

    def angelic(self, state: str, action: str):
        """Take `state` only to `heaven` under `action`."""
        self.move(state, action, HEAVEN)

    def daemonic(self, state: str, action: str):
        """Take `state` to `hell` under `action`."""
        self.move(state, action, HELL)

    def ignore(self, state: str, action: str):
        """Keep `state` in place under `action`."""
        self.move(state, action, state)

    def is_inside(self, state: str, action: str) -> bool:
        """True if `state` lies in the scope of `action` or below it."""
        owner = self.actions[action]
        return self.states[state][:len(owner)] == owner

    def build(self, initial: str, finals: Optional[Iterable[str]] = None) -> Mdp:
        """
        Complete the transition table and return the MDP.

        Args:
            initial (str): Initial state.
            finals (Iterable[str] | None): Target states, `heaven` by default.

        Returns:
            Mdp: The validated gadget.
        """
        states = list(self.states) + [HEAVEN, HELL]
        transitions = {}
        for state in states:
            for action in self.actions:
                if state in (HEAVEN, HELL):
                    transitions[state, action] = (state,)
                elif (state, action) in self.moves:
                    transitions[state, action] = self.moves[state, action]
                elif self.is_inside(state, action):
                    transitions[state, action] = (HELL,)
                else:
                    transitions[state, action] = (state,)
        if finals is None:
            finals = [HEAVEN]
        return build_mdp(states, self.actions, transitions, initial, finals)


def is_power_of_two(value: int) -> bool:
    """True for 1, 2, 4, ..."""
    return value >= 1 and value & (value - 1) == 0
