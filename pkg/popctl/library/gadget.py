# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Gadget driver.

Maps gadget kinds to their builders and ships the corpus of instances whose
answers are known.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from popctl.library.gadgets.basic import butterfly, force_all, force_one
from popctl.library.gadgets.bottleneck import bottleneck, chain, leaky_chain
from popctl.library.gadgets.countdown import (
    CountdownGame,
    countdown,
    countdown_population,
    countdown_winner
)
from popctl.library.gadgets.helper import is_power_of_two
from popctl.library.model import Mdp


KINDS = {
    'force_all': lambda params: force_all(),
    'force_one': lambda params: force_one(),
    'butterfly': lambda params: butterfly(),
    'bottleneck': lambda params: bottleneck(params['capacity']),
    'chain': lambda params: chain(params['length']),
    'leaky_chain': lambda params: leaky_chain(params['length']),
    'countdown': lambda params: countdown(params['game'], cap=params.get('cap')),
}

PARAMETERS = {
    'force_all': (),
    'force_one': (),
    'butterfly': (),
    'bottleneck': ('capacity',),
    'chain': ('length',),
    'leaky_chain': ('length',),
    'countdown': ('game',),
}


@dataclass(frozen=True)
class Expected:
    """
    Known answers for a gadget.

    Attributes:
        decide (bool | None): Answer for arbitrarily large populations.
        oracle (Tuple[Tuple[int, bool]]): (population size, winnable) pairs.
    """
    decide: Optional[bool] = None
    oracle: Tuple[Tuple[int, bool], ...] = ()


@dataclass(frozen=True)
class GadgetSpec:
    """
    A gadget kind with its parameters.

    Attributes:
        kind (str): Key of `KINDS`.
        params (dict): `capacity` (bottleneck), `length` (chains), `game`
            and optionally `cap` (countdown).
        expected (Expected | None): Known answers, if any.
    """
    kind: str
    params: Dict = field(default_factory=dict)
    expected: Optional[Expected] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gadget kind {self.kind}")
        for name in PARAMETERS[self.kind]:
            if name not in self.params:
                raise ValueError(f"gadget {self.kind} needs parameter '{name}'")
        if self.kind == 'bottleneck' and not is_power_of_two(self.params['capacity']):
            raise ValueError("bottleneck capacity must be a power of two")
        if self.kind == 'chain' and self.params['length'] < 1:
            raise ValueError("chain length must be at least 1")
        if self.kind == 'leaky_chain' and not is_power_of_two(self.params['length']):
            raise ValueError("leaky chain length must be a power of two")
        if self.kind == 'countdown' and not isinstance(self.params['game'], CountdownGame):
            raise ValueError("countdown needs a CountdownGame")

    @property
    def label(self) -> str:
        """Short name such as `bottleneck(capacity=2)`."""
        values = [f"{key}={value}" for key, value in self.params.items()
                  if key in PARAMETERS[self.kind] and key != 'game']
        return f"{self.kind}({', '.join(values)})" if values else self.kind


def build(spec: GadgetSpec) -> Mdp:
    """Build the MDP of `spec`."""
    return KINDS[spec.kind](spec.params)


def countdown_spec(game: CountdownGame) -> GadgetSpec:
    """Spec of a countdown reduction with its answer from the game itself."""
    winner = countdown_winner(game)
    return GadgetSpec('countdown', {'game': game},
                      Expected(decide=winner, oracle=((countdown_population(game), winner),)))


def _game(start, counter, *edges):
    vertices = tuple(dict.fromkeys([start] + [v for e in edges for v in (e[0], e[2])]))
    return CountdownGame(vertices, tuple(edges), start, counter)


COUNTDOWN_GAMES = (
    _game('v0', 1, ('v0', 1, 'v1')),
    _game('v0', 2, ('v0', 1, 'v0')),
    _game('v0', 3, ('v0', 1, 'v0'), ('v0', 2, 'v0')),
    _game('v0', 1),
    _game('v0', 1, ('v0', 2, 'v0')),
    _game('v0', 2, ('v0', 1, 'v0'), ('v0', 1, 'v1')),
)

_POSITIVE = Expected(decide=True, oracle=((1, True), (2, True), (3, True), (4, True)))

CORPUS = (
    GadgetSpec('force_all', {}, _POSITIVE),
    GadgetSpec('force_one', {}, _POSITIVE),
    GadgetSpec('butterfly', {}, _POSITIVE),
    GadgetSpec('bottleneck', {'capacity': 1},
               Expected(False, ((1, True), (2, False), (3, False), (4, False)))),
    GadgetSpec('bottleneck', {'capacity': 2},
               Expected(False, ((1, True), (2, True), (3, False), (4, False)))),
    GadgetSpec('chain', {'length': 2}, _POSITIVE),
    GadgetSpec('leaky_chain', {'length': 2}, _POSITIVE),
) + tuple(countdown_spec(game) for game in COUNTDOWN_GAMES)
