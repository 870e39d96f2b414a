# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tiny MDPs with known answers and hypothesis strategies."""
from hypothesis import strategies as st

from popctl.library.flowproblem import FlowInstance
from popctl.library.model import OMEGA, IdealSet, Mdp, SymbolicCommit
from popctl.library.semiring import FlowMatrix, Sval


# a retries until the token lands on f: controllable for every population
SIMPLE = """\
states: s f
actions: a
init: s
final: f
trans: s a -> s f
trans: f a -> f
"""

# a may drop the token into the sink z: lost for every population >= 1
TRAP = """\
states: s f z
actions: a
init: s
final: f
trans: s a -> f z
trans: f a -> f
trans: z a -> z
"""

# s never leaves s
LOOP = """\
states: s f
actions: a
init: s
final: f
trans: s a -> s
trans: f a -> f
"""


@st.composite
def flows(draw, min_dim=1, max_dim=3, dim=None, values=tuple(Sval)):
    """Random flow matrices over 0 < 1 < ω < ∞, or over `values`."""
    if dim is None:
        dim = draw(st.integers(min_value=min_dim, max_value=max_dim))
    entries = st.sampled_from(list(values))
    rows = draw(st.lists(st.lists(entries, min_size=dim, max_size=dim),
                         min_size=dim, max_size=dim))
    return FlowMatrix.from_entries(rows)


@st.composite
def mdps(draw, min_states=2, max_states=3, max_actions=2):
    """Random MDPs with initial state `q0` and at least one target state."""
    states = draw(st.integers(min_value=min_states, max_value=max_states))
    actions = draw(st.integers(min_value=1, max_value=max_actions))
    successors = st.sets(st.integers(min_value=0, max_value=states - 1), min_size=1)
    trans = tuple(tuple(tuple(sorted(draw(successors))) for _ in range(actions))
                  for _ in range(states))
    finals = draw(st.sets(st.integers(min_value=1, max_value=states - 1), min_size=1))
    return Mdp(tuple(f"q{s}" for s in range(states)), tuple(f"a{a}" for a in range(actions)),
               trans, 0, frozenset(finals))


@st.composite
def below(draw, config, entries):
    """A configuration below `config` with entries drawn from `entries`."""
    return tuple(draw(st.sampled_from([e for e in entries if e <= bound]))
                 for bound in config)


@st.composite
def counted_flow_instances(draw, max_tokens=3, entries=(0, 1, 2, 3, OMEGA)):
    """
    Instances over two-state MDPs whose w0 has no ω and at most
    `max_tokens` tokens. The targets are every configuration on the target
    states, as in the decision procedure.
    """
    mdp = draw(mdps(max_states=2))
    width = mdp.num_states
    target = SymbolicCommit(tuple(OMEGA if s in mdp.finals else 0 for s in range(width)), 0)
    configs = st.tuples(*[st.sampled_from(entries)] * width)
    actions = st.integers(min_value=0, max_value=mdp.num_actions - 1)
    arena = [SymbolicCommit(draw(configs), draw(actions))
             for _ in range(draw(st.integers(min_value=1, max_value=2)))]
    bound = draw(st.sampled_from(arena)).config
    initial = list(draw(below(bound, [e for e in entries if e != OMEGA])))
    for s in range(width):
        while sum(initial) > max_tokens and initial[s] > 0:
            initial[s] -= 1
    return FlowInstance.create(mdp, tuple(initial), IdealSet.of(arena + [target]),
                               IdealSet.of([target]))
