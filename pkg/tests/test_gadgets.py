# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tests for the gadget builder and the gadget corpus."""
import pytest

from popctl.library.gadget import CORPUS, Expected, GadgetSpec, build
from popctl.library.gadgets.basic import butterfly, force_all, force_one
from popctl.library.gadgets.bottleneck import bottleneck, chain, leaky_chain
from popctl.library.gadgets.helper import HEAVEN, HELL, GadgetBuilder, is_power_of_two
from popctl.library.oracle import is_winnable


def succ(mdp, state, action):
    return {mdp.states[t] for t in mdp.successors(mdp.state_index(state),
                                                  mdp.action_index(action))}


def test_scoped_defaults():
    builder = GadgetBuilder()
    builder.state("p", ("x",))
    builder.state("q")
    builder.action("a", ("x",))
    builder.action("b", ("y",))
    builder.action("c")
    builder.move("p", "c", "q")
    mdp = builder.build("p")
    assert mdp.states == ("p", "q", HEAVEN, HELL)
    assert mdp.finals == frozenset({mdp.state_index(HEAVEN)})
    assert succ(mdp, "p", "a") == {HELL}
    assert succ(mdp, "p", "b") == {"p"}
    assert succ(mdp, "p", "c") == {"q"}
    assert succ(mdp, "q", "a") == {"q"}
    assert succ(mdp, "q", "c") == {HELL}
    assert succ(mdp, HEAVEN, "c") == {HEAVEN}
    assert succ(mdp, HELL, "a") == {HELL}


def test_builder_rejects_mistakes():
    builder = GadgetBuilder()
    builder.state("p")
    builder.action("a")
    with pytest.raises(ValueError):
        builder.state("p")
    with pytest.raises(ValueError):
        builder.state(HEAVEN)
    with pytest.raises(ValueError):
        builder.action("a")
    with pytest.raises(ValueError):
        builder.move("p", "a", "nowhere")
    with pytest.raises(ValueError):
        builder.move("p", "b", "p")
    with pytest.raises(ValueError):
        builder.move("p", "a")
    builder.ignore("p", "a")
    with pytest.raises(ValueError):
        builder.angelic("p", "a")


def test_powers_of_two():
    assert [n for n in range(10) if is_power_of_two(n)] == [1, 2, 4, 8]


@pytest.mark.parametrize("mdp, states, actions", [
    (force_all(), 5, 2),
    (force_one(), 6, 3),
    (butterfly(), 11, 11),
    (bottleneck(1), 5, 3),
    (bottleneck(2), 10, 9),
    (bottleneck(4), 20, 21),
    (chain(2), 12, 10),
    (leaky_chain(2), 20, 19),
])
def test_gadget_sizes(mdp, states, actions):
    assert mdp.num_states == states
    assert mdp.num_actions == actions
    assert mdp.finals == frozenset({mdp.state_index(HEAVEN)})
    assert mdp.initial not in mdp.finals


def test_force_one_isolates_a_token():
    mdp = force_one()
    assert succ(mdp, "m", "b") == {"x", "y"}
    assert succ(mdp, "x", "b") == {HEAVEN}
    assert succ(mdp, "y", "b") == {HELL}
    assert succ(mdp, "i", "b") == {"i"}


def test_butterfly_swaps_hubs():
    mdp = butterfly()
    assert succ(mdp, "init", "scatter") == {"L", "R"}
    assert succ(mdp, "L", "l1") == {"R"}
    assert succ(mdp, "R", "l1") == {"L"}
    assert succ(mdp, "lx", "l1") == {"lp", "lq"}
    assert succ(mdp, "R", "l") == {"R"}
    assert succ(mdp, "rx", "win_l") == {HELL}


def test_nested_bottleneck_scopes():
    mdp = bottleneck(2)
    assert succ(mdp, "s", "b") == {"l", "r"}
    assert succ(mdp, "l", "red.b") == {"red.x", "red.y"}
    assert succ(mdp, "red.x", "red.c") == {"c"}
    # red actions leave the blue copy alone, the parent's actions do not
    assert succ(mdp, "blue.x", "red.c") == {"blue.x"}
    assert succ(mdp, "blue.x", "e") == {HELL}


def test_chain_members():
    mdp = chain(2)
    assert succ(mdp, "q1", "a1") == {"q1", "s1"}
    assert succ(mdp, "c1", "e1") == {"q2"}
    assert succ(mdp, "c2", "e2") == {HEAVEN}
    assert succ(mdp, "q2", "a1") == {"q2"}
    assert succ(mdp, "q1", "b2") == {HELL}


def test_leaky_chain_recovers_into_the_start():
    mdp = leaky_chain(2)
    assert succ(mdp, "c1", "e1") == {"q2", "rec"}
    assert succ(mdp, "c2", "e1") == {"c2", "rec"}
    assert succ(mdp, "rec", "rec.b") == {"rec.l", "rec.r"}
    assert succ(mdp, "rec.c", "rec.e") == {"q1"}


@pytest.mark.parametrize("kind, params", [
    ("unknown", {}),
    ("bottleneck", {}),
    ("bottleneck", {"capacity": 3}),
    ("chain", {"length": 0}),
    ("leaky_chain", {"length": 3}),
    ("countdown", {"game": "v0 1 v1"}),
])
def test_invalid_specs(kind, params):
    with pytest.raises(ValueError):
        GadgetSpec(kind, params)


def test_labels():
    assert GadgetSpec("bottleneck", {"capacity": 2}).label == "bottleneck(capacity=2)"
    assert GadgetSpec("butterfly").label == "butterfly"
    assert build(GadgetSpec("chain", {"length": 3})).num_states == 17


def test_corpus_answers():
    assert all(isinstance(spec.expected, Expected) for spec in CORPUS)
    assert len({spec.label for spec in CORPUS if spec.kind != "countdown"}) == 7


SMALL = [(spec, tokens, answer) for spec in CORPUS if spec.kind != "countdown"
         for tokens, answer in spec.expected.oracle if spec.kind != "leaky_chain" or tokens <= 2]
LEAKY = [(spec, tokens, answer) for spec in CORPUS if spec.kind == "leaky_chain"
         for tokens, answer in spec.expected.oracle if tokens > 2]


@pytest.mark.parametrize("spec, tokens, answer", SMALL,
                         ids=[f"{s.label}-{n}" for s, n, _ in SMALL])
def test_corpus_oracle(spec, tokens, answer):
    assert is_winnable(build(spec), tokens) is answer


@pytest.mark.slow
@pytest.mark.parametrize("spec, tokens, answer", LEAKY,
                         ids=[f"{s.label}-{n}" for s, n, _ in LEAKY])
def test_leaky_chain_oracle(spec, tokens, answer):
    assert is_winnable(build(spec), tokens) is answer
